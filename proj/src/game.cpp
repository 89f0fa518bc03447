#include "critk/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "critk/errors.hpp"
#include "critk/rng.hpp"

namespace critk {

int Allocation::find(int node) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == node) return static_cast<int>(i);
    return -1;
}

double Allocation::value_of(int node) const {
    int p = find(node);
    if (p < 0) throw LookupError("node " + std::to_string(node) + " not in allocation");
    return value[p];
}

double CoalitionGame::evaluate(std::span<const int> coalition) const {
    for (int v : coalition)
        if (v < 0 || v >= static_cast<int>(member.size()) || !member[v])
            throw DomainError("coalition member " + std::to_string(v) +
                              " is outside the game's ground set");
    if (prefix.empty()) return nu.evaluate(coalition) - base;
    std::vector<int> combined(prefix.begin(), prefix.end());
    combined.insert(combined.end(), coalition.begin(), coalition.end());
    return nu.evaluate(combined) - base;
}

double CoalitionGame::evaluate(std::initializer_list<int> coalition) const {
    return evaluate(std::span<const int>(coalition.begin(), coalition.size()));
}

CoalitionGame make_game(ValuationOracle nu) {
    std::vector<int> ground(nu.num_players());
    std::iota(ground.begin(), ground.end(), 0);
    return make_reduced_game(std::move(nu), std::move(ground), {});
}

CoalitionGame make_game(ValuationOracle nu, std::vector<int> ground) {
    return make_reduced_game(std::move(nu), std::move(ground), {});
}

CoalitionGame make_reduced_game(ValuationOracle nu, std::vector<int> ground,
                                std::vector<int> prefix) {
    std::vector<std::uint8_t> member(nu.num_players(), 0);
    for (int v : ground) {
        if (v < 0 || v >= nu.num_players())
            throw LookupError("ground member " + std::to_string(v) + " is not a player");
        if (member[v]) throw StructureError("duplicate ground member " + std::to_string(v));
        member[v] = 1;
    }
    for (int v : prefix)
        if (v >= 0 && v < nu.num_players() && member[v])
            throw StructureError("prefix member " + std::to_string(v) + " is also in ground");
    double base = prefix.empty() ? 0.0 : nu.evaluate(prefix);
    return CoalitionGame{std::move(ground), std::move(nu), std::move(prefix), base,
                         std::move(member)};
}

Allocation shapley_exact(const CoalitionGame& game) {
    const int r = game.size();
    if (r > kExactShapleyMaxPlayers)
        throw SizeError("exact Shapley limited to " + std::to_string(kExactShapleyMaxPlayers) +
                        " players (got " + std::to_string(r) + "); use shapley_mc");

    Allocation a;
    a.nodes = game.ground;
    a.value.assign(r, 0.0);
    if (r == 0) return a;

    // One valuation per coalition, then the subset-weighted marginal sum
    // w(s) = s!(r-1-s)!/r! -- identical to averaging over all r!
    // permutations.
    const std::uint32_t full = (r >= 32) ? 0 : (1u << r) - 1;
    std::vector<double> val(static_cast<std::size_t>(full) + 1, 0.0);
    std::vector<int> coalition;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        coalition.clear();
        for (int p = 0; p < r; ++p)
            if (mask & (1u << p)) coalition.push_back(game.ground[p]);
        val[mask] = game.evaluate(coalition);
    }

    std::vector<double> fact(r + 1, 1.0);
    for (int i = 1; i <= r; ++i) fact[i] = fact[i - 1] * i;
    std::vector<double> w(r, 0.0);
    for (int s = 0; s < r; ++s) w[s] = fact[s] * fact[r - 1 - s] / fact[r];

    for (int p = 0; p < r; ++p) {
        const std::uint32_t bit = 1u << p;
        double phi = 0.0;
        for (std::uint32_t mask = 0; mask <= full; ++mask) {
            if (mask & bit) continue;
            phi += w[std::popcount(mask)] * (val[mask | bit] - val[mask]);
        }
        a.value[p] = phi;
    }
    return a;
}

namespace {

void finish_mc(Allocation& a, const std::vector<double>& acc, const std::vector<double>& acc2,
               int samples) {
    const int r = static_cast<int>(a.nodes.size());
    for (int p = 0; p < r; ++p) {
        a.value[p] = acc[p] / samples;
        if (samples > 1) {
            double var = (acc2[p] - acc[p] * acc[p] / samples) / (samples - 1);
            a.std_err[p] = std::sqrt(std::max(0.0, var) / samples);
        }
    }
}

}  // namespace

Allocation shapley_mc(const CoalitionGame& game, int num_permutations, std::uint64_t seed) {
    if (num_permutations < 1) throw ConfigError("num_permutations must be >= 1");
    const int r = game.size();
    Allocation a;
    a.nodes = game.ground;
    a.value.assign(r, 0.0);
    a.std_err.assign(r, 0.0);
    a.num_permutations = static_cast<std::uint64_t>(num_permutations);
    if (r == 0) return a;

    if (game.nu.graph() && game.nu.common_random_numbers()) {
        MarginalStats ms = sample_permutation_marginals(game.nu, game.prefix, game.ground,
                                                        num_permutations, seed);
        a.value = std::move(ms.value);
        a.std_err = std::move(ms.std_err);
        return a;
    }

    // Generic path: telescoping evaluation along each sampled permutation,
    // so one permutation costs r coalition evaluations.
    std::vector<int> pos(game.member.size(), -1);
    for (int p = 0; p < r; ++p) pos[game.ground[p]] = p;
    std::vector<double> acc(r, 0.0), acc2(r, 0.0);
    std::vector<int> perm, grown;
    grown.reserve(r);
    for (int t = 0; t < num_permutations; ++t) {
        perm.assign(game.ground.begin(), game.ground.end());
        rng::SplitMix64 gen(rng::stream_seed(seed, rng::kTagPerm, static_cast<std::uint64_t>(t)));
        rng::shuffle(perm, gen);
        grown.clear();
        double prev = 0.0;  // omega(empty) = 0
        for (int x : perm) {
            grown.push_back(x);
            double cur = game.evaluate(grown);
            double m = cur - prev;
            prev = cur;
            acc[pos[x]] += m;
            acc2[pos[x]] += m * m;
        }
    }
    finish_mc(a, acc, acc2, num_permutations);
    return a;
}

Allocation banzhaf_mc(const CoalitionGame& game, int num_samples, std::uint64_t seed) {
    if (num_samples < 1) throw ConfigError("num_samples must be >= 1");
    const int r = game.size();
    Allocation a;
    a.nodes = game.ground;
    a.value.assign(r, 0.0);
    a.std_err.assign(r, 0.0);
    a.num_permutations = static_cast<std::uint64_t>(num_samples);
    if (r == 0) return a;

    std::vector<double> acc(r, 0.0), acc2(r, 0.0);
    std::vector<int> coal;
    coal.reserve(r);
    for (int p = 0; p < r; ++p) {
        for (int s = 0; s < num_samples; ++s) {
            rng::SplitMix64 gen(rng::stream_seed(
                seed, rng::kTagBanzhaf,
                static_cast<std::uint64_t>(p) * num_samples + static_cast<std::uint64_t>(s)));
            coal.clear();
            for (int q = 0; q < r; ++q)
                if (q != p && (gen.next() & 1)) coal.push_back(game.ground[q]);
            double without = game.evaluate(coal);
            coal.push_back(game.ground[p]);
            double with = game.evaluate(coal);
            double m = with - without;
            acc[p] += m;
            acc2[p] += m * m;
        }
    }
    finish_mc(a, acc, acc2, num_samples);
    return a;
}

Ranking rank(const Allocation& alloc, std::uint64_t tie_seed) {
    const int r = static_cast<int>(alloc.nodes.size());
    std::vector<int> idx(r);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return alloc.value[i] > alloc.value[j]; });

    Ranking rk;
    rk.tie_seed = tie_seed;
    rk.order.resize(r);
    for (int i = 0; i < r; ++i) rk.order[i] = alloc.nodes[idx[i]];

    // Shuffle each maximal run of equal values; runs are visited in
    // descending order, so the draw sequence is reproducible.
    rng::SplitMix64 gen(rng::stream_seed(tie_seed, rng::kTagTie, 0));
    int i = 0;
    while (i < r) {
        int j = i + 1;
        while (j < r && alloc.value[idx[j]] == alloc.value[idx[i]]) ++j;
        if (j - i > 1) rng::shuffle(rk.order.data() + i, static_cast<std::size_t>(j - i), gen);
        i = j;
    }
    return rk;
}

}  // namespace critk
