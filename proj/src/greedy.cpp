#include "critk/greedy.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "critk/errors.hpp"
#include "critk/rng.hpp"

namespace critk {

PermutationSchedule PermutationSchedule::constant(int m, int k) {
    if (k < 1) throw ConfigError("schedule length must be >= 1");
    if (m < 1) throw ConfigError("permutation budget must be >= 1");
    return PermutationSchedule{std::vector<int>(static_cast<std::size_t>(k), m)};
}

void PermutationSchedule::validate(int k) const {
    if (static_cast<int>(budgets.size()) < k)
        throw ConfigError("schedule has " + std::to_string(budgets.size()) +
                          " budgets but k = " + std::to_string(k));
    for (int m : budgets)
        if (m < 1) throw ConfigError("permutation budgets must be >= 1");
}

std::string_view alloc_method_name(AllocMethod method) {
    return method == AllocMethod::shapley ? "shapley" : "banzhaf";
}

AllocMethod parse_alloc_method(std::string_view text) {
    if (text == "shapley") return AllocMethod::shapley;
    if (text == "banzhaf") return AllocMethod::banzhaf;
    throw ConfigError("unknown allocation method '" + std::string(text) +
                      "' (expected shapley|banzhaf)");
}

namespace {

std::vector<std::uint8_t> member_mask(const ValuationOracle& nu, std::span<const int> nodes) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nu.num_players()), 0);
    for (int x : nodes) {
        if (x < 0 || x >= nu.num_players())
            throw LookupError("player index " + std::to_string(x) + " out of range");
        if (mask[x]) throw StructureError("duplicate player " + std::to_string(x));
        mask[x] = 1;
    }
    return mask;
}

std::vector<int> all_players(const ValuationOracle& nu) {
    std::vector<int> ground(static_cast<std::size_t>(nu.num_players()));
    std::iota(ground.begin(), ground.end(), 0);
    return ground;
}

// ground minus chosen, in ground order; every chosen node must be in ground.
std::vector<int> without(std::span<const int> ground, std::span<const int> chosen,
                         const ValuationOracle& nu) {
    std::vector<std::uint8_t> cmask = member_mask(nu, chosen);
    std::vector<std::uint8_t> gmask = member_mask(nu, ground);
    for (int y : chosen)
        if (!gmask[y]) throw StructureError("chosen node " + std::to_string(y) + " not in ground");
    std::vector<int> rest;
    rest.reserve(ground.size() - chosen.size());
    for (int x : ground)
        if (!cmask[x]) rest.push_back(x);
    return rest;
}

Allocation step_allocation(const CoalitionGame& game, AllocMethod method, int budget,
                           std::uint64_t seed) {
    if (method == AllocMethod::banzhaf) return banzhaf_mc(game, budget, seed);
    const int r = game.size();
    if (r <= kExactShapleyMaxPlayers) {
        std::uint64_t fact = 1;
        for (int i = 2; i <= r; ++i) fact *= static_cast<std::uint64_t>(i);
        if (static_cast<std::uint64_t>(budget) >= fact) return shapley_exact(game);
    }
    return shapley_mc(game, budget, seed);
}

// The shared head of shapley_greedy and hybrid_select. When last_alloc is
// non-null it receives the final step's reduced-game allocation (including
// the row of the node that step picked).
Selection allocation_greedy(const ValuationOracle& nu, const std::vector<int>& ground,
                            int k, const PermutationSchedule& schedule,
                            std::uint64_t perm_seed, std::uint64_t tie_seed,
                            AllocMethod method, Allocation* last_alloc) {
    if (k < 1) throw ConfigError("k must be >= 1");
    schedule.validate(k);
    member_mask(nu, ground);

    Selection sel;
    std::vector<int> chosen;
    for (int t = 0; t < k; ++t) {
        std::vector<int> rest = without(ground, chosen, nu);
        if (rest.empty()) break;
        CoalitionGame game = make_reduced_game(nu, std::move(rest), chosen);
        Allocation alloc =
            step_allocation(game, method, schedule.budgets[t],
                            rng::stream_seed(perm_seed, rng::kTagStep, static_cast<std::uint64_t>(t)));
        Ranking order = rank(alloc, rng::stream_seed(tie_seed, rng::kTagStep, static_cast<std::uint64_t>(t)));
        const int pick = order.order.front();

        AuditStep st;
        st.step = t + 1;
        st.node = pick;
        st.phase = Phase::primary;
        st.has_value = true;
        st.value = alloc.value_of(pick);
        chosen.push_back(pick);
        sel.chosen.push_back(pick);
        sel.audit.push_back(std::move(st));
        if (last_alloc && t == k - 1) *last_alloc = std::move(alloc);
    }
    return sel;
}

void drop_row(Allocation& alloc, int node) {
    const int pos = alloc.find(node);
    if (pos < 0) return;
    alloc.nodes.erase(alloc.nodes.begin() + pos);
    alloc.value.erase(alloc.value.begin() + pos);
    if (static_cast<std::size_t>(pos) < alloc.std_err.size())
        alloc.std_err.erase(alloc.std_err.begin() + pos);
}

}  // namespace

Selection greedy_hill_climb(const ValuationOracle& nu, std::vector<int> ground, int k,
                            std::uint64_t tie_seed) {
    if (k < 1) throw ConfigError("k must be >= 1");
    member_mask(nu, ground);

    // One shuffled scan order; strict argmax then resolves ties uniformly.
    std::vector<int> order = std::move(ground);
    rng::SplitMix64 gen(rng::stream_seed(tie_seed, rng::kTagTie, 0));
    rng::shuffle(order, gen);

    Selection sel;
    std::vector<int> chosen;
    std::vector<std::uint8_t> chosen_mask(static_cast<std::size_t>(nu.num_players()), 0);
    std::vector<int> coalition;
    double current = 0.0;  // nu(empty) = 0
    for (int t = 0; t < k; ++t) {
        int best = -1;
        double best_val = 0.0;
        for (int x : order) {
            if (chosen_mask[x]) continue;
            coalition = chosen;
            coalition.push_back(x);
            const double val = nu.evaluate(coalition);
            if (best < 0 || val > best_val) {
                best = x;
                best_val = val;
            }
        }
        if (best < 0) break;
        AuditStep st;
        st.step = t + 1;
        st.node = best;
        st.phase = Phase::primary;
        st.has_value = true;
        st.value = best_val - current;
        chosen.push_back(best);
        chosen_mask[best] = 1;
        current = best_val;
        sel.chosen.push_back(best);
        sel.audit.push_back(std::move(st));
    }
    return sel;
}

Selection greedy_hill_climb(const ValuationOracle& nu, int k, std::uint64_t tie_seed) {
    return greedy_hill_climb(nu, all_players(nu), k, tie_seed);
}

CoalitionGame marginal_game(ValuationOracle nu, std::span<const int> chosen) {
    std::vector<int> ground = without(all_players(nu), chosen, nu);
    return make_reduced_game(std::move(nu), std::move(ground),
                             std::vector<int>(chosen.begin(), chosen.end()));
}

CoalitionGame marginal_game(ValuationOracle nu, std::vector<int> ground,
                            std::span<const int> chosen) {
    std::vector<int> rest = without(ground, chosen, nu);
    return make_reduced_game(std::move(nu), std::move(rest),
                             std::vector<int>(chosen.begin(), chosen.end()));
}

Selection shapley_greedy(const ValuationOracle& nu, std::vector<int> ground, int k,
                         const PermutationSchedule& schedule, std::uint64_t perm_seed,
                         std::uint64_t tie_seed) {
    return allocation_greedy(nu, ground, k, schedule, perm_seed, tie_seed,
                             AllocMethod::shapley, nullptr);
}

Selection hybrid_select(const ValuationOracle& nu, const Graph& g, AllocMethod method,
                        int k, const HybridConfig& cfg,
                        const PermutationSchedule& schedule, std::uint64_t perm_seed,
                        std::uint64_t tie_seed) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (cfg.k_tilde < 0 || cfg.k_tilde > k)
        throw ConfigError("k_tilde must lie in [0, k]");
    cfg.tail_method.validate();
    if (nu.num_players() != g.num_nodes())
        throw ConfigError("oracle has " + std::to_string(nu.num_players()) +
                          " players but graph has " + std::to_string(g.num_nodes()) + " nodes");

    const std::vector<int> ground = all_players(nu);
    if (cfg.k_tilde == k)
        return allocation_greedy(nu, ground, k, schedule, perm_seed, tie_seed, method, nullptr);

    Selection out;
    Allocation tail_alloc;
    if (cfg.k_tilde == 0) {
        schedule.validate(1);
        CoalitionGame game = make_game(nu, ground);
        tail_alloc = step_allocation(game, method, schedule.budgets[0],
                                     rng::stream_seed(perm_seed, rng::kTagStep, 0));
    } else {
        out = allocation_greedy(nu, ground, cfg.k_tilde, schedule, perm_seed, tie_seed,
                                method, &tail_alloc);
        if (!out.chosen.empty()) drop_row(tail_alloc, out.chosen.back());
    }

    Selection tail = select_discount_from(g, tail_alloc, out.chosen, k - cfg.k_tilde,
                                          cfg.tail_method, tie_seed, cfg.clamp);
    for (AuditStep& st : tail.audit) {
        st.step = static_cast<int>(out.chosen.size()) + 1;
        out.chosen.push_back(st.node);
        out.audit.push_back(std::move(st));
    }
    return out;
}

}  // namespace critk
