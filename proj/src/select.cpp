#include "critk/select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "critk/errors.hpp"

namespace critk {

std::string_view phase_name(Phase phase) {
    return phase == Phase::primary ? "primary" : "fallback";
}

ThresholdSpec ThresholdSpec::fixed(double tau) {
    ThresholdSpec s;
    s.kind = Kind::fixed;
    s.tau = tau;
    s.validate();
    return s;
}

ThresholdSpec ThresholdSpec::value_scaled(double lambda) {
    ThresholdSpec s;
    s.kind = Kind::value_scaled;
    s.lambda = lambda;
    s.validate();
    return s;
}

void ThresholdSpec::validate() const {
    if (kind == Kind::fixed) {
        if (!(tau >= 0.0 && tau <= 1.0))
            throw ConfigError("threshold tau must lie in [0,1]");
    } else {
        if (!(lambda >= 0.0)) throw ConfigError("threshold lambda must be >= 0");
    }
}

DiscountMethod DiscountMethod::d1() { return DiscountMethod{Kind::d1, 0, 0, 0}; }
DiscountMethod DiscountMethod::d2() { return DiscountMethod{Kind::d2, 0, 0, 0}; }
DiscountMethod DiscountMethod::d3() { return DiscountMethod{Kind::d3, 0, 0, 0}; }

DiscountMethod DiscountMethod::combo(double l1, double l2, double l3) {
    DiscountMethod m{Kind::combo, l1, l2, l3};
    m.validate();
    return m;
}

void DiscountMethod::validate() const {
    if (kind != Kind::combo) return;
    if (!(l1 >= 0.0 && l2 >= 0.0 && l3 >= 0.0))
        throw ConfigError("combo weights must be >= 0");
    if (std::abs(l1 + l2 + l3 - 1.0) > 1e-12)
        throw ConfigError("combo weights must sum to 1");
}

bool DiscountMethod::uses_d2() const {
    return kind == Kind::d2 || (kind == Kind::combo && l2 > 0.0);
}

std::string DiscountMethod::name() const {
    switch (kind) {
        case Kind::d1: return "d1";
        case Kind::d2: return "d2";
        case Kind::d3: return "d3";
        case Kind::combo: return "combo";
    }
    return "?";
}

namespace {

void check_in_graph(const Graph& g, int node) {
    if (node < 0 || node >= g.num_nodes())
        throw LookupError("node index " + std::to_string(node) + " not in graph");
}

struct Block {
    int blocker;
    const char* reason;
};

// Shared two-pass scaffold of the elimination methods: pass one walks the
// ranking applying `blocked`, pass two fills remaining slots naively with
// fallback-flagged picks. Skips are attached to the step that finally
// advances past them.
Selection two_pass_select(const Graph& g, const Ranking& ranking, int k,
                          const std::function<std::optional<Block>(
                              int candidate, const std::vector<int>& chosen,
                              const std::vector<std::uint8_t>& chosen_mask)>& blocked,
                          const std::function<void(int picked)>& on_choose) {
    if (k < 1) throw ConfigError("k must be >= 1");
    for (int x : ranking.order) check_in_graph(g, x);

    Selection sel;
    std::vector<std::uint8_t> chosen_mask(g.num_nodes(), 0);
    std::vector<SkipRecord> pending;

    for (int x : ranking.order) {
        if (static_cast<int>(sel.chosen.size()) >= k) break;
        if (auto b = blocked(x, sel.chosen, chosen_mask)) {
            pending.push_back({x, b->blocker, b->reason});
            continue;
        }
        AuditStep st;
        st.step = static_cast<int>(sel.chosen.size()) + 1;
        st.node = x;
        st.phase = Phase::primary;
        st.skipped = std::move(pending);
        pending.clear();
        sel.chosen.push_back(x);
        chosen_mask[x] = 1;
        sel.audit.push_back(std::move(st));
        if (on_choose) on_choose(x);
    }

    for (int x : ranking.order) {
        if (static_cast<int>(sel.chosen.size()) >= k) break;
        if (chosen_mask[x]) continue;
        AuditStep st;
        st.step = static_cast<int>(sel.chosen.size()) + 1;
        st.node = x;
        st.phase = Phase::fallback;
        st.skipped = std::move(pending);
        pending.clear();
        sel.chosen.push_back(x);
        chosen_mask[x] = 1;
        sel.audit.push_back(std::move(st));
    }
    return sel;
}

}  // namespace

Selection select_naive(const Ranking& ranking, int k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    Selection sel;
    for (int x : ranking.order) {
        if (static_cast<int>(sel.chosen.size()) >= k) break;
        AuditStep st;
        st.step = static_cast<int>(sel.chosen.size()) + 1;
        st.node = x;
        st.phase = Phase::primary;
        sel.chosen.push_back(x);
        sel.audit.push_back(std::move(st));
    }
    return sel;
}

Selection select_eliminate_always(const Graph& g, const Ranking& ranking, int k) {
    auto blocked = [&](int x, const std::vector<int>&,
                       const std::vector<std::uint8_t>& mask) -> std::optional<Block> {
        for (int y : g.neighbors(x, Graph::NeighborMode::all))
            if (mask[y]) return Block{y, "neighbor-chosen"};
        return std::nullopt;
    };
    return two_pass_select(g, ranking, k, blocked, nullptr);
}

Selection select_eliminate_threshold(const Graph& g, const Ranking& ranking, int k,
                                     const ThresholdSpec& spec, const Allocation& alloc) {
    spec.validate();
    double phi_max = 0.0;
    if (spec.kind == ThresholdSpec::Kind::value_scaled) {
        phi_max = -std::numeric_limits<double>::infinity();
        for (double v : alloc.value) phi_max = std::max(phi_max, v);
    }
    auto threshold_of = [&](int y) -> double {
        if (spec.kind == ThresholdSpec::Kind::fixed) return spec.tau;
        // Degenerate allocations (no positive value) get the most
        // conservative threshold; otherwise clamp into [0,1].
        if (!(phi_max > 0.0)) return 0.0;
        double t = spec.lambda * alloc.value_of(y) / phi_max;
        return std::clamp(t, 0.0, 1.0);
    };
    auto blocked = [&](int x, const std::vector<int>& chosen,
                       const std::vector<std::uint8_t>&) -> std::optional<Block> {
        for (int y : chosen)
            if (g.mutual_weight(x, y) > threshold_of(y)) return Block{y, "weight-above-threshold"};
        return std::nullopt;
    };
    return two_pass_select(g, ranking, k, blocked, nullptr);
}

Selection select_eliminate_local(const Graph& g, const Ranking& ranking, int k,
                                 double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("neighborhood fraction must lie in (0,1]");

    // blocked_by[x] = the first chosen node whose strongest-neighbor slice
    // contains x, or -1.
    std::vector<int> blocked_by(g.num_nodes(), -1);
    auto on_choose = [&](int y) {
        std::vector<int> nbrs = g.neighbors(y, Graph::NeighborMode::all);
        const int d = static_cast<int>(nbrs.size());
        if (d == 0) return;
        std::vector<std::pair<double, int>> order;
        order.reserve(nbrs.size());
        for (int x : nbrs) order.emplace_back(g.mutual_weight(x, y), x);
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        // Small slack so binary fractions of integer d don't round up from
        // representation error (0.3 * 10 -> 3.0000000000000004).
        int cutoff = static_cast<int>(std::ceil(fraction * d - 1e-9));
        cutoff = std::clamp(cutoff, 0, d);
        for (int i = 0; i < cutoff; ++i)
            if (blocked_by[order[i].second] < 0) blocked_by[order[i].second] = y;
    };
    auto blocked = [&](int x, const std::vector<int>&,
                       const std::vector<std::uint8_t>&) -> std::optional<Block> {
        if (blocked_by[x] >= 0) return Block{blocked_by[x], "local-first-fraction"};
        return std::nullopt;
    };
    return two_pass_select(g, ranking, k, blocked, on_choose);
}

Selection select_discount(const Graph& g, const Allocation& alloc, int k,
                          const DiscountMethod& method, std::uint64_t tie_seed,
                          bool clamp) {
    if (k < 1) throw ConfigError("k must be >= 1");
    return select_discount_from(g, alloc, {}, k, method, tie_seed, clamp);
}

Selection select_discount_from(const Graph& g, const Allocation& alloc,
                               std::span<const int> pre_chosen, int k_more,
                               const DiscountMethod& method, std::uint64_t tie_seed,
                               bool clamp) {
    method.validate();
    if (method.uses_d2() && !clamp) g.require_lt_valid();
    for (int x : alloc.nodes) check_in_graph(g, x);
    for (int y : pre_chosen) check_in_graph(g, y);

    const int n = g.num_nodes();
    const Ranking base = rank(alloc, tie_seed);
    const int kNoRank = std::numeric_limits<int>::max();
    std::vector<int> rank_pos(n, kNoRank);
    for (std::size_t i = 0; i < base.order.size(); ++i)
        rank_pos[base.order[i]] = static_cast<int>(i);

    std::vector<double> phi(n, 0.0), phi0(n, 0.0);
    std::vector<std::uint8_t> is_candidate(n, 0);
    for (std::size_t i = 0; i < alloc.nodes.size(); ++i) {
        phi[alloc.nodes[i]] = phi0[alloc.nodes[i]] = alloc.value[i];
        is_candidate[alloc.nodes[i]] = 1;
    }

    std::vector<std::uint8_t> chosen_mask(n, 0);
    // Accumulated sum over chosen in-neighbors, beta_wx per Eq-(5)-style
    // discounting; earlier picks handed in by the caller count toward it.
    std::vector<double> dsum(n, 0.0);
    for (int y : pre_chosen) {
        chosen_mask[y] = 1;
        is_candidate[y] = 0;
    }
    for (int y : pre_chosen)
        for (const Graph::Arc& a : g.out(y)) dsum[a.node] += a.weight;

    Selection sel;
    while (static_cast<int>(sel.chosen.size()) < k_more) {
        int best = -1;
        for (int x : alloc.nodes) {
            if (chosen_mask[x] || !is_candidate[x]) continue;
            if (best < 0 || phi[x] > phi[best] ||
                (phi[x] == phi[best] && rank_pos[x] < rank_pos[best]))
                best = x;
        }
        if (best < 0) break;

        AuditStep st;
        st.step = static_cast<int>(sel.chosen.size()) + 1;
        st.node = best;
        st.phase = Phase::primary;
        st.has_value = true;
        st.value = phi[best];
        chosen_mask[best] = 1;
        sel.chosen.push_back(best);

        const double value_of_pick = phi[best];
        for (int x : g.neighbors(best, Graph::NeighborMode::all)) {
            if (chosen_mask[x] || !is_candidate[x]) continue;  // chosen stay frozen
            const double byx = g.weight(best, x);
            dsum[x] += byx;
            double d2_factor = 1.0 - dsum[x];
            if (clamp && d2_factor < 0.0) d2_factor = 0.0;
            const double old = phi[x];
            double next = old;
            switch (method.kind) {
                case DiscountMethod::Kind::d1:
                    next = (1.0 - byx) * old;
                    break;
                case DiscountMethod::Kind::d2:
                    next = d2_factor * phi0[x];
                    break;
                case DiscountMethod::Kind::d3:
                    next = old - g.weight(x, best) * value_of_pick;
                    break;
                case DiscountMethod::Kind::combo:
                    next = method.l1 * (1.0 - byx) * old + method.l2 * d2_factor * phi0[x] +
                           method.l3 * (old - g.weight(x, best) * value_of_pick);
                    break;
            }
            phi[x] = next;
            st.discounts.push_back({x, old, next});
        }
        sel.audit.push_back(std::move(st));
    }
    return sel;
}

}  // namespace critk
