#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critk/game.hpp"
#include "critk/graph.hpp"

namespace critk {

enum class Phase { primary, fallback };
std::string_view phase_name(Phase phase);

struct SkipRecord {
    int node;            // candidate passed over
    int blocker;         // already-chosen node that caused the skip
    std::string reason;  // "neighbor-chosen" | "weight-above-threshold" | "local-first-fraction"
};

struct DiscountRecord {
    int node;
    double old_value;
    double new_value;
};

// One selection step: the node picked, the candidates skipped while reaching
// it, and the discount events it triggered. `value` is the pick's allocation
// value / marginal gain when the method has one.
struct AuditStep {
    int step = 0;  // 1-based
    int node = -1;
    Phase phase = Phase::primary;
    bool has_value = false;
    double value = 0.0;
    std::vector<SkipRecord> skipped;
    std::vector<DiscountRecord> discounts;
};

// Ordered top-k pick plus the audit trail that reproduces it. audit[i]
// always describes chosen[i].
struct Selection {
    std::vector<int> chosen;
    std::vector<AuditStep> audit;
};

// Elimination threshold: a fixed tau, or a threshold scaled by the chosen
// node's share of the maximum allocation value, min(1, lambda*phi_y/phi_max)
// clamped into [0,1].
struct ThresholdSpec {
    enum class Kind { fixed, value_scaled };
    Kind kind = Kind::fixed;
    double tau = 1.0;
    double lambda = 1.0;

    static ThresholdSpec fixed(double tau);
    static ThresholdSpec value_scaled(double lambda);
    void validate() const;  // ConfigError on out-of-domain parameters
};

// Discounting rule applied to the unchosen neighbors of each pick. combo is
// the convex combination lambda1*D1 + lambda2*D2 + lambda3*D3.
struct DiscountMethod {
    enum class Kind { d1, d2, d3, combo };
    Kind kind = Kind::d1;
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;

    static DiscountMethod d1();
    static DiscountMethod d2();
    static DiscountMethod d3();
    static DiscountMethod combo(double l1, double l2, double l3);
    void validate() const;
    bool uses_d2() const;
    std::string name() const;  // "d1" ... "combo"
};

// First min(k, n) entries of the ranking, as-is.
Selection select_naive(const Ranking& ranking, int k);

// Scan the ranking, skipping any candidate with an already-chosen neighbor
// (in or out). If the pass ends short of k, remaining slots are filled with
// the highest-ranked unchosen nodes, flagged as fallback.
Selection select_eliminate_always(const Graph& g, const Ranking& ranking, int k);

// Skip a candidate only when some chosen neighbor y is connected to it with
// mutual weight above threshold(y). Same fallback fill.
Selection select_eliminate_threshold(const Graph& g, const Ranking& ranking, int k,
                                     const ThresholdSpec& spec, const Allocation& alloc);

// Skip a candidate that ranks within the first ceil(fraction * d) of some
// chosen neighbor's d neighbors, ordered by descending mutual weight (ties
// by ascending node index). Same fallback fill.
Selection select_eliminate_local(const Graph& g, const Ranking& ranking, int k,
                                 double fraction = 0.5);

// k rounds of: pick the unchosen argmax of the current values (ties broken
// by the tie_seed ranking), then discount the pick's unchosen neighbors by
// `method`. Chosen nodes are never updated. D2 requires an LT-valid graph
// unless clamp is set, which floors the Eq-(5)-style factor at 0.
Selection select_discount(const Graph& g, const Allocation& alloc, int k,
                          const DiscountMethod& method, std::uint64_t tie_seed,
                          bool clamp = false);

// select_discount continuing after `pre_chosen` picks made elsewhere: they
// are frozen, count as chosen for the D2 neighbor sums, and are excluded
// from the candidate pool; k_more further nodes are selected from alloc.
Selection select_discount_from(const Graph& g, const Allocation& alloc,
                               std::span<const int> pre_chosen, int k_more,
                               const DiscountMethod& method, std::uint64_t tie_seed,
                               bool clamp = false);

}  // namespace critk
