#pragma once
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "critk/game.hpp"
#include "critk/graph.hpp"
#include "critk/select.hpp"

namespace critk {

// Per-step sample budgets m_1..m_k (permutations for Shapley, coalition
// draws for Banzhaf). Later steps may use smaller budgets.
struct PermutationSchedule {
    std::vector<int> budgets;

    static PermutationSchedule constant(int m, int k);
    void validate(int k) const;  // ConfigError if shorter than k or any m_t < 1
};

enum class AllocMethod { shapley, banzhaf };
std::string_view alloc_method_name(AllocMethod method);
AllocMethod parse_alloc_method(std::string_view text);  // ConfigError on unknown

// hybrid_select switch point: the first k_tilde picks are game-theoretic,
// the remaining k - k_tilde run select_discount under tail_method.
struct HybridConfig {
    int k_tilde = 0;
    DiscountMethod tail_method = DiscountMethod::d1();
    bool clamp = false;  // forwarded to select_discount_from
};

// Greedy hill-climbing from the empty set: k rounds of argmax over the
// unchosen x of nu(chosen + x) - nu(chosen), ties broken by a tie_seed
// shuffle of the scan order. Audit value = the step's marginal gain.
Selection greedy_hill_climb(const ValuationOracle& nu, std::vector<int> ground, int k,
                            std::uint64_t tie_seed);
Selection greedy_hill_climb(const ValuationOracle& nu, int k, std::uint64_t tie_seed);

// The reduced game (ground \ chosen, omega) with omega(S) = nu(chosen + S) -
// nu(chosen). The two-argument form takes all players as the ground set.
CoalitionGame marginal_game(ValuationOracle nu, std::span<const int> chosen);
CoalitionGame marginal_game(ValuationOracle nu, std::vector<int> ground,
                            std::span<const int> chosen);

// Combined allocation-greedy: for t = 1..k, allocate the reduced game on the
// unchosen nodes with budget m_t and pick the argmax value. Steps whose
// reduced game fits the exact-Shapley guard with m_t >= (size)! permutations
// are computed exactly instead of sampled. Audit value = the pick's
// allocation value.
Selection shapley_greedy(const ValuationOracle& nu, std::vector<int> ground, int k,
                         const PermutationSchedule& schedule, std::uint64_t perm_seed,
                         std::uint64_t tie_seed);

// First cfg.k_tilde picks via the combined algorithm (allocation engine
// selected by `method`); the step-k_tilde reduced-game allocation, minus the
// node it picked, is then reused as-is (no further simulation) to drive
// select_discount_from for the remaining picks, with the k_tilde chosen
// nodes frozen. k_tilde = 0 computes one full-game allocation with
// budgets[0] and reduces to pure discounting; k_tilde = k is exactly
// shapley_greedy.
Selection hybrid_select(const ValuationOracle& nu, const Graph& g, AllocMethod method,
                        int k, const HybridConfig& cfg,
                        const PermutationSchedule& schedule, std::uint64_t perm_seed,
                        std::uint64_t tie_seed);

}  // namespace critk
