#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "critk/diffusion.hpp"

namespace critk {

// Value vector of a solution concept over some ground set. nodes/value (and
// std_err when Monte-Carlo) are parallel; num_permutations is the sample
// count, 0 for exact computations.
struct Allocation {
    std::vector<int> nodes;
    std::vector<double> value;
    std::vector<double> std_err;
    std::uint64_t num_permutations = 0;

    int find(int node) const;        // position in nodes, -1 if absent
    double value_of(int node) const;  // throws LookupError if absent
};

// Nodes in descending value order; runs of equal values are shuffled by
// tie_seed.
struct Ranking {
    std::vector<int> order;
    std::uint64_t tie_seed = 0;
};

// A cooperative game (ground, omega) where omega(S) = nu(prefix + S) -
// nu(prefix). The base game has an empty prefix (omega = nu restricted to
// ground); reduced games from marginal_game() carry the frozen chosen set.
struct CoalitionGame {
    std::vector<int> ground;
    ValuationOracle nu;
    std::vector<int> prefix;
    double base = 0.0;             // nu(prefix), evaluated once
    std::vector<std::uint8_t> member;  // per player: is in ground

    int size() const { return static_cast<int>(ground.size()); }
    // omega(S); every member of S must lie in ground (DomainError otherwise).
    double evaluate(std::span<const int> coalition) const;
    double evaluate(std::initializer_list<int> coalition) const;
};

// Base game over all players of the oracle, or over an explicit ground set.
CoalitionGame make_game(ValuationOracle nu);
CoalitionGame make_game(ValuationOracle nu, std::vector<int> ground);
// Reduced game with a frozen prefix: omega(S) = nu(prefix + S) - nu(prefix),
// with nu(prefix) evaluated here, once.
CoalitionGame make_reduced_game(ValuationOracle nu, std::vector<int> ground,
                                std::vector<int> prefix);

// Exact Shapley enumerates 2^n coalitions; refuse beyond this size.
inline constexpr int kExactShapleyMaxPlayers = 12;

// Exact Shapley values via the subset-weighted sum (each coalition evaluated
// once). Requires size() <= kExactShapleyMaxPlayers (SizeError otherwise).
Allocation shapley_exact(const CoalitionGame& game);

// Monte-Carlo Shapley over num_permutations seeded uniform shuffles of the
// ground set, with per-node standard errors. Diffusion-backed games under
// common random numbers are served by the incremental permutation sampler;
// anything else falls back to generic telescoping evaluation. Deterministic
// for a fixed seed.
Allocation shapley_mc(const CoalitionGame& game, int num_permutations, std::uint64_t seed);

// Monte-Carlo Banzhaf index: for each player, averages its marginal
// contribution to num_samples coalitions of the others drawn uniformly
// (each other member included with probability 1/2).
Allocation banzhaf_mc(const CoalitionGame& game, int num_samples, std::uint64_t seed);

// Descending stable sort; maximal runs of equal values are shuffled with
// tie_seed.
Ranking rank(const Allocation& alloc, std::uint64_t tie_seed);

}  // namespace critk
