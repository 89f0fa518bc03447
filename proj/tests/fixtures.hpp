#pragma once
// Shared fixtures and independent test oracles. Everything here is computed
// by deliberately naive means (edge scans, BFS over explicit adjacency,
// permutation enumeration) so library results are checked against code that
// shares none of its machinery.
#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

#include "critk/diffusion.hpp"
#include "critk/graph.hpp"
#include "critk/rng.hpp"

namespace fx {

// a -> b -> c
inline critk::Graph path3(double beta = 1.0) {
    return critk::Graph({"a", "b", "c"}, {{0, 1, beta}, {1, 2, beta}});
}

// hub h -> l1, l2, l3
inline critk::Graph star4(double b1 = 1.0, double b2 = 1.0, double b3 = 1.0) {
    return critk::Graph({"h", "l1", "l2", "l3"}, {{0, 1, b1}, {0, 2, b2}, {0, 3, b3}});
}

inline critk::Graph edgeless(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    return critk::Graph(std::move(names), {});
}

// Reachable set from seeds ignoring weights; naive repeated edge scan.
inline std::vector<int> reach(const critk::Graph& g, std::span<const int> seeds) {
    std::vector<std::uint8_t> in(static_cast<std::size_t>(g.num_nodes()), 0);
    for (int s : seeds) in[s] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const critk::Graph::Edge& e : g.edges())
            if (in[e.src] && !in[e.dst]) {
                in[e.dst] = 1;
                changed = true;
            }
    }
    std::vector<int> out;
    for (int x = 0; x < g.num_nodes(); ++x)
        if (in[x]) out.push_back(x);
    return out;
}

// Function-backed oracle nu(S) = |reach(S)| over a snapshot of g's edges.
inline critk::ValuationOracle reach_oracle(const critk::Graph& g) {
    std::vector<std::pair<int, int>> edges;
    for (const critk::Graph::Edge& e : g.edges()) edges.emplace_back(e.src, e.dst);
    const int n = g.num_nodes();
    auto fn = [edges, n](std::span<const int> coalition) -> double {
        std::vector<std::uint8_t> in(static_cast<std::size_t>(n), 0);
        for (int s : coalition) in[s] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto [src, dst] : edges)
                if (in[src] && !in[dst]) {
                    in[dst] = 1;
                    changed = true;
                }
        }
        return static_cast<double>(std::count(in.begin(), in.end(), 1));
    };
    return critk::ValuationOracle(n, fn, false);
}

// Random characteristic function as a lookup table over coalitions encoded as
// bitmasks; table[0] = 0.
inline std::vector<double> random_game_table(int n, std::uint64_t seed, double lo = 0.0,
                                             double hi = 10.0) {
    critk::rng::SplitMix64 gen(seed);
    std::vector<double> table(std::size_t{1} << n, 0.0);
    for (std::size_t mask = 1; mask < table.size(); ++mask)
        table[mask] = lo + (hi - lo) * gen.next_unit();
    return table;
}

inline critk::ValuationOracle table_oracle(int n, std::vector<double> table) {
    auto fn = [table = std::move(table)](std::span<const int> coalition) -> double {
        std::size_t mask = 0;
        for (int x : coalition) mask |= std::size_t{1} << x;
        return table[mask];
    };
    return critk::ValuationOracle(n, fn, false);
}

// Exact Shapley by brute-force enumeration of all n! permutations —
// independent of the library's subset-weighted formula.
inline std::vector<double> shapley_by_permutations(
    int n, const std::function<double(std::span<const int>)>& nu) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
    std::size_t count = 0;
    do {
        std::vector<int> prefix;
        double prev = 0.0;
        for (int x : perm) {
            prefix.push_back(x);
            const double cur = nu(prefix);
            sum[x] += cur - prev;
            prev = cur;
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& v : sum) v /= static_cast<double>(count);
    return sum;
}

}  // namespace fx
