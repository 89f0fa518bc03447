#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "critk/graph.hpp"

namespace critk {

// Which diffusion process gives edge weights their meaning: under IC the
// weight beta_yx is the activation probability p_yx, under LT it is the
// influence weight b_yx (and the graph must be LT-valid).
enum class DiffusionModel { ic, lt };

DiffusionModel parse_model(std::string_view token);  // "ic" | "lt"
std::string_view model_name(DiffusionModel model);

struct SpreadEstimate {
    double mean = 0.0;     // expected number of activated nodes
    double std_err = 0.0;  // standard error of the mean; exactly 0 when all outcomes agree
    int num_sims = 0;
};

// One independent-cascade realization under the live-edge view: edge e is
// live iff edge_coins[e] < weight(e); the activated set is everything
// reachable from the seeds over live edges. edge_coins has one entry per
// directed edge, indexed by edge id. Returns the activated set, sorted.
std::vector<int> simulate_ic(const Graph& g, std::span<const int> seeds,
                             std::span<const double> edge_coins);

// One linear-threshold realization: inactive x activates once the summed
// weights of its active in-neighbors reach thresholds[x]; iterated to the
// fixpoint. Requires an LT-valid graph. Returns the activated set, sorted.
std::vector<int> simulate_lt(const Graph& g, std::span<const int> seeds,
                             std::span<const double> thresholds);

// Monte-Carlo spread: simulation i draws its randomness purely from
// (base_seed, i) -- IC edge coins are unit_at(stream_i, edge_id), LT
// thresholds are unit_open_at-style draws per node -- so results are
// independent of evaluation order and of how sims are split across threads.
SpreadEstimate estimate_spread(const Graph& g, DiffusionModel model,
                               std::span<const int> seeds, int num_sims,
                               std::uint64_t base_seed, int threads = 1);

struct OracleOptions {
    int num_sims = 1000;
    std::uint64_t base_seed = 1;
    bool memoize = false;
    // Default is common random numbers: every coalition is evaluated against
    // the same (base_seed, i) streams. Setting this derives fresh streams
    // from a canonical hash of the coalition instead (variance studies).
    bool independent_streams = false;
    int threads = 1;
};

struct OracleStats {
    std::uint64_t calls = 0;       // nu evaluations requested (cache hits included)
    std::uint64_t sims = 0;        // simulations actually executed
    std::uint64_t cache_hits = 0;
};

// The game's valuation function nu: set of nodes -> expected spread. Pure:
// the same coalition with the same seed always returns the bit-identical
// value; nu(empty) = 0 without running simulations. Copies share state, so
// counters and the memo cache survive being passed around by value.
class ValuationOracle {
  public:
    // Diffusion-backed oracle. Keeps a pointer to g; the graph must outlive
    // the oracle. LT model requires an LT-valid graph (ModelError).
    ValuationOracle(const Graph& g, DiffusionModel model, const OracleOptions& opts = {});

    // Function-backed oracle for synthetic games; fn receives the coalition
    // sorted and duplicate-free. fn(empty) is never called.
    ValuationOracle(int num_players, std::function<double(std::span<const int>)> fn,
                    bool memoize = false);

    double evaluate(std::span<const int> coalition) const;
    double evaluate(std::initializer_list<int> coalition) const;
    double operator()(std::span<const int> coalition) const { return evaluate(coalition); }

    int num_players() const;

    // Diffusion backing, used by the incremental permutation sampler.
    // graph() is null for function-backed oracles.
    const Graph* graph() const;
    DiffusionModel model() const;
    int num_sims() const;
    std::uint64_t base_seed() const;
    bool common_random_numbers() const;
    int threads() const;

    OracleStats stats() const;
    void reset_stats() const;
    // Accounting hook for samplers that bypass evaluate() (the incremental
    // permutation engine charges the coalition evaluations it replaces).
    void charge(std::uint64_t calls, std::uint64_t sims) const;

  private:
    struct State;
    std::shared_ptr<State> state_;
};

// Convenience factory for the common options.
ValuationOracle make_valuation(const Graph& g, DiffusionModel model, int num_sims,
                               std::uint64_t base_seed, bool memoize = false);

// Mean/stderr of per-node marginal contributions over sampled permutations
// of `ground`, with `prefix` activated first. Entries are indexed like
// `ground`.
struct MarginalStats {
    std::vector<double> value;
    std::vector<double> std_err;
};

// Incremental permutation-marginal sampler for diffusion-backed oracles
// under common random numbers. Permutation t is the seeded shuffle
// SplitMix64(stream_seed(perm_seed, kTagPerm, t)) of `ground` -- the same
// permutations the generic telescoping path draws. For each (permutation,
// simulation) pair the cascade is extended node by node in permutation
// order and each node is credited the integer number of activations it
// adds, which equals the telescoping difference nu(prefix+pred+x) -
// nu(prefix+pred) summed over sims. One pass costs O(nodes + live edges)
// per simulation instead of one full re-simulation per prefix, and the
// integer accumulators make the result independent of thread count.
MarginalStats sample_permutation_marginals(const ValuationOracle& nu,
                                           std::span<const int> prefix,
                                           std::span<const int> ground,
                                           int num_permutations,
                                           std::uint64_t perm_seed);

}  // namespace critk
