#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "critk/diffusion.hpp"
#include "critk/greedy.hpp"
#include "critk/io.hpp"
#include "critk/select.hpp"

namespace critk {

enum class MethodKind {
    naive,
    eliminate_always,
    eliminate_threshold,
    eliminate_local,
    discount,
    greedy,
    shapley_greedy,
    hybrid,
    spread,
    oracle,
};

// A method descriptor plus every knob any of the methods takes; unused
// fields are ignored by the dispatcher.
struct MethodSpec {
    MethodKind kind = MethodKind::naive;
    ThresholdSpec threshold;                          // eliminate-threshold
    double fraction = 0.5;                            // eliminate-local
    DiscountMethod discount = DiscountMethod::d1();   // discount / hybrid tail
    bool clamp = false;
    int k_tilde = 0;                                  // hybrid switch point
    AllocMethod alloc_method = AllocMethod::shapley;  // hybrid allocation engine

    std::string label() const;  // "naive", "eliminate-always", "discount-d2", ...
};

MethodSpec parse_method(std::string_view name);  // inverse of label(), ConfigError

// One reproducible run. Two runs from equal configs produce byte-identical
// output files (ms is forced to 0 under no_timing so result CSVs compare).
struct ExperimentConfig {
    std::string graph_path;
    bool undirected = false;
    DiffusionModel model = DiffusionModel::ic;
    int num_sims = 1000;
    int k = 1;
    MethodSpec method;
    std::uint64_t sim_seed = 1;
    std::uint64_t perm_seed = 2;
    std::uint64_t tie_seed = 3;
    std::vector<int> budgets{1000};  // per-step permutation budgets; see expand_budgets
    bool exact_allocation = false;   // exact Shapley instead of sampling
    bool memoize = false;
    bool independent_streams = false;
    int threads = 1;
    bool no_timing = false;
    std::vector<std::string> seed_set;  // spread: the node set to evaluate
    std::string alloc_in;       // select methods: read this allocation CSV
    std::string out_path;       // result CSV
    std::string alloc_out;      // allocation CSV, when the method computed one
    std::string selection_out;  // rank,node,phase CSV
    std::string audit_out;      // JSONL audit trail
};

// Schedule for k steps: given entries, then the last one repeated.
PermutationSchedule expand_budgets(const std::vector<int>& budgets, int k);

struct ExperimentOutcome {
    ResultRow row;
    Selection selection;   // empty for spread
    Allocation allocation; // non-empty when the method computed or loaded one
    SpreadEstimate spread; // held-out re-evaluation of the chosen set
};

// The testable core: run one method against an already-loaded graph.
ExperimentOutcome run_experiment_outcome(const ExperimentConfig& cfg, const Graph& g);

// Load the graph, run, write whichever output files the config names.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Exhaustive k-subset maximizer under common random numbers; ties resolve to
// the lexicographically smallest index set. Guard: C(n, k) <= 2e5
// (SizeError beyond).
std::pair<std::vector<int>, double> brute_force_topk(const ValuationOracle& nu,
                                                     std::span<const int> ground, int k);

}  // namespace critk
