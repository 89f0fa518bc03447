#include "critk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "critk/errors.hpp"
#include "critk/rng.hpp"

namespace critk {

std::string MethodSpec::label() const {
    switch (kind) {
        case MethodKind::naive: return "naive";
        case MethodKind::eliminate_always: return "eliminate-always";
        case MethodKind::eliminate_threshold: return "eliminate-threshold";
        case MethodKind::eliminate_local: return "eliminate-local";
        case MethodKind::discount: return "discount-" + discount.name();
        case MethodKind::greedy: return "greedy";
        case MethodKind::shapley_greedy: return "shapley-greedy";
        case MethodKind::hybrid: return "hybrid";
        case MethodKind::spread: return "spread";
        case MethodKind::oracle: return "oracle";
    }
    return "?";
}

MethodSpec parse_method(std::string_view name) {
    MethodSpec spec;
    if (name == "naive") {
        spec.kind = MethodKind::naive;
    } else if (name == "eliminate-always") {
        spec.kind = MethodKind::eliminate_always;
    } else if (name == "eliminate-threshold") {
        spec.kind = MethodKind::eliminate_threshold;
    } else if (name == "eliminate-local") {
        spec.kind = MethodKind::eliminate_local;
    } else if (name == "discount-d1") {
        spec.kind = MethodKind::discount;
        spec.discount = DiscountMethod::d1();
    } else if (name == "discount-d2") {
        spec.kind = MethodKind::discount;
        spec.discount = DiscountMethod::d2();
    } else if (name == "discount-d3") {
        spec.kind = MethodKind::discount;
        spec.discount = DiscountMethod::d3();
    } else if (name == "discount-combo") {
        spec.kind = MethodKind::discount;
        spec.discount = DiscountMethod::combo(1.0 / 3, 1.0 / 3, 1.0 / 3);
    } else if (name == "greedy") {
        spec.kind = MethodKind::greedy;
    } else if (name == "shapley-greedy") {
        spec.kind = MethodKind::shapley_greedy;
    } else if (name == "hybrid") {
        spec.kind = MethodKind::hybrid;
    } else if (name == "spread") {
        spec.kind = MethodKind::spread;
    } else if (name == "oracle") {
        spec.kind = MethodKind::oracle;
    } else {
        throw ConfigError("unknown method '" + std::string(name) + "'");
    }
    return spec;
}

PermutationSchedule expand_budgets(const std::vector<int>& budgets, int k) {
    if (budgets.empty()) throw ConfigError("at least one permutation budget required");
    if (k < 1) throw ConfigError("k must be >= 1");
    PermutationSchedule schedule;
    schedule.budgets.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t)
        schedule.budgets.push_back(
            budgets[std::min<std::size_t>(static_cast<std::size_t>(t), budgets.size() - 1)]);
    schedule.validate(k);
    return schedule;
}

namespace {

std::vector<int> resolve_names(const Graph& g, std::span<const std::string> names) {
    std::vector<int> ids;
    ids.reserve(names.size());
    for (const std::string& name : names) ids.push_back(g.index_of(name));
    return ids;
}

std::vector<int> all_nodes(const Graph& g) {
    std::vector<int> ids(static_cast<std::size_t>(g.num_nodes()));
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

Allocation obtain_allocation(const ExperimentConfig& cfg, const Graph& g,
                             const ValuationOracle& nu) {
    if (!cfg.alloc_in.empty()) return read_allocation_csv_file(cfg.alloc_in, g);
    CoalitionGame game = make_game(nu);
    if (cfg.exact_allocation) return shapley_exact(game);
    return shapley_mc(game, expand_budgets(cfg.budgets, 1).budgets[0], cfg.perm_seed);
}

}  // namespace

ExperimentOutcome run_experiment_outcome(const ExperimentConfig& cfg, const Graph& g) {
    if (cfg.num_sims < 1) throw ConfigError("sims must be >= 1");
    OracleOptions opts;
    opts.num_sims = cfg.num_sims;
    opts.base_seed = cfg.sim_seed;
    opts.memoize = cfg.memoize;
    opts.independent_streams = cfg.independent_streams;
    opts.threads = cfg.threads;
    ValuationOracle nu(g, cfg.model, opts);

    ExperimentOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> chosen;

    switch (cfg.method.kind) {
        case MethodKind::spread: {
            chosen = resolve_names(g, cfg.seed_set);
            break;
        }
        case MethodKind::oracle: {
            auto [best, value] = brute_force_topk(nu, all_nodes(g), cfg.k);
            chosen = std::move(best);
            for (std::size_t i = 0; i < chosen.size(); ++i) {
                AuditStep st;
                st.step = static_cast<int>(i) + 1;
                st.node = chosen[i];
                out.selection.audit.push_back(st);
            }
            out.selection.chosen = chosen;
            break;
        }
        case MethodKind::greedy: {
            out.selection = greedy_hill_climb(nu, cfg.k, cfg.tie_seed);
            chosen = out.selection.chosen;
            break;
        }
        case MethodKind::shapley_greedy: {
            out.selection = shapley_greedy(nu, all_nodes(g), cfg.k,
                                           expand_budgets(cfg.budgets, cfg.k), cfg.perm_seed,
                                           cfg.tie_seed);
            chosen = out.selection.chosen;
            break;
        }
        case MethodKind::hybrid: {
            HybridConfig hc;
            hc.k_tilde = cfg.method.k_tilde;
            hc.tail_method = cfg.method.discount;
            hc.clamp = cfg.method.clamp;
            out.selection =
                hybrid_select(nu, g, cfg.method.alloc_method, cfg.k, hc,
                              expand_budgets(cfg.budgets, cfg.k), cfg.perm_seed, cfg.tie_seed);
            chosen = out.selection.chosen;
            break;
        }
        default: {  // ranking post-processing methods
            out.allocation = obtain_allocation(cfg, g, nu);
            const Ranking ranking = rank(out.allocation, cfg.tie_seed);
            switch (cfg.method.kind) {
                case MethodKind::naive:
                    out.selection = select_naive(ranking, cfg.k);
                    break;
                case MethodKind::eliminate_always:
                    out.selection = select_eliminate_always(g, ranking, cfg.k);
                    break;
                case MethodKind::eliminate_threshold:
                    out.selection = select_eliminate_threshold(g, ranking, cfg.k,
                                                               cfg.method.threshold,
                                                               out.allocation);
                    break;
                case MethodKind::eliminate_local:
                    out.selection =
                        select_eliminate_local(g, ranking, cfg.k, cfg.method.fraction);
                    break;
                case MethodKind::discount:
                    out.selection = select_discount(g, out.allocation, cfg.k,
                                                    cfg.method.discount, cfg.tie_seed,
                                                    cfg.method.clamp);
                    break;
                default:
                    throw ConfigError("method not runnable here: " + cfg.method.label());
            }
            chosen = out.selection.chosen;
            break;
        }
    }

    const std::uint64_t calls = nu.stats().calls;

    // Selection may have optimized against its own random streams; report
    // spread from a held-out evaluation stream instead. The spread method
    // evaluates a user-given set, so it uses the user's seed directly.
    const std::uint64_t eval_seed = cfg.method.kind == MethodKind::spread
                                        ? cfg.sim_seed
                                        : rng::stream_seed(cfg.sim_seed, rng::kTagEval, 0);
    out.spread = estimate_spread(g, cfg.model, chosen, cfg.num_sims, eval_seed, cfg.threads);

    const auto t1 = std::chrono::steady_clock::now();
    ResultRow& row = out.row;
    row.method = cfg.method.label();
    row.k = cfg.method.kind == MethodKind::spread ? static_cast<int>(chosen.size()) : cfg.k;
    for (int x : chosen) row.chosen.push_back(g.name_of(x));
    row.spread_mean = out.spread.mean;
    row.spread_stderr = out.spread.std_err;
    row.nu_calls = calls;
    row.ms = cfg.no_timing
                 ? 0
                 : static_cast<std::uint64_t>(
                       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    row.sim_seed = cfg.sim_seed;
    row.perm_seed = cfg.perm_seed;
    row.tie_seed = cfg.tie_seed;
    return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.graph_path.empty()) throw ConfigError("graph path required");
    LoadOptions lo;
    lo.undirected = cfg.undirected;
    lo.expect_lt_valid = cfg.model == DiffusionModel::lt;
    const Graph g = load_edge_list_file(cfg.graph_path, lo);

    ExperimentOutcome out = run_experiment_outcome(cfg, g);
    if (!cfg.out_path.empty()) write_result_csv_file(cfg.out_path, {&out.row, 1});
    if (!cfg.alloc_out.empty() && !out.allocation.nodes.empty())
        write_allocation_csv_file(cfg.alloc_out, g, out.allocation);
    if (!cfg.selection_out.empty()) write_selection_csv_file(cfg.selection_out, g, out.selection);
    if (!cfg.audit_out.empty()) write_audit_jsonl_file(cfg.audit_out, g, out.selection);
    return {out.row};
}

std::pair<std::vector<int>, double> brute_force_topk(const ValuationOracle& nu,
                                                     std::span<const int> ground, int k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    std::vector<int> nodes(ground.begin(), ground.end());
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw StructureError("duplicate node in ground set");
    for (int x : nodes)
        if (x < 0 || x >= nu.num_players())
            throw LookupError("player index " + std::to_string(x) + " out of range");

    const int n = static_cast<int>(nodes.size());
    if (n == 0) return {{}, 0.0};
    if (k >= n) return {nodes, nu.evaluate(nodes)};

    double count = 1.0;
    for (int i = 1; i <= k; ++i) count = count * (n - k + i) / i;
    if (count > 2e5 + 0.5)
        throw SizeError("C(" + std::to_string(n) + "," + std::to_string(k) +
                        ") exceeds the brute-force guard");

    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> best;
    double best_value = 0.0;
    std::vector<int> coalition(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i) coalition[i] = nodes[idx[i]];
        const double value = nu.evaluate(coalition);
        if (best.empty() || value > best_value) {  // keep the lexicographically first max
            best = coalition;
            best_value = value;
        }
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return {best, best_value};
}

}  // namespace critk
