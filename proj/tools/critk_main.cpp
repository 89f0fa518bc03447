#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critk/errors.hpp"
#include "critk/experiment.hpp"

namespace {

using critk::ExperimentConfig;

// Flags shared by every subcommand; each one binds into its own config.
void add_common(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--graph", cfg.graph_path, "edge-list file (src<TAB>dst<TAB>weight)")
        ->required();
    cmd->add_option_function<std::string>(
           "--model", [&cfg](const std::string& m) { cfg.model = critk::parse_model(m); },
           "diffusion model: ic|lt")
        ->default_str("ic");
    cmd->add_option("--sims", cfg.num_sims, "simulations per valuation")->default_val(1000);
    cmd->add_option("--seed", cfg.sim_seed, "simulation seed")->default_val(1);
    cmd->add_option("--tie-seed", cfg.tie_seed, "tie-breaking seed")->default_val(3);
    cmd->add_option("--perm-seed", cfg.perm_seed, "permutation-sampling seed")->default_val(2);
    cmd->add_option("--budgets", cfg.budgets,
                    "permutation budgets m1[,m2,...]; short lists repeat the last entry")
        ->delimiter(',');
    cmd->add_option("--out", cfg.out_path, "output CSV (stdout when omitted)");
    cmd->add_flag("--undirected", cfg.undirected, "treat edge-list lines as undirected");
    cmd->add_flag("--memoize", cfg.memoize, "cache valuations per coalition");
    cmd->add_flag("--independent-streams", cfg.independent_streams,
                  "per-coalition random streams instead of common random numbers");
    cmd->add_option("--threads", cfg.threads, "simulation worker threads")->default_val(1);
    cmd->add_flag("--no-timing", cfg.no_timing, "report ms as 0 so equal runs compare bytewise");
}

void add_selection_outputs(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--selection-out", cfg.selection_out, "write rank,node,phase CSV here");
    cmd->add_option("--audit", cfg.audit_out, "write JSONL audit trail here");
}

void add_discount_knobs(CLI::App* cmd, std::vector<double>& combo_weights, bool& clamp) {
    cmd->add_option("--combo-weights", combo_weights,
                    "l1,l2,l3 for the combined discount (default 1/3 each)")
        ->delimiter(',')
        ->expected(3);
    cmd->add_flag("--clamp", clamp, "floor the accumulated discount factor at 0");
}

critk::DiscountMethod discount_from(const std::string& name,
                                    const std::vector<double>& combo_weights) {
    if (name == "d1") return critk::DiscountMethod::d1();
    if (name == "d2") return critk::DiscountMethod::d2();
    if (name == "d3") return critk::DiscountMethod::d3();
    if (name == "combo") {
        if (combo_weights.empty()) return critk::DiscountMethod::combo(1.0 / 3, 1.0 / 3, 1.0 / 3);
        return critk::DiscountMethod::combo(combo_weights[0], combo_weights[1],
                                            combo_weights[2]);
    }
    throw critk::ConfigError("unknown discount rule '" + name + "' (expected d1|d2|d3|combo)");
}

void emit_rows(const ExperimentConfig& cfg) {
    std::vector<critk::ResultRow> rows = critk::run_experiment(cfg);
    if (cfg.out_path.empty()) critk::write_result_csv(std::cout, rows);
}

// shapley / banzhaf emit the allocation itself; --out is the allocation CSV.
void emit_allocation(const ExperimentConfig& cfg, bool banzhaf) {
    critk::LoadOptions lo;
    lo.undirected = cfg.undirected;
    lo.expect_lt_valid = cfg.model == critk::DiffusionModel::lt;
    const critk::Graph g = critk::load_edge_list_file(cfg.graph_path, lo);

    critk::OracleOptions opts;
    opts.num_sims = cfg.num_sims;
    opts.base_seed = cfg.sim_seed;
    opts.memoize = cfg.memoize;
    opts.independent_streams = cfg.independent_streams;
    opts.threads = cfg.threads;
    critk::ValuationOracle nu(g, cfg.model, opts);
    critk::CoalitionGame game = critk::make_game(nu);

    const int budget = critk::expand_budgets(cfg.budgets, 1).budgets[0];
    critk::Allocation alloc;
    if (banzhaf)
        alloc = critk::banzhaf_mc(game, budget, cfg.perm_seed);
    else if (cfg.exact_allocation)
        alloc = critk::shapley_exact(game);
    else
        alloc = critk::shapley_mc(game, budget, cfg.perm_seed);

    if (cfg.out_path.empty())
        critk::write_allocation_csv(std::cout, g, alloc);
    else
        critk::write_allocation_csv_file(cfg.out_path, g, alloc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"top-k critical nodes of a weighted directed network via "
                 "cooperative-game values over diffusion processes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file (flags win)");

    // spread -------------------------------------------------------------
    auto cfg_spread = std::make_shared<ExperimentConfig>();
    CLI::App* spread = app.add_subcommand("spread", "estimate the spread of a given seed set");
    add_common(spread, *cfg_spread);
    spread->add_option("--set", cfg_spread->seed_set, "comma-separated node names to activate")
        ->delimiter(',')
        ->required();
    spread->callback([cfg_spread] {
        cfg_spread->method.kind = critk::MethodKind::spread;
        emit_rows(*cfg_spread);
    });

    // shapley / banzhaf ----------------------------------------------------
    auto cfg_shapley = std::make_shared<ExperimentConfig>();
    CLI::App* shapley = app.add_subcommand("shapley", "emit a Shapley allocation CSV");
    add_common(shapley, *cfg_shapley);
    shapley->add_flag("--exact", cfg_shapley->exact_allocation,
                      "exact enumeration instead of permutation sampling");
    shapley->callback([cfg_shapley] { emit_allocation(*cfg_shapley, false); });

    auto cfg_banzhaf = std::make_shared<ExperimentConfig>();
    CLI::App* banzhaf = app.add_subcommand("banzhaf", "emit a Banzhaf allocation CSV");
    add_common(banzhaf, *cfg_banzhaf);
    banzhaf->callback([cfg_banzhaf] { emit_allocation(*cfg_banzhaf, true); });

    // select ---------------------------------------------------------------
    auto cfg_select = std::make_shared<ExperimentConfig>();
    auto select_method = std::make_shared<std::string>();
    auto threshold_kind = std::make_shared<std::string>("fixed");
    auto tau = std::make_shared<double>(1.0);
    auto lambda = std::make_shared<double>(1.0);
    auto combo_w = std::make_shared<std::vector<double>>();
    auto clamp = std::make_shared<bool>(false);
    CLI::App* select = app.add_subcommand(
        "select", "post-process an allocation into a top-k selection");
    add_common(select, *cfg_select);
    add_selection_outputs(select, *cfg_select);
    select->add_option("--k", cfg_select->k, "number of nodes to pick")->required();
    select
        ->add_option("--method", *select_method,
                     "naive|eliminate-always|eliminate-threshold|eliminate-local|"
                     "discount-d1|discount-d2|discount-d3|discount-combo")
        ->required();
    select->add_option("--alloc", cfg_select->alloc_in,
                       "allocation CSV to post-process (computed inline when omitted)");
    select->add_option("--alloc-out", cfg_select->alloc_out,
                       "also write the allocation that was used");
    select->add_flag("--exact", cfg_select->exact_allocation,
                     "exact Shapley for the inline allocation");
    select->add_option("--threshold-kind", *threshold_kind, "fixed|value-scaled")
        ->check(CLI::IsMember({"fixed", "value-scaled"}));
    select->add_option("--tau", *tau, "fixed elimination threshold in [0,1]");
    select->add_option("--lambda", *lambda, "value-scaled threshold multiplier");
    select->add_option("--fraction", cfg_select->method.fraction,
                       "locally-eliminated fraction of each pick's neighborhood");
    add_discount_knobs(select, *combo_w, *clamp);
    select->callback([=] {
        ExperimentConfig cfg = *cfg_select;
        cfg.method = critk::parse_method(*select_method);
        cfg.method.fraction = cfg_select->method.fraction;
        cfg.method.clamp = *clamp;
        if (cfg.method.kind == critk::MethodKind::discount &&
            cfg.method.discount.kind == critk::DiscountMethod::Kind::combo && !combo_w->empty())
            cfg.method.discount =
                critk::DiscountMethod::combo((*combo_w)[0], (*combo_w)[1], (*combo_w)[2]);
        cfg.method.threshold = *threshold_kind == "fixed"
                                   ? critk::ThresholdSpec::fixed(*tau)
                                   : critk::ThresholdSpec::value_scaled(*lambda);
        emit_rows(cfg);
    });

    // greedy ---------------------------------------------------------------
    auto cfg_greedy = std::make_shared<ExperimentConfig>();
    CLI::App* greedy = app.add_subcommand("greedy", "greedy hill-climbing on marginal spread");
    add_common(greedy, *cfg_greedy);
    add_selection_outputs(greedy, *cfg_greedy);
    greedy->add_option("--k", cfg_greedy->k, "number of nodes to pick")->required();
    greedy->callback([cfg_greedy] {
        cfg_greedy->method.kind = critk::MethodKind::greedy;
        emit_rows(*cfg_greedy);
    });

    // shapley-greedy ---------------------------------------------------------
    auto cfg_sg = std::make_shared<ExperimentConfig>();
    CLI::App* sg = app.add_subcommand(
        "shapley-greedy", "per-step Shapley allocation of the reduced game, argmax pick");
    add_common(sg, *cfg_sg);
    add_selection_outputs(sg, *cfg_sg);
    sg->add_option("--k", cfg_sg->k, "number of nodes to pick")->required();
    sg->callback([cfg_sg] {
        cfg_sg->method.kind = critk::MethodKind::shapley_greedy;
        emit_rows(*cfg_sg);
    });

    // hybrid -----------------------------------------------------------------
    auto cfg_hybrid = std::make_shared<ExperimentConfig>();
    auto tail = std::make_shared<std::string>("d1");
    auto hybrid_combo = std::make_shared<std::vector<double>>();
    auto hybrid_clamp = std::make_shared<bool>(false);
    auto alloc_method = std::make_shared<std::string>("shapley");
    CLI::App* hybrid = app.add_subcommand(
        "hybrid", "game-theoretic head, discounted tail");
    add_common(hybrid, *cfg_hybrid);
    add_selection_outputs(hybrid, *cfg_hybrid);
    hybrid->add_option("--k", cfg_hybrid->k, "number of nodes to pick")->required();
    hybrid->add_option("--k-tilde", cfg_hybrid->method.k_tilde,
                       "game-theoretic steps before switching to discounting")
        ->required();
    hybrid->add_option("--tail", *tail, "discount rule for the tail: d1|d2|d3|combo");
    hybrid->add_option("--alloc-method", *alloc_method, "shapley|banzhaf")
        ->check(CLI::IsMember({"shapley", "banzhaf"}));
    add_discount_knobs(hybrid, *hybrid_combo, *hybrid_clamp);
    hybrid->callback([=] {
        ExperimentConfig cfg = *cfg_hybrid;
        cfg.method.kind = critk::MethodKind::hybrid;
        cfg.method.discount = discount_from(*tail, *hybrid_combo);
        cfg.method.clamp = *hybrid_clamp;
        cfg.method.alloc_method = critk::parse_alloc_method(*alloc_method);
        emit_rows(cfg);
    });

    // oracle -----------------------------------------------------------------
    auto cfg_oracle = std::make_shared<ExperimentConfig>();
    CLI::App* oracle = app.add_subcommand("oracle", "brute-force best k-subset (guarded)");
    add_common(oracle, *cfg_oracle);
    add_selection_outputs(oracle, *cfg_oracle);
    oracle->add_option("--k", cfg_oracle->k, "subset size")->required();
    oracle->callback([cfg_oracle] {
        cfg_oracle->method.kind = critk::MethodKind::oracle;
        emit_rows(*cfg_oracle);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const critk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
