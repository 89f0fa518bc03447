#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "critk/errors.hpp"
#include "critk/experiment.hpp"

namespace py = pybind11;

namespace {

using namespace critk;

std::vector<int> ids_of(const Graph& g, const std::vector<std::string>& names) {
    std::vector<int> ids;
    ids.reserve(names.size());
    for (const std::string& name : names) ids.push_back(g.index_of(name));
    return ids;
}

std::vector<std::string> names_of(const Graph& g, const std::vector<int>& ids) {
    std::vector<std::string> names;
    names.reserve(ids.size());
    for (int x : ids) names.emplace_back(g.name_of(x));
    return names;
}

ValuationOracle make_oracle(const Graph& g, const std::string& model, int sims,
                            std::uint64_t seed, bool memoize, int threads) {
    OracleOptions opts;
    opts.num_sims = sims;
    opts.base_seed = seed;
    opts.memoize = memoize;
    opts.threads = threads;
    return ValuationOracle(g, parse_model(model), opts);
}

py::dict alloc_to_dict(const Graph& g, const Allocation& alloc) {
    py::dict d;
    for (std::size_t i = 0; i < alloc.nodes.size(); ++i)
        d[py::str(g.name_of(alloc.nodes[i]))] = alloc.value[i];
    return d;
}

Allocation alloc_from_dict(const Graph& g, const py::dict& values) {
    Allocation alloc;
    for (auto item : values) {
        alloc.nodes.push_back(g.index_of(item.first.cast<std::string>()));
        alloc.value.push_back(item.second.cast<double>());
    }
    return alloc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "top-k critical nodes via cooperative-game values over diffusion processes";

    py::class_<Graph>(m, "Graph")
        .def_static(
            "from_text",
            [](const std::string& text, bool undirected, bool expect_lt_valid) {
                std::istringstream is(text);
                LoadOptions lo;
                lo.undirected = undirected;
                lo.expect_lt_valid = expect_lt_valid;
                return load_edge_list(is, lo);
            },
            py::arg("text"), py::arg("undirected") = false, py::arg("expect_lt_valid") = false,
            "Parse an edge list (src<TAB>dst<TAB>weight per line).")
        .def_static(
            "load",
            [](const std::string& path, bool undirected, bool expect_lt_valid) {
                LoadOptions lo;
                lo.undirected = undirected;
                lo.expect_lt_valid = expect_lt_valid;
                return load_edge_list_file(path, lo);
            },
            py::arg("path"), py::arg("undirected") = false, py::arg("expect_lt_valid") = false)
        .def_property_readonly("num_nodes", &Graph::num_nodes)
        .def_property_readonly("num_edges", &Graph::num_edges)
        .def("names",
             [](const Graph& g) {
                 return std::vector<std::string>(g.names().begin(), g.names().end());
             })
        .def("weight",
             [](const Graph& g, const std::string& x, const std::string& y) {
                 return g.weight(g.index_of(x), g.index_of(y));
             })
        .def("mutual_weight",
             [](const Graph& g, const std::string& x, const std::string& y) {
                 return g.mutual_weight(g.index_of(x), g.index_of(y));
             })
        .def("to_text", &to_edge_list)
        .def("__repr__", [](const Graph& g) {
            return "<Graph nodes=" + std::to_string(g.num_nodes()) +
                   " edges=" + std::to_string(g.num_edges()) + ">";
        });

    m.def(
        "erdos_renyi",
        [](int n, double p, double wmin, double wmax, std::uint64_t seed, bool lt_normalize) {
            return erdos_renyi(n, p, wmin, wmax, seed, lt_normalize);
        },
        py::arg("n"), py::arg("p"), py::arg("wmin") = 0.0, py::arg("wmax") = 1.0,
        py::arg("seed") = 1, py::arg("lt_normalize") = false);

    m.def(
        "spread",
        [](const Graph& g, const std::vector<std::string>& seeds, const std::string& model,
           int sims, std::uint64_t seed, int threads) {
            SpreadEstimate est =
                estimate_spread(g, parse_model(model), ids_of(g, seeds), sims, seed, threads);
            return py::make_tuple(est.mean, est.std_err);
        },
        py::arg("graph"), py::arg("seeds"), py::arg("model") = "ic", py::arg("sims") = 1000,
        py::arg("seed") = 1, py::arg("threads") = 1,
        "Monte-Carlo (mean, stderr) of the activated-set size.");

    m.def(
        "shapley",
        [](const Graph& g, const std::string& model, int sims, int permutations,
           std::uint64_t seed, std::uint64_t perm_seed, bool exact, bool memoize, int threads) {
            ValuationOracle nu = make_oracle(g, model, sims, seed, memoize, threads);
            CoalitionGame game = make_game(nu);
            Allocation alloc =
                exact ? shapley_exact(game) : shapley_mc(game, permutations, perm_seed);
            return alloc_to_dict(g, alloc);
        },
        py::arg("graph"), py::arg("model") = "ic", py::arg("sims") = 1000,
        py::arg("permutations") = 1000, py::arg("seed") = 1, py::arg("perm_seed") = 2,
        py::arg("exact") = false, py::arg("memoize") = false, py::arg("threads") = 1,
        "Shapley allocation as {node name: value}.");

    m.def(
        "banzhaf",
        [](const Graph& g, const std::string& model, int sims, int samples, std::uint64_t seed,
           std::uint64_t perm_seed, bool memoize, int threads) {
            ValuationOracle nu = make_oracle(g, model, sims, seed, memoize, threads);
            CoalitionGame game = make_game(nu);
            return alloc_to_dict(g, banzhaf_mc(game, samples, perm_seed));
        },
        py::arg("graph"), py::arg("model") = "ic", py::arg("sims") = 1000,
        py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("perm_seed") = 2,
        py::arg("memoize") = false, py::arg("threads") = 1);

    m.def(
        "select",
        [](const Graph& g, const py::dict& values, const std::string& method, int k,
           std::uint64_t tie_seed, double tau, const std::string& threshold_kind, double lambda,
           double fraction, const std::vector<double>& combo_weights, bool clamp) {
            Allocation alloc = alloc_from_dict(g, values);
            MethodSpec spec = parse_method(method);
            Selection sel;
            switch (spec.kind) {
                case MethodKind::naive:
                    sel = select_naive(rank(alloc, tie_seed), k);
                    break;
                case MethodKind::eliminate_always:
                    sel = select_eliminate_always(g, rank(alloc, tie_seed), k);
                    break;
                case MethodKind::eliminate_threshold: {
                    ThresholdSpec ts = threshold_kind == "value-scaled"
                                           ? ThresholdSpec::value_scaled(lambda)
                                           : ThresholdSpec::fixed(tau);
                    sel = select_eliminate_threshold(g, rank(alloc, tie_seed), k, ts, alloc);
                    break;
                }
                case MethodKind::eliminate_local:
                    sel = select_eliminate_local(g, rank(alloc, tie_seed), k, fraction);
                    break;
                case MethodKind::discount: {
                    DiscountMethod dm = spec.discount;
                    if (dm.kind == DiscountMethod::Kind::combo && combo_weights.size() == 3)
                        dm = DiscountMethod::combo(combo_weights[0], combo_weights[1],
                                                   combo_weights[2]);
                    sel = select_discount(g, alloc, k, dm, tie_seed, clamp);
                    break;
                }
                default:
                    throw ConfigError("method '" + method + "' needs an oracle; use greedy()/"
                                      "shapley_greedy()/hybrid() instead");
            }
            return names_of(g, sel.chosen);
        },
        py::arg("graph"), py::arg("values"), py::arg("method"), py::arg("k"),
        py::arg("tie_seed") = 3, py::arg("tau") = 1.0, py::arg("threshold_kind") = "fixed",
        py::arg("lambda_") = 1.0, py::arg("fraction") = 0.5,
        py::arg("combo_weights") = std::vector<double>{}, py::arg("clamp") = false,
        "Post-process an allocation dict into an ordered top-k list of names.");

    m.def(
        "greedy",
        [](const Graph& g, int k, const std::string& model, int sims, std::uint64_t seed,
           std::uint64_t tie_seed, bool memoize, int threads) {
            ValuationOracle nu = make_oracle(g, model, sims, seed, memoize, threads);
            return names_of(g, greedy_hill_climb(nu, k, tie_seed).chosen);
        },
        py::arg("graph"), py::arg("k"), py::arg("model") = "ic", py::arg("sims") = 1000,
        py::arg("seed") = 1, py::arg("tie_seed") = 3, py::arg("memoize") = false,
        py::arg("threads") = 1);

    m.def(
        "shapley_greedy",
        [](const Graph& g, int k, const std::vector<int>& budgets, const std::string& model,
           int sims, std::uint64_t seed, std::uint64_t perm_seed, std::uint64_t tie_seed,
           bool memoize, int threads) {
            ValuationOracle nu = make_oracle(g, model, sims, seed, memoize, threads);
            std::vector<int> ground(static_cast<std::size_t>(g.num_nodes()));
            for (int i = 0; i < g.num_nodes(); ++i) ground[i] = i;
            Selection sel = shapley_greedy(nu, ground, k, expand_budgets(budgets, k),
                                           perm_seed, tie_seed);
            return names_of(g, sel.chosen);
        },
        py::arg("graph"), py::arg("k"), py::arg("budgets") = std::vector<int>{1000},
        py::arg("model") = "ic", py::arg("sims") = 1000, py::arg("seed") = 1,
        py::arg("perm_seed") = 2, py::arg("tie_seed") = 3, py::arg("memoize") = false,
        py::arg("threads") = 1);

    m.def(
        "hybrid",
        [](const Graph& g, int k, int k_tilde, const std::string& tail,
           const std::vector<int>& budgets, const std::string& alloc_method,
           const std::string& model, int sims, std::uint64_t seed, std::uint64_t perm_seed,
           std::uint64_t tie_seed, const std::vector<double>& combo_weights, bool clamp,
           bool memoize, int threads) {
            ValuationOracle nu = make_oracle(g, model, sims, seed, memoize, threads);
            HybridConfig cfg;
            cfg.k_tilde = k_tilde;
            if (tail == "combo" && combo_weights.size() == 3)
                cfg.tail_method = DiscountMethod::combo(combo_weights[0], combo_weights[1],
                                                        combo_weights[2]);
            else if (tail == "combo")
                cfg.tail_method = DiscountMethod::combo(1.0 / 3, 1.0 / 3, 1.0 / 3);
            else if (tail == "d1")
                cfg.tail_method = DiscountMethod::d1();
            else if (tail == "d2")
                cfg.tail_method = DiscountMethod::d2();
            else if (tail == "d3")
                cfg.tail_method = DiscountMethod::d3();
            else
                throw ConfigError("unknown tail rule '" + tail + "'");
            cfg.clamp = clamp;
            Selection sel =
                hybrid_select(nu, g, parse_alloc_method(alloc_method), k, cfg,
                              expand_budgets(budgets, std::max(k, 1)), perm_seed, tie_seed);
            return names_of(g, sel.chosen);
        },
        py::arg("graph"), py::arg("k"), py::arg("k_tilde"), py::arg("tail") = "d1",
        py::arg("budgets") = std::vector<int>{1000}, py::arg("alloc_method") = "shapley",
        py::arg("model") = "ic", py::arg("sims") = 1000, py::arg("seed") = 1,
        py::arg("perm_seed") = 2, py::arg("tie_seed") = 3,
        py::arg("combo_weights") = std::vector<double>{}, py::arg("clamp") = false,
        py::arg("memoize") = false, py::arg("threads") = 1);

    m.def(
        "brute_force_topk",
        [](const Graph& g, int k, const std::string& model, int sims, std::uint64_t seed,
           bool memoize, int threads) {
            ValuationOracle nu = make_oracle(g, model, sims, seed, memoize, threads);
            std::vector<int> ground(static_cast<std::size_t>(g.num_nodes()));
            for (int i = 0; i < g.num_nodes(); ++i) ground[i] = i;
            auto [best, value] = brute_force_topk(nu, ground, k);
            return py::make_tuple(names_of(g, best), value);
        },
        py::arg("graph"), py::arg("k"), py::arg("model") = "ic", py::arg("sims") = 1000,
        py::arg("seed") = 1, py::arg("memoize") = false, py::arg("threads") = 1);
}
