#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "critk/errors.hpp"
#include "critk/graph.hpp"
#include "fixtures.hpp"

using namespace critk;

namespace {

Graph from_text(const std::string& text, const LoadOptions& opts = {}) {
    std::istringstream is(text);
    return load_edge_list(is, opts);
}

bool message_contains(const Error& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("edge list parsing builds the documented index mapping") {
    const Graph g = from_text("a\tb\t1\nb\tc\t0.5\n");
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 2);
    // Indices follow first appearance.
    CHECK(g.index_of("a") == 0);
    CHECK(g.index_of("b") == 1);
    CHECK(g.index_of("c") == 2);
    CHECK(g.name_of(2) == "c");
    CHECK(g.weight(0, 1) == 1.0);
    CHECK(g.weight(1, 2) == 0.5);
    CHECK(g.weight(1, 0) == 0.0);   // reverse direction absent
    CHECK(g.weight(0, 2) == 0.0);   // non-edge
    CHECK(g.find("nope") == std::nullopt);
    CHECK_THROWS_AS((void)g.index_of("nope"), LookupError);
}

TEST_CASE("comments and blank lines are ignored, weight 0 edges accepted") {
    const Graph g = from_text("# header\n\na\tb\t0\n\nb\tc\t0.25\n");
    CHECK(g.num_edges() == 2);
    CHECK(g.weight(0, 1) == 0.0);
}

TEST_CASE("parse errors carry 1-based line numbers") {
    try {
        from_text("a\tb\t0.5\na\tb\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(message_contains(e, "line 2"));
    }
    try {
        from_text("a\tb\tx.y\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(message_contains(e, "line 1"));
    }
}

TEST_CASE("structural validation rejects bad inputs") {
    CHECK_THROWS_AS(from_text("a\tb\t1.5\n"), RangeError);
    CHECK_THROWS_AS(from_text("a\tb\t-0.1\n"), RangeError);
    CHECK_THROWS_AS(from_text("a\ta\t0.5\n"), StructureError);      // self-loop
    CHECK_THROWS_AS(from_text("a\tb\t0.5\na\tb\t0.5\n"), StructureError);  // duplicate
}

TEST_CASE("linear-threshold validation names the offending node") {
    const std::string text = "a\tb\t0.6\nc\tb\t0.6\n";
    const Graph g = from_text(text);  // fine without the option
    CHECK(g.num_edges() == 2);
    CHECK_FALSE(g.lt_valid());
    CHECK(g.in_weight_sum(g.index_of("b")) == doctest::Approx(1.2));
    try {
        LoadOptions opts;
        opts.expect_lt_valid = true;
        from_text(text, opts);
        FAIL("expected ModelError");
    } catch (const ModelError& e) {
        CHECK(message_contains(e, "b"));
    }
    CHECK_THROWS_AS(g.require_lt_valid(), ModelError);
    CHECK_NOTHROW(fx::path3(0.5).require_lt_valid());
}

TEST_CASE("neighbors match a naive edge scan on random graphs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Graph g = erdos_renyi(40, 0.12, 0.1, 0.9, seed);
        for (int x = 0; x < g.num_nodes(); ++x) {
            std::set<int> ins, outs;
            for (const Graph::Edge& e : g.edges()) {
                if (e.dst == x) ins.insert(e.src);
                if (e.src == x) outs.insert(e.dst);
            }
            std::set<int> all = ins;
            all.insert(outs.begin(), outs.end());
            const auto as_vec = [](const std::set<int>& s) {
                return std::vector<int>(s.begin(), s.end());
            };
            CHECK(g.neighbors(x, Graph::NeighborMode::in) == as_vec(ins));
            CHECK(g.neighbors(x, Graph::NeighborMode::out) == as_vec(outs));
            CHECK(g.neighbors(x, Graph::NeighborMode::all) == as_vec(all));
            CHECK(g.in_degree(x) == static_cast<int>(ins.size()));
            CHECK(g.out_degree(x) == static_cast<int>(outs.size()));
        }
    }
}

TEST_CASE("mutual_weight takes the larger direction and is symmetric") {
    const Graph g = from_text("a\tb\t0.3\nb\ta\t0.7\nb\tc\t0.2\n");
    const int a = g.index_of("a"), b = g.index_of("b"), c = g.index_of("c");
    CHECK(g.mutual_weight(a, b) == 0.7);
    CHECK(g.mutual_weight(b, a) == 0.7);
    CHECK(g.mutual_weight(b, c) == 0.2);
    CHECK(g.mutual_weight(c, b) == 0.2);
    CHECK(g.mutual_weight(a, c) == 0.0);
    CHECK_THROWS_AS((void)g.mutual_weight(a, a), LookupError);

    const Graph r = erdos_renyi(25, 0.2, 0.0, 1.0, 77);
    for (int x = 0; x < r.num_nodes(); ++x)
        for (int y = x + 1; y < r.num_nodes(); ++y) {
            CHECK(r.mutual_weight(x, y) == r.mutual_weight(y, x));
            CHECK(r.mutual_weight(x, y) == std::max(r.weight(x, y), r.weight(y, x)));
        }
}

TEST_CASE("write/load round trip is byte-stable") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Graph g = erdos_renyi(30, 0.15, 0.05, 0.95, seed);
        const std::string once = to_edge_list(g);
        const Graph h = from_text(once);
        CHECK(to_edge_list(h) == once);
        CHECK(g.same_network(h));
    }
}

TEST_CASE("same_network ignores index assignment but not structure") {
    const Graph g = from_text("a\tb\t0.5\nc\tb\t0.25\n");
    const Graph h = from_text("c\tb\t0.25\na\tb\t0.5\n");  // different discovery order
    CHECK(g.same_network(h));
    CHECK(h.same_network(g));
    const Graph different = from_text("a\tb\t0.5\nc\tb\t0.3\n");
    CHECK_FALSE(g.same_network(different));
}

TEST_CASE("undirected loading emits both directions") {
    LoadOptions opts;
    opts.undirected = true;
    const Graph g = from_text("a\tb\t0.5\n", opts);
    CHECK(g.num_edges() == 2);
    CHECK(g.weight(0, 1) == 0.5);
    CHECK(g.weight(1, 0) == 0.5);
}

TEST_CASE("file loading reports missing files") {
    CHECK_THROWS_AS(load_edge_list_file("/nonexistent/critk-test.tsv"), Error);

    const std::string path = "graph_roundtrip_test.tsv";
    {
        std::ofstream out(path);
        out << "a\tb\t0.5\n";
    }
    const Graph g = load_edge_list_file(path);
    CHECK(g.num_edges() == 1);
    std::remove(path.c_str());
}

TEST_CASE("erdos_renyi is seed-deterministic and obeys its knobs") {
    const Graph a = erdos_renyi(20, 0.3, 0.2, 0.8, 5);
    const Graph b = erdos_renyi(20, 0.3, 0.2, 0.8, 5);
    const Graph c = erdos_renyi(20, 0.3, 0.2, 0.8, 6);
    CHECK(to_edge_list(a) == to_edge_list(b));
    CHECK(to_edge_list(a) != to_edge_list(c));
    for (const Graph::Edge& e : a.edges()) {
        CHECK(e.weight >= 0.2);
        CHECK(e.weight <= 0.8);
    }
    CHECK(erdos_renyi(12, 0.0, 0.1, 0.9, 1).num_edges() == 0);
    CHECK(erdos_renyi(12, 1.0, 0.1, 0.9, 1).num_edges() == 12 * 11);
    CHECK(erdos_renyi(15, 0.4, 0.3, 1.0, 9, true).lt_valid());
}
