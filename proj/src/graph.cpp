#include "critk/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "critk/errors.hpp"
#include "critk/rng.hpp"

namespace critk {

namespace {

constexpr double kLtTolerance = 1e-9;

std::string format_weight(double w) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, w);
    return std::string(buf, res.ptr);
}

}  // namespace

Graph::Graph(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
    const int n = static_cast<int>(names_.size());
    index_.reserve(names_.size());
    for (int i = 0; i < n; ++i) {
        if (!index_.emplace(names_[i], i).second)
            throw StructureError("duplicate node name '" + names_[i] + "'");
    }

    for (const Edge& e : edges_) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw LookupError("edge endpoint index out of range");
        if (e.src == e.dst)
            throw StructureError("self-loop at node '" + names_[e.src] + "'");
        if (!(e.weight >= 0.0 && e.weight <= 1.0))
            throw RangeError("weight " + format_weight(e.weight) + " outside [0,1] on edge '" +
                             names_[e.src] + "' -> '" + names_[e.dst] + "'");
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i].src == edges_[i - 1].src && edges_[i].dst == edges_[i - 1].dst)
            throw StructureError("duplicate edge '" + names_[edges_[i].src] + "' -> '" +
                                 names_[edges_[i].dst] + "'");
    }

    out_off_.assign(n + 1, 0);
    in_off_.assign(n + 1, 0);
    for (const Edge& e : edges_) {
        ++out_off_[e.src + 1];
        ++in_off_[e.dst + 1];
    }
    for (int i = 0; i < n; ++i) {
        out_off_[i + 1] += out_off_[i];
        in_off_[i + 1] += in_off_[i];
    }
    out_arcs_.resize(edges_.size());
    in_arcs_.resize(edges_.size());
    std::vector<int> out_pos(out_off_.begin(), out_off_.end() - 1);
    std::vector<int> in_pos(in_off_.begin(), in_off_.end() - 1);
    for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
        const Edge& e = edges_[id];
        out_arcs_[out_pos[e.src]++] = Arc{e.dst, e.weight, id};
        in_arcs_[in_pos[e.dst]++] = Arc{e.src, e.weight, id};
    }
    // edges_ is (src,dst)-sorted, so out-arcs arrive dst-sorted; in-arcs need
    // a per-node sort by source.
    for (int x = 0; x < n; ++x) {
        std::sort(in_arcs_.begin() + in_off_[x], in_arcs_.begin() + in_off_[x + 1],
                  [](const Arc& a, const Arc& b) { return a.node < b.node; });
    }

    in_weight_sum_.assign(n, 0.0);
    for (const Edge& e : edges_) in_weight_sum_[e.dst] += e.weight;
    lt_valid_ = true;
    for (int x = 0; x < n; ++x)
        if (in_weight_sum_[x] > 1.0 + kLtTolerance) lt_valid_ = false;
}

int Graph::check_node(int x) const {
    if (x < 0 || x >= num_nodes()) throw LookupError("node index " + std::to_string(x) + " out of range");
    return x;
}

std::optional<int> Graph::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int Graph::index_of(std::string_view name) const {
    if (auto idx = find(name)) return *idx;
    throw LookupError("unknown node '" + std::string(name) + "'");
}

std::span<const Graph::Arc> Graph::out(int x) const {
    check_node(x);
    return {out_arcs_.data() + out_off_[x], static_cast<std::size_t>(out_off_[x + 1] - out_off_[x])};
}

std::span<const Graph::Arc> Graph::in(int x) const {
    check_node(x);
    return {in_arcs_.data() + in_off_[x], static_cast<std::size_t>(in_off_[x + 1] - in_off_[x])};
}

double Graph::weight(int x, int y) const {
    check_node(y);
    auto arcs = out(x);
    auto it = std::lower_bound(arcs.begin(), arcs.end(), y,
                               [](const Arc& a, int node) { return a.node < node; });
    if (it != arcs.end() && it->node == y) return it->weight;
    return 0.0;
}

double Graph::mutual_weight(int x, int y) const {
    if (x == y) throw LookupError("mutual_weight requires two distinct nodes");
    return std::max(weight(x, y), weight(y, x));
}

std::vector<int> Graph::neighbors(int x, NeighborMode mode) const {
    check_node(x);
    std::vector<int> result;
    if (mode == NeighborMode::in || mode == NeighborMode::all)
        for (const Arc& a : in(x)) result.push_back(a.node);
    if (mode == NeighborMode::out || mode == NeighborMode::all)
        for (const Arc& a : out(x)) result.push_back(a.node);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

void Graph::require_lt_valid() const {
    if (lt_valid_) return;
    int worst = 0;
    for (int x = 1; x < num_nodes(); ++x)
        if (in_weight_sum_[x] > in_weight_sum_[worst]) worst = x;
    throw ModelError("graph is not LT-valid: incoming weights of node '" + names_[worst] +
                     "' sum to " + format_weight(in_weight_sum_[worst]) + " > 1");
}

bool Graph::same_network(const Graph& other) const {
    if (num_nodes() != other.num_nodes() || num_edges() != other.num_edges()) return false;
    std::set<std::string> a(names_.begin(), names_.end());
    std::set<std::string> b(other.names_.begin(), other.names_.end());
    if (a != b) return false;
    for (const Edge& e : edges_) {
        auto dst = other.find(names_[e.dst]);
        auto src = other.find(names_[e.src]);
        if (!src || !dst) return false;
        if (other.weight(*src, *dst) != e.weight) return false;
        // weight() returns 0 for absent edges; distinguish a genuine 0-weight
        // edge from no edge at all.
        if (e.weight == 0.0) {
            auto arcs = other.out(*src);
            bool found = std::any_of(arcs.begin(), arcs.end(),
                                     [&](const Arc& arc) { return arc.node == *dst; });
            if (!found) return false;
        }
    }
    return true;
}

namespace {

struct PendingEdge {
    std::string src, dst;
    double weight;
    std::size_t line;
};

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

double parse_weight(std::string_view token, std::size_t line) {
    double w = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, w);
    if (res.ec != std::errc{} || res.ptr != last)
        parse_fail(line, "invalid weight '" + std::string(token) + "'");
    return w;
}

}  // namespace

Graph load_edge_list(std::istream& source, const LoadOptions& opts) {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> index;
    auto intern = [&](const std::string& token) {
        auto [it, inserted] = index.emplace(token, static_cast<int>(names.size()));
        if (inserted) names.push_back(token);
        return it->second;
    };

    std::vector<Graph::Edge> edges;
    std::vector<std::size_t> edge_lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(source, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
            parse_fail(lineno, "expected 'src<TAB>dst<TAB>weight'");
        std::string src = line.substr(0, t1);
        std::string dst = line.substr(t1 + 1, t2 - t1 - 1);
        std::string wtok = line.substr(t2 + 1);
        if (src.empty() || dst.empty() || wtok.empty())
            parse_fail(lineno, "empty field");

        double w = parse_weight(wtok, lineno);
        if (!(w >= 0.0 && w <= 1.0))
            throw RangeError("line " + std::to_string(lineno) + ": weight " + wtok + " outside [0,1]");
        int s = intern(src);
        int d = intern(dst);
        if (s == d)
            throw StructureError("line " + std::to_string(lineno) + ": self-loop at node '" + src + "'");
        edges.push_back({s, d, w});
        edge_lines.push_back(lineno);
        if (opts.undirected) {
            edges.push_back({d, s, w});
            edge_lines.push_back(lineno);
        }
    }

    // Pre-check duplicates here so the error can carry a line number.
    {
        std::vector<std::size_t> order(edges.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (edges[a].src != edges[b].src) return edges[a].src < edges[b].src;
            if (edges[a].dst != edges[b].dst) return edges[a].dst < edges[b].dst;
            return edge_lines[a] < edge_lines[b];
        });
        for (std::size_t i = 1; i < order.size(); ++i) {
            const auto& prev = edges[order[i - 1]];
            const auto& cur = edges[order[i]];
            if (prev.src == cur.src && prev.dst == cur.dst)
                throw StructureError("line " + std::to_string(edge_lines[order[i]]) +
                                     ": duplicate edge '" + names[cur.src] + "' -> '" + names[cur.dst] + "'");
        }
    }

    Graph g(std::move(names), std::move(edges));
    if (opts.expect_lt_valid) g.require_lt_valid();
    return g;
}

Graph load_edge_list_file(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file '" + path + "'");
    return load_edge_list(in, opts);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    std::vector<const Graph::Edge*> sorted;
    sorted.reserve(g.edges().size());
    for (const auto& e : g.edges()) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [&](const Graph::Edge* a, const Graph::Edge* b) {
        const std::string& as = g.name_of(a->src);
        const std::string& bs = g.name_of(b->src);
        if (as != bs) return as < bs;
        return g.name_of(a->dst) < g.name_of(b->dst);
    });
    for (const Graph::Edge* e : sorted)
        out << g.name_of(e->src) << '\t' << g.name_of(e->dst) << '\t' << format_weight(e->weight) << '\n';
}

std::string to_edge_list(const Graph& g) {
    std::ostringstream os;
    write_edge_list(g, os);
    return os.str();
}

Graph erdos_renyi(int n, double p, double wmin, double wmax, std::uint64_t seed, bool lt_normalize) {
    if (n < 0 || p < 0.0 || p > 1.0 || wmin < 0.0 || wmax > 1.0 || wmin > wmax)
        throw ConfigError("invalid random-graph parameters");
    int width = 1;
    for (int v = n - 1; v >= 10; v /= 10) ++width;
    std::vector<std::string> names(n);
    for (int i = 0; i < n; ++i) {
        std::string digits = std::to_string(i);
        names[i] = "v" + std::string(width - digits.size(), '0') + digits;
    }
    rng::SplitMix64 gen(rng::mix64(seed ^ 0x6772617068676e65ULL));
    std::vector<Graph::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double coin = gen.next_unit();
            double w = wmin + (wmax - wmin) * gen.next_unit();
            if (coin < p) edges.push_back({i, j, w});
        }
    if (lt_normalize) {
        std::vector<double> sums(n, 0.0);
        for (const auto& e : edges) sums[e.dst] += e.weight;
        for (auto& e : edges)
            if (sums[e.dst] > 1.0) e.weight *= 0.999 / sums[e.dst];
    }
    return Graph(std::move(names), std::move(edges));
}

}  // namespace critk
