#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace critk {

// Weighted directed network. Node identifiers are the string tokens found in
// the input; internally every node is a dense index in [0, num_nodes()).
// Edge weights live in [0,1]; an absent edge weighs 0 everywhere. Instances
// are immutable after construction and safe for concurrent readers.
class Graph {
  public:
    struct Edge {
        int src;
        int dst;
        double weight;
    };

    // Validating constructor: names define the index mapping, edges refer to
    // indices. Rejects out-of-range weights, self-loops, duplicate edges and
    // duplicate names.
    Graph(std::vector<std::string> names, std::vector<Edge> edges);

    static Graph empty() { return Graph({}, {}); }

    int num_nodes() const { return static_cast<int>(names_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::string& name_of(int x) const { return names_[check_node(x)]; }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<int> find(std::string_view name) const;
    // Like find() but throws LookupError for unknown names.
    int index_of(std::string_view name) const;

    // Canonical edge array, sorted by (src, dst); an edge's id is its
    // position here. Per-edge randomness is addressed by these ids.
    std::span<const Edge> edges() const { return edges_; }

    struct Arc {
        int node;     // the other endpoint
        double weight; // weight of the directed edge
        int edge_id;  // index into edges()
    };

    // Out-arcs of x (edges x -> *), sorted by destination index.
    std::span<const Arc> out(int x) const;
    // In-arcs of x (edges * -> x), sorted by source index.
    std::span<const Arc> in(int x) const;

    int out_degree(int x) const { return static_cast<int>(out(x).size()); }
    int in_degree(int x) const { return static_cast<int>(in(x).size()); }

    // beta_xy; 0 when the directed edge is absent.
    double weight(int x, int y) const;
    // max(beta_xy, beta_yx); 0 when neither edge exists. Requires x != y.
    double mutual_weight(int x, int y) const;

    enum class NeighborMode { in, out, all };
    // Sorted, duplicate-free neighbor indices. all = in-union-out.
    std::vector<int> neighbors(int x, NeighborMode mode) const;

    // Sum of incoming weights of x.
    double in_weight_sum(int x) const { return in_weight_sum_[check_node(x)]; }
    // True when every node's incoming weights sum to at most 1 (small
    // tolerance for decimal rounding), as linear-threshold semantics require.
    bool lt_valid() const { return lt_valid_; }
    // Throws ModelError naming the worst offender when not lt_valid().
    void require_lt_valid() const;

    // Name-based structural equality; index assignment does not matter.
    bool same_network(const Graph& other) const;

  private:
    int check_node(int x) const;

    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Edge> edges_;
    std::vector<Arc> out_arcs_, in_arcs_;
    std::vector<int> out_off_, in_off_;
    std::vector<double> in_weight_sum_;
    bool lt_valid_ = true;
};

struct LoadOptions {
    // Enforce the linear-threshold constraint (incoming weights sum <= 1) at load.
    bool expect_lt_valid = false;
    // Interpret each line as an undirected edge and emit both directions.
    bool undirected = false;
};

// Reads the tab-separated edge-list format: one "src<TAB>dst<TAB>weight"
// per line, weight a decimal in [0,1]; '#' lines and blank lines ignored.
// Node indices follow first appearance. Errors carry the 1-based line number.
Graph load_edge_list(std::istream& source, const LoadOptions& opts = {});
Graph load_edge_list_file(const std::string& path, const LoadOptions& opts = {});

// Writes the same format, edges sorted by (src name, dst name), weights in
// shortest round-trip decimal form. load(write(g)) reproduces the network
// bit-exactly.
void write_edge_list(const Graph& g, std::ostream& out);
std::string to_edge_list(const Graph& g);

// Seeded G(n, p) generator with weights uniform in [wmin, wmax]; node names
// are zero-padded ("v007"). When lt_normalize is set, incoming weights of
// each node are rescaled to sum below 1 so the result is LT-valid.
Graph erdos_renyi(int n, double p, double wmin, double wmax, std::uint64_t seed,
                  bool lt_normalize = false);

}  // namespace critk
