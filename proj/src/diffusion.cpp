#include "critk/diffusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "critk/errors.hpp"
#include "critk/rng.hpp"

namespace critk {

DiffusionModel parse_model(std::string_view token) {
    if (token == "ic" || token == "IC") return DiffusionModel::ic;
    if (token == "lt" || token == "LT") return DiffusionModel::lt;
    throw ConfigError("unknown diffusion model '" + std::string(token) + "' (want ic or lt)");
}

std::string_view model_name(DiffusionModel model) {
    return model == DiffusionModel::ic ? "ic" : "lt";
}

namespace {

void check_seeds(const Graph& g, std::span<const int> seeds) {
    for (int v : seeds)
        if (v < 0 || v >= g.num_nodes())
            throw LookupError("seed node index " + std::to_string(v) + " out of range");
}

// Reusable cascade state. Activation is epoch-stamped so starting a new
// simulation is O(1) instead of O(n); `acc` carries the LT in-weight sums
// and `thr` the lazily drawn LT thresholds, both valid only for the stamped
// epoch. Extending an existing cascade with more seeds is sound for both
// models: IC activation is reachability over a fixed live-edge set, and the
// LT fixpoint is the closure of a monotone operator, so arrival order
// cannot change the final set.
struct Scratch {
    std::vector<std::uint64_t> mark, acc_mark;
    std::vector<double> acc, thr;
    std::vector<int> queue;
    std::uint64_t epoch = 0;

    explicit Scratch(int n) : mark(n, 0), acc_mark(n, 0), acc(n, 0.0), thr(n, 0.0) {
        queue.reserve(n);
    }
    void begin() { ++epoch; }
    bool active(int v) const { return mark[v] == epoch; }
};

// Randomness policies. StreamRand derives every draw from a per-simulation
// stream by counter (edge id / node id), so a draw is addressable without
// materializing vectors; VectorRand serves caller-supplied draws.
struct StreamRand {
    std::uint64_t stream;
    double edge_coin(int e) const { return rng::unit_at(stream, static_cast<std::uint64_t>(e)); }
    double threshold(int x) const { return rng::unit_open_at(stream, static_cast<std::uint64_t>(x)); }
};

struct VectorRand {
    std::span<const double> coins;
    std::span<const double> thresholds;
    double edge_coin(int e) const { return coins[e]; }
    double threshold(int x) const { return thresholds[x]; }
};

// Activates v and propagates over live edges (coin < weight). Returns the
// number of newly activated nodes. Each node is expanded at most once per
// epoch, so repeated add() calls cost amortized O(nodes + edges) total.
template <class Rand>
int ic_add(const Graph& g, Scratch& s, const Rand& r, int v) {
    if (s.active(v)) return 0;
    int added = 1;
    s.mark[v] = s.epoch;
    auto& q = s.queue;
    q.clear();
    q.push_back(v);
    for (std::size_t qi = 0; qi < q.size(); ++qi) {
        for (const Graph::Arc& a : g.out(q[qi])) {
            if (s.mark[a.node] == s.epoch) continue;
            if (r.edge_coin(a.edge_id) < a.weight) {
                s.mark[a.node] = s.epoch;
                ++added;
                q.push_back(a.node);
            }
        }
    }
    return added;
}

// LT counterpart: inactive y accumulates the weights of its newly active
// in-neighbors and activates once the sum reaches its threshold.
template <class Rand>
int lt_add(const Graph& g, Scratch& s, const Rand& r, int v) {
    if (s.active(v)) return 0;
    int added = 1;
    s.mark[v] = s.epoch;
    auto& q = s.queue;
    q.clear();
    q.push_back(v);
    for (std::size_t qi = 0; qi < q.size(); ++qi) {
        for (const Graph::Arc& a : g.out(q[qi])) {
            int y = a.node;
            if (s.mark[y] == s.epoch) continue;
            if (s.acc_mark[y] != s.epoch) {
                s.acc_mark[y] = s.epoch;
                s.acc[y] = 0.0;
                s.thr[y] = r.threshold(y);
            }
            s.acc[y] += a.weight;
            if (s.acc[y] >= s.thr[y]) {
                s.mark[y] = s.epoch;
                ++added;
                q.push_back(y);
            }
        }
    }
    return added;
}

template <class Rand>
int cascade_add(const Graph& g, DiffusionModel model, Scratch& s, const Rand& r, int v) {
    return model == DiffusionModel::ic ? ic_add(g, s, r, v) : lt_add(g, s, r, v);
}

std::vector<int> collect_active(const Graph& g, const Scratch& s) {
    std::vector<int> out;
    for (int v = 0; v < g.num_nodes(); ++v)
        if (s.active(v)) out.push_back(v);
    return out;
}

std::uint64_t sim_stream(std::uint64_t base_seed, int i) {
    return rng::stream_seed(base_seed, rng::kTagSim, static_cast<std::uint64_t>(i));
}

double u128_to_double(unsigned __int128 x) { return static_cast<double>(x); }

}  // namespace

std::vector<int> simulate_ic(const Graph& g, std::span<const int> seeds,
                             std::span<const double> edge_coins) {
    check_seeds(g, seeds);
    if (static_cast<int>(edge_coins.size()) != g.num_edges())
        throw ConfigError("need one coin per directed edge: got " +
                          std::to_string(edge_coins.size()) + " for " +
                          std::to_string(g.num_edges()) + " edges");
    Scratch s(g.num_nodes());
    s.begin();
    VectorRand r{edge_coins, {}};
    for (int v : seeds) ic_add(g, s, r, v);
    return collect_active(g, s);
}

std::vector<int> simulate_lt(const Graph& g, std::span<const int> seeds,
                             std::span<const double> thresholds) {
    check_seeds(g, seeds);
    g.require_lt_valid();
    if (static_cast<int>(thresholds.size()) != g.num_nodes())
        throw ConfigError("need one threshold per node: got " +
                          std::to_string(thresholds.size()) + " for " +
                          std::to_string(g.num_nodes()) + " nodes");
    Scratch s(g.num_nodes());
    s.begin();
    VectorRand r{{}, thresholds};
    for (int v : seeds) lt_add(g, s, r, v);
    return collect_active(g, s);
}

SpreadEstimate estimate_spread(const Graph& g, DiffusionModel model,
                               std::span<const int> seeds, int num_sims,
                               std::uint64_t base_seed, int threads) {
    if (num_sims < 1) throw ConfigError("num_sims must be >= 1");
    check_seeds(g, seeds);
    if (model == DiffusionModel::lt) g.require_lt_valid();
    const int n = g.num_nodes();

    // Integer outcome sums: exact, so the reduction is independent of both
    // simulation order and thread partitioning.
    auto run_range = [&](int lo, int hi, std::uint64_t& s1, unsigned __int128& s2) {
        Scratch s(n);
        for (int i = lo; i < hi; ++i) {
            StreamRand r{sim_stream(base_seed, i)};
            s.begin();
            std::uint64_t count = 0;
            for (int v : seeds) count += cascade_add(g, model, s, r, v);
            s1 += count;
            s2 += static_cast<unsigned __int128>(count) * count;
        }
    };

    std::uint64_t s1 = 0;
    unsigned __int128 s2 = 0;
    if (threads < 1) threads = 1;
    if (threads == 1 || num_sims < 2 * threads) {
        run_range(0, num_sims, s1, s2);
    } else {
        std::vector<std::uint64_t> part1(threads, 0);
        std::vector<unsigned __int128> part2(threads, 0);
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            int lo = static_cast<int>(static_cast<std::int64_t>(num_sims) * t / threads);
            int hi = static_cast<int>(static_cast<std::int64_t>(num_sims) * (t + 1) / threads);
            pool.emplace_back([&, lo, hi, t] { run_range(lo, hi, part1[t], part2[t]); });
        }
        for (auto& th : pool) th.join();
        for (int t = 0; t < threads; ++t) {
            s1 += part1[t];
            s2 += part2[t];
        }
    }

    SpreadEstimate est;
    est.num_sims = num_sims;
    est.mean = static_cast<double>(s1) / num_sims;
    if (num_sims > 1) {
        // m*S2 - S1^2 is the exact (nonnegative) variance numerator.
        unsigned __int128 num = static_cast<unsigned __int128>(num_sims) * s2 -
                                static_cast<unsigned __int128>(s1) * s1;
        est.std_err = std::sqrt(u128_to_double(num) /
                                (static_cast<double>(num_sims) * num_sims * (num_sims - 1)));
    }
    return est;
}

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::uint64_t h = 0x632e8c5f12ab43cdULL;
        for (int x : v) h = rng::mix64(h + rng::kGamma * (static_cast<std::uint64_t>(x) + 1));
        return static_cast<std::size_t>(h);
    }
};

// Canonical per-coalition seed for the independent-streams mode: a pure
// function of (base_seed, sorted coalition).
std::uint64_t coalition_seed(std::uint64_t base_seed, std::span<const int> sorted) {
    std::uint64_t h = rng::mix64(base_seed ^ rng::kTagCoalition);
    for (int x : sorted) h = rng::mix64(h + rng::kGamma * (static_cast<std::uint64_t>(x) + 1));
    return h;
}

}  // namespace

struct ValuationOracle::State {
    const Graph* graph = nullptr;
    DiffusionModel model = DiffusionModel::ic;
    OracleOptions opts;
    int players = 0;
    std::function<double(std::span<const int>)> fn;

    std::mutex mu;
    std::unordered_map<std::vector<int>, double, VecHash> cache;
    std::atomic<std::uint64_t> calls{0}, sims{0}, hits{0};
};

ValuationOracle::ValuationOracle(const Graph& g, DiffusionModel model,
                                 const OracleOptions& opts)
    : state_(std::make_shared<State>()) {
    if (opts.num_sims < 1) throw ConfigError("num_sims must be >= 1");
    if (model == DiffusionModel::lt) g.require_lt_valid();
    state_->graph = &g;
    state_->model = model;
    state_->opts = opts;
    if (state_->opts.threads < 1) state_->opts.threads = 1;
    state_->players = g.num_nodes();
}

ValuationOracle::ValuationOracle(int num_players,
                                 std::function<double(std::span<const int>)> fn,
                                 bool memoize)
    : state_(std::make_shared<State>()) {
    if (num_players < 0) throw ConfigError("num_players must be >= 0");
    state_->players = num_players;
    state_->fn = std::move(fn);
    state_->opts.memoize = memoize;
}

double ValuationOracle::evaluate(std::span<const int> coalition) const {
    State& st = *state_;
    st.calls.fetch_add(1, std::memory_order_relaxed);

    std::vector<int> s(coalition.begin(), coalition.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int v : s)
        if (v < 0 || v >= st.players)
            throw LookupError("coalition member " + std::to_string(v) + " is not a player");
    if (s.empty()) return 0.0;  // nu(empty) = 0 by convention, no simulation

    if (st.opts.memoize) {
        std::lock_guard<std::mutex> lock(st.mu);
        auto it = st.cache.find(s);
        if (it != st.cache.end()) {
            st.hits.fetch_add(1, std::memory_order_relaxed);
            return it->second;
        }
    }

    double value;
    if (st.graph) {
        std::uint64_t seed = st.opts.independent_streams
                                 ? coalition_seed(st.opts.base_seed, s)
                                 : st.opts.base_seed;
        st.sims.fetch_add(st.opts.num_sims, std::memory_order_relaxed);
        value = estimate_spread(*st.graph, st.model, s, st.opts.num_sims, seed,
                                st.opts.threads)
                    .mean;
    } else {
        value = st.fn(s);
    }

    if (st.opts.memoize) {
        std::lock_guard<std::mutex> lock(st.mu);
        st.cache.emplace(std::move(s), value);
    }
    return value;
}

double ValuationOracle::evaluate(std::initializer_list<int> coalition) const {
    return evaluate(std::span<const int>(coalition.begin(), coalition.size()));
}

int ValuationOracle::num_players() const { return state_->players; }
const Graph* ValuationOracle::graph() const { return state_->graph; }
DiffusionModel ValuationOracle::model() const { return state_->model; }
int ValuationOracle::num_sims() const { return state_->opts.num_sims; }
std::uint64_t ValuationOracle::base_seed() const { return state_->opts.base_seed; }
bool ValuationOracle::common_random_numbers() const { return !state_->opts.independent_streams; }
int ValuationOracle::threads() const { return state_->opts.threads; }

OracleStats ValuationOracle::stats() const {
    return {state_->calls.load(), state_->sims.load(), state_->hits.load()};
}

void ValuationOracle::reset_stats() const {
    state_->calls = 0;
    state_->sims = 0;
    state_->hits = 0;
}

void ValuationOracle::charge(std::uint64_t calls, std::uint64_t sims) const {
    state_->calls.fetch_add(calls, std::memory_order_relaxed);
    state_->sims.fetch_add(sims, std::memory_order_relaxed);
}

ValuationOracle make_valuation(const Graph& g, DiffusionModel model, int num_sims,
                               std::uint64_t base_seed, bool memoize) {
    OracleOptions opts;
    opts.num_sims = num_sims;
    opts.base_seed = base_seed;
    opts.memoize = memoize;
    return ValuationOracle(g, model, opts);
}

MarginalStats sample_permutation_marginals(const ValuationOracle& nu,
                                           std::span<const int> prefix,
                                           std::span<const int> ground,
                                           int num_permutations,
                                           std::uint64_t perm_seed) {
    const Graph* gp = nu.graph();
    if (!gp) throw ConfigError("permutation sampler needs a diffusion-backed valuation");
    if (!nu.common_random_numbers())
        throw ConfigError("permutation sampler needs common random numbers");
    if (num_permutations < 1) throw ConfigError("num_permutations must be >= 1");
    const Graph& g = *gp;
    check_seeds(g, prefix);
    check_seeds(g, ground);

    const int n = g.num_nodes();
    const int r = static_cast<int>(ground.size());
    const int S = nu.num_sims();
    const int P = num_permutations;
    const std::uint64_t base = nu.base_seed();
    const DiffusionModel model = nu.model();

    std::vector<int> pos(n, -1);
    for (int i = 0; i < r; ++i) pos[ground[i]] = i;

    // gain_sum[q] = sum over permutations of the per-permutation integer
    // gain of ground[q]; gain_sq its squares. Exact integers, so the merge
    // across threads cannot depend on partitioning.
    std::vector<std::uint64_t> gain_sum(r, 0);
    std::vector<unsigned __int128> gain_sq(r, 0);

    auto run_range = [&](int lo, int hi, std::uint64_t* sum, unsigned __int128* sq) {
        Scratch s(n);
        std::vector<int> perm(ground.begin(), ground.end());
        std::vector<std::uint64_t> g_perm(r, 0);
        for (int t = lo; t < hi; ++t) {
            perm.assign(ground.begin(), ground.end());
            rng::SplitMix64 gen(
                rng::stream_seed(perm_seed, rng::kTagPerm, static_cast<std::uint64_t>(t)));
            rng::shuffle(perm, gen);
            for (int i = 0; i < S; ++i) {
                StreamRand rand{sim_stream(base, i)};
                s.begin();
                for (int v : prefix) cascade_add(g, model, s, rand, v);
                for (int x : perm)
                    g_perm[pos[x]] += static_cast<std::uint64_t>(cascade_add(g, model, s, rand, x));
            }
            for (int q = 0; q < r; ++q) {
                sum[q] += g_perm[q];
                sq[q] += static_cast<unsigned __int128>(g_perm[q]) * g_perm[q];
                g_perm[q] = 0;
            }
        }
    };

    int threads = nu.threads();
    if (threads <= 1 || P < 2 * threads) {
        run_range(0, P, gain_sum.data(), gain_sq.data());
    } else {
        std::vector<std::vector<std::uint64_t>> psum(threads, std::vector<std::uint64_t>(r, 0));
        std::vector<std::vector<unsigned __int128>> psq(threads,
                                                        std::vector<unsigned __int128>(r, 0));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            int lo = static_cast<int>(static_cast<std::int64_t>(P) * t / threads);
            int hi = static_cast<int>(static_cast<std::int64_t>(P) * (t + 1) / threads);
            pool.emplace_back(
                [&, lo, hi, t] { run_range(lo, hi, psum[t].data(), psq[t].data()); });
        }
        for (auto& th : pool) th.join();
        for (int t = 0; t < threads; ++t)
            for (int q = 0; q < r; ++q) {
                gain_sum[q] += psum[t][q];
                gain_sq[q] += psq[t][q];
            }
    }

    MarginalStats stats;
    stats.value.resize(r);
    stats.std_err.resize(r);
    const double denom = static_cast<double>(P) * S;
    for (int q = 0; q < r; ++q) {
        stats.value[q] = static_cast<double>(gain_sum[q]) / denom;
        if (P > 1) {
            unsigned __int128 num = static_cast<unsigned __int128>(P) * gain_sq[q] -
                                    static_cast<unsigned __int128>(gain_sum[q]) * gain_sum[q];
            stats.std_err[q] = std::sqrt(u128_to_double(num) / (P - 1)) / denom;
        }
    }

    // Charge the coalition evaluations this pass replaced (r telescoping
    // evaluations per permutation) and the simulations actually run.
    nu.charge(static_cast<std::uint64_t>(P) * r, static_cast<std::uint64_t>(P) * S);
    return stats;
}

}  // namespace critk
