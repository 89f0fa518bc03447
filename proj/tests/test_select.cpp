#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "critk/errors.hpp"
#include "critk/select.hpp"
#include "fixtures.hpp"

using namespace critk;

namespace {

Allocation alloc_of(std::vector<int> nodes, std::vector<double> values) {
    Allocation a;
    a.nodes = std::move(nodes);
    a.value = std::move(values);
    return a;
}

Ranking ranking_of(std::vector<int> order) {
    Ranking r;
    r.order = std::move(order);
    return r;
}

std::vector<int> chosen_names_to_ids(const Graph& g, std::initializer_list<const char*> names) {
    std::vector<int> out;
    for (const char* n : names) out.push_back(g.index_of(n));
    return out;
}

// Allocation with small integer values so rank ties are common.
Allocation noisy_alloc(const Graph& g, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    std::vector<int> nodes(static_cast<std::size_t>(g.num_nodes()));
    std::iota(nodes.begin(), nodes.end(), 0);
    std::vector<double> vals;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        vals.push_back(static_cast<double>(gen.next_below(4)));
    return alloc_of(std::move(nodes), std::move(vals));
}

}  // namespace

TEST_CASE("naive selection takes the ranking prefix") {
    const Selection s = select_naive(ranking_of({0, 2, 1}), 2);
    CHECK(s.chosen == std::vector<int>{0, 2});
    REQUIRE(s.audit.size() == 2);
    CHECK(s.audit[0].step == 1);
    CHECK(s.audit[0].node == 0);
    CHECK(s.audit[0].phase == Phase::primary);
    CHECK(s.audit[0].skipped.empty());
    CHECK(s.audit[1].node == 2);

    // Saturation: k beyond n returns everything.
    CHECK(select_naive(ranking_of({0, 2, 1}), 9).chosen == std::vector<int>{0, 2, 1});
    CHECK_THROWS_AS((void)select_naive(ranking_of({0}), 0), ConfigError);
}

TEST_CASE("eliminate-always on the star falls back after blocking every leaf") {
    // Ranking h, l1, l2, l3; every leaf neighbors h, so after h the pass
    // blocks all of them and the second slot is a fallback fill with l1.
    const Graph g = fx::star4();
    const Selection s = select_eliminate_always(g, ranking_of({0, 1, 2, 3}), 2);
    CHECK(s.chosen == chosen_names_to_ids(g, {"h", "l1"}));
    REQUIRE(s.audit.size() == 2);
    CHECK(s.audit[0].phase == Phase::primary);
    CHECK(s.audit[1].phase == Phase::fallback);
    REQUIRE(s.audit[1].skipped.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(s.audit[1].skipped[i].node == i + 1);
        CHECK(s.audit[1].skipped[i].blocker == 0);
        CHECK(s.audit[1].skipped[i].reason == "neighbor-chosen");
    }
}

TEST_CASE("eliminate-always on the path skips the middle node") {
    const Graph g = fx::path3();
    const Selection s = select_eliminate_always(g, ranking_of({0, 1, 2}), 2);
    CHECK(s.chosen == chosen_names_to_ids(g, {"a", "c"}));
    REQUIRE(s.audit.size() == 2);
    CHECK(s.audit[1].phase == Phase::primary);
    REQUIRE(s.audit[1].skipped.size() == 1);
    CHECK(s.audit[1].skipped[0].node == g.index_of("b"));
    CHECK(s.audit[1].skipped[0].blocker == g.index_of("a"));
}

TEST_CASE("eliminate-always without edges degenerates to naive") {
    const Graph g = fx::edgeless(5);
    const Selection s = select_eliminate_always(g, ranking_of({4, 2, 0, 1, 3}), 3);
    CHECK(s.chosen == std::vector<int>{4, 2, 0});
    for (const AuditStep& step : s.audit) {
        CHECK(step.phase == Phase::primary);
        CHECK(step.skipped.empty());
    }
}

TEST_CASE("threshold elimination blocks only above the bar") {
    const Graph g({"a", "b"}, {{0, 1, 0.3}});
    const Allocation alloc = alloc_of({0, 1}, {2.0, 1.0});
    const Ranking r = ranking_of({0, 1});

    // tau = 0.5: mutual weight 0.3 <= 0.5, b survives as a primary pick.
    Selection s = select_eliminate_threshold(g, r, 2, ThresholdSpec::fixed(0.5), alloc);
    CHECK(s.chosen == std::vector<int>{0, 1});
    CHECK(s.audit[1].phase == Phase::primary);

    // tau = 0.2: 0.3 > 0.2 blocks b; it returns as the fallback fill.
    s = select_eliminate_threshold(g, r, 2, ThresholdSpec::fixed(0.2), alloc);
    CHECK(s.chosen == std::vector<int>{0, 1});
    CHECK(s.audit[1].phase == Phase::fallback);
    REQUIRE(s.audit[1].skipped.size() == 1);
    CHECK(s.audit[1].skipped[0].reason == "weight-above-threshold");
    CHECK(s.audit[1].skipped[0].blocker == 0);
}

TEST_CASE("threshold tau=1 never blocks") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Graph g = erdos_renyi(20, 0.3, 0.2, 1.0, seed);
        const Allocation alloc = noisy_alloc(g, seed);
        const Ranking r = rank(alloc, seed);
        const Selection a = select_eliminate_threshold(g, r, 8, ThresholdSpec::fixed(1.0), alloc);
        const Selection b = select_naive(r, 8);
        CHECK(a.chosen == b.chosen);
        for (const AuditStep& step : a.audit) CHECK(step.phase == Phase::primary);
    }
}

TEST_CASE("value-scaled thresholds use the pick's share of the maximum") {
    // phi_h = 2 (the max), phi_l1 = 1; lambda = 0.5 gives threshold(h) = 0.5,
    // so the 0.9 edge blocks l1.
    const Graph g({"h", "l1"}, {{0, 1, 0.9}});
    const Allocation alloc = alloc_of({0, 1}, {2.0, 1.0});
    Selection s = select_eliminate_threshold(g, ranking_of({0, 1}), 2,
                                             ThresholdSpec::value_scaled(0.5), alloc);
    CHECK(s.audit[1].phase == Phase::fallback);

    // lambda = 2: threshold(h) = min(1, 2*2/2) = 1, nothing blocks.
    s = select_eliminate_threshold(g, ranking_of({0, 1}), 2,
                                   ThresholdSpec::value_scaled(2.0), alloc);
    CHECK(s.audit[1].phase == Phase::primary);

    // Non-positive maximum collapses every threshold to 0: any edge blocks.
    const Allocation flat = alloc_of({0, 1}, {0.0, -1.0});
    s = select_eliminate_threshold(g, ranking_of({0, 1}), 2,
                                   ThresholdSpec::value_scaled(0.5), flat);
    CHECK(s.audit[1].phase == Phase::fallback);
}

TEST_CASE("threshold parameter validation") {
    const Graph g = fx::path3();
    const Allocation alloc = alloc_of({0, 1, 2}, {3, 2, 1});
    CHECK_THROWS_AS((void)select_eliminate_threshold(g, ranking_of({0, 1, 2}), 1,
                                                     ThresholdSpec::fixed(1.5), alloc),
                    ConfigError);
    CHECK_THROWS_AS((void)select_eliminate_threshold(g, ranking_of({0, 1, 2}), 1,
                                                     ThresholdSpec::fixed(-0.1), alloc),
                    ConfigError);
    CHECK_THROWS_AS((void)select_eliminate_threshold(g, ranking_of({0, 1, 2}), 1,
                                                     ThresholdSpec::value_scaled(-1.0), alloc),
                    ConfigError);
}

TEST_CASE("local elimination blocks the strongest fraction of neighbors") {
    // h's neighbors by mutual weight: l1 (0.9), l2 (0.5), l3 (0.1).
    const Graph g = fx::star4(0.9, 0.5, 0.1);
    const Ranking r = ranking_of({0, 1, 2, 3});

    // fraction 0.5: ceil(0.5*3) = 2, l1 and l2 blocked, l3 picked.
    Selection s = select_eliminate_local(g, r, 2, 0.5);
    CHECK(s.chosen == chosen_names_to_ids(g, {"h", "l3"}));
    REQUIRE(s.audit[1].skipped.size() == 2);
    CHECK(s.audit[1].skipped[0].node == g.index_of("l1"));
    CHECK(s.audit[1].skipped[1].node == g.index_of("l2"));
    CHECK(s.audit[1].skipped[0].reason == "local-first-fraction");

    // fraction 1: everything blocked, fallback to the best-ranked leaf.
    s = select_eliminate_local(g, r, 2, 1.0);
    CHECK(s.chosen == chosen_names_to_ids(g, {"h", "l1"}));
    CHECK(s.audit[1].phase == Phase::fallback);

    // fraction 1/3: only l1 blocked.
    s = select_eliminate_local(g, r, 2, 1.0 / 3.0);
    CHECK(s.chosen == chosen_names_to_ids(g, {"h", "l2"}));
}

TEST_CASE("local elimination breaks weight ties by ascending index") {
    const Graph g = fx::star4(0.5, 0.5, 0.1);
    // One slot in the blocked zone: the tie between l1 and l2 resolves to l1.
    const Selection s = select_eliminate_local(g, ranking_of({0, 1, 2, 3}), 2, 1.0 / 3.0);
    CHECK(s.chosen == chosen_names_to_ids(g, {"h", "l2"}));
    REQUIRE(s.audit[1].skipped.size() == 1);
    CHECK(s.audit[1].skipped[0].node == g.index_of("l1"));
}

TEST_CASE("local elimination cutoff is robust to floating-point ceil") {
    // 100 neighbors, fraction 0.07: 0.07*100 rounds to 7.000000000000001,
    // which a bare ceil would turn into 8. The cutoff must stay 7.
    std::vector<std::string> names{"h"};
    std::vector<Graph::Edge> edges;
    for (int i = 1; i <= 100; ++i) {
        names.push_back("x" + std::to_string(i));
        edges.push_back({0, i, 1.0 - 0.005 * i});  // descending weights x1..x100
    }
    const Graph g(std::move(names), std::move(edges));
    std::vector<int> order(101);
    std::iota(order.begin(), order.end(), 0);
    const Selection s = select_eliminate_local(g, ranking_of(order), 2, 0.07);
    // h first; x1..x7 blocked (the strongest ceil(7) = 7); x8 next.
    CHECK(s.chosen[0] == 0);
    CHECK(s.chosen[1] == g.index_of("x8"));
}

TEST_CASE("local elimination without edges degenerates to naive") {
    const Graph g = fx::edgeless(4);
    const Selection s = select_eliminate_local(g, ranking_of({3, 1, 0, 2}), 4, 0.5);
    CHECK(s.chosen == std::vector<int>{3, 1, 0, 2});
    CHECK_THROWS_AS((void)select_eliminate_local(g, ranking_of({0, 1, 2, 3}), 2, 0.0),
                    ConfigError);
    CHECK_THROWS_AS((void)select_eliminate_local(g, ranking_of({0, 1, 2, 3}), 2, 1.2),
                    ConfigError);
}

TEST_CASE("multiplicative discounting compounds per chosen in-neighbor") {
    // y -> x (0.3) and z -> x (0.5); values pick y then z; phi_x goes
    // 10 -> 10*(1-0.3) = 7 -> 7*(1-0.5) = 3.5.
    const Graph g({"y", "z", "x"}, {{0, 2, 0.3}, {1, 2, 0.5}});
    const Allocation alloc = alloc_of({0, 1, 2}, {100.0, 50.0, 10.0});
    const Selection s = select_discount(g, alloc, 3, DiscountMethod::d1(), 1);
    CHECK(s.chosen == std::vector<int>{0, 1, 2});
    REQUIRE(s.audit[0].discounts.size() == 1);
    CHECK(s.audit[0].discounts[0].node == 2);
    CHECK(s.audit[0].discounts[0].old_value == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(s.audit[0].discounts[0].new_value == doctest::Approx(7.0).epsilon(1e-12));
    REQUIRE(s.audit[1].discounts.size() == 1);
    CHECK(s.audit[1].discounts[0].new_value == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(s.audit[0].has_value);
    CHECK(s.audit[0].value == 100.0);
}

TEST_CASE("accumulated discounting rescales the original value") {
    // Same layout, in-sum of x is 0.8 so the graph is LT-valid. After both
    // picks: phi_x = (1 - 0.8) * 10 = 2.
    const Graph g({"y", "z", "x"}, {{0, 2, 0.3}, {1, 2, 0.5}});
    const Allocation alloc = alloc_of({0, 1, 2}, {100.0, 50.0, 10.0});
    const Selection s = select_discount(g, alloc, 3, DiscountMethod::d2(), 1);
    CHECK(s.audit[0].discounts[0].new_value == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(s.audit[1].discounts[0].new_value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("accumulated discounting needs LT validity unless clamped") {
    // In-sum of x is 1.3: not LT-valid.
    const Graph g({"y", "z", "x"}, {{0, 2, 0.6}, {1, 2, 0.7}});
    const Allocation alloc = alloc_of({0, 1, 2}, {100.0, 50.0, 10.0});
    CHECK_THROWS_AS((void)select_discount(g, alloc, 3, DiscountMethod::d2(), 1), ModelError);
    // Clamp floors the factor at zero instead of going negative.
    const Selection s = select_discount(g, alloc, 3, DiscountMethod::d2(), 1, true);
    CHECK(s.audit[1].discounts[0].new_value == 0.0);
    // D1/D3 never need the LT property.
    CHECK_NOTHROW((void)select_discount(g, alloc, 3, DiscountMethod::d1(), 1));
    CHECK_NOTHROW((void)select_discount(g, alloc, 3, DiscountMethod::d3(), 1));
}

TEST_CASE("direction-swapped discounting subtracts and may go negative") {
    // Only edge: x -> y (0.4). Pick y first (value 30); x is its neighbor
    // through the reverse arc, beta_yx = 0, beta_xy = 0.4:
    // phi_x = 10 - 0.4*30 = -2.
    const Graph g({"y", "x"}, {{1, 0, 0.4}});
    const Allocation alloc = alloc_of({0, 1}, {30.0, 10.0});
    const Selection s = select_discount(g, alloc, 2, DiscountMethod::d3(), 1);
    CHECK(s.chosen == std::vector<int>{0, 1});
    REQUIRE(s.audit[0].discounts.size() == 1);
    CHECK(s.audit[0].discounts[0].new_value == doctest::Approx(-2.0).epsilon(1e-12));

    // D1 on the same layout: beta_yx = 0 leaves x untouched (recorded, same value).
    const Selection d1 = select_discount(g, alloc, 2, DiscountMethod::d1(), 1);
    CHECK(d1.audit[0].discounts[0].new_value == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("convex combination mixes the three rules") {
    const Graph g({"y", "z", "x"}, {{0, 2, 0.3}, {1, 2, 0.5}, {2, 0, 0.2}});
    const Allocation alloc = alloc_of({0, 1, 2}, {100.0, 50.0, 10.0});
    const DiscountMethod mix = DiscountMethod::combo(0.2, 0.3, 0.5);
    const Selection s = select_discount(g, alloc, 3, mix, 1);
    // Step 1 picks y (100): x is a neighbor (y->x 0.3, x->y 0.2).
    //   d1 = (1-0.3)*10 = 7; d2 = (1-0.3)*10 = 7; d3 = 10 - 0.2*100 = -10.
    const double step1 = 0.2 * 7.0 + 0.3 * 7.0 + 0.5 * (-10.0);
    CHECK(s.audit[0].discounts[0].new_value == doctest::Approx(step1).epsilon(1e-12));
    // Step 2 picks z (50): x via z->x 0.5, x->z 0.
    //   d1 = (1-0.5)*step1; d2 = (1-0.8)*10 = 2; d3 = step1 - 0*50 = step1.
    const double step2 = 0.2 * (0.5 * step1) + 0.3 * 2.0 + 0.5 * step1;
    CHECK(s.audit[1].discounts[0].new_value == doctest::Approx(step2).epsilon(1e-12));

    CHECK_THROWS_AS(DiscountMethod::combo(0.5, 0.2, 0.2).validate(), ConfigError);
    CHECK_THROWS_AS(DiscountMethod::combo(-0.2, 0.6, 0.6).validate(), ConfigError);
    CHECK_NOTHROW(DiscountMethod::combo(1.0, 0.0, 0.0).validate());
}

TEST_CASE("discount selections match the closed forms on random instances") {
    // For D1 the final value of an unchosen node x is
    // phi0_x * prod_{chosen y} (1 - beta_yx); for D2 it is
    // phi0_x * (1 - sum_{chosen y} beta_yx); for D3 it is
    // phi0_x - sum_{chosen y} beta_xy * value-at-pick(y).
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Graph g = erdos_renyi(12, 0.25, 0.02, 0.08, seed);  // low weights keep it LT-valid
        REQUIRE(g.lt_valid());
        Allocation alloc = noisy_alloc(g, seed * 3 + 1);
        for (double& v : alloc.value) v += 1.0;  // keep values positive
        for (const DiscountMethod& m :
             {DiscountMethod::d1(), DiscountMethod::d2(), DiscountMethod::d3()}) {
            const Selection s = select_discount(g, alloc, 6, m, seed);

            // Replay the audit: track each pick's value at pick time.
            std::vector<double> pick_value(static_cast<std::size_t>(g.num_nodes()), 0.0);
            for (const AuditStep& st : s.audit) pick_value[st.node] = st.value;

            // Final recorded value of each discounted node must match the
            // closed form over the picks that preceded its last update.
            std::vector<double> current(alloc.value);
            std::vector<bool> chosen(static_cast<std::size_t>(g.num_nodes()), false);
            for (const AuditStep& st : s.audit) {
                for (const DiscountRecord& d : st.discounts) {
                    CHECK_FALSE(chosen[d.node]);  // frozen picks are never updated
                    double expect = d.old_value;
                    const double byx = g.weight(st.node, d.node);
                    const double bxy = g.weight(d.node, st.node);
                    if (m.kind == DiscountMethod::Kind::d1) expect = (1.0 - byx) * d.old_value;
                    if (m.kind == DiscountMethod::Kind::d3)
                        expect = d.old_value - bxy * st.value;
                    if (m.kind == DiscountMethod::Kind::d2) {
                        double dsum = 0.0;
                        for (int y = 0; y < g.num_nodes(); ++y)
                            if (chosen[y]) dsum += g.weight(y, d.node);
                        dsum += byx;  // including the current pick
                        expect = (1.0 - dsum) * alloc.value_of(d.node);
                    }
                    CHECK(d.new_value == doctest::Approx(expect).epsilon(1e-12));
                    CHECK(d.old_value == doctest::Approx(current[d.node]).epsilon(1e-12));
                    current[d.node] = d.new_value;
                }
                chosen[st.node] = true;
                // Discounts only ever touch neighbors of the pick.
                const std::vector<int> nbrs = g.neighbors(st.node, Graph::NeighborMode::all);
                for (const DiscountRecord& d : st.discounts)
                    CHECK(std::count(nbrs.begin(), nbrs.end(), d.node) == 1);
            }
        }
    }
}

TEST_CASE("discounting on an edgeless graph reduces to naive selection") {
    const Graph g = fx::edgeless(8);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Allocation alloc = noisy_alloc(g, seed);
        const Ranking r = rank(alloc, seed);
        for (const DiscountMethod& m :
             {DiscountMethod::d1(), DiscountMethod::d2(), DiscountMethod::d3(),
              DiscountMethod::combo(0.4, 0.3, 0.3)}) {
            const Selection s = select_discount(g, alloc, 5, m, seed);
            CHECK(s.chosen == select_naive(r, 5).chosen);
            for (const AuditStep& st : s.audit) CHECK(st.discounts.empty());
        }
    }
}

TEST_CASE("all elimination and discount methods agree with naive on edgeless graphs") {
    const Graph g = fx::edgeless(10);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Allocation alloc = noisy_alloc(g, seed + 50);
        const Ranking r = rank(alloc, seed);
        const std::vector<int> expect = select_naive(r, 6).chosen;
        CHECK(select_eliminate_always(g, r, 6).chosen == expect);
        CHECK(select_eliminate_threshold(g, r, 6, ThresholdSpec::fixed(0.1), alloc).chosen ==
              expect);
        CHECK(select_eliminate_local(g, r, 6, 0.7).chosen == expect);
        CHECK(select_discount(g, alloc, 6, DiscountMethod::d2(), seed).chosen == expect);
    }
}

TEST_CASE("every selector returns min(k, n) distinct nodes, reproducibly") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Graph g = erdos_renyi(15, 0.2, 0.05, 0.06, seed);
        REQUIRE(g.lt_valid());
        const Allocation alloc = noisy_alloc(g, seed);
        const Ranking r = rank(alloc, seed);
        const int k = 20;  // beyond n: saturate at n
        const auto check_one = [&](const Selection& s) {
            CHECK(static_cast<int>(s.chosen.size()) == g.num_nodes());
            std::set<int> uniq(s.chosen.begin(), s.chosen.end());
            CHECK(uniq.size() == s.chosen.size());
            REQUIRE(s.audit.size() == s.chosen.size());
            for (std::size_t i = 0; i < s.chosen.size(); ++i) {
                CHECK(s.audit[i].node == s.chosen[i]);
                CHECK(s.audit[i].step == static_cast<int>(i) + 1);
            }
        };
        check_one(select_naive(r, k));
        check_one(select_eliminate_always(g, r, k));
        check_one(select_eliminate_threshold(g, r, k, ThresholdSpec::fixed(0.5), alloc));
        check_one(select_eliminate_local(g, r, k, 0.5));
        check_one(select_discount(g, alloc, k, DiscountMethod::d2(), seed));

        // Identical reruns.
        CHECK(select_eliminate_local(g, r, k, 0.5).chosen ==
              select_eliminate_local(g, r, k, 0.5).chosen);
        CHECK(select_discount(g, alloc, k, DiscountMethod::d1(), seed).chosen ==
              select_discount(g, alloc, k, DiscountMethod::d1(), seed).chosen);
    }
}

TEST_CASE("discounting resumes after frozen picks") {
    // Same D2 fixture, but y was already chosen elsewhere: its out-weight
    // joins the accumulated sum before any new pick.
    const Graph g({"y", "z", "x"}, {{0, 2, 0.3}, {1, 2, 0.5}});
    const Allocation tail = alloc_of({1, 2}, {50.0, 10.0});
    const std::vector<int> pre{0};
    const Selection s = select_discount_from(g, tail, pre, 2, DiscountMethod::d2(), 1);
    CHECK(s.chosen == std::vector<int>{1, 2});
    REQUIRE(s.audit[0].discounts.size() == 1);
    // After picking z: factor = 1 - (0.3 + 0.5) = 0.2 over the original 10.
    CHECK(s.audit[0].discounts[0].new_value == doctest::Approx(2.0).epsilon(1e-12));
    // Pre-chosen nodes are not candidates and not re-reported.
    for (const AuditStep& st : s.audit) CHECK(st.node != 0);
}

TEST_CASE("selector input validation") {
    const Graph g = fx::path3();
    const Allocation alloc = alloc_of({0, 1, 2}, {3, 2, 1});
    CHECK_THROWS_AS((void)select_discount(g, alloc, 0, DiscountMethod::d1(), 1), ConfigError);
    const Allocation bad = alloc_of({0, 9}, {1, 2});
    CHECK_THROWS_AS((void)select_discount(g, bad, 1, DiscountMethod::d1(), 1), LookupError);
    const Ranking bad_rank = ranking_of({0, 9});
    CHECK_THROWS_AS((void)select_eliminate_always(g, bad_rank, 1), LookupError);
}

TEST_CASE("phase names") {
    CHECK(phase_name(Phase::primary) == "primary");
    CHECK(phase_name(Phase::fallback) == "fallback");
}
