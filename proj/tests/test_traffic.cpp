#include "manetsim/traffic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <set>

using namespace manetsim;

namespace {

std::set<NodeId> neighbors(const DualChainLayout& l, NodeId n, double range)
{
    std::set<NodeId> out;
    for (NodeId m = 0; m < l.positions.size(); ++m) {
        if (m != n && distance(l.positions[n], l.positions[m]) <= range) {
            out.insert(m);
        }
    }
    return out;
}

// Counts node-disjoint source-destination paths by brute force over
// simple paths: the maximum set of pairwise internally disjoint paths.
std::size_t disjoint_path_count(const DualChainLayout& l, double range)
{
    const auto n = static_cast<NodeId>(l.positions.size());
    std::vector<std::vector<NodeId>> paths;
    std::vector<NodeId> cur{l.source};
    std::vector<bool> on(n, false);
    on[l.source] = true;
    std::function<void(NodeId)> dfs = [&](NodeId u) {
        if (u == l.destination) {
            paths.push_back(cur);
            return;
        }
        for (NodeId v : neighbors(l, u, range)) {
            if (!on[v]) {
                on[v] = true;
                cur.push_back(v);
                dfs(v);
                cur.pop_back();
                on[v] = false;
            }
        }
    };
    dfs(l.source);
    std::size_t best = 0;
    // Exhaustive over pairs and triples of simple paths.
    for (std::size_t i = 0; i < paths.size(); ++i) {
        best = std::max<std::size_t>(best, 1);
        for (std::size_t j = i + 1; j < paths.size(); ++j) {
            std::set<NodeId> a(paths[i].begin() + 1, paths[i].end() - 1);
            bool disjoint = true;
            for (std::size_t k = 1; k + 1 < paths[j].size(); ++k) {
                disjoint = disjoint && a.count(paths[j][k]) == 0;
            }
            if (disjoint) {
                best = std::max<std::size_t>(best, 2);
                for (std::size_t m = j + 1; m < paths.size(); ++m) {
                    std::set<NodeId> ab = a;
                    ab.insert(paths[j].begin() + 1, paths[j].end() - 1);
                    bool third = true;
                    for (std::size_t k = 1; k + 1 < paths[m].size(); ++k) {
                        third = third && ab.count(paths[m][k]) == 0;
                    }
                    if (third) {
                        best = 3;
                    }
                }
            }
        }
    }
    return best;
}

} // namespace

TEST(Cbr, IntervalFromBitRate)
{
    EXPECT_EQ(CbrFlow::interval_for_bit_rate(100000.0, 512), SimTime::from_us(40960));
    EXPECT_NEAR(1.0 / CbrFlow::interval_for_bit_rate(100000.0, 512).seconds(), 24.414, 0.001);
    EXPECT_THROW(CbrFlow::interval_for_bit_rate(0.0, 512), std::invalid_argument);
}

TEST(Cbr, IntervalFromPacketRate)
{
    EXPECT_EQ(CbrFlow::interval_for_packet_rate(10.0), SimTime::from_ms(100));
    EXPECT_THROW(CbrFlow::interval_for_packet_rate(-1.0), std::invalid_argument);
}

TEST(Cbr, Validation)
{
    CbrFlow f;
    f.source = 0;
    f.destination = 4;
    f.interval = SimTime::from_ms(100);
    f.start = seconds(10);
    f.stop = seconds(50);
    EXPECT_NO_THROW(f.validate(8));
    EXPECT_THROW(f.validate(4), std::invalid_argument);
    f.destination = 0;
    EXPECT_THROW(f.validate(8), std::invalid_argument);
}

TEST(DualChain, EightNodeAdjacency)
{
    const DualChainLayout l = dual_chain_layout(3);
    ASSERT_EQ(l.positions.size(), 8u);
    EXPECT_EQ(l.source, 0u);
    EXPECT_EQ(l.destination, 4u);
    EXPECT_EQ(l.upper, (std::vector<NodeId>{1, 2, 3}));
    EXPECT_EQ(l.lower, (std::vector<NodeId>{5, 6, 7}));
    EXPECT_EQ(neighbors(l, 2, 60.0), (std::set<NodeId>{1, 3}));
    EXPECT_EQ(neighbors(l, 0, 60.0), (std::set<NodeId>{1, 5}));
    EXPECT_EQ(neighbors(l, 4, 60.0), (std::set<NodeId>{3, 7}));
    EXPECT_NO_THROW(verify_adjacency(l, 60.0));
    for (const Position& p : l.positions) {
        EXPECT_GE(p.x, 0.0);
        EXPECT_LE(p.x, 150.0);
        EXPECT_GE(p.y, 0.0);
        EXPECT_LE(p.y, 150.0);
    }
}

TEST(DualChain, TwentyNodesTwoDisjointChains)
{
    const DualChainLayout l = dual_chain_layout(9);
    ASSERT_EQ(l.positions.size(), 20u);
    EXPECT_EQ(l.destination, 10u);
    EXPECT_NO_THROW(verify_adjacency(l, 60.0));
    EXPECT_EQ(l.intended_links().size(), 20u);
    EXPECT_EQ(disjoint_path_count(l, 60.0), 2u);
    EXPECT_EQ(disjoint_path_count(dual_chain_layout(3), 60.0), 2u);
}

TEST(DualChain, WrongRangeIsRejected)
{
    EXPECT_THROW(verify_adjacency(dual_chain_layout(3), 40.0), std::logic_error);
    EXPECT_THROW(verify_adjacency(dual_chain_layout(3), 90.0), std::logic_error);
    EXPECT_THROW(dual_chain_layout(0), std::invalid_argument);
}

TEST(Rwp, FixedSpeedIsExact)
{
    RwpConfig cfg;
    cfg.speed_min = cfg.speed_max = 1.0;
    RandomWaypoint rwp(1, cfg, 3);
    const Position a = rwp.position_of(0, SimTime::zero());
    // Along the first leg every 100 ms step covers exactly 0.1 m.
    Position prev = a;
    SimTime t;
    double travelled = 0.0;
    const SimTime step = SimTime::from_ms(100);
    Position dir{};
    bool have_dir = false;
    for (int i = 0; i < 20000; ++i) {
        t += step;
        const Position p = rwp.position_of(0, t);
        const double d = distance(prev, p);
        if (d == 0.0) {
            break;
        }
        const Position u{(p.x - prev.x) / d, (p.y - prev.y) / d};
        if (have_dir && std::hypot(u.x - dir.x, u.y - dir.y) > 1e-6) {
            break;
        }
        dir = u;
        have_dir = true;
        travelled += d;
        prev = p;
        EXPECT_NEAR(d, 0.1, 1e-6);
    }
    EXPECT_GT(travelled, 0.0);
}

TEST(Rwp, StaysInsideAreaWithBoundedSpeed)
{
    RwpConfig cfg;
    RandomWaypoint rwp(50, cfg, 9);
    double total = 0.0;
    const SimTime step = SimTime::from_ms(500);
    for (NodeId n = 0; n < 50; ++n) {
        Position prev = rwp.position_of(n, SimTime::zero());
        for (SimTime t = step; t <= seconds(200); t += step) {
            const Position p = rwp.position_of(n, t);
            ASSERT_GE(p.x, 0.0);
            ASSERT_LE(p.x, cfg.width);
            ASSERT_GE(p.y, 0.0);
            ASSERT_LE(p.y, cfg.height);
            const double v = distance(prev, p) / step.seconds();
            ASSERT_LE(v, cfg.speed_max + 1e-6);
            total += distance(prev, p);
            prev = p;
        }
    }
    const double mean_speed = total / (50 * 200.0);
    EXPECT_GE(mean_speed, cfg.speed_min * 0.9);
    EXPECT_LE(mean_speed, cfg.speed_max);
}

TEST(Rwp, QueryOrderDoesNotMatter)
{
    RandomWaypoint a(3, {}, 5);
    RandomWaypoint b(3, {}, 5);
    const Position late = a.position_of(2, seconds(150));
    a.position_of(0, seconds(10));
    b.position_of(0, seconds(10));
    b.position_of(1, seconds(90));
    const Position late_b = b.position_of(2, seconds(150));
    EXPECT_EQ(late.x, late_b.x);
    EXPECT_EQ(late.y, late_b.y);
    const Position early = a.position_of(2, seconds(3));
    const Position early_b = b.position_of(2, seconds(3));
    EXPECT_EQ(early.x, early_b.x);
}

TEST(Rwp, PauseHoldsPosition)
{
    RwpConfig cfg;
    cfg.speed_min = cfg.speed_max = 10.0;
    cfg.pause = seconds(5);
    RandomWaypoint rwp(1, cfg, 4);
    EXPECT_EQ(rwp.position_of(0, seconds(4)).x, rwp.position_of(0, SimTime::zero()).x);
}

TEST(Rwp, ConfigValidation)
{
    RwpConfig cfg;
    cfg.speed_min = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.speed_max = 0.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(FlowPairs, DistinctAndValid)
{
    RngStream rng(1, 0, RngPurpose::Traffic);
    const auto pairs = random_flow_pairs(50, 10, rng);
    ASSERT_EQ(pairs.size(), 10u);
    std::set<std::pair<NodeId, NodeId>> seen(pairs.begin(), pairs.end());
    EXPECT_EQ(seen.size(), 10u);
    for (auto [s, d] : pairs) {
        EXPECT_NE(s, d);
        EXPECT_LT(s, 50u);
        EXPECT_LT(d, 50u);
    }
    RngStream small(1, 0, RngPurpose::Traffic);
    EXPECT_EQ(random_flow_pairs(2, 2, small).size(), 2u);
    EXPECT_THROW(random_flow_pairs(2, 3, small), std::invalid_argument);
}
