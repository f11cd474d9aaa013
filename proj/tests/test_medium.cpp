#include "manetsim/medium.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace manetsim;

namespace {

struct Bench {
    explicit Bench(std::vector<Position> pos, MediumConfig cfg = {})
        : positions(std::move(pos)), medium(sim, cfg, positions, 1)
    {
        medium.set_receive_handler([this](NodeId r, const Frame& f) { rx.push_back({sim.now(), r, f.sender}); });
        medium.set_lost_handler([this](NodeId r, const Frame&) { lost.push_back(r); });
    }

    Frame frame(NodeId from, NodeId to = kNoNode)
    {
        Frame f;
        f.sender = from;
        f.receiver = to;
        f.payload = std::make_shared<const Message>(HelloMessage{from, {}});
        return f;
    }

    struct Rx {
        SimTime at;
        NodeId receiver;
        NodeId sender;
    };
    Simulator sim;
    StaticPositions positions;
    Medium medium;
    std::vector<Rx> rx;
    std::vector<NodeId> lost;
};

// 0 -- 1 -- 2 on a line, 50 m apart, range 60.
std::vector<Position> line3() { return {{0, 0}, {50, 0}, {100, 0}}; }

} // namespace

TEST(Medium, RangeIsInclusive)
{
    MediumConfig cfg;
    cfg.tx_range = 50.0;
    Bench b(line3(), cfg);
    EXPECT_TRUE(b.medium.can_hear(0, 1));
    EXPECT_FALSE(b.medium.can_hear(0, 2));
    EXPECT_FALSE(b.medium.can_hear(1, 1));
}

TEST(Medium, BroadcastReachesEveryNeighborAfterOneHopDelay)
{
    Bench b(line3());
    EXPECT_EQ(b.medium.neighbors_in_range(1), (std::vector<NodeId>{0, 2}));
    EXPECT_EQ(b.medium.transmit(b.frame(1)), TxOutcome::Scheduled);
    b.sim.run_until(seconds(1));
    ASSERT_EQ(b.rx.size(), 2u);
    for (const auto& r : b.rx) {
        EXPECT_EQ(r.at, SimTime::from_ms(2));
        EXPECT_EQ(r.sender, 1u);
    }
    EXPECT_EQ(b.medium.deliveries(), 2u);
}

TEST(Medium, UnicastInRangeDeliversExactlyOnce)
{
    Bench b(line3());
    EXPECT_EQ(b.medium.transmit(b.frame(0, 1)), TxOutcome::Scheduled);
    b.sim.run_until(seconds(1));
    ASSERT_EQ(b.rx.size(), 1u);
    EXPECT_EQ(b.rx[0].receiver, 1u);
    EXPECT_EQ(b.rx[0].at, SimTime::from_ms(2));
}

TEST(Medium, UnicastOutOfRangeFailsAndNotifiesSender)
{
    Bench b(line3());
    std::vector<NodeId> lln;
    b.medium.register_lln_hook(0, [&lln](NodeId n, const Frame&) { lln.push_back(n); });
    EXPECT_EQ(b.medium.transmit(b.frame(0, 2)), TxOutcome::TxFailure);
    EXPECT_EQ(lln, (std::vector<NodeId>{2}));
    EXPECT_EQ(b.medium.tx_failures(), 1u);
    b.sim.run_until(seconds(1));
    EXPECT_TRUE(b.rx.empty());
}

TEST(Medium, BroadcastNeverTriggersLln)
{
    Bench b(line3());
    int lln = 0;
    b.medium.register_lln_hook(0, [&lln](NodeId, const Frame&) { ++lln; });
    b.medium.inject_node_failure(1, seconds(0.5));
    b.sim.run_until(seconds(1));
    b.medium.transmit(b.frame(0));
    b.sim.run_until(seconds(2));
    EXPECT_EQ(lln, 0);
    EXPECT_TRUE(b.rx.empty());
}

TEST(Medium, NodeFailureCausesTxFailure)
{
    Bench b(line3());
    std::vector<NodeId> lln;
    b.medium.register_lln_hook(1, [&lln](NodeId n, const Frame&) { lln.push_back(n); });
    b.medium.inject_node_failure(2, seconds(1));
    b.sim.run_until(seconds(1));
    EXPECT_FALSE(b.medium.alive(2));
    EXPECT_EQ(b.medium.transmit(b.frame(1, 2)), TxOutcome::TxFailure);
    EXPECT_EQ(lln, (std::vector<NodeId>{2}));
    EXPECT_TRUE(b.medium.neighbors_in_range(2).empty());
    EXPECT_THROW(b.medium.transmit(b.frame(2, 1)), std::logic_error);
}

TEST(Medium, LinkCutIsSymmetricAndLeavesOtherLinks)
{
    Bench b(line3());
    b.medium.inject_link_failure(LinkId::of(2, 1), seconds(1));
    b.sim.run_until(seconds(1));
    EXPECT_TRUE(b.medium.link_cut(LinkId::of(1, 2)));
    EXPECT_FALSE(b.medium.can_hear(1, 2));
    EXPECT_FALSE(b.medium.can_hear(2, 1));
    EXPECT_TRUE(b.medium.can_hear(0, 1));
}

TEST(Medium, InFlightUnicastIsLostWhenLinkDiesBeforeArrival)
{
    Bench b(line3());
    b.medium.transmit(b.frame(0, 1));
    b.medium.inject_link_failure(LinkId::of(0, 1), SimTime::from_ms(1));
    b.sim.run_until(seconds(1));
    EXPECT_TRUE(b.rx.empty());
    EXPECT_EQ(b.lost, (std::vector<NodeId>{1}));
}

TEST(Medium, LossProbabilityOneDropsEverything)
{
    MediumConfig cfg;
    cfg.loss_probability = 1.0;
    Bench b(line3(), cfg);
    b.medium.transmit(b.frame(1));
    EXPECT_EQ(b.medium.transmit(b.frame(0, 1)), TxOutcome::Scheduled);
    b.sim.run_until(seconds(1));
    EXPECT_TRUE(b.rx.empty());
    EXPECT_EQ(b.lost, (std::vector<NodeId>{1}));
}

TEST(Medium, LossRateMatchesProbability)
{
    MediumConfig cfg;
    cfg.loss_probability = 0.3;
    Bench b(line3(), cfg);
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        b.medium.transmit(b.frame(0, 1));
    }
    b.sim.run_until(seconds(1));
    EXPECT_NEAR(static_cast<double>(b.lost.size()) / n, 0.3, 0.015);
    EXPECT_EQ(b.rx.size() + b.lost.size(), static_cast<std::size_t>(n));
}

TEST(Medium, ConfigValidation)
{
    MediumConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.tx_range = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.loss_probability = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.per_hop_delay = SimTime::zero();
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
