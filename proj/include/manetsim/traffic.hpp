#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/medium.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace manetsim {

/// Constant-bit-rate flow. Packets are emitted at start, start + interval,
/// ... while the emission time is strictly before stop.
struct CbrFlow {
    std::uint32_t id = 0;
    NodeId source = kNoNode;
    NodeId destination = kNoNode;
    SimTime interval;
    std::uint32_t packet_size = 512;
    SimTime start;
    SimTime stop;

    static SimTime interval_for_bit_rate(double bits_per_second, std::uint32_t packet_size);
    static SimTime interval_for_packet_rate(double packets_per_second);
    void validate(std::size_t node_count) const;
};

/// Two parallel chains of `p` intermediate nodes between one source and one
/// destination.
///
/// Ids: source 0, upper chain 1..p, destination p+1, lower chain p+2..2p+1.
struct DualChainLayout {
    std::size_t per_chain = 0;
    NodeId source = 0;
    NodeId destination = 0;
    std::vector<NodeId> upper;
    std::vector<NodeId> lower;
    std::vector<Position> positions;

    /// Undirected links the layout is meant to have.
    std::vector<LinkId> intended_links() const;
};

/// Consecutive nodes are `spacing` apart; the two chains are far enough
/// apart that no cross-chain link exists for the given range.
DualChainLayout dual_chain_layout(std::size_t per_chain, double spacing = 50.0);

/// Throws std::logic_error unless unit-disk adjacency at `range` equals
/// the intended links exactly.
void verify_adjacency(const DualChainLayout& layout, double range);

struct RwpConfig {
    double width = 1000.0;
    double height = 1000.0;
    double speed_min = 1.0;  // m/s
    double speed_max = 10.0;
    SimTime pause = SimTime::zero();

    void validate() const;
};

/// Random waypoint mobility. Legs are drawn lazily, per node, from a stream
/// of their own, so positions do not depend on query order.
class RandomWaypoint final : public PositionSource {
public:
    RandomWaypoint(std::size_t node_count, RwpConfig config, std::uint64_t seed);

    std::size_t node_count() const override { return nodes_.size(); }
    Position position_of(NodeId node, SimTime t) override;

private:
    struct Leg {
        Position from;
        Position to;
        SimTime depart;  // movement starts after the pause
        SimTime arrive;
    };
    struct Track {
        RngStream rng;
        std::vector<Leg> legs;
    };
    void extend(Track& tr);

    RwpConfig config_;
    std::vector<Track> nodes_;
};

/// `count` distinct ordered (source, destination) pairs, source != destination.
std::vector<std::pair<NodeId, NodeId>> random_flow_pairs(std::size_t node_count, std::size_t count, RngStream& rng);

} // namespace manetsim
