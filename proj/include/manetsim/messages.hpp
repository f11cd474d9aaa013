#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace manetsim {

/// An undirected radio link, stored with a <= b.
struct LinkId {
    NodeId a = kNoNode;
    NodeId b = kNoNode;

    static LinkId of(NodeId x, NodeId y) { return x < y ? LinkId{x, y} : LinkId{y, x}; }
    bool touches(NodeId n) const { return a == n || b == n; }
    auto operator<=>(const LinkId&) const = default;
};

enum class LinkStatus : std::uint8_t { Asym, Sym, Mpr };

struct HelloEntry {
    NodeId neighbor;
    LinkStatus status;
};

struct HelloMessage {
    NodeId originator = kNoNode;
    std::vector<HelloEntry> entries;
};

struct TcMessage {
    NodeId originator = kNoNode;
    std::uint32_t msg_seq = 0;
    std::uint32_t ansn = 0;
    std::vector<NodeId> advertised;
    std::uint8_t ttl = 255;
    std::uint8_t hop_count = 0;
    bool fast = false;
};

/// Ordered node list from source to destination; `cursor` indexes the node
/// currently holding the packet.
struct SourceRoute {
    std::vector<NodeId> hops;
    std::size_t cursor = 0;

    NodeId current() const { return hops.at(cursor); }
    bool at_end() const { return cursor + 1 >= hops.size(); }
    NodeId next() const { return hops.at(cursor + 1); }
    bool traverses(LinkId link) const;
    bool contains(NodeId n) const;
};

struct DataPacket {
    std::uint64_t id = 0;
    std::uint32_t flow = 0;
    NodeId source = kNoNode;
    NodeId destination = kNoNode;
    SimTime emit_time;
    std::uint32_t size = 512;
    std::optional<SourceRoute> route;  // source-routed protocols only
    std::vector<NodeId> traversed;     // every node that has held the packet
    std::uint8_t ttl = 64;
    std::uint8_t reemissions = 0;
};

/// Failure notice sent back toward a traffic source.
struct RerrNotif {
    LinkId broken_link;
    NodeId detector = kNoNode;
    NodeId target_source = kNoNode;
    /// Detector's ANSN once the lost neighbor left its selector set; TCs
    /// from the detector older than this are stale.
    std::uint32_t detector_ansn = 0;
    std::vector<NodeId> reverse_route;  // detector .. source; empty when routed hop by hop
    std::size_t cursor = 0;
};

/// Data packet carried back to its source together with the link removals
/// the detector observed.
struct DrEnvelope {
    DataPacket original;
    std::vector<LinkId> embedded_topology;
    std::vector<NodeId> reverse_route;  // detector .. source
    std::size_t cursor = 0;
    bool reverse_leg = true;
};

using Message = std::variant<HelloMessage, TcMessage, RerrNotif, DataPacket, DrEnvelope>;

struct Frame {
    NodeId sender = kNoNode;
    NodeId receiver = kNoNode;  // kNoNode for broadcast
    std::shared_ptr<const Message> payload;
    std::uint32_t size = 0;

    bool broadcast() const { return receiver == kNoNode; }
};

std::uint32_t wire_size(const Message& m);

} // namespace manetsim
