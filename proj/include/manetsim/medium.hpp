#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/messages.hpp"

#include <functional>
#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

namespace manetsim {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(Position a, Position b);

/// Where every node is at a given instant.
class PositionSource {
public:
    virtual ~PositionSource() = default;
    virtual std::size_t node_count() const = 0;
    virtual Position position_of(NodeId node, SimTime t) = 0;
};

class StaticPositions final : public PositionSource {
public:
    explicit StaticPositions(std::vector<Position> positions) : positions_(std::move(positions)) {}
    std::size_t node_count() const override { return positions_.size(); }
    Position position_of(NodeId node, SimTime) override { return positions_.at(node); }
    const std::vector<Position>& all() const { return positions_; }

private:
    std::vector<Position> positions_;
};

struct MediumConfig {
    double tx_range = 60.0;                          // meters
    SimTime per_hop_delay = SimTime::from_ms(2);
    double loss_probability = 0.0;

    void validate() const;
};

enum class TxOutcome { Scheduled, TxFailure };

/// Unit-disk wireless channel without contention.
///
/// Range checks use positions at transmission time. A delivery is
/// suppressed if, when it falls due, either endpoint has failed or the link
/// between them has been cut.
class Medium {
public:
    using ReceiveHandler = std::function<void(NodeId receiver, const Frame& frame)>;
    using LlnHook = std::function<void(NodeId lost_neighbor, const Frame& frame)>;
    using LostHandler = std::function<void(NodeId receiver, const Frame& frame)>;

    Medium(Simulator& sim, MediumConfig config, PositionSource& positions, std::uint64_t seed);

    const MediumConfig& config() const { return config_; }
    std::size_t node_count() const { return alive_.size(); }

    /// Alive nodes within range of `node` now, ascending ids. Empty for a failed node.
    std::vector<NodeId> neighbors_in_range(NodeId node);
    bool can_hear(NodeId a, NodeId b);

    /// Broadcast: one delivery per neighbor in range. Unicast: one delivery
    /// or TxFailure, which is also reported to the sender's LLN hook.
    TxOutcome transmit(Frame frame);

    void inject_node_failure(NodeId node, SimTime at);
    void inject_link_failure(LinkId link, SimTime at);
    bool alive(NodeId node) const { return alive_.at(node); }
    bool link_cut(LinkId link) const { return cut_links_.count(link) != 0; }

    void register_lln_hook(NodeId node, LlnHook hook);
    void set_receive_handler(ReceiveHandler h) { on_receive_ = std::move(h); }
    /// Unicast frames that were sent but never arrived.
    void set_lost_handler(LostHandler h) { on_lost_ = std::move(h); }

    std::uint64_t deliveries() const { return deliveries_; }
    std::uint64_t tx_failures() const { return tx_failures_; }

private:
    bool connected(NodeId a, NodeId b);
    void schedule_delivery(NodeId receiver, std::shared_ptr<const Frame> frame);
    bool lost_to_noise(NodeId sender);

    Simulator& sim_;
    MediumConfig config_;
    PositionSource& positions_;
    std::uint64_t seed_;
    std::vector<bool> alive_;
    std::set<LinkId> cut_links_;
    std::unordered_map<NodeId, LlnHook> lln_hooks_;
    std::unordered_map<NodeId, RngStream> loss_rng_;
    ReceiveHandler on_receive_;
    LostHandler on_lost_;
    std::uint64_t deliveries_ = 0;
    std::uint64_t tx_failures_ = 0;
};

} // namespace manetsim
