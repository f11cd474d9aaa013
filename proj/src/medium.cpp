#include "manetsim/medium.hpp"

#include <cmath>
#include <stdexcept>

namespace manetsim {

double distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

void MediumConfig::validate() const
{
    if (!(tx_range > 0.0)) {
        throw std::invalid_argument("medium: tx_range must be > 0");
    }
    if (per_hop_delay <= SimTime::zero()) {
        throw std::invalid_argument("medium: per_hop_delay must be > 0");
    }
    if (!(loss_probability >= 0.0 && loss_probability <= 1.0)) {
        throw std::invalid_argument("medium: loss_probability must lie in [0,1]");
    }
}

Medium::Medium(Simulator& sim, MediumConfig config, PositionSource& positions, std::uint64_t seed)
    : sim_(sim), config_(config), positions_(positions), seed_(seed), alive_(positions.node_count(), true)
{
    config_.validate();
}

bool Medium::connected(NodeId a, NodeId b)
{
    if (a == b || !alive_[a] || !alive_[b] || link_cut(LinkId::of(a, b))) {
        return false;
    }
    const SimTime now = sim_.now();
    return distance(positions_.position_of(a, now), positions_.position_of(b, now)) <= config_.tx_range;
}

bool Medium::can_hear(NodeId a, NodeId b)
{
    return connected(a, b);
}

std::vector<NodeId> Medium::neighbors_in_range(NodeId node)
{
    std::vector<NodeId> out;
    if (!alive_.at(node)) {
        return out;
    }
    for (NodeId other = 0; other < alive_.size(); ++other) {
        if (connected(node, other)) {
            out.push_back(other);
        }
    }
    return out;
}

bool Medium::lost_to_noise(NodeId sender)
{
    if (config_.loss_probability <= 0.0) {
        return false;
    }
    auto it = loss_rng_.find(sender);
    if (it == loss_rng_.end()) {
        it = loss_rng_.emplace(sender, RngStream(seed_, sender, RngPurpose::Medium)).first;
    }
    return it->second.uniform01() < config_.loss_probability;
}

void Medium::schedule_delivery(NodeId receiver, std::shared_ptr<const Frame> shared)
{
    const NodeId sender = shared->sender;
    sim_.schedule_in(config_.per_hop_delay, EventKind::FrameDelivery, receiver, {"rx", sender},
                     [this, receiver, shared = std::move(shared)] {
                         const Frame& frame = *shared;
                         const bool ok = alive_[receiver] && alive_[frame.sender] &&
                                         !link_cut(LinkId::of(receiver, frame.sender));
                         if (!ok) {
                             if (!frame.broadcast() && on_lost_) {
                                 on_lost_(receiver, frame);
                             }
                             return;
                         }
                         ++deliveries_;
                         if (on_receive_) {
                             on_receive_(receiver, frame);
                         }
                     });
}

TxOutcome Medium::transmit(Frame frame)
{
    if (!alive_.at(frame.sender)) {
        throw std::logic_error("Medium::transmit: sender has failed");
    }
    if (frame.broadcast()) {
        auto shared = std::make_shared<const Frame>(std::move(frame));
        for (NodeId n : neighbors_in_range(shared->sender)) {
            if (!lost_to_noise(shared->sender)) {
                schedule_delivery(n, shared);
            }
        }
        return TxOutcome::Scheduled;
    }
    if (!connected(frame.sender, frame.receiver)) {
        ++tx_failures_;
        auto it = lln_hooks_.find(frame.sender);
        if (it != lln_hooks_.end()) {
            it->second(frame.receiver, frame);
        }
        return TxOutcome::TxFailure;
    }
    if (lost_to_noise(frame.sender)) {
        if (on_lost_) {
            on_lost_(frame.receiver, frame);
        }
        return TxOutcome::Scheduled;
    }
    const NodeId receiver = frame.receiver;
    schedule_delivery(receiver, std::make_shared<const Frame>(std::move(frame)));
    return TxOutcome::Scheduled;
}

void Medium::inject_node_failure(NodeId node, SimTime at)
{
    sim_.schedule(at, EventKind::NodeFailure, node, {"node-down"}, [this, node] { alive_.at(node) = false; });
}

void Medium::inject_link_failure(LinkId link, SimTime at)
{
    sim_.schedule(at, EventKind::NodeFailure, link.a, {"link-down", link.b}, [this, link] { cut_links_.insert(link); });
}

void Medium::register_lln_hook(NodeId node, LlnHook hook)
{
    lln_hooks_[node] = std::move(hook);
}

} // namespace manetsim
