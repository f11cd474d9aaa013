#include "manetsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace manetsim {

SimTime CbrFlow::interval_for_bit_rate(double bits_per_second, std::uint32_t packet_size)
{
    if (!(bits_per_second > 0.0) || packet_size == 0) {
        throw std::invalid_argument("cbr: bit rate and packet size must be positive");
    }
    return SimTime::from_seconds(packet_size * 8.0 / bits_per_second);
}

SimTime CbrFlow::interval_for_packet_rate(double packets_per_second)
{
    if (!(packets_per_second > 0.0)) {
        throw std::invalid_argument("cbr: packet rate must be positive");
    }
    return SimTime::from_seconds(1.0 / packets_per_second);
}

void CbrFlow::validate(std::size_t node_count) const
{
    if (source >= node_count || destination >= node_count || source == destination) {
        throw std::invalid_argument("cbr: bad endpoints for flow " + std::to_string(id));
    }
    if (interval <= SimTime::zero()) {
        throw std::invalid_argument("cbr: interval must be positive");
    }
    if (stop < start) {
        throw std::invalid_argument("cbr: stop before start");
    }
}

std::vector<LinkId> DualChainLayout::intended_links() const
{
    std::vector<LinkId> out;
    for (const auto* chain : {&upper, &lower}) {
        NodeId prev = source;
        for (NodeId n : *chain) {
            out.push_back(LinkId::of(prev, n));
            prev = n;
        }
        out.push_back(LinkId::of(prev, destination));
    }
    std::sort(out.begin(), out.end());
    return out;
}

DualChainLayout dual_chain_layout(std::size_t per_chain, double spacing)
{
    if (per_chain == 0) {
        throw std::invalid_argument("dual chain needs at least one node per chain");
    }
    DualChainLayout l;
    l.per_chain = per_chain;
    const auto p = static_cast<NodeId>(per_chain);
    l.source = 0;
    l.destination = p + 1;
    l.positions.resize(2 * per_chain + 2);
    const double dx = spacing / 2.0;
    const double dy = spacing * std::sqrt(3.0) / 2.0;
    const double y0 = 75.0;
    l.positions[l.source] = {0.0, y0};
    for (NodeId j = 1; j <= p; ++j) {
        const double x = dx + spacing * (j - 1);
        l.upper.push_back(j);
        l.positions[j] = {x, y0 + dy};
        l.lower.push_back(p + 1 + j);
        l.positions[p + 1 + j] = {x, y0 - dy};
    }
    l.positions[l.destination] = {2 * dx + spacing * (p - 1), y0};
    return l;
}

void verify_adjacency(const DualChainLayout& layout, double range)
{
    const auto want = layout.intended_links();
    std::vector<LinkId> have;
    const auto n = static_cast<NodeId>(layout.positions.size());
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            if (distance(layout.positions[a], layout.positions[b]) <= range) {
                have.push_back({a, b});
            }
        }
    }
    if (have != want) {
        throw std::logic_error("dual chain layout does not match its intended adjacency at range " +
                               std::to_string(range));
    }
}

void RwpConfig::validate() const
{
    if (!(width > 0.0) || !(height > 0.0)) {
        throw std::invalid_argument("rwp: area must be positive");
    }
    if (!(speed_min > 0.0) || speed_max < speed_min) {
        throw std::invalid_argument("rwp: need 0 < speed_min <= speed_max");
    }
    if (pause < SimTime::zero()) {
        throw std::invalid_argument("rwp: pause must be >= 0");
    }
}

RandomWaypoint::RandomWaypoint(std::size_t node_count, RwpConfig config, std::uint64_t seed) : config_(config)
{
    config_.validate();
    nodes_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        Track tr{RngStream(seed, i, RngPurpose::Mobility), {}};
        const Position start{tr.rng.uniform(0.0, config_.width), tr.rng.uniform(0.0, config_.height)};
        // A zero-length leg anchors the initial position at t = 0.
        tr.legs.push_back({start, start, SimTime::zero(), SimTime::zero()});
        nodes_.push_back(std::move(tr));
    }
}

void RandomWaypoint::extend(Track& tr)
{
    const Leg& last = tr.legs.back();
    const Position to{tr.rng.uniform(0.0, config_.width), tr.rng.uniform(0.0, config_.height)};
    const double speed = tr.rng.uniform(config_.speed_min, config_.speed_max);
    const SimTime depart = last.arrive + config_.pause;
    const SimTime travel = SimTime::from_us(std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(distance(last.to, to) / speed * 1e6))));
    tr.legs.push_back({last.to, to, depart, depart + travel});
}

Position RandomWaypoint::position_of(NodeId node, SimTime t)
{
    Track& tr = nodes_.at(node);
    while (tr.legs.back().arrive < t) {
        extend(tr);
    }
    auto it = std::lower_bound(tr.legs.begin(), tr.legs.end(), t,
                               [](const Leg& leg, SimTime when) { return leg.arrive < when; });
    const Leg& leg = *it;
    if (t <= leg.depart) {
        return leg.from;
    }
    const double f = static_cast<double>((t - leg.depart).us()) / static_cast<double>((leg.arrive - leg.depart).us());
    return {leg.from.x + f * (leg.to.x - leg.from.x), leg.from.y + f * (leg.to.y - leg.from.y)};
}

std::vector<std::pair<NodeId, NodeId>> random_flow_pairs(std::size_t node_count, std::size_t count, RngStream& rng)
{
    if (node_count < 2 || count > node_count * (node_count - 1)) {
        throw std::invalid_argument("cannot draw that many distinct flow pairs");
    }
    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<std::pair<NodeId, NodeId>> out;
    while (out.size() < count) {
        const auto s = static_cast<NodeId>(rng.below(node_count));
        const auto d = static_cast<NodeId>(rng.below(node_count));
        if (s != d && seen.insert({s, d}).second) {
            out.emplace_back(s, d);
        }
    }
    return out;
}

} // namespace manetsim
