#include "manetsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace manetsim {

AnalyticBounds analytic_bounds(const ProtocolConfig& cfg)
{
    cfg.validate();
    const double hello = cfg.hello_interval.seconds();
    const double tc = cfg.tc_interval.seconds();
    const double hold = cfg.neighb_hold_time.seconds();
    const double jitter = cfg.max_jitter.seconds();
    return {{hold - hello, hold + tc + jitter}, {2.0 * tc, 3.0 * tc}};
}

bool FailureElement::blocks(NodeId at, NodeId next) const
{
    if (node != kNoNode) {
        return next == node || at == node;
    }
    return LinkId::of(at, next) == link;
}

bool FailureElement::on_path(const std::vector<NodeId>& path) const
{
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (node != kNoNode && path[i] == node) {
            return true;
        }
        if (node == kNoNode && i + 1 < path.size() && LinkId::of(path[i], path[i + 1]) == link) {
            return true;
        }
    }
    return false;
}

std::optional<double> LatencyRecord::delta() const
{
    if (!t_d || !t_r) {
        return std::nullopt;
    }
    return std::fabs((*t_r - *t_d).seconds());
}

std::optional<double> latency(const LatencyRecord& r)
{
    return r.delta();
}

Ratio packet_loss_rate(const MetricsRecord& m)
{
    if (m.data_generated == 0) {
        return {0.0, false};
    }
    return {100.0 * static_cast<double>(m.data_dropped) / static_cast<double>(m.data_generated), true};
}

Ratio routing_load(const MetricsRecord& m)
{
    const auto denom = m.n_cm + m.data_delivered;
    if (denom == 0) {
        return {0.0, false};
    }
    return {100.0 * static_cast<double>(m.n_cm) / static_cast<double>(denom), true};
}

Ratio avg_e2e_delay(const MetricsRecord& m)
{
    if (m.data_delivered == 0) {
        return {0.0, false};
    }
    return {m.delay_sum / static_cast<double>(m.data_delivered), true};
}

std::size_t MetricsCollector::register_failure(FailureElement element, SimTime t_f)
{
    failures_.push_back({element, t_f, std::nullopt});
    return failures_.size() - 1;
}

void MetricsCollector::on_generated(const DataPacket& p)
{
    if (!in_flight_.insert(p.id).second) {
        throw std::logic_error("packet " + std::to_string(p.id) + " generated twice");
    }
    ++record_.data_generated;
}

void MetricsCollector::finish(std::uint64_t id)
{
    if (in_flight_.erase(id) == 0) {
        throw std::logic_error("packet " + std::to_string(id) + " accounted twice");
    }
}

void MetricsCollector::on_delivered(const DataPacket& p, SimTime now)
{
    finish(p.id);
    ++record_.data_delivered;
    record_.delay_sum += (now - p.emit_time).seconds();
}

void MetricsCollector::on_dropped(const DataPacket& p, NodeId at, DropReason reason, NodeId attempted_next,
                                  SimTime now)
{
    finish(p.id);
    ++record_.data_dropped;
    ++record_.drops_by_reason.at(static_cast<std::size_t>(reason));
    attribute(p, at, attempted_next, now);
}

void MetricsCollector::on_route_break(const DataPacket& p, NodeId at, NodeId attempted_next, SimTime now)
{
    attribute(p, at, attempted_next, now);
}

void MetricsCollector::attribute(const DataPacket& p, NodeId at, NodeId attempted_next, SimTime now)
{
    if (attempted_next == kNoNode) {
        return;
    }
    for (std::size_t f = 0; f < failures_.size(); ++f) {
        Failure& fl = failures_[f];
        if (now < fl.t_f || !fl.element.blocks(at, attempted_next)) {
            continue;
        }
        if (!fl.t_d) {
            fl.t_d = now;
        }
        const bool known = std::any_of(record_.latencies.begin(), record_.latencies.end(), [&](const LatencyRecord& r) {
            return r.failure_id == f && r.source == p.source && r.destination == p.destination;
        });
        if (!known) {
            record_.latencies.push_back({f, p.source, p.destination, fl.t_f, fl.t_d, std::nullopt});
        }
    }
}

bool MetricsCollector::awaiting_recovery(NodeId source) const
{
    return std::any_of(record_.latencies.begin(), record_.latencies.end(),
                       [&](const LatencyRecord& r) { return r.source == source && !r.t_r; });
}

} // namespace manetsim
