#pragma once

#include "manetsim/messages.hpp"
#include "manetsim/olsr.hpp"
#include "manetsim/recovery.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

namespace manetsim {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

struct AnalyticBounds {
    Interval delta1;  // failure detected by neighbor-tuple expiry
    Interval delta2;  // stale topology tuple outlives its refresh
};

AnalyticBounds analytic_bounds(const ProtocolConfig& cfg);

/// A link or node taken down on purpose.
struct FailureElement {
    LinkId link;              // valid when node == kNoNode
    NodeId node = kNoNode;

    static FailureElement of_link(LinkId l) { return {l, kNoNode}; }
    static FailureElement of_node(NodeId n) { return {LinkId{}, n}; }

    /// True if a transmission from `at` to `next` crosses the failure.
    bool blocks(NodeId at, NodeId next) const;
    /// True if the node sequence uses the failed link or node.
    bool on_path(const std::vector<NodeId>& path) const;
};

struct LatencyRecord {
    std::size_t failure_id = 0;
    NodeId source = kNoNode;
    NodeId destination = kNoNode;
    SimTime t_f;
    std::optional<SimTime> t_d;
    std::optional<SimTime> t_r;

    /// |t_r - t_d| in seconds once both are stamped.
    std::optional<double> delta() const;
};

std::optional<double> latency(const LatencyRecord& r);

struct MetricsRecord {
    std::uint64_t n_cm = 0;
    std::uint64_t data_generated = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t data_dropped = 0;
    double delay_sum = 0.0;  // seconds
    std::array<std::uint64_t, 5> drops_by_reason{};
    std::vector<LatencyRecord> latencies;
};

/// Percentage value and whether it is defined.
struct Ratio {
    double value = 0.0;
    bool defined = false;
};

Ratio packet_loss_rate(const MetricsRecord& m);
Ratio routing_load(const MetricsRecord& m);
Ratio avg_e2e_delay(const MetricsRecord& m);

/// Run-time accounting: packet conservation plus failure latency stamps.
class MetricsCollector {
public:
    std::size_t register_failure(FailureElement element, SimTime t_f);

    void count_control() { ++record_.n_cm; }
    void on_generated(const DataPacket& p);
    void on_delivered(const DataPacket& p, SimTime now);
    /// A drop that crosses a registered failure at or after its t_f stamps
    /// T_d and opens a latency record for the packet's flow endpoints.
    /// Throws std::logic_error on double accounting.
    void on_dropped(const DataPacket& p, NodeId at, DropReason reason, NodeId attempted_next, SimTime now);

    /// A packet taken off its route by the failure without being dropped
    /// (handed to data re-emission). Stamps T_d like a drop would.
    void on_route_break(const DataPacket& p, NodeId at, NodeId attempted_next, SimTime now);

    /// Latency records of `source` still waiting for T_r.
    bool awaiting_recovery(NodeId source) const;
    /// Stamps T_r on every open record of `source` whose failure `path_of`
    /// no longer crosses. `path_of(destination)` returns the source's
    /// current route(s) flattened as a list of node paths.
    template <typename PathsOf>
    void check_recovery(NodeId source, SimTime now, PathsOf&& paths_of)
    {
        for (auto& r : record_.latencies) {
            if (r.source != source || r.t_r || !r.t_d) {
                continue;
            }
            bool clear = true;
            for (const auto& path : paths_of(r.destination)) {
                if (failures_[r.failure_id].element.on_path(path)) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                r.t_r = now;
            }
        }
    }

    std::size_t in_flight() const { return in_flight_.size(); }
    const MetricsRecord& record() const { return record_; }

private:
    struct Failure {
        FailureElement element;
        SimTime t_f;
        std::optional<SimTime> t_d;
    };
    void finish(std::uint64_t id);
    void attribute(const DataPacket& p, NodeId at, NodeId attempted_next, SimTime now);

    MetricsRecord record_;
    std::vector<Failure> failures_;
    std::unordered_set<std::uint64_t> in_flight_;
};

} // namespace manetsim
