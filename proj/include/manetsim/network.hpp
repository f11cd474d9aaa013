#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/medium.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mpolsr.hpp"
#include "manetsim/olsr.hpp"
#include "manetsim/recovery.hpp"
#include "manetsim/traffic.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace manetsim {

enum class Protocol { Olsr, MpOlsr };

Protocol parse_protocol(const std::string& s);
const char* to_string(Protocol p);

struct NetworkConfig {
    Protocol protocol = Protocol::Olsr;
    ProtocolConfig olsr;
    MultipathCostConfig multipath;
    RecoveryConfig recovery;
    MediumConfig medium;
    std::uint64_t seed = 1;

    void validate() const;
};

/// One simulated run: every node's routing agent on a shared medium.
class Network final : public RecoveryHost {
public:
    Network(NetworkConfig config, std::unique_ptr<PositionSource> positions);

    const NetworkConfig& config() const { return config_; }
    std::size_t node_count() const { return nodes_.size(); }

    void add_flow(const CbrFlow& flow);
    void fail_link(LinkId link, SimTime at);
    void fail_node(NodeId node, SimTime at);

    /// Runs until `t_end`; protocol timers are armed on the first call.
    RunSummary run_until(SimTime t_end);

    Simulator& sim() { return sim_; }
    Medium& medium() { return *medium_; }
    PositionSource& positions() { return *positions_; }
    const MetricsCollector& metrics() const { return metrics_; }
    const Recovery& recovery() const { return recovery_; }
    /// Send times of FAST_TC messages at their originators.
    const std::vector<std::pair<SimTime, NodeId>>& fast_tc_log() const { return fast_tc_log_; }
    /// Current path set at `source` toward `destination` (MP-OLSR).
    const PathSet& path_set(NodeId source, NodeId destination);

    // RecoveryHost
    SimTime now() const override { return sim_.now(); }
    bool source_routed() const override { return config_.protocol == Protocol::MpOlsr; }
    OlsrState& olsr(NodeId node) override { return nodes_.at(node).state; }
    bool send_control(NodeId from, NodeId to, Message msg) override;
    bool send_data_plane(NodeId from, NodeId to, Message msg) override;
    void flood_tc_now(NodeId origin, TcMessage tc) override;
    void view_changed(NodeId node) override;
    void drop(const DataPacket& pkt, NodeId at, DropReason reason, NodeId attempted_next) override;
    void reemit(DataPacket pkt) override;

private:
    struct Route {
        PathSet paths;
        std::uint64_t version = ~std::uint64_t{0};
    };
    struct Node {
        Node(NodeId id, std::size_t n, const ProtocolConfig& cfg, std::uint64_t seed)
            : state(id, n, cfg), jitter(seed, id, RngPurpose::Jitter)
        {
        }
        OlsrState state;
        RngStream jitter;
        EventHandle sweep;
        SimTime sweep_at;
        std::map<NodeId, Route> routes;  // MP-OLSR path sets by destination
    };

    void start();
    bool send(NodeId from, NodeId to, Message msg, bool control);
    void broadcast(NodeId from, Message msg);
    void hello_timer(NodeId node);
    void tc_timer(NodeId node);
    void on_receive(NodeId node, const Frame& frame);
    void on_tc(NodeId node, NodeId sender, const TcMessage& tc);
    void after_change(NodeId node, const StateChange& ch, bool report_losses);
    void arm_sweep(NodeId node);
    void sweep(NodeId node);

    void emit(std::size_t flow_index);
    void launch(DataPacket pkt);
    void forward_hop_by_hop(NodeId node, DataPacket pkt);
    void forward_source_routed(NodeId node, DataPacket pkt);
    void route_recovery(NodeId node, DataPacket pkt, NodeId unreachable);
    void deliver(NodeId node, const DataPacket& pkt);
    void handle_lln(NodeId node, NodeId lost, const Frame& frame);
    void handle_unreported_failure(NodeId node, NodeId lost, const Message& msg);
    void handle_lost(NodeId receiver, const Frame& frame);
    PathSet& refresh_paths(NodeId source, NodeId destination);
    void check_recovery(NodeId source);

    NetworkConfig config_;
    Simulator sim_;
    std::unique_ptr<PositionSource> positions_;
    std::unique_ptr<Medium> medium_;
    MetricsCollector metrics_;
    Recovery recovery_;
    std::vector<Node> nodes_;
    std::vector<CbrFlow> flows_;
    std::vector<std::pair<SimTime, NodeId>> fast_tc_log_;
    std::uint64_t next_packet_id_ = 1;
    bool started_ = false;
};

} // namespace manetsim
