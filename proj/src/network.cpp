#include "manetsim/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace manetsim {

Protocol parse_protocol(const std::string& s)
{
    if (s == "olsr") {
        return Protocol::Olsr;
    }
    if (s == "mpolsr" || s == "mp-olsr") {
        return Protocol::MpOlsr;
    }
    throw std::invalid_argument("unknown protocol '" + s + "'");
}

const char* to_string(Protocol p)
{
    return p == Protocol::Olsr ? "olsr" : "mpolsr";
}

void NetworkConfig::validate() const
{
    olsr.validate();
    multipath.validate();
    recovery.validate();
    medium.validate();
    if (protocol == Protocol::Olsr && recovery.scheme == Scheme::DataReemission) {
        throw std::invalid_argument("recovery=dr requires protocol=mpolsr");
    }
}

Network::Network(NetworkConfig config, std::unique_ptr<PositionSource> positions)
    : config_(config), positions_(std::move(positions)), recovery_(config.recovery, *this)
{
    config_.validate();
    medium_ = std::make_unique<Medium>(sim_, config_.medium, *positions_, config_.seed);
    const std::size_t n = positions_->node_count();
    nodes_.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
        nodes_.emplace_back(i, n, config_.olsr, config_.seed);
    }
    medium_->set_receive_handler([this](NodeId rx, const Frame& f) { on_receive(rx, f); });
    medium_->set_lost_handler([this](NodeId rx, const Frame& f) { handle_lost(rx, f); });
    if (config_.olsr.lln_enabled) {
        for (NodeId i = 0; i < n; ++i) {
            medium_->register_lln_hook(i, [this, i](NodeId lost, const Frame& f) { handle_lln(i, lost, f); });
        }
    }
}

void Network::add_flow(const CbrFlow& flow)
{
    flow.validate(nodes_.size());
    flows_.push_back(flow);
    const std::size_t idx = flows_.size() - 1;
    sim_.schedule(flow.start, EventKind::TrafficEmit, flow.source, {"cbr", flow.id}, [this, idx] { emit(idx); });
}

void Network::fail_link(LinkId link, SimTime at)
{
    metrics_.register_failure(FailureElement::of_link(link), at);
    medium_->inject_link_failure(link, at);
}

void Network::fail_node(NodeId node, SimTime at)
{
    metrics_.register_failure(FailureElement::of_node(node), at);
    medium_->inject_node_failure(node, at);
}

RunSummary Network::run_until(SimTime t_end)
{
    if (!started_) {
        start();
    }
    return sim_.run_until(t_end);
}

void Network::start()
{
    started_ = true;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        RngStream offsets(config_.seed, i, RngPurpose::StartOffset);
        const SimTime hello_at = offsets.uniform_time(config_.olsr.hello_interval);
        const SimTime tc_at = offsets.uniform_time(config_.olsr.tc_interval);
        sim_.schedule(sim_.now() + hello_at, EventKind::TimerFire, i, {"hello"}, [this, i] { hello_timer(i); });
        sim_.schedule(sim_.now() + tc_at, EventKind::TimerFire, i, {"tc"}, [this, i] { tc_timer(i); });
    }
}

// ---- transmission ---------------------------------------------------------

bool Network::send(NodeId from, NodeId to, Message msg, bool control)
{
    if (control) {
        metrics_.count_control();
    }
    Frame f;
    f.sender = from;
    f.receiver = to;
    f.size = wire_size(msg);
    f.payload = std::make_shared<const Message>(std::move(msg));
    if (medium_->transmit(f) == TxOutcome::Scheduled) {
        return true;
    }
    if (!config_.olsr.lln_enabled) {
        handle_unreported_failure(from, to, *f.payload);
    }
    return false;
}

bool Network::send_control(NodeId from, NodeId to, Message msg)
{
    return send(from, to, std::move(msg), true);
}

bool Network::send_data_plane(NodeId from, NodeId to, Message msg)
{
    return send(from, to, std::move(msg), false);
}

void Network::broadcast(NodeId from, Message msg)
{
    send(from, kNoNode, std::move(msg), true);
}

void Network::flood_tc_now(NodeId origin, TcMessage tc)
{
    if (!medium_->alive(origin)) {
        return;
    }
    nodes_[origin].state.remember_message(origin, tc.msg_seq, sim_.now());
    if (tc.fast) {
        fast_tc_log_.emplace_back(sim_.now(), origin);
    }
    broadcast(origin, std::move(tc));
}

// ---- control plane --------------------------------------------------------

void Network::hello_timer(NodeId node)
{
    if (!medium_->alive(node)) {
        return;
    }
    broadcast(node, nodes_[node].state.make_hello());
    sim_.schedule_in(config_.olsr.hello_interval, EventKind::TimerFire, node, {"hello"},
                     [this, node] { hello_timer(node); });
}

void Network::tc_timer(NodeId node)
{
    if (!medium_->alive(node)) {
        return;
    }
    // Content is taken when the jittered emission fires, so it reflects any
    // selector change made in between.
    const SimTime delay = draw_jitter(config_.olsr.max_jitter, nodes_[node].jitter);
    sim_.schedule_in(delay, EventKind::TimerFire, node, {"tc-emit"}, [this, node] {
        if (!medium_->alive(node)) {
            return;
        }
        if (auto tc = nodes_[node].state.make_tc(false)) {
            flood_tc_now(node, std::move(*tc));
        }
    });
    sim_.schedule_in(config_.olsr.tc_interval, EventKind::TimerFire, node, {"tc"}, [this, node] { tc_timer(node); });
}

void Network::on_receive(NodeId node, const Frame& frame)
{
    const Message& m = *frame.payload;
    if (const auto* hello = std::get_if<HelloMessage>(&m)) {
        const StateChange ch = nodes_[node].state.process_hello(*hello, frame.sender, sim_.now());
        after_change(node, ch, true);
        arm_sweep(node);
    } else if (const auto* tc = std::get_if<TcMessage>(&m)) {
        on_tc(node, frame.sender, *tc);
    } else if (const auto* pkt = std::get_if<DataPacket>(&m)) {
        DataPacket p = *pkt;
        p.traversed.push_back(node);
        if (p.route) {
            ++p.route->cursor;
            if (p.route->cursor >= p.route->hops.size() || p.route->current() != node) {
                drop(p, node, DropReason::Malformed, kNoNode);
                return;
            }
            forward_source_routed(node, std::move(p));
        } else {
            forward_hop_by_hop(node, std::move(p));
        }
    } else if (const auto* rerr = std::get_if<RerrNotif>(&m)) {
        recovery_.on_receive(node, *rerr);
    } else if (const auto* env = std::get_if<DrEnvelope>(&m)) {
        recovery_.on_receive(node, *env);
    }
}

void Network::on_tc(NodeId node, NodeId sender, const TcMessage& tc)
{
    OlsrState& st = nodes_[node].state;
    if (!st.is_sym_neighbor(sender) || !st.remember_message(tc.originator, tc.msg_seq, sim_.now())) {
        return;
    }
    const StateChange ch = st.process_tc(tc, sim_.now());
    after_change(node, ch, true);
    arm_sweep(node);
    if (!st.selected_by(sender) || tc.ttl <= 1) {
        return;
    }
    TcMessage fwd = tc;
    --fwd.ttl;
    ++fwd.hop_count;
    // Fast TCs are relayed at once; periodic ones get the usual jitter.
    const SimTime delay = tc.fast ? SimTime::zero() : draw_jitter(config_.olsr.max_jitter, nodes_[node].jitter);
    sim_.schedule_in(delay, EventKind::TimerFire, node, {"tc-fwd", tc.originator},
                     [this, node, msg = std::move(fwd)]() mutable {
                         if (medium_->alive(node)) {
                             broadcast(node, std::move(msg));
                         }
                     });
}

void Network::after_change(NodeId node, const StateChange& ch, bool report_losses)
{
    if (ch.view()) {
        view_changed(node);
    }
    if (report_losses) {
        for (NodeId lost : ch.lost_neighbors) {
            recovery_.on_failure(node, lost, nullptr);
        }
    }
}

void Network::arm_sweep(NodeId node)
{
    Node& nd = nodes_[node];
    // Updates only add tuples that live at least the shorter hold time, so
    // a sweep already due before then needs no reconsideration.
    const SimTime horizon = sim_.now() + std::min(config_.olsr.neighb_hold_time, config_.olsr.top_hold_time);
    if (sim_.is_pending(nd.sweep) && nd.sweep_at <= horizon) {
        return;
    }
    const auto next = nd.state.next_expiry();
    if (!next) {
        return;
    }
    if (sim_.is_pending(nd.sweep)) {
        if (nd.sweep_at <= *next) {
            return;
        }
        sim_.cancel(nd.sweep);
    }
    nd.sweep_at = std::max(*next, sim_.now());
    nd.sweep = sim_.schedule(nd.sweep_at, EventKind::TupleExpiry, node, {"sweep"}, [this, node] { sweep(node); });
}

void Network::sweep(NodeId node)
{
    if (!medium_->alive(node)) {
        return;
    }
    const StateChange ch = nodes_[node].state.expire(sim_.now());
    after_change(node, ch, true);
    arm_sweep(node);
}

void Network::view_changed(NodeId node)
{
    if (metrics_.awaiting_recovery(node)) {
        check_recovery(node);
    }
}

void Network::check_recovery(NodeId source)
{
    if (config_.protocol == Protocol::Olsr) {
        metrics_.check_recovery(source, sim_.now(), [&](NodeId dest) {
            return std::vector<std::vector<NodeId>>{nodes_[source].state.routes().path_to(dest)};
        });
    } else {
        metrics_.check_recovery(source, sim_.now(),
                                [&](NodeId dest) { return refresh_paths(source, dest).paths(); });
    }
}

// ---- data plane -----------------------------------------------------------

void Network::emit(std::size_t flow_index)
{
    const CbrFlow& flow = flows_[flow_index];
    const SimTime now = sim_.now();
    if (now + flow.interval <= flow.stop) {
        sim_.schedule(now + flow.interval, EventKind::TrafficEmit, flow.source, {"cbr", flow.id},
                      [this, flow_index] { emit(flow_index); });
    }
    DataPacket p;
    p.id = next_packet_id_++;
    p.flow = flow.id;
    p.source = flow.source;
    p.destination = flow.destination;
    p.emit_time = now;
    p.size = flow.packet_size;
    metrics_.on_generated(p);
    launch(std::move(p));
}

void Network::launch(DataPacket p)
{
    const NodeId src = p.source;
    p.traversed = {src};
    p.ttl = 64;
    p.route.reset();
    if (config_.protocol == Protocol::Olsr) {
        forward_hop_by_hop(src, std::move(p));
        return;
    }
    OlsrState& st = nodes_[src].state;
    auto path = refresh_paths(src, p.destination).next([&](const Path& q) { return st.is_sym_neighbor(q[1]); });
    if (!path) {
        drop(p, src, DropReason::NoRoute, kNoNode);
        return;
    }
    p.route = SourceRoute{std::move(*path), 0};
    forward_source_routed(src, std::move(p));
}

void Network::reemit(DataPacket pkt)
{
    launch(std::move(pkt));
}

PathSet& Network::refresh_paths(NodeId source, NodeId destination)
{
    Node& nd = nodes_[source];
    Route& r = nd.routes[destination];
    if (r.version != nd.state.view_version()) {
        PathSet fresh = multipath_dijkstra(nd.state.view(), source, destination, config_.multipath);
        r.paths = PathSet(fresh.paths(), r.paths.rr_index());
        r.version = nd.state.view_version();
    }
    return r.paths;
}

const PathSet& Network::path_set(NodeId source, NodeId destination)
{
    return refresh_paths(source, destination);
}

void Network::forward_hop_by_hop(NodeId node, DataPacket pkt)
{
    if (node == pkt.destination) {
        deliver(node, pkt);
        return;
    }
    if (pkt.ttl == 0) {
        drop(pkt, node, DropReason::TtlExpired, kNoNode);
        return;
    }
    const auto& entry = nodes_[node].state.routes().find(pkt.destination);
    if (!entry) {
        drop(pkt, node, DropReason::NoRoute, kNoNode);
        return;
    }
    --pkt.ttl;
    send(node, entry->next_hop, std::move(pkt), false);
}

void Network::forward_source_routed(NodeId node, DataPacket pkt)
{
    if (pkt.route->at_end()) {
        deliver(node, pkt);
        return;
    }
    const NodeId next = pkt.route->next();
    if (!nodes_[node].state.is_sym_neighbor(next)) {
        route_recovery(node, std::move(pkt), next);
        return;
    }
    send(node, next, std::move(pkt), false);
}

void Network::route_recovery(NodeId node, DataPacket pkt, NodeId unreachable)
{
    const DataPacket before = pkt;
    auto alt = recovery_route(nodes_[node].state.view(), node, pkt.destination, pkt.traversed);
    if (alt) {
        auto& hops = pkt.route->hops;
        hops.resize(pkt.route->cursor);
        hops.insert(hops.end(), alt->begin(), alt->end());
        forward_source_routed(node, std::move(pkt));
    } else if (recovery_.intercept_unroutable(node, pkt, LinkId::of(node, unreachable))) {
        metrics_.on_route_break(pkt, node, unreachable, sim_.now());
        if (metrics_.awaiting_recovery(pkt.source)) {
            check_recovery(pkt.source);
        }
    } else {
        drop(pkt, node, DropReason::RecoveryFailed, unreachable);
    }
    recovery_.on_failure(node, unreachable, &before);
}

void Network::deliver(NodeId, const DataPacket& pkt)
{
    metrics_.on_delivered(pkt, sim_.now());
}

void Network::drop(const DataPacket& pkt, NodeId at, DropReason reason, NodeId attempted_next)
{
    metrics_.on_dropped(pkt, at, reason, attempted_next, sim_.now());
    if (metrics_.awaiting_recovery(pkt.source)) {
        check_recovery(pkt.source);
    }
}

void Network::handle_lln(NodeId node, NodeId lost, const Frame& frame)
{
    const StateChange ch = nodes_[node].state.drop_neighbor(lost, false);
    after_change(node, ch, false);
    const Message& m = *frame.payload;
    if (const auto* pkt = std::get_if<DataPacket>(&m)) {
        if (pkt->route) {
            route_recovery(node, *pkt, lost);
        } else {
            drop(*pkt, node, DropReason::TxFailure, lost);
            recovery_.on_failure(node, lost, pkt);
        }
    } else if (const auto* env = std::get_if<DrEnvelope>(&m)) {
        drop(env->original, node, DropReason::RecoveryFailed, lost);
        recovery_.on_failure(node, lost, nullptr);
    } else {
        recovery_.on_failure(node, lost, nullptr);
    }
}

void Network::handle_unreported_failure(NodeId node, NodeId lost, const Message& msg)
{
    if (const auto* pkt = std::get_if<DataPacket>(&msg)) {
        drop(*pkt, node, DropReason::TxFailure, lost);
    } else if (const auto* env = std::get_if<DrEnvelope>(&msg)) {
        drop(env->original, node, DropReason::RecoveryFailed, lost);
    }
}

void Network::handle_lost(NodeId receiver, const Frame& frame)
{
    handle_unreported_failure(frame.sender, receiver, *frame.payload);
}

} // namespace manetsim
