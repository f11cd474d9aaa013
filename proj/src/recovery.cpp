#include "manetsim/recovery.hpp"

#include <algorithm>
#include <stdexcept>

namespace manetsim {

Scheme parse_scheme(const std::string& s)
{
    if (s == "none") {
        return Scheme::None;
    }
    if (s == "re" || s == "route-error") {
        return Scheme::RouteError;
    }
    if (s == "ftc" || s == "fast-tc") {
        return Scheme::FastTc;
    }
    if (s == "dr" || s == "data-reemission") {
        return Scheme::DataReemission;
    }
    throw std::invalid_argument("unknown recovery scheme '" + s + "'");
}

const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::None:
        return "none";
    case Scheme::RouteError:
        return "re";
    case Scheme::FastTc:
        return "ftc";
    case Scheme::DataReemission:
        return "dr";
    }
    return "?";
}

const char* to_string(DropReason r)
{
    switch (r) {
    case DropReason::NoRoute:
        return "no-route";
    case DropReason::TxFailure:
        return "tx-failure";
    case DropReason::RecoveryFailed:
        return "recovery-failed";
    case DropReason::TtlExpired:
        return "ttl-expired";
    case DropReason::Malformed:
        return "malformed";
    }
    return "?";
}

void RecoveryConfig::validate() const
{
    if (fast_tc_interval < SimTime::zero()) {
        throw std::invalid_argument("recovery: fast_tc_interval must be >= 0");
    }
}

std::vector<NodeId> reverse_prefix(const DataPacket& packet, NodeId detector)
{
    std::vector<NodeId> r(packet.traversed.rbegin(), packet.traversed.rend());
    if (r.empty() || r.front() != detector) {
        r.insert(r.begin(), detector);
    }
    return r;
}

Recovery::Recovery(RecoveryConfig config, RecoveryHost& host)
    : config_(config), host_(host), fast_tc_limit_(config.fast_tc_interval), notif_limit_(config.fast_tc_interval)
{
    config_.validate();
}

void Recovery::on_failure(NodeId detector, NodeId lost, const DataPacket* packet)
{
    switch (config_.scheme) {
    case Scheme::RouteError:
        if (packet != nullptr && packet->source != detector) {
            re_on_failure(detector, LinkId::of(detector, lost), *packet);
        }
        break;
    case Scheme::FastTc:
        ftc_on_failure(detector, lost);
        break;
    case Scheme::None:
    case Scheme::DataReemission:
        break;
    }
}

void Recovery::re_on_failure(NodeId detector, LinkId broken, const DataPacket& packet)
{
    // Stop advertising the lost neighbor, or the detector's next TC would
    // put the link back into the views the notice just cleaned.
    OlsrState& st = host_.olsr(detector);
    st.purge_selector(broken.a == detector ? broken.b : broken.a);
    if (!notif_limit_.allow({detector, broken, packet.source}, host_.now())) {
        return;
    }
    RerrNotif n;
    n.broken_link = broken;
    n.detector = detector;
    n.target_source = packet.source;
    n.detector_ansn = st.ansn();
    if (host_.source_routed()) {
        n.reverse_route = reverse_prefix(packet, detector);
    }
    forward_notif(detector, std::move(n));
}

// Hop-by-hop notices carry their hop count in `cursor`.
constexpr std::size_t kMaxNotifHops = 64;

void Recovery::forward_notif(NodeId node, RerrNotif notif)
{
    NodeId next = kNoNode;
    if (!notif.reverse_route.empty()) {
        if (notif.cursor + 1 >= notif.reverse_route.size()) {
            return;
        }
        next = notif.reverse_route[notif.cursor + 1];
        if (!host_.olsr(node).is_sym_neighbor(next)) {
            return;
        }
    } else {
        if (notif.cursor >= kMaxNotifHops) {
            return;
        }
        const auto& entry = host_.olsr(node).routes().find(notif.target_source);
        if (!entry) {
            return;
        }
        next = entry->next_hop;
    }
    ++notif.cursor;
    ++notifs_;
    host_.send_control(node, next, std::move(notif));
}

void Recovery::on_receive(NodeId node, const RerrNotif& notif)
{
    host_.olsr(node).raise_ansn_floor(notif.detector, notif.detector_ansn);
    apply_removal(node, {notif.broken_link});
    if (node != notif.target_source) {
        forward_notif(node, notif);
    }
}

void Recovery::ftc_on_failure(NodeId detector, NodeId lost)
{
    if (!fast_tc_limit_.allow({detector, LinkId::of(detector, lost)}, host_.now())) {
        return;
    }
    OlsrState& st = host_.olsr(detector);
    st.purge_selector(lost);
    auto tc = st.make_tc(true);
    tc->fast = true;
    ++fast_tcs_;
    host_.flood_tc_now(detector, std::move(*tc));
}

bool Recovery::intercept_unroutable(NodeId detector, const DataPacket& packet, LinkId broken)
{
    if (config_.scheme != Scheme::DataReemission || packet.source == detector ||
        packet.reemissions >= config_.max_reemissions) {
        return false;
    }
    DrEnvelope env;
    env.original = packet;
    env.embedded_topology = {broken};
    env.reverse_route = reverse_prefix(packet, detector);
    forward_envelope(detector, std::move(env));
    return true;
}

void Recovery::forward_envelope(NodeId node, DrEnvelope env)
{
    const NodeId next = env.reverse_route.at(env.cursor + 1);
    if (!host_.olsr(node).is_sym_neighbor(next)) {
        host_.drop(env.original, node, DropReason::RecoveryFailed, next);
        return;
    }
    ++env.cursor;
    ++envelopes_;
    host_.send_data_plane(node, next, std::move(env));
}

void Recovery::on_receive(NodeId node, const DrEnvelope& env)
{
    if (env.cursor >= env.reverse_route.size() || env.reverse_route[env.cursor] != node) {
        host_.drop(env.original, node, DropReason::Malformed, kNoNode);
        return;
    }
    if (env.cursor + 1 == env.reverse_route.size()) {
        dr_at_source(node, env);
    } else {
        forward_envelope(node, env);
    }
}

void Recovery::dr_at_source(NodeId source, const DrEnvelope& env)
{
    apply_removal(source, env.embedded_topology);
    DataPacket p = env.original;
    ++p.reemissions;
    host_.reemit(std::move(p));
}

void Recovery::apply_removal(NodeId node, const std::vector<LinkId>& links)
{
    StateChange ch;
    for (LinkId l : links) {
        ch |= host_.olsr(node).forget_link(l);
    }
    if (ch.view()) {
        host_.view_changed(node);
    }
}

} // namespace manetsim
