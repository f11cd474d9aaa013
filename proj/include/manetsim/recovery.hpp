#pragma once

#include "manetsim/messages.hpp"
#include "manetsim/olsr.hpp"

#include <map>
#include <string>
#include <tuple>

namespace manetsim {

enum class Scheme { None, RouteError, FastTc, DataReemission };

Scheme parse_scheme(const std::string& s);
const char* to_string(Scheme s);

struct RecoveryConfig {
    Scheme scheme = Scheme::None;
    SimTime fast_tc_interval = SimTime::from_ms(500);
    /// Re-emissions allowed per data packet before it is given up.
    std::uint8_t max_reemissions = 3;

    void validate() const;
};

enum class DropReason : std::uint8_t { NoRoute, TxFailure, RecoveryFailed, TtlExpired, Malformed };
const char* to_string(DropReason r);

/// Services the recovery schemes need from the running network.
class RecoveryHost {
public:
    virtual ~RecoveryHost() = default;
    virtual SimTime now() const = 0;
    virtual bool source_routed() const = 0;
    virtual OlsrState& olsr(NodeId node) = 0;
    /// Control-plane unicast (counted as routing load). False on TxFailure.
    virtual bool send_control(NodeId from, NodeId to, Message msg) = 0;
    /// Data-plane unicast (not counted as routing load). False on TxFailure.
    virtual bool send_data_plane(NodeId from, NodeId to, Message msg) = 0;
    /// Floods a TC originated at `origin` without origin jitter.
    virtual void flood_tc_now(NodeId origin, TcMessage tc) = 0;
    virtual void view_changed(NodeId node) = 0;
    virtual void drop(const DataPacket& pkt, NodeId at, DropReason reason, NodeId attempted_next) = 0;
    /// Sends `pkt` again from its source on a fresh route.
    virtual void reemit(DataPacket pkt) = 0;
};

/// Spaces events per key by at least `interval`.
template <typename Key>
class RateLimiter {
public:
    explicit RateLimiter(SimTime interval) : interval_(interval) {}
    bool allow(const Key& key, SimTime now)
    {
        auto it = last_.find(key);
        if (it != last_.end() && now - it->second < interval_) {
            return false;
        }
        last_[key] = now;
        return true;
    }

private:
    SimTime interval_;
    std::map<Key, SimTime> last_;
};

/// Route Error, Fast TC and Data Re-emission.
///
/// Exactly one scheme is active. Nothing here schedules events or draws
/// random numbers before the first failure is detected.
class Recovery {
public:
    Recovery(RecoveryConfig config, RecoveryHost& host);

    Scheme scheme() const { return config_.scheme; }
    const RecoveryConfig& config() const { return config_; }

    /// `detector` lost its link to `lost`. `packet` is the data packet whose
    /// transmission revealed the break, if any.
    void on_failure(NodeId detector, NodeId lost, const DataPacket* packet);

    /// Source-routed packet with no alternate route at `detector`. Returns
    /// true when the packet was taken over (DR); false means drop it.
    bool intercept_unroutable(NodeId detector, const DataPacket& packet, LinkId broken);

    void on_receive(NodeId node, const RerrNotif& notif);
    void on_receive(NodeId node, const DrEnvelope& env);

    std::uint64_t fast_tcs_sent() const { return fast_tcs_; }
    std::uint64_t notifs_sent() const { return notifs_; }
    std::uint64_t envelopes_sent() const { return envelopes_; }

private:
    void re_on_failure(NodeId detector, LinkId broken, const DataPacket& packet);
    void ftc_on_failure(NodeId detector, NodeId lost);
    void forward_notif(NodeId node, RerrNotif notif);
    void forward_envelope(NodeId node, DrEnvelope env);
    void dr_at_source(NodeId source, const DrEnvelope& env);
    void apply_removal(NodeId node, const std::vector<LinkId>& links);

    RecoveryConfig config_;
    RecoveryHost& host_;
    RateLimiter<std::pair<NodeId, LinkId>> fast_tc_limit_;
    RateLimiter<std::tuple<NodeId, LinkId, NodeId>> notif_limit_;
    std::uint64_t fast_tcs_ = 0;
    std::uint64_t notifs_ = 0;
    std::uint64_t envelopes_ = 0;
};

/// Reverse of the packet's traversed prefix, ending at its source.
std::vector<NodeId> reverse_prefix(const DataPacket& packet, NodeId detector);

} // namespace manetsim
