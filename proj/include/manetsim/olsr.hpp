#pragma once

#include "manetsim/kernel.hpp"
#include "manetsim/messages.hpp"
#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace manetsim {

struct ProtocolConfig {
    SimTime hello_interval = SimTime::from_ms(2000);
    SimTime tc_interval = SimTime::from_ms(5000);
    SimTime neighb_hold_time = SimTime::from_ms(6000);
    SimTime top_hold_time = SimTime::from_ms(15000);
    SimTime max_jitter = SimTime::from_ms(500);
    SimTime dup_hold_time = SimTime::from_ms(30000);
    bool lln_enabled = true;
    bool send_empty_tc = false;

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

/// Directed graph of what one node believes the network looks like.
/// Adjacency lists are kept sorted and free of duplicates.
class ViewGraph {
public:
    ViewGraph(NodeId self, std::size_t node_count) : self_(self), adj_(node_count) {}
    /// Takes unsorted adjacency lists; duplicates are removed.
    ViewGraph(NodeId self, std::vector<std::vector<NodeId>> adjacency);

    NodeId self() const { return self_; }
    std::size_t node_count() const { return adj_.size(); }
    const std::vector<NodeId>& out(NodeId u) const { return adj_.at(u); }

    void add_edge(NodeId u, NodeId v);
    bool has_edge(NodeId u, NodeId v) const;
    /// Removes u->v and v->u.
    void remove_link(NodeId u, NodeId v);

private:
    NodeId self_;
    std::vector<std::vector<NodeId>> adj_;
};

struct RouteEntry {
    NodeId next_hop = kNoNode;
    std::uint32_t distance = 0;
    NodeId parent = kNoNode;  // predecessor on the chosen shortest path
};

class RoutingTable {
public:
    RoutingTable() = default;
    RoutingTable(NodeId self, std::size_t node_count) : self_(self), entries_(node_count) {}

    NodeId self() const { return self_; }
    const std::optional<RouteEntry>& find(NodeId dest) const { return entries_.at(dest); }
    void set(NodeId dest, RouteEntry e) { entries_.at(dest) = e; }
    std::size_t size() const;
    std::size_t node_count() const { return entries_.size(); }
    /// self .. dest inclusive, empty when unreachable.
    std::vector<NodeId> path_to(NodeId dest) const;

private:
    NodeId self_ = kNoNode;
    std::vector<std::optional<RouteEntry>> entries_;
};

/// Hop-count shortest paths from graph.self().
///
/// Among equal-length paths the lowest next hop wins, then the lowest
/// predecessor. Nodes flagged in `excluded` are never entered.
RoutingTable shortest_routes(const ViewGraph& graph, const std::vector<bool>* excluded = nullptr);

/// Greedy MPR selection.
///
/// `two_hop` holds (via, target) pairs. Only pairs whose via is a symmetric
/// neighbor and whose target is neither `self` nor a symmetric neighbor take
/// part. Neighbors that are the sole cover of some two-hop node are taken
/// first; the rest are added by coverage count, ties to the lowest id.
std::vector<NodeId> select_mprs(NodeId self, const std::vector<NodeId>& sym_neighbors,
                                const std::vector<std::pair<NodeId, NodeId>>& two_hop);

struct LinkTuple {
    SimTime sym_until;
    SimTime asym_until;
    SimTime expires;
    bool sym = false;
};

struct TopologyTuple {
    std::uint32_t ansn = 0;
    SimTime expires;
};

/// What a repository update touched.
struct StateChange {
    bool neighborhood = false;  // symmetric neighbors or two-hop set
    bool topology = false;      // topology set membership
    bool selectors = false;
    std::vector<NodeId> lost_neighbors;  // symmetric links that went away

    bool view() const { return neighborhood || topology; }
    StateChange& operator|=(const StateChange& o);
};

/// Information repositories of one OLSR node.
///
/// Pure state: no scheduling, no I/O. The caller supplies `now` and decides
/// what to emit based on the returned StateChange.
class OlsrState {
public:
    OlsrState(NodeId self, std::size_t node_count, ProtocolConfig config);

    NodeId self() const { return self_; }
    const ProtocolConfig& config() const { return config_; }

    HelloMessage make_hello() const;
    StateChange process_hello(const HelloMessage& msg, NodeId sender, SimTime now);

    /// Builds the next TC. Returns nothing when the selector set is empty,
    /// unless `send_empty_tc` is configured or `force` is set.
    std::optional<TcMessage> make_tc(bool force);

    /// Records (originator, seq); returns false if it was already present.
    bool remember_message(NodeId originator, std::uint32_t seq, SimTime now);
    StateChange process_tc(const TcMessage& msg, SimTime now);
    bool selected_by(NodeId neighbor) const { return selectors_.count(neighbor) != 0; }

    /// Removes every tuple whose validity ended before `now`.
    StateChange expire(SimTime now);
    /// Earliest instant at which expire() would change something.
    std::optional<SimTime> next_expiry() const;

    /// Link-layer loss of `lost`: link tuple and the two-hop tuples through
    /// it are dropped. The selector tuple is left to its own expiry unless
    /// `purge_selector` is set. No-op for an unknown neighbor.
    StateChange drop_neighbor(NodeId lost, bool purge_selector);
    /// Removes `neighbor` from the selector set (ANSN moves on change).
    bool purge_selector(NodeId neighbor);
    /// Deletes topology tuples for the link in both orientations, and the
    /// matching two-hop tuples.
    StateChange forget_link(LinkId link);
    /// TCs from `originator` with an ANSN below `ansn` are ignored from now on.
    void raise_ansn_floor(NodeId originator, std::uint32_t ansn);

    bool is_sym_neighbor(NodeId n) const;
    std::vector<NodeId> sym_neighbors() const;
    std::vector<std::pair<NodeId, NodeId>> two_hop_pairs() const;
    /// Current MPR set, recomputed on demand after neighborhood changes.
    const std::vector<NodeId>& mprs() const;
    std::vector<NodeId> selectors() const;
    std::uint32_t ansn() const { return ansn_; }
    const std::map<NodeId, LinkTuple>& links() const { return links_; }
    /// Keyed by (last_hop, dest).
    const std::map<std::pair<NodeId, NodeId>, TopologyTuple>& topology() const { return topology_; }

    ViewGraph view_graph() const;
    /// view_graph() cached until the view changes.
    const ViewGraph& view();
    /// Routing table for the current view; recomputed only after a change.
    const RoutingTable& routes();
    std::uint64_t view_version() const { return view_version_; }

private:
    void recompute_mprs() { mprs_dirty_ = true; }
    void bump_view() { ++view_version_; }
    void set_selector(NodeId n, SimTime expires);

    NodeId self_;
    std::size_t node_count_;
    ProtocolConfig config_;
    std::map<NodeId, LinkTuple> links_;
    std::map<std::pair<NodeId, NodeId>, SimTime> two_hop_;  // (via, target)
    std::map<NodeId, SimTime> selectors_;
    std::map<std::pair<NodeId, NodeId>, TopologyTuple> topology_;  // (last_hop, dest)
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> duplicates_;
    std::deque<std::pair<SimTime, std::pair<NodeId, std::uint32_t>>> duplicate_order_;
    std::map<NodeId, std::uint32_t> ansn_floor_;
    mutable std::vector<NodeId> mprs_;
    mutable bool mprs_dirty_ = false;
    std::uint32_t ansn_ = 0;
    std::uint32_t msg_seq_ = 0;
    std::uint64_t view_version_ = 0;
    std::uint64_t routes_version_ = ~std::uint64_t{0};
    RoutingTable routes_;
    std::uint64_t view_cache_version_ = ~std::uint64_t{0};
    std::optional<ViewGraph> view_cache_;
};

} // namespace manetsim
