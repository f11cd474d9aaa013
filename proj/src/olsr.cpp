#include "manetsim/olsr.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace manetsim {

void ProtocolConfig::validate() const
{
    if (hello_interval <= SimTime::zero() || tc_interval <= SimTime::zero()) {
        throw std::invalid_argument("olsr: hello_interval and tc_interval must be > 0");
    }
    if (!(neighb_hold_time > hello_interval)) {
        throw std::invalid_argument("olsr: neighb_hold_time must exceed hello_interval");
    }
    if (!(top_hold_time > tc_interval)) {
        throw std::invalid_argument("olsr: top_hold_time must exceed tc_interval");
    }
    if (max_jitter < SimTime::zero() || !(max_jitter < hello_interval)) {
        throw std::invalid_argument("olsr: max_jitter must lie in [0, hello_interval)");
    }
}

StateChange& StateChange::operator|=(const StateChange& o)
{
    neighborhood = neighborhood || o.neighborhood;
    topology = topology || o.topology;
    selectors = selectors || o.selectors;
    lost_neighbors.insert(lost_neighbors.end(), o.lost_neighbors.begin(), o.lost_neighbors.end());
    return *this;
}

// ---------------------------------------------------------------------------
// ViewGraph / RoutingTable

ViewGraph::ViewGraph(NodeId self, std::vector<std::vector<NodeId>> adjacency) : self_(self), adj_(std::move(adjacency))
{
    for (std::size_t u = 0; u < adj_.size(); ++u) {
        auto& out = adj_[u];
        out.erase(std::remove(out.begin(), out.end(), static_cast<NodeId>(u)), out.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
}

void ViewGraph::add_edge(NodeId u, NodeId v)
{
    if (u == v) {
        return;
    }
    auto& list = adj_.at(u);
    auto it = std::lower_bound(list.begin(), list.end(), v);
    if (it == list.end() || *it != v) {
        list.insert(it, v);
    }
}

bool ViewGraph::has_edge(NodeId u, NodeId v) const
{
    const auto& list = adj_.at(u);
    return std::binary_search(list.begin(), list.end(), v);
}

void ViewGraph::remove_link(NodeId u, NodeId v)
{
    auto drop = [](std::vector<NodeId>& list, NodeId x) {
        auto it = std::lower_bound(list.begin(), list.end(), x);
        if (it != list.end() && *it == x) {
            list.erase(it);
        }
    };
    drop(adj_.at(u), v);
    drop(adj_.at(v), u);
}

std::size_t RoutingTable::size() const
{
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.has_value(); }));
}

std::vector<NodeId> RoutingTable::path_to(NodeId dest) const
{
    std::vector<NodeId> path;
    if (dest == self_) {
        return {self_};
    }
    if (!entries_.at(dest)) {
        return path;
    }
    NodeId cur = dest;
    while (cur != self_) {
        path.push_back(cur);
        cur = entries_.at(cur)->parent;
        if (path.size() > entries_.size()) {
            throw std::logic_error("RoutingTable::path_to: parent chain does not terminate");
        }
    }
    path.push_back(self_);
    std::reverse(path.begin(), path.end());
    return path;
}

RoutingTable shortest_routes(const ViewGraph& graph, const std::vector<bool>* excluded)
{
    const NodeId self = graph.self();
    RoutingTable table(self, graph.node_count());
    std::vector<bool> seen(graph.node_count(), false);
    seen[self] = true;

    // Layered BFS: a layer is final before the next one is built, so each
    // node receives the lexicographically smallest (next_hop, parent).
    std::vector<NodeId> layer{self};
    std::uint32_t depth = 0;
    while (!layer.empty()) {
        std::map<NodeId, RouteEntry> next;
        for (NodeId u : layer) {
            const NodeId via = (u == self) ? kNoNode : table.find(u)->next_hop;
            for (NodeId v : graph.out(u)) {
                if (seen[v] || (excluded != nullptr && (*excluded)[v])) {
                    continue;
                }
                RouteEntry cand{via == kNoNode ? v : via, depth + 1, u};
                auto it = next.find(v);
                if (it == next.end()) {
                    next.emplace(v, cand);
                } else if (std::tie(cand.next_hop, cand.parent) < std::tie(it->second.next_hop, it->second.parent)) {
                    it->second = cand;
                }
            }
        }
        layer.clear();
        for (const auto& [v, e] : next) {
            seen[v] = true;
            table.set(v, e);
            layer.push_back(v);
        }
        ++depth;
    }
    return table;
}

std::vector<NodeId> select_mprs(NodeId self, const std::vector<NodeId>& sym_neighbors,
                                const std::vector<std::pair<NodeId, NodeId>>& two_hop)
{
    std::vector<NodeId> n1 = sym_neighbors;
    std::sort(n1.begin(), n1.end());
    n1.erase(std::unique(n1.begin(), n1.end()), n1.end());
    auto index_in = [](const std::vector<NodeId>& v, NodeId x) -> std::ptrdiff_t {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        return it != v.end() && *it == x ? it - v.begin() : -1;
    };

    std::vector<std::pair<std::size_t, NodeId>> edges;  // (neighbor index, strict two-hop node)
    std::vector<NodeId> n2;
    for (const auto& [via, target] : two_hop) {
        const auto v = index_in(n1, via);
        if (target == self || v < 0 || index_in(n1, target) >= 0) {
            continue;
        }
        edges.emplace_back(static_cast<std::size_t>(v), target);
        n2.push_back(target);
    }
    std::sort(n2.begin(), n2.end());
    n2.erase(std::unique(n2.begin(), n2.end()), n2.end());

    std::vector<std::vector<std::size_t>> covers(n1.size());  // neighbor -> two-hop indices
    std::vector<std::size_t> cover_count(n2.size(), 0);
    std::vector<std::size_t> sole(n2.size(), 0);
    for (const auto& [v, target] : edges) {
        const auto t = static_cast<std::size_t>(index_in(n2, target));
        auto& c = covers[v];
        if (std::find(c.begin(), c.end(), t) == c.end()) {
            c.push_back(t);
            ++cover_count[t];
            sole[t] = v;
        }
    }

    std::vector<bool> chosen(n1.size(), false);
    std::vector<bool> covered(n2.size(), false);
    std::size_t remaining = n2.size();
    auto take = [&](std::size_t v) {
        chosen[v] = true;
        for (std::size_t t : covers[v]) {
            if (!covered[t]) {
                covered[t] = true;
                --remaining;
            }
        }
    };
    for (std::size_t t = 0; t < n2.size(); ++t) {
        if (cover_count[t] == 1 && !chosen[sole[t]]) {
            take(sole[t]);
        }
    }
    while (remaining > 0) {
        std::size_t best = n1.size();
        std::size_t best_count = 0;
        for (std::size_t v = 0; v < n1.size(); ++v) {
            if (chosen[v]) {
                continue;
            }
            std::size_t c = 0;
            for (std::size_t t : covers[v]) {
                c += covered[t] ? 0 : 1;
            }
            if (c > best_count) {  // strict: ties keep the lower id
                best = v;
                best_count = c;
            }
        }
        if (best == n1.size()) {
            break;
        }
        take(best);
    }
    std::vector<NodeId> out;
    for (std::size_t v = 0; v < n1.size(); ++v) {
        if (chosen[v]) {
            out.push_back(n1[v]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// OlsrState

OlsrState::OlsrState(NodeId self, std::size_t node_count, ProtocolConfig config)
    : self_(self), node_count_(node_count), config_(config)
{
    config_.validate();
}

bool OlsrState::is_sym_neighbor(NodeId n) const
{
    auto it = links_.find(n);
    return it != links_.end() && it->second.sym;
}

std::vector<NodeId> OlsrState::sym_neighbors() const
{
    std::vector<NodeId> out;
    for (const auto& [n, t] : links_) {
        if (t.sym) {
            out.push_back(n);
        }
    }
    return out;
}

std::vector<std::pair<NodeId, NodeId>> OlsrState::two_hop_pairs() const
{
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(two_hop_.size());
    for (const auto& [key, t] : two_hop_) {
        out.push_back(key);
    }
    return out;
}

std::vector<NodeId> OlsrState::selectors() const
{
    std::vector<NodeId> out;
    for (const auto& [n, t] : selectors_) {
        out.push_back(n);
    }
    return out;
}

HelloMessage OlsrState::make_hello() const
{
    HelloMessage h;
    h.originator = self_;
    const auto& mpr = mprs();
    for (const auto& [n, t] : links_) {
        LinkStatus s = LinkStatus::Asym;
        if (t.sym) {
            s = std::binary_search(mpr.begin(), mpr.end(), n) ? LinkStatus::Mpr : LinkStatus::Sym;
        }
        h.entries.push_back({n, s});
    }
    return h;
}

const std::vector<NodeId>& OlsrState::mprs() const
{
    if (mprs_dirty_) {
        mprs_ = select_mprs(self_, sym_neighbors(), two_hop_pairs());
        mprs_dirty_ = false;
    }
    return mprs_;
}

void OlsrState::set_selector(NodeId n, SimTime expires)
{
    auto [it, inserted] = selectors_.insert_or_assign(n, expires);
    (void)it;
    if (inserted) {
        ++ansn_;
    }
}

StateChange OlsrState::process_hello(const HelloMessage& msg, NodeId sender, SimTime now)
{
    StateChange ch;
    if (sender == self_ || msg.originator == self_) {
        return ch;
    }
    const SimTime until = now + config_.neighb_hold_time;

    const HelloEntry* me = nullptr;
    for (const auto& e : msg.entries) {
        if (e.neighbor == self_) {
            me = &e;
        }
    }

    auto [it, created] = links_.try_emplace(sender);
    LinkTuple& link = it->second;
    if (created) {
        link.sym_until = now - SimTime::from_us(1);
    }
    link.asym_until = until;
    link.expires = until;
    if (me != nullptr) {
        link.sym_until = until;
    }
    const bool was_sym = link.sym;
    link.sym = link.sym_until >= now;
    if (link.sym != was_sym) {
        ch.neighborhood = true;
        if (was_sym) {
            ch.lost_neighbors.push_back(sender);
        }
    }

    if (link.sym) {
        for (const auto& e : msg.entries) {
            if (e.neighbor == self_ || e.status == LinkStatus::Asym) {
                continue;
            }
            auto [t, fresh] = two_hop_.insert_or_assign({sender, e.neighbor}, until);
            (void)t;
            if (fresh) {
                ch.neighborhood = true;
            }
        }
        if (me != nullptr && me->status == LinkStatus::Mpr) {
            const bool before = selectors_.count(sender) != 0;
            set_selector(sender, until);
            ch.selectors = ch.selectors || !before;
        }
    } else {
        for (auto t = two_hop_.begin(); t != two_hop_.end();) {
            if (t->first.first == sender) {
                t = two_hop_.erase(t);
                ch.neighborhood = true;
            } else {
                ++t;
            }
        }
    }

    if (ch.neighborhood) {
        recompute_mprs();
        bump_view();
    }
    return ch;
}

std::optional<TcMessage> OlsrState::make_tc(bool force)
{
    if (selectors_.empty() && !config_.send_empty_tc && !force) {
        return std::nullopt;
    }
    TcMessage tc;
    tc.originator = self_;
    tc.msg_seq = ++msg_seq_;
    tc.ansn = ansn_;
    tc.advertised = selectors();
    return tc;
}

bool OlsrState::remember_message(NodeId originator, std::uint32_t seq, SimTime now)
{
    const SimTime until = now + config_.dup_hold_time;
    if (!duplicates_.try_emplace({originator, seq}, until).second) {
        return false;
    }
    duplicate_order_.push_back({until, {originator, seq}});
    return true;
}

StateChange OlsrState::process_tc(const TcMessage& msg, SimTime now)
{
    StateChange ch;
    if (msg.originator == self_) {
        return ch;
    }
    if (auto f = ansn_floor_.find(msg.originator); f != ansn_floor_.end() && msg.ansn < f->second) {
        return ch;
    }
    const auto first = topology_.lower_bound({msg.originator, 0});
    const auto last = topology_.lower_bound({msg.originator + 1, 0});
    for (auto it = first; it != last; ++it) {
        if (it->second.ansn > msg.ansn) {
            return ch;  // stale
        }
    }
    for (auto it = first; it != last;) {
        if (it->second.ansn < msg.ansn) {
            it = topology_.erase(it);
            ch.topology = true;
        } else {
            ++it;
        }
    }
    const SimTime until = now + config_.top_hold_time;
    for (NodeId dest : msg.advertised) {
        auto [it, fresh] = topology_.insert_or_assign({msg.originator, dest}, TopologyTuple{msg.ansn, until});
        (void)it;
        if (fresh) {
            ch.topology = true;
        }
    }
    if (ch.topology) {
        bump_view();
    }
    return ch;
}

StateChange OlsrState::expire(SimTime now)
{
    StateChange ch;
    for (auto it = links_.begin(); it != links_.end();) {
        LinkTuple& t = it->second;
        const NodeId n = it->first;
        const bool sym_now = t.sym_until >= now && t.expires >= now;
        if (t.sym && !sym_now) {
            t.sym = false;
            ch.neighborhood = true;
            ch.lost_neighbors.push_back(n);
        }
        if (t.expires < now) {
            it = links_.erase(it);
            ch.neighborhood = true;
        } else {
            ++it;
        }
    }
    for (auto it = two_hop_.begin(); it != two_hop_.end();) {
        if (it->second < now || !is_sym_neighbor(it->first.first)) {
            it = two_hop_.erase(it);
            ch.neighborhood = true;
        } else {
            ++it;
        }
    }
    for (auto it = selectors_.begin(); it != selectors_.end();) {
        if (it->second < now) {
            it = selectors_.erase(it);
            ++ansn_;
            ch.selectors = true;
        } else {
            ++it;
        }
    }
    for (auto it = topology_.begin(); it != topology_.end();) {
        if (it->second.expires < now) {
            it = topology_.erase(it);
            ch.topology = true;
        } else {
            ++it;
        }
    }
    // Entries are never refreshed, so insertion order is expiry order.
    while (!duplicate_order_.empty() && duplicate_order_.front().first < now) {
        duplicates_.erase(duplicate_order_.front().second);
        duplicate_order_.pop_front();
    }
    if (ch.neighborhood) {
        recompute_mprs();
    }
    if (ch.view()) {
        bump_view();
    }
    return ch;
}

std::optional<SimTime> OlsrState::next_expiry() const
{
    std::optional<SimTime> best;
    auto consider = [&](SimTime t) {
        if (!best || t < *best) {
            best = t;
        }
    };
    for (const auto& [n, t] : links_) {
        if (t.sym) {
            consider(std::min(t.sym_until, t.expires));
        }
        consider(t.expires);
    }
    for (const auto& [k, t] : two_hop_) {
        consider(t);
    }
    for (const auto& [k, t] : selectors_) {
        consider(t);
    }
    for (const auto& [k, t] : topology_) {
        consider(t.expires);
    }
    // Expiry happens strictly after the validity instant.
    if (best) {
        *best = *best + SimTime::from_us(1);
    }
    return best;
}

StateChange OlsrState::drop_neighbor(NodeId lost, bool purge_selector_too)
{
    StateChange ch;
    auto it = links_.find(lost);
    if (it != links_.end()) {
        if (it->second.sym) {
            ch.lost_neighbors.push_back(lost);
        }
        links_.erase(it);
        ch.neighborhood = true;
    }
    for (auto t = two_hop_.begin(); t != two_hop_.end();) {
        if (t->first.first == lost) {
            t = two_hop_.erase(t);
            ch.neighborhood = true;
        } else {
            ++t;
        }
    }
    if (purge_selector_too && purge_selector(lost)) {
        ch.selectors = true;
    }
    if (ch.neighborhood) {
        recompute_mprs();
        bump_view();
    }
    return ch;
}

bool OlsrState::purge_selector(NodeId neighbor)
{
    if (selectors_.erase(neighbor) == 0) {
        return false;
    }
    ++ansn_;
    return true;
}

StateChange OlsrState::forget_link(LinkId link)
{
    StateChange ch;
    ch.topology = topology_.erase({link.a, link.b}) + topology_.erase({link.b, link.a}) > 0;
    const bool two = two_hop_.erase({link.a, link.b}) + two_hop_.erase({link.b, link.a}) > 0;
    if (two) {
        ch.neighborhood = true;
        recompute_mprs();
    }
    if (ch.view()) {
        bump_view();
    }
    return ch;
}

void OlsrState::raise_ansn_floor(NodeId originator, std::uint32_t ansn)
{
    auto& f = ansn_floor_[originator];
    f = std::max(f, ansn);
}

ViewGraph OlsrState::view_graph() const
{
    std::vector<std::vector<NodeId>> adj(node_count_);
    for (const auto& [n, t] : links_) {
        if (t.sym) {
            adj[self_].push_back(n);
        }
    }
    for (const auto& [key, t] : two_hop_) {
        const auto [via, target] = key;
        if (target != self_ && is_sym_neighbor(via)) {
            adj[via].push_back(target);
        }
    }
    for (const auto& [key, t] : topology_) {
        const auto [last, dest] = key;
        adj[last].push_back(dest);
    }
    return ViewGraph(self_, std::move(adj));
}

const ViewGraph& OlsrState::view()
{
    if (view_cache_version_ != view_version_ || !view_cache_) {
        view_cache_ = view_graph();
        view_cache_version_ = view_version_;
    }
    return *view_cache_;
}

const RoutingTable& OlsrState::routes()
{
    if (routes_version_ != view_version_) {
        routes_ = shortest_routes(view());
        routes_version_ = view_version_;
    }
    return routes_;
}

} // namespace manetsim
