#include "manetsim/mpolsr.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace manetsim {

Disjointness parse_disjointness(const std::string& s)
{
    if (s == "node" || s == "node-disjoint") {
        return Disjointness::Node;
    }
    if (s == "link" || s == "link-disjoint") {
        return Disjointness::Link;
    }
    throw std::invalid_argument("unknown disjointness mode '" + s + "'");
}

const char* to_string(Disjointness d)
{
    return d == Disjointness::Node ? "node-disjoint" : "link-disjoint";
}

void MultipathCostConfig::validate() const
{
    if (!(node_penalty_factor >= 1.0) || !(edge_penalty_factor >= 1.0)) {
        throw std::invalid_argument("mpolsr: penalty factors must be >= 1");
    }
    if (k == 0) {
        throw std::invalid_argument("mpolsr: k must be >= 1");
    }
}

std::optional<Path> PathSet::next(const std::function<bool(const Path&)>& valid)
{
    for (std::size_t i = 0; i < paths_.size(); ++i) {
        const Path& p = paths_[(rr_index_ + i) % paths_.size()];
        if (valid(p)) {
            rr_index_ = (rr_index_ + i + 1) % paths_.size();
            return p;
        }
    }
    return std::nullopt;
}

bool node_disjoint(const Path& a, const Path& b)
{
    if (a.size() < 2 || b.size() < 2) {
        return true;
    }
    std::set<NodeId> inner(a.begin() + 1, a.end() - 1);
    for (std::size_t i = 1; i + 1 < b.size(); ++i) {
        if (inner.count(b[i]) != 0) {
            return false;
        }
    }
    return true;
}

bool path_uses_link(const Path& p, LinkId link)
{
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (LinkId::of(p[i], p[i + 1]) == link) {
            return true;
        }
    }
    return false;
}

bool link_disjoint(const Path& a, const Path& b)
{
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        if (path_uses_link(b, LinkId::of(a[i], a[i + 1]))) {
            return false;
        }
    }
    return true;
}

bool path_in_view(const ViewGraph& view, const Path& p)
{
    if (p.empty() || p.front() != view.self()) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (!view.has_edge(p[i], p[i + 1])) {
            return false;
        }
    }
    return true;
}

namespace {

struct Label {
    double cost = std::numeric_limits<double>::infinity();
    NodeId next_hop = kNoNode;
    NodeId parent = kNoNode;
};

bool better(const Label& a, const Label& b)
{
    return std::tie(a.cost, a.next_hop, a.parent) < std::tie(b.cost, b.next_hop, b.parent);
}

// Weighted Dijkstra over `view` with per-edge costs aligned to view.out(u).
std::optional<Path> cheapest_path(const ViewGraph& view, const std::vector<std::vector<double>>& cost, NodeId source,
                                  NodeId destination)
{
    using Item = std::tuple<double, NodeId, NodeId, NodeId>;  // cost, next_hop, parent, node
    const std::size_t n = view.node_count();
    std::vector<Label> label(n);
    std::vector<bool> done(n, false);
    label[source].cost = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    open.emplace(0.0, kNoNode, kNoNode, source);
    while (!open.empty()) {
        auto [c, nh, par, u] = open.top();
        open.pop();
        if (done[u] || std::tie(c, nh, par) != std::tie(label[u].cost, label[u].next_hop, label[u].parent)) {
            continue;
        }
        done[u] = true;
        if (u == destination) {
            break;
        }
        const auto& out = view.out(u);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const NodeId v = out[i];
            if (done[v]) {
                continue;
            }
            Label cand{c + cost[u][i], u == source ? v : label[u].next_hop, u};
            if (better(cand, label[v])) {
                label[v] = cand;
                open.emplace(cand.cost, cand.next_hop, cand.parent, v);
            }
        }
    }
    if (!done[destination]) {
        return std::nullopt;
    }
    Path p;
    for (NodeId cur = destination; cur != source; cur = label[cur].parent) {
        p.push_back(cur);
    }
    p.push_back(source);
    std::reverse(p.begin(), p.end());
    return p;
}

void scale_edge(const ViewGraph& view, std::vector<std::vector<double>>& cost, NodeId u, NodeId v, double f)
{
    const auto& out = view.out(u);
    auto it = std::lower_bound(out.begin(), out.end(), v);
    if (it != out.end() && *it == v) {
        cost[u][static_cast<std::size_t>(it - out.begin())] *= f;
    }
}

} // namespace

PathSet multipath_dijkstra(const ViewGraph& view, NodeId source, NodeId destination, const MultipathCostConfig& cfg)
{
    cfg.validate();
    if (source == destination) {
        return PathSet{};
    }
    std::vector<std::vector<double>> cost(view.node_count());
    for (NodeId u = 0; u < view.node_count(); ++u) {
        cost[u].assign(view.out(u).size(), 1.0);
    }

    std::vector<std::vector<NodeId>> incoming(view.node_count());
    for (NodeId u = 0; u < view.node_count(); ++u) {
        for (NodeId v : view.out(u)) {
            incoming[v].push_back(u);
        }
    }

    std::vector<Path> accepted;
    // Each round multiplies at least one edge; the bound keeps pathological
    // views from looping while leaving room to escape repeated candidates.
    const std::size_t max_rounds = cfg.k + view.node_count();
    for (std::size_t round = 0; round < max_rounds && accepted.size() < cfg.k; ++round) {
        auto found = cheapest_path(view, cost, source, destination);
        if (!found) {
            break;
        }
        const Path& p = *found;
        const bool repeat = std::find(accepted.begin(), accepted.end(), p) != accepted.end();
        bool compatible = !repeat;
        for (const Path& q : accepted) {
            if (!compatible) {
                break;
            }
            compatible = cfg.disjointness == Disjointness::Node ? node_disjoint(p, q) : link_disjoint(p, q);
        }
        if (compatible) {
            accepted.push_back(p);
        }
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            scale_edge(view, cost, p[i], p[i + 1], cfg.edge_penalty_factor);
            scale_edge(view, cost, p[i + 1], p[i], cfg.edge_penalty_factor);
        }
        if (cfg.disjointness == Disjointness::Node) {
            for (std::size_t i = 1; i + 1 < p.size(); ++i) {
                const NodeId m = p[i];
                for (auto& c : cost[m]) {
                    c *= cfg.node_penalty_factor;
                }
                for (NodeId u : incoming[m]) {
                    if (u != m) {
                        scale_edge(view, cost, u, m, cfg.node_penalty_factor);
                    }
                }
            }
        }
        // A single-hop path has nothing left to penalize but its own edge;
        // once it repeats, no other candidate can ever win.
        if (repeat && p.size() == 2 && cfg.edge_penalty_factor == 1.0) {
            break;
        }
    }
    return PathSet{std::move(accepted)};
}

std::optional<Path> recovery_route(const ViewGraph& view, NodeId node, NodeId destination,
                                   const std::vector<NodeId>& visited)
{
    std::vector<bool> excluded(view.node_count(), false);
    for (NodeId v : visited) {
        if (v != node) {
            excluded.at(v) = true;
        }
    }
    if (excluded.at(destination)) {
        return std::nullopt;
    }
    RoutingTable t = shortest_routes(view, &excluded);
    Path p = t.path_to(destination);
    if (p.empty()) {
        return std::nullopt;
    }
    return p;
}

} // namespace manetsim
