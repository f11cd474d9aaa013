#pragma once

#include "manetsim/messages.hpp"
#include "manetsim/olsr.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace manetsim {

enum class Disjointness { Node, Link };

Disjointness parse_disjointness(const std::string& s);
const char* to_string(Disjointness d);

struct MultipathCostConfig {
    double node_penalty_factor = 3.0;
    double edge_penalty_factor = 2.0;
    Disjointness disjointness = Disjointness::Node;
    std::size_t k = 2;

    void validate() const;
};

using Path = std::vector<NodeId>;

/// Up to k paths from source to destination for round-robin use.
class PathSet {
public:
    PathSet() = default;
    explicit PathSet(std::vector<Path> paths, std::size_t rr_index = 0)
        : paths_(std::move(paths)), rr_index_(paths_.empty() ? 0 : rr_index % paths_.size())
    {
    }

    const std::vector<Path>& paths() const { return paths_; }
    bool empty() const { return paths_.empty(); }
    std::size_t size() const { return paths_.size(); }
    std::size_t rr_index() const { return rr_index_; }

    /// Next path in round-robin order among those accepted by `valid`;
    /// the pointer advances by one per call that returns a path.
    std::optional<Path> next(const std::function<bool(const Path&)>& valid);

private:
    std::vector<Path> paths_;
    std::size_t rr_index_ = 0;
};

/// Iterated Dijkstra with multiplicative penalties.
///
/// After each round the edges of the found path are multiplied by
/// edge_penalty_factor and, in node-disjoint mode, every edge touching one
/// of its intermediate nodes by node_penalty_factor. Candidates that repeat
/// a path or break the disjointness mode are not kept; the search stops
/// after k accepted paths or when penalties no longer produce new ones.
PathSet multipath_dijkstra(const ViewGraph& view, NodeId source, NodeId destination, const MultipathCostConfig& cfg);

bool node_disjoint(const Path& a, const Path& b);
bool link_disjoint(const Path& a, const Path& b);
bool path_uses_link(const Path& p, LinkId link);
bool path_in_view(const ViewGraph& view, const Path& p);

/// Replacement route from `node` to `destination` that avoids every node in
/// `visited` (the part of the route already travelled). Hop-count metric.
std::optional<Path> recovery_route(const ViewGraph& view, NodeId node, NodeId destination,
                                   const std::vector<NodeId>& visited);

} // namespace manetsim
