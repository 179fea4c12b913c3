#include "psys/topology.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace psys {

namespace {

std::string arc_str(const Arc& a) {
    return std::to_string(a.from) + "->" + std::to_string(a.to);
}

void sort_unique(NodeSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

}  // namespace

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::tree: return "tree";
        case TopologyKind::dag: return "dag";
        case TopologyKind::graph: return "graph";
    }
    return "?";
}

TopologyKind topology_kind_from_string(const std::string& s) {
    if (s == "tree") return TopologyKind::tree;
    if (s == "dag") return TopologyKind::dag;
    if (s == "graph") return TopologyKind::graph;
    throw ValidationError("unknown topology kind '" + s + "'");
}

void Topology::check_node(NodeId node) const {
    if (node < 1 || node > node_count_)
        throw ValidationError("node " + std::to_string(node) + " out of range 1.." +
                              std::to_string(node_count_));
}

Topology Topology::build(TopologyKind kind, NodeId node_count,
                         std::vector<Arc> arcs, bool include_siblings) {
    if (node_count == 0) throw ValidationError("node count must be positive");

    Topology t;
    t.kind_ = kind;
    t.node_count_ = node_count;
    t.include_siblings_ = (kind == TopologyKind::dag) && include_siblings;

    for (const Arc& a : arcs) {
        if (a.from < 1 || a.from > node_count || a.to < 1 || a.to > node_count)
            throw ValidationError("arc " + arc_str(a) + " has an endpoint outside 1.." +
                                  std::to_string(node_count));
        if (a.from == a.to)
            throw ValidationError("arc " + arc_str(a) + " is a self-loop");
    }

    if (kind == TopologyKind::graph) {
        // Stored arc set is the symmetric closure of the input.
        std::vector<Arc> closed;
        closed.reserve(arcs.size() * 2);
        for (const Arc& a : arcs) {
            closed.push_back(a);
            closed.push_back({a.to, a.from});
        }
        arcs = std::move(closed);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    t.arcs_ = std::move(arcs);

    const std::size_t n1 = static_cast<std::size_t>(node_count) + 1;
    t.parents_.assign(n1, {});
    t.children_.assign(n1, {});
    t.siblings_.assign(n1, {});
    t.neighbors_.assign(n1, {});

    if (kind == TopologyKind::graph) {
        for (const Arc& a : t.arcs_) t.neighbors_[a.from].push_back(a.to);
        for (NodeId x = 1; x <= node_count; ++x) sort_unique(t.neighbors_[x]);
    } else {
        for (const Arc& a : t.arcs_) {
            t.children_[a.from].push_back(a.to);
            t.parents_[a.to].push_back(a.from);
        }
        for (NodeId x = 1; x <= node_count; ++x) {
            sort_unique(t.children_[x]);
            sort_unique(t.parents_[x]);
        }

        // Acyclicity via Kahn's algorithm on parent counts.
        std::vector<std::size_t> pending(n1);
        std::deque<NodeId> ready;
        for (NodeId x = 1; x <= node_count; ++x) {
            pending[x] = t.parents_[x].size();
            if (pending[x] == 0) ready.push_back(x);
        }
        NodeId visited = 0;
        while (!ready.empty()) {
            NodeId x = ready.front();
            ready.pop_front();
            ++visited;
            for (NodeId c : t.children_[x])
                if (--pending[c] == 0) ready.push_back(c);
        }
        if (visited != node_count) {
            for (NodeId x = 1; x <= node_count; ++x)
                if (pending[x] > 0)
                    throw ValidationError("cycle detected through node " + std::to_string(x));
        }

        if (kind == TopologyKind::tree) {
            NodeId root = 0;
            for (NodeId x = 1; x <= node_count; ++x) {
                if (t.parents_[x].size() > 1)
                    throw ValidationError("node " + std::to_string(x) +
                                          " has multiple parents in a tree");
                if (t.parents_[x].empty()) {
                    if (root != 0)
                        throw ValidationError("multiple roots in tree: nodes " +
                                              std::to_string(root) + " and " + std::to_string(x));
                    root = x;
                }
            }
            if (root == 0) throw ValidationError("tree has no root");
        }

        for (NodeId x = 1; x <= node_count; ++x) {
            NodeSet sib;
            for (NodeId p : t.parents_[x])
                for (NodeId c : t.children_[p])
                    if (c != x) sib.push_back(c);
            sort_unique(sib);
            t.siblings_[x] = std::move(sib);

            NodeSet nb = t.children_[x];
            nb.insert(nb.end(), t.parents_[x].begin(), t.parents_[x].end());
            if (t.include_siblings_)
                nb.insert(nb.end(), t.siblings_[x].begin(), t.siblings_[x].end());
            sort_unique(nb);
            t.neighbors_[x] = std::move(nb);
        }
    }

    // Weak connectivity, arc direction ignored.
    if (node_count > 1) {
        std::vector<char> seen(n1, 0);
        std::deque<NodeId> queue{1};
        seen[1] = 1;
        NodeId reached = 1;
        std::vector<NodeSet> undirected(n1);
        for (const Arc& a : t.arcs_) {
            undirected[a.from].push_back(a.to);
            undirected[a.to].push_back(a.from);
        }
        while (!queue.empty()) {
            NodeId x = queue.front();
            queue.pop_front();
            for (NodeId y : undirected[x]) {
                if (!seen[y]) {
                    seen[y] = 1;
                    ++reached;
                    queue.push_back(y);
                }
            }
        }
        if (reached != node_count) {
            for (NodeId x = 1; x <= node_count; ++x)
                if (!seen[x])
                    throw ValidationError("structure is not connected: node " +
                                          std::to_string(x) + " is unreachable from node 1");
        }
    }

    return t;
}

const NodeSet& Topology::neighbors(NodeId node) const {
    check_node(node);
    return neighbors_[node];
}

const NodeSet& Topology::parents(NodeId node) const {
    check_node(node);
    return parents_[node];
}

const NodeSet& Topology::children(NodeId node) const {
    check_node(node);
    return children_[node];
}

const NodeSet& Topology::siblings(NodeId node) const {
    check_node(node);
    return siblings_[node];
}

Count LevelTable::peer_count_sum(NodeId x) const {
    Count u = 0;
    for (NodeId z : peers[x]) u += count[z];
    return u;
}

Count LevelTable::successor_count_sum(NodeId x) const {
    Count v = 0;
    for (NodeId s : successors[x]) v += count[s];
    return v;
}

LevelTable bfs_levels(const Topology& topology, NodeId commander) {
    topology.check_node(commander);
    const NodeId n = topology.node_count();
    const std::size_t n1 = static_cast<std::size_t>(n) + 1;

    constexpr std::uint32_t kUnset = 0xffffffffu;
    LevelTable lt;
    lt.commander = commander;
    lt.level.assign(n1, kUnset);
    lt.count.assign(n1, 0);
    lt.predecessors.assign(n1, {});
    lt.successors.assign(n1, {});
    lt.peers.assign(n1, {});

    std::deque<NodeId> queue{commander};
    lt.level[commander] = 0;
    lt.count[commander] = 1;
    while (!queue.empty()) {
        NodeId x = queue.front();
        queue.pop_front();
        for (NodeId y : topology.neighbors(x)) {
            if (lt.level[y] == kUnset) {
                queue.push_back(y);
                lt.level[y] = lt.level[x] + 1;
            }
            if (lt.level[y] == lt.level[x] + 1) {
                if (lt.count[y] > std::numeric_limits<Count>::max() - lt.count[x])
                    throw CountOverflow("level-preserving path count overflow at node " +
                                        std::to_string(y));
                lt.count[y] += lt.count[x];
            }
        }
    }

    lt.eccentricity = 0;
    for (NodeId x = 1; x <= n; ++x) {
        lt.eccentricity = std::max(lt.eccentricity, lt.level[x]);
        for (NodeId y : topology.neighbors(x)) {
            if (lt.level[y] == lt.level[x] + 1) lt.successors[x].push_back(y);
            else if (lt.level[y] + 1 == lt.level[x]) lt.predecessors[x].push_back(y);
            else if (lt.level[y] == lt.level[x]) lt.peers[x].push_back(y);
        }
    }
    return lt;
}

std::vector<Count> brute_force_counts(const Topology& topology, NodeId commander) {
    topology.check_node(commander);
    const NodeId n = topology.node_count();
    if (n > 15)
        throw ValidationError("brute-force path enumeration limited to 15 nodes, got " +
                              std::to_string(n));

    // Distances by repeated relaxation over the symmetric Neighbor relation,
    // independent of the BFS implementation under test.
    const std::uint32_t inf = 0xffffffffu;
    std::vector<std::uint32_t> dist(n + 1, inf);
    dist[commander] = 0;
    for (NodeId round = 0; round < n; ++round) {
        bool changed = false;
        for (NodeId x = 1; x <= n; ++x) {
            if (dist[x] == inf) continue;
            for (NodeId y : topology.neighbors(x)) {
                if (dist[x] + 1 < dist[y]) {
                    dist[y] = dist[x] + 1;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }

    std::vector<Count> totals(n + 1, 0);
    // DFS over paths whose i-th node sits at distance i; levels strictly
    // increase along such a path, so every enumerated path is simple.
    auto dfs = [&](auto&& self, NodeId x) -> void {
        totals[x] += 1;
        for (NodeId y : topology.neighbors(x)) {
            if (dist[y] == dist[x] + 1) self(self, y);
        }
    };
    dfs(dfs, commander);
    return totals;
}

}  // namespace psys
