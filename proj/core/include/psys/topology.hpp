#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "psys/multiset.hpp"

namespace psys {

using NodeId = std::uint32_t;           // node identifiers are 1..node_count
using NodeSet = std::vector<NodeId>;    // always sorted ascending

enum class TopologyKind { tree, dag, graph };

std::string to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(const std::string& s);

struct Arc {
    NodeId from{};
    NodeId to{};
    friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Structural validation failed (bad arc, cycle, disconnected, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Static cell structure. Immutable after build; all accessors are
// read-only and safe to share across threads.
class Topology {
public:
    static Topology build(TopologyKind kind, NodeId node_count,
                          std::vector<Arc> arcs, bool include_siblings = false);

    TopologyKind kind() const { return kind_; }
    NodeId node_count() const { return node_count_; }
    bool include_siblings() const { return include_siblings_; }
    const std::vector<Arc>& arcs() const { return arcs_; }

    // Symmetric adjacency used for `go` transfers:
    // tree: parent+children; dag: parents+children (+siblings if enabled);
    // graph: the stored adjacency.
    const NodeSet& neighbors(NodeId node) const;

    // Defined for tree/dag only; empty sets on graphs.
    const NodeSet& parents(NodeId node) const;
    const NodeSet& children(NodeId node) const;
    const NodeSet& siblings(NodeId node) const;

    void check_node(NodeId node) const;

private:
    Topology() = default;

    TopologyKind kind_{};
    NodeId node_count_{};
    bool include_siblings_{};
    std::vector<Arc> arcs_;
    std::vector<NodeSet> neighbors_, parents_, children_, siblings_;
};

// Level structure rooted at a commander: distances over the Neighbor
// relation, level-preserving path counts, and the induced virtual dag.
struct LevelTable {
    NodeId commander{};
    std::vector<std::uint32_t> level;   // index 0 unused
    std::vector<Count> count;
    std::vector<NodeSet> predecessors, successors, peers;
    std::uint32_t eccentricity{};

    bool terminal(NodeId x) const { return successors[x].empty(); }
    Count peer_count_sum(NodeId x) const;        // total count over peers
    Count successor_count_sum(NodeId x) const;   // total count over successors
};

LevelTable bfs_levels(const Topology& topology, NodeId commander);

// Exhaustive level-preserving path enumeration; test oracle for the
// counts produced by bfs_levels. Limited to node_count <= 15.
std::vector<Count> brute_force_counts(const Topology& topology, NodeId commander);

}  // namespace psys
