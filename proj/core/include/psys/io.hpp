#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "psys/dsl.hpp"
#include "psys/engine.hpp"
#include "psys/fssp.hpp"

namespace psys {

// Topology file: line-oriented text, '#' comments.
//   kind: tree|dag|graph
//   nodes: N
//   siblings: true|false     (optional, dag only)
//   arc: u v                 (one per arc)
Topology parse_topology(const std::string& text);
std::string serialize_topology(const Topology& topology);

// Instance file:
//   topology: <path>
//   commander: c
//   squad: i,j,k
//   variant: static|dynamic
struct InstanceSpec {
    std::string topology_path;
    NodeId commander{};
    std::vector<NodeId> squad;
    Variant variant{};
};
InstanceSpec parse_instance_spec(const std::string& text);
std::string serialize_instance_spec(const InstanceSpec& spec);

// Loads an instance file; the topology path resolves relative to the
// instance file's directory.
struct LoadedInstance {
    InstanceSpec spec;
    Topology topology;
};
LoadedInstance load_instance_file(const std::filesystem::path& path);

// Canonical trace TSV: header `step` plus one label per cell column, one
// row per step, cells rendered as `state obj obj^n ...`. Byte-stable.
std::string trace_to_tsv(const Trace& trace, const RuleProgram& program,
                         const std::vector<NodeId>& column_order,
                         const std::vector<std::string>& labels);

// Parses a trace TSV against the expected labels (trace files are only
// meaningful next to their instance). Column order is taken from the file
// header; rows come back indexed by node id.
Trace trace_from_tsv(const std::string& text, const RuleProgram& program,
                     const std::vector<NodeId>& column_order,
                     const std::vector<std::string>& labels);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace psys
