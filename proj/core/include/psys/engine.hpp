#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "psys/rules.hpp"
#include "psys/topology.hpp"

namespace psys {

struct Cell {
    StateId state{};
    Multiset content;
    bool operator==(const Cell&) const = default;
};

// One system configuration: per-cell state+content over a topology, advanced
// synchronously. A step is a pure function of the configuration; advance one
// config from one logical thread at a time.
struct SystemConfig {
    std::shared_ptr<const Topology> topology;
    std::shared_ptr<const RuleProgram> program;
    std::vector<Cell> cells;  // index 0 unused, 1..node_count
    std::optional<ChannelPolicy> channels;
    Multiset environment;
    std::uint64_t step_index = 0;

    // Rejects tag/topology mismatches (up/down/side on a graph) and
    // malformed channel policies before any step runs.
    void validate() const;
};

SystemConfig make_config(std::shared_ptr<const Topology> topology,
                         std::shared_ptr<const RuleProgram> program,
                         std::optional<ChannelPolicy> channels = std::nullopt);

struct RuleApplication {
    std::size_t rule_index{};
    Count times{};
};

struct CellReport {
    std::vector<RuleApplication> applied;
    StateId next_state{};
    Multiset delivered;
};

struct StepReport {
    std::vector<CellReport> cells;  // index 0 unused
    bool quiescent = false;
};

struct ApplyResult {
    StateId target{};
    Multiset leftover;
    Multiset produced_here;
    std::array<Multiset, kTransferCount> emissions;
    std::vector<RuleApplication> applications;

    const Multiset& emission(Transfer t) const {
        return emissions[static_cast<std::size_t>(t)];
    }
};

// Weak-priority rule selection for one cell against a content snapshot.
// Rules are scanned in priority order; the first applied rule commits the
// step's target state and later rules apply only if they agree with it.
// In max mode each rule is re-applied while its left-hand side remains
// available; products are never available within the same step.
ApplyResult apply_cell(StateId state, const Multiset& content, const RuleProgram& program);

// Neighbors a cell can reach with `go` this step: the static Neighbor
// relation plus, under a channel policy, the dynamic arcs between the
// anchor-holding cells and every other cell holding a mobile or fixed
// endpoint. Evaluated against the step-start snapshot; duplicates collapse.
NodeSet effective_neighbors(const SystemConfig& config, NodeId cell);

// Advances the configuration by one synchronous step.
StepReport step(SystemConfig& config);

struct Trace {
    std::vector<std::vector<Cell>> rows;  // rows[t][node], index 0 unused
    std::size_t row_count() const { return rows.size(); }
    const Cell& at(std::size_t row, NodeId node) const { return rows[row][node]; }
};

enum class RunOutcome { quiescent, predicate, budget_exhausted };

struct StopCondition {
    // Optional early stop, checked on each recorded configuration.
    std::function<bool(const SystemConfig&)> predicate;
    // Mandatory hard budget; exhausting it is surfaced, not hidden.
    std::uint64_t max_steps = 0;
};

struct RunResult {
    Trace trace;
    RunOutcome outcome{};
    std::uint64_t steps = 0;
    SystemConfig final_config;
};

RunResult run(SystemConfig config, const StopCondition& stop);

}  // namespace psys
