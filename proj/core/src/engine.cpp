#include "psys/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace psys {

namespace {

bool holds_any(const Multiset& content, const std::vector<Symbol>& symbols) {
    for (Symbol s : symbols)
        if (content.count(s) > 0) return true;
    return false;
}

}  // namespace

void SystemConfig::validate() const {
    if (!topology || !program) throw ValidationError("configuration missing topology or program");
    if (cells.size() != static_cast<std::size_t>(topology->node_count()) + 1)
        throw ValidationError("configuration has " + std::to_string(cells.size() ? cells.size() - 1 : 0) +
                              " cells for " + std::to_string(topology->node_count()) + " nodes");
    program->validate();
    if (topology->kind() == TopologyKind::graph) {
        for (Transfer t : {Transfer::up, Transfer::down, Transfer::side}) {
            if (program->uses_transfer(t))
                throw ValidationError("program uses '" + to_string(t) +
                                      "' transfers on a graph topology");
        }
    }
    if (channels) {
        auto check_symbol = [&](Symbol s) {
            if (s >= program->alphabet.size())
                throw ValidationError("channel policy symbol out of range");
        };
        check_symbol(channels->anchor);
        for (Symbol s : channels->mobile) check_symbol(s);
        for (Symbol s : channels->fixed) check_symbol(s);
        for (Symbol s : channels->mobile) {
            if (s == channels->anchor ||
                std::binary_search(channels->fixed.begin(), channels->fixed.end(), s))
                throw ValidationError("channel policy symbol groups overlap");
        }
        if (std::binary_search(channels->fixed.begin(), channels->fixed.end(), channels->anchor))
            throw ValidationError("channel policy symbol groups overlap");
    }
}

SystemConfig make_config(std::shared_ptr<const Topology> topology,
                         std::shared_ptr<const RuleProgram> program,
                         std::optional<ChannelPolicy> channels) {
    SystemConfig cfg;
    cfg.topology = std::move(topology);
    cfg.program = std::move(program);
    cfg.channels = std::move(channels);
    cfg.cells.assign(static_cast<std::size_t>(cfg.topology->node_count()) + 1, Cell{});
    cfg.validate();
    return cfg;
}

ApplyResult apply_cell(StateId state, const Multiset& content, const RuleProgram& program) {
    ApplyResult result;
    result.target = state;
    result.leftover = content;

    bool committed = false;
    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& r = program.rules[i];
        if (r.source != state) continue;
        if (committed && r.target != result.target) continue;

        Count times = 0;
        while (result.leftover.contains(r.lhs)) {
            result.leftover.subtract(r.lhs);
            ++times;
            if (program.mode == RewriteMode::min) break;
        }
        if (times == 0) continue;

        if (!committed) {
            committed = true;
            result.target = r.target;
        }
        result.produced_here.add_scaled(r.produced_here, times);
        for (std::size_t t = 0; t < kTransferCount; ++t)
            result.emissions[t].add_scaled(r.emissions[t], times);
        result.applications.push_back({i, times});
    }
    return result;
}

NodeSet effective_neighbors(const SystemConfig& config, NodeId cell) {
    config.topology->check_node(cell);
    NodeSet result = config.topology->neighbors(cell);
    if (config.channels) {
        const ChannelPolicy& policy = *config.channels;
        const NodeId n = config.topology->node_count();
        auto holds_endpoint = [&](NodeId x) {
            return holds_any(config.cells[x].content, policy.mobile) ||
                   holds_any(config.cells[x].content, policy.fixed);
        };
        const bool cell_is_anchor = config.cells[cell].content.count(policy.anchor) > 0;
        const bool cell_is_endpoint = holds_endpoint(cell);
        for (NodeId other = 1; other <= n; ++other) {
            if (other == cell) continue;
            const bool other_is_anchor = config.cells[other].content.count(policy.anchor) > 0;
            if ((cell_is_anchor && holds_endpoint(other)) ||
                (cell_is_endpoint && other_is_anchor))
                result.push_back(other);
        }
        std::sort(result.begin(), result.end());
        result.erase(std::unique(result.begin(), result.end()), result.end());
    }
    return result;
}

StepReport step(SystemConfig& config) {
    const NodeId n = config.topology->node_count();
    const RuleProgram& program = *config.program;

    StepReport report;
    report.cells.assign(static_cast<std::size_t>(n) + 1, CellReport{});

    // Phase 1: evaluate every cell against the step-start snapshot.
    std::vector<ApplyResult> results(static_cast<std::size_t>(n) + 1);
    bool any_application = false;
    for (NodeId x = 1; x <= n; ++x) {
        try {
            results[x] = apply_cell(config.cells[x].state, config.cells[x].content, program);
        } catch (const CountOverflow&) {
            throw CountOverflow("object count overflow in cell " + std::to_string(x) +
                                " at step " + std::to_string(config.step_index));
        }
        if (!results[x].applications.empty()) any_application = true;
    }

    // Phase 2: route emissions, still against the snapshot.
    std::vector<Multiset> delivered(static_cast<std::size_t>(n) + 1);
    bool any_delivery = false;
    auto deliver = [&](NodeId target, const Multiset& m) {
        if (m.empty()) return;
        try {
            delivered[target].add(m);
        } catch (const CountOverflow&) {
            throw CountOverflow("object count overflow delivering to cell " +
                                std::to_string(target) + " at step " +
                                std::to_string(config.step_index));
        }
        any_delivery = true;
    };
    for (NodeId x = 1; x <= n; ++x) {
        const ApplyResult& r = results[x];
        const Multiset& go = r.emissions[static_cast<std::size_t>(Transfer::go)];
        if (!go.empty())
            for (NodeId y : effective_neighbors(config, x)) deliver(y, go);
        const Multiset& up = r.emissions[static_cast<std::size_t>(Transfer::up)];
        if (!up.empty())
            for (NodeId y : config.topology->parents(x)) deliver(y, up);
        const Multiset& down = r.emissions[static_cast<std::size_t>(Transfer::down)];
        if (!down.empty())
            for (NodeId y : config.topology->children(x)) deliver(y, down);
        const Multiset& side = r.emissions[static_cast<std::size_t>(Transfer::side)];
        if (!side.empty())
            for (NodeId y : config.topology->siblings(x)) deliver(y, side);
        const Multiset& out = r.emissions[static_cast<std::size_t>(Transfer::out)];
        if (!out.empty()) config.environment.add(out);
    }

    // Phase 3: commit.
    for (NodeId x = 1; x <= n; ++x) {
        ApplyResult& r = results[x];
        Cell& cell = config.cells[x];
        cell.state = r.target;
        Multiset next = std::move(r.leftover);
        try {
            next.add(r.produced_here);
            next.add(delivered[x]);
        } catch (const CountOverflow&) {
            throw CountOverflow("object count overflow in cell " + std::to_string(x) +
                                " at step " + std::to_string(config.step_index));
        }
        cell.content = std::move(next);
        report.cells[x].applied = std::move(r.applications);
        report.cells[x].next_state = cell.state;
        report.cells[x].delivered = std::move(delivered[x]);
    }
    config.step_index += 1;
    report.quiescent = !any_application && !any_delivery;
    return report;
}

RunResult run(SystemConfig config, const StopCondition& stop) {
    if (stop.max_steps == 0)
        throw ValidationError("run requires a positive step budget");

    RunResult result;
    auto record = [&]() {
        result.trace.rows.push_back(config.cells);
    };
    record();
    while (true) {
        if (stop.predicate && stop.predicate(config)) {
            result.outcome = RunOutcome::predicate;
            break;
        }
        if (result.steps >= stop.max_steps) {
            result.outcome = RunOutcome::budget_exhausted;
            break;
        }
        StepReport report = step(config);
        ++result.steps;
        if (report.quiescent) {
            // The quiescent step changes nothing; the last recorded row
            // already shows the fixed point.
            result.outcome = RunOutcome::quiescent;
            break;
        }
        record();
    }
    result.final_config = std::move(config);
    return result;
}

}  // namespace psys
