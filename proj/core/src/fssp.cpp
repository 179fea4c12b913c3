#include "psys/fssp.hpp"

#include <algorithm>

#include "psys/dsl.hpp"

namespace psys {

namespace {

// Mobile-channel synchronization, flat rule labels.
constexpr const char* kDynamicText = R"(# Mobile-channel synchronization program.
alphabet: f alpha omega theta phi
states: s0 s1 s2 s3 s4 sphi
firing: sphi
mode: max

1: s0 alpha -> s2 alpha theta_go
2: s0 f theta -> s4 f omega theta_go
3: s0 theta -> s1 theta_go
4: s1 theta -> s1
5: s2 alpha -> s3 alpha
6: s3 theta -> s3
7: s3 f alpha -> s4 f alpha phi phi_go
8: s3 alpha -> s1 alpha phi_go
9: s4 f phi -> sphi
10: s4 theta -> s4
)";

// Four-phase synchronization: broadcast, convergecast, second broadcast,
// countdown. Rule order is priority order.
constexpr const char* kStaticText = R"(# Four-phase synchronization program.
alphabet: a b c d e f g h k l p q
states: s0 s1 s2 s3 s4 s5 s6 s7 s8 s9
firing: s9
mode: max

s0 a -> s1 a e d_go
s0 d -> s1 a d_go
s1 a e -> s2 a e e k
s1 a -> s2 a k
s1 d -> s2 l
s2 k -> s2
s2 a e -> s3 a e e
s2 d -> s3 d
s2 a -> s6 a c_go
s2 l -> s3 l g_go
s2 g -> s3
s2 a e -> s2 a e e
s3 a e -> s4 a e e
s3 a -> s4 a
s3 g -> s4 p
s3 c -> s4
s4 c d -> s4
s4 a d e -> s4 a d e e
s4 d -> s4 d
s4 a e e e e e -> s6 a e e e
s4 e e e e e -> s6 e
s4 a -> s5 a k
s4 l -> s5 l h_go
s4 h -> s5
s4 q -> s5
s4 c -> s6
s4 g -> s6
s4 h -> s6
s4 q -> s6
s5 k -> s5
s5 a -> s6 a c_go
s5 h p -> s5 p
s5 p q -> s5
s5 p -> s5 k p
s5 l -> s5 l h_go
s5 l -> s6 q_go
s6 a e -> s7 a k
s6 e -> s7 b e_go
s6 c -> s6
s6 g -> s6
s6 h -> s6
s6 p -> s6
s6 q -> s6
s7 k -> s7
s7 a -> s8 a
s7 e -> s8
s8 a b -> s8 a
s8 a f -> s9
s8 a -> s0
s8 a -> s9
)";

Symbol require_symbol(const RuleProgram& prog, const std::string& name) {
    auto s = prog.find_symbol(name);
    if (!s) throw ValidationError("program is missing required symbol '" + name + "'");
    return *s;
}

StateId require_state(const RuleProgram& prog, const std::string& name) {
    auto s = prog.find_state(name);
    if (!s) throw ValidationError("program is missing required state '" + name + "'");
    return *s;
}

std::vector<NodeId> normalize_squad(std::vector<NodeId> squad, NodeId max_node) {
    if (squad.empty())
        throw ValidationError("squad is empty: nothing to synchronize");
    std::sort(squad.begin(), squad.end());
    squad.erase(std::unique(squad.begin(), squad.end()), squad.end());
    for (NodeId x : squad)
        if (x < 1 || x > max_node)
            throw ValidationError("squad node " + std::to_string(x) + " out of range 1.." +
                                  std::to_string(max_node));
    return squad;
}

}  // namespace

std::string to_string(Variant v) {
    return v == Variant::dynamic_channels ? "dynamic" : "static";
}

Variant variant_from_string(const std::string& s) {
    if (s == "dynamic") return Variant::dynamic_channels;
    if (s == "static") return Variant::static_rules;
    throw ValidationError("unknown variant '" + s + "' (expected dynamic or static)");
}

const std::string& dynamic_program_text() {
    static const std::string text = kDynamicText;
    return text;
}

const std::string& static_program_text() {
    static const std::string text = kStaticText;
    return text;
}

std::shared_ptr<const RuleProgram> dynamic_program() {
    static const auto prog =
        std::make_shared<const RuleProgram>(parse_rules(dynamic_program_text()).program);
    return prog;
}

std::shared_ptr<const RuleProgram> static_program() {
    static const auto prog =
        std::make_shared<const RuleProgram>(parse_rules(static_program_text()).program);
    return prog;
}

bool FsspInstance::in_squad(NodeId x) const {
    return std::binary_search(squad.begin(), squad.end(), x);
}

std::vector<NodeId> FsspInstance::display_order() const {
    std::vector<NodeId> order;
    for (NodeId x = 1; x <= original->node_count(); ++x) order.push_back(x);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (levels.level[a] != levels.level[b]) return levels.level[a] < levels.level[b];
        return a < b;
    });
    if (sergeant) order.insert(order.begin(), *sergeant);
    return order;
}

std::vector<std::string> FsspInstance::labels() const {
    std::vector<std::string> out;
    for (NodeId x : display_order()) out.push_back("sigma_" + std::to_string(x));
    return out;
}

FsspInstance build_dynamic_instance(const Topology& topology, NodeId commander,
                                    std::vector<NodeId> squad,
                                    std::shared_ptr<const RuleProgram> program_override) {
    topology.check_node(commander);
    const NodeId n = topology.node_count();
    const NodeId sergeant = n + 1;
    squad = normalize_squad(std::move(squad), sergeant);

    FsspInstance inst;
    inst.variant = Variant::dynamic_channels;
    inst.original = std::make_shared<Topology>(topology);
    inst.commander = commander;
    inst.sergeant = sergeant;
    inst.squad = std::move(squad);
    inst.levels = bfs_levels(topology, commander);

    std::vector<Arc> arcs = topology.arcs();
    arcs.push_back({sergeant, commander});
    const bool graph = topology.kind() == TopologyKind::graph;
    // Trees are rebuilt as dags: the sergeant arc can give the commander a
    // second parent.
    inst.structure = std::make_shared<Topology>(
        Topology::build(graph ? TopologyKind::graph : TopologyKind::dag, sergeant,
                        std::move(arcs), topology.include_siblings()));

    auto program = program_override ? std::move(program_override) : dynamic_program();
    ChannelPolicy policy;
    policy.anchor = require_symbol(*program, "alpha");
    policy.mobile = {require_symbol(*program, "theta")};
    policy.fixed = {require_symbol(*program, "omega")};
    const Symbol f = require_symbol(*program, "f");

    inst.config = make_config(inst.structure, std::move(program), policy);
    inst.config.cells[sergeant].content.add(policy.anchor);
    for (NodeId x : inst.squad) inst.config.cells[x].content.add(f);
    return inst;
}

FsspInstance build_static_instance(const Topology& topology, NodeId commander,
                                   std::vector<NodeId> squad,
                                   std::shared_ptr<const RuleProgram> program_override) {
    topology.check_node(commander);
    if (topology.node_count() < 2)
        throw ValidationError("static variant requires more than one cell");
    squad = normalize_squad(std::move(squad), topology.node_count());

    FsspInstance inst;
    inst.variant = Variant::static_rules;
    inst.original = std::make_shared<Topology>(topology);
    inst.structure = inst.original;
    inst.commander = commander;
    inst.squad = std::move(squad);
    inst.levels = bfs_levels(topology, commander);

    auto program = program_override ? std::move(program_override) : static_program();
    const Symbol a = require_symbol(*program, "a");
    const Symbol f = require_symbol(*program, "f");

    inst.config = make_config(inst.structure, std::move(program), std::nullopt);
    inst.config.cells[commander].content.add(a);
    for (NodeId x : inst.squad) inst.config.cells[x].content.add(f);
    return inst;
}

std::uint64_t expected_firing_step(Variant variant, const LevelTable& levels) {
    const std::uint64_t e = levels.eccentricity;
    return variant == Variant::dynamic_channels ? e + 5 : 6 * e + 7;
}

std::uint64_t default_step_budget(const LevelTable& levels) {
    return 10 * (6 * static_cast<std::uint64_t>(levels.eccentricity) + 7);
}

RunResult run_instance(const FsspInstance& instance, std::uint64_t max_steps) {
    StopCondition stop;
    stop.max_steps = max_steps ? max_steps : default_step_budget(instance.levels);
    return run(instance.config, stop);
}

namespace {

struct Expect {
    StateId state;
    Multiset content;
};

bool check_cell(const Trace& trace, const RuleProgram& prog, std::uint64_t row, NodeId cell,
                const Expect& expect, std::string& detail) {
    if (row >= trace.row_count()) {
        detail = "trace has no row " + std::to_string(row);
        return false;
    }
    const Cell& got = trace.at(row, cell);
    if (got.state != expect.state || got.content != expect.content) {
        detail = "expected '" + prog.render_cell(expect.state, expect.content) + "', got '" +
                 prog.render_cell(got.state, got.content) + "'";
        return false;
    }
    return true;
}

}  // namespace

VerificationReport verify_run(const Trace& trace, const FsspInstance& instance) {
    const RuleProgram& prog = *instance.config.program;
    if (!prog.firing_state)
        throw ValidationError("program declares no firing state");
    const StateId firing = *prog.firing_state;
    const NodeId n = instance.structure->node_count();

    if (trace.row_count() == 0) throw ValidationError("empty trace");
    for (const auto& row : trace.rows)
        if (row.size() != static_cast<std::size_t>(n) + 1)
            throw ValidationError("trace row width does not match the instance");

    VerificationReport report;
    auto fail = [&](const std::string& msg) { report.failures.push_back(msg); };

    // First step at which each squad cell is in the firing state.
    const std::uint64_t kNever = ~std::uint64_t{0};
    std::vector<std::uint64_t> first(instance.squad.size(), kNever);
    for (std::size_t i = 0; i < instance.squad.size(); ++i) {
        const NodeId cell = instance.squad[i];
        for (std::uint64_t row = 0; row < trace.row_count(); ++row) {
            if (trace.at(row, cell).state == firing) {
                first[i] = row;
                break;
            }
        }
    }

    report.fired = std::all_of(first.begin(), first.end(),
                               [&](std::uint64_t r) { return r != kNever; });
    if (report.fired) {
        report.firing_step = *std::max_element(first.begin(), first.end());
        report.simultaneous = std::all_of(first.begin(), first.end(), [&](std::uint64_t r) {
            return r == report.firing_step;
        });
        report.first_time =
            *std::min_element(first.begin(), first.end()) == report.firing_step;
        if (!report.simultaneous || !report.first_time) {
            for (std::size_t i = 0; i < instance.squad.size(); ++i)
                if (first[i] != report.firing_step)
                    fail("squad cell " + std::to_string(instance.squad[i]) +
                         " first reaches the firing state at step " + std::to_string(first[i]) +
                         ", others at step " + std::to_string(report.firing_step));
        }
        const std::uint64_t expected = expected_firing_step(instance.variant, instance.levels);
        report.formula_match = report.firing_step == expected;
        if (!report.formula_match)
            fail("fired at step " + std::to_string(report.firing_step) + ", expected " +
                 std::to_string(expected));
    } else {
        for (std::size_t i = 0; i < instance.squad.size(); ++i)
            if (first[i] == kNever)
                fail("squad cell " + std::to_string(instance.squad[i]) +
                     " never reaches the firing state");
    }

    // Non-squad cells must avoid the firing state throughout and settle in
    // s1 (dynamic) / s0 (static).
    const StateId settle = instance.variant == Variant::dynamic_channels
                               ? require_state(prog, "s1")
                               : require_state(prog, "s0");
    report.non_squad_clean = true;
    for (NodeId cell = 1; cell <= n; ++cell) {
        if (instance.in_squad(cell)) continue;
        for (std::uint64_t row = 0; row < trace.row_count(); ++row) {
            if (trace.at(row, cell).state == firing) {
                report.non_squad_clean = false;
                fail("non-squad cell " + std::to_string(cell) +
                     " enters the firing state at step " + std::to_string(row));
                break;
            }
        }
        if (trace.rows.back()[cell].state != settle) {
            report.non_squad_clean = false;
            fail("non-squad cell " + std::to_string(cell) + " ends in state " +
                 prog.state_name(trace.rows.back()[cell].state) + ", expected " +
                 prog.state_name(settle));
        }
    }

    // Final objects. Static runs drain every cell, except that cells
    // without successors never run the peer handshake and keep one l per
    // unit of peer count. Dynamic runs leave the channel endpoints (alpha
    // at the sergeant, omega at squad cells) plus one phi at the commander
    // when it is not in the squad (it is the sergeant's static neighbor and
    // state s1 consumes no phi).
    report.empty_at_end = true;
    const auto& final_row = trace.rows.back();
    for (NodeId cell = 1; cell <= n; ++cell) {
        Multiset expected;
        if (instance.variant == Variant::static_rules) {
            if (instance.levels.terminal(cell)) {
                const Count u = instance.levels.peer_count_sum(cell);
                if (u > 0) expected.add(require_symbol(prog, "l"), u);
            }
        } else {
            if (instance.sergeant && cell == *instance.sergeant) {
                expected.add(require_symbol(prog, "alpha"));
            } else if (instance.in_squad(cell)) {
                expected.add(require_symbol(prog, "omega"));
            } else if (cell == instance.commander) {
                expected.add(require_symbol(prog, "phi"));
            }
        }
        if (final_row[cell].content != expected) {
            report.empty_at_end = false;
            fail("cell " + std::to_string(cell) + " ends with objects '" +
                 prog.render_multiset(final_row[cell].content) + "', expected '" +
                 prog.render_multiset(expected) + "'");
        }
    }

    if (instance.variant == Variant::static_rules) {
        report.phase_checks = verify_phase_postconditions(trace, instance);
        for (const PhaseCheck& pc : report.phase_checks)
            if (!pc.ok)
                fail("phase " + std::to_string(pc.phase) + " check at step " +
                     std::to_string(pc.step) + ", cell " + std::to_string(pc.cell) + ": " +
                     pc.detail);
    }
    return report;
}

std::vector<PhaseCheck> verify_phase_postconditions(const Trace& trace,
                                                    const FsspInstance& instance) {
    if (instance.variant != Variant::static_rules)
        throw ValidationError("phase postconditions apply to the static variant only");
    const RuleProgram& prog = *instance.config.program;
    const LevelTable& lt = instance.levels;
    const std::uint64_t E = lt.eccentricity;

    const Symbol a = require_symbol(prog, "a");
    const Symbol b = require_symbol(prog, "b");
    const Symbol d = require_symbol(prog, "d");
    const Symbol e = require_symbol(prog, "e");
    const Symbol f = require_symbol(prog, "f");
    const Symbol k = require_symbol(prog, "k");
    const Symbol l = require_symbol(prog, "l");
    const StateId s2 = require_state(prog, "s2");
    const StateId s6 = require_state(prog, "s6");
    const StateId s8 = require_state(prog, "s8");
    const StateId s9 = require_state(prog, "s9");
    const StateId s0 = require_state(prog, "s0");

    std::vector<PhaseCheck> checks;
    for (NodeId cell = 1; cell <= instance.original->node_count(); ++cell) {
        const std::uint64_t L = lt.level[cell];
        const Count K = lt.count[cell];
        const Count u = lt.peer_count_sum(cell);
        const Count v = lt.successor_count_sum(cell);
        const bool commander = cell == instance.commander;
        const bool squad = instance.in_squad(cell);
        const bool terminal = lt.terminal(cell);

        auto add_check = [&](int phase, std::uint64_t step, const Expect& expect) {
            PhaseCheck pc;
            pc.cell = cell;
            pc.phase = phase;
            pc.step = step;
            pc.ok = check_cell(trace, prog, step, cell, expect, pc.detail);
            checks.push_back(std::move(pc));
        };

        // Broadcast done: the cell knows its path count and its neighbors'.
        Expect one{s2, {}};
        one.content.add(a, K);
        one.content.add(k, K);
        if (u > 0) one.content.add(l, u);
        if (v > 0) one.content.add(d, v);
        if (commander) one.content.add(e, 2);
        if (squad) one.content.add(f, 1);
        add_check(1, L + 2, one);

        // Convergecast done: the commander holds the eccentricity count.
        Expect two{s6, {}};
        two.content.add(a, K);
        if (commander) two.content.add(e, E + 2);
        if (squad) two.content.add(f, 1);
        if (terminal && u > 0) two.content.add(l, u);
        add_check(2, 5 * E + 2, two);

        // Second broadcast done: countdown tokens distributed.
        Expect three{s8, {}};
        three.content.add(a, K);
        three.content.add(b, (E + 1 - L) * K);
        if (squad) three.content.add(f, 1);
        if (terminal && u > 0) three.content.add(l, u);
        add_check(3, 5 * E + 5 + L, three);

        // Countdown done: squad fires, everyone else resets.
        Expect four{squad ? s9 : s0, {}};
        if (terminal && u > 0) four.content.add(l, u);
        add_check(4, 6 * E + 7, four);
    }
    return checks;
}

}  // namespace psys
