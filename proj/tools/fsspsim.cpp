// Command-line front end: run, oracle, verify, lint, statechart, fuzz.
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 step budget exhausted.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "psys/dsl.hpp"
#include "psys/fssp.hpp"
#include "psys/fuzz.hpp"
#include "psys/io.hpp"

using namespace psys;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::vector<NodeId> parse_squad_list(const std::string& arg) {
    InstanceSpec spec = parse_instance_spec("topology: x\ncommander: 1\nsquad: " + arg +
                                            "\nvariant: static\n");
    return spec.squad;
}

std::shared_ptr<const RuleProgram> load_program_file(const std::string& path) {
    return std::make_shared<const RuleProgram>(parse_rules(read_file(path)).program);
}

std::shared_ptr<const RuleProgram> with_mode(std::shared_ptr<const RuleProgram> program,
                                             const std::string& mode) {
    if (mode.empty()) return program;
    auto copy = std::make_shared<RuleProgram>(*program);
    copy->mode = mode == "min" ? RewriteMode::min : RewriteMode::max;
    return copy;
}

FsspInstance build_instance(const Topology& topology, Variant variant, NodeId commander,
                            const std::vector<NodeId>& squad,
                            std::shared_ptr<const RuleProgram> program) {
    return variant == Variant::dynamic_channels
               ? build_dynamic_instance(topology, commander, squad, std::move(program))
               : build_static_instance(topology, commander, squad, std::move(program));
}

std::string node_set_str(const NodeSet& s) {
    if (s.empty()) return "-";
    std::string out;
    for (NodeId x : s) {
        if (!out.empty()) out += ",";
        out += std::to_string(x);
    }
    return out;
}

int cmd_run(const std::string& system_path, const std::string& variant_name,
            const std::string& rules_path, NodeId commander, const std::string& squad_arg,
            const std::string& mode, std::uint64_t max_steps, const std::string& trace_path) {
    Topology topology = parse_topology(read_file(system_path));
    std::vector<NodeId> squad = parse_squad_list(squad_arg);

    Variant variant = Variant::static_rules;
    std::shared_ptr<const RuleProgram> program;
    if (!variant_name.empty()) {
        variant = variant_from_string(variant_name);
        program = variant == Variant::dynamic_channels ? dynamic_program() : static_program();
        if (!rules_path.empty()) program = load_program_file(rules_path);
    } else {
        program = load_program_file(rules_path);
    }
    program = with_mode(std::move(program), mode);

    FsspInstance instance = build_instance(topology, variant, commander, squad, program);
    RunResult result = run_instance(instance, max_steps);

    const std::string tsv =
        trace_to_tsv(result.trace, *instance.config.program, instance.display_order(),
                     instance.labels());
    if (result.outcome == RunOutcome::budget_exhausted) {
        std::cerr << "no stop condition within " << result.steps
                  << " steps (budget exhausted)\n";
        if (!trace_path.empty()) write_file(trace_path, tsv);
        return kExitBudget;
    }

    std::string message = "did not fire (quiescent after step " +
                          std::to_string(result.trace.row_count() - 1) + ")";
    VerificationReport report = verify_run(result.trace, instance);
    if (report.fired && report.simultaneous)
        message = "fired at step " + std::to_string(report.firing_step);

    if (trace_path.empty()) {
        std::cout << tsv;
        std::cerr << message << "\n";
    } else {
        write_file(trace_path, tsv);
        std::cout << message << "\n";
    }
    return kExitOk;
}

int cmd_oracle(const std::string& system_path, NodeId commander) {
    Topology topology = parse_topology(read_file(system_path));
    LevelTable lt = bfs_levels(topology, commander);
    std::string out = "node\tlevel\tcount\tpredecessors\tsuccessors\tpeers\n";
    for (NodeId x = 1; x <= topology.node_count(); ++x) {
        out += std::to_string(x) + "\t" + std::to_string(lt.level[x]) + "\t" +
               std::to_string(lt.count[x]) + "\t" + node_set_str(lt.predecessors[x]) + "\t" +
               node_set_str(lt.successors[x]) + "\t" + node_set_str(lt.peers[x]) + "\n";
    }
    out += "# eccentricity: " + std::to_string(lt.eccentricity) + "\n";
    std::cout << out;
    return kExitOk;
}

int cmd_verify(const std::string& trace_path, const std::string& instance_path) {
    LoadedInstance loaded = load_instance_file(instance_path);
    FsspInstance instance = build_instance(loaded.topology, loaded.spec.variant,
                                           loaded.spec.commander, loaded.spec.squad, nullptr);
    Trace trace = trace_from_tsv(read_file(trace_path), *instance.config.program,
                                 instance.display_order(), instance.labels());
    VerificationReport report = verify_run(trace, instance);

    auto yesno = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "fired: " << yesno(report.fired) << "\n";
    if (report.fired) {
        std::cout << "firing_step: " << report.firing_step << "\n";
        std::cout << "expected_step: "
                  << expected_firing_step(instance.variant, instance.levels) << "\n";
    }
    std::cout << "simultaneous: " << yesno(report.simultaneous) << "\n";
    std::cout << "first_time: " << yesno(report.first_time) << "\n";
    std::cout << "non_squad_clean: " << yesno(report.non_squad_clean) << "\n";
    std::cout << "empty_at_end: " << yesno(report.empty_at_end) << "\n";
    std::cout << "formula_match: " << yesno(report.formula_match) << "\n";
    if (instance.variant == Variant::static_rules) {
        std::size_t failed = 0;
        for (const auto& pc : report.phase_checks)
            if (!pc.ok) ++failed;
        std::cout << "phase_checks: " << report.phase_checks.size() << " run, " << failed
                  << " failed\n";
    }
    for (const auto& f : report.failures) std::cout << "failure: " << f << "\n";
    std::cout << "result: " << (report.ok() ? "PASS" : "FAIL") << "\n";
    return report.ok() ? kExitOk : kExitVerifyFail;
}

int cmd_lint(const std::string& rules_path) {
    SourceProgram sp = parse_rules(read_file(rules_path));
    auto diagnostics = lint(sp.program);
    for (const auto& d : diagnostics)
        std::cout << (d.severity == LintSeverity::warning ? "warning: " : "info: ")
                  << d.message << "\n";
    std::cout << diagnostics.size() << " diagnostic(s)\n";
    return kExitOk;
}

int cmd_statechart(const std::string& rules_path) {
    SourceProgram sp = parse_rules(read_file(rules_path));
    std::cout << statechart_to_dot(extract_statechart(sp.program));
    return kExitOk;
}

int cmd_fuzz(std::uint64_t seed, std::uint32_t n, NodeId max_nodes, const std::string& variants,
             const std::string& replay_dir, const std::string& dynamic_rules,
             const std::string& static_rules) {
    FuzzOptions opt;
    opt.seed = seed;
    opt.instances = n;
    opt.max_nodes = max_nodes;
    opt.run_dynamic = variants == "both" || variants == "dynamic";
    opt.run_static = variants == "both" || variants == "static";
    if (!opt.run_dynamic && !opt.run_static)
        throw ValidationError("--variants must be dynamic, static or both");
    opt.replay_dir = replay_dir;
    if (!dynamic_rules.empty()) opt.dynamic_override = load_program_file(dynamic_rules);
    if (!static_rules.empty()) opt.static_override = load_program_file(static_rules);

    FuzzSummary summary = fuzz(opt);
    std::cout << "instances: " << summary.instances_generated << "\n";
    std::cout << "runs: " << summary.runs << "\n";
    std::cout << "phase_checks: " << summary.phase_checks << "\n";
    std::cout << "squad coverage: singleton " << summary.singleton_squads << ", full "
              << summary.full_squads << ", commander " << summary.commander_in_squad
              << ", multipath " << summary.multipath_squads << ", sergeant "
              << summary.sergeant_in_squad << "\n";
    std::cout << "failures: " << summary.failures.size() << "\n";
    for (const auto& f : summary.failures) {
        std::cout << "failure[" << f.index << "," << to_string(f.variant) << "]: " << f.message
                  << "\n";
        if (!f.replay_instance_path.empty())
            std::cout << "replay: " << f.replay_instance_path << "\n";
    }
    return summary.ok() ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synchronization experiments on state-based membrane systems"};
    app.require_subcommand(1);

    std::string system_path, variant_name, rules_path, squad_arg, mode, trace_path;
    std::string instance_path;
    NodeId commander = 0;
    std::uint64_t max_steps = 0;

    auto* run_cmd = app.add_subcommand("run", "Run a synchronization instance");
    run_cmd->add_option("--system", system_path, "Topology file")->required();
    auto* variant_opt = run_cmd->add_option("--variant", variant_name,
                                            "Built-in program: dynamic or static");
    auto* rules_opt = run_cmd->add_option("--rules", rules_path, "Rule program file");
    run_cmd->add_option("--commander", commander, "Commander node")->required();
    run_cmd->add_option("--squad", squad_arg, "Squad nodes, comma separated")->required();
    run_cmd->add_option("--mode", mode, "Rewrite mode override: max or min")
        ->check(CLI::IsMember({"max", "min"}));
    run_cmd->add_option("--max-steps", max_steps, "Step budget override");
    run_cmd->add_option("--trace", trace_path, "Write the trace TSV here");

    auto* oracle_cmd = app.add_subcommand("oracle", "Print the commander's level table");
    oracle_cmd->add_option("--system", system_path, "Topology file")->required();
    oracle_cmd->add_option("--commander", commander, "Commander node")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Check a trace against an instance");
    verify_cmd->add_option("--trace", trace_path, "Trace TSV file")->required();
    verify_cmd->add_option("--instance", instance_path, "Instance file")->required();

    auto* lint_cmd = app.add_subcommand("lint", "Lint a rule program");
    lint_cmd->add_option("rules", rules_path, "Rule program file")->required();

    auto* chart_cmd = app.add_subcommand("statechart", "Export the rule statechart as DOT");
    chart_cmd->add_option("rules", rules_path, "Rule program file")->required();

    std::uint64_t seed = 1;
    std::uint32_t fuzz_n = 200;
    NodeId fuzz_max_nodes = 15;
    std::string variants = "both", replay_dir = ".", dynamic_rules, static_rules;
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Random instance verification sweep");
    fuzz_cmd->add_option("--seed", seed, "Random seed");
    fuzz_cmd->add_option("--n", fuzz_n, "Instance count");
    fuzz_cmd->add_option("--max-nodes", fuzz_max_nodes, "Largest structure size");
    fuzz_cmd->add_option("--variants", variants, "dynamic, static or both");
    fuzz_cmd->add_option("--replay-dir", replay_dir, "Where failing instances are written");
    fuzz_cmd->add_option("--dynamic-rules", dynamic_rules, "Override the dynamic program");
    fuzz_cmd->add_option("--static-rules", static_rules, "Override the static program");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            if (!*variant_opt && !*rules_opt)
                throw ValidationError("run needs --variant or --rules");
            return cmd_run(system_path, variant_name, rules_path, commander, squad_arg, mode,
                           max_steps, trace_path);
        }
        if (oracle_cmd->parsed()) return cmd_oracle(system_path, commander);
        if (verify_cmd->parsed()) return cmd_verify(trace_path, instance_path);
        if (lint_cmd->parsed()) return cmd_lint(rules_path);
        if (chart_cmd->parsed()) return cmd_statechart(rules_path);
        if (fuzz_cmd->parsed())
            return cmd_fuzz(seed, fuzz_n, fuzz_max_nodes, variants, replay_dir, dynamic_rules,
                            static_rules);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CountOverflow& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFail;
    }
    return kExitUsage;
}
