#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psys/engine.hpp"

namespace psys {

enum class Variant { dynamic_channels, static_rules };

std::string to_string(Variant v);                 // "dynamic" / "static"
Variant variant_from_string(const std::string&);

// Shipped synchronization programs (rule-file text and parsed form).
const std::string& dynamic_program_text();
const std::string& static_program_text();
std::shared_ptr<const RuleProgram> dynamic_program();
std::shared_ptr<const RuleProgram> static_program();

// A ready-to-run synchronization problem instance.
struct FsspInstance {
    Variant variant{};
    std::shared_ptr<const Topology> original;   // structure as given
    std::shared_ptr<const Topology> structure;  // simulated structure (sergeant added for dynamic)
    NodeId commander{};
    std::optional<NodeId> sergeant;             // node n+1 for the dynamic variant
    std::vector<NodeId> squad;                  // sorted; may include the sergeant
    LevelTable levels;                          // commander's table on the original structure
    SystemConfig config;

    bool in_squad(NodeId x) const;
    // Column order used by trace files: sergeant first (dynamic), then
    // original nodes by (level, id).
    std::vector<NodeId> display_order() const;
    std::vector<std::string> labels() const;    // "sigma_<id>" per display_order
};

// Builds the mobile-channel instance: sergeant node n+1 linked to the
// commander (one arc; a symmetric pair on graphs), marked with the anchor;
// squad cells marked with f. Tree inputs are rebuilt as dags.
FsspInstance build_dynamic_instance(const Topology& topology, NodeId commander,
                                    std::vector<NodeId> squad,
                                    std::shared_ptr<const RuleProgram> program_override = nullptr);

// Builds the static four-phase instance (n > 1): commander marked a (plus f
// when in the squad), squad cells marked f.
FsspInstance build_static_instance(const Topology& topology, NodeId commander,
                                   std::vector<NodeId> squad,
                                   std::shared_ptr<const RuleProgram> program_override = nullptr);

// e_c + 5 for the dynamic variant, 6*e_c + 7 for the static one, with e_c
// the commander's eccentricity on the original structure.
std::uint64_t expected_firing_step(Variant variant, const LevelTable& levels);

std::uint64_t default_step_budget(const LevelTable& levels);  // 10 * (6*e_c + 7)

// Runs the instance to quiescence under the default budget.
RunResult run_instance(const FsspInstance& instance, std::uint64_t max_steps = 0);

struct PhaseCheck {
    NodeId cell{};
    int phase{};           // 1..4
    std::uint64_t step{};
    bool ok = false;
    std::string detail;
};

struct VerificationReport {
    bool fired = false;
    std::uint64_t firing_step = 0;
    bool simultaneous = false;
    bool first_time = false;
    bool non_squad_clean = false;
    bool empty_at_end = false;
    bool formula_match = false;
    std::vector<PhaseCheck> phase_checks;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

// Checks the synchronization contract on a finished trace: a unique first
// step where every squad cell is in the firing state, at the predicted step;
// non-squad cells never visit it and settle in s1 (dynamic) / s0 (static);
// final objects match the expected residue. Failures are reported, never
// thrown.
VerificationReport verify_run(const Trace& trace, const FsspInstance& instance);

// Static variant only: per-cell content checks at the four phase boundaries
// (steps L+2, 5E+2, 5E+5+L, 6E+7).
std::vector<PhaseCheck> verify_phase_postconditions(const Trace& trace,
                                                    const FsspInstance& instance);

}  // namespace psys
