#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "psys/rules.hpp"

namespace psys {

// Input rejected with a source location.
struct ParseError : std::runtime_error {
    std::uint32_t line;
    ParseError(std::uint32_t line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct SourceProgram {
    std::string text;
    RuleProgram program;
};

// Rule file grammar, one rule per line:
//   [label:] <state> <obj>+ -> <state> [<obj>[_go|_up|_down|_side|_out]]*
// Header directives: alphabet:, states:, firing:, mode:. '#' comments.
// Objects and states are bare identifiers; underscore is the tag separator.
// Rules without an explicit label get `<stateIndex>.<ordinal>`.
SourceProgram parse_rules(const std::string& text);

// Canonical form; parse(serialize(p)) is structurally equal to p.
std::string serialize(const RuleProgram& program);

// Equality up to source locations.
bool structurally_equal(const RuleProgram& a, const RuleProgram& b);

struct Statechart {
    std::vector<std::string> states;
    // (source, target) -> contributing rule labels in priority order
    std::map<std::pair<StateId, StateId>, std::vector<std::string>> arcs;
};

Statechart extract_statechart(const RuleProgram& program);
std::string statechart_to_dot(const Statechart& chart);

enum class LintSeverity { info, warning };

struct LintDiagnostic {
    LintSeverity severity{};
    std::string message;
};

// Reports (a) states with no outgoing rules besides the firing state,
// (b) rules consuming symbols no rule produces, (c) weak-priority shadow
// warnings: an earlier same-source rule whose left-hand side is contained
// in a later rule's with a different target. Warnings, not errors; the
// blocking is often intentional.
std::vector<LintDiagnostic> lint(const RuleProgram& program);

}  // namespace psys
