#include "psys/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace psys {

namespace {

bool is_identifier(const std::string& tok) {
    if (tok.empty() || !std::isalpha(static_cast<unsigned char>(tok[0]))) return false;
    return std::all_of(tok.begin(), tok.end(),
                       [](unsigned char c) { return std::isalnum(c); });
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) toks.push_back(tok);
    return toks;
}

std::optional<Transfer> transfer_from_string(const std::string& s) {
    if (s == "go") return Transfer::go;
    if (s == "up") return Transfer::up;
    if (s == "down") return Transfer::down;
    if (s == "side") return Transfer::side;
    if (s == "out") return Transfer::out;
    return std::nullopt;
}

struct PendingRule {
    std::uint32_t line;
    std::string label;  // empty = auto
    std::vector<std::string> tokens;
};

}  // namespace

SourceProgram parse_rules(const std::string& text) {
    SourceProgram sp;
    sp.text = text;
    RuleProgram& prog = sp.program;

    bool have_alphabet = false, have_states = false, have_firing = false, have_mode = false;
    std::string firing_name;
    std::uint32_t firing_line = 0;
    std::vector<PendingRule> pending;

    std::istringstream in(text);
    std::string raw;
    std::uint32_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        std::vector<std::string> toks = split_ws(raw);
        if (toks.empty()) continue;

        const std::string& head = toks[0];
        if (head == "alphabet:" || head == "states:" || head == "firing:" || head == "mode:") {
            if (!pending.empty())
                throw ParseError(lineno, "header directive '" + head + "' after rules");
            if (head == "alphabet:") {
                if (have_alphabet) throw ParseError(lineno, "duplicate alphabet: directive");
                have_alphabet = true;
                if (toks.size() < 2) throw ParseError(lineno, "alphabet: needs at least one symbol");
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    if (!is_identifier(toks[i]))
                        throw ParseError(lineno, "bad object name '" + toks[i] + "'");
                    prog.alphabet.push_back(toks[i]);
                }
            } else if (head == "states:") {
                if (have_states) throw ParseError(lineno, "duplicate states: directive");
                have_states = true;
                if (toks.size() < 2) throw ParseError(lineno, "states: needs at least one state");
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    if (!is_identifier(toks[i]))
                        throw ParseError(lineno, "bad state name '" + toks[i] + "'");
                    prog.states.push_back(toks[i]);
                }
            } else if (head == "firing:") {
                if (have_firing) throw ParseError(lineno, "duplicate firing: directive");
                have_firing = true;
                if (toks.size() != 2) throw ParseError(lineno, "firing: takes exactly one state");
                firing_name = toks[1];
                firing_line = lineno;
            } else {
                if (have_mode) throw ParseError(lineno, "duplicate mode: directive");
                have_mode = true;
                if (toks.size() != 2 || (toks[1] != "max" && toks[1] != "min"))
                    throw ParseError(lineno, "mode: must be max or min");
                prog.mode = toks[1] == "max" ? RewriteMode::max : RewriteMode::min;
            }
            continue;
        }

        PendingRule pr;
        pr.line = lineno;
        pr.tokens = std::move(toks);
        if (pr.tokens[0].size() > 1 && pr.tokens[0].back() == ':') {
            pr.label = pr.tokens[0].substr(0, pr.tokens[0].size() - 1);
            pr.tokens.erase(pr.tokens.begin());
            if (pr.tokens.empty()) throw ParseError(lineno, "label without a rule");
        }
        pending.push_back(std::move(pr));
    }

    if (!have_alphabet) throw ParseError(lineno, "missing alphabet: directive");
    if (!have_states) throw ParseError(lineno, "missing states: directive");
    try {
        prog.rebuild_index();
    } catch (const std::exception& e) {
        throw ParseError(1, e.what());
    }
    if (have_firing) {
        auto fs = prog.find_state(firing_name);
        if (!fs) throw ParseError(firing_line, "unknown firing state '" + firing_name + "'");
        prog.firing_state = *fs;
    }

    auto lookup_state = [&](const std::string& name, std::uint32_t line) {
        auto s = prog.find_state(name);
        if (!s) throw ParseError(line, "unknown state '" + name + "'");
        return *s;
    };
    auto lookup_symbol = [&](const std::string& name, std::uint32_t line) {
        if (!is_identifier(name)) throw ParseError(line, "bad object name '" + name + "'");
        auto s = prog.find_symbol(name);
        if (!s) throw ParseError(line, "unknown symbol '" + name + "'");
        return *s;
    };

    for (PendingRule& pr : pending) {
        const auto& toks = pr.tokens;
        auto arrow = std::find(toks.begin(), toks.end(), "->");
        if (arrow == toks.end()) throw ParseError(pr.line, "rule is missing '->'");
        const std::size_t arrow_at = static_cast<std::size_t>(arrow - toks.begin());
        if (arrow_at < 1) throw ParseError(pr.line, "rule is missing a source state");
        if (arrow_at + 1 >= toks.size())
            throw ParseError(pr.line, "rule is missing a target state");

        Rule rule;
        rule.line = pr.line;
        rule.label = pr.label;
        rule.explicit_label = !pr.label.empty();
        rule.source = lookup_state(toks[0], pr.line);
        if (arrow_at == 1) throw ParseError(pr.line, "rule has an empty left-hand side");
        for (std::size_t i = 1; i < arrow_at; ++i)
            rule.lhs.add(lookup_symbol(toks[i], pr.line));
        rule.target = lookup_state(toks[arrow_at + 1], pr.line);
        for (std::size_t i = arrow_at + 2; i < toks.size(); ++i) {
            const std::string& tok = toks[i];
            auto us = tok.find('_');
            if (us == std::string::npos) {
                rule.produced_here.add(lookup_symbol(tok, pr.line));
            } else {
                std::string obj = tok.substr(0, us);
                std::string tag = tok.substr(us + 1);
                auto tr = transfer_from_string(tag);
                if (!tr)
                    throw ParseError(pr.line, "unknown transfer tag '_" + tag + "' in '" + tok + "'");
                if (obj.empty() || tag.find('_') != std::string::npos ||
                    obj.find('_') != std::string::npos)
                    throw ParseError(pr.line, "bad production token '" + tok + "'");
                rule.emissions[static_cast<std::size_t>(*tr)].add(lookup_symbol(obj, pr.line));
            }
        }
        prog.rules.push_back(std::move(rule));
    }

    // Auto-labels follow the per-state rule ordinal.
    std::vector<std::uint32_t> ordinal(prog.states.size(), 0);
    for (Rule& r : prog.rules) {
        std::uint32_t ord = ++ordinal[r.source];
        if (!r.explicit_label)
            r.label = std::to_string(r.source) + "." + std::to_string(ord);
    }
    for (std::size_t i = 0; i < prog.rules.size(); ++i)
        for (std::size_t j = i + 1; j < prog.rules.size(); ++j)
            if (prog.rules[i].label == prog.rules[j].label)
                throw ParseError(prog.rules[j].line,
                                 "duplicate rule label '" + prog.rules[j].label + "'");
    return sp;
}

namespace {

void append_multiset_tokens(std::string& out, const RuleProgram& prog, const Multiset& m,
                            const std::string& suffix) {
    for (const auto& [sym, n] : m) {
        for (Count i = 0; i < n; ++i) {
            out += ' ';
            out += prog.symbol_name(sym);
            out += suffix;
        }
    }
}

}  // namespace

std::string serialize(const RuleProgram& program) {
    std::string out = "alphabet:";
    for (const auto& s : program.alphabet) out += " " + s;
    out += "\nstates:";
    for (const auto& s : program.states) out += " " + s;
    out += "\n";
    if (program.firing_state)
        out += "firing: " + program.state_name(*program.firing_state) + "\n";
    out += "mode: ";
    out += program.mode == RewriteMode::max ? "max" : "min";
    out += "\n";
    if (!program.rules.empty()) out += "\n";
    for (const Rule& r : program.rules) {
        std::string line;
        if (r.explicit_label) line += r.label + ":";
        if (!line.empty()) line += ' ';
        line += program.state_name(r.source);
        append_multiset_tokens(line, program, r.lhs, "");
        line += " ->";
        line += ' ';
        line += program.state_name(r.target);
        append_multiset_tokens(line, program, r.produced_here, "");
        for (std::size_t t = 0; t < kTransferCount; ++t)
            append_multiset_tokens(line, program, r.emissions[t],
                                   "_" + to_string(static_cast<Transfer>(t)));
        out += line + "\n";
    }
    return out;
}

bool structurally_equal(const RuleProgram& a, const RuleProgram& b) {
    if (a.alphabet != b.alphabet || a.states != b.states ||
        a.firing_state != b.firing_state || a.mode != b.mode ||
        a.rules.size() != b.rules.size())
        return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        const Rule& x = a.rules[i];
        const Rule& y = b.rules[i];
        if (x.source != y.source || x.target != y.target || x.label != y.label ||
            x.lhs != y.lhs || x.produced_here != y.produced_here || x.emissions != y.emissions)
            return false;
    }
    return true;
}

Statechart extract_statechart(const RuleProgram& program) {
    Statechart chart;
    chart.states = program.states;
    for (const Rule& r : program.rules)
        chart.arcs[{r.source, r.target}].push_back(r.label);
    return chart;
}

std::string statechart_to_dot(const Statechart& chart) {
    std::string out = "digraph statechart {\n  rankdir=LR;\n";
    for (const auto& s : chart.states) out += "  \"" + s + "\";\n";
    for (const auto& [edge, labels] : chart.arcs) {
        std::string joined;
        for (const auto& l : labels) {
            if (!joined.empty()) joined += ", ";
            joined += l;
        }
        out += "  \"" + chart.states[edge.first] + "\" -> \"" + chart.states[edge.second] +
               "\" [label=\"" + joined + "\"];\n";
    }
    out += "}\n";
    return out;
}

std::vector<LintDiagnostic> lint(const RuleProgram& program) {
    std::vector<LintDiagnostic> out;

    // (a) states that no rule leaves, besides the declared firing state
    std::vector<bool> has_outgoing(program.states.size(), false);
    for (const Rule& r : program.rules) has_outgoing[r.source] = true;
    for (StateId s = 0; s < program.states.size(); ++s) {
        if (has_outgoing[s]) continue;
        if (program.firing_state && *program.firing_state == s) continue;
        out.push_back({LintSeverity::info,
                       "state " + program.state_name(s) +
                           " has no outgoing rules and is not the firing state"});
    }

    // (b) symbols consumed but never produced: rules needing them can fire
    // only on initial markings
    std::vector<bool> produced(program.alphabet.size(), false);
    for (const Rule& r : program.rules) {
        for (const auto& [sym, n] : r.produced_here) {
            (void)n;
            produced[sym] = true;
        }
        for (const auto& em : r.emissions)
            for (const auto& [sym, n] : em) {
                (void)n;
                produced[sym] = true;
            }
    }
    for (Symbol sym = 0; sym < program.alphabet.size(); ++sym) {
        if (produced[sym]) continue;
        std::vector<std::string> consumers;
        for (const Rule& r : program.rules)
            if (r.lhs.count(sym) > 0) consumers.push_back(r.label);
        if (consumers.empty()) continue;
        std::string labels;
        for (const auto& l : consumers) {
            if (!labels.empty()) labels += ", ";
            labels += l;
        }
        out.push_back({LintSeverity::info,
                       "symbol " + program.symbol_name(sym) +
                           " is consumed (rules " + labels +
                           ") but never produced; only initial markings supply it"});
    }

    // (c) weak-priority shadows
    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& hi = program.rules[i];
        for (std::size_t j = i + 1; j < program.rules.size(); ++j) {
            const Rule& lo = program.rules[j];
            if (hi.source != lo.source || hi.target == lo.target) continue;
            if (!lo.lhs.contains(hi.lhs)) continue;
            out.push_back({LintSeverity::warning,
                           "rule " + lo.label + " (" + program.state_name(lo.source) + " " +
                               program.render_multiset(lo.lhs) + " -> " +
                               program.state_name(lo.target) + ") may be blocked by rule " +
                               hi.label + " (-> " + program.state_name(hi.target) +
                               "): covering left-hand side, different target"});
        }
    }
    return out;
}

}  // namespace psys
