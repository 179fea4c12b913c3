#include "psys/rules.hpp"

#include <algorithm>
#include <stdexcept>

namespace psys {

std::string to_string(Transfer t) {
    switch (t) {
        case Transfer::go: return "go";
        case Transfer::up: return "up";
        case Transfer::down: return "down";
        case Transfer::side: return "side";
        case Transfer::out: return "out";
    }
    return "?";
}

std::optional<Symbol> RuleProgram::find_symbol(std::string_view name) const {
    auto it = symbol_index_.find(std::string(name));
    if (it == symbol_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<StateId> RuleProgram::find_state(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
}

void RuleProgram::rebuild_index() {
    symbol_index_.clear();
    state_index_.clear();
    for (Symbol s = 0; s < alphabet.size(); ++s) {
        if (!symbol_index_.emplace(alphabet[s], s).second)
            throw std::runtime_error("duplicate alphabet symbol '" + alphabet[s] + "'");
    }
    for (StateId s = 0; s < states.size(); ++s) {
        if (!state_index_.emplace(states[s], s).second)
            throw std::runtime_error("duplicate state '" + states[s] + "'");
    }
}

void RuleProgram::validate() const {
    auto check_symbols = [&](const Multiset& m, const std::string& where) {
        for (const auto& [sym, n] : m) {
            (void)n;
            if (sym >= alphabet.size())
                throw std::runtime_error("symbol id out of range in " + where);
        }
    };
    std::vector<std::string> seen_labels;
    for (const Rule& r : rules) {
        const std::string where = "rule " + r.label;
        if (r.lhs.empty()) throw std::runtime_error(where + ": empty left-hand side");
        if (r.source >= states.size() || r.target >= states.size())
            throw std::runtime_error(where + ": state id out of range");
        check_symbols(r.lhs, where);
        check_symbols(r.produced_here, where);
        for (const auto& em : r.emissions) check_symbols(em, where);
        if (std::find(seen_labels.begin(), seen_labels.end(), r.label) != seen_labels.end())
            throw std::runtime_error("duplicate rule label '" + r.label + "'");
        seen_labels.push_back(r.label);
    }
    if (firing_state && *firing_state >= states.size())
        throw std::runtime_error("firing state id out of range");
}

bool RuleProgram::uses_transfer(Transfer t) const {
    for (const Rule& r : rules)
        if (!r.emission(t).empty()) return true;
    return false;
}

std::string RuleProgram::render_multiset(const Multiset& m) const {
    std::string out;
    for (const auto& [sym, n] : m) {
        if (!out.empty()) out += ' ';
        out += symbol_name(sym);
        if (n > 1) {
            out += '^';
            out += std::to_string(n);
        }
    }
    return out;
}

std::string RuleProgram::render_cell(StateId state, const Multiset& m) const {
    std::string out = state_name(state);
    std::string objs = render_multiset(m);
    if (!objs.empty()) {
        out += ' ';
        out += objs;
    }
    return out;
}

RuleProgram RuleProgram::without_rule(const std::string& label) const {
    RuleProgram copy = *this;
    auto it = std::find_if(copy.rules.begin(), copy.rules.end(),
                           [&](const Rule& r) { return r.label == label; });
    if (it == copy.rules.end())
        throw std::runtime_error("no rule labeled '" + label + "'");
    copy.rules.erase(it);
    copy.rebuild_index();
    return copy;
}

}  // namespace psys
