#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "psys/multiset.hpp"

namespace psys {

using StateId = std::uint32_t;

// Transfer tags for productions that leave the cell. `here` productions are
// kept separately on the rule.
enum class Transfer : std::uint8_t { go = 0, up, down, side, out };
inline constexpr std::size_t kTransferCount = 5;

std::string to_string(Transfer t);

enum class RewriteMode { max, min };

struct Rule {
    StateId source{};
    StateId target{};
    Multiset lhs;
    Multiset produced_here;
    std::array<Multiset, kTransferCount> emissions;  // indexed by Transfer
    std::string label;
    bool explicit_label = false;
    std::uint32_t line = 0;  // source line, 0 when built programmatically

    const Multiset& emission(Transfer t) const {
        return emissions[static_cast<std::size_t>(t)];
    }
};

// A rule program: ordered alphabet (canonical serialization order), ordered
// state list, and rules whose listed order is their priority order.
class RuleProgram {
public:
    std::vector<std::string> alphabet;
    std::vector<std::string> states;
    std::optional<StateId> firing_state;
    RewriteMode mode = RewriteMode::max;
    std::vector<Rule> rules;

    std::optional<Symbol> find_symbol(std::string_view name) const;
    std::optional<StateId> find_state(std::string_view name) const;
    const std::string& symbol_name(Symbol s) const { return alphabet.at(s); }
    const std::string& state_name(StateId s) const { return states.at(s); }

    void rebuild_index();  // call after mutating alphabet/states
    void validate() const; // enforces rule invariants

    bool uses_transfer(Transfer t) const;

    // "a d^3 e^2" in alphabet order; empty multiset renders as "".
    std::string render_multiset(const Multiset& m) const;
    // "s2 a d^3 e^2"; empty multiset renders the state alone.
    std::string render_cell(StateId state, const Multiset& m) const;

    // Returns a copy with the rule carrying `label` removed.
    RuleProgram without_rule(const std::string& label) const;

private:
    std::unordered_map<std::string, Symbol> symbol_index_;
    std::unordered_map<std::string, StateId> state_index_;
};

// Mobile channel roles: a channel exists between any cell holding the anchor
// symbol and any other cell holding a mobile or fixed endpoint symbol.
struct ChannelPolicy {
    Symbol anchor{};
    std::vector<Symbol> mobile;  // sorted
    std::vector<Symbol> fixed;   // sorted
};

}  // namespace psys
