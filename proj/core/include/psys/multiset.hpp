#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace psys {

using Symbol = std::uint32_t;
using Count = std::uint64_t;

// Object count overflowed 64 bits. Carries no location; the engine rethrows
// with cell/rule context attached.
struct CountOverflow : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Multiset of objects over a program alphabet. Entries with count zero are
// never stored; all arithmetic is checked.
class Multiset {
public:
    Multiset() = default;

    Multiset(std::initializer_list<std::pair<const Symbol, Count>> init) {
        for (const auto& [sym, n] : init) add(sym, n);
    }

    Count count(Symbol s) const {
        auto it = entries_.find(s);
        return it == entries_.end() ? 0 : it->second;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t distinct() const { return entries_.size(); }

    Count total() const {
        Count sum = 0;
        for (const auto& [sym, n] : entries_) {
            (void)sym;
            checked_add(sum, n);
        }
        return sum;
    }

    void add(Symbol s, Count n = 1) {
        if (n == 0) return;
        Count& slot = entries_[s];
        checked_add(slot, n);
    }

    void add(const Multiset& other) {
        for (const auto& [sym, n] : other.entries_) add(sym, n);
    }

    // Adds k copies of `other`; used for repeated rule applications.
    void add_scaled(const Multiset& other, Count k) {
        if (k == 0) return;
        for (const auto& [sym, n] : other.entries_) {
            if (n > std::numeric_limits<Count>::max() / k)
                throw CountOverflow("object count overflow");
            add(sym, n * k);
        }
    }

    bool contains(const Multiset& other) const {
        for (const auto& [sym, n] : other.entries_)
            if (count(sym) < n) return false;
        return true;
    }

    // Subtraction below zero is a programming error, not an input error.
    void subtract(const Multiset& other) {
        for (const auto& [sym, n] : other.entries_) {
            auto it = entries_.find(sym);
            if (it == entries_.end() || it->second < n)
                throw std::logic_error("multiset subtraction below zero");
            it->second -= n;
            if (it->second == 0) entries_.erase(it);
        }
    }

    void clear() { entries_.clear(); }

    bool operator==(const Multiset&) const = default;

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    static void checked_add(Count& target, Count n) {
        if (target > std::numeric_limits<Count>::max() - n)
            throw CountOverflow("object count overflow");
        target += n;
    }

    std::map<Symbol, Count> entries_;
};

}  // namespace psys
