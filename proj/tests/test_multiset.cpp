#include <doctest.h>

#include <limits>
#include <vector>

#include "psys/multiset.hpp"

using namespace psys;

TEST_CASE("multiset basics") {
    Multiset m;
    CHECK(m.empty());
    m.add(2, 3);
    m.add(0);
    CHECK(m.count(2) == 3);
    CHECK(m.count(0) == 1);
    CHECK(m.count(7) == 0);
    CHECK(m.total() == 4);
    CHECK(m.distinct() == 2);
}

TEST_CASE("zero counts are never stored") {
    Multiset m;
    m.add(1, 2);
    Multiset two{{1, 2}};
    m.subtract(two);
    CHECK(m.empty());
    CHECK(m.distinct() == 0);
    m.add(5, 0);
    CHECK(m.empty());
}

TEST_CASE("contains and subtract") {
    Multiset m{{0, 2}, {1, 1}};
    CHECK(m.contains(Multiset{{0, 1}}));
    CHECK(m.contains(Multiset{{0, 2}, {1, 1}}));
    CHECK_FALSE(m.contains(Multiset{{0, 3}}));
    CHECK_FALSE(m.contains(Multiset{{2, 1}}));
    m.subtract(Multiset{{0, 1}});
    CHECK(m.count(0) == 1);
    CHECK_THROWS_AS(m.subtract(Multiset{{0, 5}}), std::logic_error);
}

TEST_CASE("checked arithmetic overflows loudly") {
    const Count big = std::numeric_limits<Count>::max();
    Multiset m;
    m.add(0, big);
    CHECK_THROWS_AS(m.add(0, 1), CountOverflow);
    Multiset unit{{1, 2}};
    Multiset target;
    CHECK_THROWS_AS(target.add_scaled(unit, big), CountOverflow);
}

TEST_CASE("iteration is in symbol order") {
    Multiset m{{4, 1}, {1, 2}, {3, 1}};
    std::vector<Symbol> order;
    for (const auto& [sym, n] : m) {
        (void)n;
        order.push_back(sym);
    }
    CHECK(order == std::vector<Symbol>{1, 3, 4});
}
