#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "triwell/fock.hpp"

using namespace triwell;

namespace {

// independent oracle: collect every triple summing to N, sort into the
// canonical order (n1 desc, then n3 desc)
std::vector<FockState> brute_force(int n) {
    std::vector<FockState> all;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            for (int c = 0; c <= n; ++c)
                if (a + b + c == n) all.push_back(FockState{a, b, c});
    std::sort(all.begin(), all.end(), [](const FockState& x, const FockState& y) {
        if (x.n1 != y.n1) return x.n1 > y.n1;
        return x.n3 > y.n3;
    });
    return all;
}

}  // namespace

TEST_CASE("dimension closed form") {
    CHECK(fock_dimension(0) == 1);
    CHECK(fock_dimension(1) == 3);
    CHECK(fock_dimension(2) == static_cast<long long>(brute_force(2).size()));
    CHECK(fock_dimension(300) == 301LL * 302 / 2);  // = 45451
    CHECK(fock_dimension(300) == 45451);
    CHECK_THROWS_AS(fock_dimension(-1), std::invalid_argument);
}

TEST_CASE("canonical enumeration order") {
    FockBasis b1(1);
    const auto e1 = b1.enumerate();
    REQUIRE(e1.size() == 3);
    CHECK(e1[0] == FockState{1, 0, 0});
    CHECK(e1[1] == FockState{0, 0, 1});
    CHECK(e1[2] == FockState{0, 1, 0});

    const auto e0 = FockBasis(0).enumerate();
    REQUIRE(e0.size() == 1);
    CHECK(e0[0] == FockState{0, 0, 0});

    const auto e2 = FockBasis(2).enumerate();
    CHECK(e2 == brute_force(2));

    // deterministic across calls
    CHECK(FockBasis(7).enumerate() == FockBasis(7).enumerate());
}

TEST_CASE("enumeration matches brute force up to N=50") {
    for (int n : {3, 10, 25, 50}) {
        FockBasis basis(n);
        const auto states = basis.enumerate();
        REQUIRE(static_cast<long long>(states.size()) == fock_dimension(n));
        CHECK(states == brute_force(n));

        std::set<std::array<int, 3>> unique;
        for (const auto& s : states) {
            CHECK(s.total() == n);
            CHECK(s.n1 >= 0);
            CHECK(s.n2 >= 0);
            CHECK(s.n3 >= 0);
            unique.insert({s.n1, s.n2, s.n3});
        }
        CHECK(unique.size() == states.size());
    }
}

TEST_CASE("index/state are closed-form inverses") {
    FockBasis b5(5);
    for (int k = 0; k < b5.dimension(); ++k) {
        CHECK(b5.index_of(b5.state_of(k)) == k);
    }

    FockBasis b10(10);
    const auto states = b10.enumerate();
    for (int k = 0; k < b10.dimension(); ++k) {
        CHECK(b10.index_of(states[static_cast<std::size_t>(k)]) == k);
    }
}

TEST_CASE("invalid lookups are rejected") {
    FockBasis b(4);
    CHECK_THROWS_AS(b.state_of(b.dimension()), std::invalid_argument);
    CHECK_THROWS_AS(b.state_of(-1), std::invalid_argument);
    CHECK_THROWS_AS(b.index_of(FockState{1, 1, 1}), std::invalid_argument);   // total 3 != 4
    CHECK_THROWS_AS(b.index_of(FockState{-1, 4, 1}), std::invalid_argument);  // negative
}
