#include <doctest.h>

#include "stnet/free_cycles.hpp"
#include "stnet/bargmann.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace stnet;

namespace {

std::set<Corner> corner_set(std::vector<Corner> c) { return {c.begin(), c.end()}; }

SimplexLabels random_labels(std::mt19937_64& rng, int max_twice) {
    std::uniform_int_distribution<int> spin(0, max_twice);
    for (;;) {
        std::array<TwiceSpin, 10> e;
        for (auto& x : e) x = spin(rng);
        std::vector<SimplexLabels> all;
        try {
            all = simplex_assignments(e);
        } catch (const AdmissibilityError&) {
            continue;
        }
        if (all.empty()) continue;
        return all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    }
}

}  // namespace

TEST_CASE("cycle names cover the 37 cycles of the 4-simplex") {
    const auto& names = simplex_cycle_names();
    CHECK(names.size() == 37);
    CHECK(simplex_free_cycles().size() == 17);
    for (auto& p : simplex_free_cycles()) CHECK(std::find(names.begin(), names.end(), p) != names.end());
    auto k5 = AmplitudeGraph::complete(5);
    std::set<std::set<Corner>> named;
    for (auto& n : names) named.insert(corner_set(simplex_cycle_corners(n)));
    CHECK(named.size() == 37);
    for (auto& w : enumerate_simple_cycles(k5)) CHECK(named.count(corner_set(walk_corners(k5, w).corners)) == 1);
    CHECK_THROWS(simplex_cycle_corners("1233"));
}

TEST_CASE("derived sign cycles are exactly the odd corner monomials") {
    auto k5 = AmplitudeGraph::complete(5);
    std::set<std::set<Corner>> odd;
    for (auto& w : enumerate_simple_cycles(k5)) {
        auto wc = walk_corners(k5, w);
        if (wc.sign < 0) odd.insert(corner_set(wc.corners));
    }
    const auto& derived = sign_cycles(SignRule::Derived);
    CHECK(derived.size() == 26);
    std::set<std::set<Corner>> listed;
    for (auto& n : derived) listed.insert(corner_set(simplex_cycle_corners(n)));
    CHECK(listed == odd);
    CHECK(sign_cycles(SignRule::FiveCycle) == std::vector<std::string>{"1234", "1235", "1245", "12354", "12435"});
}

TEST_CASE("M formulas rebuild the corner labels") {
    std::mt19937_64 rng(2024);
    int rebuilt = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        SimplexLabels l = random_labels(rng, 4);
        auto corners = l.corners();
        std::array<int, 17> p;
        for (auto& x : p) x = std::uniform_int_distribution<int>(0, 3)(rng);
        auto a = free_cycle_m_values(corners, p);
        CHECK(a.M.size() == 37);
        for (int i = 0; i < 17; ++i) CHECK(a.M.at(simplex_free_cycles()[i]) == p[i]);
        bool nonneg = std::all_of(a.M.begin(), a.M.end(), [](auto& kv) { return kv.second >= 0; });
        CHECK(a.valid == nonneg);
        CHECK(corners_from_m(a.M) == corners);
        ++rebuilt;
    }
    CHECK(rebuilt == 1000);
}

TEST_CASE("free-cycle sum with the derived sign equals the cycle sum") {
    auto k5 = AmplitudeGraph::complete(5);
    RacahEvaluator cyc(k5, enumerate_simple_cycles(k5), Disjointness::Vertices);
    SimplexLabels half;
    half.edge.fill(1);
    int five_cycle_differs = 0;
    for (auto& l : simplex_assignments(half.edge)) {
        auto corners = l.corners();
        BigRational r = cyc(corners);
        CHECK(twenty_j_racah(l) == r);
        five_cycle_differs += twenty_j_racah(l, SignRule::FiveCycle) != r;
    }
    CHECK(five_cycle_differs > 0);
}

TEST_CASE("pruning does not change the free-cycle sum") {
    std::mt19937_64 rng(5);
    auto k5 = AmplitudeGraph::complete(5);
    RacahEvaluator cyc(k5, enumerate_simple_cycles(k5), Disjointness::Vertices);
    for (int trial = 0; trial < 12; ++trial) {
        SimplexLabels l = random_labels(rng, 2);
        FreeCycleStats pruned, full;
        BigRational a = twenty_j_racah(l, SignRule::Derived, true, &pruned);
        BigRational b = twenty_j_racah(l, SignRule::Derived, false, &full);
        CHECK(a == b);
        CHECK(a == cyc(l.corners()));
        CHECK(pruned.valid == full.valid);
        CHECK(pruned.visited <= full.visited);
    }
    SimplexLabels zero;
    CHECK(twenty_j_racah(zero) == 1);
}
