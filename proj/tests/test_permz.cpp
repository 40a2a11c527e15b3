#include "doctest.h"

#include "boomlab/permz.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace boomlab;

namespace {

Pdp parity_swap() { return Pdp::from_lift({1, -1}); }

using oracle::random_pdp;

i64 oracle_infinite_orbits(const Pdp& g, i64 half, i64 inner) {
    return oracle::infinite_orbits([&](i64 j) { return g(j); }, 0, half, inner);
}

}  // namespace

TEST_CASE("validate examples") {
    CHECK(validate(parity_swap()).ok);
    auto v = validate(Pdp::from_lift({0, 1}));
    CHECK(!v.ok);
    CHECK(v.kind == PdpError::Kind::BaseNotBijective);
    auto e = validate(Pdp::from_lift({1}, {{0, 0}}));
    CHECK(!e.ok);
    CHECK(e.kind == PdpError::Kind::ExceptionsNotClosed);
}

TEST_CASE("evaluate examples") {
    CHECK(Pdp::shift()(5) == 6);
    CHECK(parity_swap()(2) == 3);
    Pdp tr = Pdp::from_lift({0}, {{0, 1}, {1, 0}});
    REQUIRE(validate(tr).ok);
    CHECK(tr(0) == 1);
    CHECK(tr(1) == 0);
    CHECK(tr(7) == 7);
}

TEST_CASE("compose and inverse examples") {
    CHECK(compose(Pdp::shift(), Pdp::shift(-1)) == Pdp::identity());
    CHECK(inverse(Pdp::shift()) == Pdp::shift(-1));
    CHECK(inverse(parity_swap()) == parity_swap());
    Pdp g = Pdp::from_lift({2, 0});
    CHECK(compose(g, Pdp::identity()) == canonical(g));
    Pdp p2 = Pdp::from_lift({1, -1});
    Pdp p3 = Pdp::from_lift({2, -1, -1});
    Pdp gh = compose(p2, p3);
    CHECK(gh.M == 6);
    for (i64 j = -100; j <= 100; ++j) CHECK(gh(j) == p2(p3(j)));
}

TEST_CASE("action radius examples") {
    CHECK(action_radius(Pdp::shift()) == 1);
    CHECK(action_radius(parity_swap()) == 1);
}

TEST_CASE("orbit profile examples") {
    auto ps = orbit_profile(Pdp::shift());
    CHECK(ps.cycles.size() == 1);
    CHECK(ps.cycles[0].winding == 1);
    CHECK(ps.infinite_orbit_count == 1);
    auto p = orbit_profile(Pdp::from_lift({2, 0}));
    CHECK(p.infinite_orbit_count == 1);
    CHECK(!p.periodic);
    CHECK(oracle_infinite_orbits(Pdp::from_lift({2, 0}), 50, 10) == 1);
    auto sw = orbit_profile(parity_swap());
    CHECK(sw.periodic);
    CHECK(sw.infinite_orbit_count == 0);
    CHECK_THROWS_AS(orbit_profile(Pdp::from_lift({0}, {{0, 1}, {1, 0}})), PdpError);
}

TEST_CASE("orbit classify examples") {
    auto s = orbit_classify(Pdp::shift(), 0, 10);
    CHECK(s.kind == OrbitClass::Kind::Infinite);
    auto f = orbit_classify(parity_swap(), 7, 10);
    REQUIRE(f.kind == OrbitClass::Kind::Finite);
    CHECK(std::set<i64>(f.cycle.begin(), f.cycle.end()) == std::set<i64>{6, 7});
    Pdp e = Pdp::from_lift({1}, {{5, 0}, {-1, 6}});
    REQUIRE(validate(e).ok);
    auto o = orbit_classify(e, 0, 100);
    REQUIRE(o.kind == OrbitClass::Kind::Finite);
    CHECK(o.cycle == std::vector<i64>{0, 1, 2, 3, 4, 5});
    // -1 jumps to 6 and escapes
    auto esc = orbit_classify(e, -3, 100);
    CHECK(esc.kind == OrbitClass::Kind::Infinite);
    CHECK(orbit_classify(Pdp::from_lift({1}, {{5, 0}, {-1, 6}}), -3, 2).kind == OrbitClass::Kind::Unknown);
}

TEST_CASE("escape certificates agree with a long brute-force trace") {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        Pdp g = random_pdp(rng, 8, 4);
        // add a finite-support perturbation near the origin
        std::map<i64, i64> tab;
        std::uniform_int_distribution<i64> pt(-6, 6);
        for (int k = 0; k < 3; ++k) tab[pt(rng)] = pt(rng);
        std::set<i64> vals;
        bool inj = true;
        for (auto& kv : tab) inj &= vals.insert(kv.second).second;
        if (!inj) continue;
        Pdp h = override_table(g, tab);
        for (i64 j = -10; j <= 10; ++j) {
            auto oc = orbit_classify(h, j, 10000);
            REQUIRE(oc.kind != OrbitClass::Kind::Unknown);
            i64 cur = j;
            bool back = false;
            for (int s = 0; s < 10000; ++s) {
                cur = h(cur);
                if (cur == j) {
                    back = true;
                    break;
                }
            }
            CHECK(back == (oc.kind == OrbitClass::Kind::Finite));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("finite support from table") {
    CHECK(finite_support_from_table({{0, 1}}).exc == std::map<i64, i64>{{0, 1}, {1, 0}});
    CHECK(finite_support_from_table({{0, 2}, {2, 0}}).exc == std::map<i64, i64>{{0, 2}, {2, 0}});
    Pdp g = finite_support_from_table({{0, 3}, {1, 4}});
    CHECK(validate(g).ok);
    CHECK(g(0) == 3);
    CHECK(g(1) == 4);
    std::set<i64> img;
    for (i64 j = -10; j <= 10; ++j) img.insert(g(j));
    CHECK(img.size() == 21);
    CHECK(img == [] {
        std::set<i64> s;
        for (i64 j = -10; j <= 10; ++j) s.insert(j);
        return s;
    }());
    CHECK_THROWS_AS(finite_support_from_table({{0, 1}, {2, 1}}), PdpError);
}

TEST_CASE("group laws and radius subadditivity on random elements") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 1000; ++t) {
        Pdp g = random_pdp(rng, 6, 5), h = random_pdp(rng, 6, 5);
        Pdp gh = compose(g, h);
        CHECK(action_radius(gh) <= action_radius(g) + action_radius(h));
        if (t < 60) {
            Pdp k = random_pdp(rng, 4, 3);
            Pdp gi = inverse(g);
            for (i64 j = -1000; j <= 1000; j += 7) {
                CHECK(gh(j) == g(h(j)));
                CHECK(compose(gh, k)(j) == compose(g, compose(h, k))(j));
                CHECK(gi(g(j)) == j);
            }
        }
    }
}

TEST_CASE("inverse with exceptions") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        Pdp g = override_table(random_pdp(rng, 5, 3), {{0, 9}, {4, -2}});
        Pdp gi = inverse(g);
        CHECK(validate(gi).ok);
        for (i64 j = -500; j <= 500; ++j) CHECK(gi(g(j)) == j);
        CHECK(compose(g, gi) == Pdp::identity());
    }
}

TEST_CASE("orbit profile equals brute-force count") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 200; ++t) {
        Pdp g = random_pdp(rng, 24, 8);
        i64 R = std::max<i64>(1, action_radius(g));
        i64 inner = 10 * g.M * R;
        CHECK(orbit_profile(g).infinite_orbit_count == oracle_infinite_orbits(g, 50 * g.M * R, inner));
        for (auto& cyc : orbit_profile(g).cycles) CHECK(cyc.winding % g.M == 0);
    }
}

TEST_CASE("period-k elements commute with the k-shift") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        Pdp g = random_pdp(rng, 12, 6);
        for (i64 j = -200; j <= 200; ++j) CHECK(g(j + g.M) == g(j) + g.M);
    }
}
