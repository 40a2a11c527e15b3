#include "doctest.h"

#include "boomlab/fullgroup.hpp"

#include <cmath>
#include <random>

using namespace boomlab;

namespace {

SpacePtr haar2() { return std::make_shared<const OdometerSpace>(OdometerSpace::haar(2)); }
SpacePtr lam(long p, long q) { return std::make_shared<const OdometerSpace>(OdometerSpace::iii_lambda(make_q(p, q))); }
SpacePtr tern() {
    return std::make_shared<const OdometerSpace>(
        OdometerSpace(3, {{make_q(1, 2), make_q(1, 3), make_q(1, 6)}}, {make_q(1, 7), make_q(2, 7), make_q(4, 7)}));
}

FullGroupElement swap2(SpacePtr sp) { return make_element(sp, Pdp::from_lift({1, -1})); }

// class membership of a point, straight from its digits
bool point_in(const OdometerSpace& sp, const CylinderSet& A, const Q& x) {
    i64 r = residue(sp.q(), x, A.depth);
    return std::binary_search(A.classes.begin(), A.classes.end(), r);
}

// pointwise distance: enumerate integer representatives of every class
Q naive_distance(const FullGroupElement& g, const FullGroupElement& h) {
    const i64 D = std::max(g.depth(), h.depth());
    const auto& sp = *g.sp;
    Q d = 0;
    for (i64 x = 0; x < sp.modulus(D); ++x)
        if (apply(g, Q(x)) != apply(h, Q(x))) d += sp.class_measure(x, D);
    return d;
}

}  // namespace

TEST_CASE("element basics") {
    auto sp = haar2();
    CHECK(fg_T(sp).depth() == 0);
    CHECK(swap2(sp).depth() == 1);
    CHECK_THROWS_AS(make_element(sp, Pdp::from_lift({0, 0, 0})), std::exception);
    try {
        make_element(sp, Pdp::from_lift({1, 1, -2}));
        FAIL("period 3 accepted over base 2");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::NotInClass);
    }
    CHECK(apply(fg_T(sp), make_q(1, 3)) == make_q(4, 3));
    CHECK(apply(swap2(sp), Q(-1)) == Q(-2));
    auto other = lam(1, 2);
    try {
        uniform_distance(fg_T(sp), fg_T(other));
        FAIL("space mismatch accepted");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::SpaceMismatch);
    }
}

TEST_CASE("uniform distance examples") {
    auto sp = lam(1, 2);
    CHECK(uniform_distance(fg_T(sp), fg_identity(sp)) == 1);
    auto g = make_element(sp, Pdp::from_lift({0, 0, 0, 4}));
    CHECK(uniform_distance(g, fg_identity(sp)) == make_q(1, 9));
    CHECK(uniform_distance(g, g) == 0);
    CHECK(uniform_distance_prime(g, fg_identity(sp)) == make_q(2, 9));
}

TEST_CASE("metric axioms and pointwise agreement") {
    std::mt19937_64 rng(31);
    for (auto sp : {lam(1, 2), tern(), haar2()}) {
        for (int t = 0; t < 334; ++t) {
            std::uniform_int_distribution<i64> dep(1, sp->q() == 2 ? 5 : 3);
            auto f = random_element(sp, rng, dep(rng));
            auto g = random_element(sp, rng, dep(rng));
            auto h = random_element(sp, rng, dep(rng));
            Q fg = uniform_distance(f, g), gh = uniform_distance(g, h), fh = uniform_distance(f, h);
            CHECK(fh <= fg + gh);
            CHECK(fg == uniform_distance(g, f));
            CHECK((fg == 0) == fg_equal(f, g));
            CHECK(fg == naive_distance(f, g));
            CHECK(fg >= 0);
            CHECK(fg <= 1);
        }
    }
}

TEST_CASE("group laws") {
    std::mt19937_64 rng(8);
    auto sp = tern();
    for (int t = 0; t < 100; ++t) {
        auto f = random_element(sp, rng, 2), g = random_element(sp, rng, 3), h = random_element(sp, rng, 1);
        CHECK(fg_equal(fg_compose(f, fg_compose(g, h)), fg_compose(fg_compose(f, g), h)));
        CHECK(fg_equal(fg_compose(f, fg_inverse(f)), fg_identity(sp)));
        for (int s = 0; s < 5; ++s) {
            Q x = sample_point(*sp, rng);
            CHECK(apply(fg_compose(f, g), x) == apply(f, apply(g, x)));
            CHECK(apply(fg_inverse(f), apply(f, x)) == x);
        }
    }
}

TEST_CASE("Monte-Carlo distance bridge") {
    std::mt19937_64 rng(2024);
    auto sp = lam(1, 2);
    int within = 0;
    for (int t = 0; t < 5; ++t) {
        auto f = random_element(sp, rng, 6), g = random_element(sp, rng, 6);
        double exact = uniform_distance(f, g).get_d();
        auto mc = monte_carlo_distance(f, g, rng, 100000);
        double se = std::sqrt(exact * (1 - exact) / 100000);
        if (std::abs(mc.estimate - exact) <= 3 * se + 1e-12) ++within;
    }
    CHECK(within == 5);
}

TEST_CASE("action cocycle") {
    auto sp = haar2();
    auto T = fg_T(sp);
    for (const Q& x : {Q(0), make_q(1, 3), Q(-5)}) {
        auto a = action_cocycle(T, x, -10, 10);
        for (i64 j = -10; j <= 10; ++j) CHECK(a[static_cast<std::size_t>(j + 10)] == j + 1);
    }
    auto s = action_cocycle(swap2(sp), Q(0), 0, 5);
    CHECK(s == std::vector<i64>{1, 0, 3, 2, 5, 4});

    std::mt19937_64 rng(12);
    auto sp3 = tern();
    for (int t = 0; t < 100; ++t) {
        auto g = random_element(sp3, rng, 2), h = random_element(sp3, rng, 3);
        Q x = sample_point(*sp3, rng);
        auto agh = action_cocycle(fg_compose(g, h), x, -50, 50);
        auto ag = cocycle_pdp(g, x), ah = cocycle_pdp(h, x);
        for (i64 j = -50; j <= 50; ++j) {
            CHECK(agh[static_cast<std::size_t>(j + 50)] == ag(ah(j)));
            // g(T^j x) = T^{alpha(j)} x
            CHECK(apply(fg_compose(g, h), x + j) == x + agh[static_cast<std::size_t>(j + 50)]);
        }
    }
}

TEST_CASE("evaluate_rep") {
    auto sp = tern();
    std::mt19937_64 rng(5);
    ConstrainedRep rho{sp, {{1, random_element(sp, rng, 2)}, {2, random_element(sp, rng, 1)}}};
    CHECK(fg_equal(evaluate_rep(rho, Word::a(5)), fg_T(sp, 5)));
    CHECK(fg_equal(evaluate_rep(rho, parse_word("b1 b1^-1", true)), fg_identity(sp)));
    for (int t = 0; t < 50; ++t) {
        Word u = random_reduced_word(rng, 4, 2), v = random_reduced_word(rng, 3, 2);
        auto ruv = evaluate_rep(rho, u * v);
        for (int s = 0; s < 5; ++s) {
            Q x = sample_point(*sp, rng);
            CHECK(apply(ruv, x) == apply(evaluate_rep(rho, u), apply(evaluate_rep(rho, v), x)));
        }
    }
}

TEST_CASE("orbit count certificate and displacement") {
    auto sp = haar2();
    auto cT = orbit_count_certificate(fg_T(sp));
    CHECK(cT.k == 1);
    CHECK(cT.conservative);
    CHECK(!cT.periodic);
    auto cs = orbit_count_certificate(swap2(sp));
    CHECK(cs.k == 0);
    CHECK(cs.periodic);

    CHECK(total_displacement(fg_identity(sp)) == i64(0));
    CHECK(total_displacement(swap2(sp)) == i64(1));
    CHECK(!total_displacement(fg_T(sp)).has_value());

    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        auto g = random_periodic_element(sp, rng, 5, 3);
        auto td = total_displacement(g);
        REQUIRE(td.has_value());
        CHECK(*td <= 3);
        // brute-force orbit spans
        i64 m = 0;
        for (i64 j = 0; j < 32; ++j) {
            i64 lo = j, hi = j, pos = g.g(j);
            while (pos != j) {
                lo = std::min(lo, pos);
                hi = std::max(hi, pos);
                pos = g.g(pos);
            }
            m = std::max({m, j - lo, hi - j});
        }
        CHECK(*td == m);
    }
}

TEST_CASE("first return examples") {
    auto sp = haar2();
    auto T = fg_T(sp);
    auto r = first_return(T, make_cylinder(*sp, 1, {1}));
    CHECK(lift_at(r, 1) == std::vector<i64>{0, 2});
    CHECK(fg_equal(first_return(T, full_space(*sp, 0)), T));
    auto r4 = first_return(T, make_cylinder(*sp, 2, {0, 2}));
    CHECK(lift_at(r4, 2) == std::vector<i64>{2, 0, 2, 0});
    CHECK(validate(r4.g).ok);
    try {
        first_return(T, make_cylinder(*sp, 2, {}));
        FAIL("empty A accepted");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::EmptyA);
    }
}

TEST_CASE("first return properties") {
    std::mt19937_64 rng(44);
    auto sp = lam(1, 3);
    for (int t = 0; t < 1000; ++t) {
        std::uniform_int_distribution<i64> dep(1, 4);
        auto g = random_element(sp, rng, dep(rng));
        const i64 bd = dep(rng);
        std::vector<i64> cls;
        std::bernoulli_distribution coin(0.3);
        for (i64 u = 0; u < sp->modulus(bd); ++u)
            if (coin(rng)) cls.push_back(u);
        auto B = make_cylinder(*sp, bd, cls);
        if (B.classes.size() == static_cast<std::size_t>(sp->modulus(bd))) continue;
        auto gB = restrict_off(g, B);
        // d(g, g_{X\B}) <= mu(B u g^-1 B)
        CHECK(uniform_distance(g, gB) <= measure(*sp, unite(*sp, B, preimage(g, B))));
        if (t % 10 == 0) {
            auto A = complement(*sp, B);
            for (int s = 0; s < 8; ++s) {
                Q x = sample_point(*sp, rng);
                if (!point_in(*sp, A, x)) {
                    CHECK(apply(gB, x) == x);
                    continue;
                }
                // iterate g pointwise until the orbit comes back to A
                Q y = apply(g, x);
                int steps = 1;
                while (!point_in(*sp, A, y) && steps < 10000) {
                    y = apply(g, y);
                    ++steps;
                }
                CHECK(apply(gB, x) == y);
                if (point_in(*sp, A, apply(g, x))) CHECK(apply(gB, x) == apply(g, x));
            }
        }
    }
}

TEST_CASE("insertion examples") {
    auto sp = haar2();
    auto id = insertion(sp, 3, 5, 0, 3, {0, 1, 2, 3});
    CHECK(fg_equal(id, fg_identity(sp)));
    auto sw = insertion(sp, 3, 0, 0, 2, {1, 0, 2});
    auto c = lift_at(sw, 3);
    CHECK(c[0] == 1);
    CHECK(c[1] == -1);
    CHECK(c[2] == 0);
    try {
        insertion(sp, 2, 0, 0, 4, {0, 1, 2, 3, 4});
        FAIL("collision accepted");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::TranslatesCollide);
    }
    // support lies on the translates
    auto cyc = insertion(sp, 4, 3, -1, 2, {2, -1, 0, 1});
    auto cc = lift_at(cyc, 4);
    for (i64 u = 0; u < 16; ++u)
        if (u < 2 || u > 5) CHECK(cc[static_cast<std::size_t>(u)] == 0);
}

TEST_CASE("insert_word") {
    auto sp = lam(1, 2);
    std::mt19937_64 rng(3);
    ConstrainedRep rho{sp, {{1, swap2(sp)}}};
    auto A = full_space(*sp, 0);

    // identity permutations and w = a
    auto r0 = insert_word(rho, Word::a(), {{1, {0, 1, 2}}}, 0, 2, A, make_q(1, 10), rng);
    CHECK(r0.window_ok);
    CHECK(r0.disjoint);
    CHECK(r0.distance < make_q(1, 10));

    // a Sym(Z) model where w moves 0
    Word w = parse_word("b1 a");
    std::map<int, std::vector<i64>> pis{{1, {1, 2, 0}}};
    ZAction model = sym_model(pis, 0);
    CHECK(model.apply(w, 0) != 0);
    auto r1 = insert_word(rho, w, pis, 0, 2, A, make_q(1, 20), rng);
    CHECK(r1.window_ok);
    CHECK(r1.distance < make_q(1, 20));
    const i64 shift = model.apply(w, 0);
    // rho'(w) moves the deep class A' by T^shift
    auto moved = image(evaluate_rep(r1.rho, w), r1.A);
    CHECK(same_set(*sp, moved, translate(*sp, r1.A, shift)));

    // a stabilizer instance: w fixes 0 in the model, so rho'(w) fixes A' pointwise
    Word v = parse_word("b1^-1 a b1 a^-1");
    std::map<int, std::vector<i64>> fix{{1, {0, 2, 1}}};
    CHECK(sym_model(fix, 0).apply(v, 0) == 0);
    auto r2 = insert_word(rho, v, fix, 0, 2, A, make_q(1, 20), rng);
    CHECK(r2.window_ok);
    auto rv = evaluate_rep(r2.rho, v);
    for (const auto& x : r2.samples) CHECK(apply(rv, x) == x);
    CHECK(measure(*sp, r2.A) > 0);

    try {
        insert_word(rho, w, pis, 0, 2, A, make_q(1, 1000000), rng, 8);
        FAIL("reached impossible eps");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::CannotReachEps);
    }
}

TEST_CASE("dazzle examples") {
    auto sp = haar2();
    auto dz = dazzle({swap2(sp)}, 5, make_q(1, 2));
    CHECK(dz.ok());
    CHECK(dz.depth <= 5);
    CHECK(dz.worst_distance < make_q(1, 2));
    CHECK(dz.width >= 5);
    CHECK(dz.decomp.min_width() >= 5);

    auto di = dazzle({fg_identity(sp)}, 3, make_q(1, 2));
    CHECK(di.ok());
    CHECK(fg_equal(di.fs[0], fg_identity(sp)));
    CHECK(di.worst_distance == 0);

    try {
        dazzle({swap2(sp), fg_T(sp)}, 5, make_q(1, 2));
        FAIL("accepted T");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::InfiniteDisplacement);
    }
    try {
        dazzle({swap2(sp)}, 5, make_q(1, 1000000), 8);
        FAIL("reached impossible eps");
    } catch (const FullGroupError& e) {
        CHECK(e.kind == FullGroupError::Kind::DepthBudgetExceeded);
    }
}

TEST_CASE("dazzle on random periodic tuples") {
    std::mt19937_64 rng(19);
    for (auto sp : {haar2(), lam(1, 2), tern()}) {
        for (int t = 0; t < 20; ++t) {
            std::uniform_int_distribution<i64> mm(1, 3), cnt(1, 3);
            const i64 m = mm(rng);
            std::vector<FullGroupElement> hs;
            for (i64 k = cnt(rng); k > 0; --k) hs.push_back(random_periodic_element(sp, rng, sp->q() == 2 ? 4 : 2, m));
            i64 realm = 0;
            for (const auto& h : hs) realm = std::max(realm, *total_displacement(h));
            const Q eps = make_q(1, 4);
            auto dz = dazzle(hs, realm + 3, eps);
            CHECK(dz.ok());
            for (std::size_t j = 0; j < hs.size(); ++j) {
                CHECK(zebra_violation(dz.decomp, dz.fs[j].g).empty());
                CHECK(*total_displacement(dz.fs[j]) <= realm);
                CHECK(uniform_distance(dz.fs[j], hs[j]) < eps);
            }
            CHECK(dz.decomp.min_width() >= realm + 3);
        }
    }
}

TEST_CASE("ec_witness examples") {
    auto sp = lam(1, 2);
    std::mt19937_64 rng(23);
    ConstrainedRep rho{sp, {{1, random_periodic_element(sp, rng, 3, 1)}}};
    const Q eps = make_q(1, 3);

    auto comm = ec_witness(rho, parse_word("a b1 a^-1 b1^-1"), eps);
    CHECK(comm.ok);
    CHECK(comm.k == 0);
    CHECK(orbit_count_certificate(evaluate_rep(comm.rho, parse_word("a b1 a^-1 b1^-1"))).periodic);

    auto wa = ec_witness(rho, Word::a(), eps);
    CHECK(wa.ok);
    CHECK(wa.k == 1);
    CHECK(!wa.dz.has_value());

    Word w = parse_word("a b1 a b1");
    auto e2 = ec_witness(rho, w, eps);
    CHECK(e2.ok);
    CHECK(e2.k == 2);
    CHECK(e2.count.brute_force == 2);
    CHECK(e2.count.count == 2);
    CHECK(e2.distance < eps);
}

TEST_CASE("ec_witness on random instances") {
    std::mt19937_64 rng(99);
    auto sp = lam(1, 3);
    for (int t = 0; t < 30; ++t) {
        ConstrainedRep rho{sp, {{1, random_periodic_element(sp, rng, 3, 2)}, {2, random_periodic_element(sp, rng, 2, 1)}}};
        std::uniform_int_distribution<int> len(1, 4);
        Word w = random_reduced_word(rng, len(rng), 2);
        auto e = ec_witness(rho, w, make_q(1, 2));
        CHECK_MESSAGE(e.ok, w.str(), " ", e.detail);
        CHECK(e.k == std::abs(c_a(w)));
        if (e.dz) CHECK(e.count.brute_force == std::abs(c_a(w)));
    }
}

TEST_CASE("density step") {
    auto sp = lam(1, 10);
    std::mt19937_64 rng(4);
    ConstrainedRep rho{sp, {{1, random_periodic_element(sp, rng, 2, 1)}}};

    auto t3 = density_step(rho, fg_T(sp, 3), make_q(1, 20));
    CHECK(t3.found);
    CHECK(t3.w == Word::a(3));
    CHECK(t3.d_target == 0);

    auto g = swap2(sp);
    const Q eps = make_q(1, 4);
    auto r = density_step(rho, g, eps, 8);
    REQUIRE(r.found);
    CHECK(r.d_target < eps);
    CHECK(r.d_b1 <= 4 * eps);
    CHECK(r.w == Word::a(static_cast<int>(-r.n3)) * Word::b(1) * Word::a(static_cast<int>(r.n1)));
    // replay from (A, n1, n2, n3)
    auto again = density_build(rho, g, r.A, r.n1, r.n2, r.n3);
    CHECK(again.d_target == r.d_target);
    CHECK(again.d_b1 == r.d_b1);
    CHECK(fg_equal(again.eta.gen(1), r.eta.gen(1)));
    CHECK(uniform_distance(evaluate_rep(r.eta, r.w), g) == r.d_target);

    // a depth-2 target
    auto g2 = make_element(sp, Pdp::from_lift({2, 0, -2, 0}));
    auto r2 = density_step(rho, g2, eps, 8);
    CHECK(r2.found);
    if (r2.found) CHECK(uniform_distance(evaluate_rep(r2.eta, r2.w), g2) < eps);

    // Haar: translation preserves measure, so (i) and (ii) fight each other
    auto h = haar2();
    ConstrainedRep rh{h, {{1, swap2(h)}}};
    auto nf = density_step(rh, make_element(h, Pdp::from_lift({1, -1, 0, 0})), make_q(1, 50), 6);
    CHECK(!nf.found);
    CHECK(nf.best_target >= make_q(1, 50));
}
