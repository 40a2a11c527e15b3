#include "doctest.h"

#include "boomlab/zebra.hpp"
#include "oracles.hpp"

#include <cstdlib>
#include <random>

using namespace boomlab;

namespace {

// evaluates w letter by letter from the raw lifts; inverses by local search
struct NaiveEval {
    const ZebraFamily& z;
    i64 fwd(int i, i64 j) const {
        const auto& b = z.at(i).base;
        return j + b.c[static_cast<std::size_t>(pmod(j, b.M))];
    }
    i64 bwd(int i, i64 j) const {
        const i64 M = z.at(i).base.M;
        for (i64 k = j - M; k <= j + M; ++k)
            if (fwd(i, k) == j) return k;
        FAIL("no preimage");
        return j;
    }
    i64 operator()(const Word& w, i64 j) const {
        const auto& ls = w.letters();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
            if (it->gen == 0)
                j += it->exp;
            else
                j = it->exp > 0 ? fwd(it->gen, j) : bwd(it->gen, j);
        }
        return j;
    }
};

ZebraDecomposition strip(i64 M, i64 lo, i64 hi) { return ZebraDecomposition::from_intervals(M, {{lo, hi}}); }

ZebraFamily one(const ZebraPermutation& zp) { return {{1, zp}}; }

ZebraPermutation identity_zebra(const ZebraDecomposition& d) { return make_zebra_from_map(d, {}); }

}  // namespace

TEST_CASE("decomposition geometry") {
    auto d = strip(12, 0, 5);
    CHECK(d.min_width() == 6);
    CHECK(d.anchor() == 0);
    CHECK(d.black_start(0) == 0);
    CHECK(d.black_end(0) == 5);
    CHECK(d.white_start(0) == 6);
    CHECK(d.white_end(0) == 11);
    CHECK(d.black_start(-1) == -12);

    // a black run wrapping through 0 starts at a negative integer
    auto w = ZebraDecomposition::from_intervals(10, {{0, 2}, {8, 9}});
    CHECK(w.black_runs() == 1);
    CHECK(w.anchor() == -2);
    CHECK(w.min_width() == 5);

    auto two = ZebraDecomposition::from_intervals(20, {{2, 6}, {10, 17}});
    CHECK(two.black_runs() == 2);
    CHECK(two.min_width() == 5);
    CHECK(two.black_start(1) == 10);
    CHECK(two.black_start(2) == 22);
    CHECK(two.black_start(-1) == -10);

    auto loc = two.locate(11, 2);
    CHECK(loc.k == 1);
    CHECK(loc.part == ZebraDecomposition::Part::L);
    CHECK(two.locate(13, 2).part == ZebraDecomposition::Part::C);
    CHECK(two.locate(16, 2).part == ZebraDecomposition::Part::R);
    auto wl = two.locate(19, 2);
    CHECK(wl.k == 1);
    CHECK(wl.part == ZebraDecomposition::Part::W);
    CHECK(two.locate(0, 2).k == -1);

    CHECK_THROWS_AS(ZebraDecomposition::from_intervals(5, {{0, 4}}), ZebraError);
    CHECK_THROWS_AS(ZebraDecomposition::from_intervals(5, {}), ZebraError);
}

TEST_CASE("make_zebra examples") {
    auto d = strip(12, 0, 5);
    auto z = make_zebra(d, {{1, 0, 2, 3, 4, 5}});
    CHECK(z.base.c[6] == 1);
    CHECK(z.base.c[7] == -1);
    for (i64 u = 0; u < 12; ++u)
        if (u != 6 && u != 7) CHECK(z.base.c[static_cast<std::size_t>(u)] == 0);

    auto id = make_zebra(d, {{0, 1, 2, 3, 4, 5}});
    CHECK(canonical(id.base) == Pdp::identity());

    auto d26 = strip(26, 0, 12);
    auto cyc = make_zebra_from_map(d26, {{13, 14}, {14, 15}, {15, 13}});
    CHECK(validate(cyc.base).ok);
    CHECK(action_radius(cyc.base) == 2);
    CHECK(zebra_violation(d26, cyc.base).empty());

    try {
        make_zebra(d, {{0, 0, 2, 3, 4, 5}});
        FAIL("accepted non-permutation");
    } catch (const ZebraError& e) {
        CHECK(e.kind == ZebraError::Kind::TableNotPermutation);
    }
    try {
        make_zebra(d, {{0, 1, 2}});
        FAIL("accepted short table");
    } catch (const ZebraError& e) {
        CHECK(e.kind == ZebraError::Kind::RunMismatch);
    }
    CHECK(!zebra_violation(d, Pdp::shift()).empty());
}

TEST_CASE("radius bounded by white run length") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        auto inst = random_zebra_instance(rng);
        for (const auto& [i, zp] : inst.zperms) {
            i64 longest = 0;
            for (const auto& r : zp.decomp.runs())
                if (!r.black) longest = std::max(longest, r.len);
            CHECK(action_radius(zp.base) <= longest - 1);
            CHECK(zebra_violation(zp.decomp, zp.base).empty());
        }
    }
}

TEST_CASE("zebradyn on the commutator") {
    auto d = strip(26, 0, 12);
    auto z = one(make_zebra_from_map(d, {{13, 14}, {14, 13}, {20, 21}, {21, 20}}));
    Word w = parse_word("a b1 a^-1 b1^-1");
    auto h = width_hypothesis(w, z);
    CHECK(h.L == 4);
    CHECK(h.R == 1);
    CHECK(h.s == 13);
    CHECK(h.holds);
    auto rep = check_zebradyn(w, z, -78, 78);
    CHECK(rep.ok);
    for (auto c : rep.checked) CHECK(c > 0);

    auto cnt = count_infinite_orbits(w, z);
    CHECK(cnt.count == 0);
    CHECK(cnt.consistent);
    Pdp g = zebra_action(z).element(w);
    CHECK(orbit_profile(g).periodic);
}

TEST_CASE("w = a acts as the shift on C") {
    auto d = strip(12, 0, 5);
    auto z = one(make_zebra(d, {{1, 0, 2, 3, 4, 5}}));
    auto rep = check_zebradyn(Word::a(), z, -36, 36);
    CHECK(rep.ok);
    for (i64 n = -36; n <= 36; ++n) {
        auto l = d.locate(n, 1);
        if (l.part == ZebraDecomposition::Part::C) CHECK(zebra_action(z).apply(Word::a(), n) == n + 1);
    }
}

TEST_CASE("width hypothesis gate") {
    auto d = strip(6, 0, 2);
    auto z = one(make_zebra_from_map(d, {{3, 4}, {4, 3}}));
    Word w = parse_word("a b1");
    auto h = width_hypothesis(w, z);
    CHECK(h.s == 3);
    CHECK(!h.holds);
    try {
        check_zebradyn(w, z, -18, 18);
        FAIL("no gate");
    } catch (const ZebraError& e) {
        CHECK(e.kind == ZebraError::Kind::HypothesisViolated);
        CHECK(std::string(e.what()).find("s=3") != std::string::npos);
    }
    CHECK_THROWS_AS(count_infinite_orbits(w, z), ZebraError);
}

TEST_CASE("window too small") {
    auto d = strip(12, 0, 5);
    auto z = one(identity_zebra(d));
    try {
        count_infinite_orbits(Word::a(), z, 0, 20);
        FAIL("no window error");
    } catch (const ZebraError& e) {
        CHECK(e.kind == ZebraError::Kind::WindowTooSmall);
    }
    CHECK_THROWS_AS(check_zebradyn(Word::a(), z, 0, 20), ZebraError);
}

TEST_CASE("orbit count examples") {
    auto d = strip(12, 0, 5);
    auto z = one(identity_zebra(d));
    auto c = count_infinite_orbits(Word::a(), z);
    CHECK(c.count == 1);
    CHECK(c.consistent);

    auto d40 = strip(40, 0, 24);
    auto z40 = one(make_zebra_from_map(d40, {{25, 26}, {26, 25}, {30, 31}, {31, 30}, {38, 39}, {39, 38}}));
    Word w = parse_word("a b1 a b1");
    CHECK(width_hypothesis(w, z40).holds);
    auto r = count_infinite_orbits(w, z40, -200, 200);
    CHECK(r.count == 2);
    CHECK(r.brute_force == 2);
    CHECK(r.consistent);
    CHECK(r.witnesses.size() == 2);
    NaiveEval ev{z40};
    CHECK(oracle::infinite_orbits([&](i64 j) { return ev(w, j); }, 0, 200, 66) == 2);

    // negative winding counts |c_a|
    auto rn = count_infinite_orbits(w.inverse(), z40, -200, 200);
    CHECK(rn.count == 2);
    CHECK(rn.consistent);
}

TEST_CASE("random instances: orbit count and zebradyn") {
    std::mt19937_64 rng(20261015);
    for (int t = 0; t < 300; ++t) {
        auto inst = random_zebra_instance(rng);
        const auto& w = inst.w;
        auto h = width_hypothesis(w, inst.zperms);
        REQUIRE(h.holds);
        auto [lo, hi] = default_window(w, inst.zperms);
        auto rep = check_zebradyn(w, inst.zperms, lo, hi);
        CHECK_MESSAGE(rep.ok, w.str(), " clause ", rep.clause, " at ", rep.n);
        auto cnt = count_infinite_orbits(w, inst.zperms, lo, hi);
        const i64 expect = std::abs(c_a(w));
        CHECK_MESSAGE(cnt.consistent, cnt.detail);
        CHECK(cnt.count == expect);

        NaiveEval ev{inst.zperms};
        const i64 M = inst.zperms.begin()->second.decomp.period();
        const i64 centre = (lo + hi) / 2;
        CHECK(oracle::infinite_orbits([&](i64 j) { return ev(w, j); }, centre, 3 * M, M) == expect);
        for (i64 j = lo; j <= hi; j += 7) CHECK(zebra_action(inst.zperms).apply(w, j) == ev(w, j));
    }
}

TEST_CASE("zebra permutations of one type are closed under compose") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        auto inst = random_zebra_instance(rng);
        const auto& d = inst.zperms.begin()->second.decomp;
        auto f = random_zebra_permutation(rng, d, 3);
        auto g = random_zebra_permutation(rng, d, 2);
        CHECK(zebra_violation(d, compose(f.base, g.base)).empty());
        CHECK(zebra_violation(d, inverse(f.base)).empty());
    }
}

TEST_CASE("narrow strips can break the count") {
    // search for an instance outside the hypothesis where the number of infinite orbits differs
    std::mt19937_64 rng(11);
    bool found = false;
    for (int t = 0; t < 5000 && !found; ++t) {
        std::uniform_int_distribution<i64> bl(1, 3), wl(2, 8);
        std::uniform_int_distribution<int> len(2, 8);
        i64 b = bl(rng), wlen = wl(rng);
        auto d = strip(b + wlen, 0, b - 1);
        ZebraFamily z{{1, random_zebra_permutation(rng, d, wlen - 1)}, {2, random_zebra_permutation(rng, d, wlen - 1)}};
        Word w = random_reduced_word(rng, len(rng), 2);
        if (width_hypothesis(w, z).holds) continue;
        const i64 M = d.period();
        i64 got = brute_force_infinite_orbits(w, z, -30 * M, 30 * M);
        NaiveEval ev{z};
        i64 oracle_count = oracle::infinite_orbits([&](i64 j) { return ev(w, j); }, 0, 30 * M, 10 * M);
        CHECK(got == oracle_count);
        if (got != std::abs(c_a(w))) {
            found = true;
            MESSAGE("counterexample: w=", w.str(), " M=", M, " black=", b, " orbits=", got, " |c_a|=", std::abs(c_a(w)));
        }
    }
    CHECK(found);
}

TEST_CASE("folner examples") {
    auto d = strip(12, 0, 5);
    auto z = one(make_zebra(d, {{1, 0, 2, 3, 4, 5}}));
    auto r = folner_intervals(z, Q(1, 100), {Word::b(1)});
    REQUIRE(r.certified);
    CHECK(r.intervals.back().blocks == 1);
    CHECK(r.intervals.back().worst_ratio == 0);

    auto ra = folner_intervals(z, Q(1, 4), {Word::a()});
    REQUIRE(ra.certified);
    CHECK(ra.intervals.back().blocks == 1);
    CHECK(ra.intervals.back().hi - ra.intervals.back().lo + 1 == 12);
    CHECK(ra.intervals.back().worst_ratio == Q(1, 6));

    // independent symmetric-difference count on the certified interval
    auto F = ball(2, {0, 1});
    Q eps(1, 10);
    auto rb = folner_intervals(z, eps, F);
    REQUIRE(rb.certified);
    const auto& fi = rb.intervals.back();
    NaiveEval ev{z};
    const i64 size = fi.hi - fi.lo + 1;
    for (const auto& g : F) {
        std::set<i64> image;
        for (i64 n = fi.lo; n <= fi.hi; ++n) image.insert(ev(g, n));
        i64 sym = 0;
        for (i64 y : image)
            if (y < fi.lo || y > fi.hi) ++sym;
        sym *= 2;
        CHECK(make_q(sym, size) < eps);
    }
    // the previous union of blocks fails for some element of the ball
    if (rb.intervals.size() >= 2) CHECK(rb.intervals[rb.intervals.size() - 2].worst_ratio >= eps);
    // intervals are unions of whole blocks, hence invariant under every b_i
    CHECK(pmod(fi.lo - d.anchor(), 12) == 0);
    CHECK(size % 12 == 0);
}
