#include "boomlab/fullgroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

namespace boomlab {

namespace {
using Kind = FullGroupError::Kind;

bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->q() == b->q() && a->levels() == b->levels() && a->tail() == b->tail();
}

void require_same(const FullGroupElement& g, const FullGroupElement& h) {
    if (!same_space(g.sp, h.sp)) throw FullGroupError(Kind::SpaceMismatch, "elements live on different spaces");
}

i64 depth_for(i64 q, i64 M) {
    i64 p = 1;
    for (i64 n = 0; n <= 40; ++n) {
        if (p % M == 0) return n;
        p *= q;
    }
    throw FullGroupError(Kind::NotInClass, "period " + std::to_string(M) + " divides no power of " + std::to_string(q));
}

// representative of r mod P in (-P/2, P/2]
i64 centred(i64 r, i64 P) {
    r = pmod(r, P);
    return 2 * r > P ? r - P : r;
}
}  // namespace

i64 FullGroupElement::depth() const { return depth_for(sp->q(), g.M); }

FullGroupElement make_element(SpacePtr sp, Pdp g) {
    if (!sp) throw FullGroupError(Kind::BadInput, "missing space");
    if (!g.exc.empty()) throw FullGroupError(Kind::NotInClass, "full-group elements carry no exceptions");
    require_valid(g);
    depth_for(sp->q(), g.M);
    return {std::move(sp), canonical(g)};
}

FullGroupElement fg_identity(SpacePtr sp) { return make_element(std::move(sp), Pdp::identity()); }
FullGroupElement fg_T(SpacePtr sp, i64 k) { return make_element(std::move(sp), Pdp::shift(k)); }

FullGroupElement fg_compose(const FullGroupElement& g, const FullGroupElement& h) {
    require_same(g, h);
    return {g.sp, canonical(compose(g.g, h.g))};
}

FullGroupElement fg_inverse(const FullGroupElement& g) { return {g.sp, canonical(inverse(g.g))}; }

bool fg_equal(const FullGroupElement& g, const FullGroupElement& h) {
    return same_space(g.sp, h.sp) && canonical(g.g) == canonical(h.g);
}

std::vector<i64> lift_at(const FullGroupElement& g, i64 depth) { return g.g.refined(g.sp->modulus(depth)).c; }

Q apply(const FullGroupElement& g, const Q& x) {
    const i64 n = g.depth();
    i64 u = residue(g.sp->q(), x, n);
    Q r = x + g.g.c[static_cast<std::size_t>(u % g.g.M)];
    return r;
}

CylinderSet preimage(const FullGroupElement& g, const CylinderSet& S) {
    const auto& sp = *g.sp;
    const i64 D = std::max(S.depth, g.depth());
    const i64 P = sp.modulus(D);
    auto L = lift_at(g, D);
    auto R = refine(sp, S, D);
    std::vector<char> in(static_cast<std::size_t>(P), 0);
    for (i64 u : R.classes) in[static_cast<std::size_t>(u)] = 1;
    CylinderSet out{D, {}};
    for (i64 u = 0; u < P; ++u)
        if (in[static_cast<std::size_t>(pmod(u + L[static_cast<std::size_t>(u)], P))]) out.classes.push_back(u);
    return out;
}

CylinderSet image(const FullGroupElement& g, const CylinderSet& S) {
    const auto& sp = *g.sp;
    const i64 D = std::max(S.depth, g.depth());
    const i64 P = sp.modulus(D);
    auto L = lift_at(g, D);
    CylinderSet out{D, {}};
    for (i64 u : refine(sp, S, D).classes) out.classes.push_back(pmod(u + L[static_cast<std::size_t>(u)], P));
    std::sort(out.classes.begin(), out.classes.end());
    return out;
}

Q uniform_distance(const FullGroupElement& g, const FullGroupElement& h) {
    require_same(g, h);
    const i64 D = std::max(g.depth(), h.depth());
    auto a = lift_at(g, D), b = lift_at(h, D);
    const auto& m = g.sp->class_measures(D);
    Q d = 0;
    for (std::size_t u = 0; u < a.size(); ++u)
        if (a[u] != b[u]) d += m[u];
    return d;
}

Q uniform_distance_prime(const FullGroupElement& g, const FullGroupElement& h) {
    return uniform_distance(g, h) + uniform_distance(fg_inverse(g), fg_inverse(h));
}

Pdp cocycle_pdp(const FullGroupElement& g, const Q& x) {
    const i64 M = g.g.M;
    const i64 xbar = residue(g.sp->q(), x, g.depth()) % M;
    Pdp a;
    a.M = M;
    a.c.resize(static_cast<std::size_t>(M));
    for (i64 j = 0; j < M; ++j) a.c[static_cast<std::size_t>(j)] = g.g.c[static_cast<std::size_t>((xbar + j) % M)];
    return a;
}

std::vector<i64> action_cocycle(const FullGroupElement& g, const Q& x, i64 lo, i64 hi) {
    Pdp a = cocycle_pdp(g, x);
    std::vector<i64> out;
    for (i64 j = lo; j <= hi; ++j) out.push_back(a(j));
    return out;
}

FullGroupElement ConstrainedRep::gen(int i) const {
    auto it = b.find(i);
    return it == b.end() ? fg_identity(sp) : it->second;
}

FullGroupElement evaluate_rep(const ConstrainedRep& rho, const Word& w) {
    Pdp r = Pdp::identity();
    std::map<int, Pdp> inv;
    for (const auto& l : w.letters()) {
        if (l.gen == 0) {
            r = compose(r, Pdp::shift(l.exp));
            continue;
        }
        auto g = rho.gen(l.gen);
        require_same(g, FullGroupElement{rho.sp, Pdp::identity()});
        if (l.exp > 0) {
            r = compose(r, g.g);
        } else {
            auto it = inv.find(l.gen);
            if (it == inv.end()) it = inv.emplace(l.gen, inverse(g.g)).first;
            r = compose(r, it->second);
        }
    }
    return {rho.sp, canonical(r)};
}

Q rep_distance(const ConstrainedRep& r1, const ConstrainedRep& r2) {
    std::set<int> keys;
    for (const auto& [i, g] : r1.b) keys.insert(i);
    for (const auto& [i, g] : r2.b) keys.insert(i);
    Q worst = 0;
    for (int i : keys) worst = std::max(worst, uniform_distance(r1.gen(i), r2.gen(i)));
    return worst;
}

ConservativityCertificate orbit_count_certificate(const FullGroupElement& g) {
    ConservativityCertificate c;
    c.profile = orbit_profile(g.g);
    c.k = c.profile.infinite_orbit_count;
    // finitely many infinite orbits per T-orbit already forces conservativity
    c.conservative = true;
    c.periodic = c.k == 0;
    return c;
}

std::optional<i64> total_displacement(const FullGroupElement& g) {
    const Pdp& p = g.g;
    std::vector<char> seen(static_cast<std::size_t>(p.M), 0);
    i64 m = 0;
    for (i64 u = 0; u < p.M; ++u) {
        if (seen[static_cast<std::size_t>(u)]) continue;
        i64 pos = u, lo = u, hi = u;
        do {
            seen[static_cast<std::size_t>(pmod(pos, p.M))] = 1;
            pos = p(pos);
            lo = std::min(lo, pos);
            hi = std::max(hi, pos);
        } while (pmod(pos, p.M) != u);
        if (pos != u) return std::nullopt;
        m = std::max(m, hi - lo);
    }
    return m;
}

FullGroupElement first_return(const FullGroupElement& g, const CylinderSet& A) {
    if (A.classes.empty()) throw FullGroupError(Kind::EmptyA, "first return to an empty set");
    const auto& sp = *g.sp;
    const i64 D = std::max(A.depth, g.depth());
    const i64 P = sp.modulus(D);
    auto L = lift_at(g, D);
    std::vector<char> in(static_cast<std::size_t>(P), 0);
    auto R = refine(sp, A, D);
    for (i64 u : R.classes) in[static_cast<std::size_t>(u)] = 1;
    std::vector<i64> c(static_cast<std::size_t>(P), 0);
    for (i64 u : R.classes) {
        i64 disp = L[static_cast<std::size_t>(u)];
        i64 v = pmod(u + disp, P);
        while (!in[static_cast<std::size_t>(v)]) {
            disp += L[static_cast<std::size_t>(v)];
            v = pmod(v + L[static_cast<std::size_t>(v)], P);
        }
        c[static_cast<std::size_t>(u)] = disp;
    }
    return make_element(g.sp, Pdp::from_lift(std::move(c)));
}

FullGroupElement restrict_off(const FullGroupElement& g, const CylinderSet& B) {
    return first_return(g, complement(*g.sp, B));
}

FullGroupElement insertion(SpacePtr sp, i64 depth, i64 u0, i64 lo, i64 hi, const std::vector<i64>& table) {
    const i64 P = sp->modulus(depth);
    const i64 len = hi - lo + 1;
    if (len <= 0 || static_cast<i64>(table.size()) != len) throw FullGroupError(Kind::BadInput, "table must cover the interval");
    if (len > P)
        throw FullGroupError(Kind::TranslatesCollide, "interval of " + std::to_string(len) + " points exceeds " + std::to_string(P) +
                                                          " classes");
    std::vector<char> seen(static_cast<std::size_t>(len), 0);
    for (i64 v : table) {
        if (v < lo || v > hi || seen[static_cast<std::size_t>(v - lo)]) throw FullGroupError(Kind::BadInput, "not a permutation of the interval");
        seen[static_cast<std::size_t>(v - lo)] = 1;
    }
    std::vector<i64> c(static_cast<std::size_t>(P), 0);
    for (i64 t = 0; t < len; ++t) c[static_cast<std::size_t>(pmod(u0 + lo + t, P))] = table[static_cast<std::size_t>(t)] - (lo + t);
    return make_element(std::move(sp), Pdp::from_lift(std::move(c)));
}

ZAction sym_model(const std::map<int, std::vector<i64>>& pis, i64 lo) {
    std::map<int, Pdp> gens;
    for (const auto& [i, tab] : pis) {
        std::map<i64, i64> t;
        for (std::size_t k = 0; k < tab.size(); ++k) t[lo + static_cast<i64>(k)] = tab[k];
        gens.emplace(i, finite_support_from_table(t));
    }
    return ZAction(std::move(gens));
}

namespace {
CylinderSet translates_of(const OdometerSpace& sp, i64 depth, i64 u, i64 lo, i64 hi) {
    std::vector<i64> cls;
    const i64 P = sp.modulus(depth);
    for (i64 j = lo; j <= hi; ++j) cls.push_back(pmod(u + j, P));
    return make_cylinder(sp, depth, cls);
}

double class_sum(const std::vector<Q>& m, i64 u, i64 lo, i64 hi, i64 P) {
    double s = 0;
    for (i64 j = lo; j <= hi; ++j) s += m[static_cast<std::size_t>(pmod(u + j, P))].get_d();
    return s;
}

ZAction cocycle_action(const ConstrainedRep& rho, const Q& x) {
    std::map<int, Pdp> gens;
    for (const auto& [i, g] : rho.b) gens.emplace(i, cocycle_pdp(g, x));
    return ZAction(std::move(gens));
}
}  // namespace

InsertResult insert_word(const ConstrainedRep& rho, const Word& w, const std::map<int, std::vector<i64>>& pis, i64 lo,
                         i64 hi, const CylinderSet& A, const Q& eps, std::mt19937_64& rng, i64 max_depth) {
    if (A.classes.empty()) throw FullGroupError(Kind::EmptyA, "empty target set");
    const auto& sp = *rho.sp;
    const i64 L = static_cast<i64>(w.length());
    const i64 M1 = lo - L, M2 = hi + L, width = M2 - M1 + 1;
    std::set<int> gens;
    for (const auto& [i, g] : rho.b) gens.insert(i);
    for (const auto& [i, t] : pis) gens.insert(i);
    for (const auto& l : w.letters())
        if (l.gen > 0) gens.insert(l.gen);
    std::map<int, std::vector<i64>> ext;  // pi_i extended by the identity to [M1, M2]
    for (int i : gens) {
        std::vector<i64> t(static_cast<std::size_t>(width));
        std::iota(t.begin(), t.end(), M1);
        auto it = pis.find(i);
        if (it != pis.end()) {
            if (static_cast<i64>(it->second.size()) != hi - lo + 1) throw FullGroupError(Kind::BadInput, "permutation table size");
            for (i64 k = 0; k <= hi - lo; ++k) t[static_cast<std::size_t>(lo + k - M1)] = it->second[static_cast<std::size_t>(k)];
        }
        ext.emplace(i, std::move(t));
    }
    i64 n0 = A.depth;
    for (const auto& [i, g] : rho.b) n0 = std::max(n0, g.depth());
    while (sp.modulus(n0) < width) ++n0;
    for (i64 n = n0; n <= max_depth; ++n) {
        const i64 P = sp.modulus(n);
        const auto& m = sp.class_measures(n);
        auto cand = refine(sp, A, n).classes;
        std::vector<std::pair<double, i64>> order;
        for (i64 u : cand) order.push_back({class_sum(m, u, M1, M2, P), u});
        std::sort(order.begin(), order.end());
        const std::size_t tries = std::min<std::size_t>(order.size(), 8);
        for (std::size_t t = 0; t < tries; ++t) {
            const i64 u = order[t].second;
            CylinderSet B = translates_of(sp, n, u, M1, M2);
            ConstrainedRep out{rho.sp, {}};
            for (int i : gens) {
                auto r = restrict_off(rho.gen(i), B);
                auto iota = insertion(rho.sp, n, u, M1, M2, ext.at(i));
                out.b.emplace(i, fg_compose(iota, r));
            }
            Q d = rep_distance(out, rho);
            if (!(d < eps)) continue;
            InsertResult res;
            res.rho = out;
            res.A = make_cylinder(sp, n, {u});
            res.M1 = M1;
            res.M2 = M2;
            res.distance = d;
            res.disjoint = static_cast<i64>(B.classes.size()) == width;
            ZAction model = sym_model(pis, lo);
            res.window_ok = true;
            for (int s = 0; s < 64; ++s) {
                Q x = sample_point_in(sp, rng, n, u);
                res.samples.push_back(x);
                ZAction act = cocycle_action(out, x);
                for (i64 j = lo; j <= hi && res.window_ok; ++j)
                    if (act.apply(w, j) != model.apply(w, j)) res.window_ok = false;
            }
            return res;
        }
    }
    throw FullGroupError(Kind::CannotReachEps, "no class of depth <= " + std::to_string(max_depth) + " gets below eps = " + q_str(eps));
}

DazzleResult dazzle(const std::vector<FullGroupElement>& hs, i64 Mp, const Q& eps, i64 max_depth) {
    if (hs.empty()) throw FullGroupError(Kind::BadInput, "no elements to dazzle");
    const SpacePtr sp = hs.front().sp;
    i64 m = 0, n0 = 0;
    for (const auto& h : hs) {
        require_same(h, hs.front());
        auto td = total_displacement(h);
        if (!td) throw FullGroupError(Kind::InfiniteDisplacement, "element has an infinite orbit");
        m = std::max(m, *td);
        n0 = std::max(n0, h.depth());
    }
    if (Mp <= m) throw FullGroupError(Kind::BadInput, "strip width must exceed the displacement bound");
    while (sp->modulus(n0) < Mp + 2) ++n0;
    for (i64 n = n0; n <= max_depth; ++n) {
        const i64 P = sp->modulus(n);
        const auto& meas = sp->class_measures(n);
        std::vector<std::pair<double, i64>> order;
        for (i64 u = 0; u < P; ++u) order.push_back({class_sum(meas, u, 0, Mp, P), u});
        std::sort(order.begin(), order.end());
        const std::size_t tries = std::min<std::size_t>(order.size(), 16);
        for (std::size_t t = 0; t < tries; ++t) {
            const i64 u0 = order[t].second;
            CylinderSet B = translates_of(*sp, n, u0, 0, Mp);
            DazzleResult r;
            r.depth = n;
            r.u0 = u0;
            r.m = m;
            r.width = Mp + 1;
            r.worst_distance = 0;
            for (const auto& h : hs) {
                r.fs.push_back(restrict_off(h, B));
                r.worst_distance = std::max(r.worst_distance, uniform_distance(r.fs.back(), h));
            }
            if (!(r.worst_distance < eps)) continue;
            std::vector<char> pat(static_cast<std::size_t>(P), 0);
            for (i64 u : B.classes) pat[static_cast<std::size_t>(u)] = 1;
            r.decomp = ZebraDecomposition(P, pat);
            r.zebra_ok = true;
            r.displacement_ok = true;
            for (const auto& f : r.fs) {
                if (!zebra_violation(r.decomp, f.g).empty()) r.zebra_ok = false;
                auto td = total_displacement(f);
                if (!td || *td > m) r.displacement_ok = false;
            }
            r.width_ok = r.decomp.min_width() >= Mp;
            r.distance_ok = true;
            return r;
        }
    }
    throw FullGroupError(Kind::DepthBudgetExceeded, "no depth <= " + std::to_string(max_depth) + " gives d < " + q_str(eps));
}

ECWitness ec_witness(const ConstrainedRep& rho, const Word& w, const Q& eps, i64 max_depth) {
    ECWitness out;
    const i64 expect = std::abs(c_a(w));
    bool has_b = std::any_of(w.letters().begin(), w.letters().end(), [](const Letter& l) { return l.gen > 0; });
    if (!has_b) {
        out.rho = rho;
        auto cert = orbit_count_certificate(evaluate_rep(rho, w));
        out.k = cert.k;
        out.count.count = out.count.brute_force = out.count.profile = cert.k;
        out.count.consistent = cert.k == expect;
        out.distance = 0;
        out.ok = out.count.consistent;
        return out;
    }
    const int r = std::max(w.max_gen(), rho.b.empty() ? 0 : rho.b.rbegin()->first);
    std::vector<FullGroupElement> hs;
    for (int i = 1; i <= r; ++i) hs.push_back(rho.gen(i));
    i64 m = 0;
    for (const auto& h : hs) {
        auto td = total_displacement(h);
        if (!td) throw FullGroupError(Kind::InfiniteDisplacement, "generator b" + std::to_string(hs.size()) + " is not periodic");
        m = std::max(m, *td);
    }
    const i64 Mp = 3 * std::max<i64>(1, m) * static_cast<i64>(w.length()) + 1;
    auto dz = dazzle(hs, Mp, eps, max_depth);
    out.rho = ConstrainedRep{rho.sp, {}};
    ZebraFamily zf;
    for (int i = 1; i <= r; ++i) {
        const auto& f = dz.fs[static_cast<std::size_t>(i - 1)];
        out.rho.b.emplace(i, f);
        zf.emplace(i, ZebraPermutation{dz.decomp, f.g.refined(dz.decomp.period())});
    }
    out.count = count_infinite_orbits(w, zf);
    auto cert = orbit_count_certificate(evaluate_rep(out.rho, w));
    out.k = cert.k;
    out.distance = rep_distance(out.rho, rho);
    out.ok = dz.ok() && out.count.consistent && out.k == expect && out.distance < eps;
    if (!out.ok) out.detail = out.count.detail.empty() ? "certificate mismatch" : out.count.detail;
    out.dz = std::move(dz);
    return out;
}

DensityResult density_build(const ConstrainedRep& rho, const FullGroupElement& g, const CylinderSet& A0, i64 n1, i64 n2, i64 n3) {
    const auto& sp = *rho.sp;
    const FullGroupElement b1 = rho.gen(1);
    const i64 D = std::max({A0.depth, g.depth(), b1.depth()});
    const i64 P = sp.modulus(D);
    const CylinderSet A = refine(sp, A0, D);
    auto Lb = lift_at(b1, D), Lg = lift_at(g, D);
    const CylinderSet S = translate(sp, A, n2 + n3);
    CylinderSet D1 = subtract(sp, A, unite(sp, translate(sp, A, n1), preimage(b1, S)));
    CylinderSet D2 = translate(sp, intersect(sp, A, preimage(g, translate(sp, A, n2))), n1);
    std::vector<i64> lift(static_cast<std::size_t>(P), 0), target(static_cast<std::size_t>(P), -1);
    std::vector<char> dom(static_cast<std::size_t>(P), 0), ran(static_cast<std::size_t>(P), 0);
    auto put = [&](i64 u, i64 c) {
        i64 v = pmod(u + c, P);
        if (dom[static_cast<std::size_t>(u)] || ran[static_cast<std::size_t>(v)])
            throw FullGroupError(Kind::BadInput, "partial map is not injective at class " + std::to_string(u));
        dom[static_cast<std::size_t>(u)] = 1;
        ran[static_cast<std::size_t>(v)] = 1;
        lift[static_cast<std::size_t>(u)] = c;
    };
    for (i64 u : D1.classes) put(u, Lb[static_cast<std::size_t>(u)]);
    for (i64 v : D2.classes) put(v, -n1 + Lg[static_cast<std::size_t>(pmod(v - n1, P))] + n3);
    // order-preserving matching of the leftover classes
    std::vector<i64> fd, fr;
    for (i64 u = 0; u < P; ++u) {
        if (!dom[static_cast<std::size_t>(u)]) fd.push_back(u);
        if (!ran[static_cast<std::size_t>(u)]) fr.push_back(u);
    }
    for (std::size_t k = 0; k < fd.size(); ++k) lift[static_cast<std::size_t>(fd[k])] = centred(fr[k] - fd[k], P);
    DensityResult res;
    res.eta = rho;
    res.eta.b.insert_or_assign(1, make_element(rho.sp, Pdp::from_lift(std::move(lift))));
    res.w = Word::a(static_cast<int>(-n3)) * Word::b(1) * Word::a(static_cast<int>(n1));
    res.A = A;
    res.n1 = n1;
    res.n2 = n2;
    res.n3 = n3;
    res.d_target = uniform_distance(g, evaluate_rep(res.eta, res.w));
    res.d_b1 = uniform_distance(res.eta.gen(1), b1);
    res.best_target = res.d_target;
    return res;
}

DensityResult density_step(const ConstrainedRep& rho, const FullGroupElement& g, const Q& eps, i64 depth, i64 max_levels) {
    if (eps <= 0 || eps >= 1) throw FullGroupError(Kind::BadInput, "eps must lie in (0,1)");
    const auto& sp = *rho.sp;
    if (g.g.M == 1) {
        // g is a power of T
        DensityResult res;
        res.found = true;
        res.eta = rho;
        res.w = Word::a(static_cast<int>(g.g.c[0]));
        res.A = full_space(sp, 0);
        res.n1 = g.g.c[0];
        res.d_target = res.d_b1 = res.best_target = 0;
        return res;
    }
    const FullGroupElement b1 = rho.gen(1);
    const i64 D = std::max({depth, g.depth(), b1.depth()});
    const i64 P = sp.modulus(D);
    // A: classes with digit 0 at every level of a small level set, heaviest first
    std::vector<std::pair<Q, CylinderSet>> family;
    std::vector<i64> lv;
    auto emit = [&](const std::vector<i64>& levels) {
        std::vector<i64> cls;
        for (i64 u = 0; u < P; ++u) {
            bool ok = true;
            for (i64 l : levels)
                if ((u / sp.modulus(l)) % sp.q() != 0) ok = false;
            if (ok) cls.push_back(u);
        }
        CylinderSet A = make_cylinder(sp, D, cls);
        family.push_back({measure(sp, A), A});
    };
    for (i64 a = 0; a < D; ++a) {
        emit({a});
        if (max_levels >= 2)
            for (i64 b = a + 1; b < D; ++b) emit({a, b});
    }
    std::stable_sort(family.begin(), family.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    DensityResult best;
    const std::size_t K = 3;
    for (const auto& [muA, A] : family) {
        auto tm = translate_measures(sp, A);
        const Q room = 1 - measure(sp, image(b1, A));
        std::vector<std::pair<Q, i64>> c1, c2, c3;
        for (i64 s = 0; s < P; ++s) {
            if (tm[static_cast<std::size_t>(s)] < eps) c1.push_back({tm[static_cast<std::size_t>(s)], centred(s, P)});
            Q e2 = measure(sp, symmetric_difference(sp, A, preimage(g, translate(sp, A, s))));
            if (e2 < eps) c2.push_back({e2, centred(s, P)});
            if (tm[static_cast<std::size_t>(s)] < room) {
                Q e4 = measure(sp, preimage(b1, translate(sp, A, s)));
                if (e4 < eps) c3.push_back({tm[static_cast<std::size_t>(s)], centred(s, P)});
            }
        }
        auto trim = [&](std::vector<std::pair<Q, i64>>& v) {
            std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            if (v.size() > K) v.resize(K);
        };
        trim(c1);
        trim(c2);
        trim(c3);
        for (const auto& [x1, n1] : c1)
            for (const auto& [x2, n2] : c2)
                for (const auto& [x3, s] : c3) {
                    const i64 n3 = centred(s - n2, P);
                    DensityResult r = density_build(rho, g, A, n1, n2, n3);
                    if (r.d_target < best.best_target) best.best_target = r.d_target;
                    if (r.d_target < eps && r.d_b1 <= 4 * eps) {
                        r.found = true;
                        r.best_target = r.d_target;
                        return r;
                    }
                }
    }
    return best;
}

Q sample_point(const OdometerSpace& sp, std::mt19937_64& rng, i64 depth) {
    const i64 q = sp.q();
    DigitExpansion e;
    for (i64 i = 0; i < depth; ++i) {
        const auto& lv = sp.level(i);
        std::vector<double> w;
        for (const auto& x : lv) w.push_back(x.get_d());
        std::discrete_distribution<i64> pick(w.begin(), w.end());
        e.pre.push_back(pick(rng));
    }
    std::uniform_int_distribution<i64> len(1, 3), dig(0, q - 1);
    i64 L = len(rng);
    for (i64 i = 0; i < L; ++i) e.cycle.push_back(dig(rng));
    if (std::all_of(e.cycle.begin(), e.cycle.end(), [&](i64 d) { return d == q - 1; })) e.cycle[0] = 0;
    return from_expansion(q, e);
}

Q sample_point_in(const OdometerSpace& sp, std::mt19937_64& rng, i64 depth, i64 u) {
    Q tail = sample_point(sp, rng, 12);
    Q x = Q(u) + tail * sp.modulus(depth);
    x.canonicalize();
    return x;
}

FullGroupElement random_periodic_element(SpacePtr sp, std::mt19937_64& rng, i64 depth, i64 m) {
    const i64 P = sp->modulus(depth);
    std::vector<i64> perm(static_cast<std::size_t>(P));
    std::iota(perm.begin(), perm.end(), i64(0));
    std::uniform_int_distribution<i64> csz(1, m + 1);
    for (i64 p = 0; p < P;) {
        i64 e = std::min(P, p + csz(rng));
        std::shuffle(perm.begin() + p, perm.begin() + e, rng);
        p = e;
    }
    std::vector<i64> c(static_cast<std::size_t>(P));
    for (i64 u = 0; u < P; ++u) c[static_cast<std::size_t>(u)] = perm[static_cast<std::size_t>(u)] - u;
    return make_element(std::move(sp), Pdp::from_lift(std::move(c)));
}

FullGroupElement random_element(SpacePtr sp, std::mt19937_64& rng, i64 depth, i64 maxc) {
    auto a = random_periodic_element(sp, rng, depth, maxc);
    auto b = random_periodic_element(sp, rng, depth, maxc);
    std::uniform_int_distribution<i64> k(-1, 1), off(0, sp->modulus(depth) - 1);
    i64 o = off(rng);
    // conjugating by a shift moves block boundaries, so the product mixes across blocks
    auto bs = fg_compose(fg_T(sp, o), fg_compose(b, fg_T(sp, -o)));
    return fg_compose(fg_T(sp, k(rng)), fg_compose(a, bs));
}

MonteCarlo monte_carlo_distance(const FullGroupElement& g, const FullGroupElement& h, std::mt19937_64& rng, int samples) {
    require_same(g, h);
    const auto& sp = *g.sp;
    const i64 D = std::max(g.depth(), h.depth());
    auto a = lift_at(g, D), b = lift_at(h, D);
    std::vector<std::discrete_distribution<i64>> levels;
    for (i64 i = 0; i < D; ++i) {
        std::vector<double> w;
        for (const auto& x : sp.level(i)) w.push_back(x.get_d());
        levels.emplace_back(w.begin(), w.end());
    }
    i64 hits = 0;
    for (int s = 0; s < samples; ++s) {
        i64 u = 0, p = 1;
        for (i64 i = 0; i < D; ++i) {
            u += levels[static_cast<std::size_t>(i)](rng) * p;
            p *= sp.q();
        }
        if (a[static_cast<std::size_t>(u)] != b[static_cast<std::size_t>(u)]) ++hits;
    }
    MonteCarlo mc;
    mc.estimate = static_cast<double>(hits) / samples;
    mc.stderr_ = std::sqrt(mc.estimate * (1 - mc.estimate) / samples);
    return mc;
}

}  // namespace boomlab
