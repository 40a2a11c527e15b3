#include "boomlab/chabauty.hpp"

#include <algorithm>
#include <map>

namespace boomlab {

namespace {
using Kind = ChabautyError::Kind;

bool fixes(const OrbitModel& m, const Word& w) { return m.act.apply(w, m.point) == m.point; }

i64 cycle_length(const FullGroupElement& g, const Q& x, i64 depth) {
    const i64 P = g.sp->modulus(depth);
    auto L = lift_at(g, depth);
    const i64 u = residue(g.sp->q(), x, depth);
    i64 v = pmod(u + L[static_cast<std::size_t>(u)], P), len = 1;
    while (v != u) {
        v = pmod(v + L[static_cast<std::size_t>(v)], P);
        ++len;
    }
    return len;
}
}  // namespace

OrbitModel sym_point(const ZAction& act, i64 x) { return {act, x}; }

OrbitModel odometer_point(const ConstrainedRep& rho, const Q& x) {
    std::map<int, Pdp> gens;
    for (const auto& [i, g] : rho.b) gens.emplace(i, cocycle_pdp(g, x));
    return {ZAction(std::move(gens)), 0};
}

bool window_consistent(const SubgroupWindow& W) {
    for (const auto& w : W.members)
        if (!W.F.count(w)) return false;
    if (W.F.count(Word()) && !W.members.count(Word())) return false;
    for (const auto& u : W.members)
        for (const auto& v : W.members) {
            Word uv = u * v;
            if (W.F.count(uv) && !W.members.count(uv)) return false;
        }
    return true;
}

SubgroupWindow stab_window(const OrbitModel& m, const std::set<Word>& F) {
    SubgroupWindow W{F, {}};
    for (const auto& w : F)
        if (fixes(m, w)) W.members.insert(w);
    return W;
}

namespace {
void require_known(const SubgroupWindow& H, const std::set<Word>& E) {
    for (const auto& w : E)
        if (!H.F.count(w)) throw ChabautyError(Kind::BadInput, "window does not decide " + w.str());
}
}  // namespace

bool in_env(const SubgroupWindow& H, const std::set<Word>& E) {
    require_known(H, E);
    return std::all_of(E.begin(), E.end(), [&](const Word& w) { return H.contains(w); });
}

bool in_miss(const SubgroupWindow& H, const std::set<Word>& E) {
    require_known(H, E);
    return std::none_of(E.begin(), E.end(), [&](const Word& w) { return H.contains(w); });
}

bool in_nbh(const SubgroupWindow& H, const SubgroupWindow& D, const std::set<Word>& F) {
    require_known(H, F);
    require_known(D, F);
    return std::all_of(F.begin(), F.end(), [&](const Word& w) { return H.contains(w) == D.contains(w); });
}

std::optional<i64> boomerang_certificate(const OrbitModel& m, const Word& gamma, const std::set<Word>& F, i64 N) {
    const auto base = stab_window(m, F);
    OrbitModel cur = m;
    for (i64 n = 1; n <= N; ++n) {
        cur.point = m.act.apply(gamma, cur.point);
        if (stab_window(cur, F).members == base.members) return n;
    }
    return std::nullopt;
}

BoomerangBound boomerang_bound(const ConstrainedRep& rho, const Q& x, const Word& gamma, const std::set<Word>& F) {
    BoomerangBound b;
    for (const auto& w : F) b.nF = std::max(b.nF, evaluate_rep(rho, w).depth());
    auto g = evaluate_rep(rho, gamma);
    b.gamma_depth = g.depth();
    b.ell = cycle_length(g, x, b.gamma_depth);
    b.cycle_at_depth = cycle_length(g, x, std::max(b.nF, b.gamma_depth));
    b.bound = b.ell * rho.sp->modulus(b.nF);
    return b;
}

std::vector<int> model_gens(const OrbitModel& m) {
    std::vector<int> g{0};
    for (const auto& [i, p] : m.act.gens()) g.push_back(i);
    return g;
}

CoreFreeReport core_free_window(const OrbitModel& m, const std::set<Word>& F, int radius) {
    CoreFreeReport rep;
    rep.radius = radius;
    const auto etas = ball(radius, model_gens(m));
    for (const auto& g : F) {
        if (g.empty() || !fixes(m, g)) continue;
        bool found = false;
        for (const auto& eta : etas)
            if (!fixes(m, eta * g * eta.inverse())) {
                rep.witnesses.push_back({g, eta});
                found = true;
                break;
            }
        if (!found) rep.unresolved.push_back(g);
    }
    return rep;
}

CoamenableReport coamenable_window(const OrbitModel& m, const std::vector<Word>& A, const std::set<Word>& F, const Q& eps) {
    CoamenableReport rep;
    std::map<i64, Word> pts;
    for (const auto& u : A) {
        i64 p = m.act.apply(u, m.point);
        auto [it, fresh] = pts.emplace(p, u);
        if (!fresh && !(it->second == u)) {
            rep.injective = false;
            rep.collision = {it->second, u};
            return rep;
        }
    }
    std::set<i64> base;
    for (const auto& [p, u] : pts) base.insert(p);
    rep.worst_ratio = 0;
    bool first = true;
    for (const auto& g : F) {
        std::set<i64> moved;
        for (i64 p : base) moved.insert(m.act.apply(g, p));
        i64 out = 0;
        for (i64 p : moved)
            if (!base.count(p)) ++out;
        Q r = make_q(static_cast<long>(2 * out), static_cast<long>(base.size()));
        if (first || r > rep.worst_ratio) {
            rep.worst_ratio = r;
            rep.worst = g;
            first = false;
        }
    }
    rep.folner = rep.worst_ratio < eps;
    return rep;
}

std::optional<Word> co_ht_window(const OrbitModel& m, const std::vector<Word>& Omega, const std::vector<int>& sigma, int radius) {
    if (sigma.size() != Omega.size()) throw ChabautyError(Kind::BadInput, "sigma must permute Omega");
    std::vector<i64> pts;
    std::set<i64> seen;
    for (std::size_t i = 0; i < Omega.size(); ++i) {
        i64 p = m.act.apply(Omega[i], m.point);
        if (!seen.insert(p).second)
            throw ChabautyError(Kind::InjectivityFailure, "two words of Omega hit the same coset at " + Omega[i].str());
        pts.push_back(p);
    }
    std::vector<int> check(sigma);
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i)
        if (check[i] != static_cast<int>(i)) throw ChabautyError(Kind::BadInput, "sigma is not a permutation");
    for (const auto& g : ball(radius, model_gens(m))) {
        bool ok = true;
        for (std::size_t i = 0; i < pts.size() && ok; ++i)
            if (m.act.apply(g, pts[i]) != pts[static_cast<std::size_t>(sigma[i])]) ok = false;
        if (ok) return g;
    }
    return std::nullopt;
}

ConservativityWitness global_conservativity_witness(const std::vector<WeightedWindow>& family, const std::vector<std::size_t>& B) {
    std::map<Word, Q> weight;
    Q total = 0;
    for (std::size_t idx : B) {
        if (idx >= family.size()) throw ChabautyError(Kind::BadInput, "subfamily index out of range");
        const auto& ww = family[idx];
        total += ww.weight;
        for (const auto& g : ww.W.members)
            if (!g.empty()) weight[g] += ww.weight;
    }
    if (total <= 0) throw ChabautyError(Kind::BadInput, "subfamily has no weight");
    ConservativityWitness best;
    bool any = false;
    for (const auto& [g, w] : weight)  // shortlex order, so ties go to the shortest word
        if (w > 0 && (!any || w > best.bound)) {
            best = {g, w};
            any = true;
        }
    if (!any) throw ChabautyError(Kind::AtomOnTrivial, "every window in the subfamily is trivial");
    return best;
}

}  // namespace boomlab
