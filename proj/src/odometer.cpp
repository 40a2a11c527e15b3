#include "boomlab/odometer.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

namespace boomlab {

struct OdometerSpace::Cache {
    std::mutex mu;
    std::map<i64, std::shared_ptr<const std::vector<Q>>> tables;
};

namespace {
using Kind = OdometerError::Kind;

void check_level(i64 q, const std::vector<Q>& w) {
    if (static_cast<i64>(w.size()) != q) throw OdometerError(Kind::BadWeights, "each level needs q weights");
    Q sum = 0;
    for (const auto& x : w) {
        if (x <= 0) throw OdometerError(Kind::BadWeights, "weights must be strictly positive");
        sum += x;
    }
    if (sum != 1) throw OdometerError(Kind::BadWeights, "level weights must sum to 1, got " + q_str(sum));
}
}  // namespace

OdometerSpace::OdometerSpace(i64 q, std::vector<std::vector<Q>> levels, std::vector<Q> tail)
    : q_(q), levels_(std::move(levels)), tail_(std::move(tail)), cache_(std::make_shared<Cache>()) {
    if (q_ < 2) throw OdometerError(Kind::BadWeights, "base must be at least 2");
    for (auto& l : levels_) {
        for (auto& x : l) x.canonicalize();
        check_level(q_, l);
    }
    for (auto& x : tail_) x.canonicalize();
    check_level(q_, tail_);
}

OdometerSpace OdometerSpace::haar(i64 q) {
    if (q < 2) throw OdometerError(Kind::BadWeights, "base must be at least 2");
    return OdometerSpace(q, {}, std::vector<Q>(static_cast<std::size_t>(q), make_q(1, q)));
}

OdometerSpace OdometerSpace::iii_lambda(const Q& lambda) {
    if (lambda <= 0) throw OdometerError(Kind::BadWeights, "lambda must be positive");
    Q a = 1 / (1 + lambda), b = lambda / (1 + lambda);
    OdometerSpace sp(2, {}, {a, b});
    sp.lambda_ = lambda;
    return sp;
}

const std::vector<Q>& OdometerSpace::level(i64 i) const {
    return i < static_cast<i64>(levels_.size()) ? levels_[static_cast<std::size_t>(i)] : tail_;
}

i64 OdometerSpace::modulus(i64 depth) const {
    if (depth < 0) throw OdometerError(Kind::BadInput, "negative depth");
    i64 m = 1;
    for (i64 i = 0; i < depth; ++i) {
        m *= q_;
        if (m > (i64(1) << 40)) throw OdometerError(Kind::BadInput, "depth too large");
    }
    return m;
}

Q OdometerSpace::class_measure(i64 u, i64 depth) const {
    Q r = 1;
    for (i64 i = 0; i < depth; ++i) {
        r *= weight(i, u % q_);
        u /= q_;
    }
    return r;
}

const std::vector<Q>& OdometerSpace::class_measures(i64 depth) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->tables.find(depth);
    if (it != cache_->tables.end()) return *it->second;
    // build level by level: class u + d q^i at depth i+1 has measure m_i(u) w_i(d)
    std::vector<Q> t{Q(1)};
    i64 P = 1;
    for (i64 i = 0; i < depth; ++i) {
        std::vector<Q> nt(static_cast<std::size_t>(P * q_));
        for (i64 d = 0; d < q_; ++d)
            for (i64 u = 0; u < P; ++u) nt[static_cast<std::size_t>(u + d * P)] = t[static_cast<std::size_t>(u)] * weight(i, d);
        t = std::move(nt);
        P *= q_;
        if (P > (i64(1) << 24)) throw OdometerError(Kind::BadInput, "class table too large");
    }
    auto ptr = std::make_shared<const std::vector<Q>>(std::move(t));
    cache_->tables.emplace(depth, ptr);
    return *ptr;
}

bool OdometerSpace::uniform() const {
    Q u = make_q(1, q_);
    auto flat = [&](const std::vector<Q>& l) { return std::all_of(l.begin(), l.end(), [&](const Q& x) { return x == u; }); };
    return std::all_of(levels_.begin(), levels_.end(), flat) && flat(tail_);
}

std::string OdometerSpace::label() const {
    if (uniform()) return "II_1";
    if (lambda_) return "III_" + q_str(*lambda_);
    return "product";
}

CylinderSet make_cylinder(const OdometerSpace& sp, i64 depth, std::vector<i64> classes) {
    const i64 P = sp.modulus(depth);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (i64 u : classes)
        if (u < 0 || u >= P) throw OdometerError(Kind::BadInput, "class " + std::to_string(u) + " out of range");
    return {depth, std::move(classes)};
}

CylinderSet full_space(const OdometerSpace& sp, i64 depth) {
    std::vector<i64> all(static_cast<std::size_t>(sp.modulus(depth)));
    std::iota(all.begin(), all.end(), i64(0));
    return {depth, std::move(all)};
}

CylinderSet refine(const OdometerSpace& sp, const CylinderSet& A, i64 depth) {
    if (depth < A.depth) throw OdometerError(Kind::BadInput, "refine cannot lower the depth");
    if (depth == A.depth) return A;
    const i64 P = sp.modulus(A.depth), R = sp.modulus(depth) / P;
    CylinderSet out{depth, {}};
    out.classes.reserve(A.classes.size() * static_cast<std::size_t>(R));
    for (i64 j = 0; j < R; ++j)
        for (i64 u : A.classes) out.classes.push_back(u + j * P);
    std::sort(out.classes.begin(), out.classes.end());
    return out;
}

CylinderSet coarsen(const OdometerSpace& sp, const CylinderSet& A) {
    CylinderSet cur = A;
    while (cur.depth > 0) {
        const i64 P = sp.modulus(cur.depth - 1);
        std::vector<i64> parents;
        for (i64 u : cur.classes) parents.push_back(u % P);
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        if (static_cast<i64>(parents.size()) * sp.q() != static_cast<i64>(cur.classes.size())) break;
        cur = {cur.depth - 1, std::move(parents)};
    }
    return cur;
}

namespace {
std::pair<CylinderSet, CylinderSet> common(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B) {
    i64 d = std::max(A.depth, B.depth);
    return {refine(sp, A, d), refine(sp, B, d)};
}

template <class Op>
CylinderSet setop(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B, Op op) {
    auto [a, b] = common(sp, A, B);
    CylinderSet out{a.depth, {}};
    op(a.classes.begin(), a.classes.end(), b.classes.begin(), b.classes.end(), std::back_inserter(out.classes));
    return out;
}
}  // namespace

bool same_set(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B) {
    auto [a, b] = common(sp, A, B);
    return a.classes == b.classes;
}

CylinderSet unite(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B) {
    return setop(sp, A, B, [](auto... xs) { return std::set_union(xs...); });
}
CylinderSet intersect(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B) {
    return setop(sp, A, B, [](auto... xs) { return std::set_intersection(xs...); });
}
CylinderSet subtract(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B) {
    return setop(sp, A, B, [](auto... xs) { return std::set_difference(xs...); });
}
CylinderSet symmetric_difference(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B) {
    return setop(sp, A, B, [](auto... xs) { return std::set_symmetric_difference(xs...); });
}
CylinderSet complement(const OdometerSpace& sp, const CylinderSet& A) { return subtract(sp, full_space(sp, A.depth), A); }

Q measure(const OdometerSpace& sp, const CylinderSet& A) {
    const auto& m = sp.class_measures(A.depth);
    Q r = 0;
    for (i64 u : A.classes) r += m[static_cast<std::size_t>(u)];
    return r;
}

CylinderSet translate(const OdometerSpace& sp, const CylinderSet& A, i64 k) {
    const i64 P = sp.modulus(A.depth);
    CylinderSet out{A.depth, {}};
    out.classes.reserve(A.classes.size());
    for (i64 u : A.classes) out.classes.push_back(pmod(u + k, P));
    std::sort(out.classes.begin(), out.classes.end());
    return out;
}

std::vector<Q> translate_measures(const OdometerSpace& sp, const CylinderSet& A) {
    const i64 P = sp.modulus(A.depth);
    const auto& m = sp.class_measures(A.depth);
    std::vector<Q> out(static_cast<std::size_t>(P));
    for (i64 s = 0; s < P; ++s) {
        Q r = 0;
        for (i64 u : A.classes) r += m[static_cast<std::size_t>((u + s) % P)];
        out[static_cast<std::size_t>(s)] = r;
    }
    return out;
}

void require_point(i64 q, const Q& x) {
    mpz_class g;
    mpz_class qq(static_cast<long>(q));
    mpz_gcd(g.get_mpz_t(), x.get_den().get_mpz_t(), qq.get_mpz_t());
    if (g != 1) throw OdometerError(Kind::BadPoint, "denominator of " + q_str(x) + " is not prime to " + std::to_string(q));
}

i64 digit0(i64 q, const Q& x) {
    const mpz_class& a = x.get_num();
    const mpz_class& b = x.get_den();
    for (i64 d = 0; d < q; ++d) {
        mpz_class t = a - b * static_cast<long>(d);
        if (mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(q))) return d;
    }
    throw OdometerError(Kind::BadPoint, "denominator of " + q_str(x) + " is not prime to " + std::to_string(q));
}

namespace {
Q shift_down(i64 q, const Q& x, i64 d) {
    Q r = (x - d) / static_cast<long>(q);
    r.canonicalize();
    return r;
}
}  // namespace

std::vector<i64> digits(i64 q, const Q& x, i64 n) {
    std::vector<i64> out;
    Q cur = x;
    for (i64 i = 0; i < n; ++i) {
        i64 d = digit0(q, cur);
        out.push_back(d);
        cur = shift_down(q, cur, d);
    }
    return out;
}

i64 residue(i64 q, const Q& x, i64 n) {
    i64 r = 0, p = 1;
    for (i64 d : digits(q, x, n)) {
        r += d * p;
        p *= q;
    }
    return r;
}

DigitExpansion expand(i64 q, const Q& x) {
    require_point(q, x);
    std::map<Q, std::size_t> seen;
    std::vector<i64> ds;
    Q cur = x;
    while (!seen.count(cur)) {
        seen.emplace(cur, ds.size());
        i64 d = digit0(q, cur);
        ds.push_back(d);
        cur = shift_down(q, cur, d);
    }
    std::size_t start = seen[cur];
    return {std::vector<i64>(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(start)),
            std::vector<i64>(ds.begin() + static_cast<std::ptrdiff_t>(start), ds.end())};
}

Q from_expansion(i64 q, const DigitExpansion& e) {
    if (e.cycle.empty()) throw OdometerError(Kind::BadPoint, "empty repeating block");
    // cycle value c = sum d_i q^i over the block, periodic part = c / (1 - q^L)
    Q cyc = 0, p = 1;
    for (i64 d : e.cycle) {
        cyc += p * d;
        p *= static_cast<long>(q);
    }
    Q tail = cyc / (1 - p);
    Q pre = 0, pp = 1;
    for (i64 d : e.pre) {
        pre += pp * d;
        pp *= static_cast<long>(q);
    }
    Q r = pre + pp * tail;
    r.canonicalize();
    return r;
}

Q rn_derivative(const OdometerSpace& sp, i64 k, const Q& x) {
    const i64 q = sp.q();
    require_point(q, x);
    Q a = x, b = x + k;
    Q r = 1;
    std::set<std::pair<Q, Q>> seen;
    for (i64 i = 0; a != b; ++i) {
        if (!seen.emplace(a, b - a).second)
            throw OdometerError(Kind::NonterminatingCarry, "carry of " + std::to_string(k) + " at " + q_str(x) + " never dies out");
        i64 da = digit0(q, a), db = digit0(q, b);
        r *= sp.weight(i, db) / sp.weight(i, da);
        a = shift_down(q, a, da);
        b = shift_down(q, b, db);
    }
    r.canonicalize();
    return r;
}

std::set<Q> ratio_samples(const OdometerSpace& sp, i64 n, i64 K) {
    std::set<Q> out;
    const i64 P = sp.modulus(n);
    for (i64 x = 0; x < P; ++x)
        for (i64 k = -K; k <= K; ++k) {
            if (x + k < 0) continue;  // all-(q-1) tail: null set
            out.insert(rn_derivative(sp, k, Q(x)));
        }
    return out;
}

namespace {
void check_ks(const std::vector<i64>& ks) {
    if (ks.empty() || ks[0] != 0) throw OdometerError(Kind::BadInput, "ks must start at 0");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i] <= ks[i - 1]) throw OdometerError(Kind::BadInput, "ks must be strictly increasing");
}
}  // namespace

WanderingCheck r_wandering_check(const OdometerSpace& sp, const CylinderSet& W, const std::vector<i64>& ks) {
    check_ks(ks);
    const i64 P = sp.modulus(W.depth);
    std::map<i64, i64> owner;
    WanderingCheck out;
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (i64 u : W.classes) {
            i64 v = pmod(u + ks[i], P);
            auto [it, fresh] = owner.emplace(v, static_cast<i64>(i));
            if (!fresh) {
                out.ok = false;
                out.i = it->second;
                out.j = static_cast<i64>(i);
                out.cls = v;
                return out;
            }
        }
    return out;
}

namespace {
// sum_{k<n} mu(T^k A) from the periodic table
Q orbit_sum(const std::vector<Q>& tm, i64 n) {
    const i64 P = static_cast<i64>(tm.size());
    Q full = 0;
    for (const auto& x : tm) full += x;
    Q r = full * (n / P);
    for (i64 s = 0; s < n % P; ++s) r += tm[static_cast<std::size_t>(s)];
    return r;
}
}  // namespace

HKBound hajian_kakutani_bound(const OdometerSpace& sp, const CylinderSet& A, const std::vector<i64>& ks, i64 n) {
    auto wc = r_wandering_check(sp, A, ks);
    if (!wc.ok)
        throw OdometerError(Kind::NotWandering, "translates " + std::to_string(ks[static_cast<std::size_t>(wc.i)]) + " and " +
                                                    std::to_string(ks[static_cast<std::size_t>(wc.j)]) + " overlap in class " +
                                                    std::to_string(wc.cls));
    if (n <= ks.back()) throw OdometerError(Kind::BadInput, "horizon must exceed the last k");
    const i64 r = static_cast<i64>(ks.size()), kl = ks.back();
    HKBound b;
    b.lhs = orbit_sum(translate_measures(sp, A), n) * r;
    b.rhs = Q((n - kl) + r * kl);
    b.holds = b.lhs <= b.rhs;
    return b;
}

Q cesaro_average(const OdometerSpace& sp, const CylinderSet& A, i64 n) {
    if (n <= 0) throw OdometerError(Kind::BadInput, "n must be positive");
    Q r = orbit_sum(translate_measures(sp, A), n) / n;
    r.canonicalize();
    return r;
}

Q natural_density(const OdometerSpace& sp, const CylinderSet& A, const Q& delta, i64 N) {
    if (N <= 0) throw OdometerError(Kind::BadInput, "N must be positive");
    auto tm = translate_measures(sp, A);
    const i64 P = static_cast<i64>(tm.size());
    i64 light = 0, partial = 0;
    for (i64 s = 0; s < P; ++s)
        if (tm[static_cast<std::size_t>(s)] < delta) {
            ++light;
            if (s < N % P) ++partial;
        }
    return make_q(static_cast<long>(light * (N / P) + partial), static_cast<long>(N));
}

namespace {
// greedy: classes whose translate by t is light relative to their own mass go first
std::vector<i64> light_subset(const std::vector<Q>& m, const std::vector<i64>& S, i64 t, i64 P, const Q& cap) {
    std::vector<std::pair<Q, i64>> order;
    for (i64 u : S) order.push_back({m[static_cast<std::size_t>(pmod(u + t, P))] / m[static_cast<std::size_t>(u)], u});
    std::sort(order.begin(), order.end());
    std::vector<i64> out;
    Q used = 0;
    for (const auto& [ratio, u] : order) {
        const Q& mt = m[static_cast<std::size_t>(pmod(u + t, P))];
        if (used + mt < cap) {
            used += mt;
            out.push_back(u);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

KrengelResult krengel_combine(const OdometerSpace& sp, const CylinderSet& U0, const CylinderSet& B0, const Q& eps, i64 N) {
    if (eps <= 0) throw OdometerError(Kind::BadInput, "eps must be positive");
    const i64 D = std::max(U0.depth, B0.depth);
    const CylinderSet U = refine(sp, U0, D), B = refine(sp, B0, D);
    const i64 P = sp.modulus(D);
    const auto& m = sp.class_measures(D);
    const Q half = eps / 2;
    KrengelResult res;
    bool have_best = false;
    for (i64 step = 0; step <= 2 * N; ++step) {
        const i64 n = step % 2 ? (step + 1) / 2 : -(step / 2);
        CylinderSet U1{D, light_subset(m, U.classes, -n, P, half)};
        CylinderSet B1{D, light_subset(m, B.classes, n, P, half)};
        CylinderSet A = unite(sp, B1, translate(sp, U1, -n));
        Q sU = measure(sp, symmetric_difference(sp, translate(sp, A, n), U));
        Q sB = measure(sp, symmetric_difference(sp, A, B));
        Q worst = std::max(sU, sB);
        if (!have_best || worst < res.best) {
            res.best = worst;
            res.best_n = n;
            have_best = true;
        }
        bool side = measure(sp, subtract(sp, U, U1)) < half && measure(sp, subtract(sp, B, B1)) < half;
        if (side && sU < eps && sB < eps) {
            res.found = true;
            res.n = n;
            res.A = A;
            res.U1 = U1;
            res.B1 = B1;
            res.sym_U = sU;
            res.sym_B = sB;
            return res;
        }
    }
    return res;
}

}  // namespace boomlab
