#include "boomlab/permz.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace boomlab {

i64 gcd64(i64 a, i64 b) { return std::gcd(a, b); }
i64 lcm64(i64 a, i64 b) { return a / std::gcd(a, b) * b; }

Pdp Pdp::from_lift(std::vector<i64> lift, std::map<i64, i64> e) {
    if (lift.empty()) throw PdpError(PdpError::Kind::BadShape, "empty lift table");
    Pdp g;
    g.M = static_cast<i64>(lift.size());
    g.c = std::move(lift);
    g.exc = std::move(e);
    return g;
}

Pdp Pdp::refined(i64 newM) const {
    if (newM % M != 0) throw PdpError(PdpError::Kind::BadShape, "refinement must be a multiple of the period");
    Pdp r;
    r.M = newM;
    r.c.resize(static_cast<std::size_t>(newM));
    for (i64 u = 0; u < newM; ++u) r.c[static_cast<std::size_t>(u)] = c[static_cast<std::size_t>(u % M)];
    r.exc = exc;
    return r;
}

Validation validate(const Pdp& g) {
    Validation v;
    if (g.M < 1 || static_cast<i64>(g.c.size()) != g.M) {
        v.ok = false;
        v.kind = PdpError::Kind::BadShape;
        v.detail = "lift table size differs from period";
        return v;
    }
    std::vector<i64> hit(static_cast<std::size_t>(g.M), -1);
    for (i64 u = 0; u < g.M; ++u) {
        i64 t = g.residue_image(u);
        auto& slot = hit[static_cast<std::size_t>(t)];
        if (slot >= 0) {
            v.ok = false;
            v.kind = PdpError::Kind::BaseNotBijective;
            v.detail = "residues " + std::to_string(slot) + " and " + std::to_string(u) + " both map to " +
                       std::to_string(t);
            return v;
        }
        slot = u;
    }
    if (g.exc.empty()) return v;
    std::multiset<i64> imgs, bases;
    std::set<i64> seen;
    for (const auto& [j, e] : g.exc) {
        if (!seen.insert(e).second) {
            v.ok = false;
            v.kind = PdpError::Kind::ExceptionsNotClosed;
            v.detail = "exception value " + std::to_string(e) + " repeated";
            return v;
        }
        imgs.insert(e);
        bases.insert(g.base(j));
    }
    if (imgs != bases) {
        v.ok = false;
        v.kind = PdpError::Kind::ExceptionsNotClosed;
        std::string a, b;
        for (auto x : imgs) a += std::to_string(x) + " ";
        for (auto x : bases) b += std::to_string(x) + " ";
        v.detail = "exception images {" + a + "} differ from base images {" + b + "}";
    }
    return v;
}

void require_valid(const Pdp& g) {
    auto v = validate(g);
    if (!v.ok) throw PdpError(v.kind, v.detail);
}

Pdp canonical(const Pdp& g) {
    Pdp r;
    r.M = g.M;
    for (i64 d = 1; d <= g.M; ++d) {
        if (g.M % d) continue;
        bool per = true;
        for (i64 u = d; u < g.M && per; ++u)
            per = g.c[static_cast<std::size_t>(u)] == g.c[static_cast<std::size_t>(u % d)];
        if (per) {
            r.M = d;
            break;
        }
    }
    r.c.assign(g.c.begin(), g.c.begin() + r.M);
    for (const auto& [j, e] : g.exc)
        if (r.base(j) != e) r.exc.emplace(j, e);
    return r;
}

Pdp inverse(const Pdp& g) {
    Pdp r;
    r.M = g.M;
    r.c.assign(static_cast<std::size_t>(g.M), 0);
    for (i64 u = 0; u < g.M; ++u) {
        i64 v = g.residue_image(u);
        r.c[static_cast<std::size_t>(v)] = -g.c[static_cast<std::size_t>(u)];
    }
    for (const auto& [j, e] : g.exc) r.exc.emplace(e, j);
    return canonical(r);
}

Pdp compose(const Pdp& g, const Pdp& h) {
    Pdp r;
    r.M = lcm64(g.M, h.M);
    r.c.resize(static_cast<std::size_t>(r.M));
    for (i64 u = 0; u < r.M; ++u) {
        i64 v = h.base(u);
        r.c[static_cast<std::size_t>(u)] = g.base(v) - u;
    }
    std::set<i64> cand;
    for (const auto& kv : h.exc) cand.insert(kv.first);
    if (!g.exc.empty()) {
        Pdp hi = inverse(h);
        for (const auto& kv : g.exc) cand.insert(hi(kv.first));
    }
    for (i64 j : cand) {
        i64 val = g(h(j));
        if (val != r.base(j)) r.exc.emplace(j, val);
    }
    return canonical(r);
}

i64 action_radius(const Pdp& g) {
    i64 R = 0;
    for (i64 x : g.c) R = std::max(R, x < 0 ? -x : x);
    for (const auto& [j, e] : g.exc) R = std::max(R, e > j ? e - j : j - e);
    return R;
}

OrbitProfile orbit_profile(const Pdp& g) {
    if (!g.exc.empty()) throw PdpError(PdpError::Kind::HasExceptions, "orbit profile needs an exception-free element");
    OrbitProfile p;
    std::vector<char> seen(static_cast<std::size_t>(g.M), 0);
    for (i64 u = 0; u < g.M; ++u) {
        if (seen[static_cast<std::size_t>(u)]) continue;
        PdpCycle cyc;
        i64 v = u;
        while (!seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            cyc.residues.push_back(v);
            cyc.winding += g.c[static_cast<std::size_t>(v)];
            v = g.residue_image(v);
        }
        cyc.length = static_cast<i64>(cyc.residues.size());
        i64 D = cyc.winding < 0 ? -cyc.winding : cyc.winding;
        p.infinite_orbit_count += D / g.M;
        if (D) p.periodic = false;
        p.cycles.push_back(std::move(cyc));
    }
    return p;
}

std::vector<i64> residue_windings(const Pdp& g) {
    std::vector<i64> w(static_cast<std::size_t>(g.M), 0);
    std::vector<char> seen(static_cast<std::size_t>(g.M), 0);
    for (i64 u = 0; u < g.M; ++u) {
        if (seen[static_cast<std::size_t>(u)]) continue;
        std::vector<i64> cyc;
        i64 D = 0, v = u;
        while (!seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            cyc.push_back(v);
            D += g.c[static_cast<std::size_t>(v)];
            v = g.residue_image(v);
        }
        for (i64 x : cyc) w[static_cast<std::size_t>(x)] = D;
    }
    return w;
}

// Escape certificate. Let hi = max dom(exc), R = action_radius, and q > hi + M*R with base winding D > 0.
// The base cycle through q has length l <= M, every step moves by at most R, so the next l steps stay
// above q - (l-1)R > hi and the exceptions never fire; after l steps the point is q + D >= q + M.
// Inductively the forward orbit is unbounded, so the orbit is infinite. D < 0 is the mirror image.
OrbitClass orbit_classify(const Pdp& g, i64 j, i64 budget) {
    OrbitClass out;
    auto wind = residue_windings(g);
    const i64 buffer = g.M * action_radius(g);
    const bool bare = g.exc.empty();
    const i64 lo = bare ? 0 : g.exc.begin()->first;
    const i64 hi = bare ? 0 : g.exc.rbegin()->first;
    i64 cur = j;
    std::vector<i64> path;
    for (i64 step = 0; step <= budget; ++step) {
        i64 D = wind[static_cast<std::size_t>(pmod(cur, g.M))];
        if (D > 0 && (bare || cur > hi + buffer)) {
            out.kind = OrbitClass::Kind::Infinite;
            out.cert_point = cur;
            out.cert_steps = step;
            out.winding = D;
            return out;
        }
        if (D < 0 && (bare || cur < lo - buffer)) {
            out.kind = OrbitClass::Kind::Infinite;
            out.cert_point = cur;
            out.cert_steps = step;
            out.winding = D;
            return out;
        }
        path.push_back(cur);
        if (step == budget) break;
        cur = g(cur);
        if (cur == j) {
            out.kind = OrbitClass::Kind::Finite;
            out.cycle = std::move(path);
            return out;
        }
    }
    return out;
}

Pdp override_table(const Pdp& g, const std::map<i64, i64>& t) {
    std::set<i64> ran;
    for (const auto& kv : t)
        if (!ran.insert(kv.second).second) throw PdpError(PdpError::Kind::NotInjective, "table is not injective");
    Pdp gi = inverse(g);
    std::vector<i64> orphan_src, freed;
    for (i64 y : ran) {
        i64 s = gi(y);
        if (!t.count(s)) orphan_src.push_back(s);
    }
    for (const auto& kv : t) {
        i64 y = g(kv.first);
        if (!ran.count(y)) freed.push_back(y);
    }
    std::sort(orphan_src.begin(), orphan_src.end());
    std::sort(freed.begin(), freed.end());
    Pdp r = g;
    for (const auto& kv : t) r.exc[kv.first] = kv.second;
    for (std::size_t i = 0; i < orphan_src.size(); ++i) r.exc[orphan_src[i]] = freed[i];
    r = canonical(r);
    require_valid(r);
    return r;
}

Pdp finite_support_from_table(const std::map<i64, i64>& t) { return override_table(Pdp::identity(), t); }

namespace {
struct Dsu {
    std::vector<i64> p;
    explicit Dsu(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    i64 find(i64 x) {
        while (p[static_cast<std::size_t>(x)] != x) {
            p[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
            x = p[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(i64 a, i64 b) { p[static_cast<std::size_t>(find(a))] = find(b); }
};
}  // namespace

i64 window_escaping_orbits(const Pdp& g, i64 lo, i64 hi, i64 inner_lo, i64 inner_hi) {
    const i64 n = hi - lo + 1;
    Dsu d(static_cast<std::size_t>(n));
    std::vector<char> open(static_cast<std::size_t>(n), 0), hit(static_cast<std::size_t>(n), 0);
    for (i64 j = lo; j <= hi; ++j) {
        i64 y = g(j);
        if (y < lo || y > hi)
            open[static_cast<std::size_t>(j - lo)] = 1;
        else {
            hit[static_cast<std::size_t>(y - lo)] = 1;
            d.unite(j - lo, y - lo);
        }
    }
    for (i64 k = 0; k < n; ++k)
        if (!hit[static_cast<std::size_t>(k)]) open[static_cast<std::size_t>(k)] = 1;
    std::vector<char> root_open(static_cast<std::size_t>(n), 0);
    for (i64 k = 0; k < n; ++k)
        if (open[static_cast<std::size_t>(k)]) root_open[static_cast<std::size_t>(d.find(k))] = 1;
    std::set<i64> roots;
    for (i64 j = std::max(lo, inner_lo); j <= std::min(hi, inner_hi); ++j) {
        i64 r = d.find(j - lo);
        if (root_open[static_cast<std::size_t>(r)]) roots.insert(r);
    }
    return static_cast<i64>(roots.size());
}

}  // namespace boomlab
