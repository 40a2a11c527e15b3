#include "boomlab/symzlab.hpp"

#include <algorithm>
#include <cstdlib>

namespace boomlab {

namespace {
using Kind = SymzError::Kind;

Word conj_shift(i64 n, const Word& core) { return Word::a(static_cast<int>(-n)) * core * Word::a(static_cast<int>(n)); }

// iterate eta(w) from x; the orbit must close within `steps`
std::vector<i64> closed_cycle(const ZAction& eta, const Word& w, i64 x, i64 steps) {
    std::vector<i64> cyc{x};
    i64 cur = x;
    for (i64 s = 0; s < steps; ++s) {
        cur = eta.apply(w, cur);
        if (cur == x) return cyc;
        cyc.push_back(cur);
    }
    return {};
}
}  // namespace

Pdp periodic_extension(const Pdp& h0, i64 k) {
    if (k < 1) throw SymzError(Kind::BadInput, "k must be positive");
    Pdp h = canonical(h0);
    require_valid(h);
    if (std::any_of(h.c.begin(), h.c.end(), [](i64 v) { return v != 0; }))
        throw SymzError(Kind::SupportTooWide, "h0 is not finitely supported");
    for (const auto& [j, v] : h.exc)
        if (v != j && (j <= -k || j > k || v <= -k || v > k))
            throw SymzError(Kind::SupportTooWide, "h0 moves " + std::to_string(j) + " outside the central block");
    const i64 M = 2 * k;
    std::vector<i64> lift(static_cast<std::size_t>(M), 0);
    for (i64 j = -k + 1; j <= k; ++j) lift[static_cast<std::size_t>(pmod(j, M))] = h(j) - j;
    return canonical(Pdp::from_lift(std::move(lift)));
}

ZAction with_override(const ZAction& rho, int gen, const std::map<i64, i64>& table) {
    auto gens = rho.gens();
    gens[gen] = override_table(rho.gen(gen), table);
    return ZAction(std::move(gens));
}

bool agrees_on(const ZAction& rho, const ZAction& eta, const std::set<i64>& F) {
    std::set<int> ids;
    for (const auto& kv : rho.gens()) ids.insert(kv.first);
    for (const auto& kv : eta.gens()) ids.insert(kv.first);
    for (int i : ids)
        for (i64 f : F)
            if (rho.gen(i)(f) != eta.gen(i)(f)) return false;
    return true;
}

CloseOrbitResult close_orbit(const ZAction& rho, const Word& w, i64 x, const std::set<i64>& F, i64 budget) {
    if (w.empty() || !is_cyclically_reduced(w) || conjugate_power_of_a(w))
        throw SymzError(Kind::BadInput, "w must be cyclically reduced and not a power of a: " + w.str());
    CloseOrbitResult r;
    auto oc = orbit_classify(rho.element(w), x, budget);
    if (oc.kind == OrbitClass::Kind::Finite) {
        r.eta = rho;
        r.already_finite = true;
        r.cycle = oc.cycle;
        r.verified = true;
        return r;
    }
    // Reroute a run of m consecutive letters of the forward path, starting at b-letter s of pass n
    // and read cyclically, so the run may spill into pass n + 1. Intermediate b-letters go to fresh
    // points; the last one, e, lands on the point the backward path w^-k x visits right after
    // letter e, i.e. w[0,e)^-1 w^-k x, and the remaining letters follow rho into w^-k x.
    // Spilling over matters: when w repeats a generator, a splice inside one pass can only make
    // that generator swap two points, which the next pass undoes.
    // Frozen or shared keys can block a given (n, k, s, m), so all four are searched.
    const auto& ls = w.letters();
    const i64 L = static_cast<i64>(ls.size());
    i64 jb = 0, span = 0;
    while (ls[static_cast<std::size_t>(jb)].gen == 0) ++jb;
    for (const auto& l : ls) span += std::abs(static_cast<i64>(l.exp));
    std::vector<i64> starts;
    for (i64 s = L - 1; s >= jb; --s)
        if (ls[static_cast<std::size_t>(s)].gen != 0) starts.push_back(s);
    std::vector<Word> prefix_inv;  // w[0,e)^-1
    for (i64 e = 0; e < L; ++e) prefix_inv.push_back(Word(std::vector<Letter>(ls.begin(), ls.begin() + e)).inverse());
    const Word winv = w.inverse();
    i64 far = std::abs(x);
    for (i64 f : F) far = std::max(far, std::abs(f));
    for (const auto& [i, g] : rho.gens()) {
        far = std::max(far, g.M * action_radius(g));
        for (const auto& [j, v] : g.exc) far = std::max({far, std::abs(j), std::abs(v)});
    }
    std::vector<i64> fwd{x}, back{x};
    for (i64 T = 0; T < budget; ++T) {
        fwd.push_back(rho.apply(w, fwd.back()));
        back.push_back(rho.apply(winv, back.back()));
        far = std::max({far, std::abs(fwd.back()), std::abs(back.back())});
        for (i64 k = 0; k <= T; ++k) {
            const i64 pass = T - k;
            for (i64 s : starts)
                for (i64 m = 1; m <= L + 1; ++m) {
                    const i64 e = pmod(s - (m - 1), L);
                    if (ls[static_cast<std::size_t>(e)].gen == 0) continue;
                    const i64 y = rho.apply(prefix_inv[static_cast<std::size_t>(e)], back[static_cast<std::size_t>(k)]);
                    std::map<int, std::map<i64, i64>> tables;
                    std::map<int, std::set<i64>> used;
                    i64 fresh = 2 * far;  // spaced so a-letters between b-letters never collide
                    i64 p = fwd[static_cast<std::size_t>(pass)];
                    for (i64 idx = L - 1; idx > s; --idx) p = rho.apply(Word({ls[static_cast<std::size_t>(idx)]}), p);
                    bool ok = true;
                    for (i64 j = 0; j < m && ok; ++j) {
                        const Letter& l = ls[static_cast<std::size_t>(pmod(s - j, L))];
                        if (l.gen == 0) {
                            p += l.exp;
                            continue;
                        }
                        const i64 target = j == m - 1 ? y : (fresh += 2 * span + 1);
                        const i64 key = l.exp > 0 ? p : target, val = l.exp > 0 ? target : p;
                        auto& t = tables[l.gen];
                        if (F.count(key) || t.count(key) || !used[l.gen].insert(val).second) ok = false;
                        t.emplace(key, val);
                        p = target;
                    }
                    if (!ok) continue;
                    ZAction eta = rho;
                    for (const auto& [gen, t] : tables) eta = with_override(eta, gen, t);
                    if (!agrees_on(rho, eta, F)) continue;
                    auto cyc = closed_cycle(eta, w, x, 2 * T + 4);
                    if (cyc.empty()) continue;
                    r.eta = std::move(eta);
                    r.tables = std::move(tables);
                    r.pass = pass;
                    r.back = k;
                    r.start = s;
                    r.run = m;
                    r.cycle = std::move(cyc);
                    r.verified = true;
                    return r;
                }
        }
    }
    throw SymzError(Kind::SearchExhausted, "no admissible splice within the pass budget");
}

bool replay_close_orbit(const ZAction& rho, const Word& w, i64 x, const std::set<i64>& F, const CloseOrbitResult& r) {
    if (r.cycle.empty() || r.cycle.front() != x) return false;
    ZAction eta = rho;
    for (const auto& [gen, t] : r.tables) eta = with_override(eta, gen, t);
    if (!agrees_on(rho, eta, F)) return false;
    i64 cur = x;
    for (std::size_t i = 0; i < r.cycle.size(); ++i) {
        if (cur != r.cycle[i]) return false;
        cur = eta.apply(w, cur);
    }
    return cur == x;
}

SurgeryResult separate_stabilizers(const ZAction& rho, i64 x, i64 y, const std::set<i64>& F, i64 budget) {
    if (x == y) throw SymzError(Kind::BadInput, "x and y must differ");
    for (i64 n = 1; n <= budget; ++n) {
        const i64 X = x + n, Y = y + n;
        if (F.count(X) || F.count(Y)) continue;
        // nearest target for Y first, so the surgery stays local
        for (i64 d = 1; d <= 8; ++d)
            for (i64 z : {Y + d, Y - d}) {
                if (z == X) continue;
                std::map<i64, i64> t{{X, X}, {Y, z}};
                ZAction eta = with_override(rho, 1, t);
                if (!agrees_on(rho, eta, F)) continue;
                SurgeryResult r{eta, conj_shift(n, Word::b(1)), n, t, false};
                if (eta.apply(r.w, x) == x && eta.apply(r.w, y) != y) {
                    r.verified = true;
                    return r;
                }
            }
    }
    throw SymzError(Kind::SearchExhausted, "no admissible shift within the budget");
}

bool replay_separate(const ZAction& rho, i64 x, i64 y, const std::set<i64>& F, const SurgeryResult& r) {
    if (r.w != conj_shift(r.n, Word::b(1))) return false;
    ZAction eta = with_override(rho, 1, r.table);
    return agrees_on(rho, eta, F) && eta.apply(r.w, x) == x && eta.apply(r.w, y) != y;
}

namespace {
void require_injective(const std::map<i64, i64>& iota) {
    std::set<i64> ran;
    for (const auto& kv : iota)
        if (!ran.insert(kv.second).second) throw SymzError(Kind::BadInput, "iota is not injective");
}

bool keeps_frozen(const ZAction& rho, const ZAction& eta, const std::set<i64>& Ffrozen) {
    if (!agrees_on(rho, eta, Ffrozen)) return false;
    // b_{>=2} are never touched
    for (const auto& [i, g] : rho.gens())
        if (i != 1 && eta.gen(i) != g) return false;
    return true;
}
}  // namespace

SurgeryResult realize_window(const ZAction& rho, const std::map<i64, i64>& iota, const std::set<i64>& Ffrozen, i64 budget) {
    require_injective(iota);
    if (std::all_of(iota.begin(), iota.end(), [](const auto& kv) { return kv.first == kv.second; }))
        return {rho, Word(), 0, {}, true};
    std::set<i64> frozen_img;
    for (i64 f : Ffrozen) frozen_img.insert(rho.gen(1)(f));
    for (i64 n = 1; n <= budget; ++n) {
        bool clear = true;
        for (const auto& [s, v] : iota)
            if (Ffrozen.count(s + n) || frozen_img.count(v + n)) {
                clear = false;
                break;
            }
        if (!clear) continue;
        std::map<i64, i64> t;
        for (const auto& [s, v] : iota) t.emplace(s + n, v + n);
        ZAction eta = with_override(rho, 1, t);
        SurgeryResult r{eta, conj_shift(n, Word::b(1)), n, t, false};
        r.verified = replay_realize(rho, iota, Ffrozen, r);
        if (r.verified) return r;
    }
    throw SymzError(Kind::SearchExhausted, "no admissible shift within the budget");
}

bool replay_realize(const ZAction& rho, const std::map<i64, i64>& iota, const std::set<i64>& Ffrozen, const SurgeryResult& r) {
    ZAction eta = r.table.empty() ? rho : with_override(rho, 1, r.table);
    if (!r.w.empty() && r.w != conj_shift(r.n, Word::b(1))) return false;
    if (!keeps_frozen(rho, eta, Ffrozen)) return false;
    return std::all_of(iota.begin(), iota.end(), [&](const auto& kv) { return eta.apply(r.w, kv.first) == kv.second; });
}

}  // namespace boomlab
