#include "boomlab/zebra.hpp"

#include <algorithm>
#include <unordered_map>

namespace boomlab {

namespace {
i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
}  // namespace

ZebraDecomposition::ZebraDecomposition(i64 M, std::vector<char> black) : M_(M), black_(std::move(black)) {
    if (M_ < 2 || static_cast<i64>(black_.size()) != M_)
        throw ZebraError(ZebraError::Kind::BadDecomposition, "pattern size must equal the period (>= 2)");
    i64 b0 = -1;
    bool any_white = false;
    for (i64 u = 0; u < M_; ++u) {
        if (black_[static_cast<std::size_t>(u)]) {
            if (b0 < 0) b0 = u;
        } else {
            any_white = true;
        }
    }
    if (b0 < 0 || !any_white) throw ZebraError(ZebraError::Kind::BadDecomposition, "black and white must both be nonempty");
    anchor_ = b0;
    while (is_black(anchor_ - 1)) --anchor_;
    i64 off = 0;
    while (off < M_) {
        bool col = is_black(anchor_ + off);
        i64 len = 0;
        while (off + len < M_ && is_black(anchor_ + off + len) == col) ++len;
        runs_.push_back({off, len, col});
        if (col) black_run_idx_.push_back(runs_.size() - 1);
        off += len;
    }
    nb_ = static_cast<i64>(black_run_idx_.size());
    s_ = M_;
    for (auto i : black_run_idx_) s_ = std::min(s_, runs_[i].len);
}

ZebraDecomposition ZebraDecomposition::from_intervals(i64 M, const std::vector<std::pair<i64, i64>>& black) {
    std::vector<char> pat(static_cast<std::size_t>(std::max<i64>(M, 0)), 0);
    for (auto [lo, hi] : black) {
        if (lo < 0 || hi >= M || lo > hi) throw ZebraError(ZebraError::Kind::BadDecomposition, "black interval out of range");
        for (i64 u = lo; u <= hi; ++u) pat[static_cast<std::size_t>(u)] = 1;
    }
    return ZebraDecomposition(M, std::move(pat));
}

std::vector<std::pair<i64, i64>> ZebraDecomposition::black_intervals() const {
    std::vector<std::pair<i64, i64>> out;
    i64 u = 0;
    while (u < M_) {
        if (!black_[static_cast<std::size_t>(u)]) {
            ++u;
            continue;
        }
        i64 v = u;
        while (v + 1 < M_ && black_[static_cast<std::size_t>(v + 1)]) ++v;
        out.push_back({u, v});
        u = v + 1;
    }
    return out;
}

i64 ZebraDecomposition::black_start(i64 k) const {
    i64 P = floor_div(k, nb_);
    i64 r = k - P * nb_;
    return anchor_ + P * M_ + runs_[black_run_idx_[static_cast<std::size_t>(r)]].start;
}

i64 ZebraDecomposition::black_end(i64 k) const {
    i64 P = floor_div(k, nb_);
    i64 r = k - P * nb_;
    const auto& run = runs_[black_run_idx_[static_cast<std::size_t>(r)]];
    return anchor_ + P * M_ + run.start + run.len - 1;
}

std::pair<std::size_t, i64> ZebraDecomposition::run_of(i64 n) const {
    i64 off = n - anchor_;
    i64 P = floor_div(off, M_);
    i64 r = off - P * M_;
    auto it = std::upper_bound(runs_.begin(), runs_.end(), r, [](i64 x, const Run& run) { return x < run.start; });
    std::size_t idx = static_cast<std::size_t>(std::distance(runs_.begin(), it)) - 1;
    return {idx, anchor_ + P * M_ + runs_[idx].start};
}

ZebraDecomposition::Locus ZebraDecomposition::locate(i64 n, i64 lr) const {
    auto [idx, st] = run_of(n);
    i64 P = floor_div(n - anchor_, M_);
    i64 before = 0;
    for (std::size_t i = 0; i < idx; ++i)
        if (runs_[i].black) ++before;
    Locus loc;
    const auto& run = runs_[idx];
    if (run.black) {
        loc.k = P * nb_ + before;
        i64 pos = n - st;
        loc.part = pos < lr ? Part::L : (pos >= run.len - lr ? Part::R : Part::C);
    } else {
        loc.k = P * nb_ + before - 1;
        loc.part = Part::W;
    }
    return loc;
}

ZebraPermutation make_zebra(const ZebraDecomposition& d, const std::vector<std::vector<i64>>& white_perms) {
    std::vector<std::size_t> whites;
    for (std::size_t i = 0; i < d.runs().size(); ++i)
        if (!d.runs()[i].black) whites.push_back(i);
    if (white_perms.size() != whites.size())
        throw ZebraError(ZebraError::Kind::RunMismatch, "expected " + std::to_string(whites.size()) + " white tables");
    std::vector<i64> c(static_cast<std::size_t>(d.period()), 0);
    for (std::size_t w = 0; w < whites.size(); ++w) {
        const auto& run = d.runs()[whites[w]];
        const auto& tab = white_perms[w];
        if (static_cast<i64>(tab.size()) != run.len)
            throw ZebraError(ZebraError::Kind::RunMismatch, "white table size differs from run length");
        std::vector<char> seen(tab.size(), 0);
        for (i64 p = 0; p < run.len; ++p) {
            i64 t = tab[static_cast<std::size_t>(p)];
            if (t < 0 || t >= run.len || seen[static_cast<std::size_t>(t)])
                throw ZebraError(ZebraError::Kind::TableNotPermutation, "white table is not a permutation");
            seen[static_cast<std::size_t>(t)] = 1;
            c[static_cast<std::size_t>(pmod(d.anchor() + run.start + p, d.period()))] = t - p;
        }
    }
    ZebraPermutation z{d, Pdp::from_lift(std::move(c))};
    require_valid(z.base);
    return z;
}

ZebraPermutation make_zebra_from_map(const ZebraDecomposition& d, const std::map<i64, i64>& moves) {
    std::vector<std::vector<i64>> tabs;
    std::map<std::size_t, std::size_t> white_no;
    for (std::size_t i = 0; i < d.runs().size(); ++i)
        if (!d.runs()[i].black) {
            white_no[i] = tabs.size();
            std::vector<i64> id(static_cast<std::size_t>(d.runs()[i].len));
            for (i64 p = 0; p < d.runs()[i].len; ++p) id[static_cast<std::size_t>(p)] = p;
            tabs.push_back(std::move(id));
        }
    for (auto [u, v] : moves) {
        if (d.is_black(u) || d.is_black(v)) throw ZebraError(ZebraError::Kind::RunMismatch, "moves must stay in white runs");
        auto [idx, st] = d.run_of(u);
        i64 pu = u - st;
        i64 pv = pmod(v - st, d.period());
        if (pv >= d.runs()[idx].len) throw ZebraError(ZebraError::Kind::RunMismatch, "move leaves its white run");
        tabs[white_no[idx]][static_cast<std::size_t>(pu)] = pv;
    }
    return make_zebra(d, tabs);
}

std::string zebra_violation(const ZebraDecomposition& d, const Pdp& g) {
    if (!g.exc.empty()) return "element has exceptions";
    if (d.period() % g.M != 0) return "period does not divide the decomposition period";
    Pdp r = g.refined(d.period());
    for (i64 u = 0; u < d.period(); ++u) {
        i64 cu = r.c[static_cast<std::size_t>(u)];
        if (d.is_black(u)) {
            if (cu != 0) return "moves black residue " + std::to_string(u);
            continue;
        }
        auto [idx, st] = d.run_of(u);
        i64 pos = u - st + cu;
        if (pos < 0 || pos >= d.runs()[idx].len) return "residue " + std::to_string(u) + " leaves its white run";
    }
    return {};
}

namespace {
const ZebraDecomposition& common_type(const ZebraFamily& z) {
    if (z.empty()) throw ZebraError(ZebraError::Kind::TypeMismatch, "empty zebra family");
    const auto& d = z.begin()->second.decomp;
    for (const auto& [i, zp] : z)
        if (!(zp.decomp == d)) throw ZebraError(ZebraError::Kind::TypeMismatch, "zebra permutations of different types");
    return d;
}
}  // namespace

Hypothesis width_hypothesis(const Word& w, const ZebraFamily& z) {
    const auto& d = common_type(z);
    Hypothesis h;
    h.L = static_cast<i64>(w.length());
    for (const auto& [i, zp] : z) h.R = std::max(h.R, action_radius(zp.base));
    h.s = d.min_width();
    h.holds = 3 * h.L * std::max<i64>(1, h.R) < h.s;
    return h;
}

ZAction zebra_action(const ZebraFamily& z) {
    std::map<int, Pdp> gens;
    for (const auto& [i, zp] : z) gens.emplace(i, zp.base);
    return ZAction(std::move(gens));
}

namespace {
void require_hypothesis(const Hypothesis& h) {
    if (!h.holds)
        throw ZebraError(ZebraError::Kind::HypothesisViolated, "width hypothesis fails: |w|=" + std::to_string(h.L) +
                                                                   " s=" + std::to_string(h.s) + " R=" + std::to_string(h.R));
}
}  // namespace

ZebraDynReport check_zebradyn(const Word& w, const ZebraFamily& z, i64 lo, i64 hi) {
    const auto& d = common_type(z);
    auto h = width_hypothesis(w, z);
    require_hypothesis(h);
    if (hi - lo + 1 < 3 * d.period()) throw ZebraError(ZebraError::Kind::WindowTooSmall, "window must cover 3 periods");
    Word v = c_a(w) >= 0 ? w : w.inverse();
    const i64 ca = c_a(v);
    const i64 lr = h.L * std::max<i64>(1, h.R);
    Pdp g = zebra_action(z).element(v);
    using P = ZebraDecomposition::Part;
    ZebraDynReport rep;
    auto fail = [&](int clause, i64 n, i64 m, const std::string& why) {
        rep.ok = false;
        rep.clause = clause;
        rep.n = n;
        rep.image = m;
        rep.detail = why;
    };
    for (i64 n = lo; n <= hi && rep.ok; ++n) {
        i64 m = g(n);
        auto a = d.locate(n, lr);
        auto b = d.locate(m, lr);
        switch (a.part) {
            case P::W: {
                ++rep.checked[0];
                bool in = (b.k == a.k && (b.part == P::R || b.part == P::W)) || (b.k == a.k + 1 && b.part == P::L);
                if (!in) fail(1, n, m, "wW_k escapes R_k+W_k+L_{k+1}");
                break;
            }
            case P::L: {
                ++rep.checked[1];
                bool in = (b.k == a.k - 1 && (b.part == P::R || b.part == P::W)) ||
                          (b.k == a.k && (b.part == P::L || b.part == P::C));
                if (!in) fail(2, n, m, "wL_k escapes R_{k-1}+W_{k-1}+L_k+C_k");
                break;
            }
            case P::C:
                ++rep.checked[2];
                if (m != n + ca) fail(3, n, m, "w does not act by n -> n + c_a(w) on C_k");
                break;
            case P::R: {
                ++rep.checked[3];
                bool in = (b.k == a.k && (b.part == P::R || b.part == P::W)) || (b.k == a.k + 1 && b.part == P::L);
                if (!in) fail(4, n, m, "wR_k escapes R_k+W_k+L_{k+1}");
                break;
            }
        }
        if (!rep.ok) break;
        // (v): the largest k with min R_k <= n
        i64 kstar = (a.part == P::R || a.part == P::W) ? a.k : a.k - 1;
        i64 minR = d.black_end(kstar) - lr + 1;
        ++rep.checked[4];
        if (m < minR) fail(5, n, m, "w leaves R_k^+");
    }
    return rep;
}

std::pair<i64, i64> default_window(const Word& w, const ZebraFamily& z) {
    const auto& d = common_type(z);
    auto h = width_hypothesis(w, z);
    i64 Reff = std::max<i64>(1, h.R), L = std::max<i64>(1, h.L);
    i64 m = d.black_start(0) + h.L * Reff;
    i64 half = 3 * d.period() * Reff * L;
    return {m - half, m + half - 1};
}

OrbitCount count_infinite_orbits(const Word& w, const ZebraFamily& z) {
    auto [lo, hi] = default_window(w, z);
    return count_infinite_orbits(w, z, lo, hi);
}

OrbitCount count_infinite_orbits(const Word& w, const ZebraFamily& z, i64 lo, i64 hi) {
    const auto& d = common_type(z);
    auto h = width_hypothesis(w, z);
    require_hypothesis(h);
    const i64 Reff = std::max<i64>(1, h.R), L = std::max<i64>(1, h.L);
    // finite orbits never cross a C-strip, so their span is below M; a margin of M already
    // separates them from the window edge, the default uses M*max(1,R)*|w|
    if (hi - lo + 1 < 3 * d.period()) throw ZebraError(ZebraError::Kind::WindowTooSmall, "window must cover 3 periods");
    const i64 margin = std::min(d.period() * Reff * L, (hi - lo + 1) / 3);
    Word v = c_a(w) >= 0 ? w : w.inverse();
    const i64 ca = c_a(v);
    const i64 lr = h.L * Reff;
    Pdp g = zebra_action(z).element(v);

    OrbitCount out;
    const i64 m = d.black_start(0) + lr;
    const i64 c0_hi = d.black_end(0) - lr;
    if (m < lo || c0_hi > hi) throw ZebraError(ZebraError::Kind::WindowTooSmall, "window misses C_0");
    std::unordered_map<i64, i64> owner;
    for (i64 n = m; n < m + ca && out.structural_ok; ++n) {
        out.witnesses.push_back(n);
        i64 cur = n;
        const i64 budget = hi - lo + 2;
        bool escaped = false;
        for (i64 step = 0; step <= budget; ++step) {
            if (cur < n) {
                out.structural_ok = false;
                out.detail = "forward orbit of seed " + std::to_string(n) + " dips below its seed";
                break;
            }
            if (step > 0 && cur >= m && cur < m + ca) {
                out.structural_ok = false;
                out.detail = "forward orbit of seed " + std::to_string(n) + " re-enters the seed interval";
                break;
            }
            if (cur > hi) {
                escaped = true;
                break;
            }
            auto [it, fresh] = owner.emplace(cur, n);
            if (!fresh && it->second != n) {
                out.structural_ok = false;
                out.detail = "seeds " + std::to_string(it->second) + " and " + std::to_string(n) + " share an orbit";
                break;
            }
            cur = g(cur);
        }
        if (out.structural_ok && !escaped) {
            out.structural_ok = false;
            out.detail = "forward orbit of seed " + std::to_string(n) + " does not leave the window";
        }
    }
    if (out.structural_ok && ca > 0)
        for (i64 n = m; n <= c0_hi; ++n)
            if (!owner.count(n)) {
                out.structural_ok = false;
                out.detail = "C_0 point " + std::to_string(n) + " not covered by the seed orbits";
                break;
            }
    out.count = out.structural_ok ? ca : -1;
    out.brute_force = window_escaping_orbits(g, lo, hi, lo + margin, hi - margin);
    out.profile = orbit_profile(g).infinite_orbit_count;
    out.consistent = out.structural_ok && out.count == ca && out.brute_force == ca && out.profile == ca;
    return out;
}

i64 brute_force_infinite_orbits(const Word& w, const ZebraFamily& z, i64 lo, i64 hi) {
    common_type(z);
    if (hi - lo + 1 < 3) throw ZebraError(ZebraError::Kind::WindowTooSmall, "empty window");
    const i64 margin = (hi - lo + 1) / 3;
    return window_escaping_orbits(zebra_action(z).element(w), lo, hi, lo + margin, hi - margin);
}

FolnerResult folner_intervals(const ZebraFamily& z, const Q& eps, const std::set<Word>& F, i64 max_blocks) {
    const auto& d = common_type(z);
    ZAction act = zebra_action(z);
    std::vector<Pdp> els;
    for (const auto& w : F) els.push_back(act.element(w));
    FolnerResult res;
    const i64 lo = d.black_start(0);
    for (i64 j = 1; j <= max_blocks; ++j) {
        i64 hi = d.white_end(j - 1);
        i64 size = hi - lo + 1;
        FolnerInterval fi{lo, hi, j, Q(0)};
        for (const auto& g : els) {
            i64 out = 0;
            for (i64 n = lo; n <= hi; ++n) {
                i64 y = g(n);
                if (y < lo || y > hi) ++out;
            }
            Q r(2 * out, size);
            r.canonicalize();
            if (r > fi.worst_ratio) fi.worst_ratio = r;
        }
        res.intervals.push_back(fi);
        if (fi.worst_ratio < eps) {
            res.certified = true;
            break;
        }
    }
    return res;
}

ZebraPermutation random_zebra_permutation(std::mt19937_64& rng, const ZebraDecomposition& d, i64 r) {
    std::vector<std::vector<i64>> tabs;
    for (const auto& run : d.runs()) {
        if (run.black) continue;
        std::vector<i64> t(static_cast<std::size_t>(run.len));
        for (i64 p = 0; p < run.len; ++p) t[static_cast<std::size_t>(p)] = p;
        std::uniform_int_distribution<i64> csz(1, r + 1);
        for (i64 p = 0; p < run.len;) {
            i64 e = std::min(run.len, p + csz(rng));
            std::shuffle(t.begin() + p, t.begin() + e, rng);
            p = e;
        }
        tabs.push_back(std::move(t));
    }
    return make_zebra(d, tabs);
}

ZebraInstance random_zebra_instance(std::mt19937_64& rng, i64 maxM) {
    auto uni = [&](i64 a, i64 b) { return std::uniform_int_distribution<i64>(a, b)(rng); };
    for (;;) {
        const i64 nbgen = uni(1, 3), Rt = uni(1, 3), L = uni(1, 4);
        const i64 s = 3 * L * Rt + 1 + uni(0, 4);
        i64 runs = uni(1, 3);
        std::vector<i64> blacks, whites;
        i64 M = 0;
        for (i64 k = 0; k < runs; ++k) {
            i64 b = uni(s, s + 5), w = uni(1, 12);
            if (M + b + w > maxM) break;
            blacks.push_back(b);
            whites.push_back(w);
            M += b + w;
        }
        if (blacks.empty()) continue;
        std::vector<char> pat;
        for (std::size_t k = 0; k < blacks.size(); ++k) {
            pat.insert(pat.end(), static_cast<std::size_t>(blacks[k]), 1);
            pat.insert(pat.end(), static_cast<std::size_t>(whites[k]), 0);
        }
        std::rotate(pat.begin(), pat.begin() + uni(0, M - 1), pat.end());
        ZebraDecomposition d(M, pat);
        ZebraInstance inst;
        for (int i = 1; i <= nbgen; ++i) inst.zperms.emplace(i, random_zebra_permutation(rng, d, Rt));
        inst.w = random_reduced_word(rng, static_cast<int>(L), static_cast<int>(nbgen));
        if (width_hypothesis(inst.w, inst.zperms).holds) return inst;
    }
}

}  // namespace boomlab
