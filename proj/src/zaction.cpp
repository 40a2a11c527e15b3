#include "boomlab/zaction.hpp"

namespace boomlab {

namespace {
const Pdp& trivial() {
    static const Pdp id = Pdp::identity();
    return id;
}
}  // namespace

ZAction::ZAction(std::map<int, Pdp> gens) : gens_(std::move(gens)) {
    for (const auto& [i, g] : gens_) {
        if (i < 1) throw PdpError(PdpError::Kind::BadShape, "b-generators are indexed from 1");
        inv_.emplace(i, inverse(g));
    }
}

const Pdp& ZAction::gen(int i) const {
    auto it = gens_.find(i);
    return it == gens_.end() ? trivial() : it->second;
}

const Pdp& ZAction::gen_inverse(int i) const {
    auto it = inv_.find(i);
    return it == inv_.end() ? trivial() : it->second;
}

i64 ZAction::apply(const Letter& l, i64 j) const {
    if (l.gen == 0) return j + l.exp;
    return l.exp > 0 ? gen(l.gen)(j) : gen_inverse(l.gen)(j);
}

i64 ZAction::apply(const Word& w, i64 j) const {
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) j = apply(*it, j);
    return j;
}

Pdp ZAction::element(const Word& w) const {
    Pdp r = Pdp::identity();
    for (const auto& l : w.letters()) {
        const Pdp& g = l.gen == 0 ? Pdp::shift(l.exp) : (l.exp > 0 ? gen(l.gen) : gen_inverse(l.gen));
        r = compose(r, g);
    }
    return r;
}

ZAction ZAction::conjugated_by_shift(i64 x) const {
    std::map<int, Pdp> out;
    for (const auto& [i, g] : gens_) {
        Pdp h;
        h.M = g.M;
        h.c.resize(static_cast<std::size_t>(g.M));
        for (i64 u = 0; u < g.M; ++u) h.c[static_cast<std::size_t>(u)] = g.c[static_cast<std::size_t>(pmod(u + x, g.M))];
        for (const auto& [j, e] : g.exc) h.exc.emplace(j - x, e - x);
        out.emplace(i, h);
    }
    return ZAction(std::move(out));
}

}  // namespace boomlab
