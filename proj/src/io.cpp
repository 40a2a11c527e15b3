#include "boomlab/io.hpp"

namespace boomlab {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field '") + key + "'");
    return j.at(key);
}

i64 int_from(const Json& j) {
    if (!j.is_number_integer()) throw IoError("expected an integer, got " + j.dump());
    return j.get<i64>();
}

std::vector<i64> ints_from(const Json& j) {
    if (!j.is_array()) throw IoError("expected an integer array, got " + j.dump());
    std::vector<i64> v;
    for (const auto& x : j) v.push_back(int_from(x));
    return v;
}

std::vector<Q> qs_from(const Json& j) {
    if (!j.is_array()) throw IoError("expected a rational array, got " + j.dump());
    std::vector<Q> v;
    for (const auto& x : j) v.push_back(q_from(x));
    return v;
}

Json qs_json(const std::vector<Q>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(q_json(x));
    return a;
}

Json words_json(const std::set<Word>& ws) {
    Json a = Json::array();
    for (const auto& w : ws) a.push_back(w.str());
    return a;
}

std::set<Word> words_from(const Json& j, bool auto_reduce) {
    if (!j.is_array()) throw IoError("expected a word array");
    std::set<Word> s;
    for (const auto& x : j) s.insert(word_from(x, auto_reduce));
    return s;
}

}  // namespace

Json q_json(const Q& x) { return q_str(x); }

Q q_from(const Json& j) {
    if (j.is_number_integer()) return Q(static_cast<long>(j.get<i64>()));
    if (!j.is_string()) throw IoError("rationals are \"p/q\" strings, got " + j.dump());
    return guarded("rational", [&] { return parse_q(j.get<std::string>()); });
}

Json word_json(const Word& w) { return Json{{"word", w.str()}}; }

Word word_from(const Json& j, bool auto_reduce) {
    const Json& s = j.is_string() ? j : field(j, "word");
    if (!s.is_string()) throw IoError("word must be a string");
    return guarded("word", [&] { return parse_word(s.get<std::string>(), auto_reduce); });
}

Json pdp_json(const Pdp& g) {
    Json exc = Json::object();
    for (const auto& [k, v] : g.exc) exc[std::to_string(k)] = v;
    return Json{{"period", g.M}, {"lift", g.c}, {"exceptions", exc}};
}

Pdp pdp_from(const Json& j) {
    const i64 M = int_from(field(j, "period"));
    auto lift = ints_from(field(j, "lift"));
    if (M < 1 || static_cast<i64>(lift.size()) != M) throw IoError("lift length must equal the period");
    std::map<i64, i64> exc;
    if (j.contains("exceptions")) {
        const auto& e = j.at("exceptions");
        if (!e.is_object()) throw IoError("exceptions must be an object");
        for (const auto& [k, v] : e.items()) {
            i64 key = guarded("exception key", [&] {
                std::size_t used = 0;
                i64 r = std::stoll(k, &used);
                if (used != k.size()) throw IoError("bad exception key '" + k + "'");
                return r;
            });
            exc[key] = int_from(v);
        }
    }
    return guarded("pdp", [&] {
        Pdp g = Pdp::from_lift(std::move(lift), std::move(exc));
        require_valid(g);
        return g;
    });
}

Json space_json(const OdometerSpace& sp) {
    Json w;
    if (sp.lambda()) {
        w = {{"kind", "III-lambda"}, {"lambda", q_json(*sp.lambda())}};
    } else if (sp.uniform() && sp.levels().empty()) {
        w = {{"kind", "haar"}};
    } else {
        Json lv = Json::array();
        for (const auto& l : sp.levels()) lv.push_back(qs_json(l));
        w = {{"kind", "table"}, {"levels", lv}, {"tail", qs_json(sp.tail())}};
    }
    return Json{{"q", sp.q()}, {"weights", w}};
}

OdometerSpace space_from(const Json& j) {
    const i64 q = j.contains("q") ? int_from(j.at("q")) : 2;
    const Json& w = field(j, "weights");
    const Json& kind = field(w, "kind");
    if (!kind.is_string()) throw IoError("weights.kind must be a string");
    const auto k = kind.get<std::string>();
    return guarded("space", [&] {
        if (k == "haar") return OdometerSpace::haar(q);
        if (k == "III-lambda") {
            if (q != 2) throw IoError("III-lambda weights need q = 2");
            return OdometerSpace::iii_lambda(q_from(field(w, "lambda")));
        }
        if (k == "table") {
            std::vector<std::vector<Q>> levels;
            if (w.contains("levels")) {
                if (!w.at("levels").is_array()) throw IoError("levels must be an array");
                for (const auto& l : w.at("levels")) levels.push_back(qs_from(l));
            }
            return OdometerSpace(q, std::move(levels), qs_from(field(w, "tail")));
        }
        throw IoError("unknown weights kind '" + k + "'");
    });
}

Json cylinder_json(const CylinderSet& A) { return Json{{"depth", A.depth}, {"classes", A.classes}}; }

CylinderSet cylinder_from(const OdometerSpace& sp, const Json& j) {
    const i64 depth = int_from(field(j, "depth"));
    auto cls = ints_from(field(j, "classes"));
    return guarded("cylinder", [&] { return make_cylinder(sp, depth, std::move(cls)); });
}

Json window_json(const SubgroupWindow& W) { return Json{{"F", words_json(W.F)}, {"members", words_json(W.members)}}; }

SubgroupWindow window_from(const Json& j, bool auto_reduce) {
    SubgroupWindow W{words_from(field(j, "F"), auto_reduce), words_from(field(j, "members"), auto_reduce)};
    for (const auto& w : W.members)
        if (!W.F.count(w)) throw IoError("member " + w.str() + " is not in F");
    return W;
}

Json zebra_json(const ZebraPermutation& z) {
    const auto& d = z.decomp;
    Json black = Json::array();
    for (const auto& [lo, hi] : d.black_intervals()) black.push_back({lo, hi});
    Json whites = Json::object();
    std::size_t idx = 0;
    for (const auto& run : d.runs()) {
        if (run.black) continue;
        const i64 start = d.anchor() + run.start;
        std::vector<i64> tab;
        for (i64 p = 0; p < run.len; ++p) tab.push_back(z.base(start + p) - start);
        whites[std::to_string(idx++)] = tab;
    }
    return Json{{"period", d.period()}, {"black", black}, {"white_perms", whites}};
}

ZebraPermutation zebra_from(const Json& j) {
    const i64 M = int_from(field(j, "period"));
    const Json& bl = field(j, "black");
    if (!bl.is_array()) throw IoError("black must be an array of [lo, hi]");
    std::vector<std::pair<i64, i64>> black;
    for (const auto& iv : bl) {
        auto v = ints_from(iv);
        if (v.size() != 2) throw IoError("black intervals are [lo, hi] pairs");
        black.emplace_back(v[0], v[1]);
    }
    return guarded("zebra", [&] {
        auto d = ZebraDecomposition::from_intervals(M, black);
        std::vector<std::vector<i64>> tabs;
        for (const auto& run : d.runs()) {
            if (run.black) continue;
            std::vector<i64> id(static_cast<std::size_t>(run.len));
            for (i64 p = 0; p < run.len; ++p) id[static_cast<std::size_t>(p)] = p;
            tabs.push_back(id);
        }
        if (j.contains("white_perms")) {
            const auto& wp = j.at("white_perms");
            if (!wp.is_object()) throw IoError("white_perms must be an object");
            for (const auto& [k, v] : wp.items()) {
                std::size_t used = 0;
                const std::size_t idx = std::stoul(k, &used);
                if (used != k.size() || idx >= tabs.size()) throw IoError("bad white run index '" + k + "'");
                tabs[idx] = ints_from(v);
            }
        }
        return make_zebra(d, tabs);
    });
}

Json zebra_family_json(const ZebraFamily& f) {
    Json o = Json::object();
    for (const auto& [i, z] : f) o[std::to_string(i)] = zebra_json(z);
    return o;
}

ZebraFamily zebra_family_from(const Json& j) {
    if (!j.is_object() || j.empty()) throw IoError("zebra family must be a non-empty object keyed by b-index");
    ZebraFamily f;
    for (const auto& [k, v] : j.items()) {
        int i = guarded("b-index", [&] {
            std::size_t used = 0;
            int r = std::stoi(k, &used);
            if (used != k.size() || r < 1) throw IoError("bad b-index '" + k + "'");
            return r;
        });
        f.emplace(i, zebra_from(v));
    }
    const i64 M = f.begin()->second.decomp.period();
    for (const auto& [i, z] : f)
        if (!(z.decomp == f.begin()->second.decomp) || z.decomp.period() != M)
            throw IoError("all zebras of a family share one decomposition");
    return f;
}

}  // namespace boomlab
