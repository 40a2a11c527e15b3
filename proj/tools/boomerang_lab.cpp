// boomerang-lab: batch certificate runner. Failed certificates exit 1, bad configuration exits 2.
#include "boomlab/suite.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace boomlab;

namespace {

// JSON arguments are inline text or @path
Json json_arg(const std::string& s, const char* what) {
    std::string text = s;
    if (!s.empty() && s[0] == '@') {
        std::ifstream in(s.substr(1));
        if (!in) throw IoError(std::string("cannot read ") + what + " file '" + s.substr(1) + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return Json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

Q q_arg(const std::string& s, const char* what) {
    try {
        return parse_q(s);
    } catch (const std::exception& e) {
        throw IoError(std::string("bad ") + what + " '" + s + "': " + e.what());
    }
}

std::string csv_cell(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

struct Common {
    std::uint64_t seed = 7;
    std::string scale = "small", out, format = "json";
};

struct Report {
    std::string sub;
    std::vector<std::string> replay;  // canonical argv reproducing the certificates
    std::vector<CriterionResult> results;
};

int emit(const Report& rep, const Common& c) {
    bool ok = !rep.results.empty();
    for (const auto& r : rep.results) ok = ok && r.passed;
    std::string text;
    if (c.format == "csv") {
        std::ostringstream os;
        os << "suite,parameter,value\n";
        for (const auto& r : rep.results) {
            os << csv_cell(r.name) << ",passed," << (r.passed ? "true" : "false") << "\n";
            for (const auto& row : r.csv) os << csv_cell(r.name) << "," << csv_cell(row.parameter) << "," << csv_cell(row.value) << "\n";
        }
        text = os.str();
    } else {
        Json suites = Json::array(), timings = Json::object(), failed = Json::array();
        for (const auto& r : rep.results) {
            suites.push_back(criterion_json(r));
            timings[r.name] = r.seconds;
            if (!r.passed) failed.push_back(r.name + ": " + r.detail);
        }
        Json j{{"tool", "boomerang-lab"}, {"subcommand", rep.sub}, {"passed", ok}, {"failed", failed},
               {"replay", {{"argv", rep.replay}}}, {"suites", suites}, {"timings", timings}};
        text = j.dump(2) + "\n";
    }
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out);
        if (!f) throw IoError("cannot write '" + c.out + "'");
        f << text;
    }
    for (const auto& r : rep.results)
        if (!r.passed) std::cerr << "FAILED " << r.name << ": " << r.detail << "\n";
    return ok ? 0 : 1;
}

std::vector<std::string> base_argv(const std::string& sub, const Common& c) {
    return {sub, "--seed", std::to_string(c.seed), "--scale", c.scale};
}

int run(int argc, const char* const* argv) {
    CLI::App app{"boomerang-lab: exact certificates for conservative free-group actions"};
    app.require_subcommand(1);
    Common c;
    auto common = [&](CLI::App* s) {
        s->add_option("--seed", c.seed, "random seed");
        s->add_option("--scale", c.scale, "trial preset")->check(CLI::IsMember({"small", "medium", "large"}));
        s->add_option("--out", c.out, "report path (default stdout)");
        s->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* zc = app.add_subcommand("zebra-check", "ec_witness sweeps for a word");
    common(zc);
    int zc_trials = 100;
    std::string zc_word, zc_eps = "1/3", zc_family;
    bool auto_reduce = false;
    zc->add_option("--trials", zc_trials);
    zc->add_option("--word", zc_word, "word such as \"a b1 a^-1 b1^-1\"; random words if absent");
    zc->add_option("--eps", zc_eps);
    zc->add_option("--zebra", zc_family, "zebra family JSON (inline or @file): also count orbits of --word on it");
    zc->add_flag("--auto-reduce", auto_reduce, "freely reduce input words instead of rejecting them");

    auto* bo = app.add_subcommand("boomerang", "boomerang certificate sweeps over points and balls");
    common(bo);
    BoomerangConfig bc;
    std::string bo_gamma;
    bo->add_option("--reps", bc.reps, "random representations");
    bo->add_option("--points", bc.points, "points per representation");
    bo->add_option("--gammas", bc.gammas, "random gammas per point");
    bo->add_option("--radius", bc.radius, "F = ball(radius)");
    bo->add_option("--gamma", bo_gamma, "fixed gamma word");
    bo->add_flag("--auto-reduce", auto_reduce);

    auto* od = app.add_subcommand("odometer", "measures, RN derivatives, ratio samples, HK bounds, density, krengel-combine");
    common(od);
    OdometerConfig oc;
    std::string od_space, od_set, od_u, od_b, od_delta = "3/10", od_eps = "1/4";
    od->add_option("--space", od_space, "space JSON, e.g. {\"q\":2,\"weights\":{\"kind\":\"III-lambda\",\"lambda\":\"1/2\"}}");
    od->add_option("--depth", oc.depth);
    od->add_option("--set", od_set, "cylinder JSON {\"depth\":n,\"classes\":[...]}");
    od->add_option("--delta", od_delta, "natural density tolerance");
    od->add_option("--U", od_u, "cylinder JSON for krengel-combine");
    od->add_option("--B", od_b, "cylinder JSON for krengel-combine");
    od->add_option("--eps", od_eps);
    od->add_option("--horizon", oc.horizon, "largest n searched");

    auto* fg = app.add_subcommand("fullgroup", "metric, first return, insertion, dazzle and density-step sweeps");
    common(fg);
    int fg_trials = 0;
    std::vector<std::string> fg_checks;
    fg->add_option("--trials", fg_trials, "trials per sweep (0 keeps the preset)");
    fg->add_option("--check", fg_checks, "subset to run")->check(CLI::IsMember({"metric", "return", "dazzle", "insertion", "density"}));

    auto* sz = app.add_subcommand("symz", "Sym(Z) surgeries: close_orbit, separate_stabilizers, realize_window");
    common(sz);
    int sz_trials = 0;
    sz->add_option("--trials", sz_trials, "instances per surgery (0 keeps the preset)");

    auto* su = app.add_subcommand("suite", "full acceptance run");
    common(su);
    std::vector<int> only;
    su->add_option("--only", only, "criterion ids")->check(CLI::Range(1, criterion_count()));

    auto* rp = app.add_subcommand("replay", "rerun the command recorded in a report's replay block");
    std::string rp_path;
    rp->add_option("report", rp_path, "JSON report")->required();
    rp->add_option("--out", c.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    worker_count();  // validates BOOMERANG_LAB_THREADS
    SuiteConfig scfg;
    scfg.seed = c.seed;
    scfg.scale = parse_scale(c.scale);
    Report rep;

    if (*rp) {
        Json j = json_arg("@" + rp_path, "report");
        if (!j.contains("replay") || !j["replay"].contains("argv") || !j["replay"]["argv"].is_array())
            throw IoError("report has no replay block");
        std::vector<std::string> args{"boomerang-lab"};
        for (const auto& a : j["replay"]["argv"]) {
            if (!a.is_string()) throw IoError("replay argv must hold strings");
            args.push_back(a.get<std::string>());
        }
        if (args.size() < 2 || args[1] == "replay") throw IoError("bad replay block");
        if (!c.out.empty()) {
            args.push_back("--out");
            args.push_back(c.out);
        }
        std::vector<const char*> av;
        for (const auto& a : args) av.push_back(a.c_str());
        return run(static_cast<int>(av.size()), av.data());
    }

    if (*zc) {
        ZebraCheckConfig z;
        z.seed = c.seed;
        z.trials = zc_trials;
        z.eps = q_arg(zc_eps, "eps");
        if (z.trials < 0) throw IoError("--trials must be nonnegative");
        if (z.eps <= 0 || z.eps >= 1) throw IoError("--eps must lie in (0, 1)");
        rep.sub = "zebra-check";
        rep.replay = base_argv(rep.sub, c);
        rep.replay.insert(rep.replay.end(), {"--trials", std::to_string(z.trials), "--eps", q_str(z.eps)});
        if (!zc_word.empty()) {
            z.word = word_from(Json(zc_word), auto_reduce);
            rep.replay.insert(rep.replay.end(), {"--word", z.word->str()});
        }
        if (!zc_family.empty()) {
            z.family = zebra_family_from(json_arg(zc_family, "zebra family"));
            rep.replay.insert(rep.replay.end(), {"--zebra", zebra_family_json(*z.family).dump()});
        }
        rep.results.push_back(run_zebra_check(z));
    } else if (*bo) {
        bc.seed = c.seed;
        rep.sub = "boomerang";
        rep.replay = base_argv(rep.sub, c);
        rep.replay.insert(rep.replay.end(), {"--reps", std::to_string(bc.reps), "--points", std::to_string(bc.points), "--gammas",
                                             std::to_string(bc.gammas), "--radius", std::to_string(bc.radius)});
        if (!bo_gamma.empty()) {
            bc.gamma = word_from(Json(bo_gamma), auto_reduce);
            rep.replay.insert(rep.replay.end(), {"--gamma", bc.gamma->str()});
        }
        rep.results.push_back(run_boomerang(bc));
    } else if (*od) {
        if (!od_space.empty()) oc.space = space_from(json_arg(od_space, "space"));
        oc.delta = q_arg(od_delta, "delta");
        oc.eps = q_arg(od_eps, "eps");
        if (oc.eps <= 0 || oc.delta <= 0) throw IoError("--eps and --delta must be positive");
        if (oc.horizon < 1) throw IoError("--horizon must be positive");
        rep.sub = "odometer";
        rep.replay = base_argv(rep.sub, c);
        rep.replay.insert(rep.replay.end(), {"--space", space_json(oc.space).dump(), "--depth", std::to_string(oc.depth), "--delta",
                                             q_str(oc.delta), "--eps", q_str(oc.eps), "--horizon", std::to_string(oc.horizon)});
        auto cyl = [&](const std::string& s, const char* flag, std::optional<Json>& dst) {
            if (s.empty()) return;
            dst = json_arg(s, flag);
            cylinder_from(oc.space, *dst);  // validate early
            rep.replay.insert(rep.replay.end(), {flag, dst->dump()});
        };
        cyl(od_set, "--set", oc.set);
        cyl(od_u, "--U", oc.U);
        cyl(od_b, "--B", oc.B);
        rep.results.push_back(run_odometer(oc));
    } else if (*fg) {
        if (fg_trials < 0) throw IoError("--trials must be nonnegative");
        scfg.trials = fg_trials;
        rep.sub = "fullgroup";
        rep.replay = base_argv(rep.sub, c);
        rep.replay.insert(rep.replay.end(), {"--trials", std::to_string(fg_trials)});
        const std::vector<std::pair<std::string, int>> ids{{"metric", 4}, {"return", 5}, {"dazzle", 6}, {"insertion", 7}, {"density", 10}};
        for (const auto& [name, id] : ids) {
            if (!fg_checks.empty() && std::find(fg_checks.begin(), fg_checks.end(), name) == fg_checks.end()) continue;
            if (!fg_checks.empty()) rep.replay.insert(rep.replay.end(), {"--check", name});
            rep.results.push_back(run_criterion(id, scfg));
        }
    } else if (*sz) {
        if (sz_trials < 0) throw IoError("--trials must be nonnegative");
        scfg.trials = sz_trials;
        rep.sub = "symz";
        rep.replay = base_argv(rep.sub, c);
        rep.replay.insert(rep.replay.end(), {"--trials", std::to_string(sz_trials)});
        rep.results.push_back(run_criterion(12, scfg));
    } else {
        rep.sub = "suite";
        rep.replay = base_argv(rep.sub, c);
        for (int id : only) rep.replay.insert(rep.replay.end(), {"--only", std::to_string(id)});
        rep.results = run_suite(scfg, only);
    }
    rep.replay.insert(rep.replay.end(), {"--format", c.format});
    return emit(rep, c);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
