#pragma once

#include "boomlab/io.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace boomlab {

enum class Scale { Small, Medium, Large };
Scale parse_scale(const std::string& s);  // IoError on anything else
std::string scale_name(Scale s);
int scale_factor(Scale s);  // trial multiplier of the preset

// BOOMERANG_LAB_THREADS, else the hardware count; IoError if set but not a positive integer
int worker_count();
// runs body(i) for i in [0, n) across workers; the first exception is rethrown after joining
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// independent stream per (seed, stream, trial), so results do not depend on the worker count
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

struct CsvRow {
    std::string parameter, value;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // first failure, or a one-line summary
    Json certificates;   // deterministic given the seed
    std::vector<CsvRow> csv;
    double seconds = 0;
};

struct SuiteConfig {
    std::uint64_t seed = 7;
    Scale scale = Scale::Small;
    // trial override for the sweep subcommands; 0 keeps the preset
    int trials = 0;
};

int criterion_count();
std::string criterion_name(int id);
CriterionResult run_criterion(int id, const SuiteConfig& cfg);
std::vector<CriterionResult> run_suite(const SuiteConfig& cfg, const std::vector<int>& ids = {});

// report layout shared by the CLI and the acceptance binary; timings live outside "certificates"
Json criterion_json(const CriterionResult& r);

// zebra-check: ec_witness over random representations for one word (random words if absent)
struct ZebraCheckConfig {
    std::uint64_t seed = 7;
    int trials = 100;
    std::optional<Word> word;
    Q eps = make_q(1, 3);
    std::optional<ZebraFamily> family;  // when given, also count orbits of `word` on it
};
CriterionResult run_zebra_check(const ZebraCheckConfig& cfg);

// boomerang: certificate sweeps on the odometer model (q = 2, F = ball(radius)) and on the Sym(Z)
// model with block-periodic generators; a fixed gamma that is not a power of a skips the latter
struct BoomerangConfig {
    std::uint64_t seed = 7;
    int reps = 100, points = 8, gammas = 5;
    i64 radius = 2;
    std::optional<Word> gamma;
};
CriterionResult run_boomerang(const BoomerangConfig& cfg);

// odometer: numerics for one space and optional sets
struct OdometerConfig {
    OdometerSpace space = OdometerSpace::iii_lambda(make_q(1, 2));
    i64 depth = 4;
    std::optional<Json> set;  // cylinder JSON for Cesaro / density / HK
    Q delta = make_q(3, 10);
    std::optional<Json> U, B;  // cylinders for krengel-combine
    Q eps = make_q(1, 4);
    i64 horizon = 256;
};
CriterionResult run_odometer(const OdometerConfig& cfg);

}  // namespace boomlab
