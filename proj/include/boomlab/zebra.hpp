#pragma once

#include "boomlab/permz.hpp"
#include "boomlab/rational.hpp"
#include "boomlab/words.hpp"
#include "boomlab/zaction.hpp"

#include <array>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boomlab {

class ZebraError : public std::runtime_error {
public:
    enum class Kind { BadDecomposition, TableNotPermutation, RunMismatch, HypothesisViolated, WindowTooSmall, TypeMismatch };
    ZebraError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// M-periodic black/white strips. Runs are listed from the black run B_0 that contains the
// smallest nonnegative black residue; `anchor` is the first integer of B_0 (may be negative).
class ZebraDecomposition {
public:
    struct Run {
        i64 start = 0;  // offset from anchor, in [0, M)
        i64 len = 0;
        bool black = false;
    };
    enum class Part { L, C, R, W };
    struct Locus {
        i64 k = 0;  // strip index: B_k, or W_k (right of B_k)
        Part part = Part::W;
    };

    ZebraDecomposition() = default;
    ZebraDecomposition(i64 M, std::vector<char> black);
    // inclusive residue intervals [lo, hi] with 0 <= lo <= hi < M
    static ZebraDecomposition from_intervals(i64 M, const std::vector<std::pair<i64, i64>>& black);

    i64 period() const { return M_; }
    bool is_black(i64 n) const { return black_[static_cast<std::size_t>(pmod(n, M_))]; }
    i64 min_width() const { return s_; }
    i64 anchor() const { return anchor_; }
    i64 black_runs() const { return nb_; }
    const std::vector<Run>& runs() const { return runs_; }
    std::vector<std::pair<i64, i64>> black_intervals() const;

    // integer bounds of B_k and W_k
    i64 black_start(i64 k) const;
    i64 black_end(i64 k) const;
    i64 white_start(i64 k) const { return black_end(k) + 1; }
    i64 white_end(i64 k) const { return black_start(k + 1) - 1; }

    // position of n given edge width lr for the L/C/R refinement
    Locus locate(i64 n, i64 lr) const;
    // index of the run (within runs()) containing n, plus its integer start
    std::pair<std::size_t, i64> run_of(i64 n) const;

    bool operator==(const ZebraDecomposition& o) const { return M_ == o.M_ && black_ == o.black_; }

private:
    i64 M_ = 1;
    std::vector<char> black_;
    std::vector<Run> runs_;
    std::vector<std::size_t> black_run_idx_;
    i64 anchor_ = 0, s_ = 0, nb_ = 0;
};

struct ZebraPermutation {
    ZebraDecomposition decomp;
    Pdp base;
};

// white_perms[i] permutes the positions 0..len-1 of the i-th white run (in runs() order)
ZebraPermutation make_zebra(const ZebraDecomposition& d, const std::vector<std::vector<i64>>& white_perms);
// residue-level assignment u -> v for white residues; unlisted residues are fixed
ZebraPermutation make_zebra_from_map(const ZebraDecomposition& d, const std::map<i64, i64>& moves);
// checks the zebra constraints of a Pdp against a decomposition; empty string when fine
std::string zebra_violation(const ZebraDecomposition& d, const Pdp& g);

using ZebraFamily = std::map<int, ZebraPermutation>;  // b_i -> zebra permutation

struct Hypothesis {
    i64 L = 0, R = 0, s = 0;
    bool holds = false;
};
Hypothesis width_hypothesis(const Word& w, const ZebraFamily& z);
ZAction zebra_action(const ZebraFamily& z);

struct ZebraDynReport {
    bool ok = true;
    int clause = 0;  // 1..5 of the first failure
    i64 n = 0, image = 0;
    std::array<i64, 5> checked{};
    std::string detail;
};

ZebraDynReport check_zebradyn(const Word& w, const ZebraFamily& z, i64 lo, i64 hi);
// default window: 6*M*max(1,R)*|w| points centred on min C_0
std::pair<i64, i64> default_window(const Word& w, const ZebraFamily& z);

struct OrbitCount {
    i64 count = 0;               // structural (forward-orbit seeds from C_0)
    i64 brute_force = 0;         // window union-find
    i64 profile = 0;             // residue cycle windings
    std::vector<i64> witnesses;  // seeds
    bool structural_ok = true;
    bool consistent = false;     // all three agree with |c_a(w)|
    std::string detail;
};

OrbitCount count_infinite_orbits(const Word& w, const ZebraFamily& z, i64 lo, i64 hi);
OrbitCount count_infinite_orbits(const Word& w, const ZebraFamily& z);
// window union-find only, no hypothesis gate; inner third of the window is classified
i64 brute_force_infinite_orbits(const Word& w, const ZebraFamily& z, i64 lo, i64 hi);

struct FolnerInterval {
    i64 lo = 0, hi = 0, blocks = 0;
    Q worst_ratio;
};

struct FolnerResult {
    bool certified = false;
    std::vector<FolnerInterval> intervals;  // growth history, last is the certified one
};

struct ZebraInstance {
    ZebraFamily zperms;
    Word w;
};
// random strips, random white permutations and a random word satisfying the width hypothesis
ZebraInstance random_zebra_instance(std::mt19937_64& rng, i64 maxM = 200);
// white permutations built from random shuffles of blocks of at most r+1 points
ZebraPermutation random_zebra_permutation(std::mt19937_64& rng, const ZebraDecomposition& d, i64 r);

FolnerResult folner_intervals(const ZebraFamily& z, const Q& eps, const std::set<Word>& F, i64 max_blocks = 4096);

}  // namespace boomlab
