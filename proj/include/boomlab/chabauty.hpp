#pragma once

#include "boomlab/fullgroup.hpp"
#include "boomlab/words.hpp"
#include "boomlab/zaction.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boomlab {

class ChabautyError : public std::runtime_error {
public:
    enum class Kind { InjectivityFailure, AtomOnTrivial, BadInput };
    ChabautyError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// Both models reduce to an action on Z with a the shift: the Sym(Z) model directly, the odometer
// model through the cocycle alpha_x, where x sits at 0 and T^j x at j.
struct OrbitModel {
    ZAction act;
    i64 point = 0;
};
OrbitModel sym_point(const ZAction& act, i64 x);
OrbitModel odometer_point(const ConstrainedRep& rho, const Q& x);

struct SubgroupWindow {
    std::set<Word> F;
    std::set<Word> members;  // Stab n F
    bool operator==(const SubgroupWindow&) const = default;
    bool contains(const Word& w) const { return members.count(w) > 0; }
};
// e in F implies e in members, and closure under products inside F
bool window_consistent(const SubgroupWindow& W);

SubgroupWindow stab_window(const OrbitModel& m, const std::set<Word>& F);

// H in Env(E): E inside H; H in Miss(E): E disjoint from H; H in Nbh(D, F): H n F = D n F.
// Every word asked about must lie in H.F.
bool in_env(const SubgroupWindow& H, const std::set<Word>& E);
bool in_miss(const SubgroupWindow& H, const std::set<Word>& E);
bool in_nbh(const SubgroupWindow& H, const SubgroupWindow& D, const std::set<Word>& F);

// smallest n in [1, N] with Stab(gamma^n x) n F = Stab(x) n F
std::optional<i64> boomerang_certificate(const OrbitModel& m, const Word& gamma, const std::set<Word>& F, i64 N);

struct BoomerangBound {
    i64 nF = 0;            // evaluation depth of F
    i64 gamma_depth = 0;
    i64 ell = 0;           // cycle length of the class of x under rho(gamma) at its own depth
    i64 cycle_at_depth = 0;  // same at depth max(nF, gamma_depth): a guaranteed return time
    i64 bound = 0;         // ell * q^nF
};
BoomerangBound boomerang_bound(const ConstrainedRep& rho, const Q& x, const Word& gamma, const std::set<Word>& F);

struct CoreFreeReport {
    std::vector<std::pair<Word, Word>> witnesses;  // (gamma, eta) with eta gamma eta^-1 outside Stab(x)
    std::vector<Word> unresolved;
    i64 radius = 0;
    bool core_free_on_window() const { return unresolved.empty(); }
};
CoreFreeReport core_free_window(const OrbitModel& m, const std::set<Word>& F, int radius);

struct CoamenableReport {
    bool injective = true;
    std::pair<Word, Word> collision;
    Q worst_ratio;
    Word worst;
    bool folner = false;
};
CoamenableReport coamenable_window(const OrbitModel& m, const std::vector<Word>& A, const std::set<Word>& F, const Q& eps);

// gamma with gamma omega x = sigma(omega) x for all omega; sigma[i] indexes Omega
std::optional<Word> co_ht_window(const OrbitModel& m, const std::vector<Word>& Omega, const std::vector<int>& sigma, int radius);

struct WeightedWindow {
    SubgroupWindow W;
    Q weight;
};
struct ConservativityWitness {
    Word gamma;
    Q bound;  // weight of the windows in B that contain gamma
};
ConservativityWitness global_conservativity_witness(const std::vector<WeightedWindow>& family, const std::vector<std::size_t>& B);

// generators used by the model, for searches
std::vector<int> model_gens(const OrbitModel& m);

}  // namespace boomlab
