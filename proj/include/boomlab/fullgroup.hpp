#pragma once

#include "boomlab/odometer.hpp"
#include "boomlab/permz.hpp"
#include "boomlab/words.hpp"
#include "boomlab/zebra.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace boomlab {

class FullGroupError : public std::runtime_error {
public:
    enum class Kind {
        SpaceMismatch,
        NotInClass,
        EmptyA,
        TranslatesCollide,
        CannotReachEps,
        InfiniteDisplacement,
        DepthBudgetExceeded,
        BadInput
    };
    FullGroupError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

using SpacePtr = std::shared_ptr<const OdometerSpace>;

// x -> x + c(x mod M) with M dividing a power of q
struct FullGroupElement {
    SpacePtr sp;
    Pdp g;
    i64 depth() const;  // least n with M | q^n
};

FullGroupElement make_element(SpacePtr sp, Pdp g);
FullGroupElement fg_identity(SpacePtr sp);
FullGroupElement fg_T(SpacePtr sp, i64 k = 1);
FullGroupElement fg_compose(const FullGroupElement& g, const FullGroupElement& h);  // g after h
FullGroupElement fg_inverse(const FullGroupElement& g);
bool fg_equal(const FullGroupElement& g, const FullGroupElement& h);
// lift table at depth n
std::vector<i64> lift_at(const FullGroupElement& g, i64 depth);

Q apply(const FullGroupElement& g, const Q& x);
// g^{-1}(S) and g(S) at class level
CylinderSet preimage(const FullGroupElement& g, const CylinderSet& S);
CylinderSet image(const FullGroupElement& g, const CylinderSet& S);

Q uniform_distance(const FullGroupElement& g, const FullGroupElement& h);
Q uniform_distance_prime(const FullGroupElement& g, const FullGroupElement& h);

// alpha_x(g) restricted to [lo, hi]
std::vector<i64> action_cocycle(const FullGroupElement& g, const Q& x, i64 lo, i64 hi);
// alpha_x(g) as a permutation of Z
Pdp cocycle_pdp(const FullGroupElement& g, const Q& x);

struct ConstrainedRep {
    SpacePtr sp;
    std::map<int, FullGroupElement> b;  // missing generators act trivially
    FullGroupElement gen(int i) const;
};
FullGroupElement evaluate_rep(const ConstrainedRep& rho, const Word& w);
// max over generators of d(rho1(b_i), rho2(b_i))
Q rep_distance(const ConstrainedRep& r1, const ConstrainedRep& r2);

struct ConservativityCertificate {
    i64 k = 0;  // infinite orbits per T-orbit
    bool conservative = true;
    bool periodic = false;
    OrbitProfile profile;
};
ConservativityCertificate orbit_count_certificate(const FullGroupElement& g);

std::optional<i64> total_displacement(const FullGroupElement& g);

FullGroupElement first_return(const FullGroupElement& g, const CylinderSet& A);
// g_{X minus B}
FullGroupElement restrict_off(const FullGroupElement& g, const CylinderSet& B);

// c(u0 + i) = pi(i) - i for i in [lo, hi]; table[t] = pi(lo + t)
FullGroupElement insertion(SpacePtr sp, i64 depth, i64 u0, i64 lo, i64 hi, const std::vector<i64>& table);

struct InsertResult {
    ConstrainedRep rho;
    CylinderSet A;  // single deep class
    i64 M1 = 0, M2 = 0;
    Q distance;          // d(rho', rho), exact
    bool disjoint = false;
    bool window_ok = false;
    std::vector<Q> samples;  // points of A used for the window check
};
// pis[i][t] = pi_i(lo + t), a permutation of [lo, hi]
InsertResult insert_word(const ConstrainedRep& rho, const Word& w, const std::map<int, std::vector<i64>>& pis, i64 lo,
                         i64 hi, const CylinderSet& A, const Q& eps, std::mt19937_64& rng, i64 max_depth = 16);
// Sym(Z) model of the pis used by insert_word
ZAction sym_model(const std::map<int, std::vector<i64>>& pis, i64 lo);

struct DazzleResult {
    std::vector<FullGroupElement> fs;
    ZebraDecomposition decomp;
    i64 depth = 0, u0 = 0, m = 0, width = 0;
    Q worst_distance;
    bool zebra_ok = false, width_ok = false, displacement_ok = false, distance_ok = false;
    bool ok() const { return zebra_ok && width_ok && displacement_ok && distance_ok; }
};
DazzleResult dazzle(const std::vector<FullGroupElement>& hs, i64 Mp, const Q& eps, i64 max_depth = 14);

struct ECWitness {
    ConstrainedRep rho;
    std::optional<DazzleResult> dz;
    i64 k = 0;
    OrbitCount count;
    Q distance;
    bool ok = false;
    std::string detail;
};
ECWitness ec_witness(const ConstrainedRep& rho, const Word& w, const Q& eps, i64 max_depth = 14);

struct DensityResult {
    bool found = false;
    ConstrainedRep eta;
    Word w;
    CylinderSet A;
    i64 n1 = 0, n2 = 0, n3 = 0;
    Q d_target, d_b1;   // d(g, eta(w)) and d(eta(b1), rho(b1))
    Q best_target = 1;  // smallest d(g, eta(w)) tried
};
// the construction for fixed (A, n1, n2, n3); certificate distances filled in
DensityResult density_build(const ConstrainedRep& rho, const FullGroupElement& g, const CylinderSet& A, i64 n1, i64 n2, i64 n3);
DensityResult density_step(const ConstrainedRep& rho, const FullGroupElement& g, const Q& eps, i64 depth = 8, i64 max_levels = 2);

// random helpers
Q sample_point(const OdometerSpace& sp, std::mt19937_64& rng, i64 depth = 12);
// a point whose first `depth` digits are those of class u
Q sample_point_in(const OdometerSpace& sp, std::mt19937_64& rng, i64 depth, i64 u);
// residue-level permutation built from shuffles of consecutive blocks of at most m+1 classes
FullGroupElement random_periodic_element(SpacePtr sp, std::mt19937_64& rng, i64 depth, i64 m);
FullGroupElement random_element(SpacePtr sp, std::mt19937_64& rng, i64 depth, i64 maxc = 3);

struct MonteCarlo {
    double estimate = 0, stderr_ = 0;
};
MonteCarlo monte_carlo_distance(const FullGroupElement& g, const FullGroupElement& h, std::mt19937_64& rng, int samples);

}  // namespace boomlab
