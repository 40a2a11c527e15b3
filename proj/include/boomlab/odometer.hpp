#pragma once

#include "boomlab/permz.hpp"
#include "boomlab/rational.hpp"

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace boomlab {

class OdometerError : public std::runtime_error {
public:
    enum class Kind { BadWeights, BadPoint, BadInput, NonterminatingCarry, NotWandering };
    OdometerError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// Product odometer on base-q digit sequences. Level i uses levels[i] while i < levels.size(),
// afterwards the tail repeats forever.
class OdometerSpace {
public:
    OdometerSpace(i64 q, std::vector<std::vector<Q>> levels, std::vector<Q> tail);
    static OdometerSpace haar(i64 q);
    // q = 2, weights (1/(1+l), l/(1+l)) at every level
    static OdometerSpace iii_lambda(const Q& lambda);

    i64 q() const { return q_; }
    const std::vector<Q>& level(i64 i) const;
    const Q& weight(i64 i, i64 digit) const { return level(i)[static_cast<std::size_t>(digit)]; }
    const std::vector<std::vector<Q>>& levels() const { return levels_; }
    const std::vector<Q>& tail() const { return tail_; }
    const std::optional<Q>& lambda() const { return lambda_; }

    // q^depth, throws BadInput past 2^40
    i64 modulus(i64 depth) const;
    Q class_measure(i64 u, i64 depth) const;
    // cached table of all depth-n class measures
    const std::vector<Q>& class_measures(i64 depth) const;
    bool uniform() const;
    std::string label() const;  // "II_1", "III_lambda" or "product"

private:
    i64 q_;
    std::vector<std::vector<Q>> levels_;
    std::vector<Q> tail_;
    std::optional<Q> lambda_;
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

struct CylinderSet {
    i64 depth = 0;
    std::vector<i64> classes;  // sorted, distinct, in [0, q^depth)
    bool operator==(const CylinderSet&) const = default;
};

CylinderSet make_cylinder(const OdometerSpace& sp, i64 depth, std::vector<i64> classes);
CylinderSet full_space(const OdometerSpace& sp, i64 depth = 0);
CylinderSet refine(const OdometerSpace& sp, const CylinderSet& A, i64 depth);
// smallest depth describing the same set
CylinderSet coarsen(const OdometerSpace& sp, const CylinderSet& A);
bool same_set(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B);
CylinderSet unite(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B);
CylinderSet intersect(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B);
CylinderSet subtract(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B);
CylinderSet symmetric_difference(const OdometerSpace& sp, const CylinderSet& A, const CylinderSet& B);
CylinderSet complement(const OdometerSpace& sp, const CylinderSet& A);

Q measure(const OdometerSpace& sp, const CylinderSet& A);
// T^k A
CylinderSet translate(const OdometerSpace& sp, const CylinderSet& A, i64 k);
// mu(T^s A) for s = 0..q^depth-1
std::vector<Q> translate_measures(const OdometerSpace& sp, const CylinderSet& A);

// Points are q-adic integers given by rationals whose denominator is prime to q.
void require_point(i64 q, const Q& x);
i64 digit0(i64 q, const Q& x);
std::vector<i64> digits(i64 q, const Q& x, i64 n);
// x mod q^n as an integer in [0, q^n)
i64 residue(i64 q, const Q& x, i64 n);
struct DigitExpansion {
    std::vector<i64> pre, cycle;  // least significant digit first
};
DigitExpansion expand(i64 q, const Q& x);
Q from_expansion(i64 q, const DigitExpansion& e);

// d(T^k mu)/d mu at x as the product over the digits that change
Q rn_derivative(const OdometerSpace& sp, i64 k, const Q& x);
std::set<Q> ratio_samples(const OdometerSpace& sp, i64 n, i64 K);

struct WanderingCheck {
    bool ok = true;
    i64 i = -1, j = -1, cls = -1;  // overlap of W + ks[i] and W + ks[j] in class cls
};
WanderingCheck r_wandering_check(const OdometerSpace& sp, const CylinderSet& W, const std::vector<i64>& ks);

struct HKBound {
    Q lhs, rhs;
    bool holds = false;
};
HKBound hajian_kakutani_bound(const OdometerSpace& sp, const CylinderSet& A, const std::vector<i64>& ks, i64 n);

Q cesaro_average(const OdometerSpace& sp, const CylinderSet& A, i64 n);
Q natural_density(const OdometerSpace& sp, const CylinderSet& A, const Q& delta, i64 N);

struct KrengelResult {
    bool found = false;
    i64 n = 0;
    CylinderSet A, U1, B1;  // A = B1 u T^-n U1
    Q sym_U, sym_B;         // mu(T^n A xor U), mu(A xor B)
    Q best;                 // smallest max(sym_U, sym_B) seen over the search
    i64 best_n = 0;
};
KrengelResult krengel_combine(const OdometerSpace& sp, const CylinderSet& U, const CylinderSet& B, const Q& eps, i64 N);

}  // namespace boomlab
