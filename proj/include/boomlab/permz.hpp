#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boomlab {

using i64 = std::int64_t;

inline i64 pmod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 gcd64(i64 a, i64 b);
i64 lcm64(i64 a, i64 b);

class PdpError : public std::runtime_error {
public:
    enum class Kind { BaseNotBijective, ExceptionsNotClosed, HasExceptions, NotInjective, BadShape };
    PdpError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// Periodic displacement permutation of Z: j -> j + c[j mod M] unless j is an exception.
struct Pdp {
    i64 M = 1;
    std::vector<i64> c{0};
    std::map<i64, i64> exc;

    static Pdp identity() { return Pdp{}; }
    static Pdp shift(i64 k = 1) { return Pdp{1, {k}, {}}; }
    static Pdp from_lift(std::vector<i64> lift, std::map<i64, i64> e = {});

    i64 base(i64 j) const { return j + c[static_cast<std::size_t>(pmod(j, M))]; }
    i64 operator()(i64 j) const {
        if (!exc.empty()) {
            auto it = exc.find(j);
            if (it != exc.end()) return it->second;
        }
        return base(j);
    }
    i64 residue_image(i64 u) const { return pmod(u + c[static_cast<std::size_t>(u)], M); }

    // same period, lift stretched to a multiple of M
    Pdp refined(i64 newM) const;

    bool operator==(const Pdp& o) const { return M == o.M && c == o.c && exc == o.exc; }
    bool operator!=(const Pdp& o) const { return !(*this == o); }
};

struct Validation {
    bool ok = true;
    PdpError::Kind kind = PdpError::Kind::BaseNotBijective;
    std::string detail;
};

Validation validate(const Pdp& g);
void require_valid(const Pdp& g);

Pdp canonical(const Pdp& g);
Pdp compose(const Pdp& g, const Pdp& h);  // g after h
Pdp inverse(const Pdp& g);
i64 action_radius(const Pdp& g);

struct PdpCycle {
    std::vector<i64> residues;
    i64 winding = 0;
    i64 length = 0;
};

struct OrbitProfile {
    std::vector<PdpCycle> cycles;
    i64 infinite_orbit_count = 0;  // sum over cycles of |D|/M
    bool periodic = true;
};

OrbitProfile orbit_profile(const Pdp& g);

// winding of the base cycle through each residue
std::vector<i64> residue_windings(const Pdp& g);

struct OrbitClass {
    enum class Kind { Finite, Infinite, Unknown } kind = Kind::Unknown;
    std::vector<i64> cycle;  // Finite: the orbit in forward order starting at j
    i64 cert_point = 0;      // Infinite: escaping orbit point
    i64 cert_steps = 0;      // steps from j to cert_point
    i64 winding = 0;
};

OrbitClass orbit_classify(const Pdp& g, i64 j, i64 budget);

// Finitely supported extension of a partial injection (greedy increasing completion)
Pdp finite_support_from_table(const std::map<i64, i64>& t);

// Replace g on dom(t) by t and re-pair the displaced points in increasing order.
// The returned permutation differs from g only on dom(t) and on g^-1(ran t).
Pdp override_table(const Pdp& g, const std::map<i64, i64>& t);

// Brute force: number of orbits meeting [inner_lo, inner_hi] that leave [lo, hi]
i64 window_escaping_orbits(const Pdp& g, i64 lo, i64 hi, i64 inner_lo, i64 inner_hi);

}  // namespace boomlab
