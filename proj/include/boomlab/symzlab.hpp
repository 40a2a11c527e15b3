#pragma once

#include "boomlab/permz.hpp"
#include "boomlab/words.hpp"
#include "boomlab/zaction.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace boomlab {

class SymzError : public std::runtime_error {
public:
    enum class Kind { SupportTooWide, BadInput, SearchExhausted };
    SymzError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

// h0 supported in (-k, k], repeated on every block (2nk - k, 2nk + k]
Pdp periodic_extension(const Pdp& h0, i64 k);

// rho with b_gen replaced via override_table(rho(b_gen), table)
ZAction with_override(const ZAction& rho, int gen, const std::map<i64, i64>& table);

// eta(b_i)(f) = rho(b_i)(f) for every listed generator of either action and every f in F
bool agrees_on(const ZAction& rho, const ZAction& eta, const std::set<i64>& F);

struct CloseOrbitResult {
    ZAction eta;
    bool already_finite = false;
    std::map<int, std::map<i64, i64>> tables;  // override applied to each rho(b_i)
    i64 pass = 0;                 // w-pass in which the splice happens
    i64 back = 0;                 // passes of the backward path from x joined by the splice
    i64 start = 0;                // letter index where the reroute begins; earlier letters follow rho
    i64 run = 0;                  // letters rerouted, read cyclically from start
    std::vector<i64> cycle;       // x, eta(w)x, ... closing back at x
    bool verified = false;
};
CloseOrbitResult close_orbit(const ZAction& rho, const Word& w, i64 x, const std::set<i64>& F, i64 budget = 4096);
bool replay_close_orbit(const ZAction& rho, const Word& w, i64 x, const std::set<i64>& F, const CloseOrbitResult& r);

// w = a^-n b1 a^n with eta(w)x = x and eta(w)y != y
struct SurgeryResult {
    ZAction eta;
    Word w;
    i64 n = 0;
    std::map<i64, i64> table;  // override applied to rho(b1)
    bool verified = false;
};
SurgeryResult separate_stabilizers(const ZAction& rho, i64 x, i64 y, const std::set<i64>& F, i64 budget = 4096);
bool replay_separate(const ZAction& rho, i64 x, i64 y, const std::set<i64>& F, const SurgeryResult& r);

// eta(w)|_S = iota with w = a^-n b1 a^n; eta keeps b1 on Ffrozen and every other generator
SurgeryResult realize_window(const ZAction& rho, const std::map<i64, i64>& iota, const std::set<i64>& Ffrozen, i64 budget = 4096);
bool replay_realize(const ZAction& rho, const std::map<i64, i64>& iota, const std::set<i64>& Ffrozen, const SurgeryResult& r);

}  // namespace boomlab
