#pragma once

#include "boomlab/permz.hpp"
#include "boomlab/words.hpp"

#include <map>

namespace boomlab {

// Action of the free group on Z with a acting by the shift and b_i by given permutations
// (generators not listed act trivially).
class ZAction {
public:
    ZAction() = default;
    explicit ZAction(std::map<int, Pdp> gens);

    const std::map<int, Pdp>& gens() const { return gens_; }
    const Pdp& gen(int i) const;
    const Pdp& gen_inverse(int i) const;

    i64 apply(const Letter& l, i64 j) const;
    // w = s1...sL acts by applying sL first
    i64 apply(const Word& w, i64 j) const;
    Pdp element(const Word& w) const;

    ZAction conjugated_by_shift(i64 x) const;  // point x becomes 0

private:
    std::map<int, Pdp> gens_;
    std::map<int, Pdp> inv_;
};

}  // namespace boomlab
