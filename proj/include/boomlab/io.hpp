#pragma once

#include "boomlab/chabauty.hpp"
#include "boomlab/fullgroup.hpp"
#include "boomlab/odometer.hpp"
#include "boomlab/permz.hpp"
#include "boomlab/words.hpp"
#include "boomlab/zebra.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace boomlab {

using Json = nlohmann::json;

// malformed input; the CLI maps it to exit code 2
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// rationals travel as "p/q" strings; integers are accepted on input
Json q_json(const Q& x);
Q q_from(const Json& j);

// {"word": "a b1^-1"}; a bare string is accepted too
Json word_json(const Word& w);
Word word_from(const Json& j, bool auto_reduce = false);

// {"period": M, "lift": [...], "exceptions": {"j": e}}
Json pdp_json(const Pdp& g);
Pdp pdp_from(const Json& j);

// {"q": 2, "weights": {"kind": "III-lambda", "lambda": "1/2"}}, {"kind": "haar"} or
// {"kind": "table", "levels": [[...]], "tail": [...]}
Json space_json(const OdometerSpace& sp);
OdometerSpace space_from(const Json& j);

// {"depth": n, "classes": [...]}
Json cylinder_json(const CylinderSet& A);
CylinderSet cylinder_from(const OdometerSpace& sp, const Json& j);

// {"F": [words], "members": [words]}
Json window_json(const SubgroupWindow& W);
SubgroupWindow window_from(const Json& j, bool auto_reduce = false);

// {"period": M, "black": [[lo, hi]], "white_perms": {"i": [...]}}, keyed by white-run index in
// order from the anchor run; missing runs are fixed
Json zebra_json(const ZebraPermutation& z);
ZebraPermutation zebra_from(const Json& j);
// {"1": zebra, "2": zebra}, keyed by b-index
Json zebra_family_json(const ZebraFamily& f);
ZebraFamily zebra_family_from(const Json& j);

}  // namespace boomlab
