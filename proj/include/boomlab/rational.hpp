#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace boomlab {

using Q = mpq_class;

inline Q make_q(long num, long den = 1) {
    Q r(num, den);
    r.canonicalize();
    return r;
}

// "p/q" (or "p") on output, accepts the same plus plain integers on input
inline std::string q_str(const Q& x) {
    if (x.get_den() == 1) return x.get_num().get_str() + "/1";
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Q parse_q(const std::string& s);

inline double q_double(const Q& x) { return x.get_d(); }

}  // namespace boomlab
