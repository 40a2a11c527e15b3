#include "boomlab/rational.hpp"

#include <stdexcept>

namespace boomlab {

Q parse_q(const std::string& s) {
    std::string t;
    for (char ch : s)
        if (ch != ' ') t += ch;
    if (t.empty()) throw std::invalid_argument("empty rational");
    Q r;
    if (r.set_str(t, 10) != 0) throw std::invalid_argument("bad rational '" + s + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

}  // namespace boomlab
