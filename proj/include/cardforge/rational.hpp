#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace cardforge {

// Exact rational probability. All verdicts are exact; there is no tolerance
// parameter anywhere in the library.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Canonical "num/den" form, denominator always printed ("1/1", "3/8", ...).
inline std::string rat_str(const Rat& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos)
        return Rat(mpz_class(s));
    Rat q(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

} // namespace cardforge
