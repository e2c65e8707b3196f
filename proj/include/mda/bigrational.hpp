#pragma once

#include <gmpxx.h>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mda/dd.hpp"
#include "mda/rng.hpp"

namespace mda {

using BigInt = mpz_class;
using BigRat = mpq_class;

// log|x| for integers too large for double; 0 maps to -inf.
inline double log_abs(const BigInt& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    long exp2 = 0;
    double m = mpz_get_d_2exp(&exp2, x.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(exp2) * M_LN2;
}

inline double log_abs(const BigRat& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    return log_abs(BigInt(x.get_num())) - log_abs(BigInt(x.get_den()));
}

// Round-to-nearest double; exact when the value fits.
inline double to_double(const BigRat& x) { return mpq_get_d(x.get_mpq_t()); }

// Two-double approximation of a rational, error < 2^-106 relative.
inline DD to_dd(const BigRat& x) {
    double hi = to_double(x);
    BigRat rem = x - BigRat(hi);
    return dd_detail::quick_two_sum(hi, to_double(rem));
}

inline BigRat rat_from_double(double x) {
    BigRat r;
    mpq_set_d(r.get_mpq_t(), x); // exact: doubles are dyadic rationals
    return r;
}

// Random rational a / 2^bits with a odd, uniform over (0,1) dyadics of that
// resolution. Used as a stand-in for a "typical real" target: its continued
// fraction matches a generic real up to heights controlled by `bits`.
inline BigRat random_dyadic(Rng& rng, unsigned bits) {
    BigInt num = 0;
    unsigned filled = 0;
    while (filled < bits) {
        unsigned take = std::min(64u, bits - filled);
        std::uint64_t w = rng.next_u64();
        if (take < 64) w &= (std::uint64_t(1) << take) - 1;
        BigInt chunk(static_cast<unsigned long>(w >> 32));
        chunk <<= 32;
        chunk += static_cast<unsigned long>(w & 0xffffffffULL);
        num <<= take;
        num += chunk;
        filled += take;
    }
    num |= 1; // force odd so the denominator is exactly 2^bits
    BigInt den = 1;
    den <<= bits;
    if (num >= den) num -= 2;
    BigRat r(num, den);
    r.canonicalize();
    return r;
}

} // namespace mda
