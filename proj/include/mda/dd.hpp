#pragma once

#include <cstdint>
#include <cmath>

namespace mda {

// Double-double value: hi + lo with |lo| <= ulp(hi)/2, ~106 significant bits.
// Only the operations needed to evaluate p + theta*q at heights beyond the
// 53-bit envelope are provided.
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    DD() = default;
    DD(double h) : hi(h), lo(0.0) {}
    DD(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

namespace dd_detail {

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

// Dekker split; exact for |a| < 2^996.
inline void split(double a, double& hi, double& lo) {
    double t = 134217729.0 * a; // 2^27 + 1
    hi = t - (t - a);
    lo = a - hi;
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    double ahi, alo, bhi, blo;
    split(a, ahi, alo);
    split(b, bhi, blo);
    double err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    return {p, err};
}

} // namespace dd_detail

inline DD dd_add(const DD& a, const DD& b) {
    DD s = dd_detail::two_sum(a.hi, b.hi);
    DD t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DD dd_sub(const DD& a, const DD& b) { return dd_add(a, DD{-b.hi, -b.lo}); }

inline DD dd_mul(const DD& a, const DD& b) {
    DD p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

// Exact conversion; |x| must stay well below 2^63 (guaranteed by the
// enumeration envelope).
inline DD dd_from_i64(long long x) {
    double h = static_cast<double>(x);
    long long r = x - static_cast<long long>(h);
    return dd_detail::quick_two_sum(h, static_cast<double>(r));
}

inline DD dd_abs(const DD& a) { return (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) ? DD{-a.hi, -a.lo} : a; }

} // namespace mda
