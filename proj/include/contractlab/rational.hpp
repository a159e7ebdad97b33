#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

#include "contractlab/errors.hpp"

namespace contractlab {

// All quantitative state in the library is exact: Rat is an arbitrary
// precision rational. Doubles appear only in clearly marked geometry /
// prefilter code paths and never feed a returned value without an exact
// re-evaluation.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parse "p", "-p", or "p/q" (base 10). Whitespace is not tolerated: the
// instance format is machine written.
inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw ValidationError("empty rational literal");
    for (char ch : s) {
        if (ch != '-' && ch != '/' && !(ch >= '0' && ch <= '9'))
            throw ValidationError("bad rational literal: '" + s + "'");
    }
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw ValidationError("bad rational literal: '" + s + "'");
    if (q.get_den() == 0) throw ValidationError("zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_from_double(double d) {
    if (!std::isfinite(d)) throw ValidationError("non-finite number in input");
    return Rat(d);
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_d(const Rat& q) { return q.get_d(); }

// floor(num/den) for a rational that may be negative.
inline Int rat_floor(const Rat& q) {
    Int out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

inline Int rat_ceil(const Rat& q) {
    Int out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

// If x has an exact integer k-th root, store it in `root` and return true.
inline bool exact_kth_root(const Int& x, unsigned long k, Int& root) {
    if (sgn(x) < 0) return false;
    int exactp = mpz_root(root.get_mpz_t(), x.get_mpz_t(), k);
    return exactp != 0;
}

}  // namespace contractlab
