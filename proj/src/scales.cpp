#include "brw/scales.hpp"

#include <cmath>
#include <stdexcept>

namespace brw {

LowerScales lower_scales(double M, double delta, int k_max) {
    if (!(M > 1.0)) throw std::invalid_argument("lower_scales: M must be > 1");
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("lower_scales: delta must lie in (0, 1/4)");
    if (k_max < 1) throw std::invalid_argument("lower_scales: k_max must be >= 1");

    LowerScales t;
    t.M = M;
    t.delta = delta;
    const long double g = 1.5L + (long double)delta;
    const long double lm = std::log((long double)M);
    long double gk = g;  // g^k, starting at k = 1
    long double Rsum = std::exp((0.5L + (long double)delta) * lm);  // j = 0 term
    for (int k = 1; k <= k_max; ++k) {
        const long double nk = std::exp(gk * lm);
        const long double pk = std::exp(-(long double)delta * (gk / g) * lm / 2.0L);
        t.n.push_back(double(nk));
        t.p.push_back(double(pk));
        t.R.push_back(double(Rsum));
        if (!std::isfinite(double(nk)) || !std::isfinite(double(Rsum))) t.overflow = true;
        Rsum += std::exp((0.5L + (long double)delta) * gk * lm);  // j = k term for R_{k+1}
        gk *= g;
    }
    return t;
}

UpperScales upper_scales(double a, double delta, int k_max) {
    if (!(a > 0.0)) throw std::invalid_argument("upper_scales: a must be > 0");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("upper_scales: delta must lie in (0, 1]");
    if (k_max < 1) throw std::invalid_argument("upper_scales: k_max must be >= 1");

    UpperScales t;
    t.a = a;
    t.delta = delta;
    const long double denom = (long double)delta * delta * (long double)a * a;
    long double ek = 1.5L;  // (3/2)^k
    long double Rsum = 0.0L;
    for (int k = 1; k <= k_max; ++k) {
        const long double Nk = std::exp(ek) / denom;
        t.N.push_back(double(Nk));
        t.R.push_back(double(Rsum));
        if (!std::isfinite(double(Nk)) || !std::isfinite(double(Rsum))) t.overflow = true;
        if (k >= 2) {
            const long double lhs = Rsum + (long double)k;
            const long double rhs = 2.0L * a * std::sqrt((long double)t.N[size_t(k) - 2]);
            if (!(lhs <= rhs)) t.invariant_ok = false;
        }
        Rsum += (long double)a * std::sqrt(Nk);
        ek *= 1.5L;
    }
    return t;
}

} // namespace brw
