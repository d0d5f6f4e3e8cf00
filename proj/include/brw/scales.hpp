#pragma once
#include <vector>

namespace brw {

// Doubly-exponential scale tables used by the slow-vertex (lower) and
// all-fast (upper) experiments.  Values explode fast; entries that leave
// double range are flagged rather than silently becoming inf.

struct LowerScales {
    double M = 2.0;
    double delta = 0.1;
    std::vector<double> n;  // n_k = M^{(3/2+d)^k},           k = 1..k_max
    std::vector<double> p;  // p_k = M^{-d (3/2+d)^{k-1} / 2}
    std::vector<double> R;  // R_k = sum_{j=0}^{k-1} M^{(1/2+d)(3/2+d)^j}
    bool overflow = false;
};
LowerScales lower_scales(double M, double delta, int k_max);

struct UpperScales {
    double a = 0.1;
    double delta = 1.0;
    std::vector<double> N;  // N_k = e^{(3/2)^k} / (d^2 a^2), k = 1..k_max
    std::vector<double> R;  // R_k = sum_{j=1}^{k-1} a sqrt(N_j); R_1 = 0
    bool invariant_ok = true;  // R_k + k <= 2 a sqrt(N_{k-1}) for k >= 2
    bool overflow = false;
};
UpperScales upper_scales(double a, double delta, int k_max);

} // namespace brw
