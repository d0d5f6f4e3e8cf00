#include "brw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace brw {

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double sum = 0;
    s.min = s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / double(s.n);
    if (s.n >= 2) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.var = ss / double(s.n - 1);
        s.se = std::sqrt(s.var / double(s.n));
    }
    return s;
}

WilsonCI wilson(uint64_t k, uint64_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    if (k > n) throw std::invalid_argument("wilson: k > n");
    const double nn = double(n);
    const double p = double(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = p + z2 / (2.0 * nn);
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    WilsonCI ci;
    ci.lo = std::max(0.0, (center - half) / denom);
    ci.hi = std::min(1.0, (center + half) / denom);
    return ci;
}

SampleComparison compare_samples(const std::vector<int64_t>& a,
                                 const std::vector<int64_t>& b) {
    SampleComparison out;
    const double na = double(a.size()), nb = double(b.size());
    if (a.empty() || b.empty())
        throw std::invalid_argument("compare_samples: empty sample");

    std::map<int64_t, std::pair<uint64_t, uint64_t>> counts;
    for (int64_t v : a) counts[v].first++;
    for (int64_t v : b) counts[v].second++;

    const double close_at = std::max(10.0, (na + nb) / 60.0);
    std::vector<std::pair<uint64_t, uint64_t>> binned;
    uint64_t ca = 0, cb = 0;
    for (auto& [v, c] : counts) {
        (void)v;
        ca += c.first;
        cb += c.second;
        if (double(ca + cb) >= close_at) {
            binned.emplace_back(ca, cb);
            ca = cb = 0;
        }
    }
    if (ca + cb > 0) {
        // fold the short tail into the last bin so none is under-filled
        if (!binned.empty()) {
            binned.back().first += ca;
            binned.back().second += cb;
        } else {
            binned.emplace_back(ca, cb);
        }
    }

    out.bins = binned.size();
    for (auto& [xa, xb] : binned)
        out.tv += std::abs(double(xa) / na - double(xb) / nb);
    out.tv *= 0.5;

    if (binned.size() < 2) {
        out.df = 0;
        out.p = 1.0;
        return out;
    }
    const double total = na + nb;
    double chi2 = 0;
    for (auto& [xa, xb] : binned) {
        const double pooled = double(xa + xb);
        const double ea = pooled * na / total;
        const double eb = pooled * nb / total;
        chi2 += (double(xa) - ea) * (double(xa) - ea) / ea;
        chi2 += (double(xb) - eb) * (double(xb) - eb) / eb;
    }
    out.chi2 = chi2;
    out.df = int(binned.size()) - 1;
    out.p = boost::math::gamma_q(double(out.df) / 2.0, chi2 / 2.0);
    return out;
}

} // namespace brw
