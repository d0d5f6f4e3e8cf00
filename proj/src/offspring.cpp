#include "brw/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace brw {

OffspringDist OffspringDist::deterministic(uint64_t n) {
    OffspringDist o;
    o.kind_ = OffKind::deterministic;
    o.det_n_ = n;
    o.mean_ = double(n);
    o.var_ = 0.0;
    return o;
}

OffspringDist OffspringDist::poisson(double mean) {
    if (!(mean > 0)) throw std::invalid_argument("poisson mean must be > 0");
    OffspringDist o;
    o.kind_ = OffKind::poisson;
    o.lambda_ = mean;
    o.mean_ = mean;
    o.var_ = mean;
    return o;
}

OffspringDist OffspringDist::geometric(double mean) {
    if (!(mean > 0)) throw std::invalid_argument("geometric mean must be > 0");
    OffspringDist o;
    o.kind_ = OffKind::geometric;
    o.geo_mean_ = mean;
    o.mean_ = mean;
    o.var_ = mean * (mean + 1.0);
    return o;
}

OffspringDist OffspringDist::table(std::vector<double> pmf) {
    if (pmf.empty()) throw std::invalid_argument("empty offspring table");
    double tot = 0;
    for (double p : pmf) {
        if (p < 0) throw std::invalid_argument("negative offspring probability");
        tot += p;
    }
    if (std::abs(tot - 1.0) > 1e-12)
        throw std::invalid_argument("offspring table does not sum to 1");
    OffspringDist o;
    o.kind_ = OffKind::table;
    o.pmf_ = std::move(pmf);
    double m1 = 0, m2 = 0;
    for (size_t j = 0; j < o.pmf_.size(); ++j) {
        m1 += double(j) * o.pmf_[j];
        m2 += double(j) * double(j) * o.pmf_[j];
    }
    o.mean_ = m1;
    o.var_ = m2 - m1 * m1;
    o.cdf_.resize(o.pmf_.size());
    std::partial_sum(o.pmf_.begin(), o.pmf_.end(), o.cdf_.begin());
    o.cdf_.back() = 1.0;  // guard against fp drift in sampling
    return o;
}

OffspringDist OffspringDist::make(const std::string& kind, int d,
                                  const std::vector<double>& table_pmf) {
    if (d < 2) throw std::invalid_argument("degree must be >= 2");
    OffspringDist o;
    if (kind == "det")          o = deterministic(uint64_t(d));
    else if (kind == "poisson") o = poisson(double(d));
    else if (kind == "geom")    o = geometric(double(d));
    else if (kind == "table")   o = table(table_pmf);
    else throw std::invalid_argument("unknown offspring kind: " + kind);
    if (std::abs(o.mean() - double(d)) > 1e-9)
        throw std::invalid_argument("offspring mean does not match degree");
    return o;
}

OffspringDist OffspringDist::parse(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("offspring spec needs kind:params, got " + spec);
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (kind == "det" || kind == "poisson" || kind == "geom") {
        int d = std::stoi(rest);
        return make(kind, d);
    }
    if (kind == "table") {
        // "0=0.5,6=0.5"
        std::vector<double> pmf;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("bad table entry: " + item);
            size_t j = std::stoul(item.substr(0, eq));
            double p = std::stod(item.substr(eq + 1));
            if (pmf.size() <= j) pmf.resize(j + 1, 0.0);
            pmf[j] = p;
        }
        return table(std::move(pmf));
    }
    throw std::invalid_argument("unknown offspring kind: " + kind);
}

std::string OffspringDist::spec_string() const {
    std::ostringstream ss;
    switch (kind_) {
        case OffKind::deterministic: ss << "det:" << det_n_; break;
        case OffKind::poisson:       ss << "poisson:" << lambda_; break;
        case OffKind::geometric:     ss << "geom:" << geo_mean_; break;
        case OffKind::table: {
            ss << "table:";
            bool first = true;
            for (size_t j = 0; j < pmf_.size(); ++j) {
                if (pmf_[j] == 0) continue;
                if (!first) ss << ',';
                ss << j << '=' << pmf_[j];
                first = false;
            }
            break;
        }
    }
    return ss.str();
}

double OffspringDist::pmf(uint64_t j) const {
    switch (kind_) {
        case OffKind::deterministic:
            return j == det_n_ ? 1.0 : 0.0;
        case OffKind::poisson: {
            double lp = -lambda_ + double(j) * std::log(lambda_) - std::lgamma(double(j) + 1.0);
            return std::exp(lp);
        }
        case OffKind::geometric:
            return std::exp(-std::log1p(geo_mean_)
                            + double(j) * (std::log(geo_mean_) - std::log1p(geo_mean_)));
        case OffKind::table:
            return j < pmf_.size() ? pmf_[j] : 0.0;
    }
    return 0.0;
}

long double OffspringDist::pgf(long double s) const {
    switch (kind_) {
        case OffKind::deterministic:
            return powl(s, (long double)det_n_);
        case OffKind::poisson:
            return expl((long double)lambda_ * (s - 1.0L));
        case OffKind::geometric:
            return 1.0L / (1.0L + (long double)geo_mean_ * (1.0L - s));
        case OffKind::table: {
            // Horner, highest power first
            long double acc = 0.0L;
            for (size_t j = pmf_.size(); j-- > 0;)
                acc = acc * s + (long double)pmf_[j];
            return acc;
        }
    }
    return 0.0L;
}

long double OffspringDist::survival_step(long double q) const {
    // 1 - f(1-q).  Forming 1-q and subtracting from 1 loses all precision
    // once q ~ 1e-12 (the regime the Kolmogorov check lives in), so each
    // kind gets an expm1/log1p form that stays accurate down to q ~ 1e-300.
    if (q <= 0.0L) return 0.0L;
    if (q >= 1.0L) q = 1.0L;
    switch (kind_) {
        case OffKind::deterministic:
            // 1 - (1-q)^n
            return -expm1l((long double)det_n_ * log1pl(-q));
        case OffKind::poisson:
            // 1 - e^{-lambda q}
            return -expm1l(-(long double)lambda_ * q);
        case OffKind::geometric:
            // 1 - 1/(1+mq) = mq/(1+mq)
            return (long double)geo_mean_ * q / (1.0L + (long double)geo_mean_ * q);
        case OffKind::table: {
            // sum_j p_j (1 - (1-q)^j)
            long double l = log1pl(-q);
            long double acc = 0.0L;
            for (size_t j = 1; j < pmf_.size(); ++j)
                if (pmf_[j] != 0) acc += (long double)pmf_[j] * (-expm1l((long double)j * l));
            return acc;
        }
    }
    return 0.0L;
}

OffspringDist OffspringDist::thin(double p) const {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("thinning p must be in (0,1]");
    switch (kind_) {
        case OffKind::deterministic: {
            // Binomial(n, p) table
            uint64_t n = det_n_;
            if (n > 100000) throw std::invalid_argument("deterministic too large to thin");
            std::vector<double> pmf(n + 1);
            double cur = std::pow(1.0 - p, double(n));
            for (uint64_t i = 0; i <= n; ++i) {
                pmf[i] = cur;
                if (i < n) cur *= double(n - i) / double(i + 1) * p / (1.0 - p);
            }
            return table(std::move(pmf));
        }
        case OffKind::poisson:
            return poisson(lambda_ * p);
        case OffKind::geometric:
            // f(1-p+ps) = 1/(1 + mp(1-s)): geometric again, mean mp
            return geometric(geo_mean_ * p);
        case OffKind::table: {
            size_t n = pmf_.size();
            std::vector<double> out(n, 0.0);
            for (size_t j = 0; j < n; ++j) {
                if (pmf_[j] == 0) continue;
                // Binomial(j, p) row
                double cur = std::pow(1.0 - p, double(j));
                if (p == 1.0) cur = (j == 0) ? 1.0 : 0.0;
                for (size_t i = 0; i <= j; ++i) {
                    out[i] += pmf_[j] * cur;
                    if (i < j && p < 1.0)
                        cur *= double(j - i) / double(i + 1) * p / (1.0 - p);
                }
            }
            // renormalize away fp dust so table() accepts it
            double tot = std::accumulate(out.begin(), out.end(), 0.0);
            for (double& v : out) v /= tot;
            return table(std::move(out));
        }
    }
    throw std::logic_error("unreachable");
}

double OffspringDist::kappa(int d) const {
    return double(1.0L - pgf(1.0L / (long double)d));
}

SumResult OffspringDist::sample_sum(u128 n, Philox& rng,
                                    uint64_t n_exact, bool strict) const {
    SumResult r;
    if (n == 0) return r;
    switch (kind_) {
        case OffKind::deterministic: {
            // n * det_n_, exact at every n (saturation still flags)
            bool sat = false;
            r.value = sat_mul(n, det_n_, sat);
            r.approx = sat;
            if (sat && strict) throw StrictExactViolation("u128 saturation in deterministic sum");
            return r;
        }
        case OffKind::poisson: {
            if (n <= n_exact) {
                r.value = poisson_exact(rng, double(uint64_t(n)) * lambda_);
                return r;
            }
            if (strict) throw StrictExactViolation("poisson sum above exact threshold");
            long double mean = to_ld(n) * (long double)lambda_;
            long double sd = sqrtl(mean);
            bool sat = false;
            r.value = from_ld(mean + sd * (long double)rng.normal(), sat);
            r.approx = true;
            return r;
        }
        case OffKind::geometric: {
            if (n <= n_exact) {
                uint64_t nn = uint64_t(n);
                if (geo_mean_ == 1.0) {
                    // NB(n, 1/2) by scanning fair coin words; exact and fast,
                    // and this is the hot path of the critical-chain runs
                    r.value = rng.nb_half(nn);
                } else {
                    double q = 1.0 / (1.0 + geo_mean_);  // success prob
                    r.value = negbin_exact(rng, nn, q);
                }
                return r;
            }
            if (strict) throw StrictExactViolation("geometric sum above exact threshold");
            long double mean = to_ld(n) * (long double)geo_mean_;
            long double var = to_ld(n) * (long double)(geo_mean_ * (geo_mean_ + 1.0));
            bool sat = false;
            r.value = from_ld(mean + sqrtl(var) * (long double)rng.normal(), sat);
            r.approx = true;
            return r;
        }
        case OffKind::table: {
            // multinomial over the support via a chain of conditional
            // binomials, then weight by j; each stage is exact below the
            // threshold and Gaussian above it (binomial_u128 handles both)
            u128 remaining = n;
            double mass_left = 1.0;
            bool approx = false;
            u128 total = 0;
            bool sat = false;
            for (size_t j = 0; j < pmf_.size() && remaining > 0; ++j) {
                if (pmf_[j] == 0) continue;
                double pj = pmf_[j] / mass_left;
                u128 cnt;
                if (pj >= 1.0) {
                    cnt = remaining;
                } else {
                    cnt = binomial_u128(rng, remaining, pj, n_exact, approx, strict);
                }
                if (j > 0) {
                    u128 w = sat_mul(cnt, uint64_t(j), sat);
                    total = sat_add(total, w, sat);
                }
                remaining -= cnt;
                mass_left -= pmf_[j];
            }
            if (sat && strict) throw StrictExactViolation("u128 saturation in table sum");
            r.value = total;
            r.approx = approx || sat;
            return r;
        }
    }
    return r;
}

uint64_t OffspringDist::sample_one(Philox& rng) const {
    switch (kind_) {
        case OffKind::deterministic:
            return det_n_;
        case OffKind::poisson:
            return poisson_exact(rng, lambda_);
        case OffKind::geometric: {
            // inversion: floor(log(U) / log(m/(m+1)))
            double u = rng.uniform_pos();
            double g = std::floor(std::log(u) / (std::log(geo_mean_) - std::log1p(geo_mean_)));
            return g < 0 ? 0 : uint64_t(g);
        }
        case OffKind::table: {
            double u = rng.uniform();
            size_t lo = 0;
            while (lo + 1 < cdf_.size() && cdf_[lo] <= u) ++lo;
            return lo;
        }
    }
    return 0;
}

} // namespace brw
