#include "brw/pakes.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace brw {

// x csch x has a removable singularity at 0; below |x| = 0.1 the series
// 1 - x^2/6 + 7x^4/360 - 31x^6/15120 + 127x^8/604800 is good to ~1e-19,
// above it 2x e^{-x}/(1 - e^{-2x}) is stable (never forms sinh directly).

long double pakes_transform(long double theta, long double sigma2) {
    if (theta < 0.0L) throw std::invalid_argument("theta must be >= 0");
    if (sigma2 <= 0.0L) throw std::invalid_argument("sigma2 must be > 0");
    if (theta == 0.0L) return 1.0L;
    long double x = sqrtl(2.0L * sigma2 * theta);
    if (x < 0.1L) {
        long double x2 = x * x;
        return 1.0L + x2 * (-1.0L / 6.0L
                     + x2 * (7.0L / 360.0L
                     + x2 * (-31.0L / 15120.0L
                     + x2 * (127.0L / 604800.0L))));
    }
    long double e = expl(-x);
    return 2.0L * x * e / (1.0L - e * e);
}

using cd = std::complex<double>;

// 1 - phi(s) on the Bromwich contour (Re s > 0); the subtraction is done
// in series form near 0 where 1 - phi would cancel to noise.
static cd one_minus_phi(cd s, double sigma2) {
    cd x = std::sqrt(2.0 * sigma2 * s);
    if (std::abs(x) < 0.1) {
        cd x2 = x * x;
        return x2 * (1.0 / 6.0
              + x2 * (-7.0 / 360.0
              + x2 * (31.0 / 15120.0
              + x2 * (-127.0 / 604800.0))));
    }
    cd e = std::exp(-x);
    return 1.0 - 2.0 * x * e / (1.0 - e * e);
}

// Euler-accelerated Bromwich/Fourier inversion (Abate–Whitt style) of the
// ordinary transform G^(s) = (1 - phi(s))/s of the tail G(v) = 1 - F(v).
// A = 18.4 puts the discretization error near 1e-8; 30 base terms plus a
// 15-term binomial average handle the alternating series.
double pakes_tail(double gamma, double sigma2, double* err_est) {
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be > 0");
    if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be > 0");

    constexpr int kBase = 30;
    constexpr int kEuler = 15;
    constexpr double kA = 18.4;
    const double t = gamma;

    std::array<double, kBase + kEuler + 1> psum{};
    double run = 0.5 * (one_minus_phi(cd(kA / (2.0 * t), 0.0), sigma2)
                        / cd(kA / (2.0 * t), 0.0)).real();
    psum[0] = run;
    double sign = -1.0;
    for (int k = 1; k <= kBase + kEuler; ++k) {
        cd s(kA / (2.0 * t), k * M_PI / t);
        run += sign * (one_minus_phi(s, sigma2) / s).real();
        psum[size_t(k)] = run;
        sign = -sign;
    }

    // binomial weights C(kEuler, j) / 2^kEuler
    std::array<double, kEuler + 1> w{};
    w[0] = std::pow(0.5, kEuler);
    for (int j = 0; j < kEuler; ++j) w[size_t(j + 1)] = w[size_t(j)] * double(kEuler - j) / double(j + 1);

    auto euler_at = [&](int n) {
        double acc = 0;
        for (int j = 0; j <= kEuler; ++j) acc += w[size_t(j)] * psum[size_t(n + j)];
        return acc;
    };

    const double scale = std::exp(kA / 2.0) / t;
    double val = scale * euler_at(kBase);
    double prev = scale * euler_at(kBase - 1);
    double err = std::abs(val - prev) + std::exp(-kA);
    if (err_est) *err_est = err;
    if (err > 1e-6) {
        std::ostringstream msg;
        msg << "Euler acceleration did not converge at gamma=" << gamma
            << " sigma2=" << sigma2 << " (err est " << err << "); last partial sums:";
        for (int k = kBase + kEuler - 2; k <= kBase + kEuler; ++k)
            msg << ' ' << scale * psum[size_t(k)];
        throw std::runtime_error(msg.str());
    }
    if (val < 0.0) val = 0.0;
    if (val > 1.0) val = 1.0;
    return val;
}

// ----- quadrature ------------------------------------------------------------

// 16-point Gauss-Legendre nodes/weights on [-1,1], built once by Newton on
// the Legendre recurrence (cheaper to generate than to transcribe).
struct GL16 {
    std::array<double, 16> x{}, w{};
    GL16() {
        const int n = 16;
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                double dx = p1 / dp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            x[size_t(i)] = xi;
            w[size_t(i)] = 2.0 / ((1.0 - xi * xi) * dp * dp);
        }
    }
};

static const GL16& gl16() {
    static GL16 g;
    return g;
}

// integrate f over [0, hi] in nseg equal panels
template <class F>
static double integrate(F f, double hi, int nseg) {
    const GL16& g = gl16();
    double total = 0;
    double h = hi / nseg;
    for (int s = 0; s < nseg; ++s) {
        double mid = (s + 0.5) * h, half = 0.5 * h;
        double acc = 0;
        for (int i = 0; i < 16; ++i) acc += g.w[size_t(i)] * f(mid + half * g.x[size_t(i)]);
        total += acc * half;
    }
    return total;
}

double pakes_mean(double sigma2) {
    // tail decays like e^{-pi^2 v / (2 sigma^2)}; [0, 8 sigma^2] leaves < 1e-16
    return integrate([&](double g) { return pakes_tail(g, sigma2); }, 8.0 * sigma2, 32);
}

double pakes_second_moment(double sigma2) {
    return integrate([&](double g) { return 2.0 * g * pakes_tail(g, sigma2); },
                     8.0 * sigma2, 32);
}

double pakes_retransform(double theta, double sigma2) {
    if (!(theta > 0)) throw std::invalid_argument("theta must be > 0");
    double I = integrate([&](double g) { return std::exp(-theta * g) * pakes_tail(g, sigma2); },
                         8.0 * sigma2, 32);
    return 1.0 - theta * I;
}

double chernoff_rhs(double ex) {
    if (ex < 0) throw std::invalid_argument("expected value must be >= 0");
    return std::exp(-ex / 8.0);
}

} // namespace brw
