#include "vgreg/chi2.hpp"

#include <cmath>
#include <limits>

#include "vgreg/errors.hpp"

namespace vgreg {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 1000;

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by modified Lentz continued fraction.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw InvalidArgument("incomplete gamma needs a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double chi2_cdf(double x, int dof) {
    if (dof < 1) throw InvalidArgument("chi-square needs dof >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double p, int dof) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("chi-square quantile needs 0 < p < 1");
    if (dof < 1) throw InvalidArgument("chi-square quantile needs dof >= 1");

    const double k = static_cast<double>(dof);
    double lo = 0.0;
    double hi = std::max(1.0, k);
    while (chi2_cdf(hi, dof) < p) {
        lo = hi;
        hi *= 2.0;
    }
    // Density of chi2(dof) at x, for Newton steps.
    auto pdf = [&](double x) {
        return std::exp((0.5 * k - 1.0) * std::log(x) - 0.5 * x - 0.5 * k * std::log(2.0) -
                        std::lgamma(0.5 * k));
    };

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = chi2_cdf(x, dof) - p;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x; else hi = x;
        const double slope = pdf(x);
        double next = x - f / slope;
        if (!(slope > 0.0) || !std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x) ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            return next;
        }
        x = next;
    }
    return x;
}

}  // namespace vgreg
