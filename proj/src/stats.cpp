#include "mcb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcb {

void Accumulator::add(double v) {
    ++n_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
}

double Accumulator::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

Estimate Accumulator::estimate() const {
    Estimate e;
    e.n = n_;
    e.mean = mean_;
    e.se = n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    return e;
}

ComplexEstimate ComplexAccumulator::estimate() const {
    ComplexEstimate e;
    e.n = re_.count();
    e.mean = {re_.mean(), im_.mean()};
    if (e.n > 1) e.se = std::sqrt((re_.variance() + im_.variance()) / static_cast<double>(e.n));
    return e;
}

Estimate summarize(std::span<const double> xs) {
    Accumulator acc;
    for (double v : xs) acc.add(v);
    return acc.estimate();
}

ComplexEstimate summarize(std::span<const Complex> xs) {
    ComplexAccumulator acc;
    for (const auto& v : xs) acc.add(v);
    return acc.estimate();
}

Estimate difference(const Estimate& a, const Estimate& b) {
    Estimate d;
    d.mean = a.mean - b.mean;
    d.se = std::hypot(a.se, b.se);
    d.n = std::min(a.n, b.n);
    return d;
}

namespace {

double sorted_quantile(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return s[lo] + frac * (s[hi] - s[lo]);
}

}  // namespace

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
    std::sort(xs.begin(), xs.end());
    return sorted_quantile(xs, q);
}

QuantileEstimate quantile_with_se(std::vector<double> xs, double q) {
    if (xs.size() < 2) throw std::invalid_argument("quantile_with_se: need at least two values");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const double w = std::sqrt(q * (1.0 - q) / n);
    QuantileEstimate out;
    out.value = sorted_quantile(xs, q);
    out.se = 0.5 * (sorted_quantile(xs, std::min(1.0, q + w)) - sorted_quantile(xs, std::max(0.0, q - w)));
    return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::stable_sort(x.begin(), x.end());
    std::stable_sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        // Consume every copy of v from both samples before comparing, so
        // ties never create a spurious gap.
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.0) {
        // Small-x form converges faster there.
        const double c = std::sqrt(2.0 * M_PI) / x;
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double a = (2.0 * k - 1.0) * M_PI / x;
            s += std::exp(-a * a / 8.0);
        }
        return c * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return 1.0 - 2.0 * s;
}

double ks_coefficient(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_coefficient: alpha must lie in (0, 1)");
    return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    if (n == 0 || m == 0) throw std::invalid_argument("ks_critical_value: empty sample");
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    return ks_coefficient(alpha) * std::sqrt((dn + dm) / (dn * dm));
}

}  // namespace mcb
