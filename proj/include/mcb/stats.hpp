#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mcb {

using Complex = std::complex<double>;

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

struct ComplexEstimate {
    Complex mean{0.0, 0.0};
    // sqrt((var re + var im) / n)
    double se = 0.0;
    std::size_t n = 0;
};

// Welford accumulators.
class Accumulator {
public:
    void add(double v);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;
    Estimate estimate() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

class ComplexAccumulator {
public:
    void add(Complex v) {
        re_.add(v.real());
        im_.add(v.imag());
    }
    std::size_t count() const { return re_.count(); }
    ComplexEstimate estimate() const;

private:
    Accumulator re_;
    Accumulator im_;
};

Estimate summarize(std::span<const double> xs);
ComplexEstimate summarize(std::span<const Complex> xs);

// Difference of two independent estimates; se combined in quadrature.
Estimate difference(const Estimate& a, const Estimate& b);

// Empirical quantile (type 7, linear interpolation) of an unsorted sample.
double quantile(std::vector<double> xs, double q);

struct QuantileEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Quantile with a distribution-free standard error taken from the order
// statistics at q +- sqrt(q(1-q)/n).
QuantileEstimate quantile_with_se(std::vector<double> xs, double q);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::span<const double> a, std::span<const double> b);
// One-sample statistic against a continuous CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> xs, Cdf&& cdf);

// Limiting Kolmogorov distribution P(sqrt(n) D_n <= x).
double kolmogorov_cdf(double x);
// c(alpha) = sqrt(-log(alpha / 2) / 2)
double ks_coefficient(double alpha);
// Asymptotic two-sample critical value at level alpha.
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.01);

}  // namespace mcb

#include <algorithm>
#include <cmath>

template <class Cdf>
double mcb::ks_one_sample(std::vector<double> xs, Cdf&& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}
