#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcb::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

inline constexpr double kAbsTol = 1e-10;
inline constexpr double kRelTol = 1e-12;
inline constexpr unsigned kMaxDepth = 30;

// Adaptive Gauss-Kronrod (15 points) on a finite interval, refined until the
// error estimate is below kRelTol relative to the L1 norm. For the O(1)
// integrals used here that is well inside kAbsTol.
template <class F>
Result integrate(F&& f, double a, double b) {
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("quad::integrate: need finite a <= b");
    if (a == b) return {};
    // Integrate over the unit interval: the library's stopping rule compares
    // an error estimate that ignores the interval length, which never
    // converges on very short intervals.
    const double w = b - a;
    auto g = [&f, a, w](double s) { return f(a + w * s); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, kMaxDepth, kRelTol, &err);
    return {w * v, w * err};
}

// Integral over [a, inf). The tail beyond max(a, 1) is mapped to a finite
// interval with y = 1/t, so integrands decaying like y^-2 or faster stay
// bounded near t = 0.
template <class F>
Result integrate_to_infinity(F&& f, double a) {
    if (!(a >= 0.0) || !std::isfinite(a))
        throw std::invalid_argument("quad::integrate_to_infinity: need finite a >= 0");
    Result head;
    const double split = std::max(a, 1.0);
    if (a < split) head = integrate(f, a, split);
    auto g = [&f](double t) { return f(1.0 / t) / (t * t); };
    Result tail = integrate(g, 0.0, 1.0 / split);
    return {head.value + tail.value, head.error + tail.error};
}

// Integral over [a, b] where b may be +inf.
template <class F>
Result integrate_range(F&& f, double a, double b) {
    if (std::isinf(b)) return integrate_to_infinity(f, a);
    return integrate(f, a, b);
}

}  // namespace mcb::quad
