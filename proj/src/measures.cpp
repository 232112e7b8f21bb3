#include "mcb/measures.hpp"

#include "mcb/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double axis1_density(double y) {
    const double d = (1.0 - y) * (1.0 + y);
    return (4.0 / kPi) * y / (d * d);
}

double axis2_density(double y) {
    const double d = 1.0 + y * y;
    return (4.0 / kPi) * y / (d * d);
}

}  // namespace

std::string to_string(const BoundaryPoint& p) {
    switch (p.kind()) {
        case PointKind::Type1: return "(Type1, " + std::to_string(p.magnitude()) + ")";
        case PointKind::Type2: return "(Type2, " + std::to_string(p.magnitude()) + ")";
        default: return "(Origin)";
    }
}

double nu_density(const JumpMark& mark) {
    if (!(mark.value >= 0.0)) throw std::invalid_argument("nu_density: value must be nonnegative");
    if (mark.axis == Axis::Axis2) return axis2_density(mark.value);
    if (mark.value == 1.0) throw std::domain_error("nu_density: pole of the Axis1 density at y1 = 1");
    return axis1_density(mark.value);
}

double nu_interval_mass(Axis axis, double a, double b) {
    if (!(a >= 0.0 && a < b)) throw std::invalid_argument("nu_interval_mass: need 0 <= a < b");
    if (axis == Axis::Axis2) {
        if (std::isinf(b)) return (2.0 / kPi) / (1.0 + a * a);
        return (2.0 / kPi) * (b - a) * (b + a) / ((1.0 + a * a) * (1.0 + b * b));
    }
    if (a <= 1.0 && b >= 1.0) throw std::domain_error("nu_interval_mass: Axis1 interval reaches the pole at 1");
    if (b < 1.0) return (2.0 / kPi) * (b - a) * (b + a) / ((1.0 - a * a) * (1.0 - b * b));
    if (std::isinf(b)) return (2.0 / kPi) / ((a - 1.0) * (a + 1.0));
    return (2.0 / kPi) * (b - a) * (b + a) / ((a - 1.0) * (a + 1.0) * (b - 1.0) * (b + 1.0));
}

double nu_axis1_complement_mass(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("nu_axis1_complement_mass: eps must be positive");
    if (eps < 1.0) return (8.0 / kPi) / (eps * (4.0 - eps * eps)) - 2.0 / kPi;
    return (2.0 / kPi) / (eps * (2.0 + eps));
}

double nu_axis2_tail_mass(double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("nu_axis2_tail_mass: eps must be nonnegative");
    return (2.0 / kPi) / (1.0 + eps * eps);
}

double nu_truncated_second_moment(Axis axis, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("nu_truncated_second_moment: x must be positive");
    if (axis == Axis::Axis1) {
        if (std::isinf(x)) return kInf;
        return (4.0 / kPi) * (std::log1p(x) - x / (1.0 + x));
    }
    if (std::isinf(x)) return kInf;
    const double x2 = x * x;
    return (2.0 / kPi) * (std::log1p(x2) - x2 / (1.0 + x2));
}

double nu_window_second_moment(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("nu_window_second_moment: delta must lie in (0, 1)");
    return (4.0 / kPi) * (std::log((2.0 + delta) / (2.0 - delta)) - 2.0 * delta / (4.0 - delta * delta));
}

double nu_mean_axis2() { return 1.0; }

double nu_mean_axis2_quadrature() {
    auto f = [](double y) { return y * axis2_density(y); };
    return quad::integrate(f, 0.0, 1.0).value + quad::integrate_to_infinity(f, 1.0).value;
}

double nu_pv_mean_axis1(const TruncationWindow& window) {
    // f(u) + f(-u) with f(u) = (1+u)/(u(2+u)^2) simplifies to 2u^2/(4-u^2)^2;
    // the simplified form avoids cancelling two O(1/u) terms near u = 0.
    auto g = [](double u) {
        const double d = 4.0 - u * u;
        return (4.0 / kPi) * 2.0 * u * u / (d * d);
    };
    return quad::integrate(g, 0.0, window.delta()).value;
}

double nu_pv_mean_axis1_full() { return 2.0 / kPi; }

RestrictedNu::RestrictedNu(TruncationWindow window)
    : window_(window),
      mass_low_(nu_interval_mass(Axis::Axis1, 0.0, 1.0 - window.delta())),
      mass_high_(nu_interval_mass(Axis::Axis1, 1.0 + window.delta(), kInf)),
      first_moment_axis1_(nu_pv_mean_axis1_full() - nu_pv_mean_axis1(window)) {}

double nu_axis2_inverse(double v) { return std::sqrt(v / (kAxis2Mass - v)); }

double nu_axis1_low_inverse(double v) {
    const double r = v / (2.0 / kPi);
    return std::sqrt(r / (1.0 + r));
}

double nu_axis1_high_inverse(double v) { return std::sqrt(1.0 + (2.0 / kPi) / v); }

JumpMark RestrictedNu::sample(Rng& rng) const {
    const double pick = rng.uniform() * total_mass();
    const double u = rng.uniform();
    if (pick < kAxis2Mass) return {Axis::Axis2, nu_axis2_inverse(u * kAxis2Mass)};
    if (pick < kAxis2Mass + mass_low_) return {Axis::Axis1, nu_axis1_low_inverse(u * mass_low_)};
    return {Axis::Axis1, nu_axis1_high_inverse(u * mass_high_)};
}

JumpMark sample_nu(const TruncationWindow& window, Rng& rng) { return RestrictedNu(window).sample(rng); }

Vec2 jump_displacement(const BoundaryPoint& x, const JumpMark& mark) {
    const double m = x.magnitude();
    if (x.is_origin()) return {};
    double own = 0.0;
    double other = 0.0;
    if (mark.axis == Axis::Axis1) {
        own = (mark.value - 1.0) * m;
    } else {
        own = -m;
        other = mark.value * m;
    }
    return x.type() == 1 ? Vec2{own, other} : Vec2{other, own};
}

BoundPair large_jump_first_moment_bound(const BoundaryPoint& x, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("large_jump_first_moment_bound: scale must be positive");
    if (x.is_origin()) return {0.0, 0.0};
    const double c = scale * x.magnitude();
    BoundPair out;
    out.rhs = 8.0 * x.magnitude() * x.magnitude() * scale * scale;

    auto above = [](double y) { return (y - 1.0) * axis1_density(y); };
    auto below = [](double y) { return (1.0 - y) * axis1_density(y); };
    auto cross = [](double y) { return std::sqrt(1.0 + y * y) * axis2_density(y); };

    double lhs = quad::integrate_to_infinity(above, 1.0 + 1.0 / c).value;
    if (c > 1.0) lhs += quad::integrate(below, 0.0, 1.0 - 1.0 / c).value;
    const double y0 = c >= 1.0 ? 0.0 : std::sqrt(1.0 / (c * c) - 1.0);
    lhs += quad::integrate_to_infinity(cross, y0).value;
    out.lhs = c * lhs;
    return out;
}

BoundPair jump_tail_bound_check(double L) {
    if (!(L > 0.0)) throw std::invalid_argument("jump_tail_bound_check: L must be positive");
    double mass = nu_interval_mass(Axis::Axis1, 1.0 + L, kInf);
    if (L < 1.0) mass += nu_interval_mass(Axis::Axis1, 0.0, 1.0 - L);
    mass += L <= 1.0 ? kAxis2Mass : nu_interval_mass(Axis::Axis2, std::sqrt(L * L - 1.0), kInf);
    return {mass, 2.0 / (L * L)};
}

BoundaryPoint harmonic_sample(const QuadrantPoint& x, Rng& rng) {
    if (!x.interior()) return BoundaryPoint::from_quadrant(x);
    // w = z^2 maps the quadrant onto the upper half-plane; the exit law from
    // w = a + ib is Cauchy with center a and scale b.
    const double a = (x.x1 - x.x2) * (x.x1 + x.x2);
    const double b = 2.0 * x.x1 * x.x2;
    const double u = a + b * std::tan(kPi * (rng.uniform() - 0.5));
    return u >= 0.0 ? BoundaryPoint::type1(std::sqrt(u)) : BoundaryPoint::type2(std::sqrt(-u));
}

double harmonic_type1_probability(const QuadrantPoint& x) {
    if (!x.interior()) return x.x1 > 0.0 ? 1.0 : 0.0;
    const double a = (x.x1 - x.x2) * (x.x1 + x.x2);
    const double b = 2.0 * x.x1 * x.x2;
    return 0.5 + std::atan(a / b) / kPi;
}

double harmonic_pth_moment_exact(const QuadrantPoint& x, double p, int i) {
    if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("harmonic_pth_moment_exact: p must lie in (0, 2)");
    if (i != 1 && i != 2) throw std::invalid_argument("harmonic_pth_moment_exact: i must be 1 or 2");
    if (!x.interior()) return std::pow(i == 1 ? x.x1 : x.x2, p);
    const double a = (x.x1 - x.x2) * (x.x1 + x.x2);
    const double b = 2.0 * x.x1 * x.x2;
    // Exit point u = a + b tan(phi) with phi uniform on (-pi/2, pi/2).
    // Type 1 needs u > 0, i.e. phi > phi0; type 2 needs phi < phi0.
    const double phi0 = std::atan(-a / b);
    boost::math::quadrature::tanh_sinh<double> ts;
    double v = 0.0;
    if (i == 1) {
        auto f = [&](double psi) {  // psi = pi/2 - phi, tan(phi) = cot(psi)
            const double u = a + b / std::tan(psi);
            return u > 0.0 ? std::pow(u, 0.5 * p) : 0.0;
        };
        v = ts.integrate(f, 0.0, 0.5 * kPi - phi0);
    } else {
        auto f = [&](double psi) {  // psi = phi + pi/2, tan(phi) = -cot(psi)
            const double u = a - b / std::tan(psi);
            return u < 0.0 ? std::pow(-u, 0.5 * p) : 0.0;
        };
        v = ts.integrate(f, 0.0, phi0 + 0.5 * kPi);
    }
    return v / kPi;
}

MomentEstimate harmonic_pth_moment(const QuadrantPoint& x, double p, int i, std::size_t n_samples, Rng& rng) {
    if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("harmonic_pth_moment: p must lie in (0, 2)");
    if (i != 1 && i != 2) throw std::invalid_argument("harmonic_pth_moment: i must be 1 or 2");
    if (n_samples < 2) throw std::invalid_argument("harmonic_pth_moment: need at least two samples");
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double v = std::pow(harmonic_sample(x, rng).coordinate(i), p);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(n_samples);
    MomentEstimate out;
    out.n = n_samples;
    out.estimate = sum / n;
    const double var = std::max(0.0, (sum2 - n * out.estimate * out.estimate) / (n - 1.0));
    out.se = std::sqrt(var / n);
    out.bound = 2.0 / (2.0 - p) * (std::pow(x.x1, p) + std::pow(x.x2, p));
    return out;
}

}  // namespace mcb
