#pragma once

#include "mcb/geometry.hpp"
#include "mcb/random.hpp"

#include <numbers>

namespace mcb {

inline constexpr double kPi = std::numbers::pi;
// Total mass of nu on Axis2.
inline constexpr double kAxis2Mass = 2.0 / kPi;

// Lebesgue density of nu on the axis named by the mark.
double nu_density(const JumpMark& mark);

// nu mass of the open interval (a, b) on one axis; b may be +inf.
// Intervals containing the Axis1 pole y1 = 1 have infinite mass and throw.
double nu_interval_mass(Axis axis, double a, double b);

// Axis1 mass outside (1 - eps, 1 + eps), both branches (eps < 1, eps >= 1).
double nu_axis1_complement_mass(double eps);
// Axis2 mass of (eps, inf).
double nu_axis2_tail_mass(double eps);

// Axis1: integral of (y1 - 1)^2 over (0, x). Axis2: integral of y2^2 over (0, x).
double nu_truncated_second_moment(Axis axis, double x);
// Integral of (y1 - 1)^2 over the excluded window (1 - delta, 1 + delta).
double nu_window_second_moment(double delta);

// Integral of y2 over Axis2; equals 1.
double nu_mean_axis2();
double nu_mean_axis2_quadrature();

// Principal value of the integral of (y1 - 1) over (1 - delta, 1 + delta).
double nu_pv_mean_axis1(const TruncationWindow& window);
// Principal value of the integral of (y1 - 1) over all of Axis1.
double nu_pv_mean_axis1_full();

// nu restricted to Axis2 and to Axis1 outside the window. Precomputes the
// masses and first moments used by samplers and compensators.
class RestrictedNu {
public:
    explicit RestrictedNu(TruncationWindow window = TruncationWindow{});

    const TruncationWindow& window() const { return window_; }
    double mass_axis1_low() const { return mass_low_; }
    double mass_axis1_high() const { return mass_high_; }
    double mass_axis1() const { return mass_low_ + mass_high_; }
    double mass_axis2() const { return kAxis2Mass; }
    double total_mass() const { return mass_axis1() + kAxis2Mass; }
    // Integral of (y1 - 1) over the restricted Axis1 part.
    double first_moment_axis1() const { return first_moment_axis1_; }

    JumpMark sample(Rng& rng) const;

private:
    TruncationWindow window_;
    double mass_low_;
    double mass_high_;
    double first_moment_axis1_;
};

JumpMark sample_nu(const TruncationWindow& window, Rng& rng);

// Closed-form inverse CDFs. Each maps v in (0, mass of the piece) to a point:
// Axis2 on (0, inf) counted from 0; Axis1 below the pole counted from 0;
// Axis1 above the pole counted from +inf downwards.
double nu_axis2_inverse(double v);
double nu_axis1_low_inverse(double v);
double nu_axis1_high_inverse(double v);

// Displacement J(y, x) for a mark y applied at a boundary point x.
Vec2 jump_displacement(const BoundaryPoint& x, const JumpMark& mark);

struct BoundPair {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const { return lhs <= rhs; }
};

// lhs = integral of s|J(y,x)| over {s|J(y,x)| > 1} against nu, rhs = 8|x|^2 s^2.
BoundPair large_jump_first_moment_bound(const BoundaryPoint& x, double scale);
// lhs = nu{|J(y,(1,0))| >= L}, rhs = 2/L^2.
BoundPair jump_tail_bound_check(double L);

// Exact draw from the exit law of planar Brownian motion from the open
// quadrant started at x.
BoundaryPoint harmonic_sample(const QuadrantPoint& x, Rng& rng);
// Probability that the exit point lies on the x1 axis.
double harmonic_type1_probability(const QuadrantPoint& x);
// Integral of y_i^p against the harmonic measure, by quadrature.
double harmonic_pth_moment_exact(const QuadrantPoint& x, double p, int i);

struct MomentEstimate {
    double estimate = 0.0;
    double se = 0.0;
    double bound = 0.0;
    std::size_t n = 0;
};

// Monte Carlo estimate of the integral of y_i^p against Q_x, with the bound
// 2/(2-p)(x1^p + x2^p).
MomentEstimate harmonic_pth_moment(const QuadrantPoint& x, double p, int i, std::size_t n_samples, Rng& rng);

}  // namespace mcb
