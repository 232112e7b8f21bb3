#pragma once

#include "mcb/dynamics.hpp"
#include "mcb/geometry.hpp"
#include "mcb/random.hpp"
#include "mcb/stats.hpp"

#include <functional>
#include <span>
#include <vector>

namespace mcb {

// -(x1+x2)(y1+y2) + i(x1-x2)(y1-y2). Defined on all of R^2.
Complex lozenge(const Vec2& x, const Vec2& y);
// exp(lozenge(x, y)); underflows to 0 for large arguments.
Complex F(const Vec2& x, const Vec2& y);

// Fixed probe grids: boundary probes of magnitude 0.25, 1, 4 of each type,
// and the quadrant probes (1,0), (0,1), (1,1), (0.5,2).
std::vector<BoundaryPoint> boundary_probes();
std::vector<QuadrantPoint> quadrant_probes();

// Integral of f against Q_x by adaptive quadrature over the exit angle.
Complex harmonic_expectation(const QuadrantPoint& x, const std::function<Complex(const BoundaryPoint&)>& f);

// Monte Carlo estimate of (integral of F(., y) against Q_theta) - F(theta, y).
// Throws std::invalid_argument when y is not on an axis.
ComplexEstimate harmonicity_residual(const QuadrantPoint& theta, const QuadrantPoint& y, std::size_t n_samples,
                                     Rng& rng);

struct DualityMark {
    std::size_t site = 0;
    BoundaryPoint y;
};

struct DualityParams {
    SimParams sim;                 // scheme and step; horizon is ignored
    double t = 0.0;                // run-in time before the identity window
    double s = 0.0;                // window length
    bool theta_from_totals = true; // theta = Z_t per replica, else `theta`
    QuadrantPoint theta{0.0, 0.0};
    std::size_t replicas = 1000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct DualityResult {
    ComplexEstimate lhs;        // product of F(X_{t+s}(k_j), y_j)
    ComplexEstimate main;       // prod F(theta, y_j) F(X_t(k_j) - theta, e^{-s} y_j)
    ComplexEstimate remainder;  // integral term
    ComplexEstimate residual;   // lhs - main - remainder, paired per replica
    double remainder_bound = 0.0;
    double sup_mean_distance = 0.0;  // sup over the grid of E|Z - theta|_1
};

// Both sides of the approximate duality relation on shared replicas. Over a
// step [r, r+h] the remainder integrand is taken in the form
// Phi(r) * expm1((c' - c) (Z_r - theta) <> sum y), c = e^{r-s}, which is the
// exact one-step increment for HarmonicSplit and tends to the integral form
// as h -> 0.
DualityResult duality_residual(const SystemState& initial, const std::vector<DualityMark>& marks,
                               const DualityParams& params);

// Single-chain Monte Carlo of the backward recursion for G_k along the
// increasing grid `s_grid`.
ComplexEstimate g_k_evaluate(const QuadrantPoint& theta, std::span<const QuadrantPoint> z_list,
                             std::span<const double> s_grid, std::size_t n_samples, Rng& rng);

// G_2 for y1, y2 on the axes:
// F(theta, (1 - e) y2) * integral of F(theta, .) against Q_{y1 + e y2},
// e = exp(s1 - s2), evaluated by quadrature.
Complex g2_closed_form(const QuadrantPoint& theta, const BoundaryPoint& y1, const BoundaryPoint& y2, double s1,
                       double s2);

struct FddCheck {
    ComplexEstimate simulated;  // product of F(Y_{s_k}, z_k) along stationary paths
    ComplexEstimate recursion;  // g_k_evaluate
    Complex residual;
    double se = 0.0;            // combined
};

FddCheck stationary_fdd_check(const QuadrantPoint& theta, std::span<const double> s_grid,
                              std::span<const QuadrantPoint> z_list, std::size_t n_samples, Rng& rng);

}  // namespace mcb
