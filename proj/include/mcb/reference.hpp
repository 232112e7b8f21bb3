#pragma once

#include "mcb/geometry.hpp"
#include "mcb/path_record.hpp"
#include "mcb/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mcb {

struct DiffusionState {
    double z1 = 0.0;
    double z2 = 0.0;
};

// SplitExit: exact heat flow, then the catalytic noise run as a time-changed
// planar Brownian motion with exact absorption on the axes.
// EulerClamp: plain Euler-Maruyama with negative coordinates set to 0.
enum class GammaScheme { SplitExit, EulerClamp };

const char* to_string(GammaScheme s);

struct GammaParams {
    double gamma = 1.0;
    double h = 1e-3;
    std::uint64_t seed = 0;
    GammaScheme scheme = GammaScheme::SplitExit;
    std::size_t record_every = 1;

    void validate() const;
};

// First time a Brownian bridge from a > 0 to b over [0, T] hits 0, given
// that it does (b <= 0 forces a hit).
double bridge_exit_time(double a, double b, double T, Rng& rng);

// Runs dX = sqrt(gamma X1 X2) dW (no drift) for time dt starting at x. Sites
// that reach an axis stay there. Intrinsic-time substeps are capped at
// (kappa * min(x1, x2))^2; crossings inside a substep are detected with the
// Brownian-bridge crossing probability and placed at the exact bridge exit
// time.
QuadrantPoint catalytic_noise_advance(const QuadrantPoint& x, double gamma, double dt, Rng& rng,
                                      double kappa = 0.5);

// One step of size h of dX = (theta - X) dt + sqrt(gamma X1 X2) dW.
QuadrantPoint y_theta_gamma_step(const QuadrantPoint& y, const QuadrantPoint& theta, double gamma, double h,
                                 Rng& rng, GammaScheme scheme = GammaScheme::SplitExit);

// Advances the N-site finite-rate system in place to `horizon`.
void advance_mcb_gamma(std::vector<QuadrantPoint>& sites, const GammaParams& params, double horizon, Rng& rng);

// Totals path; the final configuration is stored as the last snapshot.
PathRecord simulate_mcb_gamma(std::span<const QuadrantPoint> initial, const GammaParams& params, double horizon);
PathRecord simulate_mcb_gamma(std::span<const QuadrantPoint> initial, const GammaParams& params, double horizon,
                              Rng& rng);

// Euler-Maruyama for dZ^i = sqrt((8/pi) Z1 Z2) dB^i with clamping at 0; the
// path is frozen once a coordinate reaches 0.
DiffusionState limit_diffusion_step(const DiffusionState& z, double h, Rng& rng);
DiffusionState advance_limit_diffusion(DiffusionState z, double h, double horizon, Rng& rng);
PathRecord simulate_limit_diffusion(const DiffusionState& z0, double h, double horizon, std::uint64_t seed,
                                    std::size_t record_every = 1);

// Exact transition of the limiting one-site process over time s.
BoundaryPoint y_theta_step(const BoundaryPoint& y, const QuadrantPoint& theta, double s, Rng& rng);

// Stationary path: first point from Q_theta, then exact transitions along
// the increasing grid `times`.
std::vector<BoundaryPoint> sample_stationary_path(const QuadrantPoint& theta, std::span<const double> times,
                                                  Rng& rng);

}  // namespace mcb
