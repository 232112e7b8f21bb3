#include "mcb/reference.hpp"

#include "mcb/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcb {

const char* to_string(GammaScheme s) { return s == GammaScheme::SplitExit ? "split_exit" : "euler_clamp"; }

void GammaParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("GammaParams: gamma must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("GammaParams: h must be positive");
    if (record_every == 0) throw std::invalid_argument("GammaParams: record_every must be positive");
}

namespace {

// Michael, Schucany and Haas transformation sampler for IG(mu, lambda).
double inverse_gaussian(double mu, double lambda, Rng& rng) {
    const double nu = rng.normal();
    const double y = nu * nu;
    const double mu_y = mu * y;
    const double x = mu + mu * mu_y / (2.0 * lambda) - mu / (2.0 * lambda) * std::sqrt(4.0 * lambda * mu_y + mu_y * mu_y);
    return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
}

bool bridge_crosses(double a, double b, double T, Rng& rng) {
    if (b <= 0.0) return true;
    return rng.uniform() < std::exp(-2.0 * a * b / T);
}

}  // namespace

// With u = sigma / (T - sigma), u ~ IG(a/|b|, a^2/T);
// b = 0 is the Levy limit u = a^2 / (T xi^2).
double bridge_exit_time(double a, double b, double T, Rng& rng) {
    double u;
    if (b == 0.0) {
        const double xi = rng.normal();
        u = a * a / (T * xi * xi);
    } else {
        u = inverse_gaussian(a / std::abs(b), a * a / T, rng);
    }
    if (!std::isfinite(u)) return T;
    return T * u / (1.0 + u);
}

namespace {

std::size_t step_count(double horizon, double h) {
    if (horizon <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
}

}  // namespace

QuadrantPoint catalytic_noise_advance(const QuadrantPoint& x, double gamma, double dt, Rng& rng, double kappa) {
    if (!x.interior() || !(dt > 0.0) || !(gamma > 0.0)) return x;
    double c[2] = {x.x1, x.x2};
    double remaining = dt;
    for (std::size_t guard = 0; guard < 100000000; ++guard) {
        const double lo = std::min(c[0], c[1]);
        const double rate = gamma * c[0] * c[1];
        const double budget = rate * remaining;
        const double cap = kappa * kappa * lo * lo;
        const bool last = budget <= cap;
        const double T = last ? budget : cap;
        const double s = std::sqrt(T);
        const double e[2] = {c[0] + s * rng.normal(), c[1] + s * rng.normal()};

        double sigma = std::numeric_limits<double>::infinity();
        int hit = -1;
        for (int i = 0; i < 2; ++i) {
            if (!bridge_crosses(c[i], e[i], T, rng)) continue;
            const double t = bridge_exit_time(c[i], e[i], T, rng);
            if (t < sigma) {
                sigma = t;
                hit = i;
            }
        }
        if (hit >= 0) {
            const int o = 1 - hit;
            const double mean = c[o] + (e[o] - c[o]) * sigma / T;
            const double sd = std::sqrt(std::max(0.0, sigma * (T - sigma) / T));
            double out[2];
            out[hit] = 0.0;
            out[o] = std::max(0.0, mean + sd * rng.normal());
            return {out[0], out[1]};
        }
        c[0] = e[0];
        c[1] = e[1];
        if (last) break;
        remaining -= T / rate;
        if (remaining <= 0.0) break;
    }
    return {c[0], c[1]};
}

QuadrantPoint y_theta_gamma_step(const QuadrantPoint& y, const QuadrantPoint& theta, double gamma, double h,
                                 Rng& rng, GammaScheme scheme) {
    if (!(gamma > 0.0) || !(h > 0.0)) throw std::invalid_argument("y_theta_gamma_step: gamma and h must be positive");
    if (scheme == GammaScheme::EulerClamp) {
        const double sd = std::sqrt(gamma * y.x1 * y.x2 * h);
        const double a = y.x1 + (theta.x1 - y.x1) * h + sd * rng.normal();
        const double b = y.x2 + (theta.x2 - y.x2) * h + sd * rng.normal();
        return {std::max(a, 0.0), std::max(b, 0.0)};
    }
    const QuadrantPoint flowed = combine(std::exp(-h), y, -std::expm1(-h), theta);
    return catalytic_noise_advance(flowed, gamma, h, rng);
}

void advance_mcb_gamma(std::vector<QuadrantPoint>& sites, const GammaParams& params, double horizon, Rng& rng) {
    params.validate();
    const std::size_t steps = step_count(horizon, params.h);
    if (steps == 0 || sites.empty()) return;
    const double dt = horizon / static_cast<double>(steps);
    const double n = static_cast<double>(sites.size());
    for (std::size_t s = 0; s < steps; ++s) {
        QuadrantPoint mean{0.0, 0.0};
        for (const auto& p : sites) {
            mean.x1 += p.x1;
            mean.x2 += p.x2;
        }
        mean.x1 /= n;
        mean.x2 /= n;
        for (auto& p : sites) p = y_theta_gamma_step(p, mean, params.gamma, dt, rng, params.scheme);
    }
}

PathRecord simulate_mcb_gamma(std::span<const QuadrantPoint> initial, const GammaParams& params, double horizon) {
    Rng rng(params.seed);
    return simulate_mcb_gamma(initial, params, horizon, rng);
}

PathRecord simulate_mcb_gamma(std::span<const QuadrantPoint> initial, const GammaParams& params, double horizon,
                              Rng& rng) {
    params.validate();
    std::vector<QuadrantPoint> sites(initial.begin(), initial.end());
    auto totals = [&sites] {
        Vec2 z{0.0, 0.0};
        for (const auto& p : sites) z = z + p.vec();
        return sites.empty() ? z : (1.0 / static_cast<double>(sites.size())) * z;
    };
    PathRecord rec;
    rec.push(0.0, totals());
    const std::size_t steps = step_count(horizon, params.h);
    const double dt = steps ? horizon / static_cast<double>(steps) : 0.0;
    GammaParams one = params;
    for (std::size_t s = 1; s <= steps; ++s) {
        advance_mcb_gamma(sites, one, dt, rng);
        if (s % params.record_every == 0 || s == steps) rec.push(s == steps ? horizon : s * dt, totals());
    }
    for (const auto& p : sites) rec.max_coordinate = std::max({rec.max_coordinate, p.x1, p.x2});
    rec.snapshots.push_back({rec.times.back(), sites});
    return rec;
}

DiffusionState limit_diffusion_step(const DiffusionState& z, double h, Rng& rng) {
    if (z.z1 <= 0.0 || z.z2 <= 0.0) return z;
    const double sd = std::sqrt(8.0 / kPi * z.z1 * z.z2 * h);
    return {std::max(0.0, z.z1 + sd * rng.normal()), std::max(0.0, z.z2 + sd * rng.normal())};
}

DiffusionState advance_limit_diffusion(DiffusionState z, double h, double horizon, Rng& rng) {
    if (!(h > 0.0)) throw std::invalid_argument("limit diffusion: h must be positive");
    const std::size_t steps = step_count(horizon, h);
    if (steps == 0) return z;
    const double dt = horizon / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps && z.z1 > 0.0 && z.z2 > 0.0; ++s) z = limit_diffusion_step(z, dt, rng);
    return z;
}

PathRecord simulate_limit_diffusion(const DiffusionState& z0, double h, double horizon, std::uint64_t seed,
                                    std::size_t record_every) {
    if (!(h > 0.0)) throw std::invalid_argument("limit diffusion: h must be positive");
    if (record_every == 0) throw std::invalid_argument("limit diffusion: record_every must be positive");
    Rng rng(seed);
    PathRecord rec;
    DiffusionState z = z0;
    rec.push(0.0, {z.z1, z.z2});
    const std::size_t steps = step_count(horizon, h);
    const double dt = steps ? horizon / static_cast<double>(steps) : 0.0;
    for (std::size_t s = 1; s <= steps; ++s) {
        z = limit_diffusion_step(z, dt, rng);
        if (s % record_every == 0 || s == steps) rec.push(s == steps ? horizon : s * dt, {z.z1, z.z2});
        rec.max_coordinate = std::max({rec.max_coordinate, z.z1, z.z2});
    }
    return rec;
}

BoundaryPoint y_theta_step(const BoundaryPoint& y, const QuadrantPoint& theta, double s, Rng& rng) {
    if (!(s >= 0.0)) throw std::invalid_argument("y_theta_step: s must be nonnegative");
    if (s == 0.0) return y;
    return harmonic_sample(combine(std::exp(-s), y.to_quadrant(), -std::expm1(-s), theta), rng);
}

std::vector<BoundaryPoint> sample_stationary_path(const QuadrantPoint& theta, std::span<const double> times,
                                                  Rng& rng) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("sample_stationary_path: times must increase");
    std::vector<BoundaryPoint> path;
    if (times.empty()) return path;
    path.reserve(times.size());
    path.push_back(harmonic_sample(theta, rng));
    for (std::size_t i = 1; i < times.size(); ++i)
        path.push_back(y_theta_step(path.back(), theta, times[i] - times[i - 1], rng));
    return path;
}

}  // namespace mcb
