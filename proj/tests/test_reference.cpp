#include "doctest.h"

#include "mcb/dynamics.hpp"
#include "mcb/measures.hpp"
#include "mcb/quadrature.hpp"
#include "mcb/reference.hpp"
#include "mcb/stats.hpp"

#include <cmath>

using namespace mcb;

namespace {

// Mean of the first hitting time of 0 for a Brownian bridge a -> b on [0, T]
// conditioned to hit, from the hitting density of free Brownian motion and
// the Gaussian kernel of the remaining piece (reflected endpoint when b > 0).
double bridge_exit_mean_quadrature(double a, double b, double T) {
    const double end = -std::abs(b);
    auto density = [&](double s) {
        if (s <= 0.0 || s >= T) return 0.0;
        return a / std::sqrt(2.0 * kPi * s * s * s) * std::exp(-a * a / (2.0 * s)) *
               std::exp(-end * end / (2.0 * (T - s))) / std::sqrt(2.0 * kPi * (T - s));
    };
    const double z = quad::integrate(density, 0.0, T).value;
    return quad::integrate([&](double s) { return s * density(s); }, 0.0, T).value / z;
}

}  // namespace

TEST_CASE("bridge exit time matches the hitting density") {
    struct Case {
        double a, b, T;
    };
    for (auto c : {Case{1.0, -0.5, 1.0}, Case{0.3, 0.2, 1.0}, Case{0.5, 0.0, 2.0}, Case{0.1, 0.05, 0.01}}) {
        Rng rng(41);
        Accumulator acc;
        for (int i = 0; i < 100000; ++i) {
            const double s = bridge_exit_time(c.a, c.b, c.T, rng);
            REQUIRE(s >= 0.0);
            REQUIRE(s <= c.T);
            acc.add(s);
        }
        const auto e = acc.estimate();
        CAPTURE(c.a);
        CAPTURE(c.b);
        CHECK(std::abs(e.mean - bridge_exit_mean_quadrature(c.a, c.b, c.T)) <= 4.0 * e.se);
    }
}

TEST_CASE("catalytic noise: boundary points do not move") {
    Rng rng(1);
    const QuadrantPoint on_axis{2.0, 0.0};
    CHECK(catalytic_noise_advance(on_axis, 100.0, 1.0, rng) == on_axis);
    const QuadrantPoint origin{0.0, 0.0};
    CHECK(catalytic_noise_advance(origin, 100.0, 1.0, rng) == origin);
}

TEST_CASE("catalytic noise run long enough exits with the harmonic measure") {
    const QuadrantPoint x{2.0, 0.5};
    const int n = 40000;
    Rng rng(7);
    Rng ref(8);
    std::vector<double> sim, direct;
    int type1 = 0;
    for (int i = 0; i < n; ++i) {
        const QuadrantPoint y = catalytic_noise_advance(x, 1e8, 1.0, rng);
        REQUIRE(y.on_boundary());
        const BoundaryPoint b = BoundaryPoint::from_quadrant(y);
        sim.push_back(b.signed_magnitude());
        direct.push_back(harmonic_sample(x, ref).signed_magnitude());
        type1 += b.type() == 1;
    }
    const double p = harmonic_type1_probability(x);
    CHECK(std::abs(static_cast<double>(type1) / n - p) <= 3.5 * std::sqrt(p * (1 - p) / n));
    CHECK(ks_distance(sim, direct) < ks_critical_value(n, n));
}

TEST_CASE("catalytic noise preserves the mean") {
    const QuadrantPoint x{1.0, 0.7};
    Rng rng(9);
    Accumulator a, b;
    for (int i = 0; i < 40000; ++i) {
        const QuadrantPoint y = catalytic_noise_advance(x, 5.0, 0.1, rng);
        a.add(y.x1);
        b.add(y.x2);
    }
    CHECK(std::abs(a.estimate().mean - 1.0) <= 3.5 * a.estimate().se);
    CHECK(std::abs(b.estimate().mean - 0.7) <= 3.5 * b.estimate().se);
}

TEST_CASE("finite-rate one-site process") {
    Rng rng(2);
    const QuadrantPoint theta{1.5, 0.0};
    for (auto scheme : {GammaScheme::SplitExit, GammaScheme::EulerClamp}) {
        QuadrantPoint y = theta;
        for (int s = 0; s < 50; ++s) y = y_theta_gamma_step(y, theta, 100.0, 0.01, rng, scheme);
        CHECK(y == theta);
    }
    CHECK_THROWS_AS(y_theta_gamma_step(theta, theta, 0.0, 0.01, rng), std::invalid_argument);

    // Mean follows the linear drift ODE.
    const QuadrantPoint y0{1.0, 0.2};
    const QuadrantPoint th{0.3, 0.8};
    const double t = 0.5;
    const QuadrantPoint expect = combine(std::exp(-t), y0, -std::expm1(-t), th);
    Accumulator a, b;
    for (int r = 0; r < 10000; ++r) {
        QuadrantPoint y = y0;
        for (int s = 0; s < 50; ++s) y = y_theta_gamma_step(y, th, 20.0, 0.01, rng);
        a.add(y.x1);
        b.add(y.x2);
    }
    CHECK(std::abs(a.estimate().mean - expect.x1) <= 3.5 * a.estimate().se);
    CHECK(std::abs(b.estimate().mean - expect.x2) <= 3.5 * b.estimate().se);
}

TEST_CASE("finite-rate one-site process approaches the harmonic transition as the rate grows") {
    const QuadrantPoint y0{1.0, 0.2};
    const QuadrantPoint th{0.3, 0.8};
    const double t = 2.0;
    const QuadrantPoint target = combine(std::exp(-t), y0, -std::expm1(-t), th);
    const int n = 4000;
    std::vector<double> ref;
    Rng qr(100);
    for (int i = 0; i < n; ++i) ref.push_back(harmonic_sample(target, qr).signed_magnitude());

    std::vector<double> dist;
    for (double gamma : {2.0, 20.0, 200.0}) {
        Rng rng(101);
        std::vector<double> sim;
        for (int i = 0; i < n; ++i) {
            QuadrantPoint y = y0;
            for (int s = 0; s < 200; ++s) y = y_theta_gamma_step(y, th, gamma, 0.01, rng);
            sim.push_back(y.x1 >= y.x2 ? y.x1 : -y.x2);
        }
        dist.push_back(ks_distance(sim, ref));
    }
    CAPTURE(dist[0]);
    CAPTURE(dist[1]);
    CAPTURE(dist[2]);
    CHECK(dist[0] > dist[1]);
    CHECK(dist[1] > dist[2]);
    CHECK(dist[2] < ks_critical_value(n, n));
}

TEST_CASE("Euler with clamping misplaces the exit distribution at large rate") {
    // Kept as an option to document the bias: overshoot past an axis is
    // clamped instead of being stopped at the crossing, which shifts the
    // type probabilities away from the harmonic measure.
    const QuadrantPoint y0{1.0, 0.2};
    const QuadrantPoint th{0.3, 0.8};
    const QuadrantPoint target = combine(std::exp(-1.0), y0, -std::expm1(-1.0), th);
    const double p = harmonic_type1_probability(target);
    const int n = 10000;
    Rng rng(55);
    int type1 = 0;
    for (int i = 0; i < n; ++i) {
        QuadrantPoint y = y0;
        for (int s = 0; s < 1000; ++s) y = y_theta_gamma_step(y, th, 200.0, 1e-3, rng, GammaScheme::EulerClamp);
        type1 += y.x1 > y.x2;
    }
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(type1) / n - p) > 6.0 * se);
}

TEST_CASE("finite-rate system") {
    GammaParams gp;
    gp.gamma = 50.0;
    gp.h = 0.01;
    CHECK_THROWS_AS([] {
        GammaParams bad;
        bad.gamma = -1.0;
        bad.validate();
    }(), std::invalid_argument);

    SUBCASE("one type absent: pure heat flow") {
        const std::vector<QuadrantPoint> init{{1.0, 0.0}, {3.0, 0.0}, {0.0, 0.0}};
        auto rec = simulate_mcb_gamma(init, gp, 1.0);
        const auto expect = heat_flow(init, 1.0);
        REQUIRE(rec.snapshots.size() == 1);
        for (std::size_t k = 0; k < init.size(); ++k) {
            CHECK(rec.snapshots[0].sites[k].x1 == doctest::Approx(expect[k].x1).epsilon(1e-12));
            CHECK(rec.snapshots[0].sites[k].x2 == 0.0);
        }
        CHECK(rec.times.back() == 1.0);
    }

    SUBCASE("totals are martingales; sites concentrate near the axes at large rate") {
        const auto init = SystemState::half_half(10).quadrant_points();
        for (double gamma : {10.0, 200.0}) {
            gp.gamma = gamma;
            auto out = run_replicas<std::pair<Vec2, double>>(2000, 13, 2, [&](std::size_t, Rng& rng) {
                auto sites = init;
                advance_mcb_gamma(sites, gp, 1.0, rng);
                Vec2 z{0.0, 0.0};
                int interior = 0;
                for (const auto& p : sites) {
                    z = z + p.vec();
                    interior += std::min(p.x1, p.x2) > 0.05;
                }
                return std::pair{0.1 * z, interior / 10.0};
            });
            Accumulator z1, z2, frac;
            for (const auto& [z, f] : out) {
                z1.add(z.x1);
                z2.add(z.x2);
                frac.add(f);
            }
            CAPTURE(gamma);
            CHECK(std::abs(z1.estimate().mean - 0.5) <= 3.5 * z1.estimate().se);
            CHECK(std::abs(z2.estimate().mean - 0.5) <= 3.5 * z2.estimate().se);
            if (gamma == 200.0) CHECK(frac.estimate().mean < 0.05);
            if (gamma == 10.0) CHECK(frac.estimate().mean > 0.05);
        }
    }
}

TEST_CASE("limit diffusion") {
    auto frozen = simulate_limit_diffusion({0.0, 2.0}, 1e-3, 1.0, 3);
    for (const auto& z : frozen.totals) {
        CHECK(z.x1 == 0.0);
        CHECK(z.x2 == 2.0);
    }
    auto empty = simulate_limit_diffusion({1.0, 1.0}, 1e-3, 0.0, 3);
    CHECK(empty.size() == 1);

    const DiffusionState z0{0.5, 0.5};
    const std::size_t n = 10000;
    auto coarse = run_replicas<DiffusionState>(n, 5, 2, [&](std::size_t, Rng& rng) {
        return advance_limit_diffusion(z0, 1e-3, 1.0, rng);
    });
    auto fine = run_replicas<DiffusionState>(n, 6, 2, [&](std::size_t, Rng& rng) {
        return advance_limit_diffusion(z0, 2.5e-4, 1.0, rng);
    });
    Accumulator a1, a2, prod;
    std::vector<double> c1, f1;
    for (std::size_t r = 0; r < n; ++r) {
        a1.add(coarse[r].z1);
        a2.add(coarse[r].z2);
        prod.add(coarse[r].z1 * coarse[r].z2);
        CHECK((coarse[r].z1 >= 0.0 && coarse[r].z2 >= 0.0));
        c1.push_back(coarse[r].z1);
        f1.push_back(fine[r].z1);
    }
    CHECK(std::abs(a1.estimate().mean - 0.5) <= 3.0 * a1.estimate().se);
    CHECK(std::abs(a2.estimate().mean - 0.5) <= 3.0 * a2.estimate().se);
    CHECK(prod.estimate().mean <= 0.25 + 3.0 * prod.estimate().se);
    CHECK(ks_distance(c1, f1) < ks_critical_value(n, n));
}

TEST_CASE("exact one-site transition") {
    Rng rng(12);
    const BoundaryPoint y = BoundaryPoint::type2(0.8);
    for (double s : {0.0, 0.3, 5.0}) CHECK(y_theta_step(y, y.to_quadrant(), s, rng) == y);
    CHECK_THROWS_AS(y_theta_step(y, {1.0, 1.0}, -1.0, rng), std::invalid_argument);

    const QuadrantPoint theta{1.0, 0.6};
    const BoundaryPoint start = BoundaryPoint::type1(3.0);
    const std::size_t n = 100000;
    std::vector<double> one, two, late, stat;
    Rng a(20), b(21), c(22), d(23);
    for (std::size_t i = 0; i < n; ++i) {
        one.push_back(y_theta_step(start, theta, 0.8, a).signed_magnitude());
        two.push_back(y_theta_step(y_theta_step(start, theta, 0.4, b), theta, 0.4, b).signed_magnitude());
        late.push_back(y_theta_step(start, theta, 40.0, c).signed_magnitude());
        stat.push_back(harmonic_sample(theta, d).signed_magnitude());
    }
    CHECK(ks_distance(one, two) < ks_critical_value(n, n));
    CHECK(ks_distance(late, stat) < ks_critical_value(n, n));
}

TEST_CASE("stationary path") {
    const QuadrantPoint theta{1.0, 0.6};
    const std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    const double p = harmonic_type1_probability(theta);
    const int n = 20000;
    std::vector<int> type1(times.size(), 0);
    int agree = 0;
    Rng rng(30);
    for (int r = 0; r < n; ++r) {
        auto path = sample_stationary_path(theta, times, rng);
        REQUIRE(path.size() == times.size());
        for (std::size_t j = 0; j < path.size(); ++j) type1[j] += path[j].type() == 1;
        agree += path[0].type() == path[1].type();
    }
    const double se = std::sqrt(p * (1 - p) / n);
    for (int c : type1) CHECK(std::abs(static_cast<double>(c) / n - p) <= 3.0 * se);
    const double baseline = p * p + (1 - p) * (1 - p);
    CHECK(static_cast<double>(agree) / n > baseline + 3.0 * std::sqrt(baseline * (1 - baseline) / n));

    const QuadrantPoint edge{0.0, 2.0};
    auto fixed = sample_stationary_path(edge, times, rng);
    for (const auto& y : fixed) CHECK(y == BoundaryPoint::type2(2.0));

    const std::vector<double> bad{0.0, 0.0};
    CHECK_THROWS_AS(sample_stationary_path(theta, bad, rng), std::invalid_argument);
}
