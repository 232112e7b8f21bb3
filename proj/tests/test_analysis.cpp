#include "doctest.h"

#include "mcb/analysis.hpp"
#include "mcb/measures.hpp"
#include "mcb/quadrature.hpp"
#include "mcb/reference.hpp"
#include "mcb/stats.hpp"
#include "mcb/suites.hpp"

#include <cmath>
#include <limits>

using namespace mcb;

namespace {

// Densities of nu written out independently of the library.
double axis1_density(double y) { return 4.0 / kPi * y / ((1.0 - y) * (1.0 - y) * (1.0 + y) * (1.0 + y)); }
double axis2_density(double y) { return 4.0 / kPi * y / ((1.0 + y * y) * (1.0 + y * y)); }

// (y - 1)^2 times the Axis1 density, with the pole cancelled.
double axis1_centered(double y) { return 4.0 / kPi * y / ((1.0 + y) * (1.0 + y)); }

double oracle_centered_moment(double l) {
    return quad::integrate(axis1_centered, std::max(0.0, 1.0 - l), 1.0 + l).value;
}
double oracle_axis2_moment(double l) {
    return quad::integrate([](double y) { return y * y * axis2_density(y); }, 0.0, l).value;
}
double oracle_axis1_complement(double l) {
    double m = quad::integrate_to_infinity(axis1_density, 1.0 + l).value;
    if (l < 1.0) m += quad::integrate(axis1_density, 0.0, 1.0 - l).value;
    return m;
}
double oracle_axis2_tail(double l) { return quad::integrate_to_infinity(axis2_density, l).value; }

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("heuristic rates: examples") {
    const auto r = heuristic_rates(100, 0.5, 1.0, 1.0);
    CHECK(r.large_jump_rate_case1 == doctest::Approx(0.5529609084194896).epsilon(1e-12));
    CHECK(r.large_jump_rate_case2 == doctest::Approx(0.5529609084194896).epsilon(1e-12));

    const auto zero = heuristic_rates(100, 0.5, 1.3, 0.0);
    CHECK(zero.large_jump_rate_case1 == 0.0);
    CHECK(zero.large_jump_rate_case2 == 0.0);
    CHECK(zero.qv_rate_case1 == 0.0);
    CHECK(zero.qv_rate_case2 == 0.0);

    CHECK_THROWS_AS(heuristic_rates(2, 0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(heuristic_rates(10, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(heuristic_rates(10, 0.5, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("heuristic rates match quadrature of nu on a grid") {
    const double ns[] = {10, 100, 1000, 1e4, 1e6};
    const double epss[] = {0.05, 0.1, 0.5, 1.0, 2.0};
    const double zs[] = {0.25, 1.0, 4.0};
    for (double n : ns)
        for (double eps : epss)
            for (double z : zs) {
                const double z1 = z;
                const double z2 = 0.5 * z + 0.3;
                const auto r = heuristic_rates(static_cast<std::size_t>(n), eps, z1, z2);
                const double log_n = std::log(n);
                const double l1 = eps * n / (2.0 * z1);
                const double l2 = eps * n / (2.0 * z2);
                CAPTURE(n);
                CAPTURE(eps);
                CAPTURE(z);
                CHECK(rel_close(r.qv_rate_case1, z1 * z2 / log_n * oracle_centered_moment(l1), 1e-6));
                CHECK(rel_close(r.qv_rate_case2, z1 * z2 / log_n * oracle_axis2_moment(l2), 1e-6));
                const double sites = n / log_n * n / 2.0;
                CHECK(rel_close(r.large_jump_rate_exact_case1, sites * z2 / (2 * z1) * oracle_axis1_complement(l1), 1e-6));
                CHECK(rel_close(r.large_jump_rate_exact_case2, sites * z1 / (2 * z2) * oracle_axis2_tail(l2), 1e-6));
                // The closed-form bounds dominate the rates they bound.
                CHECK(r.large_jump_rate_exact_case1 <= r.large_jump_rate_case1 * (1 + 1e-12));
                CHECK(r.large_jump_rate_exact_case2 <= r.large_jump_rate_case2 * (1 + 1e-12));
            }
}

TEST_CASE("heuristic QV rate tends to 8/pi z1 z2") {
    double prev = std::numeric_limits<double>::infinity();
    for (double n : {1e3, 1e6, 1e9, 1e12, 1e18}) {
        const auto r = heuristic_rates(static_cast<std::size_t>(n), 1.0, 0.5, 0.5);
        const double err = std::abs((r.qv_rate_case1 + r.qv_rate_case2) / (8.0 / kPi * 0.25) - 1.0);
        CAPTURE(n);
        CHECK(err < prev);
        // Half/half: (4/pi)(2 log(eps N / (2z)) - 3/2) up to O(1/N) terms.
        CHECK(err <= 0.75 / std::log(n) + 1e-3);
        prev = err;
    }
}

TEST_CASE("centered Axis1 moment") {
    CHECK(nu_centered_second_moment(0.0) == 0.0);
    for (double l : {0.01, 0.3, 0.999, 1.0, 1.5, 40.0})
        CHECK(rel_close(nu_centered_second_moment(l), oracle_centered_moment(l), 1e-9));
    CHECK_THROWS_AS(nu_centered_second_moment(-1.0), std::invalid_argument);
}

TEST_CASE("QV compensator on the half/half configuration") {
    for (std::size_t n : {8, 64, 1000}) {
        const SystemState s = SystemState::half_half(n, 1.0, 3.0);
        const double z1 = 0.5;
        const double z2 = 1.5;
        const double log_n = std::log(static_cast<double>(n));
        const auto h = heuristic_rates(n, 1.0, z1, z2);
        const double l1 = n / (2 * z1);
        const double l2 = n / (2 * z2);
        // Heuristic cases plus the own-mass loss at a type change, with the
        // norm cutoff on type-changing moves.
        const double c1 = h.qv_rate_case1 + z1 * z2 / log_n * kAxis2Mass * (1 - 1 / (l1 * l1)) +
                          z1 * z2 / log_n * oracle_axis2_moment(std::sqrt(l2 * l2 - 1));
        const double c2 = z1 * z2 / log_n *
                          (oracle_centered_moment(l2) + kAxis2Mass * (1 - 1 / (l2 * l2)) +
                           oracle_axis2_moment(std::sqrt(l1 * l1 - 1)));
        const Vec2 r = qv_compensator_rate(s, 1.0);
        CAPTURE(n);
        CHECK(rel_close(r.x1, c1, 1e-9));
        CHECK(rel_close(r.x2, c2, 1e-9));
    }
    const Vec2 single = qv_compensator_rate(SystemState::half_half(10, 1.0, 0.0));
    CHECK(single.x1 == 0.0);
    CHECK(single.x2 == 0.0);
}

TEST_CASE("realized QV") {
    PathRecord rec;
    SUBCASE("constant path") {
        for (int i = 0; i <= 10; ++i) rec.push(0.1 * i, {0.4, 2.0});
        const auto q = realized_qv(rec);
        CHECK(q.qv1.back() == 0.0);
        CHECK(q.qv2.back() == 0.0);
        CHECK(q.integral_z1z2 == doctest::Approx(0.8));
        CHECK(q.companion.back() == doctest::Approx(8.0 / kPi * 0.8));
    }
    SUBCASE("hand example with truncation") {
        rec.push(0.0, {0.0, 0.0});
        rec.push(0.5, {0.1, 0.2});
        rec.push(1.0, {0.1, 0.1});
        rec.push(1.5, {2.1, 0.1});
        rec.push(1.7, {2.1, 0.1});  // shorter final step
        const auto q = realized_qv(rec, 1.0);
        CHECK(q.qv1.back() == doctest::Approx(0.01));
        CHECK(q.qv2.back() == doctest::Approx(0.05));
        CHECK(q.qv1[2] == doctest::Approx(0.01));
        const double integral = 0.25 * 0.02 + 0.25 * (0.02 + 0.01) + 0.25 * (0.01 + 0.21) + 0.1 * 0.42;
        CHECK(q.integral_z1z2 == doctest::Approx(integral));
        const auto untruncated = realized_qv(rec, 10.0);
        CHECK(untruncated.qv1.back() == doctest::Approx(4.01));
    }
    SUBCASE("errors") {
        rec.push(0.0, {1.0, 1.0});
        CHECK_THROWS_AS(realized_qv(rec), std::invalid_argument);
        rec.push(0.1, {1.0, 1.0});
        rec.push(0.3, {1.0, 1.0});
        rec.push(0.4, {1.0, 1.0});
        CHECK_THROWS_AS(realized_qv(rec), std::invalid_argument);
    }
}

TEST_CASE("realized QV of the limit diffusion") {
    double qv = 0.0;
    double integral = 0.0;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const auto rec = simulate_limit_diffusion({0.5, 0.5}, 1e-3, 1.0, 1000 + r);
        const auto q = realized_qv(rec, std::numeric_limits<double>::infinity());
        qv += 0.5 * (q.qv1.back() + q.qv2.back());
        integral += q.integral_z1z2;
    }
    CHECK(qv / integral == doctest::Approx(8.0 / kPi).epsilon(0.10));
}

TEST_CASE("realized QV of MCB(infinity) tracks its compensator") {
    const std::size_t n = 32;
    const double beta = time_scale(n);
    SimParams p;
    p.h = 0.01;
    p.horizon = beta;
    struct Out {
        double qv, comp;
    };
    const auto out = run_replicas<Out>(1000, 17, 1, [&](std::size_t, Rng& rng) {
        double comp = 0.0, prev = -1.0, t_prev = 0.0;
        auto observe = [&](const SystemState& s) {
            const Vec2 r = qv_compensator_rate(s);
            const double v = 0.5 * (r.x1 + r.x2);
            const double t = s.clock() / beta;
            if (prev >= 0.0) comp += 0.5 * (prev + v) * (t - t_prev);
            prev = v;
            t_prev = t;
        };
        const SystemState s0 = SystemState::half_half(n);
        observe(s0);
        const auto q = realized_qv(rescaled_view(simulate(s0, p, rng, observe), n));
        return Out{0.5 * (q.qv1.back() + q.qv2.back()), comp};
    });
    double qv = 0.0, comp = 0.0;
    for (const auto& o : out) {
        qv += o.qv;
        comp += o.comp;
    }
    CHECK(qv / comp == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("jump census") {
    CHECK(jump_census_bound(0.25, 512, 1.0, 0.25) == doctest::Approx(2.564791).epsilon(1e-6));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {16, 64, 256, 1024}) {
        const double b = jump_census_bound(0.5, n, 1.0, 0.25);
        CHECK(b < prev);
        prev = b;
    }

    const std::size_t n = 32;
    SimParams p;
    p.h = 0.01;
    p.horizon = time_scale(n);
    CHECK_THROWS_AS(jump_census(simulate(SystemState::half_half(n), p), 0.25, n, 1.0), std::invalid_argument);

    p.record_mode = RecordMode::JumpLog;
    const auto rec = rescaled_view(simulate(SystemState::half_half(n), p), n);
    CHECK(jump_census(rec, 1e6, n, 1.0).count == 0);
    std::size_t manual = 0;
    for (const auto& j : rec.jumps)
        if (j.displacement.norm() > 0.1 * n && j.time < 0.5) ++manual;
    const auto c = jump_census(rec, 0.1, n, 0.5);
    CHECK(c.count == manual);
    CHECK(c.bound == doctest::Approx(jump_census_bound(0.1, n, 0.5, 0.25)));

    // Contract: mean count over replicas <= bound + 3 SE.
    p.jump_log_floor = 0.25 * n;
    const auto counts = run_replicas<double>(400, 23, 1, [&](std::size_t, Rng& rng) {
        return static_cast<double>(
            jump_census(rescaled_view(simulate(SystemState::half_half(n), p, rng), n), 0.25, n, 1.0).count);
    });
    const Estimate e = summarize(counts);
    CHECK(e.mean <= jump_census_bound(0.25, n, 1.0, 0.25) + 3.0 * e.se);
}

TEST_CASE("log-moment statistic") {
    CHECK(log_moment_statistic(SystemState::half_half(4), 1) == doctest::Approx(2.0));
    const SystemState s({BoundaryPoint::type1(std::exp(1.0)), BoundaryPoint::type1(std::exp(-2.0)),
                         BoundaryPoint::type2(1.0), BoundaryPoint::origin()});
    CHECK(log_moment_statistic(s, 1) == doctest::Approx(0.5 * (3 * std::exp(1.0) + 4 * std::exp(-2.0))));
    CHECK(log_moment_statistic(s, 2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(log_moment_statistic(s, 3), std::invalid_argument);

    // Bounded in time and not growing with N.
    double sup_small = 0.0, sup_large = 0.0;
    for (std::size_t n : {16, 64}) {
        const double beta = time_scale(n);
        for (double t : {0.25, 0.5, 1.0}) {
            SimParams p;
            p.horizon = beta * t;
            const auto y = run_replicas<double>(300, 40 + n, 1, [&](std::size_t, Rng& rng) {
                SystemState st = SystemState::half_half(n);
                advance(st, p, rng);
                return log_moment_statistic(st, 1);
            });
            const double m = summarize(y).mean;
            CAPTURE(n);
            CAPTURE(t);
            CHECK(m < 10.0);
            (n == 16 ? sup_small : sup_large) = std::max(n == 16 ? sup_small : sup_large, m);
        }
    }
    CHECK(sup_large <= 1.5 * sup_small);
}

TEST_CASE("sup-moment exponent and bound") {
    CHECK(sup_moment_exponent(std::size_t(std::exp(4.0)) + 1) == doctest::Approx(2.0 - 1.0 / std::log(55.0)));
    CHECK(sup_moment_bound(1.0, 0.25, 0.5, 0.5) == doctest::Approx(1218.0 * 1.25));
    CHECK(sup_moment_bound(2.0, 0.0, 1.0, 0.0) == doctest::Approx(2436.0));
}

TEST_CASE("sup log-moment constant is e") {
    for (std::size_t n : {3, 10, 1000, 1000000, 1000000000}) {
        CAPTURE(n);
        CHECK(std::abs(lemma28_constant(n) - std::exp(1.0)) <= 1e-12);
    }
    CHECK_THROWS_AS(lemma28_constant(2), std::invalid_argument);
}

TEST_CASE("log bound") {
    auto [l0, r0] = log_bound_check(0.3, 0.0, 1.0);
    CHECK(l0 <= r0);
    auto [l1, r1] = log_bound_check(0.01, 2.0, 2.0);
    CHECK(l1 == doctest::Approx(std::log(2.01)));
    CHECK(r1 == doctest::Approx(2.0 + std::log(100.0)));
    CHECK(l1 <= r1);
    auto [l2, r2] = log_bound_check(5.0, 1.0, 1.0);
    CHECK(l2 == doctest::Approx(std::log(6.0)));
    CHECK(r2 == doctest::Approx(1.0 + std::log(5.0)));
    CHECK(l2 <= r2);
    for (double x : {1e-6, 1e-3, 0.2, 0.9, 1.0, 3.0, 1e4})
        for (double a : {0.0, 0.5, 2.0, 10.0})
            for (double frac : {0.0, 0.3, 1.0}) {
                auto [l, r] = log_bound_check(x, frac * a, a);
                CHECK(l <= r);
            }
    CHECK_THROWS_AS(log_bound_check(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(log_bound_check(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("test report verdicts") {
    CHECK(make_report("a", 1.0, 1.0, 10, 0).pass);
    CHECK_FALSE(make_report("a", 1.0 + 1e-12, 1.0, 10, 0).pass);
    CHECK_FALSE(make_report("a", std::nan(""), 1.0, 10, 0).pass);
    CHECK(make_report("a", 5.0, std::numeric_limits<double>::infinity(), 10, 0).pass);
    CHECK(all_pass({make_report("a", 0, 1, 1, 0), make_report("b", 0, 0, 1, 0)}));
    CHECK_FALSE(all_pass({make_report("a", 0, 1, 1, 0), make_report("b", 2, 0, 1, 0)}));
}

TEST_CASE("KS statistic follows the Kolmogorov law") {
    // Quantiles of the limiting law, by bisection on its CDF.
    auto kq = [](double q) {
        double lo = 0.2, hi = 3.0;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (kolmogorov_cdf(mid) < q ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const std::size_t n = 10000;
    const std::size_t reps = 20000;
    Rng rng(2024);
    std::vector<double> stat;
    stat.reserve(reps);
    std::vector<double> u(n);
    for (std::size_t r = 0; r < reps; ++r) {
        for (auto& x : u) x = rng.uniform();
        stat.push_back(std::sqrt(static_cast<double>(n)) * ks_one_sample(u, [](double x) { return x; }));
    }
    for (double q : {0.25, 0.5, 0.75}) {
        CAPTURE(q);
        CHECK(quantile(stat, q) == doctest::Approx(kq(q)).epsilon(0.01));
    }

    // Two-sample statistic: sqrt(nm / (n + m)) D has the same limit.
    const std::size_t m = 2000;
    std::vector<double> two;
    std::vector<double> a(m), b(m);
    for (std::size_t r = 0; r < 4000; ++r) {
        for (auto& x : a) x = rng.uniform();
        for (auto& x : b) x = rng.uniform();
        two.push_back(std::sqrt(0.5 * m) * ks_distance(a, b));
    }
    CHECK(quantile(two, 0.5) == doctest::Approx(kq(0.5)).epsilon(0.03));
    CHECK(quantile(two, 0.9) == doctest::Approx(kq(0.9)).epsilon(0.04));
}

TEST_CASE("comparison resolution") {
    CHECK(comparison_value(3e-10) == 0.0);
    CHECK(comparison_value(0.5) == 0.5);
    CHECK(comparison_value(0.5 + 1e-16) == comparison_value(0.5 - 1e-16));
    CHECK(comparison_value(1.2345678901234e3) == doctest::Approx(1.23456789012e3).epsilon(1e-14));
    CHECK(ks_resolved({0.5 + 1e-16, 0.5}, {0.5}) == 0.0);
    CHECK(ks_resolved({1e-12}, {0.0}) == 0.0);
}

TEST_CASE("large-N suites: degenerate and structural cases") {
    LargeNOptions o;
    o.n_grid = {8, 16};
    o.replicas = 100;
    o.seed = 4;

    SUBCASE("single-type start") {
        o.m2 = 0.0;
        const auto batteries = run_large_n_batteries(o);
        const auto ref = limit_reference(batteries.front().z0, o);
        for (const auto& r : theorem1_suite(batteries, ref, o)) {
            CAPTURE(r.name);
            if (r.name.find(".ks.") != std::string::npos) CHECK(r.statistic == 0.0);
            // No QV target when z1 z2 vanishes.
            if (r.name.find("qv_ratio") == std::string::npos) CHECK(r.pass);
        }
        // Sites are deterministic heat flows toward the constant total, so
        // each side is F at nearly the same point once N is not tiny.
        for (const auto& r : theorem2_suite(batteries, ref, default_theorem2_probes(), default_path_probe(), o)) {
            CAPTURE(r.name);
            if (r.name.find("N=16") != std::string::npos) CHECK(r.statistic <= 2e-3);
        }
    }
    SUBCASE("zero probes") {
        const auto batteries = run_large_n_batteries(o);
        const auto ref = limit_reference(batteries.front().z0, o);
        const std::vector<Theorem2Probe> zero{{{0.0, 0.0}, {BoundaryPoint::origin(), BoundaryPoint::origin()}}};
        const PathProbe zpath{{BoundaryPoint::origin()}, {BoundaryPoint::origin()}};
        for (const auto& r : theorem2_suite(batteries, ref, zero, zpath, o)) {
            CAPTURE(r.name);
            if (r.name.find("trend") == std::string::npos) CHECK(r.statistic == 0.0);
            CHECK(r.pass);
        }
    }
    SUBCASE("reports are reproducible and worker-independent") {
        const auto a = theorem1_suite(o);
        o.workers = 3;
        const auto b = theorem1_suite(o);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].name == b[i].name);
            CHECK(a[i].statistic == b[i].statistic);
            CHECK(a[i].threshold == b[i].threshold);
        }
        std::size_t census = 0, trend = 0;
        for (const auto& r : a) {
            census += r.name.find("jump_census") != std::string::npos;
            trend += r.name.find("ks_trend") != std::string::npos;
        }
        CHECK(census == 2);
        CHECK(trend == 2);
    }
    SUBCASE("sup moment suite") {
        const auto batteries = run_large_n_batteries(o);
        const auto reports = sup_moment_suite(batteries, o);
        CHECK(reports.size() == 4);
        for (const auto& r : reports) CHECK(r.pass);
    }
    SUBCASE("grid must increase") {
        o.n_grid = {16, 8};
        CHECK_THROWS_AS(run_large_n_batteries(o), std::invalid_argument);
    }
}

TEST_CASE("finite-rate suite: degenerate and structural cases") {
    GammaSuiteOptions o;
    o.replicas = 200;
    o.seed = 9;
    SUBCASE("single-type start gives identical heat flows") {
        o.m2 = 0.0;
        for (const auto& r : theorem0_suite(o)) {
            CAPTURE(r.name);
            if (r.name.find(".ks.") != std::string::npos) CHECK(r.statistic == 0.0);
            CHECK(r.pass);
        }
    }
    SUBCASE("reproducible") {
        o.gamma_grid = {5.0, 20.0};
        const auto a = theorem0_suite(o);
        o.workers = 2;
        const auto b = theorem0_suite(o);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].statistic == b[i].statistic);
    }
    SUBCASE("grid must increase") {
        o.gamma_grid = {50.0, 10.0};
        CHECK_THROWS_AS(theorem0_suite(o), std::invalid_argument);
    }
}
