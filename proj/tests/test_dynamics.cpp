#include "doctest.h"

#include "mcb/dynamics.hpp"
#include "mcb/stats.hpp"

#include <cmath>

using namespace mcb;

namespace {

SystemState mixed_four() {
    return SystemState({BoundaryPoint::type1(1.0), BoundaryPoint::type2(2.0), BoundaryPoint::type1(0.5),
                        BoundaryPoint::type2(1.0)});
}

SimParams params_for(Scheme s, double horizon) {
    SimParams p;
    p.scheme = s;
    p.horizon = horizon;
    return p;
}

}  // namespace

TEST_CASE("mean-field drift") {
    SystemState one({BoundaryPoint::type1(3.0)});
    CHECK(mean_field_drift(one, 0) == Vec2{0.0, 0.0});

    SystemState uniform({BoundaryPoint::type1(1.0), BoundaryPoint::type1(1.0), BoundaryPoint::type1(1.0)});
    for (std::size_t k = 0; k < 3; ++k) CHECK(mean_field_drift(uniform, k) == Vec2{0.0, 0.0});

    SystemState s({BoundaryPoint::type2(2.0), BoundaryPoint::type1(2.0), BoundaryPoint::origin(),
                   BoundaryPoint::origin()});
    CHECK(s.z1() == doctest::Approx(0.5));
    CHECK(s.z2() == doctest::Approx(0.5));
    const Vec2 d = mean_field_drift(s, 0);
    CHECK(d.x1 == doctest::Approx(0.5));
    CHECK(d.x2 == doctest::Approx(-1.5));
}

TEST_CASE("jump rate per unit nu-mass") {
    SystemState s({BoundaryPoint::type1(2.0), BoundaryPoint::type2(2.0)});
    CHECK(s.z2() == doctest::Approx(1.0));
    CHECK(jump_rate(s, 0) == doctest::Approx(0.5));

    SystemState same({BoundaryPoint::type2(1.0), BoundaryPoint::type2(4.0)});
    CHECK(jump_rate(same, 0) == 0.0);
    CHECK(jump_rate(same, 1) == 0.0);

    SystemState one({BoundaryPoint::type1(1.0)});
    CHECK(jump_rate(one, 0) == 0.0);

    SystemState with_origin({BoundaryPoint::origin(), BoundaryPoint::type1(1.0), BoundaryPoint::type2(1.0)});
    CHECK(jump_rate(with_origin, 0) == 0.0);
}

TEST_CASE("apply_jump covers the four cases") {
    CHECK(apply_jump(BoundaryPoint::type1(2.0), {Axis::Axis1, 1.5}) == BoundaryPoint::type1(3.0));
    CHECK(apply_jump(BoundaryPoint::type1(2.0), {Axis::Axis2, 0.25}) == BoundaryPoint::type2(0.5));
    CHECK(apply_jump(BoundaryPoint::type2(2.0), {Axis::Axis1, 0.5}) == BoundaryPoint::type2(1.0));
    CHECK(apply_jump(BoundaryPoint::type2(2.0), {Axis::Axis2, 3.0}) == BoundaryPoint::type1(6.0));
    for (auto x : {BoundaryPoint::type1(0.7), BoundaryPoint::type2(5.0)})
        CHECK(apply_jump(x, {Axis::Axis1, 1.0}) == x);
    CHECK_THROWS_AS(apply_jump(BoundaryPoint::origin(), {Axis::Axis1, 2.0}), std::logic_error);
}

TEST_CASE("heat flow") {
    const std::vector<QuadrantPoint> x0{{1.0, 0.0}, {0.0, 1.0}};
    auto same = heat_flow(x0, 0.0);
    CHECK(same[0].x1 == 1.0);
    CHECK(same[1].x2 == 1.0);

    auto half = heat_flow(x0, std::log(2.0));
    CHECK(half[0].x1 == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(half[0].x2 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(half[1].x1 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(half[1].x2 == doctest::Approx(0.75).epsilon(1e-14));

    auto late = heat_flow(x0, 60.0);
    for (const auto& p : late) {
        CHECK(p.x1 == doctest::Approx(0.5));
        CHECK(p.x2 == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(heat_flow(x0, -1.0), std::invalid_argument);
}

TEST_CASE("single site is frozen under both schemes") {
    for (auto scheme : {Scheme::HarmonicSplit, Scheme::TauLeap}) {
        SystemState one({BoundaryPoint::type2(1.7)});
        auto rec = simulate(one, params_for(scheme, 3.0));
        REQUIRE(rec.complete);
        for (const auto& z : rec.totals) {
            CHECK(z.x1 == 0.0);
            CHECK(z.x2 == 1.7);
        }
    }
}

TEST_CASE("single-type configuration follows the heat flow") {
    const std::vector<BoundaryPoint> sites{BoundaryPoint::type1(1.0), BoundaryPoint::type1(3.0),
                                           BoundaryPoint::type1(0.25), BoundaryPoint::origin()};
    SystemState init(sites);
    const auto expect = heat_flow(init.quadrant_points(), 1.0);
    for (auto scheme : {Scheme::HarmonicSplit, Scheme::TauLeap}) {
        SystemState st = init;
        Rng rng(3);
        advance(st, params_for(scheme, 1.0), rng);
        CHECK(st.clock() == 1.0);
        for (std::size_t k = 0; k < sites.size(); ++k) {
            CHECK(st.site(k).type() == 1);
            CHECK(std::abs(st.site(k).coordinate(1) - expect[k].x1) <= 1e-6);
        }
    }
}

TEST_CASE("harmonic split with frozen totals reproduces the one-site transition") {
    // A single type-1 site among a huge reservoir of type-2 mass sees totals
    // that are effectively constant; after m steps its law is Q of the
    // heat-flowed point regardless of m.
    const QuadrantPoint theta{0.0, 1.0};
    const BoundaryPoint y = BoundaryPoint::type1(1.0);
    const double t = 0.6;
    const QuadrantPoint target = combine(std::exp(-t), y.to_quadrant(), -std::expm1(-t), theta);
    const double p_exact = harmonic_type1_probability(target);
    for (int m : {1, 6}) {
        int type1 = 0;
        const int n = 20000;
        Rng rng(11, m);
        for (int r = 0; r < n; ++r) {
            BoundaryPoint cur = y;
            for (int j = 0; j < m; ++j) {
                const double h = t / m;
                QuadrantPoint q = combine(std::exp(-h), cur.to_quadrant(), -std::expm1(-h), theta);
                cur = harmonic_sample(q, rng);
            }
            type1 += cur.type() == 1;
        }
        const double p = static_cast<double>(type1) / n;
        CHECK(std::abs(p - p_exact) <= 4.0 * std::sqrt(p_exact * (1 - p_exact) / n));
    }
}

TEST_CASE("totals are martingales and the mixed moment does not grow") {
    const std::size_t n_rep = 2000;
    for (auto scheme : {Scheme::HarmonicSplit, Scheme::TauLeap}) {
        SystemState init = SystemState::half_half(10);
        auto params = params_for(scheme, 0.5);
        auto finals = run_replicas<Vec2>(n_rep, 21, 2, [&](std::size_t, Rng& rng) {
            SystemState st = init;
            advance(st, params, rng);
            return st.totals();
        });
        Accumulator z1, z2, prod;
        for (const auto& z : finals) {
            z1.add(z.x1);
            z2.add(z.x2);
            prod.add(z.x1 * z.x2);
        }
        CAPTURE(to_string(scheme));
        CHECK(std::abs(z1.estimate().mean - 0.5) <= 3.5 * z1.estimate().se);
        CHECK(std::abs(z2.estimate().mean - 0.5) <= 3.5 * z2.estimate().se);
        CHECK(prod.estimate().mean <= 0.25 + 3.0 * prod.estimate().se);
    }
}

TEST_CASE("one-point moments match harmonic measure of the heat flow") {
    const SystemState init = mixed_four();
    const double t = 0.5;
    const double p = 1.2;
    const auto flowed = heat_flow(init.quadrant_points(), t);
    for (auto scheme : {Scheme::HarmonicSplit, Scheme::TauLeap}) {
        Accumulator lhs[2], rhs[2];
        for (std::size_t r = 0; r < 4000; ++r) {
            Rng rng(5, r);
            SystemState st = init;
            advance(st, params_for(scheme, t), rng);
            Rng q(5, r, 1);
            for (int i = 1; i <= 2; ++i) {
                double a = 0.0;
                double b = 0.0;
                for (std::size_t k = 0; k < 4; ++k) {
                    a += std::pow(st.site(k).coordinate(i), p);
                    b += std::pow(harmonic_sample(flowed[k], q).coordinate(i), p);
                }
                lhs[i - 1].add(a / 4);
                rhs[i - 1].add(b / 4);
            }
        }
        for (int i = 0; i < 2; ++i) {
            const auto d = difference(lhs[i].estimate(), rhs[i].estimate());
            CAPTURE(to_string(scheme));
            CAPTURE(i);
            CHECK(std::abs(d.mean) <= 3.0 * d.se);
        }
    }
}

TEST_CASE("schemes agree on total-mass marginals") {
    const std::size_t n_rep = 4000;
    const SystemState init = SystemState::half_half(10);
    std::vector<double> a, b;
    for (auto scheme : {Scheme::HarmonicSplit, Scheme::TauLeap}) {
        auto params = params_for(scheme, 1.0);
        auto z1 = run_replicas<double>(n_rep, scheme == Scheme::TauLeap ? 8 : 9, 2, [&](std::size_t, Rng& rng) {
            SystemState st = init;
            advance(st, params, rng);
            return st.z1();
        });
        (scheme == Scheme::TauLeap ? a : b) = z1;
    }
    CHECK(ks_distance(a, b) < ks_critical_value(a.size(), b.size(), 0.01));
}

TEST_CASE("cached totals track recomputation") {
    SystemState st = SystemState::half_half(50, 1.0, 2.0);
    Rng rng(17);
    SimParams p = params_for(Scheme::TauLeap, 2.0);
    p.recompute_period = 1000000;
    double worst = 0.0;
    advance(st, p, rng, [&](const SystemState& s) {
        worst = std::max(worst, s.totals_drift() / std::max(1.0, s.z1() + s.z2()));
    });
    CHECK(worst <= 1e-9);
}

TEST_CASE("simulate records and snapshots") {
    const SystemState init = SystemState::half_half(6);
    SimParams p = params_for(Scheme::HarmonicSplit, 0.0);
    auto empty = simulate(init, p);
    CHECK(empty.size() == 1);
    CHECK(empty.times[0] == 0.0);

    p.horizon = 1.0;
    p.h = 0.03;
    p.record_every = 5;
    p.snapshot_times = {0.0, 0.5};
    auto rec = simulate(init, p);
    REQUIRE(rec.complete);
    for (std::size_t i = 1; i < rec.size(); ++i) CHECK(rec.times[i] > rec.times[i - 1]);
    CHECK(rec.times.back() == 1.0);
    REQUIRE(rec.snapshots.size() == 2);
    CHECK(rec.snapshots[0].time == 0.0);
    CHECK(rec.snapshots[1].time == 0.5);

    auto again = simulate(init, p);
    CHECK(again.totals == rec.totals);

    p.seed = 1;
    auto other = simulate(init, p);
    CHECK(other.totals != rec.totals);
}

TEST_CASE("jump log respects its floor") {
    const SystemState init = SystemState::half_half(8);
    SimParams p = params_for(Scheme::TauLeap, 0.5);
    p.record_mode = RecordMode::JumpLog;
    p.jump_log_floor = 0.1;
    auto rec = simulate(init, p);
    REQUIRE(rec.has_jump_log);
    CHECK_FALSE(rec.jumps.empty());
    for (const auto& j : rec.jumps) {
        CHECK(j.displacement.norm() >= 0.1);
        CHECK(j.time < 0.5);
    }
}

TEST_CASE("parameter validation") {
    SimParams p;
    p.h = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.h = 0.01;
    p.horizon = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("rescaled view") {
    CHECK(time_scale(100) == doctest::Approx(21.7147).epsilon(1e-5));
    CHECK(time_scale(3) == doctest::Approx(2.7307).epsilon(1e-4));
    CHECK_THROWS_AS(time_scale(2), std::invalid_argument);

    PathRecord rec;
    rec.push(0.0, {1.0, 1.0});
    rec.push(time_scale(100), {1.0, 1.0});
    auto view = rescaled_view(rec, 100);
    CHECK(view.times[0] == 0.0);
    CHECK(view.times[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(view.time_scale == doctest::Approx(time_scale(100)));
}
