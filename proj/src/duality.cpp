#include "mcb/duality.hpp"

#include "mcb/measures.hpp"
#include "mcb/reference.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>

namespace mcb {

Complex lozenge(const Vec2& x, const Vec2& y) {
    return {-(x.x1 + x.x2) * (y.x1 + y.x2), (x.x1 - x.x2) * (y.x1 - y.x2)};
}

Complex F(const Vec2& x, const Vec2& y) { return std::exp(lozenge(x, y)); }

std::vector<BoundaryPoint> boundary_probes() {
    std::vector<BoundaryPoint> out;
    for (double m : {0.25, 1.0, 4.0}) {
        out.push_back(BoundaryPoint::type1(m));
        out.push_back(BoundaryPoint::type2(m));
    }
    return out;
}

std::vector<QuadrantPoint> quadrant_probes() { return {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 2.0}}; }

Complex harmonic_expectation(const QuadrantPoint& x, const std::function<Complex(const BoundaryPoint&)>& f) {
    if (!x.interior()) return f(BoundaryPoint::from_quadrant(x));
    const double a = (x.x1 - x.x2) * (x.x1 + x.x2);
    const double b = 2.0 * x.x1 * x.x2;
    // Exit point u = a + b tan(phi), phi uniform on (-pi/2, pi/2); u = 0 at
    // phi0. Each side is parametrized by its distance psi from +-pi/2 so the
    // far tail sits at psi = 0, and sqrt(u) is singular at the other end, so
    // tanh-sinh on both pieces.
    const double phi0 = std::atan(-a / b);
    boost::math::quadrature::tanh_sinh<double> ts;
    auto part = [&](auto proj) {
        auto side1 = [&](double psi) {
            const double u = std::max(0.0, a + b / std::tan(psi));
            return proj(f(BoundaryPoint::type1(std::sqrt(u))));
        };
        auto side2 = [&](double psi) {
            const double u = std::max(0.0, b / std::tan(psi) - a);
            return proj(f(BoundaryPoint::type2(std::sqrt(u))));
        };
        return ts.integrate(side1, 0.0, 0.5 * kPi - phi0, 1e-13) + ts.integrate(side2, 0.0, 0.5 * kPi + phi0, 1e-13);
    };
    const double re = part([](Complex c) { return c.real(); });
    const double im = part([](Complex c) { return c.imag(); });
    return Complex{re, im} / kPi;
}

ComplexEstimate harmonicity_residual(const QuadrantPoint& theta, const QuadrantPoint& y, std::size_t n_samples,
                                     Rng& rng) {
    if (y.interior()) throw std::invalid_argument("harmonicity_residual: y must lie on an axis");
    if (n_samples < 2) throw std::invalid_argument("harmonicity_residual: need at least two samples");
    const Complex target = F(theta, y);
    ComplexAccumulator acc;
    for (std::size_t i = 0; i < n_samples; ++i) acc.add(F(harmonic_sample(theta, rng).vec(), y) - target);
    return acc.estimate();
}

namespace {

// exp(w) - 1 without cancellation for small |w|.
Complex expm1(Complex w) {
    const double s = std::sin(0.5 * w.imag());
    return {std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * s * s, std::exp(w.real()) * std::sin(w.imag())};
}

struct DualitySample {
    Complex lhs, main, remainder;
    std::vector<double> distance;  // |Z - theta|_1 at the start of each step and at the end
};

}  // namespace

DualityResult duality_residual(const SystemState& initial, const std::vector<DualityMark>& marks,
                               const DualityParams& params) {
    if (!(params.t >= 0.0) || !(params.s >= 0.0)) throw std::invalid_argument("duality_residual: t and s must be nonnegative");
    if (params.replicas < 2) throw std::invalid_argument("duality_residual: need at least two replicas");
    for (std::size_t i = 0; i < marks.size(); ++i) {
        if (marks[i].site >= initial.n_sites()) throw std::invalid_argument("duality_residual: site out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (marks[i].site == marks[j].site) throw std::invalid_argument("duality_residual: sites must be distinct");
    }
    params.sim.validate();

    Vec2 sum_y{0.0, 0.0};
    for (const auto& m : marks) sum_y = sum_y + m.y.vec();
    const std::size_t steps = params.s > 0.0 ? static_cast<std::size_t>(std::ceil(params.s / params.sim.h - 1e-9)) : 0;
    const double dt = steps ? params.s / static_cast<double>(steps) : 0.0;
    const RestrictedNu nu(params.sim.window);
    const TauLeapOptions tl{params.sim.fast_site_threshold, params.sim.max_jumps_per_step};

    auto one = [&](std::size_t, Rng& rng) {
        SystemState st = initial;
        if (params.t > 0.0) {
            SimParams run_in = params.sim;
            run_in.horizon = params.t;
            advance(st, run_in, rng);
        }
        const QuadrantPoint theta = params.theta_from_totals ? QuadrantPoint{st.z1(), st.z2()} : params.theta;
        auto phi = [&](double c) {
            Complex v{1.0, 0.0};
            for (const auto& m : marks)
                v *= F(st.site(m.site).vec(), c * m.y.vec()) * F(theta, (1.0 - c) * m.y.vec());
            return v;
        };
        DualitySample out;
        out.main = Complex{1.0, 0.0};
        const double e_s = std::exp(-params.s);
        for (const auto& m : marks)
            out.main *= F(theta, m.y.vec()) * F(st.site(m.site).vec() + (-1.0) * theta.vec(), e_s * m.y.vec());
        out.remainder = Complex{0.0, 0.0};
        out.distance.reserve(steps + 1);
        for (std::size_t n = 0; n < steps; ++n) {
            const double r = n * dt;
            const double c = std::exp(r - params.s);
            const double c_next = n + 1 == steps ? 1.0 : std::exp(r + dt - params.s);
            const Vec2 gap = st.totals() + (-1.0) * theta.vec();
            out.distance.push_back(std::abs(gap.x1) + std::abs(gap.x2));
            out.remainder += phi(c) * expm1((c_next - c) * lozenge(gap, sum_y));
            if (params.sim.scheme == Scheme::TauLeap)
                step_tau_leap(st, dt, nu, rng, nullptr, tl);
            else
                step_harmonic_split(st, dt, rng);
        }
        const Vec2 gap = st.totals() + (-1.0) * theta.vec();
        out.distance.push_back(std::abs(gap.x1) + std::abs(gap.x2));
        out.lhs = phi(1.0);
        return out;
    };
    auto samples = run_replicas<DualitySample>(params.replicas, params.seed, params.workers, one);

    ComplexAccumulator lhs, main, rem, res;
    std::vector<Accumulator> dist(steps + 1);
    for (const auto& s : samples) {
        lhs.add(s.lhs);
        main.add(s.main);
        rem.add(s.remainder);
        res.add(s.lhs - s.main - s.remainder);
        for (std::size_t i = 0; i < s.distance.size(); ++i) dist[i].add(s.distance[i]);
    }
    DualityResult out;
    out.lhs = lhs.estimate();
    out.main = main.estimate();
    out.remainder = rem.estimate();
    out.residual = res.estimate();
    for (const auto& d : dist) out.sup_mean_distance = std::max(out.sup_mean_distance, d.mean());
    // |a <> b| <= sqrt(2) |a|_1 |b|_1 and the time weight integrates to 1 - e^{-s}.
    out.remainder_bound = -std::expm1(-params.s) * std::sqrt(2.0) * (sum_y.x1 + sum_y.x2) * out.sup_mean_distance;
    return out;
}

ComplexEstimate g_k_evaluate(const QuadrantPoint& theta, std::span<const QuadrantPoint> z_list,
                             std::span<const double> s_grid, std::size_t n_samples, Rng& rng) {
    if (z_list.empty() || z_list.size() != s_grid.size())
        throw std::invalid_argument("g_k_evaluate: need one time per argument");
    for (std::size_t i = 1; i < s_grid.size(); ++i)
        if (!(s_grid[i] > s_grid[i - 1])) throw std::invalid_argument("g_k_evaluate: times must increase");
    if (n_samples < 2) throw std::invalid_argument("g_k_evaluate: need at least two samples");
    const std::size_t k = z_list.size();
    ComplexAccumulator acc;
    for (std::size_t n = 0; n < n_samples; ++n) {
        Complex weight{1.0, 0.0};
        Vec2 carry{0.0, 0.0};  // added to the next argument down the chain
        for (std::size_t j = k; j-- > 1;) {
            const QuadrantPoint arg{z_list[j].x1 + carry.x1, z_list[j].x2 + carry.x2};
            const Vec2 w = harmonic_sample(arg, rng).vec();
            const double e = std::exp(s_grid[j - 1] - s_grid[j]);
            weight *= F(theta, (1.0 - e) * w);
            carry = e * w;
        }
        const QuadrantPoint arg{z_list[0].x1 + carry.x1, z_list[0].x2 + carry.x2};
        acc.add(weight * F(theta, harmonic_sample(arg, rng).vec()));
    }
    return acc.estimate();
}

Complex g2_closed_form(const QuadrantPoint& theta, const BoundaryPoint& y1, const BoundaryPoint& y2, double s1,
                       double s2) {
    if (!(s2 > s1)) throw std::invalid_argument("g2_closed_form: need s1 < s2");
    const double e = std::exp(s1 - s2);
    const QuadrantPoint arg = combine(1.0, y1.to_quadrant(), e, y2.to_quadrant());
    const Complex inner = harmonic_expectation(arg, [&](const BoundaryPoint& z) { return F(theta, z.vec()); });
    return F(theta, (1.0 - e) * y2.vec()) * inner;
}

FddCheck stationary_fdd_check(const QuadrantPoint& theta, std::span<const double> s_grid,
                              std::span<const QuadrantPoint> z_list, std::size_t n_samples, Rng& rng) {
    if (z_list.size() != s_grid.size() || z_list.empty())
        throw std::invalid_argument("stationary_fdd_check: need one time per argument");
    ComplexAccumulator acc;
    for (std::size_t n = 0; n < n_samples; ++n) {
        const auto path = sample_stationary_path(theta, s_grid, rng);
        Complex v{1.0, 0.0};
        for (std::size_t j = 0; j < path.size(); ++j) v *= F(path[j].vec(), z_list[j]);
        acc.add(v);
    }
    FddCheck out;
    out.simulated = acc.estimate();
    out.recursion = g_k_evaluate(theta, z_list, s_grid, n_samples, rng);
    out.residual = out.simulated.mean - out.recursion.mean;
    out.se = std::hypot(out.simulated.se, out.recursion.se);
    return out;
}

}  // namespace mcb
