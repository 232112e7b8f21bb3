#include "mcb/analysis.hpp"

#include "mcb/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace mcb {

double nu_centered_second_moment(double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("nu_centered_second_moment: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double upper = nu_truncated_second_moment(Axis::Axis1, 1.0 + x);
    if (x >= 1.0) return upper;
    return upper - nu_truncated_second_moment(Axis::Axis1, 1.0 - x);
}

HeuristicRates heuristic_rates(std::size_t n, double eps, double z1, double z2) {
    if (n < 3) throw std::invalid_argument("heuristic_rates: N must be at least 3");
    if (!(eps > 0.0)) throw std::invalid_argument("heuristic_rates: eps must be positive");
    if (!(z1 >= 0.0) || !(z2 >= 0.0)) throw std::invalid_argument("heuristic_rates: masses must be nonnegative");
    HeuristicRates r;
    if (z1 * z2 == 0.0) return r;
    const double dn = static_cast<double>(n);
    const double log_n = std::log(dn);
    const double prod = z1 * z2;
    const double l1 = eps * dn / (2.0 * z1);
    const double l2 = eps * dn / (2.0 * z2);
    r.large_jump_rate_case1 = 2.0 / kPi / log_n / (eps * eps) * prod;
    r.large_jump_rate_case2 = r.large_jump_rate_case1;
    r.qv_rate_case1 = prod / log_n * nu_centered_second_moment(l1);
    r.qv_rate_case2 = prod / log_n * nu_truncated_second_moment(Axis::Axis2, l2);
    // (N / log N) (N / 2) * rate per site * nu mass of the large marks.
    const double sites = dn / log_n * dn / 2.0;
    r.large_jump_rate_exact_case1 = sites * z2 / (2.0 * z1) * nu_axis1_complement_mass(l1);
    r.large_jump_rate_exact_case2 = sites * z1 / (2.0 * z2) * nu_axis2_tail_mass(l2);
    return r;
}

RealizedQv realized_qv(const PathRecord& record, double truncation) {
    if (record.size() < 2) throw std::invalid_argument("realized_qv: need at least two samples");
    if (!(truncation > 0.0)) throw std::invalid_argument("realized_qv: truncation must be positive");
    const auto& t = record.times;
    const double dt0 = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double dt = t[i + 1] - t[i];
        const bool last = i + 2 == t.size();
        if (dt > dt0 * (1.0 + 1e-6) || (!last && dt < dt0 * (1.0 - 1e-6)))
            throw std::invalid_argument("realized_qv: record is not on a uniform grid");
    }
    RealizedQv out;
    out.times = t;
    out.qv1.assign(t.size(), 0.0);
    out.qv2.assign(t.size(), 0.0);
    out.companion.assign(t.size(), 0.0);
    double integral = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const Vec2& a = record.totals[i - 1];
        const Vec2& b = record.totals[i];
        const double d1 = b.x1 - a.x1;
        const double d2 = b.x2 - a.x2;
        const bool keep = std::hypot(d1, d2) <= truncation;
        out.qv1[i] = out.qv1[i - 1] + (keep ? d1 * d1 : 0.0);
        out.qv2[i] = out.qv2[i - 1] + (keep ? d2 * d2 : 0.0);
        integral += 0.5 * (a.x1 * a.x2 + b.x1 * b.x2) * (t[i] - t[i - 1]);
        out.companion[i] = 8.0 / kPi * integral;
    }
    out.integral_z1z2 = integral;
    return out;
}

Vec2 qv_compensator_rate(const SystemState& state, double truncation) {
    if (!(truncation > 0.0)) throw std::invalid_argument("qv_compensator_rate: truncation must be positive");
    const std::size_t n = state.n_sites();
    if (n < 3) throw std::invalid_argument("qv_compensator_rate: N must be at least 3");
    const double dn = static_cast<double>(n);
    double own[2] = {0.0, 0.0};    // contributions to the site's own coordinate
    double other[2] = {0.0, 0.0};  // contributions to the opposite coordinate
    for (const auto& p : state.sites()) {
        const double m = p.magnitude();
        if (!(m > 0.0)) continue;
        const int t = p.type() - 1;
        const double l = truncation * dn / m;
        // Axis1 marks move the own coordinate by m (y1 - 1). Axis2 marks move
        // the site from (m, 0) to (0, m y2), which is allowed when
        // m sqrt(1 + y2^2) <= truncation N.
        double a = nu_centered_second_moment(l);
        double b = 0.0;
        if (l > 1.0) {
            a += kAxis2Mass * (1.0 - 1.0 / (l * l));
            b = nu_truncated_second_moment(Axis::Axis2, std::sqrt(l * l - 1.0));
        }
        own[t] += m * a;
        other[t] += m * b;
    }
    // Rate I = (opposite mean) / m, squared move m^2 (...) / N^2, clock N / log N.
    const double scale = 1.0 / (dn * std::log(dn));
    return {scale * (state.z2() * own[0] + state.z1() * other[1]),
            scale * (state.z1() * own[1] + state.z2() * other[0])};
}

double jump_census_bound(double eps, std::size_t n, double t, double mean_z1z2) {
    if (n < 3) throw std::invalid_argument("jump_census_bound: N must be at least 3");
    if (!(eps > 0.0)) throw std::invalid_argument("jump_census_bound: eps must be positive");
    return 4.0 * t / std::log(static_cast<double>(n)) / (eps * eps) * mean_z1z2;
}

JumpCensus jump_census(const PathRecord& record, double eps, std::size_t n, double t) {
    if (!record.has_jump_log) throw std::invalid_argument("jump_census: record has no jump log");
    if (record.size() == 0) throw std::invalid_argument("jump_census: empty record");
    JumpCensus out;
    const double dn = static_cast<double>(n);
    for (const auto& j : record.jumps)
        if (j.time < t && j.displacement.norm() / dn > eps) ++out.count;
    const Vec2& z0 = record.totals.front();
    out.bound = jump_census_bound(eps, n, t, z0.x1 * z0.x2);
    return out;
}

double log_moment_statistic(const SystemState& state, int i) {
    if (i != 1 && i != 2) throw std::invalid_argument("log_moment_statistic: i must be 1 or 2");
    if (state.n_sites() == 0) return 0.0;
    double sum = 0.0;
    for (const auto& p : state.sites()) {
        const double x = p.coordinate(i);
        if (x > 0.0) sum += x * (2.0 + std::abs(std::log(x)));
    }
    return 2.0 * sum / static_cast<double>(state.n_sites());
}

double sup_moment_exponent(std::size_t n) {
    if (n < 3) throw std::invalid_argument("sup_moment_exponent: N must be at least 3");
    return 2.0 - 1.0 / std::log(static_cast<double>(n));
}

double sup_moment_bound(double horizon, double mean_z1z2, double mean_z1, double mean_z2) {
    return 1218.0 * horizon * (mean_z1z2 + mean_z1 + mean_z2);
}

double lemma28_constant(std::size_t n) {
    if (n < 3) throw std::invalid_argument("lemma28_constant: N must be at least 3");
    const double dn = static_cast<double>(n);
    const double log_n = std::log(dn);
    const double p = 2.0 - 1.0 / log_n;
    return dn * dn / (std::pow(dn, p) * log_n) / (2.0 - p);
}

std::pair<double, double> log_bound_check(double x, double y, double a) {
    if (!(x > 0.0)) throw std::invalid_argument("log_bound_check: x must be positive");
    if (!(y >= 0.0) || !(y <= a)) throw std::invalid_argument("log_bound_check: need 0 <= y <= a");
    return {std::abs(std::log(x + y)), a + std::abs(std::log(x))};
}

TestReport make_report(std::string name, double statistic, double threshold, std::size_t n, std::uint64_t seed,
                       std::string note) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.n = n;
    r.pass = statistic <= threshold;
    r.seed = seed;
    r.note = std::move(note);
    return r;
}

}  // namespace mcb
