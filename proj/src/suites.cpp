#include "mcb/suites.hpp"

#include "mcb/measures.hpp"
#include "mcb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mcb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kReferenceTag = 0x7265666572656e63ULL;
constexpr std::uint64_t kGammaTag = 0x67616d6d61ULL;
constexpr std::uint64_t kInfinityTag = 0x696e66ULL;

std::string label(const char* base, std::size_t n) { return std::string(base) + ".N=" + std::to_string(n); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// Largest excess of a sequence over its predecessor, net of `slack[i]`.
double worst_increase(const std::vector<double>& v, const std::vector<double>& slack) {
    double worst = -kInf;
    for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i] - v[i - 1] - slack[i]);
    return v.size() < 2 ? 0.0 : worst;
}

std::string sequence_note(const char* key, const std::vector<double>& grid, const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += key + fmt(grid[i]) + ':' + fmt(v[i]);
    }
    return s;
}

Estimate mean_of(const std::vector<double>& xs) { return summarize(xs); }

// 3 SE, plus round-off room for totals that are conserved exactly.
double mean_threshold(const Estimate& e, double z0) { return 3.0 * e.se + 1e-9 * std::max(1.0, std::abs(z0)); }

}  // namespace

double comparison_value(double x) {
    if (std::abs(x) < 1e-9) return 0.0;
    const double e = std::floor(std::log10(std::abs(x)));
    const double scale = std::pow(10.0, 11.0 - e);
    return std::round(x * scale) / scale;
}

double ks_resolved(std::vector<double> a, std::vector<double> b) {
    for (auto& x : a) x = comparison_value(x);
    for (auto& x : b) x = comparison_value(x);
    return ks_distance(a, b);
}

double default_large_n_step(std::size_t n) { return n < 128 ? 0.01 : 0.05; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (tag * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

LargeNBattery run_large_n_battery(std::size_t n, const LargeNOptions& o) {
    if (n < 3) throw std::invalid_argument("run_large_n_battery: N must be at least 3");
    if (!(o.t > 0.0) || !(o.window > 0.0)) throw std::invalid_argument("run_large_n_battery: t and window must be positive");
    if (o.replicas < 2) throw std::invalid_argument("run_large_n_battery: need at least two replicas");
    const double beta = time_scale(n);
    LargeNBattery out;
    out.n = n;
    out.h = o.step > 0.0 ? o.step : default_large_n_step(n);
    const SystemState initial = SystemState::half_half(n, o.m1, o.m2);
    out.z0 = initial.totals();

    SimParams p;
    p.scheme = Scheme::HarmonicSplit;
    p.h = out.h;
    p.horizon = beta * o.t;
    p.record_mode = RecordMode::JumpLog;
    p.jump_log_floor = o.census_eps * static_cast<double>(n);
    SimParams tail = p;
    tail.record_mode = RecordMode::TotalsOnly;
    tail.horizon = p.horizon + o.window;

    auto one = [&](std::size_t, Rng& rng) {
        SystemState state = initial;
        const PathRecord rec = simulate(initial, p, rng, [&](const SystemState& s) {
            if (s.clock() >= p.horizon) state = s;
        });
        if (!rec.complete) throw SimulationError("run_large_n_battery: " + rec.error);
        const PathRecord view = rescaled_view(rec, n);
        const RealizedQv qv = realized_qv(view, o.qv_truncation);
        ReplicaSummary r;
        r.z_t = state.totals();
        const Vec2 z0 = rec.totals.front();
        for (const auto& z : rec.totals) {
            r.sup_dev.x1 = std::max(r.sup_dev.x1, std::abs(z.x1 - z0.x1));
            r.sup_dev.x2 = std::max(r.sup_dev.x2, std::abs(z.x2 - z0.x2));
        }
        r.qv1 = qv.qv1.back();
        r.qv2 = qv.qv2.back();
        r.integral_z1z2 = qv.integral_z1z2;
        r.census = jump_census(view, o.census_eps, n, o.t).count;
        r.marked_t = {state.site(0), state.site(n - 1)};
        advance(state, tail, rng);
        r.marked_window = {state.site(0), state.site(n - 1)};
        return r;
    };
    out.replicas = run_replicas<ReplicaSummary>(o.replicas, derive_seed(o.seed, n), o.workers, one);
    return out;
}

std::vector<LargeNBattery> run_large_n_batteries(const LargeNOptions& options) {
    for (std::size_t i = 1; i < options.n_grid.size(); ++i)
        if (!(options.n_grid[i] > options.n_grid[i - 1]))
            throw std::invalid_argument("run_large_n_batteries: N grid must increase");
    std::vector<LargeNBattery> out;
    for (std::size_t n : options.n_grid) out.push_back(run_large_n_battery(n, options));
    return out;
}

std::vector<DiffusionState> limit_reference(const Vec2& z0, const LargeNOptions& o) {
    return run_replicas<DiffusionState>(o.replicas, derive_seed(o.seed, kReferenceTag), o.workers,
                                        [&](std::size_t, Rng& rng) {
                                            return advance_limit_diffusion({z0.x1, z0.x2}, o.reference_h, o.t, rng);
                                        });
}

std::vector<TestReport> theorem1_suite(const std::vector<LargeNBattery>& batteries,
                                       const std::vector<DiffusionState>& reference, const LargeNOptions& o) {
    std::vector<TestReport> out;
    if (batteries.empty()) return out;
    std::vector<double> ref1, ref2;
    for (const auto& z : reference) {
        ref1.push_back(z.z1);
        ref2.push_back(z.z2);
    }
    std::vector<double> grid, ks1, ks2;
    for (const auto& b : batteries) {
        std::vector<double> a1, a2, census;
        double qv = 0.0, integral = 0.0;
        for (const auto& r : b.replicas) {
            a1.push_back(r.z_t.x1);
            a2.push_back(r.z_t.x2);
            census.push_back(static_cast<double>(r.census));
            qv += 0.5 * (r.qv1 + r.qv2);
            integral += r.integral_z1z2;
        }
        const std::size_t n = b.replicas.size();
        grid.push_back(static_cast<double>(b.n));
        ks1.push_back(ks_resolved(a1, ref1));
        ks2.push_back(ks_resolved(a2, ref2));
        out.push_back(make_report(label("theorem1.ks.z1", b.n), ks1.back(), kInf, n, o.seed, "value only"));
        out.push_back(make_report(label("theorem1.ks.z2", b.n), ks2.back(), kInf, n, o.seed, "value only"));

        const Estimate m1 = mean_of(a1), m2 = mean_of(a2);
        out.push_back(make_report(label("theorem1.mean.z1", b.n), std::abs(m1.mean - b.z0.x1), mean_threshold(m1, b.z0.x1), n, o.seed,
                                  "|mean - z0| <= 3 SE"));
        out.push_back(make_report(label("theorem1.mean.z2", b.n), std::abs(m2.mean - b.z0.x2), mean_threshold(m2, b.z0.x2), n, o.seed,
                                  "|mean - z0| <= 3 SE"));

        const double ratio = integral > 0.0 ? qv / integral : 0.0;
        const double target = 8.0 / kPi;
        const bool largest = &b == &batteries.back();
        out.push_back(make_report(label("theorem1.qv_ratio_error", b.n), std::abs(ratio - target) / target,
                                  largest ? 0.25 : kInf, n, o.seed,
                                  "ratio " + fmt(ratio) + (largest ? "; within 25% of 8/pi" : "; value only")));

        const Estimate c = mean_of(census);
        const double bound = jump_census_bound(o.census_eps, b.n, o.t, b.z0.x1 * b.z0.x2);
        out.push_back(make_report(label("theorem1.jump_census", b.n), c.mean, bound + 3.0 * c.se, n, o.seed,
                                  "mean count <= bound " + fmt(bound) + " + 3 SE"));
    }
    const std::vector<double> none(grid.size(), 0.0);
    out.push_back(make_report("theorem1.ks_trend.z1", worst_increase(ks1, none), 0.0, batteries.size(), o.seed,
                              sequence_note("N", grid, ks1)));
    out.push_back(make_report("theorem1.ks_trend.z2", worst_increase(ks2, none), 0.0, batteries.size(), o.seed,
                              sequence_note("N", grid, ks2)));
    return out;
}

std::vector<TestReport> theorem1_suite(const LargeNOptions& options) {
    const auto batteries = run_large_n_batteries(options);
    if (batteries.empty()) return {};
    return theorem1_suite(batteries, limit_reference(batteries.front().z0, options), options);
}

// Swapping the types of every argument conjugates F, so probes are chosen
// without such mirror pairs.
std::vector<Theorem2Probe> default_theorem2_probes() {
    using B = BoundaryPoint;
    return {
        {{1.0, 0.0}, {B::type1(1.0)}},
        {{1.0, 0.0}, {B::type2(1.0)}},
        {{1.0, 1.0}, {B::type1(0.25), B::type2(0.25)}},
        {{0.5, 2.0}, {B::type1(4.0)}},
        {{0.0, 0.0}, {B::type2(0.25), B::type1(1.0)}},
    };
}

PathProbe default_path_probe() {
    using B = BoundaryPoint;
    return {{B::type1(1.0), B::type2(1.0)}, {B::type2(0.25), B::type1(0.25)}};
}

std::vector<TestReport> theorem2_suite(const std::vector<LargeNBattery>& batteries,
                                       const std::vector<DiffusionState>& reference,
                                       const std::vector<Theorem2Probe>& probes, const PathProbe& path,
                                       const LargeNOptions& o) {
    std::vector<TestReport> out;
    if (batteries.empty()) return out;
    for (const auto& p : probes)
        if (p.y.size() > 2) throw std::invalid_argument("theorem2_suite: at most two marked sites");
    if (path.first.size() != path.second.size() || path.first.size() > 2)
        throw std::invalid_argument("theorem2_suite: path probe needs matching lists of at most two sites");

    std::vector<double> grid;
    for (const auto& b : batteries) grid.push_back(static_cast<double>(b.n));

    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        const auto& probe = probes[pi];
        ComplexAccumulator target;
        for (const auto& z : reference) {
            const Vec2 zv{z.z1, z.z2};
            Complex v = F(zv, probe.y0.vec());
            for (const auto& y : probe.y) v *= F(zv, y.vec());
            target.add(v);
        }
        const ComplexEstimate tgt = target.estimate();
        std::vector<double> diff, se;
        for (const auto& b : batteries) {
            ComplexAccumulator sim;
            for (const auto& r : b.replicas) {
                Complex v = F(r.z_t, probe.y0.vec());
                for (std::size_t j = 0; j < probe.y.size(); ++j) v *= F(r.marked_t[j].vec(), probe.y[j].vec());
                sim.add(v);
            }
            const ComplexEstimate s = sim.estimate();
            diff.push_back(std::abs(s.mean - tgt.mean));
            se.push_back(std::hypot(s.se, tgt.se));
            out.push_back(make_report(label(("theorem2.probe" + std::to_string(pi) + ".diff").c_str(), b.n),
                                      diff.back(), kInf, b.replicas.size(), o.seed, "se " + fmt(se.back())));
        }
        std::vector<double> slack(diff.size(), 0.0);
        for (std::size_t i = 1; i < diff.size(); ++i) slack[i] = 2.0 * std::hypot(se[i], se[i - 1]);
        out.push_back(make_report("theorem2.probe" + std::to_string(pi) + ".trend", worst_increase(diff, slack), 0.0,
                                  batteries.size(), o.seed, sequence_note("N", grid, diff)));
    }

    if (!path.first.empty()) {
        ComplexAccumulator target;
        for (const auto& z : reference) {
            const QuadrantPoint theta{z.z1, z.z2};
            Complex v{1.0, 0.0};
            for (std::size_t j = 0; j < path.first.size(); ++j)
                v *= g2_closed_form(theta, path.first[j], path.second[j], 0.0, o.window);
            target.add(v);
        }
        const ComplexEstimate tgt = target.estimate();
        for (const auto& b : batteries) {
            ComplexAccumulator sim;
            for (const auto& r : b.replicas) {
                Complex v{1.0, 0.0};
                for (std::size_t j = 0; j < path.first.size(); ++j)
                    v *= F(r.marked_t[j].vec(), path.first[j].vec()) * F(r.marked_window[j].vec(), path.second[j].vec());
                sim.add(v);
            }
            const ComplexEstimate s = sim.estimate();
            const double d = std::abs(s.mean - tgt.mean);
            const double combined = std::hypot(s.se, tgt.se);
            const bool largest = &b == &batteries.back();
            out.push_back(make_report(label("theorem2.path_g2", b.n), d, largest ? 3.0 * combined : kInf,
                                      b.replicas.size(), o.seed,
                                      "se " + fmt(combined) + (largest ? "; within 3 SE" : "; value only")));
        }
    }
    return out;
}

std::vector<TestReport> theorem2_suite(const LargeNOptions& options) {
    const auto batteries = run_large_n_batteries(options);
    if (batteries.empty()) return {};
    return theorem2_suite(batteries, limit_reference(batteries.front().z0, options), default_theorem2_probes(),
                          default_path_probe(), options);
}

std::vector<TestReport> sup_moment_suite(const std::vector<LargeNBattery>& batteries, const LargeNOptions& o) {
    std::vector<TestReport> out;
    for (const auto& b : batteries) {
        const double p = sup_moment_exponent(b.n);
        std::vector<double> s1, s2;
        for (const auto& r : b.replicas) {
            s1.push_back(std::pow(r.sup_dev.x1, p));
            s2.push_back(std::pow(r.sup_dev.x2, p));
        }
        const double bound = sup_moment_bound(o.t, b.z0.x1 * b.z0.x2, b.z0.x1, b.z0.x2);
        const Estimate e1 = mean_of(s1), e2 = mean_of(s2);
        out.push_back(make_report(label("sup_moment.z1", b.n), e1.mean, bound, b.replicas.size(), o.seed,
                                  "p " + fmt(p) + ", se " + fmt(e1.se)));
        out.push_back(make_report(label("sup_moment.z2", b.n), e2.mean, bound, b.replicas.size(), o.seed,
                                  "p " + fmt(p) + ", se " + fmt(e2.se)));
    }
    return out;
}

std::vector<TestReport> theorem0_suite(const GammaSuiteOptions& o) {
    for (std::size_t i = 1; i < o.gamma_grid.size(); ++i)
        if (!(o.gamma_grid[i] > o.gamma_grid[i - 1]))
            throw std::invalid_argument("theorem0_suite: gamma grid must increase");
    if (o.gamma_grid.empty()) throw std::invalid_argument("theorem0_suite: empty gamma grid");
    if (o.replicas < 2) throw std::invalid_argument("theorem0_suite: need at least two replicas");

    // Sites 0 (type 1 at the start) and N - 1 (type 2) are probed.
    struct Sample {
        Vec2 z;
        QuadrantPoint first;
        QuadrantPoint last;
    };
    const SystemState initial = SystemState::half_half(o.n, o.m1, o.m2);
    const Vec2 z0 = initial.totals();

    SimParams p;
    p.scheme = Scheme::HarmonicSplit;
    p.h = o.h;
    p.horizon = o.t;
    const auto limit = run_replicas<Sample>(o.replicas, derive_seed(o.seed, kInfinityTag), o.workers,
                                            [&](std::size_t, Rng& rng) {
                                                SystemState s = initial;
                                                advance(s, p, rng);
                                                return Sample{s.totals(), s.site(0).to_quadrant(),
                                                              s.site(o.n - 1).to_quadrant()};
                                            });
    std::vector<double> lim1, lim2;
    for (const auto& s : limit) {
        lim1.push_back(s.z.x1);
        lim2.push_back(s.z.x2);
    }
    // Type-2 probes would only conjugate these.
    std::vector<std::pair<bool, BoundaryPoint>> probes;
    for (bool last : {false, true})
        for (double m : {0.25, 1.0, 4.0}) probes.emplace_back(last, BoundaryPoint::type1(m));
    auto probe_value = [&](const Sample& s, std::size_t k) {
        return F(probes[k].first ? s.last : s.first, probes[k].second.vec());
    };
    std::vector<ComplexEstimate> lim_probe;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        ComplexAccumulator acc;
        for (const auto& s : limit) acc.add(probe_value(s, k));
        lim_probe.push_back(acc.estimate());
    }

    std::vector<TestReport> out;
    std::vector<double> ks1, ks2;
    std::vector<std::vector<double>> probe_diff(probes.size()), probe_se(probes.size());
    for (double gamma : o.gamma_grid) {
        GammaParams gp;
        gp.gamma = gamma;
        gp.h = o.h;
        const auto runs = run_replicas<Sample>(o.replicas, derive_seed(o.seed, kGammaTag), o.workers,
                                               [&](std::size_t, Rng& rng) {
                                                   auto sites = initial.quadrant_points();
                                                   advance_mcb_gamma(sites, gp, o.t, rng);
                                                   Vec2 z{0.0, 0.0};
                                                   for (const auto& q : sites) z = z + q.vec();
                                                   return Sample{(1.0 / static_cast<double>(sites.size())) * z,
                                                                 sites.front(), sites.back()};
                                               });
        std::vector<double> a1, a2;
        for (const auto& s : runs) {
            a1.push_back(s.z.x1);
            a2.push_back(s.z.x2);
        }
        const std::string g = "gamma=" + fmt(gamma);
        ks1.push_back(ks_resolved(a1, lim1));
        ks2.push_back(ks_resolved(a2, lim2));
        out.push_back(make_report("theorem0.ks.z1." + g, ks1.back(), kInf, o.replicas, o.seed, "value only"));
        out.push_back(make_report("theorem0.ks.z2." + g, ks2.back(), kInf, o.replicas, o.seed, "value only"));
        const Estimate m1 = mean_of(a1), m2 = mean_of(a2);
        out.push_back(make_report("theorem0.mean.z1." + g, std::abs(m1.mean - z0.x1), mean_threshold(m1, z0.x1), o.replicas, o.seed,
                                  "|mean - z0| <= 3 SE"));
        out.push_back(make_report("theorem0.mean.z2." + g, std::abs(m2.mean - z0.x2), mean_threshold(m2, z0.x2), o.replicas, o.seed,
                                  "|mean - z0| <= 3 SE"));
        for (std::size_t k = 0; k < probes.size(); ++k) {
            ComplexAccumulator acc;
            for (const auto& s : runs) acc.add(probe_value(s, k));
            const ComplexEstimate e = acc.estimate();
            probe_diff[k].push_back(std::abs(e.mean - lim_probe[k].mean));
            probe_se[k].push_back(std::hypot(e.se, lim_probe[k].se));
        }
    }
    const std::vector<double> none(o.gamma_grid.size(), 0.0);
    out.push_back(make_report("theorem0.ks_trend.z1", worst_increase(ks1, none), 0.0, o.gamma_grid.size(), o.seed,
                              sequence_note("gamma", o.gamma_grid, ks1)));
    out.push_back(make_report("theorem0.ks_trend.z2", worst_increase(ks2, none), 0.0, o.gamma_grid.size(), o.seed,
                              sequence_note("gamma", o.gamma_grid, ks2)));
    out.push_back(make_report("theorem0.ks_final.z1", ks1.back(), o.final_ks_max, o.replicas, o.seed));
    out.push_back(make_report("theorem0.ks_final.z2", ks2.back(), o.final_ks_max, o.replicas, o.seed));
    for (std::size_t k = 0; k < probes.size(); ++k) {
        std::vector<double> slack(o.gamma_grid.size(), 0.0);
        for (std::size_t i = 1; i < slack.size(); ++i) slack[i] = 2.0 * std::hypot(probe_se[k][i], probe_se[k][i - 1]);
        const std::string site = probes[k].first ? "last" : "first";
        out.push_back(make_report("theorem0.probe." + site + ".m=" + fmt(probes[k].second.magnitude()) + ".trend",
                                  worst_increase(probe_diff[k], slack), 0.0, o.gamma_grid.size(), o.seed,
                                  sequence_note("gamma", o.gamma_grid, probe_diff[k])));
    }
    return out;
}

bool all_pass(const std::vector<TestReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

}  // namespace mcb
