#include "mcb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcb {

const char* to_string(Scheme s) { return s == Scheme::TauLeap ? "tau_leap" : "harmonic_split"; }

const char* to_string(RecordMode m) {
    switch (m) {
        case RecordMode::TotalsOnly: return "totals";
        case RecordMode::FullConfig: return "full";
        default: return "jumps";
    }
}

void SimParams::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("SimParams: h must be positive");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("SimParams: horizon must be finite and nonnegative");
    if (record_every == 0) throw std::invalid_argument("SimParams: record_every must be positive");
    if (recompute_period == 0) throw std::invalid_argument("SimParams: recompute_period must be positive");
    for (double t : snapshot_times)
        if (!(t >= 0.0)) throw std::invalid_argument("SimParams: snapshot times must be nonnegative");
}

SystemState::SystemState(std::vector<BoundaryPoint> sites, double clock) : sites_(std::move(sites)), clock_(clock) {
    if (sites_.empty()) throw std::invalid_argument("SystemState: need at least one site");
    recompute_totals();
}

SystemState SystemState::half_half(std::size_t n, double m1, double m2) {
    std::vector<BoundaryPoint> sites;
    sites.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        sites.push_back(k < n / 2 ? BoundaryPoint::type1(m1) : BoundaryPoint::type2(m2));
    return SystemState(std::move(sites));
}

void SystemState::set_site(std::size_t k, const BoundaryPoint& p) {
    const double inv = 1.0 / static_cast<double>(sites_.size());
    BoundaryPoint& old = sites_[k];
    z1_ += (p.coordinate(1) - old.coordinate(1)) * inv;
    z2_ += (p.coordinate(2) - old.coordinate(2)) * inv;
    if (z1_ < 0.0) z1_ = 0.0;
    if (z2_ < 0.0) z2_ = 0.0;
    old = p;
}

void SystemState::recompute_totals() {
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto& p : sites_) {
        s1 += p.coordinate(1);
        s2 += p.coordinate(2);
    }
    const double n = static_cast<double>(sites_.size());
    z1_ = s1 / n;
    z2_ = s2 / n;
}

double SystemState::totals_drift() const {
    SystemState fresh = *this;
    fresh.recompute_totals();
    return std::max(std::abs(fresh.z1_ - z1_), std::abs(fresh.z2_ - z2_));
}

std::vector<QuadrantPoint> SystemState::quadrant_points() const {
    std::vector<QuadrantPoint> out;
    out.reserve(sites_.size());
    for (const auto& p : sites_) out.push_back(p.to_quadrant());
    return out;
}

Vec2 mean_field_drift(const SystemState& state, std::size_t k) {
    const BoundaryPoint& x = state.site(k);
    return {state.z1() - x.coordinate(1), state.z2() - x.coordinate(2)};
}

double jump_rate(const SystemState& state, std::size_t k) {
    const BoundaryPoint& x = state.site(k);
    if (x.is_origin()) return 0.0;
    const double opposite = x.type() == 1 ? state.z2() : state.z1();
    return opposite / x.magnitude();
}

BoundaryPoint apply_jump(const BoundaryPoint& x, const JumpMark& mark) {
    if (x.is_origin()) throw std::logic_error("apply_jump: the origin has jump rate 0");
    if (!(mark.value >= 0.0)) throw std::invalid_argument("apply_jump: mark value must be nonnegative");
    const int type = mark.axis == Axis::Axis1 ? x.type() : 3 - x.type();
    return BoundaryPoint::of_type(type, x.magnitude() * mark.value);
}

namespace {

BoundaryPoint project(const QuadrantPoint& q, Rng& rng) {
    return q.interior() ? harmonic_sample(q, rng) : BoundaryPoint::from_quadrant(q);
}

}  // namespace

void step_tau_leap(SystemState& state, double h, const RestrictedNu& nu, Rng& rng, const JumpSink* sink,
                   const TauLeapOptions& options) {
    const double z1 = state.z1();
    const double z2 = state.z2();
    const double decay = std::exp(-h);
    const double gain = -std::expm1(-h);
    // Compensator per unit rate and magnitude, in (own, opposite) coordinates.
    const double comp_own = nu.first_moment_axis1() - nu.mass_axis2();
    const double comp_opp = nu_mean_axis2();
    const double total_mass = nu.total_mass();

    for (std::size_t k = 0; k < state.n_sites(); ++k) {
        const BoundaryPoint x = state.site(k);
        if (x.is_origin()) {
            QuadrantPoint q;
            q.x1 = gain * z1;
            q.x2 = gain * z2;
            const BoundaryPoint next = project(q, rng);
            if (sink) (*sink)(k, std::nullopt, next.vec());
            state.set_site(k, next);
            continue;
        }
        const int i = x.type();
        const double m = x.magnitude();
        const double z_own = i == 1 ? z1 : z2;
        const double z_opp = i == 1 ? z2 : z1;
        const double rate = z_opp / m;
        const double expected_jumps = h * rate * total_mass;
        if (expected_jumps > options.fast_site_threshold) {
            QuadrantPoint q;
            q.x1 = decay * x.coordinate(1) + gain * z1;
            q.x2 = decay * x.coordinate(2) + gain * z2;
            const BoundaryPoint next = harmonic_sample(q, rng);
            if (sink) (*sink)(k, std::nullopt, next.vec() - q.vec());
            state.set_site(k, next);
            continue;
        }

        // Linear drift toward the frozen totals minus the frozen compensator of
        // the simulated jumps, integrated exactly over the step. On the
        // opposite coordinate drift and compensator cancel identically.
        const double forcing_own = z_own - rate * m * comp_own;
        const double forcing_opp = z_opp - rate * m * comp_opp;
        double own = decay * m + gain * forcing_own;
        double opp = gain * forcing_opp;
        if (std::abs(opp) <= 1e-14 * (std::abs(z_opp) + 1.0)) opp = 0.0;
        own = std::max(own, 0.0);
        opp = std::max(opp, 0.0);
        QuadrantPoint q;
        q.x1 = i == 1 ? own : opp;
        q.x2 = i == 1 ? opp : own;
        BoundaryPoint cur = project(q, rng);

        const std::uint64_t n_jumps = rng.poisson(expected_jumps);
        if (n_jumps > options.max_jumps)
            throw SimulationError("step_tau_leap: jump count per step exceeds the configured limit");
        for (std::uint64_t j = 0; j < n_jumps && !cur.is_origin(); ++j) {
            const JumpMark mark = nu.sample(rng);
            const BoundaryPoint next = apply_jump(cur, mark);
            if (sink) (*sink)(k, mark, next.vec() - cur.vec());
            cur = next;
        }
        state.set_site(k, cur);
    }
    state.set_clock(state.clock() + h);
}

void step_harmonic_split(SystemState& state, double h, Rng& rng, const JumpSink* sink) {
    const double z1 = state.z1();
    const double z2 = state.z2();
    const double decay = std::exp(-h);
    const double gain = -std::expm1(-h);
    for (std::size_t k = 0; k < state.n_sites(); ++k) {
        const BoundaryPoint& x = state.site(k);
        QuadrantPoint q;
        q.x1 = decay * x.coordinate(1) + gain * z1;
        q.x2 = decay * x.coordinate(2) + gain * z2;
        const BoundaryPoint next = harmonic_sample(q, rng);
        if (sink) (*sink)(k, std::nullopt, next.vec() - q.vec());
        state.set_site(k, next);
    }
    state.set_clock(state.clock() + h);
}

namespace {

// Core time loop shared by simulate() and advance(). Steps are cut to land
// exactly on snapshot times and on the horizon.
void run_loop(SystemState& state, const SimParams& params, Rng& rng, const JumpSink* sink,
              const std::function<void(const SystemState&, std::size_t, bool)>& after_step) {
    params.validate();
    std::vector<double> stops;
    for (double t : params.snapshot_times)
        if (t > state.clock() && t < params.horizon) stops.push_back(t);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    stops.push_back(params.horizon);

    std::optional<RestrictedNu> nu;
    if (params.scheme == Scheme::TauLeap) nu.emplace(params.window);

    std::size_t step = 0;
    std::size_t stop_index = 0;
    while (state.clock() < params.horizon) {
        while (stop_index < stops.size() && stops[stop_index] <= state.clock()) ++stop_index;
        const double stop = stops[stop_index];
        const double t0 = state.clock();
        double dt = params.h;
        bool at_stop = false;
        if (t0 + dt >= stop - 1e-9 * params.h) {
            dt = stop - t0;
            at_stop = true;
        }
        if (params.scheme == Scheme::TauLeap)
            step_tau_leap(state, dt, *nu, rng, sink, {params.fast_site_threshold, params.max_jumps_per_step});
        else
            step_harmonic_split(state, dt, rng, sink);
        if (at_stop) state.set_clock(stop);
        ++step;
        if (step % params.recompute_period == 0) state.recompute_totals();
        if (after_step) after_step(state, step, at_stop);
    }
}

}  // namespace

void advance(SystemState& state, const SimParams& params, Rng& rng, const StepObserver& observer) {
    if (observer)
        run_loop(state, params, rng, nullptr, [&](const SystemState& s, std::size_t, bool) { observer(s); });
    else
        run_loop(state, params, rng, nullptr, {});
}

PathRecord simulate(const SystemState& initial, const SimParams& params) {
    Rng rng(params.seed);
    return simulate(initial, params, rng);
}

PathRecord simulate(const SystemState& initial, const SimParams& params, Rng& rng, const StepObserver& observer) {
    PathRecord rec;
    SystemState state = initial;
    auto max_coord = [](const SystemState& s) {
        double m = 0.0;
        for (const auto& p : s.sites()) m = std::max(m, p.magnitude());
        return m;
    };
    auto snapshot = [&rec](const SystemState& s) { rec.snapshots.push_back({s.clock(), s.quadrant_points()}); };
    const bool full = params.record_mode == RecordMode::FullConfig;
    rec.has_jump_log = params.record_mode == RecordMode::JumpLog;

    rec.push(state.clock(), state.totals());
    rec.max_coordinate = max_coord(state);
    const bool snap_initial = std::find(params.snapshot_times.begin(), params.snapshot_times.end(), state.clock()) !=
                              params.snapshot_times.end();
    if (full || snap_initial) snapshot(state);

    double step_start = state.clock();
    JumpSink sink = [&](std::size_t site, const std::optional<JumpMark>& mark, const Vec2& d) {
        if (d.norm() >= params.jump_log_floor && d.norm() > 0.0) rec.jumps.push_back({step_start, site, mark, d});
    };
    std::vector<double> wanted = params.snapshot_times;
    std::sort(wanted.begin(), wanted.end());

    auto after = [&](const SystemState& s, std::size_t step, bool at_stop) {
        const bool last = s.clock() >= params.horizon;
        const bool is_snapshot = at_stop && std::binary_search(wanted.begin(), wanted.end(), s.clock());
        if (step % params.record_every == 0 || last || is_snapshot) {
            if (rec.times.back() < s.clock()) {
                rec.push(s.clock(), s.totals());
                if (full) snapshot(s);
            }
        }
        if (is_snapshot && !full) snapshot(s);
        rec.max_coordinate = std::max(rec.max_coordinate, max_coord(s));
        step_start = s.clock();
        if (observer) observer(s);
    };
    try {
        run_loop(state, params, rng, rec.has_jump_log ? &sink : nullptr, after);
    } catch (const SimulationError& e) {
        rec.complete = false;
        rec.error = e.what();
    }
    return rec;
}

double time_scale(std::size_t n) {
    if (n < 3) throw std::invalid_argument("time_scale: N must be at least 3");
    const double dn = static_cast<double>(n);
    return dn / std::log(dn);
}

PathRecord rescaled_view(const PathRecord& record, std::size_t n) {
    const double beta = time_scale(n);
    PathRecord out = record;
    for (auto& t : out.times) t /= beta;
    for (auto& s : out.snapshots) s.time /= beta;
    for (auto& j : out.jumps) j.time /= beta;
    out.time_scale = record.time_scale * beta;
    return out;
}

std::vector<QuadrantPoint> heat_flow(std::span<const QuadrantPoint> x0, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_flow: t must be nonnegative");
    if (x0.empty()) return {};
    double m1 = 0.0;
    double m2 = 0.0;
    for (const auto& p : x0) {
        m1 += p.x1;
        m2 += p.x2;
    }
    QuadrantPoint mean;
    mean.x1 = m1 / static_cast<double>(x0.size());
    mean.x2 = m2 / static_cast<double>(x0.size());
    const double decay = std::exp(-t);
    const double gain = -std::expm1(-t);
    std::vector<QuadrantPoint> out;
    out.reserve(x0.size());
    for (const auto& p : x0) out.push_back(combine(decay, p, gain, mean));
    return out;
}

}  // namespace mcb
