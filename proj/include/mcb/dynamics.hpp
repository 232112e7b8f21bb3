#pragma once

#include "mcb/geometry.hpp"
#include "mcb/measures.hpp"
#include "mcb/path_record.hpp"
#include "mcb/random.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mcb {

enum class Scheme { TauLeap, HarmonicSplit };
enum class RecordMode { TotalsOnly, FullConfig, JumpLog };

const char* to_string(Scheme s);
const char* to_string(RecordMode m);

struct SimParams {
    Scheme scheme = Scheme::HarmonicSplit;
    double h = 0.01;
    TruncationWindow window{1e-3};
    double horizon = 1.0;
    std::uint64_t seed = 0;
    RecordMode record_mode = RecordMode::TotalsOnly;
    // Totals are recorded every `record_every` steps (and at the horizon).
    std::size_t record_every = 1;
    // Model times at which full site snapshots are taken in any mode. Steps
    // are shortened to land on them exactly.
    std::vector<double> snapshot_times;
    // JumpLog keeps only events with |displacement| >= this floor.
    double jump_log_floor = 0.0;
    std::size_t recompute_period = 10000;
    // TauLeap: a site whose expected jump count in one step exceeds this is
    // advanced by the exact frozen-total transition (harmonic draw from the
    // heat-flowed point) instead of by individual jumps.
    double fast_site_threshold = 1e4;
    // TauLeap guard: abort the run (partial record) when one step would need
    // more jumps than this.
    std::uint64_t max_jumps_per_step = 100000000;

    void validate() const;
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SystemState {
public:
    SystemState() = default;
    explicit SystemState(std::vector<BoundaryPoint> sites, double clock = 0.0);

    // N sites, first half Type1 with magnitude m1, second half Type2 with m2.
    static SystemState half_half(std::size_t n, double m1 = 1.0, double m2 = 1.0);

    std::size_t n_sites() const { return sites_.size(); }
    const std::vector<BoundaryPoint>& sites() const { return sites_; }
    const BoundaryPoint& site(std::size_t k) const { return sites_.at(k); }
    double z1() const { return z1_; }
    double z2() const { return z2_; }
    Vec2 totals() const { return {z1_, z2_}; }
    double clock() const { return clock_; }

    // Replaces a site and updates the cached totals incrementally.
    void set_site(std::size_t k, const BoundaryPoint& p);
    void set_clock(double t) { clock_ = t; }
    void recompute_totals();
    // Largest deviation of the cached totals from a fresh recomputation.
    double totals_drift() const;
    std::vector<QuadrantPoint> quadrant_points() const;

private:
    std::vector<BoundaryPoint> sites_;
    double z1_ = 0.0;
    double z2_ = 0.0;
    double clock_ = 0.0;
};

// (z1 - x1(k), z2 - x2(k)).
Vec2 mean_field_drift(const SystemState& state, std::size_t k);
// Jump intensity per unit nu-mass: opposite-type mean over the magnitude.
double jump_rate(const SystemState& state, std::size_t k);
BoundaryPoint apply_jump(const BoundaryPoint& x, const JumpMark& mark);

// Receives per-site moves: (site, mark if any, displacement, time).
using JumpSink = std::function<void(std::size_t, const std::optional<JumpMark>&, const Vec2&)>;

// One tau-leap step of size h with rates frozen at the start of the step.
struct TauLeapOptions {
    double fast_site_threshold = 1e4;
    std::uint64_t max_jumps = UINT64_MAX;
};

void step_tau_leap(SystemState& state, double h, const RestrictedNu& nu, Rng& rng,
                   const JumpSink* sink = nullptr, const TauLeapOptions& options = {});
// One step of size h: each site is replaced by a harmonic-measure draw from
// its heat-flowed position (totals frozen at the start of the step).
void step_harmonic_split(SystemState& state, double h, Rng& rng, const JumpSink* sink = nullptr);

// Called after every completed step.
using StepObserver = std::function<void(const SystemState&)>;

PathRecord simulate(const SystemState& initial, const SimParams& params);
PathRecord simulate(const SystemState& initial, const SimParams& params, Rng& rng,
                    const StepObserver& observer = {});

// Advances `state` in place to params.horizon (model time), no recording.
void advance(SystemState& state, const SimParams& params, Rng& rng, const StepObserver& observer = {});

// beta_N = N / log N.
double time_scale(std::size_t n);
PathRecord rescaled_view(const PathRecord& record, std::size_t n);

std::vector<QuadrantPoint> heat_flow(std::span<const QuadrantPoint> x0, double t);

}  // namespace mcb
