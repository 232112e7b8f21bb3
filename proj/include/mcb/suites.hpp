#pragma once

#include "mcb/analysis.hpp"
#include "mcb/duality.hpp"
#include "mcb/reference.hpp"

#include <cstdint>
#include <vector>

namespace mcb {

// Values below this are read as an extinct type, and the rest are rounded
// to 12 significant digits before distributional comparisons. Totals that
// are constant in exact arithmetic then compare equal, and the near-zero
// residue left by a type dying out in a discrete scheme is not resolved.
double comparison_value(double x);
double ks_resolved(std::vector<double> a, std::vector<double> b);

// HarmonicSplit step used for rescaled runs: 0.01 below N = 128, else 0.05.
double default_large_n_step(std::size_t n);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

struct LargeNOptions {
    std::vector<std::size_t> n_grid{32, 128, 512};
    double t = 1.0;                 // rescaled horizon
    std::size_t replicas = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double m1 = 1.0;                // half/half start: type-1 and type-2 site masses
    double m2 = 1.0;
    double step = 0.0;              // 0: default_large_n_step(N)
    double census_eps = 0.25;
    double qv_truncation = 1.0;
    double window = 1.0;            // model-time lag of the second time point
    double reference_h = 1e-3;      // limit diffusion step
};

// Per-replica digest of one MCB(infinity) run to rescaled time t and on for
// `window` model time units. Marked sites are 0 (type 1 at the start) and
// N - 1 (type 2 at the start).
struct ReplicaSummary {
    Vec2 z_t;
    Vec2 sup_dev;                   // sup over the grid of |Z_s - Z_0| per coordinate
    double qv1 = 0.0;
    double qv2 = 0.0;
    double integral_z1z2 = 0.0;
    std::size_t census = 0;
    std::vector<BoundaryPoint> marked_t;
    std::vector<BoundaryPoint> marked_window;
};

struct LargeNBattery {
    std::size_t n = 0;
    double h = 0.0;
    Vec2 z0;
    std::vector<ReplicaSummary> replicas;
};

LargeNBattery run_large_n_battery(std::size_t n, const LargeNOptions& options);
std::vector<LargeNBattery> run_large_n_batteries(const LargeNOptions& options);
// Limit diffusion samples at time t from the batteries' common start.
std::vector<DiffusionState> limit_reference(const Vec2& z0, const LargeNOptions& options);

std::vector<TestReport> theorem1_suite(const std::vector<LargeNBattery>& batteries,
                                       const std::vector<DiffusionState>& reference, const LargeNOptions& options);
std::vector<TestReport> theorem1_suite(const LargeNOptions& options);

struct Theorem2Probe {
    QuadrantPoint y0;                // applied to the rescaled totals
    std::vector<BoundaryPoint> y;    // applied to the marked sites in order
};

struct PathProbe {
    std::vector<BoundaryPoint> first;   // per marked site, at time t
    std::vector<BoundaryPoint> second;  // per marked site, `window` later
};

std::vector<Theorem2Probe> default_theorem2_probes();
PathProbe default_path_probe();

std::vector<TestReport> theorem2_suite(const std::vector<LargeNBattery>& batteries,
                                       const std::vector<DiffusionState>& reference,
                                       const std::vector<Theorem2Probe>& probes, const PathProbe& path,
                                       const LargeNOptions& options);
std::vector<TestReport> theorem2_suite(const LargeNOptions& options);

// E[sup_{s <= t} |Z_s - Z_0|^{p_N}] per coordinate against 1218 t E[...].
std::vector<TestReport> sup_moment_suite(const std::vector<LargeNBattery>& batteries, const LargeNOptions& options);

struct GammaSuiteOptions {
    std::vector<double> gamma_grid{10.0, 50.0, 200.0};
    std::size_t n = 10;
    double t = 1.0;                 // model time
    std::size_t replicas = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double h = 0.01;
    double m1 = 1.0;
    double m2 = 1.0;
    double final_ks_max = 0.08;
};

std::vector<TestReport> theorem0_suite(const GammaSuiteOptions& options);

bool all_pass(const std::vector<TestReport>& reports);

}  // namespace mcb
