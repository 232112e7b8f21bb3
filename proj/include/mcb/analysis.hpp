#pragma once

#include "mcb/dynamics.hpp"
#include "mcb/path_record.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mcb {

// Jump and quadratic-variation rates of the rescaled type-1 total for the
// half/half configuration (sites k <= N/2 of type 1 with mass 2 z1, the rest
// of type 2 with mass 2 z2), per unit rescaled time. Case 1: jumps at type-1
// sites without a type change; case 2: type changes 2 -> 1.
struct HeuristicRates {
    double large_jump_rate_case1 = 0.0;  // (2/pi)(1/log N) eps^-2 z1 z2
    double large_jump_rate_case2 = 0.0;
    double qv_rate_case1 = 0.0;          // (1/log N) z1 z2 * truncated moment at eps N / (2 z1)
    double qv_rate_case2 = 0.0;          // same with the Axis2 moment at eps N / (2 z2)
    // The rates that the two bounds above dominate.
    double large_jump_rate_exact_case1 = 0.0;
    double large_jump_rate_exact_case2 = 0.0;
};

HeuristicRates heuristic_rates(std::size_t n, double eps, double z1, double z2);

// Integral of (y1 - 1)^2 nu(dy) over |y1 - 1| < x on Axis1.
double nu_centered_second_moment(double x);

// Cumulative realized quadratic variation of the totals in the record's own
// clock. Increments with Euclidean norm above `truncation` are dropped (the
// standard truncation x 1{|x| <= 1}). `companion` is (8/pi) times the
// trapezoid integral of z1 z2.
struct RealizedQv {
    std::vector<double> times;
    std::vector<double> qv1;
    std::vector<double> qv2;
    std::vector<double> companion;
    double integral_z1z2 = 0.0;  // final value, without the 8/pi factor
};

RealizedQv realized_qv(const PathRecord& record, double truncation = 1.0);

// Predictable rate (per unit rescaled time) of the truncated quadratic
// variation of each rescaled total in the current state: N / log N times the
// sum over sites of I_k * integral of (J_i / N)^2 nu(dy) over marks whose move
// satisfies |J| <= truncation * N. Unlike the heuristic rates this covers any
// configuration and includes the own-mass loss at type changes.
Vec2 qv_compensator_rate(const SystemState& state, double truncation = 1.0);

// Number of logged site moves with |displacement| / N > eps before time t in
// the record's clock, and (4 t / log N) eps^-2 z1(0) z2(0) for this record.
struct JumpCensus {
    std::size_t count = 0;
    double bound = 0.0;
};

JumpCensus jump_census(const PathRecord& record, double eps, std::size_t n, double t);
// (4 t / log N) eps^-2 m, with m an estimate of E[Z1_0 Z2_0].
double jump_census_bound(double eps, std::size_t n, double t, double mean_z1z2);

// (2/N) sum_k x_i(k) (2 + |log x_i(k)|), with 0 log 0 = 0.
double log_moment_statistic(const SystemState& state, int i);

// 2 - 1/log N.
double sup_moment_exponent(std::size_t n);
// 1218 T E[Z1 Z2 + Z1 + Z2] at time 0.
double sup_moment_bound(double horizon, double mean_z1z2, double mean_z1, double mean_z2);

// N^2 / (N^p log N) / (2 - p) with p = 2 - 1/log N.
double lemma28_constant(std::size_t n);

// (|log(x + y)|, a + |log x|) for x > 0, 0 <= y <= a.
std::pair<double, double> log_bound_check(double x, double y, double a);

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    std::size_t n = 0;
    bool pass = false;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string note;
};

TestReport make_report(std::string name, double statistic, double threshold, std::size_t n, std::uint64_t seed,
                       std::string note = {});

}  // namespace mcb
