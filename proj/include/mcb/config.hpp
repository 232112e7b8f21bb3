#pragma once

#include "mcb/geometry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcb {

// Line-oriented config text:
//
//   # comment
//   [section]
//   key = value   # trailing comment
//
// Keys are unique within a section. Values are kept as trimmed text.
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<ConfigEntry> parse_config_text(const std::string& text);

enum class Process { McbInfinity, McbGamma, LimitDiffusion, YTheta };
enum class InitialKind { HalfHalf, List, Stationary };
enum class SuiteKind { None, Theorem0, Theorem1, Theorem2, SupMoment };

struct ExperimentConfig {
    Process process = Process::McbInfinity;
    std::size_t n = 10;
    std::optional<double> gamma;           // iff process = mcb_gamma
    std::string scheme = "harmonic_split";  // harmonic_split | tau_leap | split_exit | euler_clamp
    double h = 0.01;
    std::optional<double> delta;            // iff scheme = tau_leap
    double horizon = 1.0;
    bool horizon_rescaled = false;          // horizon in units of N / log N
    std::size_t replicas = 100;
    std::uint64_t seed = 1;
    std::size_t record_every = 1;

    InitialKind initial = InitialKind::HalfHalf;
    double m1 = 1.0;
    double m2 = 1.0;
    std::vector<BoundaryPoint> sites;       // initial = list
    QuadrantPoint theta{1.0, 1.0};          // stationary draw and y_theta target

    SuiteKind suite = SuiteKind::None;
    std::vector<std::size_t> n_grid{32, 128, 512};
    std::vector<double> gamma_grid{10.0, 50.0, 200.0};

    // Duality tables.
    double duality_t = 1.0;
    double duality_s = 2.0;
    std::vector<std::pair<std::size_t, BoundaryPoint>> marks;  // empty: first site T1(1), last site T2(0.25)

    std::string out_dir = "mcblab-out";
    bool plots = true;
};

// Builds and validates a config. Errors name the field as [section].key.
ExperimentConfig config_from_entries(const std::vector<ConfigEntry>& entries);
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
void validate(const ExperimentConfig& c);

// Canonical text of everything that determines results, minus the seed:
// fixed section and key order, normalized values. Output paths and worker
// counts are excluded.
std::string canonical_text(const ExperimentConfig& c);
// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
std::string fnv1a_hex(const std::string& text);

const char* to_string(Process p);
const char* to_string(SuiteKind s);

// "T1:1.5", "T2:0.25", "O".
BoundaryPoint parse_boundary_point(const std::string& text);
std::string format_boundary_point(const BoundaryPoint& p);

}  // namespace mcb
