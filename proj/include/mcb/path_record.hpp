#pragma once

#include "mcb/geometry.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mcb {

struct JumpEvent {
    double time = 0.0;
    std::size_t site = 0;
    std::optional<JumpMark> mark;  // absent for schemes without discrete marks
    Vec2 displacement;
};

struct Snapshot {
    double time = 0.0;
    std::vector<QuadrantPoint> sites;
};

struct PathRecord {
    // Sample times in the record's own clock; model time = time * time_scale.
    std::vector<double> times;
    std::vector<Vec2> totals;
    std::vector<Snapshot> snapshots;
    std::vector<JumpEvent> jumps;
    bool has_jump_log = false;
    double time_scale = 1.0;
    // Largest single coordinate seen along the path (diagnostic only).
    double max_coordinate = 0.0;
    bool complete = true;
    std::string error;

    std::size_t size() const { return times.size(); }
    const Vec2& final_totals() const { return totals.back(); }
    void push(double t, const Vec2& z) {
        times.push_back(t);
        totals.push_back(z);
    }
};

// Shortest round-trip decimal text for a double.
std::string format_double(double v);

struct CsvHeader {
    std::string kind;          // e.g. "path", "report", "table"
    std::string config_hash;   // hex
    std::uint64_t seed = 0;
};

std::string tool_version();
void write_csv_header(std::ostream& os, const CsvHeader& header);

// Rows: replica,time_model,time_rescaled,z1,z2. time_rescaled is empty when
// no rescaling applies (beta <= 0).
void write_path_rows(std::ostream& os, std::size_t replica, const PathRecord& record, double beta);

}  // namespace mcb
