#include "mcb/path_record.hpp"

#include <charconv>
#include <cmath>

namespace mcb {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string tool_version() { return "mcblab 1.0.0"; }

void write_csv_header(std::ostream& os, const CsvHeader& header) {
    os << "# " << tool_version() << " kind=" << header.kind << " config_hash=" << header.config_hash
       << " seed=" << header.seed << '\n';
}

void write_path_rows(std::ostream& os, std::size_t replica, const PathRecord& record, double beta) {
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        const double model = record.times[i] * record.time_scale;
        os << replica << ',' << format_double(model) << ',';
        if (beta > 0.0) os << format_double(model / beta);
        os << ',' << format_double(record.totals[i].x1) << ',' << format_double(record.totals[i].x2) << '\n';
    }
}

}  // namespace mcb
