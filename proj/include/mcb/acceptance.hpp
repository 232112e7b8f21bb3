#pragma once

#include "mcb/analysis.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace mcb {

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::vector<int> criteria;  // empty: all of them, in order
    // Replica counts are multiplied by this (with small floors). Only the
    // determinism check uses values below 1; verdicts at reduced scale are
    // not acceptance verdicts.
    double scale = 1.0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string summary;  // one line
    double seconds = 0.0;
    std::vector<TestReport> reports;
};

constexpr int kCriterionCount = 13;

std::string criterion_title(int id);
// Criteria that finish in well under ten minutes on one core.
std::vector<int> quick_criteria();

CriterionResult run_criterion(int id, const AcceptanceOptions& options);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_done = {});

// "C<id> PASS|FAIL <title>: <summary>"
std::string format_criterion_line(const CriterionResult& r);

// Rows: criterion,name,statistic,threshold,n,pass,seed,note. No timings, so
// the text depends only on the options (minus the worker count).
void write_report_rows(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace mcb
