// Runs the acceptance criteria and prints one line per criterion.
// Arguments: optional criterion ids (default: all).

#include "mcb/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
    mcb::AcceptanceOptions o;
    o.seed = 1;
    for (int i = 1; i < argc; ++i) o.criteria.push_back(std::atoi(argv[i]));
    bool all = true;
    mcb::run_acceptance(o, [&](const mcb::CriterionResult& r) {
        all = all && r.pass;
        std::printf("%s (%.1f s)\n", mcb::format_criterion_line(r).c_str(), r.seconds);
        std::fflush(stdout);
    });
    std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
