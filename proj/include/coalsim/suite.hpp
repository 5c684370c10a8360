#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace coalsim::suite {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteResult {
    std::uint64_t seed = 1;
    std::vector<CriterionResult> criteria;
    bool all_pass = false;
};

// Runs the full acceptance battery with a fixed root seed; each criterion
// prints one pass/fail line to `progress` (when non-null) as it completes.
SuiteResult run_all(std::uint64_t seed, std::ostream* progress);

// Runs a single criterion by id (1-based).
CriterionResult run_criterion(int id, std::uint64_t seed);

int criterion_count();

}  // namespace coalsim::suite
