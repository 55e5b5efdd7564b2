#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace delam {

struct SuiteResult {
    std::string name;
    int passed = 0;
    int failed = 0;
    std::string first_failure;
};

/// Exhaustive enumeration against the interface dynamic program.
SuiteResult selfcheck_dp_bruteforce(std::uint64_t seed, int instances = 200);
/// DP outputs certified semistable and unidirectional.
SuiteResult selfcheck_certificate(std::uint64_t seed, int instances = 200);
/// Incremental-functional gradient against central differences.
SuiteResult selfcheck_gradient(std::uint64_t seed, int directions = 20);
/// Stored-energy derivative in time against central differences.
SuiteResult selfcheck_power(std::uint64_t seed, int samples = 10);

std::vector<SuiteResult> run_selfchecks(std::uint64_t seed);

}  // namespace delam
