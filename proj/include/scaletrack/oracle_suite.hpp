#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace scaletrack::oracle {

struct OracleResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct OracleCase {
    std::string name;
    std::string description;
    std::function<OracleResult(std::uint64_t seed)> run;
};

/// Every brute-force comparison, in a fixed order.
const std::vector<OracleCase>& oracle_cases();

/// Looks a case up by name; throws InvalidInput if unknown.
const OracleCase& find_case(const std::string& name);

/// Runs all cases. A case named by `force_fail` reports failure regardless
/// of its outcome (exercises the failure path).
std::vector<OracleResult> run_oracle_suite(std::uint64_t seed, const std::string& force_fail = "");

} // namespace scaletrack::oracle
