#pragma once

// End-to-end invariant suite behind the `verify` subcommand.

#include <cstdint>
#include <string>
#include <vector>

namespace stairscale {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

[[nodiscard]] std::vector<CheckResult> run_invariant_suite(std::uint64_t seed);

}  // namespace stairscale
