#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace klslab {

enum class Status { Pass, Flag, Fail };

std::string to_string(Status s);

// Shared report schema: {check, lhs, rhs, slack, seeds, violations, z, status}.
// Hard-gate checks use Status::Fail on violation; statistical checks only flag.
struct CheckResult {
    std::string check;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 1.0;
    int seeds = 1;
    int violations = 0;
    double z = 0.0;
    Status status = Status::Pass;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::uint64_t master_seed = 0;
    std::string suite;

    bool any_fail() const;
    bool any_flag() const;
    void add(CheckResult r) { checks.push_back(std::move(r)); }
};

nlohmann::json to_json(const CheckResult& r);
nlohmann::json to_json(const VerificationReport& r);

}  // namespace klslab
