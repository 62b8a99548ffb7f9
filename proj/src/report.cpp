#include "klslab/report.hpp"

#include <nlohmann/json.hpp>

namespace klslab {

std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Flag: return "flag";
        case Status::Fail: return "fail";
    }
    return "unknown";
}

bool VerificationReport::any_fail() const {
    for (const auto& c : checks)
        if (c.status == Status::Fail) return true;
    return false;
}

bool VerificationReport::any_flag() const {
    for (const auto& c : checks)
        if (c.status == Status::Flag) return true;
    return false;
}

nlohmann::json to_json(const CheckResult& r) {
    return nlohmann::json{{"check", r.check},   {"lhs", r.lhs},
                          {"rhs", r.rhs},       {"slack", r.slack},
                          {"seeds", r.seeds},   {"violations", r.violations},
                          {"z", r.z},           {"status", to_string(r.status)}};
}

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return nlohmann::json{{"suite", r.suite},
                          {"master_seed", r.master_seed},
                          {"log_convention", "natural"},
                          {"checks", checks}};
}

}  // namespace klslab
