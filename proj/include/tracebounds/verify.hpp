#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tracebounds {

/// `full` uses the pinned acceptance sizes; `quick` cuts trial and probe
/// counts for a fast smoke run.
enum class VerifyScale { quick, full };

struct CheckOutcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id = 0;
    std::string name;
    double time_limit_seconds = 0.0;
    std::function<CheckOutcome(VerifyScale)> run;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;   ///< outcome passed and finished within the time limit
    std::string detail;
    double seconds = 0.0;
    double time_limit_seconds = 0.0;
};

/// The numbered acceptance criteria, in order.
const std::vector<Criterion>& acceptance_criteria();

/// Runs one criterion; exceptions count as failures and are reported in `detail`.
CriterionResult run_criterion(const Criterion& c, VerifyScale scale);

/// "PASS  [ 3] name (1.23 s / limit 30 s): detail"
std::string format_result(const CriterionResult& r);

} // namespace tracebounds
