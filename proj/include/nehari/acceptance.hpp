#pragma once

#include <string>
#include <vector>

namespace nehari {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> criteria;     // empty runs 1..9
    bool corrupt_profile = false;  // doubles the profile samples before the gates
};

/// Runs the selected criteria in order; a criterion that throws is reported
/// as failed with the exception text.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

std::string format_result(const CriterionResult& result);

}  // namespace nehari
