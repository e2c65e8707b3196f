#pragma once

#include <string>
#include <vector>

#include "mda/stats.hpp"

namespace mda {

// One acceptance criterion: a fixed, pre-registered experiment. Thresholds
// and parameters are pinned in the implementation, not configurable.
struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<TestReport> reports;
    bool pass = false;
    double seconds = 0.0;
};

struct VerifyOptions {
    // Optional overrides for exploratory runs; acceptance uses the defaults.
    std::vector<double> T_list;   // criterion 3
    int theta_seeds = 0;          // criteria 3,4,5,7,8
    double T = 0.0;               // criteria 6,9
    std::uint64_t theta_seed = 0; // criteria 6,9,10
    int workers = 1;
};

CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

// Name -> criterion ids (a name may cover several, "all" covers every one).
std::vector<int> criteria_for_name(const std::string& name);
std::string criterion_name(int id);

} // namespace mda
