#pragma once

#include <functional>
#include <string>
#include <vector>

#include "strip_vortex/run_config.hpp"

namespace strip_vortex {

/// One measured quantity compared against a bound.
struct CheckItem {
    enum class Relation { AtMost, AtLeast, Below, Above };

    std::string name;
    double value = 0.0;
    Relation relation = Relation::AtMost;
    double bound = 0.0;
    bool passed = false;

    static CheckItem at_most(std::string name, double value, double bound);
    static CheckItem at_least(std::string name, double value, double bound);
    static CheckItem below(std::string name, double value, double bound);
    static CheckItem above(std::string name, double value, double bound);
    /// Boolean condition recorded as value 1 or 0 against the bound 1.
    static CheckItem holds(std::string name, bool condition);
};

const char* to_string(CheckItem::Relation relation);

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<CheckItem> items;
    std::string error;  // set when the criterion aborted with an exception

    bool passed() const;
};

struct ChecksReport {
    std::vector<CriterionResult> criteria;

    bool passed() const;
};

/// Numbered acceptance criteria. Each takes the run configuration for the obstacle, grid,
/// regime knobs, seed and suite parameters; exceptions are caught and recorded as failures.
CriterionResult check_kernel(const RunConfig& config);
CriterionResult check_boundary_solver(const RunConfig& config);
CriterionResult check_green_function(const RunConfig& config);
CriterionResult check_background_flow(const RunConfig& config);
CriterionResult check_landscape_regimes(const RunConfig& config);
CriterionResult check_window_patches(const RunConfig& config);
CriterionResult check_layer_patch(const RunConfig& config);
CriterionResult check_brute_force(const RunConfig& config);

using CriterionCallback = std::function<void(const CriterionResult&)>;

/// Run criteria 1 to 8 in order; `on_result` is called after each one.
ChecksReport run_checks(const RunConfig& config, const CriterionCallback& on_result = {});

}  // namespace strip_vortex
