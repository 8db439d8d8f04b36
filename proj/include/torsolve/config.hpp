#pragma once

#include "torsolve/geometry.hpp"
#include "torsolve/material.hpp"
#include "torsolve/plasticity.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace torsolve {

struct ScheduleConfig {
    double theta_max_ratio = 3.0;  ///< sweep end, as a multiple of first-yield twist
    int steps = 12;
    std::vector<double> ratios;       ///< explicit sweep ratios; overrides max/steps when non-empty
    double theta_ratio = 1.0;         ///< single solve, as a multiple of first-yield twist
    std::optional<double> theta;      ///< single solve, absolute twist; overrides theta_ratio
    double continuation_step = 1.25;  ///< largest twist ratio between warm-started solves
};

struct OutputConfig {
    std::string directory = "out";
    int field_grid = 0;  ///< extra interior field points (approximate count), 0 = collocation points only
};

struct ConvergenceConfig {
    std::vector<std::pair<int, int>> grid;  ///< (N, M target) cells
    double theta_ratio = 3.0;
};

struct RunConfig {
    SectionShape shape = SectionShape::rectangle(1.0, 1.0);
    MaterialModel material = BilinearCurve{1.0, 0.0, 1.0, 0.0};
    DiscretizationOptions discretization;
    SolverOptions solver;
    ScheduleConfig schedule;
    OutputConfig output;
    ConvergenceConfig convergence;

    /// Yield stress used for closed-form references (the metal phase of a graded section).
    double reference_yield_stress() const;
};

/// Parses the INI text; unknown sections or keys are rejected. Throws ConfigError.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Parses a comma- or whitespace-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text, const std::string& what);

}  // namespace torsolve
