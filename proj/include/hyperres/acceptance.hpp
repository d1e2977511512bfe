#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hyperres {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    double time_limit = 0.0;
    // Named measured quantities, in the order they were computed.
    std::vector<std::pair<std::string, double>> metrics;
    std::string note;  // failure reason or caveat; empty on a clean pass
};

struct AcceptanceOptions {
    int threads = 1;
};

// Runs one acceptance criterion (1..10). A criterion passes only when every
// quantitative check holds and the wall time is within its limit. Library
// errors thrown while running are caught and reported as a failure.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opt = {});

// Preset potentials used by the suite, exposed so the CLI can describe them.
struct AcceptancePresets {
    static constexpr double bump_amplitude = 1.0, bump_radius = 1.0;
    static constexpr double well_amplitude = -3.0, well_radius = 1.5, well_inner = 0.5;
};

}  // namespace hyperres
