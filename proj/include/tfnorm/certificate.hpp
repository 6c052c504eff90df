#pragma once

#include <string>
#include <utility>
#include <vector>

namespace tfnorm {

/// Outcome of a certifier: hypothesis scan, empirical constant and its refinement behaviour.
struct Certificate {
    std::string name;
    bool hypotheses_ok = true;
    double weight_constant = 0.0; // box constant of the weight hypothesis (+inf when unbounded)
    double constant = 0.0;        // empirical constant on the base grid
    double refined = 0.0;         // same on the refined grid
    double relative_change = 0.0; // |refined / constant - 1|
    std::vector<std::pair<std::string, double>> details;

    void add(std::string key, double value) { details.emplace_back(std::move(key), value); }
    double detail(const std::string& key) const;
};

} // namespace tfnorm
