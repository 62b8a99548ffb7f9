#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "klslab/measures.hpp"

namespace klslab {

// Plain key = value lines, '#' comments, one experiment per file.
struct ExperimentConfig {
    std::string command;  // simulate | verify | bounds
    Family family = Family::Gaussian;
    int dim = 4;
    int n_atoms = 1000;
    int q = 3;
    double t_end = 1.0;
    double dt = 1e-3;
    std::uint64_t master_seed = 0;
    int n_paths = 10;
    double slack = 1.1;
    int record_every = 1;
    std::string suite = "all";  // trace|swap|moments|tensor-lemmas|drift|martingale|potential|all
    int trace_cases = 1000;
    int swap_cases = 500;
    int lemma_seeds = 50;
    double alpha = 4.0;
    double beta = 0.5;
    double c = 1.0;
    double c_lv = 1.0;
    std::vector<double> d_list;
    bool inject_trace_violation = false;  // failure-path fixture
    std::string out_dir;                  // empty -> stdout where sensible
};

ExperimentConfig parse_config(std::istream& in, const std::string& filename);
ExperimentConfig load_config(const std::string& path);

// Validates ranges against the targeted operations; throws ConfigError.
void validate_config(const ExperimentConfig& config);

}  // namespace klslab
