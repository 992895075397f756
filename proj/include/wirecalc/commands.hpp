#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wirecalc/dsl.hpp"

namespace wirecalc {

struct CommandOptions {
    std::string target;
    std::string wiring;
    std::vector<std::pair<std::string, std::string>> with;  // slot -> inhabitant
    std::string plan = "tensor-then-wire";                  // or serial-chain ("serial")
    std::string mode = "matrix";                            // or brute
    std::string format = "text";                            // or machine
    std::string init;
    std::string inputs;
    std::string at;
    std::string state;
    std::string output;
    std::string root_mode = "affine";  // or newton
    double eps = 0.1;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    std::size_t trials = 20;
    int jobs = 1;
};

struct CommandResult {
    int exit_code = 0;
    std::string output;
};

/// Dispatches one command verb against a workspace. Returns diagnostics in
/// the output with exit_code 1 on user errors; internal invariant failures
/// surface as exit_code 2.
CommandResult run_command(const Workspace& ws, const std::string& verb,
                          const CommandOptions& opt);

/// Executes a tokenized `do` statement (verb followed by key=value pairs).
CommandResult run_embedded(const Workspace& ws, const std::vector<std::string>& argv);

/// Runs every embedded command of the workspace; stops at the first failure.
CommandResult run_all_embedded(const Workspace& ws);

// rendering helpers shared with the test suites
std::string render_matrix_text(const Matrix<Nat64>& m);
std::string render_matrix_text(const Matrix<RealPlus>& m);
std::string render_set_matrix_text(const SetMatrix& m);
std::string machine_json(const Matrix<Nat64>& m);
std::string machine_json(const Matrix<RealPlus>& m);
std::string machine_json(const SetMatrix& m);

}  // namespace wirecalc
