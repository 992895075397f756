#pragma once

#include <string>
#include <vector>

#include "wirecalc/core.hpp"
#include "wirecalc/expr.hpp"
#include "wirecalc/wiring.hpp"

namespace wirecalc {

/// Coordinate names of a euclid typed set: a dim-1 port contributes its own
/// name, a dim-n port contributes name1..namen.
std::vector<std::string> coord_names(const TypedFiniteSet& tfs);

/// An open system of ordinary differential equations on an all-euclid box:
/// one dynamics expression per state variable (over input coordinates and
/// state variables) and one readout expression per output coordinate (over
/// state variables only).
class ContinuousSystem {
public:
    ContinuousSystem(Box box, std::vector<std::string> state_vars, std::vector<Expr> dynamics,
                     std::vector<Expr> readout);

    const Box& box() const { return box_; }
    std::size_t state_dim() const { return state_vars_.size(); }
    const std::vector<std::string>& state_vars() const { return state_vars_; }
    const std::vector<Expr>& dynamics() const { return dynamics_; }
    const std::vector<Expr>& readout() const { return readout_; }
    const std::vector<std::string>& input_coords() const { return input_coords_; }

    Env make_env(const std::vector<double>& input, const std::vector<double>& state) const;
    std::vector<double> eval_dynamics(const std::vector<double>& input,
                                      const std::vector<double>& state) const;
    std::vector<double> eval_readout(const std::vector<double>& state) const;

private:
    Box box_;
    std::vector<std::string> state_vars_;
    std::vector<Expr> dynamics_;
    std::vector<Expr> readout_;
    std::vector<std::string> input_coords_;
};

ContinuousSystem cs_parallel(const ContinuousSystem& f1, const ContinuousSystem& f2);

/// Wiring application by substitution: inner input coordinates are replaced
/// by outer input coordinates or readout expressions, so the composite stays
/// printable and differentiable.
ContinuousSystem cs_apply(const WiringDiagram& w, const ContinuousSystem& f);

/// The discrete system with update s + eps * f(a, s); states are real
/// vectors, not enumerable.
class EulerSystem {
public:
    EulerSystem(ContinuousSystem source, double epsilon);

    const ContinuousSystem& source() const { return source_; }
    double epsilon() const { return eps_; }

    std::vector<double> update(const std::vector<double>& input,
                               const std::vector<double>& state) const;
    std::vector<double> readout(const std::vector<double>& state) const;

    struct Trajectory {
        std::vector<std::vector<double>> states;
        std::vector<std::vector<double>> outputs;
    };
    Trajectory run(const std::vector<double>& initial,
                   const std::vector<std::vector<double>>& inputs) const;

private:
    ContinuousSystem source_;
    double eps_;
};

EulerSystem euler(const ContinuousSystem& f, double eps);

/// Full solution set of an affine vector field at one input: a particular
/// solution plus a basis of the kernel. consistent=false means no steady
/// state exists at this input.
struct AffineSolution {
    bool consistent = false;
    std::vector<double> particular;
    std::vector<std::vector<double>> kernel_basis;
    std::vector<double> readout_at_particular;
};

/// Detects affinity symbolically (state-Jacobian entries must not reference
/// state variables) and solves exactly. Throws NotAffine otherwise.
AffineSolution solve_affine(const ContinuousSystem& f, const std::vector<double>& input);

bool is_affine_in_state(const ContinuousSystem& f);

struct NewtonConfig {
    int grid_points_per_dim = 5;
    double grid_lo = -10.0;
    double grid_hi = 10.0;
    int max_iterations = 100;
    double convergence = 1e-10;
    double dedup_radius = 1e-6;
};

struct Root {
    std::vector<double> state;
    std::vector<double> readout;
    double residual = 0.0;
    bool heuristic = false;  // came from a multi-start search, may be incomplete
};

/// Multi-start Newton search. The result is a deduplicated list of numeric
/// roots, explicitly heuristic: absence from the list proves nothing.
std::vector<Root> newton_roots(const ContinuousSystem& f, const std::vector<double>& input,
                               const NewtonConfig& cfg = {});

enum class RootMode { ExactAffine, Newton };

/// Roots at one input, optionally filtered to readout ≈ output within tol.
std::vector<Root> steady_states_at(const ContinuousSystem& f, const std::vector<double>& input,
                                   RootMode mode, const std::vector<double>* output = nullptr,
                                   double output_tol = 1e-9, const NewtonConfig& cfg = {});

}  // namespace wirecalc
