#pragma once

#include <complex>
#include <vector>

#include "wirecalc/continuous.hpp"
#include "wirecalc/core.hpp"
#include "wirecalc/dense.hpp"
#include "wirecalc/wiring.hpp"

namespace wirecalc {

/// An open linear system on an all-euclid box: state dynamics
/// s' = M_mid s + M_in a with readout b = M_out s.
class LinearSystem {
public:
    LinearSystem(Box box, std::size_t state_dim, Dense m_in, Dense m_mid, Dense m_out);

    const Box& box() const { return box_; }
    std::size_t state_dim() const { return state_dim_; }
    const Dense& m_in() const { return m_in_; }
    const Dense& m_mid() const { return m_mid_; }
    const Dense& m_out() const { return m_out_; }

private:
    Box box_;
    std::size_t state_dim_;
    Dense m_in_, m_mid_, m_out_;
};

/// Direct sum of every block.
LinearSystem ls_parallel(const LinearSystem& l1, const LinearSystem& l2);

/// Wiring application via the wiring derivative: N_in = M_in Phi_in,
/// N_mid = M_mid + M_in Phi_mid M_out, N_out = Phi_out M_out.
LinearSystem ls_apply(const WiringDiagram& w, const LinearSystem& l);

bool ls_approx_equal(const LinearSystem& a, const LinearSystem& b, double tol);

/// The three Jacobians of a continuous system at (input, state): input
/// derivative of the dynamics, state derivative of the dynamics, state
/// derivative of the readout.
LinearSystem linearize_at(const ContinuousSystem& f, const std::vector<double>& input,
                          const std::vector<double>& state);

/// Eigenvalues of a real square matrix: closed form for n <= 2, Hessenberg
/// reduction plus shifted QR iteration for 3 <= n <= 64.
std::vector<std::complex<double>> eigenvalues(const Dense& m);

enum class Stability { Stable, Unstable, Marginal };

const char* stability_name(Stability s);

/// Stable iff all eigenvalue real parts < -tol, unstable iff some > +tol,
/// marginal otherwise.
Stability classify_stability(const LinearSystem& l, double tol = 1e-9);
Stability classify_matrix_stability(const Dense& m_mid, double tol = 1e-9);

struct LinearizedSteadyState {
    std::vector<double> input;
    std::vector<double> output;
    std::vector<double> state;
    double residual = 0.0;
    bool heuristic = false;
    LinearSystem linearization;
};

/// The generalized-bifurcation-diagram payload: each steady state found at
/// each requested input, with its linearization attached.
std::vector<LinearizedSteadyState> stst_linearization(
    const ContinuousSystem& f, const std::vector<std::vector<double>>& inputs,
    RootMode mode = RootMode::ExactAffine, const NewtonConfig& cfg = {});

}  // namespace wirecalc
