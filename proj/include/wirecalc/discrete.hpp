#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "wirecalc/core.hpp"
#include "wirecalc/semimat.hpp"
#include "wirecalc/wiring.hpp"

namespace wirecalc {

/// A state label is a tuple of atoms, flattened left-to-right; labels of
/// composite systems concatenate the component atoms.
using StateLabel = std::vector<std::string>;

std::string label_text(const StateLabel& label);

/// Counters that make the exponential-savings claim checkable: the matrix
/// pipeline must finish with composite_states_enumerated still at zero.
struct Instrumentation {
    static void reset();
    /// States materialized by ds_parallel (composite state-set construction).
    static std::uint64_t composite_states_enumerated();
    /// (input, state) pairs visited by steady-state scans.
    static std::uint64_t steady_scan_pairs();

    static void count_composite_states(std::uint64_t n);
    static void count_scan_pairs(std::uint64_t n);
};

/// A Moore-style open dynamical system on an all-finite box: total readout
/// and update tables indexed by flat indices. Totality is validated at
/// construction, not at run time.
class DiscreteSystem {
public:
    DiscreteSystem(Box box, std::vector<StateLabel> states, std::vector<std::size_t> readout,
                   std::vector<std::size_t> update);

    const Box& box() const { return box_; }
    std::size_t state_count() const { return states_.size(); }
    const std::vector<StateLabel>& states() const { return states_; }
    const StateLabel& state(std::size_t s) const;
    std::size_t state_index(const StateLabel& label) const;

    std::size_t input_size() const { return input_size_; }
    std::size_t output_size() const { return output_size_; }

    std::size_t readout(std::size_t state) const;
    std::size_t update(std::size_t input_flat, std::size_t state) const;

    Point readout_point(std::size_t state) const;

private:
    Box box_;
    std::vector<StateLabel> states_;
    std::vector<std::size_t> readout_;
    std::vector<std::size_t> update_;  // [input_flat * state_count + state]
    std::size_t input_size_, output_size_;
};

struct InitializedDiscreteSystem {
    DiscreteSystem system;
    std::size_t initial;

    InitializedDiscreteSystem(DiscreteSystem sys, std::size_t initial_state);
};

/// Finite-state weighted variant: a non-negative weight per state stands in
/// for the measure of that state's singleton.
struct WeightedDiscreteSystem {
    DiscreteSystem system;
    std::vector<RealPlus> weights;

    WeightedDiscreteSystem(DiscreteSystem sys, std::vector<RealPlus> state_weights);
};

/// Parallel composition: product states in first-factor-major order, so that
/// steady-state matrices compose by Kronecker product.
DiscreteSystem ds_parallel(const DiscreteSystem& f1, const DiscreteSystem& f2);
WeightedDiscreteSystem ws_parallel(const WeightedDiscreteSystem& f1,
                                   const WeightedDiscreteSystem& f2);

/// Application of a wiring diagram: same states, rerouted readout and update.
DiscreteSystem ds_apply(const WiringDiagram& w, const DiscreteSystem& f);
WeightedDiscreteSystem ws_apply(const WiringDiagram& w, const WeightedDiscreteSystem& f);

/// Same state labels and pointwise-equal tables.
bool ds_equal(const DiscreteSystem& a, const DiscreteSystem& b);

struct StreamResult {
    std::vector<std::size_t> states;   // length |inputs|+1
    std::vector<std::size_t> outputs;  // flat output per state, same length
};

StreamResult run_stream(const InitializedDiscreteSystem& f, const std::vector<Point>& inputs);

/// Entry (a,b) counts the states fixed by input a whose readout is b.
Matrix<Nat64> steady_state_matrix(const DiscreteSystem& f, int jobs = 1);

/// Entry (a,b) sums the weights of those states instead of counting them.
Matrix<RealPlus> steady_state_measure(const WeightedDiscreteSystem& f);

}  // namespace wirecalc
