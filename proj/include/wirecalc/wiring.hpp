#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wirecalc/core.hpp"
#include "wirecalc/dense.hpp"

namespace wirecalc {

/// Where one inner input port is fed from: an outer input or an inner output.
struct WireSource {
    enum class Kind { OuterInput, InnerOutput };
    Kind kind;
    std::size_t port;

    bool operator==(const WireSource&) const = default;

    static WireSource outer_input(std::size_t port) { return {Kind::OuterInput, port}; }
    static WireSource inner_output(std::size_t port) { return {Kind::InnerOutput, port}; }
};

/// The three 0/1 coordinate matrices of a wiring diagram between euclid boxes.
/// Shapes: phi_in_d is |X_in dims| x |Y_in dims|, phi_mid_d is
/// |X_in dims| x |X_out dims|, phi_out_d is |Y_out dims| x |X_out dims|.
struct WiringDerivative {
    Dense phi_in_d;
    Dense phi_mid_d;
    Dense phi_out_d;
};

/// A wiring diagram from an inner box X to an outer box Y: phi_in says where
/// each inner input is fed from (an outer input or an inner output), phi_out
/// says which inner output each outer output reads. Outer inputs never route
/// directly to outer outputs.
class WiringDiagram {
public:
    WiringDiagram(Box inner, Box outer, std::vector<WireSource> phi_in,
                  std::vector<std::size_t> phi_out);

    /// Constructs without type checking, for building known-bad diagrams that
    /// validate() can then report on.
    static WiringDiagram unchecked(Box inner, Box outer, std::vector<WireSource> phi_in,
                                   std::vector<std::size_t> phi_out);

    static WiringDiagram identity(const Box& x);

    const Box& inner() const { return inner_; }
    const Box& outer() const { return outer_; }
    WireSource phi_in(std::size_t inner_input_port) const;
    std::size_t phi_out(std::size_t outer_output_port) const;
    const std::vector<WireSource>& phi_in_map() const { return phi_in_; }
    const std::vector<std::size_t>& phi_out_map() const { return phi_out_; }

    /// phi_in as a typed function into tfs_sum(outer.inputs, inner.outputs).
    TypedFunction phi_in_function() const;
    TypedFunction phi_out_function() const;

    /// Dependent product of phi_in: assembles the inner input point from an
    /// outer input point and the current inner output point.
    Point in_eval(const Point& outer_in, const Point& inner_out) const;
    /// Dependent product of phi_out: selects the outer output point.
    Point out_eval(const Point& inner_out) const;

    /// The three 0/1 matrices obtained by differentiating in_eval/out_eval.
    /// Requires all ports euclid.
    WiringDerivative derivative() const;

private:
    WiringDiagram() = default;
    Box inner_;
    Box outer_;
    std::vector<WireSource> phi_in_;
    std::vector<std::size_t> phi_out_;
};

/// Checks arity and port-type equality of both maps. Returns a list of
/// violations (empty means ok); never throws.
std::vector<std::string> validate(const WiringDiagram& w);

/// Categorical composition: phi wires X into Y, psi wires Y into Z; the result
/// wires X into Z.
WiringDiagram compose(const WiringDiagram& psi, const WiringDiagram& phi);

/// Monoidal sum: side-by-side diagrams on the box sums.
WiringDiagram sum(const WiringDiagram& a, const WiringDiagram& b);

/// Pointwise equality of in_eval/out_eval: exhaustive for finite boxes whose
/// index-space product does not exceed exhaustive_cap, sampled otherwise.
bool extensionally_equal(const WiringDiagram& a, const WiringDiagram& b,
                         std::uint64_t seed = 1, std::size_t samples = 200,
                         std::size_t exhaustive_cap = 10000);

}  // namespace wirecalc
