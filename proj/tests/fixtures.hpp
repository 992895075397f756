#pragma once

// Shared fixtures: the 4-state traffic-light machine, the 3-state second
// box, and the small wiring diagrams used across suites.

#include "wirecalc/continuous.hpp"
#include "wirecalc/discrete.hpp"
#include "wirecalc/wiring.hpp"

namespace fixtures {

using namespace wirecalc;

inline PortType tf() { return PortType::finite({"T", "F"}); }
inline PortType colors() { return PortType::finite({"Red", "Blue", "Green"}); }
inline PortType updown() { return PortType::finite({"Up", "Down"}); }

inline Box machine_box() {
    return Box{TypedFiniteSet({{"a", tf()}}), TypedFiniteSet({{"b", colors()}})};
}

inline Box second_box() {
    return Box{TypedFiniteSet({{"a", colors()}}), TypedFiniteSet({{"b", updown()}})};
}

// states 1..4; readout 1->Blue 2->Red 3->Green 4->Blue
// T: 1->2 2->2 3->4 4->1 ; F: 1->1 2->3 3->4 4->4
inline DiscreteSystem my_state_machine() {
    std::vector<StateLabel> states = {{"1"}, {"2"}, {"3"}, {"4"}};
    std::vector<std::size_t> readout = {1, 0, 2, 1};  // Red=0 Blue=1 Green=2
    std::vector<std::size_t> update = {
        1, 1, 3, 0,  // input T
        0, 2, 3, 3,  // input F
    };
    return DiscreteSystem(machine_box(), states, readout, update);
}

// states p,q,r; readout p->Up q->Down r->Up
// Red: p->p q->p r->q ; Blue: p->p q->r r->r ; Green: p->q q->q r->p
inline DiscreteSystem second_system() {
    std::vector<StateLabel> states = {{"p"}, {"q"}, {"r"}};
    std::vector<std::size_t> readout = {0, 1, 0};  // Up=0 Down=1
    std::vector<std::size_t> update = {
        0, 0, 1,  // Red
        0, 2, 2,  // Blue
        1, 1, 0,  // Green
    };
    return DiscreteSystem(second_box(), states, readout, update);
}

/// Serial wiring with inner box b1 (+) b2: the first box reads the outer
/// input, feeds the second, and the second feeds the outer output.
inline WiringDiagram serial_diagram(const Box& b1, const Box& b2) {
    Box inner = box_sum(b1, b2);
    Box outer{b1.inputs, b2.outputs};
    std::vector<WireSource> phi_in;
    for (std::size_t p = 0; p < b1.inputs.port_count(); ++p)
        phi_in.push_back(WireSource::outer_input(p));
    for (std::size_t p = 0; p < b2.inputs.port_count(); ++p)
        phi_in.push_back(WireSource::inner_output(p));  // b1 outputs come first
    std::vector<std::size_t> phi_out;
    for (std::size_t q = 0; q < b2.outputs.port_count(); ++q)
        phi_out.push_back(b1.outputs.port_count() + q);
    return WiringDiagram(inner, outer, phi_in, phi_out);
}

/// The feedback diagram: inner box with inputs (fb, a) and outputs (fb, b);
/// the first output loops into the first input, the second leaves.
inline WiringDiagram feedback_diagram(const Box& inner, const Box& outer) {
    return WiringDiagram(inner, outer,
                         {WireSource::inner_output(0), WireSource::outer_input(0)}, {1});
}

/// One-dimensional feedback loop: X has inputs (b1, a), one output b2 wired
/// both back to b1 and out to b.
inline WiringDiagram conway_diagram() {
    PortType r1 = PortType::euclid(1);
    Box inner{TypedFiniteSet({{"b1", r1}, {"a", r1}}), TypedFiniteSet({{"b2", r1}})};
    Box outer{TypedFiniteSet({{"a", r1}}), TypedFiniteSet({{"b", r1}})};
    return WiringDiagram(inner, outer,
                         {WireSource::inner_output(0), WireSource::outer_input(0)}, {0});
}

inline ContinuousSystem conway_system() {
    PortType r1 = PortType::euclid(1);
    Box box{TypedFiniteSet({{"b1", r1}, {"a", r1}}), TypedFiniteSet({{"b2", r1}})};
    return ContinuousSystem(box, {"x"}, {parse_expr("2*x - 3*b1 + a")}, {parse_expr("x")});
}

}  // namespace fixtures
