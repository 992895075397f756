#include <doctest.h>

#include "fixtures.hpp"
#include "wirecalc/harness.hpp"

using namespace wirecalc;
using fixtures::my_state_machine;
using fixtures::second_system;

TEST_CASE("construction validates totality") {
    Box box = fixtures::machine_box();
    CHECK_THROWS_AS(DiscreteSystem(box, {{"1"}}, {0}, {0}), Error);      // update too short
    CHECK_THROWS_AS(DiscreteSystem(box, {{"1"}}, {7}, {0, 0}), Error);   // readout range
    CHECK_THROWS_AS(DiscreteSystem(box, {{"1"}}, {0}, {0, 9}), Error);   // update range
    CHECK_THROWS_AS(InitializedDiscreteSystem(my_state_machine(), 4), Error);
}

TEST_CASE("stream processing golden") {
    InitializedDiscreteSystem init(my_state_machine(), 0);  // state 1
    std::vector<Point> inputs = {Point::finite({0}), Point::finite({0}), Point::finite({1}),
                                 Point::finite({0}), Point::finite({1})};  // T,T,F,T,F
    StreamResult r = run_stream(init, inputs);
    std::vector<std::string> state_names;
    for (std::size_t s : r.states) state_names.push_back(label_text(init.system.state(s)));
    CHECK(state_names == std::vector<std::string>{"1", "2", "2", "3", "4", "4"});
    std::vector<std::string> outs;
    for (std::size_t b : r.outputs)
        outs.push_back(render_point(init.system.box().outputs,
                                    unflatten(init.system.box().outputs, b)));
    CHECK(outs == std::vector<std::string>{"Blue", "Red", "Red", "Green", "Blue", "Blue"});
}

TEST_CASE("empty stream returns the initial state and readout") {
    InitializedDiscreteSystem init(second_system(), 1);
    StreamResult r = run_stream(init, {});
    CHECK(r.states == std::vector<std::size_t>{1});
    CHECK(r.outputs == std::vector<std::size_t>{second_system().readout(1)});
}

TEST_CASE("a constant input holds a steady state") {
    DiscreteSystem f = my_state_machine();
    Matrix<Nat64> stst = steady_state_matrix(f);
    for (std::size_t a = 0; a < f.input_size(); ++a)
        for (std::size_t s = 0; s < f.state_count(); ++s) {
            if (f.update(a, s) != s) continue;
            InitializedDiscreteSystem init(f, s);
            std::vector<Point> constant(20, unflatten(f.box().inputs, a));
            StreamResult r = run_stream(init, constant);
            for (std::size_t st : r.states) CHECK(st == s);
        }
    CHECK(stst.at(0, 0) == Nat64(1));
}

TEST_CASE("steady-state matrix goldens") {
    Matrix<Nat64> m1 = steady_state_matrix(my_state_machine());
    CHECK(m1.to_dense() == std::vector<std::vector<Nat64>>{{Nat64(1), Nat64(0), Nat64(0)},
                                                           {Nat64(0), Nat64(2), Nat64(0)}});
    Matrix<Nat64> m2 = steady_state_matrix(second_system());
    CHECK(m2.to_dense() == std::vector<std::vector<Nat64>>{
                               {Nat64(1), Nat64(0)}, {Nat64(2), Nat64(0)}, {Nat64(0), Nat64(1)}});
}

TEST_CASE("input-blind all-fixing system fills one column") {
    Box box = fixtures::machine_box();
    std::vector<StateLabel> states = {{"u"}, {"v"}, {"w"}};
    std::vector<std::size_t> readout = {1, 1, 1};  // constant Blue
    std::vector<std::size_t> update = {0, 1, 2, 0, 1, 2};
    Matrix<Nat64> m = steady_state_matrix(DiscreteSystem(box, states, readout, update));
    CHECK(m.to_dense() == std::vector<std::vector<Nat64>>{{Nat64(0), Nat64(3), Nat64(0)},
                                                          {Nat64(0), Nat64(3), Nat64(0)}});
}

TEST_CASE("serial composition has twelve states and five steady states") {
    DiscreteSystem composed = ds_apply(
        fixtures::serial_diagram(fixtures::machine_box(), fixtures::second_box()),
        ds_parallel(my_state_machine(), second_system()));
    CHECK(composed.state_count() == 12);

    std::size_t steady = 0;
    Matrix<Nat64> direct(composed.box().inputs, composed.box().outputs);
    for (std::size_t a = 0; a < composed.input_size(); ++a)
        for (std::size_t s = 0; s < composed.state_count(); ++s)
            if (composed.update(a, s) == s) {
                ++steady;
                direct.add_to(a, composed.readout(s), Nat64(1));
            }
    CHECK(steady == 5);
    CHECK(direct == multiply(steady_state_matrix(my_state_machine()),
                             steady_state_matrix(second_system())));
    CHECK(direct.to_dense() ==
          std::vector<std::vector<Nat64>>{{Nat64(1), Nat64(0)}, {Nat64(4), Nat64(0)}});
}

TEST_CASE("parallel with the one-state closed system is the same system") {
    DiscreteSystem f = my_state_machine();
    DiscreteSystem unit(closed_box(), {{"u"}}, {0}, {0});
    DiscreteSystem padded = ds_parallel(f, unit);
    CHECK(padded.state_count() == f.state_count());
    for (std::size_t a = 0; a < f.input_size(); ++a)
        for (std::size_t s = 0; s < f.state_count(); ++s) {
            CHECK(padded.update(a, s) == f.update(a, s));
            CHECK(padded.readout(s) == f.readout(s));
        }
}

TEST_CASE("parallel state count multiplies") {
    DiscreteSystem p = ds_parallel(my_state_machine(), second_system());
    CHECK(p.state_count() == 12);
    CHECK(p.input_size() == 6);
    CHECK(steady_state_matrix(p) ==
          kronecker(steady_state_matrix(my_state_machine()),
                    steady_state_matrix(second_system())));
}

TEST_CASE("ds_apply with the identity preserves the system") {
    DiscreteSystem f = my_state_machine();
    CHECK(ds_equal(ds_apply(WiringDiagram::identity(f.box()), f), f));
}

TEST_CASE("ds_apply rejects a mismatched box") {
    CHECK_THROWS_AS(
        ds_apply(WiringDiagram::identity(fixtures::second_box()), my_state_machine()), Error);
}

TEST_CASE("functoriality and compositionality on random instances") {
    CHECK(check_ds_functoriality(41, 60).failures.empty());
    CHECK(check_ds_stst_compositionality(42, 60).failures.empty());
    CHECK(check_ms_stst_compositionality(43, 60).failures.empty());
}

TEST_CASE("row sums never exceed the state count") {
    Rng rng(44);
    for (int t = 0; t < 30; ++t) {
        Box box = random_finite_box(rng);
        DiscreteSystem f = random_discrete_system(rng, box);
        Matrix<Nat64> m = steady_state_matrix(f);
        for (std::size_t a = 0; a < m.rows(); ++a) {
            std::uint64_t total = 0;
            for (std::size_t b = 0; b < m.cols(); ++b) total += m.at(a, b).value();
            CHECK(total <= f.state_count());
        }
    }
}

TEST_CASE("weighted steady states") {
    DiscreteSystem f = my_state_machine();
    std::vector<RealPlus> ones(f.state_count(), RealPlus(1.0));
    Matrix<RealPlus> measured = steady_state_measure(WeightedDiscreteSystem(f, ones));
    Matrix<Nat64> counted = steady_state_matrix(f);
    for (std::size_t a = 0; a < counted.rows(); ++a)
        for (std::size_t b = 0; b < counted.cols(); ++b)
            CHECK(measured.at(a, b).value() ==
                  doctest::Approx(double(counted.at(a, b).value())));

    std::vector<RealPlus> zeros(f.state_count(), RealPlus(0.0));
    CHECK(steady_state_measure(WeightedDiscreteSystem(f, zeros)).nonzero_count() == 0);
}

TEST_CASE("instrumentation counts composite state materialization") {
    Instrumentation::reset();
    CHECK(Instrumentation::composite_states_enumerated() == 0);
    ds_parallel(my_state_machine(), second_system());
    CHECK(Instrumentation::composite_states_enumerated() == 12);
    steady_state_matrix(my_state_machine());
    CHECK(Instrumentation::steady_scan_pairs() == 8);
    Instrumentation::reset();
    CHECK(Instrumentation::composite_states_enumerated() == 0);
}

TEST_CASE("parallel steady-state scans match the single-threaded scan") {
    Rng rng(45);
    for (int t = 0; t < 10; ++t) {
        DiscreteSystem f = random_discrete_system(rng, random_finite_box(rng));
        CHECK(steady_state_matrix(f, 4) == steady_state_matrix(f, 1));
    }
}
