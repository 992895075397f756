#include <doctest.h>

#include "fixtures.hpp"
#include "wirecalc/harness.hpp"
#include "wirecalc/wiring.hpp"

using namespace wirecalc;

namespace {

// the two-inner-box diagram with ports a,b,c,d / e,f,g and outer h,i / j,k:
// a<-h, b<-g, c<-f, d<-i; j<-e, k<-g
WiringDiagram explicit_diagram(PortType t_override = fixtures::tf(), bool break_g = false) {
    PortType t = t_override;
    PortType g_type = break_g ? fixtures::colors() : t;
    Box inner{TypedFiniteSet({{"a", t}, {"b", t}, {"c", t}, {"d", t}}),
              TypedFiniteSet({{"e", t}, {"f", t}, {"g", g_type}})};
    Box outer{TypedFiniteSet({{"h", t}, {"i", t}}), TypedFiniteSet({{"j", t}, {"k", t}})};
    return WiringDiagram::unchecked(
        inner, outer,
        {WireSource::outer_input(0), WireSource::inner_output(2), WireSource::inner_output(1),
         WireSource::outer_input(1)},
        {0, 2});
}

}  // namespace

TEST_CASE("validate accepts identity and the explicit tables") {
    Box b = fixtures::machine_box();
    CHECK(validate(WiringDiagram::identity(b)).empty());
    CHECK(validate(explicit_diagram()).empty());
}

TEST_CASE("validate reports both ends of a retyped wire") {
    auto violations = validate(explicit_diagram(fixtures::tf(), true));
    REQUIRE(violations.size() == 2);
    // port g feeds b and k; both connections must be named
    CHECK(violations[0].find("'b'") != std::string::npos);
    CHECK(violations[0].find("'g'") != std::string::npos);
    CHECK(violations[1].find("'k'") != std::string::npos);
    CHECK(violations[1].find("'g'") != std::string::npos);
}

TEST_CASE("identity wiring") {
    WiringDiagram closed = WiringDiagram::identity(closed_box());
    CHECK(closed.phi_in_map().empty());
    CHECK(closed.phi_out_map().empty());

    Box b = fixtures::machine_box();
    WiringDiagram id = WiringDiagram::identity(b);
    for (std::size_t y = 0; y < b.inputs.enumeration_size(); ++y)
        for (std::size_t x = 0; x < b.outputs.enumeration_size(); ++x) {
            Point yp = unflatten(b.inputs, y), xp = unflatten(b.outputs, x);
            CHECK(id.in_eval(yp, xp) == yp);
            CHECK(id.out_eval(xp) == xp);
        }
}

TEST_CASE("composing with identity leaves a diagram unchanged") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        Box inner = random_finite_box(rng);
        WiringDiagram phi = random_wiring(rng, inner);
        CHECK(extensionally_equal(compose(WiringDiagram::identity(phi.outer()), phi), phi));
        CHECK(extensionally_equal(compose(phi, WiringDiagram::identity(phi.inner())), phi));
    }
}

TEST_CASE("composition satisfies the evaluator identities") {
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        Box inner = random_finite_box(rng);
        WiringDiagram phi = random_wiring(rng, inner);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        WiringDiagram omega = compose(psi, phi);
        std::size_t zin = psi.outer().inputs.enumeration_size();
        std::size_t xout = inner.outputs.enumeration_size();
        auto check_at = [&](const Point& z, const Point& x) {
            CHECK(omega.in_eval(z, x) == phi.in_eval(psi.in_eval(z, phi.out_eval(x)), x));
            CHECK(omega.out_eval(x) == psi.out_eval(phi.out_eval(x)));
        };
        if (zin * xout <= 10000) {  // exhaustive where the index space allows
            for (std::size_t zi = 0; zi < zin; ++zi)
                for (std::size_t xi = 0; xi < xout; ++xi)
                    check_at(unflatten(psi.outer().inputs, zi),
                             unflatten(inner.outputs, xi));
        } else {
            for (int s = 0; s < 200; ++s)
                check_at(unflatten(psi.outer().inputs, rng.below(zin)),
                         unflatten(inner.outputs, rng.below(xout)));
        }
    }
}

TEST_CASE("composition is associative extensionally") {
    Rng rng(13);
    for (int t = 0; t < 30; ++t) {
        Box inner = random_finite_box(rng);
        WiringDiagram phi = random_wiring(rng, inner);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        WiringDiagram omega = random_wiring(rng, psi.outer());
        CHECK(extensionally_equal(compose(compose(omega, psi), phi),
                                  compose(omega, compose(psi, phi))));
    }
}

TEST_CASE("composition requires matching middle boxes") {
    Rng rng(14);
    WiringDiagram phi = random_wiring(rng, fixtures::machine_box());
    WiringDiagram psi = random_wiring(rng, fixtures::second_box());
    if (!phi.outer().types_equal(psi.inner()))
        CHECK_THROWS_AS(compose(psi, phi), Error);
}

TEST_CASE("sum with the closed identity pads a diagram") {
    Rng rng(15);
    WiringDiagram phi = random_wiring(rng, fixtures::machine_box());
    WiringDiagram padded = sum(phi, WiringDiagram::identity(closed_box()));
    CHECK(extensionally_equal(padded, phi));
    WiringDiagram two = sum(phi, phi);
    CHECK(two.inner().inputs.port_count() == 2 * phi.inner().inputs.port_count());
}

TEST_CASE("interchange of sum and composition") {
    Rng rng(16);
    for (int t = 0; t < 30; ++t) {
        Box b1 = random_finite_box(rng), b2 = random_finite_box(rng);
        WiringDiagram phi1 = random_wiring(rng, b1), phi2 = random_wiring(rng, b2);
        WiringDiagram psi1 = random_wiring(rng, phi1.outer());
        WiringDiagram psi2 = random_wiring(rng, phi2.outer());
        CHECK(extensionally_equal(compose(sum(psi1, psi2), sum(phi1, phi2)),
                                  sum(compose(psi1, phi1), compose(psi2, phi2))));
    }
}

TEST_CASE("serial diagram evaluators") {
    PortType i = fixtures::tf(), j = fixtures::colors(), k = fixtures::updown();
    Box b1{TypedFiniteSet({{"i", i}}), TypedFiniteSet({{"j", j}})};
    Box b2{TypedFiniteSet({{"j", j}}), TypedFiniteSet({{"k", k}})};
    WiringDiagram serial = fixtures::serial_diagram(b1, b2);
    // in_eval(i, (j1, j2)) = (i, j1) and out_eval(j1, j2) = j2
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t j1 = 0; j1 < 3; ++j1)
            for (std::size_t j2 = 0; j2 < 2; ++j2) {
                CHECK(serial.in_eval(Point::finite({a}), Point::finite({j1, j2})) ==
                      Point::finite({a, j1}));
                CHECK(serial.out_eval(Point::finite({j1, j2})) == Point::finite({j2}));
            }
}

TEST_CASE("feedback diagram evaluators") {
    PortType i = fixtures::tf(), jt = fixtures::colors(), kt = fixtures::updown();
    Box inner{TypedFiniteSet({{"k", kt}, {"i", i}}),
              TypedFiniteSet({{"k", kt}, {"j", jt}})};
    Box outer{TypedFiniteSet({{"i", i}}), TypedFiniteSet({{"j", jt}})};
    WiringDiagram fb = fixtures::feedback_diagram(inner, outer);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t kk = 0; kk < 2; ++kk)
            for (std::size_t jj = 0; jj < 3; ++jj) {
                CHECK(fb.in_eval(Point::finite({a}), Point::finite({kk, jj})) ==
                      Point::finite({kk, a}));
                CHECK(fb.out_eval(Point::finite({kk, jj})) == Point::finite({jj}));
            }
}

TEST_CASE("split-output diagram duplicates the output") {
    PortType b = fixtures::colors();
    Box inner{TypedFiniteSet({{"a", fixtures::tf()}}), TypedFiniteSet({{"b", b}})};
    Box outer{inner.inputs, TypedFiniteSet({{"b1", b}, {"b2", b}})};
    WiringDiagram split(inner, outer, {WireSource::outer_input(0)}, {0, 0});
    for (std::size_t v = 0; v < 3; ++v)
        CHECK(split.out_eval(Point::finite({v})) == Point::finite({v, v}));
}

TEST_CASE("derivative of the identity on a 1-dim box") {
    PortType r1 = PortType::euclid(1);
    Box b{TypedFiniteSet({{"a", r1}}), TypedFiniteSet({{"b", r1}})};
    WiringDerivative d = WiringDiagram::identity(b).derivative();
    CHECK(d.phi_in_d == Dense::from_rows({{1}}));
    CHECK(d.phi_mid_d == Dense::from_rows({{0}}));
    CHECK(d.phi_out_d == Dense::from_rows({{1}}));
}

TEST_CASE("derivative of the feedback loop") {
    WiringDerivative d = fixtures::conway_diagram().derivative();
    CHECK(d.phi_in_d == Dense::from_rows({{0}, {1}}));
    CHECK(d.phi_mid_d == Dense::from_rows({{1}, {0}}));
    CHECK(d.phi_out_d == Dense::from_rows({{1}}));
}

TEST_CASE("derivative requires euclid ports") {
    CHECK_THROWS_AS(WiringDiagram::identity(fixtures::machine_box()).derivative(), Error);
}

TEST_CASE("derivative chain rule") {
    Rng rng(17);
    for (int t = 0; t < 40; ++t) {
        Box inner = random_euclid_box(rng, 2, 2, 2);
        WiringDiagram phi = random_wiring(rng, inner);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        WiringDerivative p = phi.derivative(), q = psi.derivative();
        WiringDerivative o = compose(psi, phi).derivative();
        CHECK(o.phi_in_d == p.phi_in_d * q.phi_in_d);
        CHECK(o.phi_mid_d == p.phi_mid_d + p.phi_in_d * q.phi_mid_d * p.phi_out_d);
        CHECK(o.phi_out_d == q.phi_out_d * p.phi_out_d);
    }
}

TEST_CASE("derivative of a sum is block diagonal") {
    Rng rng(18);
    for (int t = 0; t < 20; ++t) {
        WiringDiagram phi1 = random_wiring(rng, random_euclid_box(rng, 2, 2, 2));
        WiringDiagram phi2 = random_wiring(rng, random_euclid_box(rng, 2, 2, 2));
        WiringDerivative a = phi1.derivative(), b = phi2.derivative();
        WiringDerivative s = sum(phi1, phi2).derivative();
        CHECK(s.phi_in_d == a.phi_in_d.direct_sum(b.phi_in_d));
        CHECK(s.phi_mid_d == a.phi_mid_d.direct_sum(b.phi_mid_d));
        CHECK(s.phi_out_d == a.phi_out_d.direct_sum(b.phi_out_d));
    }
}

TEST_CASE("each inner input coordinate is fed by exactly one source") {
    Rng rng(19);
    for (int t = 0; t < 20; ++t) {
        WiringDiagram phi = random_wiring(rng, random_euclid_box(rng, 2, 2, 2));
        WiringDerivative d = phi.derivative();
        for (std::size_t r = 0; r < d.phi_in_d.rows(); ++r) {
            double row_sum = 0;
            for (std::size_t c = 0; c < d.phi_in_d.cols(); ++c) row_sum += d.phi_in_d(r, c);
            for (std::size_t c = 0; c < d.phi_mid_d.cols(); ++c) row_sum += d.phi_mid_d(r, c);
            CHECK(row_sum == 1.0);
        }
    }
}
