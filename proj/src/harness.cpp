#include "wirecalc/harness.hpp"

#include <cmath>

namespace wirecalc {

namespace {

std::string symbol_name(std::size_t i) {
    static const char* names[] = {"A", "B", "C", "D", "E", "F"};
    return i < 6 ? names[i] : "S" + std::to_string(i);
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.real(lo, hi);
    return v;
}

}  // namespace

PortType random_finite_type(Rng& rng, std::size_t max_symbols) {
    std::size_t n = rng.range(2, max_symbols);
    std::vector<std::string> symbols;
    for (std::size_t i = 0; i < n; ++i) symbols.push_back(symbol_name(i));
    return PortType::finite(std::move(symbols));
}

Box random_finite_box(Rng& rng, std::size_t max_in, std::size_t max_out) {
    std::vector<Port> in, out;
    std::size_t ni = rng.range(1, max_in), no = rng.range(1, max_out);
    for (std::size_t i = 0; i < ni; ++i)
        in.push_back({"in" + std::to_string(i), random_finite_type(rng)});
    for (std::size_t i = 0; i < no; ++i)
        out.push_back({"out" + std::to_string(i), random_finite_type(rng)});
    return Box{TypedFiniteSet(std::move(in)), TypedFiniteSet(std::move(out))};
}

Box random_euclid_box(Rng& rng, std::size_t max_in, std::size_t max_out, std::size_t max_dim) {
    std::vector<Port> in, out;
    std::size_t ni = rng.range(1, max_in), no = rng.range(1, max_out);
    for (std::size_t i = 0; i < ni; ++i)
        in.push_back({"a" + std::to_string(i), PortType::euclid(rng.range(1, max_dim))});
    for (std::size_t i = 0; i < no; ++i)
        out.push_back({"b" + std::to_string(i), PortType::euclid(rng.range(1, max_dim))});
    return Box{TypedFiniteSet(std::move(in)), TypedFiniteSet(std::move(out))};
}

DiscreteSystem random_discrete_system(Rng& rng, const Box& box, std::size_t max_states) {
    std::size_t n = rng.range(1, max_states);
    std::vector<StateLabel> states;
    for (std::size_t s = 0; s < n; ++s) states.push_back({"s" + std::to_string(s)});
    std::size_t in = box.inputs.enumeration_size();
    std::size_t out = box.outputs.enumeration_size();
    std::vector<std::size_t> readout(n), update(in * n);
    for (auto& r : readout) r = rng.below(out);
    for (auto& u : update) u = rng.below(n);
    return DiscreteSystem(box, std::move(states), std::move(readout), std::move(update));
}

WeightedDiscreteSystem random_weighted_system(Rng& rng, const Box& box, std::size_t max_states) {
    DiscreteSystem sys = random_discrete_system(rng, box, max_states);
    std::vector<RealPlus> weights;
    for (std::size_t s = 0; s < sys.state_count(); ++s)
        weights.push_back(rng.chance(0.05) ? RealPlus::infinity() : RealPlus(rng.real(0.0, 2.0)));
    return WeightedDiscreteSystem(std::move(sys), std::move(weights));
}

LinearSystem random_linear_system(Rng& rng, const Box& box, std::size_t max_state_dim) {
    std::size_t n = rng.range(1, max_state_dim);
    std::size_t k = box.inputs.euclid_dims();
    std::size_t l = box.outputs.euclid_dims();
    Dense m_in(n, k), m_mid(n, n), m_out(l, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) m_in(i, j) = rng.real(-2.0, 2.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m_mid(i, j) = rng.real(-2.0, 2.0);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < n; ++j) m_out(i, j) = rng.real(-2.0, 2.0);
    return LinearSystem(box, n, std::move(m_in), std::move(m_mid), std::move(m_out));
}

ContinuousSystem random_affine_system(Rng& rng, const Box& box, std::size_t max_state_dim) {
    std::size_t n = rng.range(1, max_state_dim);
    std::vector<std::string> state_vars;
    for (std::size_t i = 0; i < n; ++i) state_vars.push_back("x" + std::to_string(i));
    std::vector<std::string> inputs = coord_names(box.inputs);
    std::vector<Expr> dynamics, readout;
    for (std::size_t i = 0; i < n; ++i) {
        Expr e = Expr::constant(rng.real(-1.0, 1.0));
        for (const auto& v : state_vars)
            e = e + Expr::constant(rng.real(-2.0, 2.0)) * Expr::var(v);
        for (const auto& v : inputs)
            e = e + Expr::constant(rng.real(-2.0, 2.0)) * Expr::var(v);
        dynamics.push_back(e);
    }
    for (std::size_t i = 0; i < box.outputs.euclid_dims(); ++i) {
        Expr e = Expr::constant(rng.real(-1.0, 1.0));
        for (const auto& v : state_vars)
            e = e + Expr::constant(rng.real(-2.0, 2.0)) * Expr::var(v);
        readout.push_back(e);
    }
    return ContinuousSystem(box, std::move(state_vars), std::move(dynamics), std::move(readout));
}

Expr random_expr(Rng& rng, const std::vector<std::string>& vars, int depth,
                 bool transcendental) {
    if (depth <= 0 || rng.chance(0.25)) {
        if (!vars.empty() && rng.chance(0.7)) return Expr::var(vars[rng.below(vars.size())]);
        return Expr::constant(rng.real(-2.0, 2.0));
    }
    switch (rng.below(transcendental ? 7 : 5)) {
        case 0: return random_expr(rng, vars, depth - 1, transcendental) +
                       random_expr(rng, vars, depth - 1, transcendental);
        case 1: return random_expr(rng, vars, depth - 1, transcendental) -
                       random_expr(rng, vars, depth - 1, transcendental);
        case 2: return random_expr(rng, vars, depth - 1, transcendental) *
                       random_expr(rng, vars, depth - 1, transcendental);
        case 3: {
            // denominator bounded away from zero so finite differences behave
            Expr g = random_expr(rng, vars, depth - 2, transcendental);
            return random_expr(rng, vars, depth - 1, transcendental) /
                   (Expr::constant(2.0) + g * g);
        }
        case 4:
            return Expr::pow(random_expr(rng, vars, depth - 1, transcendental),
                             static_cast<long long>(rng.range(2, 3)));
        case 5: {
            static const char* fns[] = {"sin", "cos", "tanh"};
            return Expr::call(fns[rng.below(3)], random_expr(rng, vars, depth - 1, true));
        }
        default:
            // exp of a bounded argument
            return Expr::call("exp",
                              Expr::call("tanh", random_expr(rng, vars, depth - 1, true)));
    }
}

WiringDiagram random_wiring(Rng& rng, const Box& inner, std::size_t max_extra_outputs) {
    std::vector<Port> outer_in;
    std::vector<WireSource> phi_in;
    for (std::size_t p = 0; p < inner.inputs.port_count(); ++p) {
        const PortType& t = inner.inputs.port(p).type;
        // candidate feedback sources of the same type
        std::vector<std::size_t> feedback;
        for (std::size_t q = 0; q < inner.outputs.port_count(); ++q)
            if (inner.outputs.port(q).type == t) feedback.push_back(q);
        if (!feedback.empty() && rng.chance(0.35)) {
            phi_in.push_back(WireSource::inner_output(feedback[rng.below(feedback.size())]));
            continue;
        }
        std::vector<std::size_t> reusable;
        for (std::size_t q = 0; q < outer_in.size(); ++q)
            if (outer_in[q].type == t) reusable.push_back(q);
        if (!reusable.empty() && rng.chance(0.3)) {
            phi_in.push_back(WireSource::outer_input(reusable[rng.below(reusable.size())]));
        } else {
            outer_in.push_back({"y" + std::to_string(outer_in.size()), t});
            phi_in.push_back(WireSource::outer_input(outer_in.size() - 1));
        }
    }
    std::vector<Port> outer_out;
    std::vector<std::size_t> phi_out;
    std::size_t n_out = inner.outputs.port_count() == 0
                            ? 0
                            : rng.range(1, inner.outputs.port_count() + max_extra_outputs - 1);
    for (std::size_t q = 0; q < n_out; ++q) {
        std::size_t src = rng.below(inner.outputs.port_count());
        outer_out.push_back({"z" + std::to_string(q), inner.outputs.port(src).type});
        phi_out.push_back(src);
    }
    Box outer{TypedFiniteSet(std::move(outer_in)), TypedFiniteSet(std::move(outer_out))};
    return WiringDiagram(inner, std::move(outer), std::move(phi_in), std::move(phi_out));
}

namespace {

template <typename Fn>
CheckReport run_trials(const std::string& law, std::uint64_t seed, std::size_t trials, Fn fn) {
    CheckReport report;
    report.law = law;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed * 1000003 + t);
        report.trials++;
        try {
            if (!fn(rng))
                report.failures.push_back(law + " violated at trial " + std::to_string(t));
        } catch (const std::exception& e) {
            report.failures.push_back(law + " raised at trial " + std::to_string(t) + ": " +
                                      e.what());
        }
    }
    return report;
}

bool real_matrix_close(const Matrix<RealPlus>& a, const Matrix<RealPlus>& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            RealPlus x = a.at(i, j), y = b.at(i, j);
            if (x.is_infinite() != y.is_infinite()) return false;
            if (!x.is_infinite() && std::abs(x.value() - y.value()) > tol) return false;
        }
    return true;
}

}  // namespace

CheckReport check_ds_functoriality(std::uint64_t seed, std::size_t trials) {
    return run_trials("DS functoriality", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        DiscreteSystem f = random_discrete_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        DiscreteSystem one_shot = ds_apply(compose(psi, phi), f);
        DiscreteSystem two_step = ds_apply(psi, ds_apply(phi, f));
        return ds_equal(one_shot, two_step);
    });
}

CheckReport check_ds_stst_compositionality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Stst naturality (counts)", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        DiscreteSystem f = random_discrete_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        if (!(steady_state_matrix(ds_apply(phi, f)) == apply(phi, steady_state_matrix(f))))
            return false;
        // monoidality against a second random system
        Box box2 = random_finite_box(rng);
        DiscreteSystem f2 = random_discrete_system(rng, box2);
        return steady_state_matrix(ds_parallel(f, f2)) ==
               kronecker(steady_state_matrix(f), steady_state_matrix(f2));
    });
}

CheckReport check_ms_stst_compositionality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Stst naturality (measures)", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        WeightedDiscreteSystem f = random_weighted_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        if (!real_matrix_close(steady_state_measure(ws_apply(phi, f)),
                               apply(phi, steady_state_measure(f)), 1e-9))
            return false;
        Box box2 = random_finite_box(rng);
        WeightedDiscreteSystem f2 = random_weighted_system(rng, box2);
        return real_matrix_close(steady_state_measure(ws_parallel(f, f2)),
                                 kronecker(steady_state_measure(f), steady_state_measure(f2)),
                                 1e-9);
    });
}

CheckReport check_set_stst_compositionality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Stst naturality (sets)", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        DiscreteSystem f = random_discrete_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        // flat mode must never raise for the steady-state pipeline
        SetMatrix wired = steady_state_sets(ds_apply(phi, f));
        SetMatrix composed = smat_apply(phi, steady_state_sets(f), UnionMode::Flat);
        if (!(wired == composed)) return false;
        Box box2 = random_finite_box(rng);
        DiscreteSystem f2 = random_discrete_system(rng, box2);
        return steady_state_sets(ds_parallel(f, f2)) ==
               smat_parallel(steady_state_sets(f), steady_state_sets(f2));
    });
}

namespace {

Matrix<Nat64> random_nat_matrix(Rng& rng, const Box& box) {
    Matrix<Nat64> m(box.inputs, box.outputs);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (rng.chance(0.04)) {
                m.set(i, j, Nat64::infinity());
            } else {
                m.set(i, j, Nat64(rng.below(4)));
            }
        }
    return m;
}

SetMatrix random_set_matrix(Rng& rng, const Box& box, std::size_t& counter) {
    SetMatrix m(box.inputs, box.outputs);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::size_t n = rng.below(3);
            for (std::size_t k = 0; k < n; ++k)
                m.insert(i, j, SetElem{{"e" + std::to_string(counter++)}, {}});
        }
    return m;
}

}  // namespace

CheckReport check_mat_functoriality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Mat functoriality", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        Matrix<Nat64> m = random_nat_matrix(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        if (!(apply(compose(psi, phi), m) == apply(psi, apply(phi, m)))) return false;
        // monoidality
        Box box2 = random_finite_box(rng);
        Matrix<Nat64> m2 = random_nat_matrix(rng, box2);
        WiringDiagram phi2 = random_wiring(rng, box2);
        return apply(sum(phi, phi2), kronecker(m, m2)) ==
               kronecker(apply(phi, m), apply(phi2, m2));
    });
}

CheckReport check_smat_functoriality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Set-matrix functoriality", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        std::size_t counter = 0;
        SetMatrix m = random_set_matrix(rng, box, counter);
        WiringDiagram phi = random_wiring(rng, box);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        SetMatrix one_shot = smat_apply(compose(psi, phi), m, UnionMode::Tagged);
        SetMatrix two_step =
            smat_apply(psi, smat_apply(phi, m, UnionMode::Tagged), UnionMode::Tagged);
        return canonical_flatten(one_shot) == canonical_flatten(two_step);
    });
}

CheckReport check_ls_functoriality(std::uint64_t seed, std::size_t trials) {
    return run_trials("LS functoriality", seed, trials, [](Rng& rng) {
        Box box = random_euclid_box(rng);
        LinearSystem l = random_linear_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        LinearSystem one_shot = ls_apply(compose(psi, phi), l);
        LinearSystem two_step = ls_apply(psi, ls_apply(phi, l));
        if (!ls_approx_equal(one_shot, two_step, 1e-12)) return false;
        // monoidality
        Box box2 = random_euclid_box(rng);
        LinearSystem l2 = random_linear_system(rng, box2);
        WiringDiagram phi2 = random_wiring(rng, box2);
        return ls_approx_equal(ls_apply(sum(phi, phi2), ls_parallel(l, l2)),
                               ls_parallel(ls_apply(phi, l), ls_apply(phi2, l2)), 1e-12);
    });
}

CheckReport check_cs_functoriality(std::uint64_t seed, std::size_t trials) {
    return run_trials("CS functoriality", seed, trials, [](Rng& rng) {
        Box box = random_euclid_box(rng);
        ContinuousSystem f = random_affine_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        ContinuousSystem one_shot = cs_apply(compose(psi, phi), f);
        ContinuousSystem two_step = cs_apply(psi, cs_apply(phi, f));
        std::size_t zin = one_shot.input_coords().size();
        for (int t = 0; t < 200; ++t) {
            std::vector<double> z = random_vector(rng, zin);
            std::vector<double> s = random_vector(rng, f.state_dim());
            std::vector<double> d1 = one_shot.eval_dynamics(z, s);
            std::vector<double> d2 = two_step.eval_dynamics(z, s);
            std::vector<double> r1 = one_shot.eval_readout(s);
            std::vector<double> r2 = two_step.eval_readout(s);
            for (std::size_t i = 0; i < d1.size(); ++i)
                if (std::abs(d1[i] - d2[i]) > 1e-12) return false;
            for (std::size_t i = 0; i < r1.size(); ++i)
                if (std::abs(r1[i] - r2[i]) > 1e-12) return false;
        }
        return true;
    });
}

CheckReport check_euler_compositionality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Euler compositionality", seed, trials, [](Rng& rng) {
        Box box = random_euclid_box(rng);
        ContinuousSystem f = random_affine_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        double eps = rng.real(0.05, 1.0);
        EulerSystem wired_then_euler = euler(cs_apply(phi, f), eps);
        EulerSystem e = euler(f, eps);
        std::size_t yin = phi.outer().inputs.euclid_dims();
        for (int t = 0; t < 200; ++t) {
            std::vector<double> y = random_vector(rng, yin);
            std::vector<double> s = random_vector(rng, f.state_dim());
            // discrete-style application of phi to the Euler system
            std::vector<double> b = e.readout(s);
            Point inner_in = phi.in_eval(Point::euclid(y), Point::euclid(b));
            std::vector<double> lhs = wired_then_euler.update(y, s);
            std::vector<double> rhs = e.update(inner_in.coords(), s);
            if (lhs != rhs) return false;  // identical arithmetic: exact equality
            std::vector<double> lhs_out = wired_then_euler.readout(s);
            Point rhs_out = phi.out_eval(Point::euclid(e.readout(s)));
            if (lhs_out != rhs_out.coords()) return false;
        }
        return true;
    });
}

CheckReport check_qmat_functoriality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Q-matrix functoriality", seed, trials, [](Rng& rng) {
        Box box = random_finite_box(rng);
        auto euclid_of = [](const TypedFiniteSet& s) {
            std::vector<Port> ports;
            for (const auto& p : s.ports()) ports.push_back({p.name, PortType::euclid(1)});
            return TypedFiniteSet(std::move(ports));
        };
        Box payload_box{euclid_of(box.inputs), euclid_of(box.outputs)};
        std::size_t counter = 0;
        SetMatrix base = random_set_matrix(rng, box, counter);
        QMatrix q(base, payload_box);
        for (const auto& [ij, cell] : base.entries())
            for (const auto& e : cell)
                q.attach(ij.first, ij.second, e, random_linear_system(rng, payload_box, 2));

        WiringDiagram phi = random_wiring(rng, box);
        WiringDiagram psi = random_wiring(rng, phi.outer());
        QMatrix one_shot = qmat_apply(compose(psi, phi), q);
        QMatrix two_step = qmat_apply(psi, qmat_apply(phi, q));
        if (!(canonical_flatten(one_shot.base()) == canonical_flatten(two_step.base())))
            return false;
        for (const auto& [ij, cell] : one_shot.base().entries()) {
            for (const auto& e : cell) {
                // match the two-step element carrying the same innermost tag
                for (const auto& e2 : two_step.base().at(ij.first, ij.second)) {
                    if (e2.atoms != e.atoms || e2.tags.front() != e.tags.front()) continue;
                    if (!ls_approx_equal(one_shot.payload(ij.first, ij.second, e),
                                         two_step.payload(ij.first, ij.second, e2), 1e-12))
                        return false;
                }
            }
        }
        return true;
    });
}

CheckReport check_linearization_compositionality(std::uint64_t seed, std::size_t trials) {
    return run_trials("Steady-state linearization compositionality", seed, trials, [](Rng& rng) {
        Box box = random_euclid_box(rng);
        ContinuousSystem f = random_affine_system(rng, box);
        WiringDiagram phi = random_wiring(rng, box);
        ContinuousSystem g = cs_apply(phi, f);
        std::vector<double> y = random_vector(rng, g.input_coords().size());
        AffineSolution sol = solve_affine(g, y);
        if (!sol.consistent || !sol.kernel_basis.empty()) return true;  // skip continua
        const std::vector<double>& s0 = sol.particular;
        LinearSystem wire_then_lin = linearize_at(g, y, s0);
        // the inner input seen by f at this composite steady state
        std::vector<double> b = f.eval_readout(s0);
        Point inner_in = phi.in_eval(Point::euclid(y), Point::euclid(b));
        LinearSystem lin_then_wire = ls_apply(phi, linearize_at(f, inner_in.coords(), s0));
        return ls_approx_equal(wire_then_lin, lin_then_wire, 1e-9);
    });
}

std::vector<CheckReport> check_all_laws(std::uint64_t seed, std::size_t trials) {
    return {
        check_ds_functoriality(seed, trials),
        check_ds_stst_compositionality(seed + 1, trials),
        check_ms_stst_compositionality(seed + 2, trials),
        check_set_stst_compositionality(seed + 3, trials),
        check_mat_functoriality(seed + 4, trials),
        check_smat_functoriality(seed + 5, trials),
        check_ls_functoriality(seed + 6, trials),
        check_cs_functoriality(seed + 7, trials),
        check_euler_compositionality(seed + 8, trials),
        check_qmat_functoriality(seed + 9, trials),
        check_linearization_compositionality(seed + 10, trials),
    };
}

}  // namespace wirecalc
