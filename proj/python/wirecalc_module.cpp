#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wirecalc/commands.hpp"
#include "wirecalc/harness.hpp"

namespace py = pybind11;
using namespace wirecalc;

namespace {

Dense dense_from_rows(const std::vector<std::vector<double>>& rows) {
    return Dense::from_rows(rows);
}

std::vector<std::vector<double>> dense_to_rows(const Dense& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

}  // namespace

PYBIND11_MODULE(_wirecalc, m) {
    m.doc() = "compositional open dynamical systems and steady-state matrices";

    py::register_exception<Error>(m, "WirecalcError");

    py::class_<PortType>(m, "PortType")
        .def_static("finite", &PortType::finite, py::arg("symbols"))
        .def_static("euclid", &PortType::euclid, py::arg("dim"))
        .def("is_finite", &PortType::is_finite)
        .def("is_euclid", &PortType::is_euclid)
        .def("__eq__", [](const PortType& a, const PortType& b) { return a == b; })
        .def("__repr__", &PortType::to_string);

    py::class_<TypedFiniteSet>(m, "TypedFiniteSet")
        .def(py::init([](const std::vector<std::pair<std::string, PortType>>& ports) {
                 std::vector<Port> ps;
                 for (const auto& [n, t] : ports) ps.push_back({n, t});
                 return TypedFiniteSet(std::move(ps));
             }),
             py::arg("ports"))
        .def("port_count", &TypedFiniteSet::port_count)
        .def("enumeration_size", &TypedFiniteSet::enumeration_size);

    py::class_<Point>(m, "Point")
        .def_static("finite", &Point::finite, py::arg("symbol_indices"))
        .def_static("euclid", &Point::euclid, py::arg("coords"));

    m.def("flat_index", &flat_index);
    m.def("unflatten", &unflatten);
    m.def("tfs_sum", &tfs_sum);
    m.def("render_point", &render_point);

    py::class_<Box>(m, "Box")
        .def(py::init([](const TypedFiniteSet& inputs, const TypedFiniteSet& outputs) {
                 return Box{inputs, outputs};
             }),
             py::arg("inputs"), py::arg("outputs"))
        .def_readonly("inputs", &Box::inputs)
        .def_readonly("outputs", &Box::outputs);

    py::class_<WireSource>(m, "WireSource")
        .def_static("outer_input", &WireSource::outer_input)
        .def_static("inner_output", &WireSource::inner_output);

    py::class_<WiringDiagram>(m, "WiringDiagram")
        .def(py::init<Box, Box, std::vector<WireSource>, std::vector<std::size_t>>(),
             py::arg("inner"), py::arg("outer"), py::arg("phi_in"), py::arg("phi_out"))
        .def_static("identity", &WiringDiagram::identity)
        .def("in_eval", &WiringDiagram::in_eval)
        .def("out_eval", &WiringDiagram::out_eval)
        .def("derivative", [](const WiringDiagram& w) {
            WiringDerivative d = w.derivative();
            return py::make_tuple(dense_to_rows(d.phi_in_d), dense_to_rows(d.phi_mid_d),
                                  dense_to_rows(d.phi_out_d));
        });
    m.def("compose", py::overload_cast<const WiringDiagram&, const WiringDiagram&>(&compose));
    m.def("wiring_sum", [](const WiringDiagram& a, const WiringDiagram& b) { return sum(a, b); });

    py::class_<Nat64>(m, "Nat")
        .def(py::init<std::uint64_t>())
        .def_static("infinity", &Nat64::infinity)
        .def("is_infinite", &Nat64::is_infinite)
        .def("__eq__", [](const Nat64& a, const Nat64& b) { return a == b; })
        .def("__repr__", &Nat64::to_string);

    py::class_<Matrix<Nat64>>(m, "NatMatrix")
        .def(py::init<TypedFiniteSet, TypedFiniteSet>())
        .def_static("from_dense",
                    [](const TypedFiniteSet& r, const TypedFiniteSet& c,
                       const std::vector<std::vector<std::uint64_t>>& rows) {
                        std::vector<std::vector<Nat64>> vals;
                        for (const auto& row : rows) {
                            vals.emplace_back();
                            for (auto v : row) vals.back().emplace_back(v);
                        }
                        return Matrix<Nat64>::from_dense(r, c, vals);
                    })
        .def("rows", &Matrix<Nat64>::rows)
        .def("cols", &Matrix<Nat64>::cols)
        .def("at", [](const Matrix<Nat64>& m2, std::size_t i, std::size_t j) {
            Nat64 v = m2.at(i, j);
            return v.is_infinite() ? py::object(py::str("inf")) : py::object(py::int_(v.value()));
        })
        .def("__eq__", [](const Matrix<Nat64>& a, const Matrix<Nat64>& b) { return a == b; })
        .def("to_text", [](const Matrix<Nat64>& m2) { return render_matrix_text(m2); });

    m.def("kronecker", [](const Matrix<Nat64>& a, const Matrix<Nat64>& b) {
        return kronecker(a, b);
    });
    m.def("multiply", [](const Matrix<Nat64>& a, const Matrix<Nat64>& b) {
        return multiply(a, b);
    });
    m.def("mat_apply", [](const WiringDiagram& w, const Matrix<Nat64>& m2) {
        return apply(w, m2);
    });
    m.def("partial_trace",
          [](const Matrix<Nat64>& m2, const std::vector<std::size_t>& row_ports,
             const std::vector<std::size_t>& col_ports) {
              return partial_trace(m2, TraceSelection{row_ports, col_ports});
          });

    py::class_<DiscreteSystem>(m, "DiscreteSystem")
        .def(py::init([](const Box& box, const std::vector<std::string>& states,
                         const std::vector<std::size_t>& readout,
                         const std::vector<std::size_t>& update) {
                 std::vector<StateLabel> labels;
                 for (const auto& s : states) labels.push_back({s});
                 return DiscreteSystem(box, std::move(labels), readout, update);
             }),
             py::arg("box"), py::arg("states"), py::arg("readout"), py::arg("update"))
        .def("state_count", &DiscreteSystem::state_count)
        .def("readout", &DiscreteSystem::readout)
        .def("update", &DiscreteSystem::update)
        .def("state_text",
             [](const DiscreteSystem& s, std::size_t i) { return label_text(s.state(i)); });

    m.def("ds_parallel", &ds_parallel);
    m.def("ds_apply", &ds_apply);
    m.def("steady_state_matrix", &steady_state_matrix, py::arg("system"), py::arg("jobs") = 1);
    m.def("run_stream",
          [](const DiscreteSystem& sys, const std::string& initial,
             const std::vector<std::vector<std::size_t>>& inputs) {
              InitializedDiscreteSystem init(sys, sys.state_index(StateLabel{initial}));
              std::vector<Point> pts;
              for (const auto& ix : inputs) pts.push_back(Point::finite(ix));
              StreamResult r = run_stream(init, pts);
              return py::make_tuple(r.states, r.outputs);
          });

    py::class_<SetMatrix>(m, "SetMatrix")
        .def("rows", &SetMatrix::rows)
        .def("cols", &SetMatrix::cols)
        .def("cell",
             [](const SetMatrix& m2, std::size_t i, std::size_t j) {
                 std::vector<std::string> out;
                 for (const auto& e : m2.at(i, j)) out.push_back(e.text());
                 return out;
             })
        .def("to_text", [](const SetMatrix& m2) { return render_set_matrix_text(m2); });
    m.def("steady_state_sets", &steady_state_sets);
    m.def("smat_apply", [](const WiringDiagram& w, const SetMatrix& m2) {
        return smat_apply(w, m2);
    });
    m.def("smat_count", &smat_count);

    py::class_<Expr>(m, "Expr")
        .def("__repr__", &Expr::to_string)
        .def("eval", [](const Expr& e, const Env& env) { return e.eval(env); })
        .def("diff", &Expr::diff)
        .def("variables", &Expr::variables);
    m.def("parse_expr", [](const std::string& s) { return parse_expr(s); });

    py::class_<ContinuousSystem>(m, "ContinuousSystem")
        .def(py::init([](const Box& box, const std::vector<std::string>& state_vars,
                         const std::vector<std::string>& dynamics,
                         const std::vector<std::string>& readout) {
                 std::vector<Expr> dyn, rd;
                 for (const auto& s : dynamics) dyn.push_back(parse_expr(s));
                 for (const auto& s : readout) rd.push_back(parse_expr(s));
                 return ContinuousSystem(box, state_vars, std::move(dyn), std::move(rd));
             }),
             py::arg("box"), py::arg("state_vars"), py::arg("dynamics"), py::arg("readout"))
        .def("state_dim", &ContinuousSystem::state_dim)
        .def("eval_dynamics", &ContinuousSystem::eval_dynamics)
        .def("eval_readout", &ContinuousSystem::eval_readout);
    m.def("cs_parallel", &cs_parallel);
    m.def("cs_apply", &cs_apply);

    py::class_<EulerSystem>(m, "EulerSystem")
        .def("update", &EulerSystem::update)
        .def("readout", &EulerSystem::readout);
    m.def("euler", &euler);

    py::class_<AffineSolution>(m, "AffineSolution")
        .def_readonly("consistent", &AffineSolution::consistent)
        .def_readonly("particular", &AffineSolution::particular)
        .def_readonly("kernel_basis", &AffineSolution::kernel_basis)
        .def_readonly("readout", &AffineSolution::readout_at_particular);
    m.def("solve_affine", &solve_affine);
    m.def("newton_roots",
          [](const ContinuousSystem& f, const std::vector<double>& input) {
              std::vector<py::dict> out;
              for (const auto& r : newton_roots(f, input)) {
                  py::dict d;
                  d["state"] = r.state;
                  d["readout"] = r.readout;
                  d["residual"] = r.residual;
                  out.push_back(std::move(d));
              }
              return out;
          });

    py::class_<LinearSystem>(m, "LinearSystem")
        .def(py::init([](const Box& box, std::size_t state_dim,
                         const std::vector<std::vector<double>>& m_in,
                         const std::vector<std::vector<double>>& m_mid,
                         const std::vector<std::vector<double>>& m_out) {
                 return LinearSystem(box, state_dim, dense_from_rows(m_in),
                                     dense_from_rows(m_mid), dense_from_rows(m_out));
             }),
             py::arg("box"), py::arg("state_dim"), py::arg("m_in"), py::arg("m_mid"),
             py::arg("m_out"))
        .def("m_in", [](const LinearSystem& l) { return dense_to_rows(l.m_in()); })
        .def("m_mid", [](const LinearSystem& l) { return dense_to_rows(l.m_mid()); })
        .def("m_out", [](const LinearSystem& l) { return dense_to_rows(l.m_out()); });
    m.def("ls_parallel", &ls_parallel);
    m.def("ls_apply", &ls_apply);
    m.def("linearize_at", &linearize_at);
    m.def("eigenvalues", [](const std::vector<std::vector<double>>& rows) {
        return eigenvalues(dense_from_rows(rows));
    });
    m.def("classify_stability", [](const LinearSystem& l, double tol) {
        return std::string(stability_name(classify_stability(l, tol)));
    }, py::arg("system"), py::arg("tol") = 1e-9);

    m.def("parse_workspace_text", [](const std::string& text) {
        Workspace ws = parse_workspace(text);
        return print_workspace(ws);
    });
    m.def("run_workspace_command",
          [](const std::string& text, const std::vector<std::string>& argv) {
              Workspace ws = parse_workspace(text);
              CommandResult r = run_embedded(ws, argv);
              return py::make_tuple(r.exit_code, r.output);
          });
    m.def("check_compositional", [](std::uint64_t seed, std::size_t trials) {
        std::vector<py::tuple> out;
        for (const auto& r : check_all_laws(seed, trials))
            out.push_back(py::make_tuple(r.law, r.trials, r.failures));
        return out;
    });
}
