#include "wirecalc/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wirecalc/dense.hpp"

namespace wirecalc {

std::vector<std::string> coord_names(const TypedFiniteSet& tfs) {
    std::vector<std::string> names;
    for (const auto& p : tfs.ports()) {
        std::size_t d = p.type.dim();
        if (d == 1) {
            names.push_back(p.name);
        } else {
            for (std::size_t k = 1; k <= d; ++k) names.push_back(p.name + std::to_string(k));
        }
    }
    return names;
}

ContinuousSystem::ContinuousSystem(Box box, std::vector<std::string> state_vars,
                                   std::vector<Expr> dynamics, std::vector<Expr> readout)
    : box_(std::move(box)),
      state_vars_(std::move(state_vars)),
      dynamics_(std::move(dynamics)),
      readout_(std::move(readout)) {
    if (!box_.all_euclid())
        throw Error(ErrorKind::WrongInterpretation, "continuous system needs an all-euclid box");
    input_coords_ = coord_names(box_.inputs);
    if (dynamics_.size() != state_vars_.size())
        throw Error(ErrorKind::InvalidArgument, "one dynamics component per state variable");
    if (readout_.size() != box_.outputs.euclid_dims())
        throw Error(ErrorKind::InvalidArgument, "one readout component per output coordinate");

    std::set<std::string> scope(input_coords_.begin(), input_coords_.end());
    for (const auto& v : state_vars_)
        if (!scope.insert(v).second)
            throw Error(ErrorKind::InvalidArgument,
                        "state variable '" + v + "' collides with another name");
    std::set<std::string> states(state_vars_.begin(), state_vars_.end());
    for (const auto& e : dynamics_)
        for (const auto& v : e.variables())
            if (!scope.count(v))
                throw Error(ErrorKind::InvalidArgument,
                            "dynamics references undeclared variable '" + v + "'");
    for (const auto& e : readout_)
        for (const auto& v : e.variables())
            if (!states.count(v))
                throw Error(ErrorKind::InvalidArgument,
                            "readout may reference state variables only, got '" + v + "'");
}

Env ContinuousSystem::make_env(const std::vector<double>& input,
                               const std::vector<double>& state) const {
    if (input.size() != input_coords_.size())
        throw Error(ErrorKind::InvalidPoint, "input coordinate count mismatch");
    if (state.size() != state_vars_.size())
        throw Error(ErrorKind::InvalidPoint, "state coordinate count mismatch");
    Env env;
    for (std::size_t i = 0; i < input.size(); ++i) env[input_coords_[i]] = input[i];
    for (std::size_t i = 0; i < state.size(); ++i) env[state_vars_[i]] = state[i];
    return env;
}

std::vector<double> ContinuousSystem::eval_dynamics(const std::vector<double>& input,
                                                    const std::vector<double>& state) const {
    Env env = make_env(input, state);
    std::vector<double> out(dynamics_.size());
    for (std::size_t i = 0; i < dynamics_.size(); ++i) out[i] = dynamics_[i].eval(env);
    return out;
}

std::vector<double> ContinuousSystem::eval_readout(const std::vector<double>& state) const {
    Env env;
    for (std::size_t i = 0; i < state_vars_.size(); ++i) env[state_vars_[i]] = state.at(i);
    std::vector<double> out(readout_.size());
    for (std::size_t i = 0; i < readout_.size(); ++i) out[i] = readout_[i].eval(env);
    return out;
}

namespace {

// renames colliding identifiers by appending primes-as-underscores
std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
    std::string name = base;
    while (taken.count(name)) name += "_";
    return name;
}

}  // namespace

ContinuousSystem cs_parallel(const ContinuousSystem& f1, const ContinuousSystem& f2) {
    Box box = box_sum(f1.box(), f2.box());
    std::vector<std::string> new_inputs = coord_names(box.inputs);

    // input coordinates may have been renamed by the sum; state variables of
    // the second system may collide with anything already in scope
    std::map<std::string, Expr> subst1, subst2;
    std::size_t n1 = f1.input_coords().size();
    for (std::size_t i = 0; i < n1; ++i)
        subst1.emplace(f1.input_coords()[i], Expr::var(new_inputs[i]));
    for (std::size_t i = 0; i < f2.input_coords().size(); ++i)
        subst2.emplace(f2.input_coords()[i], Expr::var(new_inputs[n1 + i]));

    std::set<std::string> taken(new_inputs.begin(), new_inputs.end());
    std::vector<std::string> state_vars;
    for (const auto& v : f1.state_vars()) {
        std::string nv = fresh_name(v, taken);
        taken.insert(nv);
        if (nv != v) subst1.emplace(v, Expr::var(nv));
        state_vars.push_back(nv);
    }
    for (const auto& v : f2.state_vars()) {
        std::string nv = fresh_name(v, taken);
        taken.insert(nv);
        if (nv != v) subst2.emplace(v, Expr::var(nv));
        state_vars.push_back(nv);
    }

    std::vector<Expr> dynamics, readout;
    for (const auto& e : f1.dynamics()) dynamics.push_back(e.substitute(subst1));
    for (const auto& e : f2.dynamics()) dynamics.push_back(e.substitute(subst2));
    for (const auto& e : f1.readout()) readout.push_back(e.substitute(subst1));
    for (const auto& e : f2.readout()) readout.push_back(e.substitute(subst2));
    return ContinuousSystem(std::move(box), std::move(state_vars), std::move(dynamics),
                            std::move(readout));
}

ContinuousSystem cs_apply(const WiringDiagram& w, const ContinuousSystem& f) {
    if (!w.inner().all_euclid() || !w.outer().all_euclid())
        throw Error(ErrorKind::WrongInterpretation, "cs_apply needs euclid ports");
    if (!f.box().types_equal(w.inner()))
        throw Error(ErrorKind::BoxMismatch, "system does not inhabit the inner box");

    std::vector<std::string> outer_inputs = coord_names(w.outer().inputs);
    std::set<std::string> taken(outer_inputs.begin(), outer_inputs.end());

    std::map<std::string, Expr> state_subst;
    std::vector<std::string> state_vars;
    for (const auto& v : f.state_vars()) {
        std::string nv = fresh_name(v, taken);
        taken.insert(nv);
        if (nv != v) state_subst.emplace(v, Expr::var(nv));
        state_vars.push_back(nv);
    }

    // readout components over the (possibly renamed) state variables
    std::vector<Expr> inner_readout;
    for (const auto& e : f.readout()) inner_readout.push_back(e.substitute(state_subst));

    std::map<std::string, Expr> subst = state_subst;
    for (std::size_t p = 0; p < f.box().inputs.port_count(); ++p) {
        WireSource s = w.phi_in(p);
        std::size_t dim = f.box().inputs.port(p).type.dim();
        std::size_t dst = f.box().inputs.coord_offset(p);
        for (std::size_t k = 0; k < dim; ++k) {
            const std::string& var = f.input_coords()[dst + k];
            if (s.kind == WireSource::Kind::OuterInput) {
                std::size_t src = w.outer().inputs.coord_offset(s.port) + k;
                subst.emplace(var, Expr::var(outer_inputs[src]));
            } else {
                std::size_t src = w.inner().outputs.coord_offset(s.port) + k;
                subst.emplace(var, inner_readout[src]);
            }
        }
    }

    std::vector<Expr> dynamics;
    for (const auto& e : f.dynamics()) dynamics.push_back(e.substitute(subst));
    std::vector<Expr> readout;
    for (std::size_t q = 0; q < w.outer().outputs.port_count(); ++q) {
        std::size_t src_port = w.phi_out(q);
        std::size_t dim = w.outer().outputs.port(q).type.dim();
        std::size_t off = w.inner().outputs.coord_offset(src_port);
        for (std::size_t k = 0; k < dim; ++k) readout.push_back(inner_readout[off + k]);
    }
    return ContinuousSystem(w.outer(), std::move(state_vars), std::move(dynamics),
                            std::move(readout));
}

EulerSystem::EulerSystem(ContinuousSystem source, double epsilon)
    : source_(std::move(source)), eps_(epsilon) {
    if (!(epsilon > 0.0))
        throw Error(ErrorKind::InvalidEpsilon, "epsilon must be strictly positive");
}

std::vector<double> EulerSystem::update(const std::vector<double>& input,
                                        const std::vector<double>& state) const {
    std::vector<double> v = source_.eval_dynamics(input, state);
    std::vector<double> next(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) next[i] = state[i] + eps_ * v[i];
    return next;
}

std::vector<double> EulerSystem::readout(const std::vector<double>& state) const {
    return source_.eval_readout(state);
}

EulerSystem::Trajectory EulerSystem::run(const std::vector<double>& initial,
                                         const std::vector<std::vector<double>>& inputs) const {
    Trajectory t;
    std::vector<double> s = initial;
    t.states.push_back(s);
    t.outputs.push_back(readout(s));
    for (const auto& a : inputs) {
        s = update(a, s);
        t.states.push_back(s);
        t.outputs.push_back(readout(s));
    }
    return t;
}

EulerSystem euler(const ContinuousSystem& f, double eps) { return EulerSystem(f, eps); }

bool is_affine_in_state(const ContinuousSystem& f) {
    std::set<std::string> states(f.state_vars().begin(), f.state_vars().end());
    for (const auto& e : f.dynamics())
        for (const auto& v : f.state_vars())
            for (const auto& dv : e.diff(v).variables())
                if (states.count(dv)) return false;
    return true;
}

AffineSolution solve_affine(const ContinuousSystem& f, const std::vector<double>& input) {
    if (!is_affine_in_state(f))
        throw Error(ErrorKind::NotAffine, "dynamics are not affine in the state variables");
    std::size_t n = f.state_dim();
    std::vector<double> zero_state(n, 0.0);
    Env env0 = f.make_env(input, zero_state);

    // dynamics = A s + c with A constant in the state
    Dense a(n, n);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = f.dynamics()[i].eval(env0);
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = f.dynamics()[i].diff(f.state_vars()[j]).eval(env0);
    }

    // Gauss-Jordan on [A | -c], tracking pivot columns for the kernel
    Dense m(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
        m(i, n) = -c[i];
    }
    const double tol = 1e-12;
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t best = row;
        for (std::size_t r = row + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
        if (std::abs(m(best, col)) <= tol) continue;
        for (std::size_t j = 0; j <= n; ++j) std::swap(m(row, j), m(best, j));
        double piv = m(row, col);
        for (std::size_t j = 0; j <= n; ++j) m(row, j) /= piv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == row) continue;
            double factor = m(r, col);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= n; ++j) m(r, j) -= factor * m(row, j);
        }
        pivot_col.push_back(col);
        ++row;
    }

    AffineSolution sol;
    for (std::size_t r = row; r < n; ++r)
        if (std::abs(m(r, n)) > tol) return sol;  // inconsistent: no steady state
    sol.consistent = true;
    sol.particular.assign(n, 0.0);
    for (std::size_t r = 0; r < pivot_col.size(); ++r) sol.particular[pivot_col[r]] = m(r, n);

    std::vector<bool> is_pivot(n, false);
    for (std::size_t col : pivot_col) is_pivot[col] = true;
    for (std::size_t free_col = 0; free_col < n; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<double> basis(n, 0.0);
        basis[free_col] = 1.0;
        for (std::size_t r = 0; r < pivot_col.size(); ++r)
            basis[pivot_col[r]] = -m(r, free_col);
        sol.kernel_basis.push_back(std::move(basis));
    }
    sol.readout_at_particular = f.eval_readout(sol.particular);
    return sol;
}

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool newton_step(const ContinuousSystem& f, const std::vector<double>& input,
                 std::vector<double>& state) {
    std::size_t n = f.state_dim();
    Env env = f.make_env(input, state);
    Dense j(n, n);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = -f.dynamics()[i].eval(env);
        for (std::size_t k = 0; k < n; ++k)
            j(i, k) = f.dynamics()[i].diff(f.state_vars()[k]).eval(env);
    }
    // solve j * dx = rhs by partial-pivot elimination
    Dense m(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) m(i, k) = j(i, k);
        m(i, n) = rhs[i];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
        if (std::abs(m(best, col)) < 1e-14) return false;  // singular Jacobian
        for (std::size_t k = 0; k <= n; ++k) std::swap(m(col, k), m(best, k));
        for (std::size_t r = col + 1; r < n; ++r) {
            double factor = m(r, col) / m(col, col);
            for (std::size_t k = col; k <= n; ++k) m(r, k) -= factor * m(col, k);
        }
    }
    std::vector<double> dx(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = m(i, n);
        for (std::size_t k = i + 1; k < n; ++k) v -= m(i, k) * dx[k];
        dx[i] = v / m(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) state[i] += dx[i];
    return true;
}

}  // namespace

std::vector<Root> newton_roots(const ContinuousSystem& f, const std::vector<double>& input,
                               const NewtonConfig& cfg) {
    std::size_t n = f.state_dim();
    std::vector<Root> roots;
    if (n == 0) {
        // the zero-dimensional state space has a single (vacuous) steady state
        Root r{{}, f.eval_readout({}), 0.0, true};
        roots.push_back(std::move(r));
        return roots;
    }

    std::size_t grid = std::max(1, cfg.grid_points_per_dim);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > 1000000 / grid) throw Error(ErrorKind::SizeCapExceeded, "newton grid too large");
        total *= grid;
    }

    for (std::size_t g = 0; g < total; ++g) {
        std::vector<double> state(n);
        std::size_t rem = g;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t ix = rem % grid;
            rem /= grid;
            state[i] = grid == 1 ? 0.5 * (cfg.grid_lo + cfg.grid_hi)
                                 : cfg.grid_lo + (cfg.grid_hi - cfg.grid_lo) * double(ix) /
                                       double(grid - 1);
        }
        bool converged = false;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            std::vector<double> residual;
            try {
                residual = f.eval_dynamics(input, state);
            } catch (const Error&) {
                break;  // left the domain (division blow-up); abandon this start
            }
            if (norm2(residual) < cfg.convergence) {
                converged = true;
                break;
            }
            bool ok;
            try {
                ok = newton_step(f, input, state);
            } catch (const Error&) {
                ok = false;
            }
            if (!ok) break;
            if (norm2(state) > 1e8) break;  // diverged
        }
        if (!converged) continue;  // non-convergence reported per start, never fatal
        bool duplicate = false;
        for (const auto& r : roots) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += (r.state[i] - state[i]) * (r.state[i] - state[i]);
            if (std::sqrt(d) < cfg.dedup_radius) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        Root r;
        r.state = state;
        r.readout = f.eval_readout(state);
        r.residual = norm2(f.eval_dynamics(input, state));
        r.heuristic = true;
        roots.push_back(std::move(r));
    }
    std::sort(roots.begin(), roots.end(),
              [](const Root& a, const Root& b) { return a.state < b.state; });
    return roots;
}

std::vector<Root> steady_states_at(const ContinuousSystem& f, const std::vector<double>& input,
                                   RootMode mode, const std::vector<double>* output,
                                   double output_tol, const NewtonConfig& cfg) {
    std::vector<Root> roots;
    if (mode == RootMode::ExactAffine) {
        AffineSolution sol = solve_affine(f, input);
        if (sol.consistent && sol.kernel_basis.empty()) {
            Root r;
            r.state = sol.particular;
            r.readout = sol.readout_at_particular;
            r.residual = norm2(f.eval_dynamics(input, sol.particular));
            r.heuristic = false;
            roots.push_back(std::move(r));
        } else if (sol.consistent) {
            throw Error(ErrorKind::NotEnumerable,
                        "affine solution set is a continuum; query the solution set instead");
        }
    } else {
        roots = newton_roots(f, input, cfg);
    }
    if (!output) return roots;
    std::vector<Root> filtered;
    for (auto& r : roots) {
        if (r.readout.size() != output->size()) continue;
        bool close = true;
        for (std::size_t i = 0; i < output->size() && close; ++i)
            close = std::abs(r.readout[i] - (*output)[i]) <= output_tol;
        if (close) filtered.push_back(std::move(r));
    }
    return filtered;
}

}  // namespace wirecalc
