#include "wirecalc/linear.hpp"

#include <algorithm>
#include <cmath>

namespace wirecalc {

LinearSystem::LinearSystem(Box box, std::size_t state_dim, Dense m_in, Dense m_mid, Dense m_out)
    : box_(std::move(box)),
      state_dim_(state_dim),
      m_in_(std::move(m_in)),
      m_mid_(std::move(m_mid)),
      m_out_(std::move(m_out)) {
    if (!box_.all_euclid())
        throw Error(ErrorKind::WrongInterpretation, "linear system needs an all-euclid box");
    std::size_t k = box_.inputs.euclid_dims();
    std::size_t l = box_.outputs.euclid_dims();
    if (m_in_.rows() != state_dim_ || m_in_.cols() != k)
        throw Error(ErrorKind::ShapeMismatch, "M_in must be state_dim x input_dims");
    if (m_mid_.rows() != state_dim_ || m_mid_.cols() != state_dim_)
        throw Error(ErrorKind::ShapeMismatch, "M_mid must be state_dim x state_dim");
    if (m_out_.rows() != l || m_out_.cols() != state_dim_)
        throw Error(ErrorKind::ShapeMismatch, "M_out must be output_dims x state_dim");
}

LinearSystem ls_parallel(const LinearSystem& l1, const LinearSystem& l2) {
    return LinearSystem(box_sum(l1.box(), l2.box()), l1.state_dim() + l2.state_dim(),
                        l1.m_in().direct_sum(l2.m_in()), l1.m_mid().direct_sum(l2.m_mid()),
                        l1.m_out().direct_sum(l2.m_out()));
}

LinearSystem ls_apply(const WiringDiagram& w, const LinearSystem& l) {
    if (!l.box().types_equal(w.inner()))
        throw Error(ErrorKind::BoxMismatch, "linear system does not inhabit the inner box");
    WiringDerivative d = w.derivative();
    Dense n_in = l.m_in() * d.phi_in_d;
    Dense n_mid = l.m_mid() + l.m_in() * d.phi_mid_d * l.m_out();
    Dense n_out = d.phi_out_d * l.m_out();
    return LinearSystem(w.outer(), l.state_dim(), std::move(n_in), std::move(n_mid),
                        std::move(n_out));
}

bool ls_approx_equal(const LinearSystem& a, const LinearSystem& b, double tol) {
    return a.state_dim() == b.state_dim() && a.box().types_equal(b.box()) &&
           a.m_in().approx_equal(b.m_in(), tol) && a.m_mid().approx_equal(b.m_mid(), tol) &&
           a.m_out().approx_equal(b.m_out(), tol);
}

LinearSystem linearize_at(const ContinuousSystem& f, const std::vector<double>& input,
                          const std::vector<double>& state) {
    std::size_t n = f.state_dim();
    std::size_t k = f.input_coords().size();
    std::size_t l = f.readout().size();
    Env env = f.make_env(input, state);

    Dense m_in(n, k), m_mid(n, n), m_out(l, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            m_in(i, j) = f.dynamics()[i].diff(f.input_coords()[j]).eval(env);
        for (std::size_t j = 0; j < n; ++j)
            m_mid(i, j) = f.dynamics()[i].diff(f.state_vars()[j]).eval(env);
    }
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m_out(i, j) = f.readout()[i].diff(f.state_vars()[j]).eval(env);
    return LinearSystem(f.box(), n, std::move(m_in), std::move(m_mid), std::move(m_out));
}

namespace {

constexpr std::size_t kMaxEigenDim = 64;
constexpr int kMaxSweeps = 1000;

// Householder reduction to upper Hessenberg form, in place.
void to_hessenberg(Dense& a) {
    std::size_t n = a.rows();
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t i0 = m;
        for (std::size_t j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                i0 = j;
            }
        }
        if (i0 != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(a(i0, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(a(j, i0), a(j, m));
        }
        if (x != 0.0) {
            for (std::size_t i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y == 0.0) continue;
                y /= x;
                a(i, m - 1) = y;
                for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
            }
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Francis-style QR iteration on a Hessenberg matrix (the classic hqr scheme
// with exceptional shifts). Fills `out` with all n eigenvalues.
void hessenberg_qr(Dense& a, std::vector<std::complex<double>>& out) {
    const std::size_t size = a.rows();
    double anorm = 0.0;
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = (i == 0 ? 0 : i - 1); j < size; ++j) anorm += std::abs(a(i, j));

    long n = static_cast<long>(size) - 1;
    double t = 0.0;
    while (n >= 0) {
        int its = 0;
        long l;
        do {
            for (l = n; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(n, n);
            if (l == n) {  // one real eigenvalue found
                out.emplace_back(x + t, 0.0);
                --n;
            } else {
                double y = a(n - 1, n - 1);
                double w = a(n, n - 1) * a(n - 1, n);
                if (l == n - 1) {  // a 2x2 block: pair of eigenvalues
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0.0 ? z : -z);
                        out.emplace_back(x + z, 0.0);
                        out.emplace_back(z == 0.0 ? x + z : x - w / z, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    n -= 2;
                } else {  // no root found yet; do a QR sweep
                    if (its == kMaxSweeps)
                        throw Error(ErrorKind::NumericalFailure,
                                    "QR iteration did not converge");
                    double p = 0, q = 0, z = 0, r = 0, s = 0;
                    if (its != 0 && its % 10 == 0) {  // exceptional shift
                        t += x;
                        for (long i = 0; i <= n; ++i) a(i, i) -= x;
                        s = std::abs(a(n, n - 1)) + std::abs(a(n - 1, n - 2));
                        x = y = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    long m;
                    for (m = n - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                  std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (long i = m + 2; i <= n; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (long k = m; k <= n - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = k != n - 1 ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        double yy = q / s;
                        z = r / s;
                        q = q / p;
                        r = r / p;
                        for (long j = k; j <= n; ++j) {  // row modification
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != n - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * yy;
                            a(k, j) -= p * x;
                        }
                        long mmin = n < k + 3 ? n : k + 3;
                        for (long i = l; i <= mmin; ++i) {  // column modification
                            p = x * a(i, k) + yy * a(i, k + 1);
                            if (k != n - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < n - 1 && n >= 0);
    }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Dense& m) {
    if (m.rows() != m.cols())
        throw Error(ErrorKind::ShapeMismatch, "eigenvalues need a square matrix");
    std::size_t n = m.rows();
    if (n > kMaxEigenDim)
        throw Error(ErrorKind::SizeUnsupported,
                    "eigenvalue routine supports n <= " + std::to_string(kMaxEigenDim));
    std::vector<std::complex<double>> out;
    if (n == 0) return out;
    if (n == 1) {
        out.emplace_back(m(0, 0), 0.0);
    } else if (n == 2) {
        double tr = m(0, 0) + m(1, 1);
        double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        double disc = tr * tr / 4.0 - det;
        if (disc >= 0.0) {
            double s = std::sqrt(disc);
            out.emplace_back(tr / 2.0 + s, 0.0);
            out.emplace_back(tr / 2.0 - s, 0.0);
        } else {
            double s = std::sqrt(-disc);
            out.emplace_back(tr / 2.0, s);
            out.emplace_back(tr / 2.0, -s);
        }
    } else {
        Dense a = m;
        to_hessenberg(a);
        hessenberg_qr(a, out);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "unknown";
}

Stability classify_matrix_stability(const Dense& m_mid, double tol) {
    auto eigs = eigenvalues(m_mid);
    bool any_positive = false, all_negative = true;
    for (const auto& e : eigs) {
        if (e.real() > tol) any_positive = true;
        if (!(e.real() < -tol)) all_negative = false;
    }
    if (any_positive) return Stability::Unstable;
    if (all_negative) return Stability::Stable;
    return Stability::Marginal;
}

Stability classify_stability(const LinearSystem& l, double tol) {
    return classify_matrix_stability(l.m_mid(), tol);
}

std::vector<LinearizedSteadyState> stst_linearization(
    const ContinuousSystem& f, const std::vector<std::vector<double>>& inputs, RootMode mode,
    const NewtonConfig& cfg) {
    std::vector<LinearizedSteadyState> out;
    for (const auto& input : inputs) {
        for (const auto& root : steady_states_at(f, input, mode, nullptr, 0.0, cfg)) {
            out.push_back({input, root.readout, root.state, root.residual, root.heuristic,
                           linearize_at(f, input, root.state)});
        }
    }
    return out;
}

}  // namespace wirecalc
