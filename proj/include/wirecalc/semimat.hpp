#pragma once

#include <map>
#include <utility>
#include <vector>

#include "wirecalc/core.hpp"
#include "wirecalc/semiring.hpp"
#include "wirecalc/wiring.hpp"

namespace wirecalc {

/// Dependent products explode exponentially; refuse to build anything whose
/// logical entry count exceeds this unless the caller raises the cap.
inline constexpr std::size_t kDefaultSizeCap = 100'000'000;

inline void check_size_cap(std::size_t rows, std::size_t cols, std::size_t cap) {
    if (rows != 0 && cols > cap / rows)
        throw Error(ErrorKind::SizeCapExceeded, "matrix of " + std::to_string(rows) + "x" +
                                                    std::to_string(cols) +
                                                    " logical entries exceeds the size cap");
}

/// A sparse matrix over a complete semiring, indexed by the dependent
/// products of two all-finite typed sets. Zero entries are never stored.
template <SemiringElement R>
class Matrix {
public:
    using Index = std::pair<std::size_t, std::size_t>;

    Matrix(TypedFiniteSet row_space, TypedFiniteSet col_space)
        : row_space_(std::move(row_space)), col_space_(std::move(col_space)) {
        if (!row_space_.all_finite() || !col_space_.all_finite())
            throw Error(ErrorKind::NotEnumerable, "matrix index spaces must be finite");
        nrows_ = row_space_.enumeration_size();
        ncols_ = col_space_.enumeration_size();
    }

    static Matrix from_dense(TypedFiniteSet row_space, TypedFiniteSet col_space,
                             const std::vector<std::vector<R>>& rows) {
        Matrix m(std::move(row_space), std::move(col_space));
        if (rows.size() != m.nrows_)
            throw Error(ErrorKind::ShapeMismatch, "dense row count mismatch");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.ncols_)
                throw Error(ErrorKind::ShapeMismatch, "dense column count mismatch");
            for (std::size_t j = 0; j < rows[i].size(); ++j) m.set(i, j, rows[i][j]);
        }
        return m;
    }

    const TypedFiniteSet& row_space() const { return row_space_; }
    const TypedFiniteSet& col_space() const { return col_space_; }
    std::size_t rows() const { return nrows_; }
    std::size_t cols() const { return ncols_; }

    R at(std::size_t i, std::size_t j) const {
        check_index(i, j);
        auto it = entries_.find({i, j});
        return it == entries_.end() ? R::zero() : it->second;
    }

    void set(std::size_t i, std::size_t j, R v) {
        check_index(i, j);
        if (v.is_zero())
            entries_.erase({i, j});
        else
            entries_[{i, j}] = v;
    }

    void add_to(std::size_t i, std::size_t j, R v) {
        if (v.is_zero()) return;
        check_index(i, j);
        auto [it, inserted] = entries_.try_emplace({i, j}, v);
        if (!inserted) {
            it->second = it->second + v;
            if (it->second.is_zero()) entries_.erase(it);
        }
    }

    const std::map<Index, R>& entries() const { return entries_; }
    std::size_t nonzero_count() const { return entries_.size(); }

    std::vector<std::vector<R>> to_dense() const {
        std::vector<std::vector<R>> out(nrows_, std::vector<R>(ncols_, R::zero()));
        for (const auto& [ij, v] : entries_) out[ij.first][ij.second] = v;
        return out;
    }

    /// Equality up to index-space renaming and re-blocking: the canonical
    /// flat layouts must have the same dims and entries.
    bool operator==(const Matrix& other) const {
        return nrows_ == other.nrows_ && ncols_ == other.ncols_ && entries_ == other.entries_;
    }

private:
    void check_index(std::size_t i, std::size_t j) const {
        if (i >= nrows_ || j >= ncols_)
            throw Error(ErrorKind::IndexOutOfRange, "matrix index out of range");
    }

    TypedFiniteSet row_space_;
    TypedFiniteSet col_space_;
    std::size_t nrows_, ncols_;
    std::map<Index, R> entries_;
};

using NatMatrix = Matrix<Nat64>;
using RealMatrix = Matrix<RealPlus>;

/// Kronecker product: realizes parallel composition of matrices. Index
/// spaces concatenate; the first factor is the most significant index.
template <SemiringElement R>
Matrix<R> kronecker(const Matrix<R>& a, const Matrix<R>& b,
                    std::size_t size_cap = kDefaultSizeCap) {
    Matrix<R> out(tfs_sum(a.row_space(), b.row_space()), tfs_sum(a.col_space(), b.col_space()));
    check_size_cap(out.rows(), out.cols(), size_cap);
    for (const auto& [ij1, v1] : a.entries())
        for (const auto& [ij2, v2] : b.entries())
            out.set(ij1.first * b.rows() + ij2.first, ij1.second * b.cols() + ij2.second,
                    v1 * v2);
    return out;
}

/// Standard semiring matrix product; realizes serial composition and must
/// agree with apply() on the serial wiring diagram.
template <SemiringElement R>
Matrix<R> multiply(const Matrix<R>& a, const Matrix<R>& b) {
    if (!a.col_space().types_equal(b.row_space()))
        throw Error(ErrorKind::ShapeMismatch, "matrix product: middle index spaces differ");
    Matrix<R> out(a.row_space(), b.col_space());
    for (const auto& [ik, va] : a.entries()) {
        auto it = b.entries().lower_bound({ik.second, 0});
        for (; it != b.entries().end() && it->first.first == ik.second; ++it)
            out.add_to(ik.first, it->first.second, va * it->second);
    }
    return out;
}

/// Mat-application of a wiring diagram: N[i,j] sums M[in_eval(i,k), k] over
/// the inner output points k that the outer output j reads back to.
template <SemiringElement R>
Matrix<R> apply(const WiringDiagram& w, const Matrix<R>& m,
                std::size_t size_cap = kDefaultSizeCap) {
    if (!m.row_space().types_equal(w.inner().inputs) ||
        !m.col_space().types_equal(w.inner().outputs))
        throw Error(ErrorKind::ShapeMismatch, "matrix does not inhabit the inner box");
    if (!w.outer().all_finite())
        throw Error(ErrorKind::NotEnumerable, "matrix application needs finite outer box");
    Matrix<R> out(w.outer().inputs, w.outer().outputs);
    check_size_cap(out.rows(), out.cols(), size_cap);
    std::size_t yin = out.rows();
    std::size_t xout = m.cols();
    check_size_cap(yin, xout, size_cap);
    for (std::size_t k = 0; k < xout; ++k) {
        Point x = unflatten(w.inner().outputs, k);
        std::size_t j = flat_index(w.outer().outputs, w.out_eval(x));
        for (std::size_t i = 0; i < yin; ++i) {
            Point y = unflatten(w.outer().inputs, i);
            std::size_t r = flat_index(w.inner().inputs, w.in_eval(y, x));
            out.add_to(i, j, m.at(r, k));
        }
    }
    return out;
}

/// Which row ports and column ports carry the traced factor. The i-th
/// selected row port and i-th selected column port must have equal types.
struct TraceSelection {
    std::vector<std::size_t> row_ports;
    std::vector<std::size_t> col_ports;
};

namespace detail {

struct TraceSplit {
    TypedFiniteSet kept_rows, kept_cols;
    std::vector<bool> row_traced, col_traced;
    std::vector<std::size_t> row_order, col_order;  // traced ports in selection order
};

TraceSplit plan_trace(const TypedFiniteSet& rows, const TypedFiniteSet& cols,
                      const TraceSelection& sel);

}  // namespace detail

/// Partial trace over the selected factor: sums entries whose traced row and
/// column coordinates agree. Realizes feedback composition.
template <SemiringElement R>
Matrix<R> partial_trace(const Matrix<R>& m, const TraceSelection& sel) {
    auto split = detail::plan_trace(m.row_space(), m.col_space(), sel);
    Matrix<R> out(split.kept_rows, split.kept_cols);
    for (const auto& [ij, v] : m.entries()) {
        Point r = unflatten(m.row_space(), ij.first);
        Point c = unflatten(m.col_space(), ij.second);
        bool diagonal = true;
        for (std::size_t t = 0; t < split.row_order.size() && diagonal; ++t)
            diagonal = r.indices()[split.row_order[t]] == c.indices()[split.col_order[t]];
        if (!diagonal) continue;
        std::vector<std::size_t> ri, ci;
        for (std::size_t p = 0; p < r.indices().size(); ++p)
            if (!split.row_traced[p]) ri.push_back(r.indices()[p]);
        for (std::size_t p = 0; p < c.indices().size(); ++p)
            if (!split.col_traced[p]) ci.push_back(c.indices()[p]);
        out.add_to(flat_index(split.kept_rows, Point::finite(std::move(ri))),
                   flat_index(split.kept_cols, Point::finite(std::move(ci))), v);
    }
    return out;
}

/// Reorders the row and column index spaces by port permutations. Entry
/// values are preserved; only the canonical flat layout changes.
template <SemiringElement R>
Matrix<R> permute_spaces(const Matrix<R>& m, const std::vector<std::size_t>& row_perm,
                         const std::vector<std::size_t>& col_perm) {
    auto permute = [](const TypedFiniteSet& s, const std::vector<std::size_t>& perm) {
        if (perm.size() != s.port_count())
            throw Error(ErrorKind::ShapeMismatch, "permutation arity mismatch");
        std::vector<Port> ports;
        for (std::size_t p : perm) ports.push_back(s.port(p));
        return TypedFiniteSet(std::move(ports));
    };
    Matrix<R> out(permute(m.row_space(), row_perm), permute(m.col_space(), col_perm));
    for (const auto& [ij, v] : m.entries()) {
        Point r = unflatten(m.row_space(), ij.first);
        Point c = unflatten(m.col_space(), ij.second);
        std::vector<std::size_t> ri, ci;
        for (std::size_t p : row_perm) ri.push_back(r.indices()[p]);
        for (std::size_t p : col_perm) ci.push_back(c.indices()[p]);
        out.set(flat_index(out.row_space(), Point::finite(std::move(ri))),
                flat_index(out.col_space(), Point::finite(std::move(ci))), v);
    }
    return out;
}

}  // namespace wirecalc
