#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wirecalc/discrete.hpp"
#include "wirecalc/linear.hpp"
#include "wirecalc/semimat.hpp"

namespace wirecalc {

/// An element of a set-matrix entry: a tuple of atoms flattened
/// left-to-right, with provenance tags recorded by tagged applications
/// (innermost application first).
struct SetElem {
    std::vector<std::string> atoms;
    std::vector<std::string> tags;

    auto operator<=>(const SetElem&) const = default;

    std::string text() const;
};

enum class UnionMode { Flat, Tagged };

/// A matrix whose entries are finite sets of elements: which steady states,
/// not how many. Empty sets are never stored.
class SetMatrix {
public:
    using Index = std::pair<std::size_t, std::size_t>;
    using Cell = std::set<SetElem>;

    SetMatrix(TypedFiniteSet row_space, TypedFiniteSet col_space);

    const TypedFiniteSet& row_space() const { return row_space_; }
    const TypedFiniteSet& col_space() const { return col_space_; }
    std::size_t rows() const { return nrows_; }
    std::size_t cols() const { return ncols_; }

    const Cell& at(std::size_t i, std::size_t j) const;
    void insert(std::size_t i, std::size_t j, SetElem e);
    /// Inserts enforcing flat-mode disjointness: throws on collision.
    void insert_disjoint(std::size_t i, std::size_t j, SetElem e);

    const std::map<Index, Cell>& entries() const { return cells_; }

    bool operator==(const SetMatrix& other) const {
        return nrows_ == other.nrows_ && ncols_ == other.ncols_ && cells_ == other.cells_;
    }

private:
    void check_index(std::size_t i, std::size_t j) const;
    TypedFiniteSet row_space_;
    TypedFiniteSet col_space_;
    std::size_t nrows_, ncols_;
    std::map<Index, Cell> cells_;
};

/// Entry-wise cartesian product; elements pair up by concatenating atoms.
SetMatrix smat_parallel(const SetMatrix& a, const SetMatrix& b,
                        std::size_t size_cap = kDefaultSizeCap);

/// Mat-application for set matrices: disjoint union over the inner output
/// points read back by each outer output. Tagged mode records the inner
/// output point as provenance; flat mode requires genuine disjointness.
SetMatrix smat_apply(const WiringDiagram& w, const SetMatrix& m, UnionMode mode = UnionMode::Flat,
                     std::size_t size_cap = kDefaultSizeCap);

/// Serial product of set matrices (union over the middle index of pairwise
/// products); agrees with smat_apply on the serial diagram.
SetMatrix smat_multiply(const SetMatrix& a, const SetMatrix& b,
                        UnionMode mode = UnionMode::Flat);

/// Partial trace for set matrices: union of diagonal-block entries.
SetMatrix smat_trace(const SetMatrix& m, const TraceSelection& sel,
                     UnionMode mode = UnionMode::Flat);

/// Entry-wise cardinality; the triangle count ∘ sets = counts commutes.
Matrix<Nat64> smat_count(const SetMatrix& m);

/// Keeps only the innermost provenance tag of every element, making
/// differently-nested tagged applications comparable.
SetMatrix canonical_flatten(const SetMatrix& m);

/// The actual (a,b)-steady-state sets of a discrete system.
SetMatrix steady_state_sets(const DiscreteSystem& f);

/// A set matrix with a linear-system payload attached to every element. The
/// base indexes a finite box; the payloads inhabit a euclid box whose ports
/// correspond one-to-one with the base box's ports, so a wiring diagram on
/// the index side transports to the payload side.
class QMatrix {
public:
    using Key = std::tuple<std::size_t, std::size_t, SetElem>;

    QMatrix(SetMatrix base, Box payload_box);

    const SetMatrix& base() const { return base_; }
    const Box& payload_box() const { return payload_box_; }
    void attach(std::size_t i, std::size_t j, const SetElem& e, LinearSystem payload);
    const LinearSystem& payload(std::size_t i, std::size_t j, const SetElem& e) const;

    /// Throws unless the payload map covers exactly the base elements.
    void check_total() const;

private:
    SetMatrix base_;
    Box payload_box_;
    std::map<Key, LinearSystem> payload_;
};

/// Rebuilds a wiring diagram's structure over a euclid inner box with the
/// same port layout; every outer port takes the type of the payload port it
/// connects to.
WiringDiagram payload_shadow(const WiringDiagram& w, const Box& payload_inner);

QMatrix qmat_parallel(const QMatrix& a, const QMatrix& b);
QMatrix qmat_apply(const WiringDiagram& w, const QMatrix& q, UnionMode mode = UnionMode::Tagged);

}  // namespace wirecalc
