#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wirecalc/errors.hpp"

namespace wirecalc {

/// A port type: either a finite alphabet of symbols or a Euclidean space R^n.
/// Alphabets are ordered as declared; the order fixes canonical indexing.
class PortType {
public:
    static PortType finite(std::vector<std::string> symbols);
    static PortType euclid(std::size_t dim);

    bool is_finite() const { return finite_; }
    bool is_euclid() const { return !finite_; }

    const std::vector<std::string>& symbols() const;
    std::size_t cardinality() const;  // finite only
    std::size_t dim() const;          // euclid only
    std::optional<std::size_t> symbol_index(std::string_view symbol) const;

    bool operator==(const PortType& other) const;
    bool operator!=(const PortType& other) const { return !(*this == other); }

    std::string to_string() const;

private:
    PortType() = default;
    bool finite_ = true;
    std::vector<std::string> symbols_;
    std::size_t dim_ = 0;
};

struct Port {
    std::string name;
    PortType type;
};

/// An ordered list of named, typed ports. All ports must share one variant
/// kind (all finite or all euclid); the empty set belongs to both.
class TypedFiniteSet {
public:
    TypedFiniteSet() = default;
    explicit TypedFiniteSet(std::vector<Port> ports);

    std::size_t port_count() const { return ports_.size(); }
    bool empty() const { return ports_.empty(); }
    const Port& port(std::size_t i) const;
    const std::vector<Port>& ports() const { return ports_; }
    std::optional<std::size_t> port_index(std::string_view name) const;

    bool all_finite() const;
    bool all_euclid() const;

    /// Number of points of the dependent product. All ports must be finite.
    std::size_t enumeration_size() const;

    /// Total coordinate count of the dependent product of a euclid set.
    std::size_t euclid_dims() const;
    /// First coordinate of port i in the flattened euclid coordinate vector.
    std::size_t coord_offset(std::size_t i) const;

    /// Pairwise type equality, ignoring port names.
    bool types_equal(const TypedFiniteSet& other) const;

private:
    std::vector<Port> ports_;
};

/// An element of the dependent product of a TypedFiniteSet: one symbol index
/// per finite port, or one real per euclid coordinate.
class Point {
public:
    static Point finite(std::vector<std::size_t> symbol_indices);
    static Point euclid(std::vector<double> coords);

    bool is_finite() const { return finite_; }
    const std::vector<std::size_t>& indices() const;
    const std::vector<double>& coords() const;

    bool operator==(const Point& other) const;
    bool operator!=(const Point& other) const { return !(*this == other); }

private:
    Point() = default;
    bool finite_ = true;
    std::vector<std::size_t> indices_;
    std::vector<double> coords_;
};

/// Throws InvalidPoint unless pt is a valid element of the dependent product.
void check_point(const TypedFiniteSet& tfs, const Point& pt);

/// Mixed-radix encoding of a point, port 0 most significant.
std::size_t flat_index(const TypedFiniteSet& tfs, const Point& pt);
Point unflatten(const TypedFiniteSet& tfs, std::size_t idx);

/// Concatenation of two typed finite sets. Port names are kept unless the two
/// sides collide, in which case every port is prefixed with its side tag.
TypedFiniteSet tfs_sum(const TypedFiniteSet& a, const TypedFiniteSet& b);

/// Renders a point as comma-joined symbols (finite) or comma-joined reals.
std::string render_point(const TypedFiniteSet& tfs, const Point& pt);

/// A type-respecting map of ports. Contravariantly induces the dependent
/// product map via reindex.
class TypedFunction {
public:
    TypedFunction(TypedFiniteSet source, TypedFiniteSet target, std::vector<std::size_t> map);
    static TypedFunction identity(TypedFiniteSet p);

    const TypedFiniteSet& source() const { return source_; }
    const TypedFiniteSet& target() const { return target_; }
    std::size_t map(std::size_t source_port) const;
    const std::vector<std::size_t>& mapping() const { return map_; }

    /// The dependent-product map: pulls a point on the target back to the
    /// source, so that coordinate p of the result is coordinate map(p) of pt.
    Point reindex(const Point& target_point) const;

private:
    TypedFiniteSet source_;
    TypedFiniteSet target_;
    std::vector<std::size_t> map_;
};

/// Composition g∘f of typed functions; reindex(g∘f) = reindex(f)∘reindex(g).
TypedFunction compose(const TypedFunction& g, const TypedFunction& f);

/// An interface: input and output ports.
struct Box {
    TypedFiniteSet inputs;
    TypedFiniteSet outputs;

    bool all_finite() const { return inputs.all_finite() && outputs.all_finite(); }
    bool all_euclid() const { return inputs.all_euclid() && outputs.all_euclid(); }
    bool types_equal(const Box& other) const {
        return inputs.types_equal(other.inputs) && outputs.types_equal(other.outputs);
    }
};

Box box_sum(const Box& a, const Box& b);
Box closed_box();

}  // namespace wirecalc
