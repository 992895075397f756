#include "wirecalc/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wirecalc {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NotEnumerable: return "NotEnumerable";
        case ErrorKind::InvalidPoint: return "InvalidPoint";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::BoxMismatch: return "BoxMismatch";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::SizeCapExceeded: return "SizeCapExceeded";
        case ErrorKind::TraceTypeMismatch: return "TraceTypeMismatch";
        case ErrorKind::ArithmeticOverflow: return "ArithmeticOverflow";
        case ErrorKind::NotDifferentiable: return "NotDifferentiable";
        case ErrorKind::WrongInterpretation: return "WrongInterpretation";
        case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
        case ErrorKind::NotAffine: return "NotAffine";
        case ErrorKind::SizeUnsupported: return "SizeUnsupported";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::DisjointnessViolation: return "DisjointnessViolation";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::EvalError: return "EvalError";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

PortType PortType::finite(std::vector<std::string> symbols) {
    std::set<std::string_view> seen;
    for (const auto& s : symbols) {
        if (s.empty()) throw Error(ErrorKind::InvalidArgument, "empty alphabet symbol");
        if (!seen.insert(s).second)
            throw Error(ErrorKind::InvalidArgument, "duplicate alphabet symbol '" + s + "'");
    }
    PortType t;
    t.finite_ = true;
    t.symbols_ = std::move(symbols);
    return t;
}

PortType PortType::euclid(std::size_t dim) {
    PortType t;
    t.finite_ = false;
    t.dim_ = dim;
    return t;
}

const std::vector<std::string>& PortType::symbols() const {
    if (!finite_) throw Error(ErrorKind::WrongInterpretation, "euclid type has no alphabet");
    return symbols_;
}

std::size_t PortType::cardinality() const {
    if (!finite_) throw Error(ErrorKind::NotEnumerable, "euclid type is not enumerable");
    return symbols_.size();
}

std::size_t PortType::dim() const {
    if (finite_) throw Error(ErrorKind::WrongInterpretation, "finite type has no dimension");
    return dim_;
}

std::optional<std::size_t> PortType::symbol_index(std::string_view symbol) const {
    if (!finite_) return std::nullopt;
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i] == symbol) return i;
    return std::nullopt;
}

bool PortType::operator==(const PortType& other) const {
    if (finite_ != other.finite_) return false;
    return finite_ ? symbols_ == other.symbols_ : dim_ == other.dim_;
}

std::string PortType::to_string() const {
    if (!finite_) return "R " + std::to_string(dim_);
    std::string out = "{";
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (i) out += ",";
        out += symbols_[i];
    }
    return out + "}";
}

TypedFiniteSet::TypedFiniteSet(std::vector<Port> ports) : ports_(std::move(ports)) {
    std::set<std::string_view> names;
    bool saw_finite = false, saw_euclid = false;
    for (const auto& p : ports_) {
        if (p.name.empty()) throw Error(ErrorKind::InvalidArgument, "empty port name");
        if (!names.insert(p.name).second)
            throw Error(ErrorKind::InvalidArgument, "duplicate port name '" + p.name + "'");
        (p.type.is_finite() ? saw_finite : saw_euclid) = true;
    }
    if (saw_finite && saw_euclid)
        throw Error(ErrorKind::InvalidArgument, "mixed finite and euclid ports in one typed finite set");
}

const Port& TypedFiniteSet::port(std::size_t i) const {
    if (i >= ports_.size()) throw Error(ErrorKind::IndexOutOfRange, "port index out of range");
    return ports_[i];
}

std::optional<std::size_t> TypedFiniteSet::port_index(std::string_view name) const {
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (ports_[i].name == name) return i;
    return std::nullopt;
}

bool TypedFiniteSet::all_finite() const {
    return std::all_of(ports_.begin(), ports_.end(),
                       [](const Port& p) { return p.type.is_finite(); });
}

bool TypedFiniteSet::all_euclid() const {
    return std::all_of(ports_.begin(), ports_.end(),
                       [](const Port& p) { return p.type.is_euclid(); });
}

std::size_t TypedFiniteSet::enumeration_size() const {
    std::size_t n = 1;
    for (const auto& p : ports_) {
        std::size_t c = p.type.cardinality();
        if (c != 0 && n > SIZE_MAX / c)
            throw Error(ErrorKind::ArithmeticOverflow, "enumeration size overflow");
        n *= c;
    }
    return n;
}

std::size_t TypedFiniteSet::euclid_dims() const {
    std::size_t n = 0;
    for (const auto& p : ports_) n += p.type.dim();
    return n;
}

std::size_t TypedFiniteSet::coord_offset(std::size_t i) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < i; ++k) off += port(k).type.dim();
    return off;
}

bool TypedFiniteSet::types_equal(const TypedFiniteSet& other) const {
    if (ports_.size() != other.ports_.size()) return false;
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (ports_[i].type != other.ports_[i].type) return false;
    return true;
}

Point Point::finite(std::vector<std::size_t> symbol_indices) {
    Point p;
    p.finite_ = true;
    p.indices_ = std::move(symbol_indices);
    return p;
}

Point Point::euclid(std::vector<double> coords) {
    Point p;
    p.finite_ = false;
    p.coords_ = std::move(coords);
    return p;
}

const std::vector<std::size_t>& Point::indices() const {
    if (!finite_) throw Error(ErrorKind::InvalidPoint, "euclid point has no symbol indices");
    return indices_;
}

const std::vector<double>& Point::coords() const {
    if (finite_) throw Error(ErrorKind::InvalidPoint, "finite point has no real coordinates");
    return coords_;
}

bool Point::operator==(const Point& other) const {
    if (finite_ != other.finite_) {
        // the unique point of the empty product compares equal across kinds
        return indices_.empty() && coords_.empty() && other.indices_.empty() &&
               other.coords_.empty();
    }
    return finite_ ? indices_ == other.indices_ : coords_ == other.coords_;
}

void check_point(const TypedFiniteSet& tfs, const Point& pt) {
    if (tfs.empty()) {
        bool empty = pt.is_finite() ? pt.indices().empty() : pt.coords().empty();
        if (!empty) throw Error(ErrorKind::InvalidPoint, "point is not the empty tuple");
        return;
    }
    if (tfs.all_finite()) {
        if (!pt.is_finite()) throw Error(ErrorKind::InvalidPoint, "expected finite point");
        const auto& ix = pt.indices();
        if (ix.size() != tfs.port_count())
            throw Error(ErrorKind::InvalidPoint, "point arity does not match port count");
        for (std::size_t i = 0; i < ix.size(); ++i)
            if (ix[i] >= tfs.port(i).type.cardinality())
                throw Error(ErrorKind::InvalidPoint,
                            "symbol index out of bounds at port '" + tfs.port(i).name + "'");
        return;
    }
    if (pt.is_finite()) throw Error(ErrorKind::InvalidPoint, "expected euclid point");
    if (pt.coords().size() != tfs.euclid_dims())
        throw Error(ErrorKind::InvalidPoint, "coordinate count does not match total dims");
}

std::size_t flat_index(const TypedFiniteSet& tfs, const Point& pt) {
    if (!tfs.all_finite()) throw Error(ErrorKind::NotEnumerable, "euclid port present");
    check_point(tfs, pt);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < tfs.port_count(); ++i)
        idx = idx * tfs.port(i).type.cardinality() + pt.indices()[i];
    return idx;
}

Point unflatten(const TypedFiniteSet& tfs, std::size_t idx) {
    if (!tfs.all_finite()) throw Error(ErrorKind::NotEnumerable, "euclid port present");
    if (idx >= tfs.enumeration_size())
        throw Error(ErrorKind::IndexOutOfRange, "flat index out of range");
    std::vector<std::size_t> ix(tfs.port_count(), 0);
    for (std::size_t i = tfs.port_count(); i-- > 0;) {
        std::size_t c = tfs.port(i).type.cardinality();
        ix[i] = idx % c;
        idx /= c;
    }
    return Point::finite(std::move(ix));
}

TypedFiniteSet tfs_sum(const TypedFiniteSet& a, const TypedFiniteSet& b) {
    bool collision = false;
    for (const auto& p : b.ports())
        if (a.port_index(p.name)) collision = true;
    std::vector<Port> ports;
    ports.reserve(a.port_count() + b.port_count());
    for (const auto& p : a.ports())
        ports.push_back({collision ? "l." + p.name : p.name, p.type});
    for (const auto& p : b.ports())
        ports.push_back({collision ? "r." + p.name : p.name, p.type});
    return TypedFiniteSet(std::move(ports));
}

std::string render_point(const TypedFiniteSet& tfs, const Point& pt) {
    check_point(tfs, pt);
    std::ostringstream out;
    if (tfs.all_finite()) {
        for (std::size_t i = 0; i < tfs.port_count(); ++i) {
            if (i) out << ",";
            out << tfs.port(i).type.symbols()[pt.indices()[i]];
        }
    } else {
        for (std::size_t i = 0; i < pt.coords().size(); ++i) {
            if (i) out << ",";
            out << pt.coords()[i];
        }
    }
    return out.str();
}

TypedFunction::TypedFunction(TypedFiniteSet source, TypedFiniteSet target,
                             std::vector<std::size_t> map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
    if (map_.size() != source_.port_count())
        throw Error(ErrorKind::InvalidArgument, "typed function map arity mismatch");
    for (std::size_t p = 0; p < map_.size(); ++p) {
        if (map_[p] >= target_.port_count())
            throw Error(ErrorKind::IndexOutOfRange, "typed function maps outside target");
        if (source_.port(p).type != target_.port(map_[p]).type)
            throw Error(ErrorKind::InvalidArgument,
                        "typed function does not respect types at port '" +
                            source_.port(p).name + "'");
    }
}

TypedFunction TypedFunction::identity(TypedFiniteSet p) {
    std::vector<std::size_t> map(p.port_count());
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
    TypedFiniteSet copy = p;
    return TypedFunction(std::move(copy), std::move(p), std::move(map));
}

std::size_t TypedFunction::map(std::size_t source_port) const {
    if (source_port >= map_.size())
        throw Error(ErrorKind::IndexOutOfRange, "source port out of range");
    return map_[source_port];
}

Point TypedFunction::reindex(const Point& target_point) const {
    check_point(target_, target_point);
    if (source_.empty())
        return source_.all_finite() ? Point::finite({}) : Point::euclid({});
    if (source_.all_finite()) {
        std::vector<std::size_t> ix(source_.port_count());
        for (std::size_t p = 0; p < ix.size(); ++p) ix[p] = target_point.indices()[map_[p]];
        return Point::finite(std::move(ix));
    }
    std::vector<double> coords;
    coords.reserve(source_.euclid_dims());
    for (std::size_t p = 0; p < source_.port_count(); ++p) {
        std::size_t off = target_.coord_offset(map_[p]);
        std::size_t d = source_.port(p).type.dim();
        for (std::size_t k = 0; k < d; ++k) coords.push_back(target_point.coords()[off + k]);
    }
    return Point::euclid(std::move(coords));
}

TypedFunction compose(const TypedFunction& g, const TypedFunction& f) {
    if (!f.target().types_equal(g.source()))
        throw Error(ErrorKind::ShapeMismatch, "typed functions are not composable");
    std::vector<std::size_t> map(f.source().port_count());
    for (std::size_t p = 0; p < map.size(); ++p) map[p] = g.map(f.map(p));
    return TypedFunction(f.source(), g.target(), std::move(map));
}

Box box_sum(const Box& a, const Box& b) {
    return Box{tfs_sum(a.inputs, b.inputs), tfs_sum(a.outputs, b.outputs)};
}

Box closed_box() { return Box{TypedFiniteSet(), TypedFiniteSet()}; }

}  // namespace wirecalc
