#include "wirecalc/wiring.hpp"

#include <random>

namespace wirecalc {

namespace {

const PortType& source_type(const Box& inner, const Box& outer, WireSource s) {
    if (s.kind == WireSource::Kind::OuterInput) return outer.inputs.port(s.port).type;
    return inner.outputs.port(s.port).type;
}

std::string source_name(const Box& inner, const Box& outer, WireSource s) {
    if (s.kind == WireSource::Kind::OuterInput) return outer.inputs.port(s.port).name;
    return inner.outputs.port(s.port).name;
}

}  // namespace

WiringDiagram::WiringDiagram(Box inner, Box outer, std::vector<WireSource> phi_in,
                             std::vector<std::size_t> phi_out) {
    WiringDiagram w = unchecked(std::move(inner), std::move(outer), std::move(phi_in),
                                std::move(phi_out));
    auto violations = validate(w);
    if (!violations.empty()) {
        std::string msg = "invalid wiring diagram";
        for (const auto& v : violations) msg += "; " + v;
        throw Error(ErrorKind::InvalidArgument, msg);
    }
    *this = std::move(w);
}

WiringDiagram WiringDiagram::unchecked(Box inner, Box outer, std::vector<WireSource> phi_in,
                                       std::vector<std::size_t> phi_out) {
    WiringDiagram w;
    w.inner_ = std::move(inner);
    w.outer_ = std::move(outer);
    w.phi_in_ = std::move(phi_in);
    w.phi_out_ = std::move(phi_out);
    return w;
}

WiringDiagram WiringDiagram::identity(const Box& x) {
    std::vector<WireSource> phi_in;
    phi_in.reserve(x.inputs.port_count());
    for (std::size_t p = 0; p < x.inputs.port_count(); ++p)
        phi_in.push_back(WireSource::outer_input(p));
    std::vector<std::size_t> phi_out(x.outputs.port_count());
    for (std::size_t q = 0; q < phi_out.size(); ++q) phi_out[q] = q;
    return WiringDiagram(x, x, std::move(phi_in), std::move(phi_out));
}

WireSource WiringDiagram::phi_in(std::size_t inner_input_port) const {
    if (inner_input_port >= phi_in_.size())
        throw Error(ErrorKind::IndexOutOfRange, "inner input port out of range");
    return phi_in_[inner_input_port];
}

std::size_t WiringDiagram::phi_out(std::size_t outer_output_port) const {
    if (outer_output_port >= phi_out_.size())
        throw Error(ErrorKind::IndexOutOfRange, "outer output port out of range");
    return phi_out_[outer_output_port];
}

TypedFunction WiringDiagram::phi_in_function() const {
    TypedFiniteSet target = tfs_sum(outer_.inputs, inner_.outputs);
    std::vector<std::size_t> map(phi_in_.size());
    for (std::size_t p = 0; p < phi_in_.size(); ++p) {
        const auto& s = phi_in_[p];
        map[p] = s.kind == WireSource::Kind::OuterInput
                     ? s.port
                     : outer_.inputs.port_count() + s.port;
    }
    return TypedFunction(inner_.inputs, std::move(target), std::move(map));
}

TypedFunction WiringDiagram::phi_out_function() const {
    return TypedFunction(outer_.outputs, inner_.outputs, phi_out_);
}

Point WiringDiagram::in_eval(const Point& outer_in, const Point& inner_out) const {
    check_point(outer_.inputs, outer_in);
    check_point(inner_.outputs, inner_out);
    if (inner_.inputs.all_finite() && (inner_.inputs.port_count() > 0 || outer_in.is_finite())) {
        std::vector<std::size_t> ix(phi_in_.size());
        for (std::size_t p = 0; p < phi_in_.size(); ++p) {
            const auto& s = phi_in_[p];
            ix[p] = s.kind == WireSource::Kind::OuterInput ? outer_in.indices()[s.port]
                                                           : inner_out.indices()[s.port];
        }
        return Point::finite(std::move(ix));
    }
    std::vector<double> coords;
    coords.reserve(inner_.inputs.euclid_dims());
    for (std::size_t p = 0; p < phi_in_.size(); ++p) {
        const auto& s = phi_in_[p];
        std::size_t d = inner_.inputs.port(p).type.dim();
        const auto& src = s.kind == WireSource::Kind::OuterInput ? outer_in : inner_out;
        const auto& space = s.kind == WireSource::Kind::OuterInput ? outer_.inputs : inner_.outputs;
        std::size_t off = space.coord_offset(s.port);
        for (std::size_t k = 0; k < d; ++k) coords.push_back(src.coords()[off + k]);
    }
    return Point::euclid(std::move(coords));
}

Point WiringDiagram::out_eval(const Point& inner_out) const {
    return phi_out_function().reindex(inner_out);
}

WiringDerivative WiringDiagram::derivative() const {
    if (!inner_.all_euclid() || !outer_.all_euclid())
        throw Error(ErrorKind::NotDifferentiable, "wiring derivative requires euclid ports");
    std::size_t xin = inner_.inputs.euclid_dims();
    std::size_t xout = inner_.outputs.euclid_dims();
    std::size_t yin = outer_.inputs.euclid_dims();
    std::size_t yout = outer_.outputs.euclid_dims();
    WiringDerivative d{Dense(xin, yin), Dense(xin, xout), Dense(yout, xout)};
    for (std::size_t p = 0; p < phi_in_.size(); ++p) {
        const auto& s = phi_in_[p];
        std::size_t row = inner_.inputs.coord_offset(p);
        std::size_t dim = inner_.inputs.port(p).type.dim();
        if (s.kind == WireSource::Kind::OuterInput) {
            std::size_t col = outer_.inputs.coord_offset(s.port);
            for (std::size_t k = 0; k < dim; ++k) d.phi_in_d(row + k, col + k) = 1.0;
        } else {
            std::size_t col = inner_.outputs.coord_offset(s.port);
            for (std::size_t k = 0; k < dim; ++k) d.phi_mid_d(row + k, col + k) = 1.0;
        }
    }
    for (std::size_t q = 0; q < phi_out_.size(); ++q) {
        std::size_t row = outer_.outputs.coord_offset(q);
        std::size_t col = inner_.outputs.coord_offset(phi_out_[q]);
        std::size_t dim = outer_.outputs.port(q).type.dim();
        for (std::size_t k = 0; k < dim; ++k) d.phi_out_d(row + k, col + k) = 1.0;
    }
    return d;
}

std::vector<std::string> validate(const WiringDiagram& w) {
    std::vector<std::string> violations;
    const Box& inner = w.inner();
    const Box& outer = w.outer();
    if (w.phi_in_map().size() != inner.inputs.port_count())
        violations.push_back("phi_in arity does not match inner input ports");
    if (w.phi_out_map().size() != outer.outputs.port_count())
        violations.push_back("phi_out arity does not match outer output ports");
    for (std::size_t p = 0; p < w.phi_in_map().size() && p < inner.inputs.port_count(); ++p) {
        const auto& s = w.phi_in_map()[p];
        const auto& space = s.kind == WireSource::Kind::OuterInput ? outer.inputs : inner.outputs;
        if (s.port >= space.port_count()) {
            violations.push_back("phi_in target out of range for port '" +
                                 inner.inputs.port(p).name + "'");
            continue;
        }
        if (inner.inputs.port(p).type != source_type(inner, outer, s))
            violations.push_back("type mismatch: port '" + inner.inputs.port(p).name +
                                 "' fed by '" + source_name(inner, outer, s) + "'");
    }
    for (std::size_t q = 0; q < w.phi_out_map().size() && q < outer.outputs.port_count(); ++q) {
        std::size_t t = w.phi_out_map()[q];
        if (t >= inner.outputs.port_count()) {
            violations.push_back("phi_out target out of range for port '" +
                                 outer.outputs.port(q).name + "'");
            continue;
        }
        if (outer.outputs.port(q).type != inner.outputs.port(t).type)
            violations.push_back("type mismatch: port '" + outer.outputs.port(q).name +
                                 "' reads '" + inner.outputs.port(t).name + "'");
    }
    return violations;
}

WiringDiagram compose(const WiringDiagram& psi, const WiringDiagram& phi) {
    if (!phi.outer().types_equal(psi.inner()))
        throw Error(ErrorKind::BoxMismatch, "middle boxes of composition do not match");
    std::vector<WireSource> phi_in;
    phi_in.reserve(phi.inner().inputs.port_count());
    for (std::size_t p = 0; p < phi.inner().inputs.port_count(); ++p) {
        WireSource s = phi.phi_in(p);
        if (s.kind == WireSource::Kind::InnerOutput) {
            phi_in.push_back(s);
            continue;
        }
        WireSource t = psi.phi_in(s.port);
        if (t.kind == WireSource::Kind::OuterInput) {
            phi_in.push_back(t);
        } else {
            // feed from a Y output: route through phi_out back into X outputs
            phi_in.push_back(WireSource::inner_output(phi.phi_out(t.port)));
        }
    }
    std::vector<std::size_t> phi_out(psi.outer().outputs.port_count());
    for (std::size_t q = 0; q < phi_out.size(); ++q) phi_out[q] = phi.phi_out(psi.phi_out(q));
    return WiringDiagram(phi.inner(), psi.outer(), std::move(phi_in), std::move(phi_out));
}

WiringDiagram sum(const WiringDiagram& a, const WiringDiagram& b) {
    Box inner = box_sum(a.inner(), b.inner());
    Box outer = box_sum(a.outer(), b.outer());
    std::vector<WireSource> phi_in;
    phi_in.reserve(inner.inputs.port_count());
    for (const auto& s : a.phi_in_map()) phi_in.push_back(s);
    for (const auto& s : b.phi_in_map()) {
        if (s.kind == WireSource::Kind::OuterInput)
            phi_in.push_back(WireSource::outer_input(a.outer().inputs.port_count() + s.port));
        else
            phi_in.push_back(WireSource::inner_output(a.inner().outputs.port_count() + s.port));
    }
    std::vector<std::size_t> phi_out;
    phi_out.reserve(outer.outputs.port_count());
    for (std::size_t q : a.phi_out_map()) phi_out.push_back(q);
    for (std::size_t q : b.phi_out_map()) phi_out.push_back(a.inner().outputs.port_count() + q);
    return WiringDiagram(std::move(inner), std::move(outer), std::move(phi_in),
                         std::move(phi_out));
}

bool extensionally_equal(const WiringDiagram& a, const WiringDiagram& b, std::uint64_t seed,
                         std::size_t samples, std::size_t exhaustive_cap) {
    if (!a.inner().types_equal(b.inner()) || !a.outer().types_equal(b.outer())) return false;
    if (a.inner().all_finite() && a.outer().all_finite()) {
        std::size_t yin = a.outer().inputs.enumeration_size();
        std::size_t xout = a.inner().outputs.enumeration_size();
        if (yin * xout <= exhaustive_cap) {
            for (std::size_t i = 0; i < yin; ++i) {
                Point y = unflatten(a.outer().inputs, i);
                for (std::size_t k = 0; k < xout; ++k) {
                    Point x = unflatten(a.inner().outputs, k);
                    if (a.in_eval(y, x) != b.in_eval(y, x)) return false;
                    if (i == 0 && a.out_eval(x) != b.out_eval(x)) return false;
                }
            }
            return true;
        }
        std::mt19937_64 rng(seed);
        for (std::size_t t = 0; t < samples; ++t) {
            Point y = unflatten(a.outer().inputs, rng() % yin);
            Point x = unflatten(a.inner().outputs, rng() % xout);
            if (a.in_eval(y, x) != b.in_eval(y, x)) return false;
            if (a.out_eval(x) != b.out_eval(x)) return false;
        }
        return true;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::size_t yin = a.outer().inputs.euclid_dims();
    std::size_t xout = a.inner().outputs.euclid_dims();
    for (std::size_t t = 0; t < samples; ++t) {
        std::vector<double> yv(yin), xv(xout);
        for (auto& v : yv) v = dist(rng);
        for (auto& v : xv) v = dist(rng);
        Point y = Point::euclid(yv), x = Point::euclid(xv);
        if (a.in_eval(y, x) != b.in_eval(y, x)) return false;
        if (a.out_eval(x) != b.out_eval(x)) return false;
    }
    return true;
}

}  // namespace wirecalc
