#include "wirecalc/setmat.hpp"

namespace wirecalc {

std::string SetElem::text() const {
    std::string out;
    for (const auto& a : atoms) out += a;
    if (!tags.empty()) {
        out += "@";
        for (std::size_t i = 0; i < tags.size(); ++i) {
            if (i) out += ".";
            out += tags[i];
        }
    }
    return out;
}

SetMatrix::SetMatrix(TypedFiniteSet row_space, TypedFiniteSet col_space)
    : row_space_(std::move(row_space)), col_space_(std::move(col_space)) {
    if (!row_space_.all_finite() || !col_space_.all_finite())
        throw Error(ErrorKind::NotEnumerable, "set matrix index spaces must be finite");
    nrows_ = row_space_.enumeration_size();
    ncols_ = col_space_.enumeration_size();
}

void SetMatrix::check_index(std::size_t i, std::size_t j) const {
    if (i >= nrows_ || j >= ncols_)
        throw Error(ErrorKind::IndexOutOfRange, "set matrix index out of range");
}

const SetMatrix::Cell& SetMatrix::at(std::size_t i, std::size_t j) const {
    check_index(i, j);
    static const Cell empty;
    auto it = cells_.find({i, j});
    return it == cells_.end() ? empty : it->second;
}

void SetMatrix::insert(std::size_t i, std::size_t j, SetElem e) {
    check_index(i, j);
    cells_[{i, j}].insert(std::move(e));
}

void SetMatrix::insert_disjoint(std::size_t i, std::size_t j, SetElem e) {
    check_index(i, j);
    if (!cells_[{i, j}].insert(std::move(e)).second)
        throw Error(ErrorKind::DisjointnessViolation,
                    "flat union produced a duplicate element; use tagged mode");
}

SetMatrix smat_parallel(const SetMatrix& a, const SetMatrix& b, std::size_t size_cap) {
    SetMatrix out(tfs_sum(a.row_space(), b.row_space()), tfs_sum(a.col_space(), b.col_space()));
    check_size_cap(out.rows(), out.cols(), size_cap);
    for (const auto& [ij1, cell1] : a.entries())
        for (const auto& [ij2, cell2] : b.entries()) {
            std::size_t i = ij1.first * b.rows() + ij2.first;
            std::size_t j = ij1.second * b.cols() + ij2.second;
            for (const auto& e1 : cell1)
                for (const auto& e2 : cell2) {
                    SetElem e;
                    e.atoms = e1.atoms;
                    e.atoms.insert(e.atoms.end(), e2.atoms.begin(), e2.atoms.end());
                    e.tags = e1.tags;
                    e.tags.insert(e.tags.end(), e2.tags.begin(), e2.tags.end());
                    out.insert(i, j, std::move(e));
                }
        }
    return out;
}

namespace {

SetElem tag_elem(const SetElem& e, const std::string& tag, UnionMode mode) {
    SetElem out = e;
    if (mode == UnionMode::Tagged) out.tags.push_back(tag);
    return out;
}

void insert_mode(SetMatrix& m, std::size_t i, std::size_t j, SetElem e, UnionMode mode) {
    if (mode == UnionMode::Flat)
        m.insert_disjoint(i, j, std::move(e));
    else
        m.insert(i, j, std::move(e));
}

}  // namespace

SetMatrix smat_apply(const WiringDiagram& w, const SetMatrix& m, UnionMode mode,
                     std::size_t size_cap) {
    if (!m.row_space().types_equal(w.inner().inputs) ||
        !m.col_space().types_equal(w.inner().outputs))
        throw Error(ErrorKind::ShapeMismatch, "set matrix does not inhabit the inner box");
    if (!w.outer().all_finite())
        throw Error(ErrorKind::NotEnumerable, "set matrix application needs a finite outer box");
    SetMatrix out(w.outer().inputs, w.outer().outputs);
    check_size_cap(out.rows(), out.cols(), size_cap);
    std::size_t yin = out.rows();
    std::size_t xout = m.cols();
    check_size_cap(yin, xout, size_cap);
    for (std::size_t k = 0; k < xout; ++k) {
        Point x = unflatten(w.inner().outputs, k);
        std::size_t j = flat_index(w.outer().outputs, w.out_eval(x));
        std::string tag = std::to_string(k);
        for (std::size_t i = 0; i < yin; ++i) {
            Point y = unflatten(w.outer().inputs, i);
            std::size_t r = flat_index(w.inner().inputs, w.in_eval(y, x));
            for (const auto& e : m.at(r, k)) insert_mode(out, i, j, tag_elem(e, tag, mode), mode);
        }
    }
    return out;
}

SetMatrix smat_multiply(const SetMatrix& a, const SetMatrix& b, UnionMode mode) {
    if (!a.col_space().types_equal(b.row_space()))
        throw Error(ErrorKind::ShapeMismatch, "set matrix product: middle index spaces differ");
    SetMatrix out(a.row_space(), b.col_space());
    for (const auto& [ik, cell_a] : a.entries()) {
        auto it = b.entries().lower_bound({ik.second, 0});
        for (; it != b.entries().end() && it->first.first == ik.second; ++it) {
            std::string tag = std::to_string(ik.second);
            for (const auto& e1 : cell_a)
                for (const auto& e2 : it->second) {
                    SetElem e;
                    e.atoms = e1.atoms;
                    e.atoms.insert(e.atoms.end(), e2.atoms.begin(), e2.atoms.end());
                    e.tags = e1.tags;
                    e.tags.insert(e.tags.end(), e2.tags.begin(), e2.tags.end());
                    insert_mode(out, ik.first, it->first.second, tag_elem(e, tag, mode), mode);
                }
        }
    }
    return out;
}

SetMatrix smat_trace(const SetMatrix& m, const TraceSelection& sel, UnionMode mode) {
    auto split = detail::plan_trace(m.row_space(), m.col_space(), sel);
    SetMatrix out(split.kept_rows, split.kept_cols);
    for (const auto& [ij, cell] : m.entries()) {
        Point r = unflatten(m.row_space(), ij.first);
        Point c = unflatten(m.col_space(), ij.second);
        bool diagonal = true;
        std::string tag;
        for (std::size_t t = 0; t < split.row_order.size() && diagonal; ++t) {
            diagonal = r.indices()[split.row_order[t]] == c.indices()[split.col_order[t]];
            if (t) tag += ",";
            tag += std::to_string(r.indices()[split.row_order[t]]);
        }
        if (!diagonal) continue;
        std::vector<std::size_t> ri, ci;
        for (std::size_t p = 0; p < r.indices().size(); ++p)
            if (!split.row_traced[p]) ri.push_back(r.indices()[p]);
        for (std::size_t p = 0; p < c.indices().size(); ++p)
            if (!split.col_traced[p]) ci.push_back(c.indices()[p]);
        std::size_t i = flat_index(split.kept_rows, Point::finite(std::move(ri)));
        std::size_t j = flat_index(split.kept_cols, Point::finite(std::move(ci)));
        for (const auto& e : cell) insert_mode(out, i, j, tag_elem(e, tag, mode), mode);
    }
    return out;
}

Matrix<Nat64> smat_count(const SetMatrix& m) {
    Matrix<Nat64> out(m.row_space(), m.col_space());
    for (const auto& [ij, cell] : m.entries())
        out.set(ij.first, ij.second, Nat64(cell.size()));
    return out;
}

SetMatrix canonical_flatten(const SetMatrix& m) {
    SetMatrix out(m.row_space(), m.col_space());
    for (const auto& [ij, cell] : m.entries())
        for (const auto& e : cell) {
            SetElem flat;
            flat.atoms = e.atoms;
            if (!e.tags.empty()) flat.tags.push_back(e.tags.front());
            out.insert(ij.first, ij.second, std::move(flat));
        }
    return out;
}

SetMatrix steady_state_sets(const DiscreteSystem& f) {
    Instrumentation::count_scan_pairs(static_cast<std::uint64_t>(f.input_size()) *
                                      f.state_count());
    SetMatrix out(f.box().inputs, f.box().outputs);
    for (std::size_t a = 0; a < f.input_size(); ++a)
        for (std::size_t s = 0; s < f.state_count(); ++s)
            if (f.update(a, s) == s) out.insert(a, f.readout(s), SetElem{f.state(s), {}});
    return out;
}

QMatrix::QMatrix(SetMatrix base, Box payload_box)
    : base_(std::move(base)), payload_box_(std::move(payload_box)) {
    if (!payload_box_.all_euclid())
        throw Error(ErrorKind::WrongInterpretation, "payload box must be all-euclid");
    if (payload_box_.inputs.port_count() != base_.row_space().port_count() ||
        payload_box_.outputs.port_count() != base_.col_space().port_count())
        throw Error(ErrorKind::ShapeMismatch,
                    "payload box ports must correspond to the base box ports");
}

void QMatrix::attach(std::size_t i, std::size_t j, const SetElem& e, LinearSystem payload) {
    if (!base_.at(i, j).count(e))
        throw Error(ErrorKind::InvalidArgument, "payload attached to a non-element");
    if (!payload.box().types_equal(payload_box_))
        throw Error(ErrorKind::BoxMismatch, "payload does not inhabit the payload box");
    payload_.insert_or_assign({i, j, e}, std::move(payload));
}

const LinearSystem& QMatrix::payload(std::size_t i, std::size_t j, const SetElem& e) const {
    auto it = payload_.find({i, j, e});
    if (it == payload_.end())
        throw Error(ErrorKind::InvalidArgument, "no payload for element '" + e.text() + "'");
    return it->second;
}

void QMatrix::check_total() const {
    std::size_t elements = 0;
    for (const auto& [ij, cell] : base_.entries()) {
        elements += cell.size();
        for (const auto& e : cell)
            if (!payload_.count({ij.first, ij.second, e}))
                throw Error(ErrorKind::InvalidArgument,
                            "missing payload for element '" + e.text() + "'");
    }
    if (elements != payload_.size())
        throw Error(ErrorKind::InvalidArgument, "payload map has stray entries");
}

WiringDiagram payload_shadow(const WiringDiagram& w, const Box& payload_inner) {
    std::vector<Port> outer_in(w.outer().inputs.port_count(),
                               Port{"", PortType::euclid(0)});
    std::vector<bool> fed(outer_in.size(), false);
    for (std::size_t p = 0; p < w.inner().inputs.port_count(); ++p) {
        WireSource s = w.phi_in(p);
        const PortType& t = payload_inner.inputs.port(p).type;
        if (s.kind != WireSource::Kind::OuterInput) {
            if (payload_inner.outputs.port(s.port).type != t)
                throw Error(ErrorKind::ShapeMismatch,
                            "payload port dims disagree along a feedback wire");
            continue;
        }
        if (fed[s.port] && outer_in[s.port].type != t)
            throw Error(ErrorKind::ShapeMismatch, "payload port dims disagree along a split wire");
        outer_in[s.port] = Port{w.outer().inputs.port(s.port).name, t};
        fed[s.port] = true;
    }
    for (std::size_t q = 0; q < fed.size(); ++q)
        if (!fed[q])
            throw Error(ErrorKind::ShapeMismatch,
                        "outer input '" + w.outer().inputs.port(q).name +
                            "' feeds nothing; payload dimension is undetermined");
    std::vector<Port> outer_out;
    for (std::size_t q = 0; q < w.outer().outputs.port_count(); ++q)
        outer_out.push_back(Port{w.outer().outputs.port(q).name,
                                 payload_inner.outputs.port(w.phi_out(q)).type});
    Box outer{TypedFiniteSet(std::move(outer_in)), TypedFiniteSet(std::move(outer_out))};
    return WiringDiagram(payload_inner, std::move(outer), w.phi_in_map(), w.phi_out_map());
}

QMatrix qmat_parallel(const QMatrix& a, const QMatrix& b) {
    QMatrix out(smat_parallel(a.base(), b.base()), box_sum(a.payload_box(), b.payload_box()));
    for (const auto& [ij1, cell1] : a.base().entries())
        for (const auto& [ij2, cell2] : b.base().entries()) {
            std::size_t i = ij1.first * b.base().rows() + ij2.first;
            std::size_t j = ij1.second * b.base().cols() + ij2.second;
            for (const auto& e1 : cell1)
                for (const auto& e2 : cell2) {
                    SetElem e;
                    e.atoms = e1.atoms;
                    e.atoms.insert(e.atoms.end(), e2.atoms.begin(), e2.atoms.end());
                    e.tags = e1.tags;
                    e.tags.insert(e.tags.end(), e2.tags.begin(), e2.tags.end());
                    out.attach(i, j, e,
                               ls_parallel(a.payload(ij1.first, ij1.second, e1),
                                           b.payload(ij2.first, ij2.second, e2)));
                }
        }
    return out;
}

QMatrix qmat_apply(const WiringDiagram& w, const QMatrix& q, UnionMode mode) {
    WiringDiagram shadow = payload_shadow(w, q.payload_box());
    QMatrix out(smat_apply(w, q.base(), mode),
                Box{shadow.outer().inputs, shadow.outer().outputs});
    std::size_t yin = out.base().rows();
    std::size_t xout = q.base().cols();
    for (std::size_t k = 0; k < xout; ++k) {
        Point x = unflatten(w.inner().outputs, k);
        std::size_t j = flat_index(w.outer().outputs, w.out_eval(x));
        std::string tag = std::to_string(k);
        for (std::size_t i = 0; i < yin; ++i) {
            Point y = unflatten(w.outer().inputs, i);
            std::size_t r = flat_index(w.inner().inputs, w.in_eval(y, x));
            for (const auto& e : q.base().at(r, k))
                out.attach(i, j, tag_elem(e, tag, mode), ls_apply(shadow, q.payload(r, k, e)));
        }
    }
    out.check_total();
    return out;
}

}  // namespace wirecalc
