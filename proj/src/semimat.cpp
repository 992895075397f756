#include "wirecalc/semimat.hpp"

namespace wirecalc::detail {

TraceSplit plan_trace(const TypedFiniteSet& rows, const TypedFiniteSet& cols,
                      const TraceSelection& sel) {
    if (sel.row_ports.size() != sel.col_ports.size())
        throw Error(ErrorKind::TraceTypeMismatch, "row/column trace selections differ in length");
    TraceSplit split;
    split.row_traced.assign(rows.port_count(), false);
    split.col_traced.assign(cols.port_count(), false);
    for (std::size_t t = 0; t < sel.row_ports.size(); ++t) {
        std::size_t rp = sel.row_ports[t], cp = sel.col_ports[t];
        if (rp >= rows.port_count() || cp >= cols.port_count())
            throw Error(ErrorKind::IndexOutOfRange, "trace port out of range");
        if (split.row_traced[rp] || split.col_traced[cp])
            throw Error(ErrorKind::TraceTypeMismatch, "trace port selected twice");
        if (rows.port(rp).type != cols.port(cp).type)
            throw Error(ErrorKind::TraceTypeMismatch,
                        "traced factor types differ at ports '" + rows.port(rp).name + "'/'" +
                            cols.port(cp).name + "'");
        split.row_traced[rp] = true;
        split.col_traced[cp] = true;
    }
    split.row_order = sel.row_ports;
    split.col_order = sel.col_ports;
    std::vector<Port> kr, kc;
    for (std::size_t p = 0; p < rows.port_count(); ++p)
        if (!split.row_traced[p]) kr.push_back(rows.port(p));
    for (std::size_t p = 0; p < cols.port_count(); ++p)
        if (!split.col_traced[p]) kc.push_back(cols.port(p));
    split.kept_rows = TypedFiniteSet(std::move(kr));
    split.kept_cols = TypedFiniteSet(std::move(kc));
    return split;
}

}  // namespace wirecalc::detail
