#include <cstdio>
#include <sstream>

#include "wirecalc/dsl.hpp"

namespace wirecalc {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool ports_identical(const TypedFiniteSet& a, const TypedFiniteSet& b) {
    if (a.port_count() != b.port_count()) return false;
    for (std::size_t i = 0; i < a.port_count(); ++i)
        if (a.port(i).name != b.port(i).name || a.port(i).type != b.port(i).type) return false;
    return true;
}

std::string box_name_of(const Workspace& ws, const Box& box) {
    for (const auto& [name, b] : ws.boxes)
        if (ports_identical(b.inputs, box.inputs) && ports_identical(b.outputs, box.outputs))
            return name;
    throw Error(ErrorKind::Internal, "box is not declared in the workspace");
}

void print_box(std::ostringstream& out, const std::string& name, const Box& box) {
    out << "box " << name << " {\n";
    for (const auto& p : box.inputs.ports())
        out << "  in " << p.name << ": " << p.type.to_string() << ";\n";
    for (const auto& p : box.outputs.ports())
        out << "  out " << p.name << ": " << p.type.to_string() << ";\n";
    out << "}\n";
}

void print_dense(std::ostringstream& out, const Dense& m) {
    out << "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) out << "; ";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << " ";
            out << fmt_double(m(i, j));
        }
    }
    out << "]";
}

void print_discrete_body(std::ostringstream& out, const DiscreteSystem& sys) {
    out << "  states";
    for (const auto& s : sys.states()) out << " " << label_text(s);
    out << ";\n";
    for (std::size_t a = 0; a < sys.input_size(); ++a) {
        Point in = unflatten(sys.box().inputs, a);
        for (std::size_t s = 0; s < sys.state_count(); ++s) {
            Point rd = sys.readout_point(s);
            out << "  table " << render_point(sys.box().inputs, in) << " "
                << label_text(sys.state(s)) << " -> " << render_point(sys.box().outputs, rd)
                << " " << label_text(sys.state(sys.update(a, s))) << ";\n";
        }
    }
}

}  // namespace

std::string print_workspace(const Workspace& ws) {
    std::ostringstream out;
    for (const auto& [name, type] : ws.type_aliases)
        out << "type " << name << " = " << type.to_string() << ";\n";
    for (const auto& [name, box] : ws.boxes) print_box(out, name, box);
    for (const auto& decl : ws.wirings) {
        out << "wiring " << decl.name << " :";
        for (const auto& [slot, box] : decl.slots) {
            out << " " << slot;
            if (slot != box) out << "=" << box;
        }
        out << " -> " << decl.outer_box << " {\n";
        for (const auto& w : decl.wires)
            out << "  " << w.dst_owner << "." << w.dst_port << " <- " << w.src_owner << "."
                << w.src_port << ";\n";
        out << "}\n";
    }
    for (const auto& [name, sys] : ws.discrete_systems) {
        out << "discrete " << name << " on " << box_name_of(ws, sys.box()) << " {\n";
        print_discrete_body(out, sys);
        out << "}\n";
    }
    for (const auto& [name, sys] : ws.weighted_systems) {
        out << "weighted " << name << " on " << box_name_of(ws, sys.system.box()) << " {\n";
        print_discrete_body(out, sys.system);
        for (std::size_t s = 0; s < sys.system.state_count(); ++s) {
            out << "  weight " << label_text(sys.system.state(s)) << " ";
            if (sys.weights[s].is_infinite())
                out << "inf";
            else
                out << fmt_double(sys.weights[s].value());
            out << ";\n";
        }
        out << "}\n";
    }
    for (const auto& [name, sys] : ws.continuous_systems) {
        out << "continuous " << name << " on " << box_name_of(ws, sys.box()) << " {\n";
        out << "  state";
        for (const auto& v : sys.state_vars()) out << " " << v;
        out << ";\n";
        for (std::size_t i = 0; i < sys.state_dim(); ++i)
            out << "  dot " << sys.state_vars()[i] << " = " << sys.dynamics()[i].to_string()
                << ";\n";
        auto coords = coord_names(sys.box().outputs);
        for (std::size_t i = 0; i < coords.size(); ++i)
            out << "  out " << coords[i] << " = " << sys.readout()[i].to_string() << ";\n";
        out << "}\n";
    }
    for (const auto& [name, sys] : ws.linear_systems) {
        out << "linear " << name << " on " << box_name_of(ws, sys.box()) << " {\n";
        out << "  states " << sys.state_dim() << ";\n";
        out << "  min ";
        print_dense(out, sys.m_in());
        out << ";\n  mid ";
        print_dense(out, sys.m_mid());
        out << ";\n  mout ";
        print_dense(out, sys.m_out());
        out << ";\n}\n";
    }
    auto print_matrix = [&](const std::string& name, const auto& m, const char* semiring,
                            auto entry_text) {
        Box box{m.row_space(), m.col_space()};
        out << "matrix " << name << " on " << box_name_of(ws, box) << " " << semiring << " {\n";
        auto dense = m.to_dense();
        for (const auto& row : dense) {
            out << "  row";
            for (const auto& v : row) out << " " << entry_text(v);
            out << ";\n";
        }
        out << "}\n";
    };
    for (const auto& [name, m] : ws.nat_matrices)
        print_matrix(name, m, "nat", [](const Nat64& v) { return v.to_string(); });
    for (const auto& [name, m] : ws.real_matrices)
        print_matrix(name, m, "real", [](const RealPlus& v) {
            return v.is_infinite() ? std::string("inf") : fmt_double(v.value());
        });
    for (const auto& argv : ws.commands) {
        out << "do";
        for (const auto& a : argv) out << " " << a;
        out << ";\n";
    }
    return out.str();
}

namespace {

struct SlotView {
    std::size_t in_begin, in_count;
    std::size_t out_begin, out_count;
};

std::vector<SlotView> slot_views(const Workspace& ws, const WiringDecl& decl) {
    std::vector<SlotView> views;
    for (std::size_t i = 0; i < decl.slots.size(); ++i) {
        const Box* b = ws.find_box(decl.slots[i].second);
        views.push_back({decl.slot_input_offset[i], b->inputs.port_count(),
                         decl.slot_output_offset[i], b->outputs.port_count()});
    }
    return views;
}

}  // namespace

ChainPlan plan_chain(const Workspace& ws, const WiringDecl& decl) {
    ChainPlan plan;
    const WiringDiagram& d = decl.diagram;
    auto views = slot_views(ws, decl);
    std::size_t n = views.size();

    auto owner_of_output = [&](std::size_t global) {
        for (std::size_t i = 0; i < n; ++i)
            if (global >= views[i].out_begin && global < views[i].out_begin + views[i].out_count)
                return i;
        throw Error(ErrorKind::Internal, "output port owner not found");
    };

    // feeds(a, b): slot b's inputs are exactly slot a's outputs, in order
    auto feeds = [&](std::size_t a, std::size_t b) {
        if (views[a].out_count != views[b].in_count || views[b].in_count == 0) return false;
        for (std::size_t k = 0; k < views[b].in_count; ++k) {
            WireSource s = d.phi_in(views[b].in_begin + k);
            if (s.kind != WireSource::Kind::InnerOutput || s.port != views[a].out_begin + k)
                return false;
        }
        return true;
    };

    std::vector<bool> is_successor(n, false);
    std::vector<std::optional<std::size_t>> succ(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || !feeds(a, b)) continue;
            if (succ[a]) {
                plan.reason = "slot feeds two successors";
                return plan;
            }
            succ[a] = b;
            is_successor[b] = true;
        }

    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_successor[i]) continue;
        if (start != n) {
            plan.reason = "no unique chain head";
            return plan;
        }
        start = i;
    }
    if (start == n) {
        plan.reason = "no chain head (cyclic slot feeding)";
        return plan;
    }
    std::vector<bool> used(n, false);
    std::size_t cur = start;
    while (true) {
        plan.order.push_back(cur);
        used[cur] = true;
        if (!succ[cur]) break;
        cur = *succ[cur];
        if (used[cur]) {
            plan.reason = "slot feeding is cyclic";
            return plan;
        }
    }
    if (plan.order.size() != n) {
        plan.reason = "slots do not form a single chain";
        return plan;
    }

    std::size_t first = plan.order.front(), last = plan.order.back();
    // first slot: inputs come from outer inputs or from the last slot (feedback)
    std::vector<std::size_t> outer_feed(d.outer().inputs.port_count(), SIZE_MAX);
    for (std::size_t k = 0; k < views[first].in_count; ++k) {
        WireSource s = d.phi_in(views[first].in_begin + k);
        if (s.kind == WireSource::Kind::OuterInput) {
            if (outer_feed[s.port] != SIZE_MAX) {
                plan.reason = "outer input splits into two chain-head ports";
                return plan;
            }
            outer_feed[s.port] = k;
        } else {
            if (owner_of_output(s.port) != last) {
                plan.reason = "feedback does not come from the chain tail";
                return plan;
            }
            plan.feedback.emplace_back(k, s.port - views[last].out_begin);
        }
    }
    for (std::size_t q = 0; q < outer_feed.size(); ++q) {
        if (outer_feed[q] == SIZE_MAX) {
            plan.reason = "outer input '" + d.outer().inputs.port(q).name + "' is unused";
            return plan;
        }
        plan.outer_input_to_first.push_back(outer_feed[q]);
    }

    std::vector<bool> col_taken(views[last].out_count, false);
    for (const auto& [rp, cp] : plan.feedback) {
        if (col_taken[cp]) {
            plan.reason = "feedback output splits";
            return plan;
        }
        col_taken[cp] = true;
    }
    for (std::size_t q = 0; q < d.outer().outputs.port_count(); ++q) {
        std::size_t src = d.phi_out(q);
        if (owner_of_output(src) != last) {
            plan.reason = "outer output does not read the chain tail";
            return plan;
        }
        std::size_t local = src - views[last].out_begin;
        if (col_taken[local]) {
            plan.reason = "chain-tail output splits";
            return plan;
        }
        col_taken[local] = true;
        plan.outer_output_to_last.push_back(local);
    }
    for (bool taken : col_taken)
        if (!taken) {
            plan.reason = "a chain-tail output is dangling";
            return plan;
        }
    plan.applicable = true;
    return plan;
}

namespace {

SetMatrix permute_set_spaces(const SetMatrix& m, const std::vector<std::size_t>& row_perm,
                             const std::vector<std::size_t>& col_perm) {
    auto permute = [](const TypedFiniteSet& s, const std::vector<std::size_t>& perm) {
        std::vector<Port> ports;
        for (std::size_t p : perm) ports.push_back(s.port(p));
        return TypedFiniteSet(std::move(ports));
    };
    SetMatrix out(permute(m.row_space(), row_perm), permute(m.col_space(), col_perm));
    for (const auto& [ij, cell] : m.entries()) {
        Point r = unflatten(m.row_space(), ij.first);
        Point c = unflatten(m.col_space(), ij.second);
        std::vector<std::size_t> ri, ci;
        for (std::size_t p : row_perm) ri.push_back(r.indices()[p]);
        for (std::size_t p : col_perm) ci.push_back(c.indices()[p]);
        std::size_t i = flat_index(out.row_space(), Point::finite(std::move(ri)));
        std::size_t j = flat_index(out.col_space(), Point::finite(std::move(ci)));
        for (const auto& e : cell) out.insert(i, j, e);
    }
    return out;
}

}  // namespace

SetMatrix chain_compose_sets(const ChainPlan& plan, const std::vector<SetMatrix>& slot_matrices,
                             UnionMode mode) {
    if (!plan.applicable)
        throw Error(ErrorKind::ShapeMismatch, "serial-chain plan not applicable: " + plan.reason);
    SetMatrix acc = slot_matrices[plan.order[0]];
    for (std::size_t i = 1; i < plan.order.size(); ++i)
        acc = smat_multiply(acc, slot_matrices[plan.order[i]], mode);
    if (!plan.feedback.empty()) {
        TraceSelection sel;
        for (const auto& [rp, cp] : plan.feedback) {
            sel.row_ports.push_back(rp);
            sel.col_ports.push_back(cp);
        }
        acc = smat_trace(acc, sel, mode);
    }
    std::vector<std::size_t> row_map(slot_matrices[plan.order[0]].row_space().port_count(),
                                     SIZE_MAX);
    {
        std::vector<bool> traced(row_map.size(), false);
        for (const auto& [rp, cp] : plan.feedback) traced[rp] = true;
        std::size_t next = 0;
        for (std::size_t p = 0; p < row_map.size(); ++p)
            if (!traced[p]) row_map[p] = next++;
    }
    std::vector<std::size_t> col_map(slot_matrices[plan.order.back()].col_space().port_count(),
                                     SIZE_MAX);
    {
        std::vector<bool> traced(col_map.size(), false);
        for (const auto& [rp, cp] : plan.feedback) traced[cp] = true;
        std::size_t next = 0;
        for (std::size_t p = 0; p < col_map.size(); ++p)
            if (!traced[p]) col_map[p] = next++;
    }
    std::vector<std::size_t> row_perm, col_perm;
    for (std::size_t p : plan.outer_input_to_first) row_perm.push_back(row_map[p]);
    for (std::size_t p : plan.outer_output_to_last) col_perm.push_back(col_map[p]);
    return permute_set_spaces(acc, row_perm, col_perm);
}

}  // namespace wirecalc
