#include "wirecalc/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

#include "wirecalc/harness.hpp"

namespace wirecalc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !s.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> row_labels(const TypedFiniteSet& space) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < space.enumeration_size(); ++i)
        labels.push_back(render_point(space, unflatten(space, i)));
    return labels;
}

std::string table_text(const std::string& corner, const std::vector<std::string>& rows,
                       const std::vector<std::string>& cols,
                       const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> widths(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        widths[j] = cols[j].size();
        for (const auto& row : cells) widths[j] = std::max(widths[j], row[j].size());
    }
    std::size_t row_width = corner.size();
    for (const auto& r : rows) row_width = std::max(row_width, r.size());
    std::ostringstream out;
    out << corner << std::string(row_width - corner.size(), ' ');
    for (std::size_t j = 0; j < cols.size(); ++j)
        out << "  " << std::string(widths[j] - cols[j].size(), ' ') << cols[j];
    out << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << rows[i] << std::string(row_width - rows[i].size(), ' ');
        for (std::size_t j = 0; j < cols.size(); ++j)
            out << "  " << std::string(widths[j] - cells[i][j].size(), ' ') << cells[i][j];
        out << "\n";
    }
    return out.str();
}

template <typename M, typename EntryText>
std::string matrix_table(const M& m, EntryText entry_text) {
    auto rows = row_labels(m.row_space());
    auto cols = row_labels(m.col_space());
    std::vector<std::vector<std::string>> cells(m.rows(), std::vector<std::string>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) cells[i][j] = entry_text(m, i, j);
    return table_text("Is fixed by / Outputs", rows, cols, cells);
}

std::string real_text(const RealPlus& v) {
    if (v.is_infinite()) return "inf";
    std::ostringstream out;
    out.precision(12);
    out << v.value();
    return out.str();
}

}  // namespace

std::string render_matrix_text(const Matrix<Nat64>& m) {
    return matrix_table(m, [](const Matrix<Nat64>& mm, std::size_t i, std::size_t j) {
        return mm.at(i, j).to_string();
    });
}

std::string render_matrix_text(const Matrix<RealPlus>& m) {
    return matrix_table(m, [](const Matrix<RealPlus>& mm, std::size_t i, std::size_t j) {
        return real_text(mm.at(i, j));
    });
}

std::string render_set_matrix_text(const SetMatrix& m) {
    return matrix_table(m, [](const SetMatrix& mm, std::size_t i, std::size_t j) {
        const auto& cell = mm.at(i, j);
        if (cell.empty()) return std::string("{}");
        std::string out = "{";
        bool first = true;
        for (const auto& e : cell) {
            if (!first) out += ",";
            first = false;
            out += e.text();
        }
        return out + "}";
    });
}

namespace {

template <typename M, typename EntryJson>
ordered_json matrix_json(const M& m, const char* kind, const char* semiring,
                         EntryJson entry_json) {
    ordered_json j;
    j["kind"] = kind;
    j["semiring"] = semiring;
    j["dims"] = {m.rows(), m.cols()};
    j["rows"] = row_labels(m.row_space());
    j["cols"] = row_labels(m.col_space());
    ordered_json triples = ordered_json::array();
    for (const auto& [ij, v] : m.entries())
        triples.push_back({ij.first, ij.second, entry_json(v)});
    j["triples"] = std::move(triples);
    return j;
}

}  // namespace

std::string machine_json(const Matrix<Nat64>& m) {
    return matrix_json(m, "matrix", "nat", [](const Nat64& v) { return v.to_string(); }).dump();
}

std::string machine_json(const Matrix<RealPlus>& m) {
    return matrix_json(m, "matrix", "real", [](const RealPlus& v) { return real_text(v); })
        .dump();
}

std::string machine_json(const SetMatrix& m) {
    return matrix_json(m, "set-matrix", "set", [](const SetMatrix::Cell& cell) {
               ordered_json arr = ordered_json::array();
               for (const auto& e : cell) arr.push_back(e.text());
               return arr;
           })
        .dump();
}

namespace {

[[noreturn]] void usage_error(const std::string& msg) {
    throw Error(ErrorKind::InvalidArgument, msg);
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> out;
    if (text.empty()) return out;
    for (const auto& part : split(text, ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            usage_error("malformed " + what + " '" + part + "'");
        }
    }
    return out;
}

/// The wiring instance of a command: the declaration plus one inhabitant
/// name per slot.
struct Instance {
    const WiringDecl* decl = nullptr;
    std::vector<std::string> inhabitants;  // per slot
};

Instance resolve_instance(const Workspace& ws, const CommandOptions& opt) {
    Instance inst;
    inst.decl = ws.find_wiring(opt.wiring);
    if (!inst.decl) usage_error("unknown wiring '" + opt.wiring + "'");
    for (const auto& [slot, box] : inst.decl->slots) {
        std::string bound = slot;  // default: inhabitant named like the slot
        for (const auto& [s, n] : opt.with)
            if (s == slot) bound = n;
        inst.inhabitants.push_back(bound);
    }
    for (const auto& [s, n] : opt.with)
        if (std::find_if(inst.decl->slots.begin(), inst.decl->slots.end(),
                         [&](const auto& p) { return p.first == s; }) == inst.decl->slots.end())
            usage_error("binding for unknown slot '" + s + "'");
    return inst;
}

enum class Interp { Discrete, Weighted, Continuous, Linear, NatMat, RealMat };

Interp infer_interp(const Workspace& ws, const std::string& name) {
    if (ws.find_discrete(name)) return Interp::Discrete;
    if (ws.find_weighted(name)) return Interp::Weighted;
    if (ws.find_continuous(name)) return Interp::Continuous;
    if (ws.find_linear(name)) return Interp::Linear;
    if (ws.find_nat_matrix(name)) return Interp::NatMat;
    if (ws.find_real_matrix(name)) return Interp::RealMat;
    usage_error("no system or matrix named '" + name + "'");
}

void check_slot_box(const Workspace& ws, const Instance& inst, std::size_t slot,
                    const Box& inhabitant_box) {
    const Box* slot_box = ws.find_box(inst.decl->slots[slot].second);
    if (!inhabitant_box.types_equal(*slot_box))
        usage_error("inhabitant '" + inst.inhabitants[slot] + "' does not fit slot '" +
                    inst.decl->slots[slot].first + "'");
}

bool serial_plan(const CommandOptions& opt) {
    if (opt.plan == "serial-chain" || opt.plan == "serial") return true;
    if (opt.plan == "tensor-then-wire" || opt.plan == "tensor") return false;
    usage_error("unknown plan '" + opt.plan + "' (tensor-then-wire|serial-chain)");
}

DiscreteSystem compose_discrete(const Workspace& ws, const Instance& inst) {
    std::vector<const DiscreteSystem*> systems;
    for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
        const DiscreteSystem* s = ws.find_discrete(inst.inhabitants[i]);
        if (!s) usage_error("'" + inst.inhabitants[i] + "' is not a discrete system");
        check_slot_box(ws, inst, i, s->box());
        systems.push_back(s);
    }
    DiscreteSystem acc = *systems[0];
    for (std::size_t i = 1; i < systems.size(); ++i) acc = ds_parallel(acc, *systems[i]);
    return ds_apply(inst.decl->diagram, acc);
}

std::string render_discrete(const DiscreteSystem& sys) {
    std::ostringstream out;
    std::vector<std::string> rows, cols = {"Input", "State", "Readout", "Next state"};
    std::vector<std::vector<std::string>> cells;
    for (std::size_t a = 0; a < sys.input_size(); ++a)
        for (std::size_t s = 0; s < sys.state_count(); ++s) {
            rows.push_back("");
            cells.push_back({render_point(sys.box().inputs, unflatten(sys.box().inputs, a)),
                             label_text(sys.state(s)),
                             render_point(sys.box().outputs, sys.readout_point(s)),
                             label_text(sys.state(sys.update(a, s)))});
        }
    out << table_text("", rows, cols, cells);
    return out.str();
}

std::string render_continuous(const ContinuousSystem& sys) {
    std::ostringstream out;
    for (std::size_t i = 0; i < sys.state_dim(); ++i)
        out << "dot " << sys.state_vars()[i] << " = " << sys.dynamics()[i].to_string() << "\n";
    auto coords = coord_names(sys.box().outputs);
    for (std::size_t i = 0; i < coords.size(); ++i)
        out << "out " << coords[i] << " = " << sys.readout()[i].to_string() << "\n";
    return out.str();
}

std::string render_linear(const LinearSystem& sys) {
    std::ostringstream out;
    out << "states " << sys.state_dim() << "\n";
    out << "min  " << sys.m_in().to_string() << "\n";
    out << "mid  " << sys.m_mid().to_string() << "\n";
    out << "mout " << sys.m_out().to_string() << "\n";
    return out.str();
}

struct StstOutput {
    std::string text;
    ordered_json json;
};

template <typename M>
StstOutput stst_output(const M& m, const char* via) {
    StstOutput out;
    out.text = render_matrix_text(m);
    out.json = ordered_json::parse(machine_json(m));
    out.json["via"] = via;
    out.json["instrumentation"] = {
        {"composite_states_enumerated", Instrumentation::composite_states_enumerated()},
        {"steady_scan_pairs", Instrumentation::steady_scan_pairs()}};
    return out;
}

StstOutput stst_output(const SetMatrix& m, const char* via) {
    StstOutput out;
    out.text = render_set_matrix_text(m);
    out.json = ordered_json::parse(machine_json(m));
    out.json["via"] = via;
    out.json["instrumentation"] = {
        {"composite_states_enumerated", Instrumentation::composite_states_enumerated()},
        {"steady_scan_pairs", Instrumentation::steady_scan_pairs()}};
    return out;
}

CommandResult finish(const CommandOptions& opt, const StstOutput& out) {
    return {0, opt.format == "machine" ? out.json.dump() + "\n" : out.text};
}

CommandResult cmd_stst(const Workspace& ws, const CommandOptions& opt) {
    Instrumentation::reset();
    if (!opt.target.empty()) {
        const DiscreteSystem* sys = ws.find_discrete(opt.target);
        if (!sys) usage_error("'" + opt.target + "' is not a discrete system");
        return finish(opt, stst_output(steady_state_matrix(*sys, opt.jobs), "direct"));
    }
    Instance inst = resolve_instance(ws, opt);
    if (opt.mode == "brute") {
        DiscreteSystem composite = compose_discrete(ws, inst);
        return finish(opt, stst_output(steady_state_matrix(composite, opt.jobs), "brute"));
    }
    if (opt.mode != "matrix") usage_error("unknown mode '" + opt.mode + "' (matrix|brute)");
    std::vector<Matrix<Nat64>> mats;
    for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
        const DiscreteSystem* s = ws.find_discrete(inst.inhabitants[i]);
        if (!s) usage_error("'" + inst.inhabitants[i] + "' is not a discrete system");
        check_slot_box(ws, inst, i, s->box());
        mats.push_back(steady_state_matrix(*s, opt.jobs));
    }
    if (serial_plan(opt)) {
        ChainPlan plan = plan_chain(ws, *inst.decl);
        return finish(opt, stst_output(chain_compose(plan, mats), "matrix/serial-chain"));
    }
    Matrix<Nat64> acc = mats[0];
    for (std::size_t i = 1; i < mats.size(); ++i) acc = kronecker(acc, mats[i]);
    return finish(opt,
                  stst_output(apply(inst.decl->diagram, acc), "matrix/tensor-then-wire"));
}

CommandResult cmd_stst_sets(const Workspace& ws, const CommandOptions& opt) {
    Instrumentation::reset();
    if (!opt.target.empty()) {
        const DiscreteSystem* sys = ws.find_discrete(opt.target);
        if (!sys) usage_error("'" + opt.target + "' is not a discrete system");
        return finish(opt, stst_output(steady_state_sets(*sys), "direct"));
    }
    Instance inst = resolve_instance(ws, opt);
    if (opt.mode == "brute") {
        DiscreteSystem composite = compose_discrete(ws, inst);
        return finish(opt, stst_output(steady_state_sets(composite), "brute"));
    }
    std::vector<SetMatrix> mats;
    for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
        const DiscreteSystem* s = ws.find_discrete(inst.inhabitants[i]);
        if (!s) usage_error("'" + inst.inhabitants[i] + "' is not a discrete system");
        check_slot_box(ws, inst, i, s->box());
        mats.push_back(steady_state_sets(*s));
    }
    if (serial_plan(opt)) {
        ChainPlan plan = plan_chain(ws, *inst.decl);
        return finish(opt, stst_output(chain_compose_sets(plan, mats), "matrix/serial-chain"));
    }
    SetMatrix acc = mats[0];
    for (std::size_t i = 1; i < mats.size(); ++i) acc = smat_parallel(acc, mats[i]);
    return finish(opt, stst_output(smat_apply(inst.decl->diagram, acc, UnionMode::Flat),
                                   "matrix/tensor-then-wire"));
}

CommandResult cmd_stst_measure(const Workspace& ws, const CommandOptions& opt) {
    Instrumentation::reset();
    if (!opt.target.empty()) {
        const WeightedDiscreteSystem* sys = ws.find_weighted(opt.target);
        if (!sys) usage_error("'" + opt.target + "' is not a weighted system");
        return finish(opt, stst_output(steady_state_measure(*sys), "direct"));
    }
    Instance inst = resolve_instance(ws, opt);
    std::vector<const WeightedDiscreteSystem*> systems;
    for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
        const WeightedDiscreteSystem* s = ws.find_weighted(inst.inhabitants[i]);
        if (!s) usage_error("'" + inst.inhabitants[i] + "' is not a weighted system");
        check_slot_box(ws, inst, i, s->system.box());
        systems.push_back(s);
    }
    if (opt.mode == "brute") {
        WeightedDiscreteSystem acc = *systems[0];
        for (std::size_t i = 1; i < systems.size(); ++i) acc = ws_parallel(acc, *systems[i]);
        return finish(opt, stst_output(steady_state_measure(ws_apply(inst.decl->diagram, acc)),
                                       "brute"));
    }
    std::vector<Matrix<RealPlus>> mats;
    for (const auto* s : systems) mats.push_back(steady_state_measure(*s));
    if (serial_plan(opt)) {
        ChainPlan plan = plan_chain(ws, *inst.decl);
        return finish(opt, stst_output(chain_compose(plan, mats), "matrix/serial-chain"));
    }
    Matrix<RealPlus> acc = mats[0];
    for (std::size_t i = 1; i < mats.size(); ++i) acc = kronecker(acc, mats[i]);
    return finish(opt,
                  stst_output(apply(inst.decl->diagram, acc), "matrix/tensor-then-wire"));
}

CommandResult cmd_compose(const Workspace& ws, const CommandOptions& opt) {
    Instance inst = resolve_instance(ws, opt);
    Interp kind = infer_interp(ws, inst.inhabitants[0]);
    switch (kind) {
        case Interp::Discrete:
            return {0, render_discrete(compose_discrete(ws, inst))};
        case Interp::Continuous: {
            std::vector<const ContinuousSystem*> systems;
            for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
                const ContinuousSystem* s = ws.find_continuous(inst.inhabitants[i]);
                if (!s) usage_error("'" + inst.inhabitants[i] + "' is not continuous");
                check_slot_box(ws, inst, i, s->box());
                systems.push_back(s);
            }
            ContinuousSystem acc = *systems[0];
            for (std::size_t i = 1; i < systems.size(); ++i) acc = cs_parallel(acc, *systems[i]);
            return {0, render_continuous(cs_apply(inst.decl->diagram, acc))};
        }
        case Interp::Linear: {
            std::vector<const LinearSystem*> systems;
            for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
                const LinearSystem* s = ws.find_linear(inst.inhabitants[i]);
                if (!s) usage_error("'" + inst.inhabitants[i] + "' is not linear");
                check_slot_box(ws, inst, i, s->box());
                systems.push_back(s);
            }
            LinearSystem acc = *systems[0];
            for (std::size_t i = 1; i < systems.size(); ++i) acc = ls_parallel(acc, *systems[i]);
            return {0, render_linear(ls_apply(inst.decl->diagram, acc))};
        }
        case Interp::NatMat: {
            std::vector<Matrix<Nat64>> mats;
            for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
                const Matrix<Nat64>* m = ws.find_nat_matrix(inst.inhabitants[i]);
                if (!m) usage_error("'" + inst.inhabitants[i] + "' is not a nat matrix");
                check_slot_box(ws, inst, i, Box{m->row_space(), m->col_space()});
                mats.push_back(*m);
            }
            Matrix<Nat64> result = [&] {
                if (serial_plan(opt)) return chain_compose(plan_chain(ws, *inst.decl), mats);
                Matrix<Nat64> acc = mats[0];
                for (std::size_t i = 1; i < mats.size(); ++i) acc = kronecker(acc, mats[i]);
                return apply(inst.decl->diagram, acc);
            }();
            return {0, opt.format == "machine" ? machine_json(result) + "\n"
                                               : render_matrix_text(result)};
        }
        case Interp::RealMat: {
            std::vector<Matrix<RealPlus>> mats;
            for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
                const Matrix<RealPlus>* m = ws.find_real_matrix(inst.inhabitants[i]);
                if (!m) usage_error("'" + inst.inhabitants[i] + "' is not a real matrix");
                check_slot_box(ws, inst, i, Box{m->row_space(), m->col_space()});
                mats.push_back(*m);
            }
            Matrix<RealPlus> result = [&] {
                if (serial_plan(opt)) return chain_compose(plan_chain(ws, *inst.decl), mats);
                Matrix<RealPlus> acc = mats[0];
                for (std::size_t i = 1; i < mats.size(); ++i) acc = kronecker(acc, mats[i]);
                return apply(inst.decl->diagram, acc);
            }();
            return {0, opt.format == "machine" ? machine_json(result) + "\n"
                                               : render_matrix_text(result)};
        }
        case Interp::Weighted: {
            std::vector<const WeightedDiscreteSystem*> systems;
            for (std::size_t i = 0; i < inst.inhabitants.size(); ++i) {
                const WeightedDiscreteSystem* s = ws.find_weighted(inst.inhabitants[i]);
                if (!s) usage_error("'" + inst.inhabitants[i] + "' is not weighted");
                check_slot_box(ws, inst, i, s->system.box());
                systems.push_back(s);
            }
            WeightedDiscreteSystem acc = *systems[0];
            for (std::size_t i = 1; i < systems.size(); ++i) acc = ws_parallel(acc, *systems[i]);
            return {0, render_discrete(ws_apply(inst.decl->diagram, acc).system)};
        }
    }
    usage_error("unsupported interpretation");
}

CommandResult cmd_stream(const Workspace& ws, const CommandOptions& opt) {
    const DiscreteSystem* sys = ws.find_discrete(opt.target);
    if (!sys) usage_error("'" + opt.target + "' is not a discrete system");
    if (opt.init.empty()) usage_error("stream needs init=<state>");
    InitializedDiscreteSystem init(*sys, sys->state_index(StateLabel{opt.init}));
    std::vector<Point> inputs;
    if (!opt.inputs.empty()) {
        // points separated by '/', coordinates within a point by ','
        std::vector<std::string> parts = opt.inputs.find('/') != std::string::npos
                                             ? split(opt.inputs, '/')
                                             : split(opt.inputs, ',');
        for (const auto& part : parts) {
            auto syms = split(part, ',');
            if (syms.size() != sys->box().inputs.port_count())
                usage_error("input point '" + part + "' has the wrong arity");
            std::vector<std::size_t> ix;
            for (std::size_t p = 0; p < syms.size(); ++p) {
                auto k = sys->box().inputs.port(p).type.symbol_index(syms[p]);
                if (!k) usage_error("unknown symbol '" + syms[p] + "'");
                ix.push_back(*k);
            }
            inputs.push_back(Point::finite(std::move(ix)));
        }
    }
    StreamResult r = run_stream(init, inputs);
    if (opt.format == "machine") {
        ordered_json j;
        j["kind"] = "stream";
        ordered_json states = ordered_json::array(), outputs = ordered_json::array();
        for (std::size_t s : r.states) states.push_back(label_text(sys->state(s)));
        for (std::size_t b : r.outputs)
            outputs.push_back(render_point(sys->box().outputs, unflatten(sys->box().outputs, b)));
        j["states"] = std::move(states);
        j["outputs"] = std::move(outputs);
        return {0, j.dump() + "\n"};
    }
    std::ostringstream out;
    out << "states: ";
    for (std::size_t i = 0; i < r.states.size(); ++i)
        out << (i ? ", " : "") << label_text(sys->state(r.states[i]));
    out << "\noutputs: ";
    for (std::size_t i = 0; i < r.outputs.size(); ++i)
        out << (i ? ", " : "")
            << render_point(sys->box().outputs, unflatten(sys->box().outputs, r.outputs[i]));
    out << "\n";
    return {0, out.str()};
}

CommandResult cmd_euler(const Workspace& ws, const CommandOptions& opt) {
    const ContinuousSystem* sys = ws.find_continuous(opt.target);
    if (!sys) usage_error("'" + opt.target + "' is not a continuous system");
    EulerSystem e = euler(*sys, opt.eps);
    std::vector<double> init = parse_reals(opt.init, "initial state");
    if (init.size() != sys->state_dim()) usage_error("init has the wrong dimension");
    std::vector<std::vector<double>> inputs;
    if (!opt.inputs.empty())
        for (const auto& part : split(opt.inputs, '/'))
            inputs.push_back(parse_reals(part, "input point"));
    auto traj = e.run(init, inputs);
    std::ostringstream out;
    out.precision(12);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        out << "step " << i << ": state (";
        for (std::size_t k = 0; k < traj.states[i].size(); ++k)
            out << (k ? "," : "") << traj.states[i][k];
        out << ") output (";
        for (std::size_t k = 0; k < traj.outputs[i].size(); ++k)
            out << (k ? "," : "") << traj.outputs[i][k];
        out << ")\n";
    }
    return {0, out.str()};
}

CommandResult cmd_roots(const Workspace& ws, const CommandOptions& opt) {
    const ContinuousSystem* sys = ws.find_continuous(opt.target);
    if (!sys) usage_error("'" + opt.target + "' is not a continuous system");
    std::vector<double> at = parse_reals(opt.at, "input point");
    if (at.size() != sys->input_coords().size()) usage_error("at= has the wrong dimension");
    std::ostringstream out;
    out.precision(12);
    if (opt.root_mode == "affine") {
        AffineSolution sol = solve_affine(*sys, at);
        if (!sol.consistent) {
            out << "no steady states (affine system inconsistent)\n";
            return {0, out.str()};
        }
        out << "particular: (";
        for (std::size_t i = 0; i < sol.particular.size(); ++i)
            out << (i ? "," : "") << sol.particular[i];
        out << ")\nreadout: (";
        for (std::size_t i = 0; i < sol.readout_at_particular.size(); ++i)
            out << (i ? "," : "") << sol.readout_at_particular[i];
        out << ")\nkernel dimension: " << sol.kernel_basis.size() << "\n";
        for (const auto& basis : sol.kernel_basis) {
            out << "kernel basis: (";
            for (std::size_t i = 0; i < basis.size(); ++i) out << (i ? "," : "") << basis[i];
            out << ")\n";
        }
        return {0, out.str()};
    }
    if (opt.root_mode != "newton") usage_error("root mode must be affine or newton");
    auto roots = newton_roots(*sys, at);
    out << "HEURISTIC root list (multi-start newton, possibly incomplete)\n";
    for (const auto& r : roots) {
        out << "state (";
        for (std::size_t i = 0; i < r.state.size(); ++i) out << (i ? "," : "") << r.state[i];
        out << ") readout (";
        for (std::size_t i = 0; i < r.readout.size(); ++i) out << (i ? "," : "") << r.readout[i];
        out << ") residual " << r.residual << "\n";
    }
    return {0, out.str()};
}

CommandResult cmd_linearize(const Workspace& ws, const CommandOptions& opt) {
    const ContinuousSystem* sys = ws.find_continuous(opt.target);
    if (!sys) usage_error("'" + opt.target + "' is not a continuous system");
    std::vector<double> at = parse_reals(opt.at, "input point");
    if (at.size() != sys->input_coords().size()) usage_error("at= has the wrong dimension");
    std::ostringstream out;
    out.precision(12);
    if (!opt.state.empty()) {
        std::vector<double> state = parse_reals(opt.state, "state");
        if (state.size() != sys->state_dim()) usage_error("state= has the wrong dimension");
        return {0, render_linear(linearize_at(*sys, at, state))};
    }
    RootMode mode = opt.root_mode == "newton" ? RootMode::Newton : RootMode::ExactAffine;
    auto report = stst_linearization(*sys, {at}, mode);
    for (const auto& entry : report) {
        out << "steady state (";
        for (std::size_t i = 0; i < entry.state.size(); ++i)
            out << (i ? "," : "") << entry.state[i];
        out << ") output (";
        for (std::size_t i = 0; i < entry.output.size(); ++i)
            out << (i ? "," : "") << entry.output[i];
        out << ")" << (entry.heuristic ? " [heuristic]" : "") << "\n";
        out << render_linear(entry.linearization);
        out << "stability: " << stability_name(classify_stability(entry.linearization, opt.tol))
            << "\n";
    }
    if (report.empty()) out << "no steady states found\n";
    return {0, out.str()};
}

CommandResult cmd_stability(const Workspace& ws, const CommandOptions& opt) {
    if (const LinearSystem* sys = ws.find_linear(opt.target)) {
        std::ostringstream out;
        out << stability_name(classify_stability(*sys, opt.tol)) << "\n";
        return {0, out.str()};
    }
    if (const ContinuousSystem* sys = ws.find_continuous(opt.target)) {
        std::vector<double> at = parse_reals(opt.at, "input point");
        std::vector<double> state = parse_reals(opt.state, "state");
        if (at.size() != sys->input_coords().size()) usage_error("at= has the wrong dimension");
        if (state.size() != sys->state_dim()) usage_error("state= has the wrong dimension");
        std::ostringstream out;
        out << stability_name(classify_stability(linearize_at(*sys, at, state), opt.tol)) << "\n";
        return {0, out.str()};
    }
    usage_error("'" + opt.target + "' is neither a linear nor a continuous system");
}

CommandResult cmd_check_compositional(const CommandOptions& opt) {
    auto reports = check_all_laws(opt.seed, opt.trials);
    std::ostringstream out;
    bool failed = false;
    for (const auto& r : reports) {
        out << (r.ok() ? "ok   " : "FAIL ") << r.law << " (" << r.trials << " trials)\n";
        for (const auto& f : r.failures) {
            out << "     " << f << "\n";
            failed = true;
        }
    }
    return {failed ? 1 : 0, out.str()};
}

}  // namespace

CommandResult run_command(const Workspace& ws, const std::string& verb,
                          const CommandOptions& opt) {
    try {
        if (verb == "stst") return cmd_stst(ws, opt);
        if (verb == "stst-sets") return cmd_stst_sets(ws, opt);
        if (verb == "stst-measure") return cmd_stst_measure(ws, opt);
        if (verb == "compose") return cmd_compose(ws, opt);
        if (verb == "stream") return cmd_stream(ws, opt);
        if (verb == "euler") return cmd_euler(ws, opt);
        if (verb == "roots") return cmd_roots(ws, opt);
        if (verb == "linearize") return cmd_linearize(ws, opt);
        if (verb == "stability") return cmd_stability(ws, opt);
        if (verb == "check-compositional") return cmd_check_compositional(opt);
        return {1, "error: unknown command '" + verb + "'\n"};
    } catch (const Error& e) {
        int code = e.kind() == ErrorKind::Internal ? 2 : 1;
        return {code, std::string("error: ") + e.what() + "\n"};
    } catch (const std::exception& e) {
        return {2, std::string("internal error: ") + e.what() + "\n"};
    }
}

CommandResult run_embedded(const Workspace& ws, const std::vector<std::string>& argv) {
    if (argv.empty()) return {1, "error: empty command\n"};
    CommandOptions opt;
    for (std::size_t i = 1; i < argv.size(); ++i) {
        const std::string& a = argv[i];
        auto eq = a.find('=');
        if (eq == std::string::npos) {
            if (!opt.target.empty()) return {1, "error: two targets in command\n"};
            opt.target = a;
            continue;
        }
        std::string key = a.substr(0, eq), value = a.substr(eq + 1);
        try {
            if (key == "target") opt.target = value;
            else if (key == "wiring") opt.wiring = value;
            else if (key == "with") {
                for (const auto& pair : split(value, ',')) {
                    auto e2 = pair.find('=');
                    if (e2 == std::string::npos) return {1, "error: with= needs slot=name\n"};
                    opt.with.emplace_back(pair.substr(0, e2), pair.substr(e2 + 1));
                }
            } else if (key == "plan") opt.plan = value;
            else if (key == "mode") opt.mode = value;
            else if (key == "format") opt.format = value;
            else if (key == "init") opt.init = value;
            else if (key == "inputs") opt.inputs = value;
            else if (key == "at") opt.at = value;
            else if (key == "state") opt.state = value;
            else if (key == "output") opt.output = value;
            else if (key == "rootmode") opt.root_mode = value;
            else if (key == "eps") opt.eps = std::stod(value);
            else if (key == "tol") opt.tol = std::stod(value);
            else if (key == "seed") opt.seed = std::stoull(value);
            else if (key == "trials") opt.trials = std::stoull(value);
            else if (key == "jobs") opt.jobs = std::stoi(value);
            else return {1, "error: unknown option '" + key + "'\n"};
        } catch (const std::exception&) {
            return {1, "error: malformed value for '" + key + "'\n"};
        }
    }
    return run_command(ws, argv[0], opt);
}

CommandResult run_all_embedded(const Workspace& ws) {
    CommandResult all;
    for (const auto& argv : ws.commands) {
        std::string line = "$";
        for (const auto& a : argv) line += " " + a;
        all.output += line + "\n";
        CommandResult r = run_embedded(ws, argv);
        all.output += r.output;
        if (r.exit_code != 0) {
            all.exit_code = r.exit_code;
            return all;
        }
    }
    return all;
}

}  // namespace wirecalc
