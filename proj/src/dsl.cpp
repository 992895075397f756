#include "wirecalc/dsl.hpp"

#include <cctype>
#include <sstream>

namespace wirecalc {

std::string Diagnostic::to_string() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message;
}

DiagnosticsError::DiagnosticsError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorKind::ParseError, summary(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::string DiagnosticsError::summary(const std::vector<Diagnostic>& diagnostics) {
    std::string out = std::to_string(diagnostics.size()) + " diagnostic(s)";
    for (const auto& d : diagnostics) out += "\n  " + d.to_string();
    return out;
}

std::size_t WiringDecl::slot_index(const std::string& slot) const {
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (slots[i].first == slot) return i;
    throw Error(ErrorKind::InvalidArgument, "unknown slot '" + slot + "'");
}

namespace {

template <typename T>
const T* find_named(const std::vector<std::pair<std::string, T>>& items,
                    const std::string& name) {
    for (const auto& [n, v] : items)
        if (n == name) return &v;
    return nullptr;
}

}  // namespace

const Box* Workspace::find_box(const std::string& n) const { return find_named(boxes, n); }
const WiringDecl* Workspace::find_wiring(const std::string& n) const {
    for (const auto& w : wirings)
        if (w.name == n) return &w;
    return nullptr;
}
const DiscreteSystem* Workspace::find_discrete(const std::string& n) const {
    return find_named(discrete_systems, n);
}
const WeightedDiscreteSystem* Workspace::find_weighted(const std::string& n) const {
    return find_named(weighted_systems, n);
}
const ContinuousSystem* Workspace::find_continuous(const std::string& n) const {
    return find_named(continuous_systems, n);
}
const LinearSystem* Workspace::find_linear(const std::string& n) const {
    return find_named(linear_systems, n);
}
const Matrix<Nat64>* Workspace::find_nat_matrix(const std::string& n) const {
    return find_named(nat_matrices, n);
}
const Matrix<RealPlus>* Workspace::find_real_matrix(const std::string& n) const {
    return find_named(real_matrices, n);
}

namespace {

struct Token {
    std::string text;
    std::size_t line, col;
    std::size_t offset;
    bool is_word;
};

class Lexer {
public:
    Lexer(std::string_view text, const std::string& file, std::vector<Diagnostic>& diags)
        : text_(text), file_(file), diags_(diags) {
        tokenize();
    }

    const std::vector<Token>& tokens() const { return tokens_; }

private:
    void tokenize() {
        std::size_t line = 1, col = 1;
        std::size_t i = 0;
        auto advance = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k) {
                if (text_[i + k] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            i += n;
        };
        while (i < text_.size()) {
            char c = text_[i];
            if (c == '#') {
                while (i < text_.size() && text_[i] != '\n') advance(1);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
                continue;
            }
            Token t{"", line, col, i, false};
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = i;
                while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) ||
                                            text_[i] == '_')) {
                    ++col;
                    ++i;
                }
                t.text = std::string(text_.substr(start, i - start));
                t.is_word = true;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = i;
                while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) ||
                                            text_[i] == '.')) {
                    // allow exponent signs inside numerals like 1e-3
                    if ((text_[i] == 'e' || text_[i] == 'E') && i + 1 < text_.size() &&
                        (text_[i + 1] == '+' || text_[i + 1] == '-')) {
                        col += 2;
                        i += 2;
                        continue;
                    }
                    ++col;
                    ++i;
                }
                t.text = std::string(text_.substr(start, i - start));
                t.is_word = true;
            } else if (c == '<' && i + 1 < text_.size() && text_[i + 1] == '-') {
                t.text = "<-";
                advance(2);
            } else if (c == '-' && i + 1 < text_.size() && text_[i + 1] == '>') {
                t.text = "->";
                advance(2);
            } else {
                t.text = std::string(1, c);
                advance(1);
            }
            tokens_.push_back(std::move(t));
        }
    }

    std::string_view text_;
    std::string file_;
    std::vector<Diagnostic>& diags_;
    std::vector<Token> tokens_;
};

class WorkspaceParser {
public:
    WorkspaceParser(std::string_view text, std::string file)
        : text_(text), file_(std::move(file)), lexer_(text, file_, diags_) {}

    Workspace parse() {
        const auto& toks = lexer_.tokens();
        while (pos_ < toks.size()) {
            std::size_t start = pos_;
            try {
                parse_statement();
            } catch (const Diagnostic& d) {
                diags_.push_back(d);
                recover_to_statement_end(start);
            } catch (const Error& e) {
                std::size_t line = start < toks.size() ? toks[start].line : 1;
                std::size_t col = start < toks.size() ? toks[start].col : 1;
                diags_.push_back({file_, line, col, e.what()});
                recover_to_statement_end(start);
            }
        }
        if (!diags_.empty()) throw DiagnosticsError(std::move(diags_));
        return std::move(ws_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        const auto& toks = lexer_.tokens();
        if (pos_ < toks.size())
            throw Diagnostic{file_, toks[pos_].line, toks[pos_].col, msg};
        std::size_t line = 1;
        for (char c : text_)
            if (c == '\n') ++line;
        throw Diagnostic{file_, line, 1, msg + " (at end of input)"};
    }

    void recover_to_statement_end(std::size_t start) {
        const auto& toks = lexer_.tokens();
        if (pos_ <= start) pos_ = start + 1;
        int depth = 0;
        while (pos_ < toks.size()) {
            const std::string& t = toks[pos_].text;
            if (t == "{") ++depth;
            if (t == "}") {
                ++pos_;
                if (--depth <= 0) return;
                continue;
            }
            if (t == ";" && depth == 0) {
                ++pos_;
                return;
            }
            ++pos_;
        }
    }

    bool at(const std::string& s) const {
        const auto& toks = lexer_.tokens();
        return pos_ < toks.size() && toks[pos_].text == s;
    }

    bool eat(const std::string& s) {
        if (at(s)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(const std::string& s) {
        if (!eat(s)) fail("expected '" + s + "'");
    }

    const Token& current() const {
        const auto& toks = lexer_.tokens();
        if (pos_ >= toks.size()) fail("unexpected end of input");
        return toks[pos_];
    }

    std::string word(const std::string& what) {
        const Token& t = current();
        if (!t.is_word) fail("expected " + what);
        ++pos_;
        return t.text;
    }

    double number(const std::string& what) {
        bool negative = eat("-");
        const Token& t = current();
        if (t.text == "inf") fail(what + " cannot be infinite here");
        if (!t.is_word) fail("expected " + what);
        try {
            double v = std::stod(t.text);
            ++pos_;
            return negative ? -v : v;
        } catch (const std::exception&) {
            fail("malformed number '" + t.text + "'");
        }
    }

    void parse_statement() {
        const Token& t = current();
        if (t.text == "type") return parse_type_alias();
        if (t.text == "box") return parse_box();
        if (t.text == "wiring") return parse_wiring();
        if (t.text == "discrete") return parse_discrete(false);
        if (t.text == "weighted") return parse_discrete(true);
        if (t.text == "continuous") return parse_continuous();
        if (t.text == "linear") return parse_linear();
        if (t.text == "matrix") return parse_matrix();
        if (t.text == "do") return parse_do();
        fail("unknown declaration '" + t.text + "'");
    }

    void check_fresh(const std::string& kind, const std::string& name, bool taken) {
        if (taken) fail("duplicate " + kind + " name '" + name + "'");
    }

    PortType parse_port_type() {
        if (eat("{")) {
            std::vector<std::string> symbols;
            if (!at("}")) {
                symbols.push_back(word("alphabet symbol"));
                while (eat(",")) symbols.push_back(word("alphabet symbol"));
            }
            expect("}");
            return PortType::finite(std::move(symbols));
        }
        const Token& t = current();
        if (t.text == "R") {
            ++pos_;
            double d = number("dimension");
            if (d < 0 || d != static_cast<std::size_t>(d)) fail("dimension must be a natural");
            return PortType::euclid(static_cast<std::size_t>(d));
        }
        std::string name = word("type name");
        if (const PortType* alias = find_named(ws_.type_aliases, name)) return *alias;
        fail("unknown type alias '" + name + "'");
    }

    void parse_type_alias() {
        expect("type");
        std::string name = word("type alias name");
        check_fresh("type", name, find_named(ws_.type_aliases, name) != nullptr);
        expect("=");
        PortType type = parse_port_type();
        expect(";");
        ws_.type_aliases.emplace_back(std::move(name), std::move(type));
    }

    void parse_box() {
        expect("box");
        std::string name = word("box name");
        check_fresh("box", name, ws_.find_box(name) != nullptr);
        expect("{");
        std::vector<Port> inputs, outputs;
        while (!eat("}")) {
            bool is_in = at("in");
            if (!is_in && !at("out")) fail("expected 'in' or 'out' port declaration");
            ++pos_;
            std::string pname = word("port name");
            expect(":");
            PortType type = parse_port_type();
            expect(";");
            (is_in ? inputs : outputs).push_back({std::move(pname), std::move(type)});
        }
        try {
            ws_.boxes.emplace_back(name,
                                   Box{TypedFiniteSet(std::move(inputs)),
                                       TypedFiniteSet(std::move(outputs))});
        } catch (const Error& e) {
            fail(std::string("invalid box '") + name + "': " + e.what());
        }
    }

    void parse_wiring() {
        expect("wiring");
        WiringDecl decl;
        decl.name = word("wiring name");
        check_fresh("wiring", decl.name, ws_.find_wiring(decl.name) != nullptr);
        expect(":");
        while (!at("->")) {
            std::string slot = word("slot name");
            std::string box = slot;
            if (eat("=")) box = word("box name");
            decl.slots.emplace_back(std::move(slot), std::move(box));
            eat(",");
        }
        expect("->");
        decl.outer_box = word("outer box name");
        expect("{");
        while (!eat("}")) {
            WiringDecl::Wire wire;
            wire.dst_owner = word("port owner");
            expect(".");
            wire.dst_port = word("port name");
            expect("<-");
            wire.src_owner = word("port owner");
            expect(".");
            wire.src_port = word("port name");
            expect(";");
            decl.wires.push_back(std::move(wire));
        }
        normalize_wiring(decl);
    }

    void normalize_wiring(WiringDecl& decl) {
        if (decl.slots.empty()) fail("wiring needs at least one slot");
        const Box* outer = ws_.find_box(decl.outer_box);
        if (!outer) fail("unknown outer box '" + decl.outer_box + "'");
        for (std::size_t i = 0; i < decl.slots.size(); ++i) {
            const auto& [slot, box] = decl.slots[i];
            if (slot == decl.outer_box) fail("slot '" + slot + "' shadows the outer box");
            if (!ws_.find_box(box)) fail("unknown box '" + box + "' for slot '" + slot + "'");
            for (std::size_t j = 0; j < i; ++j)
                if (decl.slots[j].first == slot) fail("duplicate slot name '" + slot + "'");
        }
        // inner box: the sum of the slot boxes, ports renamed slot.port
        std::vector<Port> in_ports, out_ports;
        for (const auto& [slot, box] : decl.slots) {
            const Box* b = ws_.find_box(box);
            decl.slot_input_offset.push_back(in_ports.size());
            decl.slot_output_offset.push_back(out_ports.size());
            for (const auto& p : b->inputs.ports())
                in_ports.push_back({slot + "." + p.name, p.type});
            for (const auto& p : b->outputs.ports())
                out_ports.push_back({slot + "." + p.name, p.type});
        }
        Box inner{TypedFiniteSet(std::move(in_ports)), TypedFiniteSet(std::move(out_ports))};

        auto inner_input = [&](const std::string& owner,
                               const std::string& port) -> std::optional<std::size_t> {
            return inner.inputs.port_index(owner + "." + port);
        };
        auto inner_output = [&](const std::string& owner,
                                const std::string& port) -> std::optional<std::size_t> {
            return inner.outputs.port_index(owner + "." + port);
        };

        std::vector<std::optional<WireSource>> phi_in(inner.inputs.port_count());
        std::vector<std::optional<std::size_t>> phi_out(outer->outputs.port_count());
        for (const auto& wire : decl.wires) {
            // resolve source first: outer input or some slot output
            std::optional<WireSource> src;
            if (wire.src_owner == decl.outer_box) {
                auto q = outer->inputs.port_index(wire.src_port);
                if (!q) fail("unknown outer input '" + wire.src_port + "'");
                src = WireSource::outer_input(*q);
            } else if (auto q = inner_output(wire.src_owner, wire.src_port)) {
                src = WireSource::inner_output(*q);
            } else {
                fail("wire source '" + wire.src_owner + "." + wire.src_port + "' not found");
            }
            if (wire.dst_owner == decl.outer_box) {
                auto q = outer->outputs.port_index(wire.dst_port);
                if (!q) fail("unknown outer output '" + wire.dst_port + "'");
                if (src->kind != WireSource::Kind::InnerOutput)
                    fail("outer output '" + wire.dst_port +
                         "' must be fed by an inner output, not an outer input");
                if (phi_out[*q]) fail("outer output '" + wire.dst_port + "' fed twice");
                phi_out[*q] = src->port;
            } else if (auto p = inner_input(wire.dst_owner, wire.dst_port)) {
                if (phi_in[*p])
                    fail("inner input '" + wire.dst_owner + "." + wire.dst_port + "' fed twice");
                phi_in[*p] = *src;
            } else {
                fail("wire target '" + wire.dst_owner + "." + wire.dst_port + "' not found");
            }
        }
        std::vector<WireSource> phi_in_final;
        for (std::size_t p = 0; p < phi_in.size(); ++p) {
            if (!phi_in[p])
                fail("inner input '" + inner.inputs.port(p).name + "' is never fed");
            phi_in_final.push_back(*phi_in[p]);
        }
        std::vector<std::size_t> phi_out_final;
        for (std::size_t q = 0; q < phi_out.size(); ++q) {
            if (!phi_out[q])
                fail("outer output '" + outer->outputs.port(q).name + "' is never fed");
            phi_out_final.push_back(*phi_out[q]);
        }
        WiringDiagram diagram = WiringDiagram::unchecked(std::move(inner), *outer,
                                                         std::move(phi_in_final),
                                                         std::move(phi_out_final));
        auto violations = validate(diagram);
        if (!violations.empty()) fail("wiring '" + decl.name + "': " + violations.front());
        decl.diagram = std::move(diagram);
        ws_.wirings.push_back(std::move(decl));
    }

    std::vector<std::string> symbol_list() {
        std::vector<std::string> out;
        out.push_back(word("symbol"));
        while (eat(",")) out.push_back(word("symbol"));
        return out;
    }

    std::size_t resolve_point(const TypedFiniteSet& space, const std::vector<std::string>& syms,
                              const std::string& what) {
        if (syms.size() != space.port_count())
            fail(what + " needs " + std::to_string(space.port_count()) + " symbol(s)");
        std::vector<std::size_t> ix(syms.size());
        for (std::size_t i = 0; i < syms.size(); ++i) {
            auto k = space.port(i).type.symbol_index(syms[i]);
            if (!k)
                fail("symbol '" + syms[i] + "' not in the alphabet of port '" +
                     space.port(i).name + "'");
            ix[i] = *k;
        }
        return flat_index(space, Point::finite(std::move(ix)));
    }

    void parse_discrete(bool weighted) {
        ++pos_;  // discrete | weighted
        std::string name = word("system name");
        check_fresh("system", name,
                    ws_.find_discrete(name) != nullptr || ws_.find_weighted(name) != nullptr);
        expect("on");
        std::string box_name = word("box name");
        const Box* box = ws_.find_box(box_name);
        if (!box) fail("unknown box '" + box_name + "'");
        if (!box->all_finite()) fail("discrete systems need an all-finite box");
        expect("{");

        std::vector<StateLabel> states;
        std::vector<std::string> state_names;
        std::map<std::string, std::pair<double, bool>> weight_map;  // value, is_inf
        std::size_t in_size = box->inputs.enumeration_size();
        std::vector<std::optional<std::size_t>> readout;
        std::vector<std::optional<std::size_t>> update;

        auto state_index = [&](const std::string& s) -> std::size_t {
            for (std::size_t i = 0; i < state_names.size(); ++i)
                if (state_names[i] == s) return i;
            fail("unknown state '" + s + "'");
        };

        while (!eat("}")) {
            if (eat("states")) {
                while (!eat(";")) {
                    std::string s = word("state name");
                    for (const auto& existing : state_names)
                        if (existing == s) fail("duplicate state '" + s + "'");
                    state_names.push_back(s);
                    states.push_back({s});
                }
                readout.assign(states.size(), std::nullopt);
                update.assign(in_size * states.size(), std::nullopt);
            } else if (eat("table")) {
                if (states.empty()) fail("declare states before table rows");
                auto in_syms = symbol_list();
                std::string st = word("state name");
                expect("->");
                auto out_syms = symbol_list();
                std::string next = word("state name");
                expect(";");
                std::size_t a = resolve_point(box->inputs, in_syms, "table input");
                std::size_t s = state_index(st);
                std::size_t b = resolve_point(box->outputs, out_syms, "table readout");
                std::size_t n = state_index(next);
                if (readout[s] && *readout[s] != b)
                    fail("state '" + st + "' has two different readouts");
                readout[s] = b;
                if (update[a * states.size() + s])
                    fail("duplicate table row for this (input, state)");
                update[a * states.size() + s] = n;
            } else if (weighted && eat("weight")) {
                std::string st = word("state name");
                if (weight_map.count(st)) fail("duplicate weight for state '" + st + "'");
                if (eat("inf")) {
                    weight_map[st] = {0.0, true};
                } else {
                    weight_map[st] = {number("weight"), false};
                }
                expect(";");
            } else {
                fail("expected 'states', 'table'" + std::string(weighted ? ", 'weight'" : "") +
                     " or '}'");
            }
        }
        if (states.empty()) fail("system '" + name + "' declares no states");
        std::vector<std::size_t> readout_final, update_final;
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (!readout[s]) fail("state '" + state_names[s] + "' has no readout");
            readout_final.push_back(*readout[s]);
        }
        for (std::size_t a = 0; a < in_size; ++a)
            for (std::size_t s = 0; s < states.size(); ++s) {
                if (!update[a * states.size() + s])
                    fail("missing table row for state '" + state_names[s] + "' at input index " +
                         std::to_string(a));
                update_final.push_back(*update[a * states.size() + s]);
            }
        DiscreteSystem sys(*box, std::move(states), std::move(readout_final),
                           std::move(update_final));
        if (!weighted) {
            ws_.discrete_systems.emplace_back(std::move(name), std::move(sys));
            return;
        }
        std::vector<RealPlus> w;
        for (const auto& s : state_names) {
            auto it = weight_map.find(s);
            if (it == weight_map.end()) fail("state '" + s + "' has no weight");
            w.push_back(it->second.second ? RealPlus::infinity() : RealPlus(it->second.first));
        }
        ws_.weighted_systems.emplace_back(std::move(name),
                                          WeightedDiscreteSystem(std::move(sys), std::move(w)));
    }

    Expr parse_embedded_expr() {
        const auto& toks = lexer_.tokens();
        std::size_t start_off = current().offset;
        std::size_t end_off = start_off;
        while (pos_ < toks.size() && !at(";")) {
            end_off = toks[pos_].offset + toks[pos_].text.size();
            ++pos_;
        }
        std::string raw(text_.substr(start_off, end_off - start_off));
        try {
            return parse_expr(raw);
        } catch (const Error& e) {
            fail(std::string("bad expression: ") + e.what());
        }
    }

    void parse_continuous() {
        expect("continuous");
        std::string name = word("system name");
        check_fresh("system", name, ws_.find_continuous(name) != nullptr);
        expect("on");
        std::string box_name = word("box name");
        const Box* box = ws_.find_box(box_name);
        if (!box) fail("unknown box '" + box_name + "'");
        if (!box->all_euclid()) fail("continuous systems need an all-euclid box");
        expect("{");
        std::vector<std::string> state_vars;
        std::map<std::string, Expr> dots;
        std::map<std::string, Expr> outs;
        while (!eat("}")) {
            if (eat("state")) {
                while (!eat(";")) state_vars.push_back(word("state variable"));
            } else if (eat("dot")) {
                std::string v = word("state variable");
                expect("=");
                Expr e = parse_embedded_expr();
                expect(";");
                if (!dots.emplace(v, e).second) fail("duplicate dynamics for '" + v + "'");
            } else if (eat("out")) {
                std::string coord = word("output coordinate");
                expect("=");
                Expr e = parse_embedded_expr();
                expect(";");
                if (!outs.emplace(coord, e).second) fail("duplicate readout for '" + coord + "'");
            } else {
                fail("expected 'state', 'dot', 'out' or '}'");
            }
        }
        std::vector<Expr> dynamics;
        for (const auto& v : state_vars) {
            auto it = dots.find(v);
            if (it == dots.end()) fail("state '" + v + "' has no dynamics");
            dynamics.push_back(it->second);
            dots.erase(it);
        }
        if (!dots.empty()) fail("dynamics for undeclared state '" + dots.begin()->first + "'");
        std::vector<Expr> readout;
        for (const auto& coord : coord_names(box->outputs)) {
            auto it = outs.find(coord);
            if (it == outs.end()) fail("output coordinate '" + coord + "' has no readout");
            readout.push_back(it->second);
            outs.erase(it);
        }
        if (!outs.empty()) fail("readout for unknown coordinate '" + outs.begin()->first + "'");
        try {
            ws_.continuous_systems.emplace_back(
                name, ContinuousSystem(*box, std::move(state_vars), std::move(dynamics),
                                       std::move(readout)));
        } catch (const Error& e) {
            fail(std::string("invalid continuous system: ") + e.what());
        }
    }

    Dense parse_dense_matrix() {
        expect("[");
        std::vector<std::vector<double>> rows(1);
        while (!eat("]")) {
            if (eat(";")) {
                rows.emplace_back();
                continue;
            }
            rows.back().push_back(number("matrix entry"));
        }
        if (rows.size() == 1 && rows.front().empty()) rows.clear();
        try {
            return Dense::from_rows(rows);
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    void parse_linear() {
        expect("linear");
        std::string name = word("system name");
        check_fresh("system", name, ws_.find_linear(name) != nullptr);
        expect("on");
        std::string box_name = word("box name");
        const Box* box = ws_.find_box(box_name);
        if (!box) fail("unknown box '" + box_name + "'");
        expect("{");
        std::optional<std::size_t> state_dim;
        std::optional<Dense> m_in, m_mid, m_out;
        while (!eat("}")) {
            if (eat("states")) {
                state_dim = static_cast<std::size_t>(number("state dimension"));
                expect(";");
            } else if (eat("min")) {
                m_in = parse_dense_matrix();
                expect(";");
            } else if (eat("mid")) {
                m_mid = parse_dense_matrix();
                expect(";");
            } else if (eat("mout")) {
                m_out = parse_dense_matrix();
                expect(";");
            } else {
                fail("expected 'states', 'min', 'mid', 'mout' or '}'");
            }
        }
        if (!state_dim || !m_in || !m_mid || !m_out)
            fail("linear system needs states, min, mid and mout");
        try {
            ws_.linear_systems.emplace_back(
                name, LinearSystem(*box, *state_dim, std::move(*m_in), std::move(*m_mid),
                                   std::move(*m_out)));
        } catch (const Error& e) {
            fail(std::string("invalid linear system: ") + e.what());
        }
    }

    void parse_matrix() {
        expect("matrix");
        std::string name = word("matrix name");
        check_fresh("matrix", name,
                    ws_.find_nat_matrix(name) != nullptr || ws_.find_real_matrix(name) != nullptr);
        expect("on");
        std::string box_name = word("box name");
        const Box* box = ws_.find_box(box_name);
        if (!box) fail("unknown box '" + box_name + "'");
        bool real = false;
        if (eat("real"))
            real = true;
        else
            expect("nat");
        expect("{");
        std::vector<std::vector<std::pair<double, bool>>> rows;  // (value, is_inf)
        while (!eat("}")) {
            expect("row");
            rows.emplace_back();
            while (!eat(";")) {
                if (eat("inf"))
                    rows.back().push_back({0.0, true});
                else
                    rows.back().push_back({number("matrix entry"), false});
            }
        }
        try {
            if (real) {
                Matrix<RealPlus> m(box->inputs, box->outputs);
                fill_matrix(m, rows, [](double v, bool inf) {
                    return inf ? RealPlus::infinity() : RealPlus(v);
                });
                ws_.real_matrices.emplace_back(std::move(name), std::move(m));
            } else {
                Matrix<Nat64> m(box->inputs, box->outputs);
                fill_matrix(m, rows, [](double v, bool inf) {
                    if (inf) return Nat64::infinity();
                    if (v < 0 || v != static_cast<std::uint64_t>(v))
                        throw Error(ErrorKind::InvalidArgument,
                                    "nat matrix entries must be naturals");
                    return Nat64(static_cast<std::uint64_t>(v));
                });
                ws_.nat_matrices.emplace_back(std::move(name), std::move(m));
            }
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    template <typename M, typename Make>
    void fill_matrix(M& m, const std::vector<std::vector<std::pair<double, bool>>>& rows,
                     Make make) {
        if (rows.size() != m.rows())
            throw Error(ErrorKind::ShapeMismatch,
                        "matrix needs " + std::to_string(m.rows()) + " rows");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols())
                throw Error(ErrorKind::ShapeMismatch,
                            "row " + std::to_string(i) + " needs " + std::to_string(m.cols()) +
                                " entries");
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                m.set(i, j, make(rows[i][j].first, rows[i][j].second));
        }
    }

    void parse_do() {
        expect("do");
        std::vector<std::string> argv;
        std::size_t prev_end = 0;
        while (!eat(";")) {
            if (at("{") || at("}")) fail("unexpected brace in command");
            const Token& t = current();
            // source-adjacent tokens form one argument (target=name, T,T,F)
            if (!argv.empty() && t.offset == prev_end)
                argv.back() += t.text;
            else
                argv.push_back(t.text);
            prev_end = t.offset + t.text.size();
            ++pos_;
        }
        if (argv.empty()) fail("empty command");
        ws_.commands.push_back(std::move(argv));
    }

    std::string_view text_;
    std::string file_;
    std::vector<Diagnostic> diags_;
    Lexer lexer_;
    std::size_t pos_ = 0;
    Workspace ws_;
};

}  // namespace

Workspace parse_workspace(std::string_view text, const std::string& filename) {
    return WorkspaceParser(text, filename).parse();
}

}  // namespace wirecalc
