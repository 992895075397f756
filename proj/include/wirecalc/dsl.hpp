#pragma once

#include <string>
#include <vector>

#include "wirecalc/continuous.hpp"
#include "wirecalc/discrete.hpp"
#include "wirecalc/linear.hpp"
#include "wirecalc/semimat.hpp"
#include "wirecalc/setmat.hpp"
#include "wirecalc/wiring.hpp"

namespace wirecalc {

struct Diagnostic {
    std::string file;
    std::size_t line = 0;
    std::size_t col = 0;
    std::string message;

    std::string to_string() const;
};

/// Carries every diagnostic collected in one parse/validation run.
class DiagnosticsError : public Error {
public:
    explicit DiagnosticsError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    static std::string summary(const std::vector<Diagnostic>& diagnostics);
    std::vector<Diagnostic> diagnostics_;
};

/// A wiring declaration: named slots bound to box shapes, wires between
/// slot ports and the outer box, and the normalized single-inner-box form
/// obtained by summing the slots.
struct WiringDecl {
    struct Wire {
        std::string dst_owner, dst_port;  // inner input or outer output
        std::string src_owner, src_port;  // outer input or inner output
    };

    std::string name;
    std::vector<std::pair<std::string, std::string>> slots;  // (slot name, box name)
    std::string outer_box;
    std::vector<Wire> wires;

    WiringDiagram diagram = WiringDiagram::identity(Box{});  // normalized form
    std::vector<std::size_t> slot_input_offset;  // inner port offsets per slot
    std::vector<std::size_t> slot_output_offset;

    std::size_t slot_index(const std::string& slot) const;
};

struct Workspace {
    std::vector<std::pair<std::string, PortType>> type_aliases;
    std::vector<std::pair<std::string, Box>> boxes;
    std::vector<WiringDecl> wirings;
    std::vector<std::pair<std::string, DiscreteSystem>> discrete_systems;
    std::vector<std::pair<std::string, WeightedDiscreteSystem>> weighted_systems;
    std::vector<std::pair<std::string, ContinuousSystem>> continuous_systems;
    std::vector<std::pair<std::string, LinearSystem>> linear_systems;
    std::vector<std::pair<std::string, Matrix<Nat64>>> nat_matrices;
    std::vector<std::pair<std::string, Matrix<RealPlus>>> real_matrices;
    std::vector<std::vector<std::string>> commands;  // tokenized `do` statements

    const Box* find_box(const std::string& name) const;
    const WiringDecl* find_wiring(const std::string& name) const;
    const DiscreteSystem* find_discrete(const std::string& name) const;
    const WeightedDiscreteSystem* find_weighted(const std::string& name) const;
    const ContinuousSystem* find_continuous(const std::string& name) const;
    const LinearSystem* find_linear(const std::string& name) const;
    const Matrix<Nat64>* find_nat_matrix(const std::string& name) const;
    const Matrix<RealPlus>* find_real_matrix(const std::string& name) const;
};

/// Parses the workspace DSL. Collects as many diagnostics as possible and
/// throws DiagnosticsError if any were produced.
Workspace parse_workspace(std::string_view text, const std::string& filename = "<workspace>");

/// Canonical text form; parse(print(ws)) is structurally equal to ws.
std::string print_workspace(const Workspace& ws);

/// A serial-chain factorization of a wiring declaration: slot order, the
/// feedback pairs to trace at the end, and the permutations aligning the
/// remaining ports with the outer box.
struct ChainPlan {
    bool applicable = false;
    std::string reason;
    std::vector<std::size_t> order;  // slot indices, chain order
    // (first-slot input port, last-slot output port) pairs fed back
    std::vector<std::pair<std::size_t, std::size_t>> feedback;
    // for each outer input port in order: the first-slot input port it feeds
    std::vector<std::size_t> outer_input_to_first;
    // for each outer output port in order: the last-slot output port it reads
    std::vector<std::size_t> outer_output_to_last;
};

ChainPlan plan_chain(const Workspace& ws, const WiringDecl& decl);

/// Composes per-slot matrices along a chain plan: serial products, then the
/// feedback partial trace, then port reordering to the outer box layout.
template <SemiringElement R>
Matrix<R> chain_compose(const ChainPlan& plan, const std::vector<Matrix<R>>& slot_matrices) {
    if (!plan.applicable)
        throw Error(ErrorKind::ShapeMismatch, "serial-chain plan not applicable: " + plan.reason);
    Matrix<R> acc = slot_matrices[plan.order[0]];
    for (std::size_t i = 1; i < plan.order.size(); ++i)
        acc = multiply(acc, slot_matrices[plan.order[i]]);
    if (!plan.feedback.empty()) {
        TraceSelection sel;
        for (const auto& [rp, cp] : plan.feedback) {
            sel.row_ports.push_back(rp);
            sel.col_ports.push_back(cp);
        }
        acc = partial_trace(acc, sel);
    }
    // the trace dropped ports; recompute positions of the kept ones
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
    return permute_spaces(acc, row_perm, col_perm);
}

/// Set-matrix version of chain_compose.
SetMatrix chain_compose_sets(const ChainPlan& plan, const std::vector<SetMatrix>& slot_matrices,
                             UnionMode mode = UnionMode::Flat);

}  // namespace wirecalc
