#include "wirecalc/discrete.hpp"

#include <thread>

namespace wirecalc {

namespace {
std::atomic<std::uint64_t> g_composite_states{0};
std::atomic<std::uint64_t> g_scan_pairs{0};
}  // namespace

void Instrumentation::reset() {
    g_composite_states = 0;
    g_scan_pairs = 0;
}
std::uint64_t Instrumentation::composite_states_enumerated() { return g_composite_states; }
std::uint64_t Instrumentation::steady_scan_pairs() { return g_scan_pairs; }
void Instrumentation::count_composite_states(std::uint64_t n) { g_composite_states += n; }
void Instrumentation::count_scan_pairs(std::uint64_t n) { g_scan_pairs += n; }

std::string label_text(const StateLabel& label) {
    std::string out;
    for (const auto& atom : label) out += atom;
    return out;
}

DiscreteSystem::DiscreteSystem(Box box, std::vector<StateLabel> states,
                               std::vector<std::size_t> readout,
                               std::vector<std::size_t> update)
    : box_(std::move(box)),
      states_(std::move(states)),
      readout_(std::move(readout)),
      update_(std::move(update)) {
    if (!box_.all_finite())
        throw Error(ErrorKind::WrongInterpretation, "discrete system needs an all-finite box");
    input_size_ = box_.inputs.enumeration_size();
    output_size_ = box_.outputs.enumeration_size();
    if (readout_.size() != states_.size())
        throw Error(ErrorKind::InvalidArgument, "readout table must cover every state");
    if (update_.size() != input_size_ * states_.size())
        throw Error(ErrorKind::InvalidArgument, "update table must cover every (input, state)");
    for (std::size_t b : readout_)
        if (b >= output_size_)
            throw Error(ErrorKind::IndexOutOfRange, "readout value out of range");
    for (std::size_t s : update_)
        if (s >= states_.size())
            throw Error(ErrorKind::IndexOutOfRange, "update target state out of range");
}

const StateLabel& DiscreteSystem::state(std::size_t s) const {
    if (s >= states_.size()) throw Error(ErrorKind::IndexOutOfRange, "state index out of range");
    return states_[s];
}

std::size_t DiscreteSystem::state_index(const StateLabel& label) const {
    for (std::size_t s = 0; s < states_.size(); ++s)
        if (states_[s] == label) return s;
    throw Error(ErrorKind::InvalidArgument, "unknown state label '" + label_text(label) + "'");
}

std::size_t DiscreteSystem::readout(std::size_t state) const {
    if (state >= states_.size())
        throw Error(ErrorKind::IndexOutOfRange, "state index out of range");
    return readout_[state];
}

std::size_t DiscreteSystem::update(std::size_t input_flat, std::size_t state) const {
    if (input_flat >= input_size_ || state >= states_.size())
        throw Error(ErrorKind::IndexOutOfRange, "update index out of range");
    return update_[input_flat * states_.size() + state];
}

Point DiscreteSystem::readout_point(std::size_t state) const {
    return unflatten(box_.outputs, readout(state));
}

InitializedDiscreteSystem::InitializedDiscreteSystem(DiscreteSystem sys, std::size_t initial_state)
    : system(std::move(sys)), initial(initial_state) {
    if (initial >= system.state_count())
        throw Error(ErrorKind::IndexOutOfRange, "initial state out of range");
}

WeightedDiscreteSystem::WeightedDiscreteSystem(DiscreteSystem sys,
                                               std::vector<RealPlus> state_weights)
    : system(std::move(sys)), weights(std::move(state_weights)) {
    if (weights.size() != system.state_count())
        throw Error(ErrorKind::InvalidArgument, "weights must cover every state");
}

DiscreteSystem ds_parallel(const DiscreteSystem& f1, const DiscreteSystem& f2) {
    Box box = box_sum(f1.box(), f2.box());
    std::size_t n1 = f1.state_count(), n2 = f2.state_count();
    Instrumentation::count_composite_states(static_cast<std::uint64_t>(n1) * n2);

    std::vector<StateLabel> states;
    states.reserve(n1 * n2);
    for (std::size_t s1 = 0; s1 < n1; ++s1)
        for (std::size_t s2 = 0; s2 < n2; ++s2) {
            StateLabel l = f1.state(s1);
            const StateLabel& r = f2.state(s2);
            l.insert(l.end(), r.begin(), r.end());
            states.push_back(std::move(l));
        }

    std::vector<std::size_t> readout(n1 * n2);
    for (std::size_t s1 = 0; s1 < n1; ++s1)
        for (std::size_t s2 = 0; s2 < n2; ++s2)
            readout[s1 * n2 + s2] = f1.readout(s1) * f2.output_size() + f2.readout(s2);

    std::size_t a1 = f1.input_size(), a2 = f2.input_size();
    std::vector<std::size_t> update(a1 * a2 * n1 * n2);
    for (std::size_t i1 = 0; i1 < a1; ++i1)
        for (std::size_t i2 = 0; i2 < a2; ++i2)
            for (std::size_t s1 = 0; s1 < n1; ++s1)
                for (std::size_t s2 = 0; s2 < n2; ++s2) {
                    std::size_t in = i1 * a2 + i2;
                    update[in * (n1 * n2) + s1 * n2 + s2] =
                        f1.update(i1, s1) * n2 + f2.update(i2, s2);
                }
    return DiscreteSystem(std::move(box), std::move(states), std::move(readout),
                          std::move(update));
}

WeightedDiscreteSystem ws_parallel(const WeightedDiscreteSystem& f1,
                                   const WeightedDiscreteSystem& f2) {
    DiscreteSystem sys = ds_parallel(f1.system, f2.system);
    std::vector<RealPlus> weights;
    weights.reserve(f1.weights.size() * f2.weights.size());
    for (const auto& w1 : f1.weights)
        for (const auto& w2 : f2.weights) weights.push_back(w1 * w2);
    return WeightedDiscreteSystem(std::move(sys), std::move(weights));
}

DiscreteSystem ds_apply(const WiringDiagram& w, const DiscreteSystem& f) {
    if (!f.box().types_equal(w.inner()))
        throw Error(ErrorKind::BoxMismatch, "system does not inhabit the inner box");
    if (!w.outer().all_finite())
        throw Error(ErrorKind::WrongInterpretation, "outer box must be all-finite");
    std::size_t n = f.state_count();
    std::size_t yin = w.outer().inputs.enumeration_size();

    std::vector<std::size_t> readout(n);
    std::vector<std::size_t> readout_inner(n);
    for (std::size_t s = 0; s < n; ++s) {
        Point b = f.readout_point(s);
        readout_inner[s] = f.readout(s);
        readout[s] = flat_index(w.outer().outputs, w.out_eval(b));
    }

    std::vector<std::size_t> update(yin * n);
    for (std::size_t i = 0; i < yin; ++i) {
        Point y = unflatten(w.outer().inputs, i);
        for (std::size_t s = 0; s < n; ++s) {
            Point x = unflatten(f.box().outputs, readout_inner[s]);
            std::size_t a = flat_index(f.box().inputs, w.in_eval(y, x));
            update[i * n + s] = f.update(a, s);
        }
    }
    return DiscreteSystem(w.outer(), f.states(), std::move(readout), std::move(update));
}

WeightedDiscreteSystem ws_apply(const WiringDiagram& w, const WeightedDiscreteSystem& f) {
    return WeightedDiscreteSystem(ds_apply(w, f.system), f.weights);
}

bool ds_equal(const DiscreteSystem& a, const DiscreteSystem& b) {
    if (!a.box().types_equal(b.box())) return false;
    if (a.states() != b.states()) return false;
    for (std::size_t s = 0; s < a.state_count(); ++s)
        if (a.readout(s) != b.readout(s)) return false;
    for (std::size_t i = 0; i < a.input_size(); ++i)
        for (std::size_t s = 0; s < a.state_count(); ++s)
            if (a.update(i, s) != b.update(i, s)) return false;
    return true;
}

StreamResult run_stream(const InitializedDiscreteSystem& f, const std::vector<Point>& inputs) {
    StreamResult out;
    out.states.reserve(inputs.size() + 1);
    out.outputs.reserve(inputs.size() + 1);
    std::size_t s = f.initial;
    out.states.push_back(s);
    out.outputs.push_back(f.system.readout(s));
    for (const auto& a : inputs) {
        s = f.system.update(flat_index(f.system.box().inputs, a), s);
        out.states.push_back(s);
        out.outputs.push_back(f.system.readout(s));
    }
    return out;
}

Matrix<Nat64> steady_state_matrix(const DiscreteSystem& f, int jobs) {
    std::size_t a_size = f.input_size();
    std::size_t n = f.state_count();
    Instrumentation::count_scan_pairs(static_cast<std::uint64_t>(a_size) * n);
    Matrix<Nat64> out(f.box().inputs, f.box().outputs);

    auto scan_range = [&](std::size_t a_begin, std::size_t a_end, Matrix<Nat64>& local) {
        for (std::size_t a = a_begin; a < a_end; ++a)
            for (std::size_t s = 0; s < n; ++s)
                if (f.update(a, s) == s) local.add_to(a, f.readout(s), Nat64(1));
    };

    if (jobs <= 1 || a_size < 2) {
        scan_range(0, a_size, out);
        return out;
    }
    std::size_t workers = std::min<std::size_t>(jobs, a_size);
    std::vector<Matrix<Nat64>> partial(workers, out);
    std::vector<std::thread> threads;
    std::size_t chunk = (a_size + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t)
        threads.emplace_back([&, t] {
            scan_range(t * chunk, std::min(a_size, (t + 1) * chunk), partial[t]);
        });
    for (auto& th : threads) th.join();
    for (const auto& p : partial)
        for (const auto& [ij, v] : p.entries()) out.add_to(ij.first, ij.second, v);
    return out;
}

Matrix<RealPlus> steady_state_measure(const WeightedDiscreteSystem& f) {
    std::size_t a_size = f.system.input_size();
    std::size_t n = f.system.state_count();
    Instrumentation::count_scan_pairs(static_cast<std::uint64_t>(a_size) * n);
    Matrix<RealPlus> out(f.system.box().inputs, f.system.box().outputs);
    for (std::size_t a = 0; a < a_size; ++a)
        for (std::size_t s = 0; s < n; ++s)
            if (f.system.update(a, s) == s) out.add_to(a, f.system.readout(s), f.weights[s]);
    return out;
}

}  // namespace wirecalc
