// Storage of qubit ensembles.
//
// Each ensemble is a large supply of identically prepared qubits, fully
// described by one single-qubit density matrix. Two-qubit gates pair
// qubits drawn from two ensembles; the simulator forms the product state,
// conjugates, and keeps the two output marginals as new ensembles. The
// joint correlations are deliberately dropped: downstream steps draw fresh
// qubit pairs, and the consume-on-use discipline below makes it impossible
// to feed correlated partners back into one gate. Any circuit that needs
// an operand twice must clone it (ensemble splitting).
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcm/density_matrix.hpp"

namespace qcm {

// Opaque ensemble handle; unique within a store and never reused.
struct EnsembleId {
    std::uint64_t value = 0;
    friend auto operator<=>(const EnsembleId&, const EnsembleId&) = default;
};

namespace event_label {
inline constexpr std::string_view alloc = "alloc0";
inline constexpr std::string_view prepare = "prepare";
inline constexpr std::string_view clone = "clone";
inline constexpr std::string_view renorm = "renorm";
}  // namespace event_label

struct GateEvent {
    std::int64_t step = 0;
    std::string gate;
    std::vector<std::uint64_t> inputs;
    std::vector<std::uint64_t> outputs;
    // False for simulation-only steps (renormalization); true for
    // everything a device would actually execute.
    bool physical = true;

    nlohmann::json to_json() const {
        return {{"step", step},       {"gate", gate},         {"in", inputs},
                {"out", outputs},     {"physical", physical}};
    }
};

struct EventFilter {
    std::optional<std::string> label;
    std::optional<bool> physical;
};

class EnsembleStore {
public:
    // New ensemble in the all-zero state |0><0|.
    EnsembleId fresh_zero() {
        EnsembleId id = insert(DensityMatrix::classical_state({0}));
        log(event_label::alloc, {}, {id.value}, true);
        return id;
    }

    // New ensemble whose one-probability is p, prepared by rotating a
    // fresh |0> by theta = 2 asin(sqrt(p)). The result is a pure state;
    // its off-diagonal magnitude is sqrt(p(1-p)).
    EnsembleId prepare(double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("preparation probability out of [0,1]");
        const double theta = 2.0 * std::asin(std::sqrt(p));
        const DensityMatrix zero = DensityMatrix::classical_state({0});
        EnsembleId id = insert(conjugate(zero, gate_rotation(theta), {0}));
        log(event_label::prepare, {}, {id.value}, true);
        return id;
    }

    // Splits off a part of the ensemble: a new handle with an identical
    // per-qubit state. The original stays usable.
    EnsembleId clone(EnsembleId a) {
        const Cell& cell = cell_for_read(a);
        EnsembleId id = insert(cell.state);
        log(event_label::clone, {a.value}, {id.value}, true);
        return id;
    }

    EnsembleId apply1(const UnitaryGate& gate, EnsembleId a) {
        if (gate.arity() != 1) throw InvalidArgument("apply1 requires a one-qubit gate");
        Cell& cell = cell_for_use(a);
        DensityMatrix out = conjugate(cell.state, gate, {0});
        cell.consumed = true;
        EnsembleId id = insert(std::move(out));
        log(gate.label(), {a.value}, {id.value}, true);
        return id;
    }

    EnsembleId apply1(const ClassicalPermutationGate& gate, EnsembleId a) {
        return apply1(gate.unitary(), a);
    }

    // Pairs qubits from a and b, conjugates the product state by the
    // gate, and stores the two output marginals. Both operands are
    // consumed; the outputs are fresh independent ensembles.
    std::pair<EnsembleId, EnsembleId> apply2(const UnitaryGate& gate, EnsembleId a,
                                             EnsembleId b) {
        if (gate.arity() != 2) throw InvalidArgument("apply2 requires a two-qubit gate");
        if (a == b) throw SameOperand("two-qubit step needs distinct ensembles; clone first");
        Cell& ca = cell_for_use(a);
        Cell& cb = cell_for_use(b);
        const DensityMatrix joint = conjugate(tensor(ca.state, cb.state), gate, {0, 1});
        DensityMatrix ma = partial_trace(joint, {0});
        DensityMatrix mb = partial_trace(joint, {1});
        ca.consumed = true;
        cb.consumed = true;
        EnsembleId oa = insert(std::move(ma));
        EnsembleId ob = insert(std::move(mb));
        log(gate.label(), {a.value, b.value}, {oa.value, ob.value}, true);
        return {oa, ob};
    }

    std::pair<EnsembleId, EnsembleId> apply2(const ClassicalPermutationGate& gate, EnsembleId a,
                                             EnsembleId b) {
        return apply2(gate.unitary(), a, b);
    }

    // CNOT against a fresh |0> target: the output carries the diagonal of
    // the input state (same one-probability, no coherences).
    EnsembleId diagonalize(EnsembleId a) {
        EnsembleId target = fresh_zero();
        auto [out, ancilla] = apply2(gate_cnot(), a, target);
        (void)ancilla;
        return out;
    }

    // One-probability of the ensemble's qubit state. Reading does not
    // consume, but consumed ensembles are no longer readable.
    double r1(EnsembleId a) const { return cell_for_read(a).state.diagonal(1); }

    const DensityMatrix& state(EnsembleId a) const { return cell_for_read(a).state; }

    bool contains(EnsembleId a) const { return cells_.contains(a.value); }
    bool consumed(EnsembleId a) const {
        auto it = cells_.find(a.value);
        if (it == cells_.end()) throw UnknownEnsemble("unknown ensemble id");
        return it->second.consumed;
    }
    std::size_t size() const { return cells_.size(); }

    // --- event trace ----------------------------------------------------

    const std::vector<GateEvent>& events() const { return trace_; }

    // Number of unitary gate applications (excludes allocations,
    // preparations, clones and renormalizations).
    std::int64_t gate_count() const {
        std::int64_t n = 0;
        for (const GateEvent& e : trace_)
            if (is_gate_application(e)) ++n;
        return n;
    }

    std::int64_t count_events(const EventFilter& filter = {}) const {
        std::int64_t n = 0;
        for (const GateEvent& e : trace_) {
            if (filter.label && e.gate != *filter.label) continue;
            if (filter.physical && e.physical != *filter.physical) continue;
            ++n;
        }
        return n;
    }

    static bool is_gate_application(const GateEvent& e) {
        return e.physical && e.gate != event_label::alloc && e.gate != event_label::prepare &&
               e.gate != event_label::clone && e.gate != event_label::renorm;
    }

    // One JSON object per line, in step order.
    void write_trace(std::ostream& os) const {
        for (const GateEvent& e : trace_) os << e.to_json().dump() << '\n';
    }

    // --- hooks for composite simulation-level steps ----------------------

    // Inserts a state without logging; callers pair this with
    // record_event to describe the composite step they implement.
    EnsembleId adopt(DensityMatrix state) {
        if (state.n_qubits() != 1) throw InvalidArgument("ensemble states are single-qubit");
        return insert(std::move(state));
    }

    void consume(EnsembleId a) { cell_for_use(a).consumed = true; }

    void record_event(std::string label, std::vector<std::uint64_t> in,
                      std::vector<std::uint64_t> out, bool physical) {
        log(label, std::move(in), std::move(out), physical);
    }

    // --- operation counters ----------------------------------------------

    // Simulation bookkeeping at the level of named compound operations;
    // not part of the event trace.
    void note_op(const std::string& name) { ++op_counts_[name]; }
    std::int64_t op_count(const std::string& name) const {
        auto it = op_counts_.find(name);
        return it == op_counts_.end() ? 0 : it->second;
    }

private:
    struct Cell {
        DensityMatrix state;
        bool consumed = false;
    };

    EnsembleId insert(DensityMatrix state) {
        const EnsembleId id{next_id_++};
        cells_.emplace(id.value, Cell{std::move(state), false});
        return id;
    }

    const Cell& cell_for_read(EnsembleId a) const {
        auto it = cells_.find(a.value);
        if (it == cells_.end()) throw UnknownEnsemble("unknown ensemble id");
        if (it->second.consumed) throw ConsumedEnsemble("ensemble was already consumed");
        return it->second;
    }

    Cell& cell_for_use(EnsembleId a) {
        auto it = cells_.find(a.value);
        if (it == cells_.end()) throw UnknownEnsemble("unknown ensemble id");
        if (it->second.consumed) throw ConsumedEnsemble("ensemble was already consumed");
        return it->second;
    }

    void log(std::string_view label, std::vector<std::uint64_t> in, std::vector<std::uint64_t> out,
             bool physical) {
        trace_.push_back(GateEvent{static_cast<std::int64_t>(trace_.size()) + 1,
                                   std::string(label), std::move(in), std::move(out), physical});
    }

    std::map<std::uint64_t, Cell> cells_;
    std::vector<GateEvent> trace_;
    std::map<std::string, std::int64_t, std::less<>> op_counts_;
    std::uint64_t next_id_ = 1;
};

}  // namespace qcm
