#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbmc {

// Circuit literals: node index shifted left once, low bit = negation.
// Node 0 is constant false, so literal 0 is false and literal 1 is true.
using AigLit = uint32_t;

inline constexpr AigLit kAigFalse = 0;
inline constexpr AigLit kAigTrue = 1;

inline uint32_t aig_node(AigLit l) { return l >> 1; }
inline bool aig_neg(AigLit l) { return l & 1u; }
inline AigLit aig_lit(uint32_t node, bool neg = false) { return (node << 1) | (neg ? 1u : 0u); }
inline AigLit aig_not(AigLit l) { return l ^ 1u; }

struct Gate {
    AigLit left, right;
};

using StateVector = std::vector<bool>;  // one bit per latch, declaration order
using InputVector = std::vector<bool>;  // one bit per primary input

enum class AigerErrorKind {
    BadHeader,
    BadLiteral,
    UndefinedVariable,
    DuplicateVariable,
    CyclicGate,
    BadOutputCount,
    NoLatches,
    NonZeroReset,
    OutputDependsOnInput,
    BadToken,
};

class AigerError : public std::runtime_error {
public:
    AigerError(AigerErrorKind kind, int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          kind_(kind),
          line_(line) {}
    AigerErrorKind kind() const { return kind_; }
    int line() const { return line_; }

private:
    AigerErrorKind kind_;
    int line_;
};

// A finite-state transition system over AND-inverter circuits.
//
// Node numbering: 0 is the constant, 1..m the primary inputs, m+1..m+n the
// latches, then the gates in topological order. The initial predicate is
// the all-zero latch assignment, synthesized as a conjunction chain whose
// gates sit at the end of the table; latch_next and bad never reference it.
class TransitionSystem {
public:
    // `gates` must be topologically ordered (operands reference the
    // constant, inputs, latches or earlier gates only). Throws
    // std::invalid_argument when a reference is out of place.
    TransitionSystem(unsigned num_inputs, unsigned num_latches,
                     std::vector<AigLit> latch_next, std::vector<Gate> gates, AigLit bad);

    unsigned num_inputs() const { return num_inputs_; }
    unsigned num_latches() const { return num_latches_; }
    unsigned num_gates() const { return static_cast<unsigned>(gates_.size()); }
    unsigned num_file_gates() const { return num_file_gates_; }
    unsigned node_count() const { return 1 + num_inputs_ + num_latches_ + num_gates(); }

    uint32_t input_node(unsigned i) const { return 1 + i; }
    uint32_t latch_node(unsigned j) const { return 1 + num_inputs_ + j; }
    uint32_t gate_node(unsigned g) const { return 1 + num_inputs_ + num_latches_ + g; }
    bool is_input_node(uint32_t n) const { return n >= 1 && n <= num_inputs_; }
    bool is_latch_node(uint32_t n) const {
        return n > num_inputs_ && n <= num_inputs_ + num_latches_;
    }
    bool is_gate_node(uint32_t n) const { return n > num_inputs_ + num_latches_; }

    AigLit latch_next(unsigned j) const { return latch_next_[j]; }
    const std::vector<AigLit>& latch_next() const { return latch_next_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const Gate& gate(unsigned g) const { return gates_[g]; }
    AigLit init_lit() const { return init_lit_; }
    AigLit bad_lit() const { return bad_lit_; }

    bool cone_has_input(AigLit l) const { return input_cone_[aig_node(l)]; }

    // Values of every node under the given latch/input assignment.
    std::vector<bool> evaluate_nodes(const StateVector& state, const InputVector& inputs) const;
    bool eval_lit(const std::vector<bool>& node_values, AigLit l) const {
        return node_values[aig_node(l)] != aig_neg(l);
    }

    // The unique successor state; pure in (state, inputs).
    StateVector step(const StateVector& state, const InputVector& inputs) const;
    bool eval_init(const StateVector& state) const;
    bool eval_bad(const StateVector& state) const;

private:
    unsigned num_inputs_;
    unsigned num_latches_;
    std::vector<AigLit> latch_next_;
    std::vector<Gate> gates_;
    unsigned num_file_gates_;  // gates before the synthesized init chain
    AigLit init_lit_;
    AigLit bad_lit_;
    std::vector<bool> input_cone_;  // per node: does an input feed it?
};

// Parses ASCII AIGER ("aag"). Exactly one output (the bad predicate),
// at least one latch, all-zero resets. Throws AigerError.
TransitionSystem parse_aiger(std::string_view text);

// Serializes back to "aag" (without the synthesized init chain).
std::string write_aag(const TransitionSystem& sys);

struct Trace {
    std::vector<StateVector> states;  // k+1 entries
    std::vector<InputVector> inputs;  // k entries

    int bound() const { return static_cast<int>(states.size()) - 1; }
};

// Empty on success, otherwise the first violated trace invariant.
std::optional<std::string> check_trace(const TransitionSystem& sys, const Trace& trace);

}  // namespace qbmc
