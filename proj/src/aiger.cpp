#include "qbmc/aiger.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <map>
#include <queue>
#include <sstream>

namespace qbmc {

TransitionSystem::TransitionSystem(unsigned num_inputs, unsigned num_latches,
                                   std::vector<AigLit> latch_next, std::vector<Gate> gates,
                                   AigLit bad)
    : num_inputs_(num_inputs),
      num_latches_(num_latches),
      latch_next_(std::move(latch_next)),
      gates_(std::move(gates)),
      num_file_gates_(static_cast<unsigned>(gates_.size())),
      bad_lit_(bad) {
    if (num_latches_ == 0) throw std::invalid_argument("transition system needs latches");
    if (latch_next_.size() != num_latches_)
        throw std::invalid_argument("latch_next size mismatch");

    auto check_ref = [&](AigLit l, uint32_t limit) {
        if (aig_node(l) >= limit) throw std::invalid_argument("literal references later node");
    };
    for (unsigned g = 0; g < gates_.size(); ++g) {
        check_ref(gates_[g].left, gate_node(g));
        check_ref(gates_[g].right, gate_node(g));
    }
    for (AigLit l : latch_next_) check_ref(l, node_count());
    check_ref(bad_lit_, node_count());

    // Initial predicate: all latches zero, as a conjunction chain.
    if (num_latches_ == 1) {
        init_lit_ = aig_not(aig_lit(latch_node(0)));
    } else {
        AigLit acc = aig_not(aig_lit(latch_node(0)));
        for (unsigned j = 1; j < num_latches_; ++j) {
            gates_.push_back(Gate{acc, aig_not(aig_lit(latch_node(j)))});
            acc = aig_lit(gate_node(static_cast<unsigned>(gates_.size()) - 1));
        }
        init_lit_ = acc;
    }

    input_cone_.assign(node_count(), false);
    for (unsigned i = 0; i < num_inputs_; ++i) input_cone_[input_node(i)] = true;
    for (unsigned g = 0; g < gates_.size(); ++g)
        input_cone_[gate_node(g)] =
            input_cone_[aig_node(gates_[g].left)] || input_cone_[aig_node(gates_[g].right)];

    if (cone_has_input(bad_lit_))
        throw std::invalid_argument("bad predicate depends on a primary input");
}

std::vector<bool> TransitionSystem::evaluate_nodes(const StateVector& state,
                                                   const InputVector& inputs) const {
    assert(state.size() == num_latches_);
    assert(inputs.size() == num_inputs_);
    std::vector<bool> val(node_count());
    val[0] = false;
    for (unsigned i = 0; i < num_inputs_; ++i) val[input_node(i)] = inputs[i];
    for (unsigned j = 0; j < num_latches_; ++j) val[latch_node(j)] = state[j];
    for (unsigned g = 0; g < gates_.size(); ++g) {
        const Gate& gt = gates_[g];
        val[gate_node(g)] = eval_lit(val, gt.left) && eval_lit(val, gt.right);
    }
    return val;
}

StateVector TransitionSystem::step(const StateVector& state, const InputVector& inputs) const {
    std::vector<bool> val = evaluate_nodes(state, inputs);
    StateVector next(num_latches_);
    for (unsigned j = 0; j < num_latches_; ++j) next[j] = eval_lit(val, latch_next_[j]);
    return next;
}

bool TransitionSystem::eval_init(const StateVector& state) const {
    std::vector<bool> val = evaluate_nodes(state, InputVector(num_inputs_, false));
    return eval_lit(val, init_lit_);
}

bool TransitionSystem::eval_bad(const StateVector& state) const {
    std::vector<bool> val = evaluate_nodes(state, InputVector(num_inputs_, false));
    return eval_lit(val, bad_lit_);
}

namespace {

struct Line {
    int number;
    std::string_view text;
};

// Splits into LF-terminated lines; rejects tabs and CR outright.
std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 1;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            if (i > start || i < text.size())
                lines.push_back({number, text.substr(start, i - start)});
            start = i + 1;
            ++number;
        }
    }
    return lines;
}

std::vector<std::string_view> split_words(const Line& line) {
    std::vector<std::string_view> words;
    std::string_view t = line.text;
    size_t start = 0;
    for (size_t i = 0; i <= t.size(); ++i) {
        if (i == t.size() || t[i] == ' ') {
            if (i > start) words.push_back(t.substr(start, i - start));
            start = i + 1;
        }
    }
    return words;
}

uint64_t parse_number(const Line& line, std::string_view tok) {
    if (tok.empty() || tok.size() > 12)
        throw AigerError(AigerErrorKind::BadToken, line.number, "bad number '" + std::string(tok) + "'");
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw AigerError(AigerErrorKind::BadToken, line.number, "bad number '" + std::string(tok) + "'");
    return v;
}

enum class DefKind : uint8_t { Undefined, Input, Latch, Gate };

}  // namespace

TransitionSystem parse_aiger(std::string_view text) {
    for (char c : text)
        if (c == '\t' || c == '\r')
            throw AigerError(AigerErrorKind::BadToken, 1, "tab or CR character in input");

    std::vector<Line> lines = split_lines(text);
    if (lines.empty()) throw AigerError(AigerErrorKind::BadHeader, 1, "empty input");

    auto header = split_words(lines[0]);
    if (header.size() != 6 || header[0] != "aag")
        throw AigerError(AigerErrorKind::BadHeader, lines[0].number,
                         "expected header 'aag M I L O A'");
    uint64_t max_var = parse_number(lines[0], header[1]);
    uint64_t n_in = parse_number(lines[0], header[2]);
    uint64_t n_latch = parse_number(lines[0], header[3]);
    uint64_t n_out = parse_number(lines[0], header[4]);
    uint64_t n_and = parse_number(lines[0], header[5]);
    if (max_var > (1u << 28))
        throw AigerError(AigerErrorKind::BadHeader, lines[0].number, "M too large");
    if (n_in + n_latch + n_and > max_var)
        throw AigerError(AigerErrorKind::BadHeader, lines[0].number,
                         "M smaller than I + L + A");
    if (n_latch == 0)
        throw AigerError(AigerErrorKind::NoLatches, lines[0].number, "L = 0: no state variables");
    if (n_out != 1)
        throw AigerError(AigerErrorKind::BadOutputCount, lines[0].number,
                         "O = " + std::to_string(n_out) + ": exactly one output expected");

    size_t want = 1 + n_in + n_latch + n_out + n_and;
    if (lines.size() < want)
        throw AigerError(AigerErrorKind::BadHeader,
                         lines.empty() ? 1 : lines.back().number, "truncated file");

    const uint64_t max_lit = 2 * max_var + 1;
    auto parse_lit = [&](const Line& line, std::string_view tok) -> AigLit {
        uint64_t v = parse_number(line, tok);
        if (v > max_lit)
            throw AigerError(AigerErrorKind::BadLiteral, line.number,
                             "literal " + std::to_string(v) + " out of range (> 2M+1)");
        return static_cast<AigLit>(v);
    };

    std::vector<DefKind> def(max_var + 1, DefKind::Undefined);
    std::vector<uint32_t> def_index(max_var + 1, 0);
    auto define = [&](const Line& line, AigLit lit, DefKind kind, uint32_t idx) {
        if (aig_neg(lit))
            throw AigerError(AigerErrorKind::BadLiteral, line.number,
                             "definition literal must be even");
        uint32_t v = aig_node(lit);
        if (v == 0)
            throw AigerError(AigerErrorKind::BadLiteral, line.number, "cannot define constant");
        if (def[v] != DefKind::Undefined)
            throw AigerError(AigerErrorKind::DuplicateVariable, line.number,
                             "variable " + std::to_string(v) + " defined twice");
        def[v] = kind;
        def_index[v] = idx;
    };

    size_t li = 1;
    std::vector<uint32_t> input_var(n_in);
    for (uint64_t i = 0; i < n_in; ++i, ++li) {
        auto w = split_words(lines[li]);
        if (w.size() != 1)
            throw AigerError(AigerErrorKind::BadToken, lines[li].number, "input line needs one literal");
        AigLit l = parse_lit(lines[li], w[0]);
        define(lines[li], l, DefKind::Input, static_cast<uint32_t>(i));
        input_var[i] = aig_node(l);
    }

    std::vector<uint32_t> latch_var(n_latch);
    std::vector<AigLit> latch_next_file(n_latch);
    for (uint64_t j = 0; j < n_latch; ++j, ++li) {
        auto w = split_words(lines[li]);
        if (w.size() != 2 && w.size() != 3)
            throw AigerError(AigerErrorKind::BadToken, lines[li].number,
                             "latch line needs 'current next [reset]'");
        AigLit cur = parse_lit(lines[li], w[0]);
        AigLit nxt = parse_lit(lines[li], w[1]);
        if (w.size() == 3 && parse_number(lines[li], w[2]) != 0)
            throw AigerError(AigerErrorKind::NonZeroReset, lines[li].number,
                             "non-zero latch reset unsupported");
        define(lines[li], cur, DefKind::Latch, static_cast<uint32_t>(j));
        latch_var[j] = aig_node(cur);
        latch_next_file[j] = nxt;
    }

    auto out_words = split_words(lines[li]);
    if (out_words.size() != 1)
        throw AigerError(AigerErrorKind::BadToken, lines[li].number, "output line needs one literal");
    AigLit bad_file = parse_lit(lines[li], out_words[0]);
    int output_line = lines[li].number;
    ++li;

    struct FileGate {
        AigLit lhs, rhs0, rhs1;
        int line;
    };
    std::vector<FileGate> file_gates(n_and);
    for (uint64_t g = 0; g < n_and; ++g, ++li) {
        auto w = split_words(lines[li]);
        if (w.size() != 3)
            throw AigerError(AigerErrorKind::BadToken, lines[li].number,
                             "and line needs 'lhs rhs0 rhs1'");
        FileGate fg{parse_lit(lines[li], w[0]), parse_lit(lines[li], w[1]),
                    parse_lit(lines[li], w[2]), lines[li].number};
        define(lines[li], fg.lhs, DefKind::Gate, static_cast<uint32_t>(g));
        file_gates[g] = fg;
    }

    // Optional symbol table and comment section.
    for (; li < lines.size(); ++li) {
        std::string_view t = lines[li].text;
        if (t == "c") break;  // the rest is free-form comment
        if (t.empty()) continue;
        if (t[0] == 'i' || t[0] == 'l' || t[0] == 'o') {
            auto w = split_words(lines[li]);
            if (w.size() >= 2) continue;
        }
        throw AigerError(AigerErrorKind::BadToken, lines[li].number,
                         "unexpected content after and section");
    }

    auto check_defined = [&](AigLit l, int line) {
        uint32_t v = aig_node(l);
        if (v != 0 && def[v] == DefKind::Undefined)
            throw AigerError(AigerErrorKind::UndefinedVariable, line,
                             "variable " + std::to_string(v) + " is never defined");
    };
    for (uint64_t g = 0; g < n_and; ++g) {
        check_defined(file_gates[g].rhs0, file_gates[g].line);
        check_defined(file_gates[g].rhs1, file_gates[g].line);
    }
    for (uint64_t j = 0; j < n_latch; ++j) check_defined(latch_next_file[j], lines[1 + n_in + j].number);
    check_defined(bad_file, output_line);

    // Topological order over gate-to-gate dependencies; ready gates are
    // taken lowest-variable-first so renumbering is deterministic.
    std::vector<int> pending(n_and, 0);
    std::vector<std::vector<uint32_t>> dependents(n_and);
    for (uint64_t g = 0; g < n_and; ++g) {
        for (AigLit op : {file_gates[g].rhs0, file_gates[g].rhs1}) {
            uint32_t v = aig_node(op);
            if (v != 0 && def[v] == DefKind::Gate) {
                dependents[def_index[v]].push_back(static_cast<uint32_t>(g));
                ++pending[g];
            }
        }
    }
    std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
    for (uint64_t g = 0; g < n_and; ++g)
        if (pending[g] == 0) ready.push(static_cast<uint32_t>(g));
    std::vector<uint32_t> topo;  // file gate indices in dependency order
    topo.reserve(n_and);
    while (!ready.empty()) {
        uint32_t g = ready.top();
        ready.pop();
        topo.push_back(g);
        for (uint32_t d : dependents[g])
            if (--pending[d] == 0) ready.push(d);
    }
    if (topo.size() != n_and) {
        for (uint64_t g = 0; g < n_and; ++g)
            if (pending[g] > 0)
                throw AigerError(AigerErrorKind::CyclicGate, file_gates[g].line,
                                 "gate participates in a cycle");
    }

    // Renumber into the internal node space.
    const unsigned m = static_cast<unsigned>(n_in);
    const unsigned n = static_cast<unsigned>(n_latch);
    std::vector<uint32_t> node_of(max_var + 1, 0);
    for (uint64_t i = 0; i < n_in; ++i) node_of[input_var[i]] = 1 + static_cast<uint32_t>(i);
    for (uint64_t j = 0; j < n_latch; ++j) node_of[latch_var[j]] = 1 + m + static_cast<uint32_t>(j);
    for (uint64_t t = 0; t < topo.size(); ++t)
        node_of[aig_node(file_gates[topo[t]].lhs)] = 1 + m + n + static_cast<uint32_t>(t);

    auto remap = [&](AigLit l) {
        uint32_t v = aig_node(l);
        return v == 0 ? l : aig_lit(node_of[v], aig_neg(l));
    };

    std::vector<Gate> gates;
    gates.reserve(n_and);
    for (uint32_t g : topo)
        gates.push_back(Gate{remap(file_gates[g].rhs0), remap(file_gates[g].rhs1)});
    std::vector<AigLit> latch_next(n);
    for (unsigned j = 0; j < n; ++j) latch_next[j] = remap(latch_next_file[j]);
    AigLit bad = remap(bad_file);

    try {
        return TransitionSystem(m, n, std::move(latch_next), std::move(gates), bad);
    } catch (const std::invalid_argument& e) {
        // Only the input-cone restriction can fail after the checks above.
        throw AigerError(AigerErrorKind::OutputDependsOnInput, output_line, e.what());
    }
}

std::string write_aag(const TransitionSystem& sys) {
    const unsigned m = sys.num_inputs();
    const unsigned n = sys.num_latches();
    const unsigned a = sys.num_file_gates();

    // File variables: inputs 1..m, latches m+1..m+n, gates following;
    // identical to the internal node numbering.
    auto file_lit = [](AigLit l) { return 2 * aig_node(l) + (aig_neg(l) ? 1 : 0); };

    std::ostringstream out;
    out << "aag " << (m + n + a) << ' ' << m << ' ' << n << " 1 " << a << '\n';
    for (unsigned i = 0; i < m; ++i) out << 2 * sys.input_node(i) << '\n';
    for (unsigned j = 0; j < n; ++j)
        out << 2 * sys.latch_node(j) << ' ' << file_lit(sys.latch_next(j)) << '\n';
    out << file_lit(sys.bad_lit()) << '\n';
    for (unsigned g = 0; g < a; ++g)
        out << 2 * sys.gate_node(g) << ' ' << file_lit(sys.gate(g).left) << ' '
            << file_lit(sys.gate(g).right) << '\n';
    return out.str();
}

std::optional<std::string> check_trace(const TransitionSystem& sys, const Trace& trace) {
    if (trace.states.empty()) return "trace has no states";
    if (trace.inputs.size() + 1 != trace.states.size())
        return "trace needs exactly one input vector per step";
    for (const auto& s : trace.states)
        if (s.size() != sys.num_latches()) return "state width mismatch";
    for (const auto& x : trace.inputs)
        if (x.size() != sys.num_inputs()) return "input width mismatch";
    if (!sys.eval_init(trace.states.front())) return "first state violates the initial predicate";
    if (!sys.eval_bad(trace.states.back())) return "last state violates the bad predicate";
    for (size_t i = 0; i + 1 < trace.states.size(); ++i)
        if (sys.step(trace.states[i], trace.inputs[i]) != trace.states[i + 1])
            return "step " + std::to_string(i) + " does not replay";
    return std::nullopt;
}

}  // namespace qbmc
