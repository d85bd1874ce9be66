#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbmc/aiger.hpp"
#include "qbmc/bmc.hpp"

namespace qbmc {

enum class Engine { Unroll, Qbf, Square, Jsat, Oracle };
enum class Semantics { Exact, UpTo };

std::optional<Engine> engine_from_name(std::string_view name);
const char* engine_name(Engine e);

struct RunSpec {
    std::string model_path;
    Engine engine = Engine::Unroll;
    int bound = 0;
    Semantics semantics = Semantics::Exact;
    Limits limits;
    std::string emit_dimacs;
    std::string emit_qdimacs;
    std::string witness_path;
    std::string trace_search_path;
    uint64_t seed = 0;
};

struct RunOutcome {
    BmcResult result;
    int exit_code = 1;
    int effective_bound = 0;  // differs from bound for rounded square runs
    std::string note;
};

// 10 = Reachable, 20 = UnreachableAtBound, 0 = ResourceLimit.
int exit_code_for(Verdict v);

RunOutcome run_on(const TransitionSystem& sys, const RunSpec& spec);
RunOutcome run(const RunSpec& spec);  // parses spec.model_path; AigerError propagates

// Witness file: "k=<K>", then K+1 state lines of '0'/'1' characters in
// latch declaration order, then K input lines (omitted when the system
// has no inputs).
std::string format_witness(const Trace& trace, unsigned num_inputs);
Trace parse_witness(std::string_view text, const TransitionSystem& sys);

struct CompareOptions {
    std::vector<Engine> engines;
    std::vector<int> bounds;
    Limits limits;
};

struct CompareCell {
    std::string model;
    int bound = 0;
    Engine engine = Engine::Unroll;
    std::optional<Verdict> verdict;  // empty when the engine skips the cell
    double seconds = 0.0;
};

struct CompareReport {
    std::vector<CompareCell> cells;
    int disagreements = 0;
    int decided_cells = 0;
    std::string table;
    bool ok() const { return disagreements == 0; }
};

// True when two decided cells of one row carry conflicting verdicts;
// ResourceLimit and skipped cells never conflict.
bool row_disagrees(const std::vector<CompareCell>& row);

// Runs every (model, bound, engine) cell with exactly-k semantics and
// flags any verdict disagreement between engines; ResourceLimit and
// skipped cells are excluded from the comparison.
CompareReport compare(const std::vector<std::pair<std::string, TransitionSystem>>& models,
                      const CompareOptions& opts);

// Deterministic fuzz corpus shared by the CLI and the test harness:
// latch counts cycle 1..8, inputs 0..2, gate counts vary with the index.
std::vector<std::pair<std::string, TransitionSystem>> make_corpus(uint64_t seed, int count);

}  // namespace qbmc
