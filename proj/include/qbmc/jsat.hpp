#pragma once

#include <iosfwd>
#include <memory>

#include "qbmc/aiger.hpp"
#include "qbmc/bmc.hpp"
#include "qbmc/cnf.hpp"
#include "qbmc/solver.hpp"

namespace qbmc {

struct JsatConfig {
    Limits limits;
    bool learning = true;            // reuse learned clauses across window shifts
    bool restarts = true;
    std::ostream* search_log = nullptr;
};

// The single propositional formula the procedure holds: one transition
// cone over (U, inputs, V), the initial predicate over U guarded by
// -act_init, the bad predicate over V guarded by -act_bad. No per-step
// state variables exist, so the size is independent of the bound.
struct WindowCnf {
    Cnf cnf;
    VarMap vm;
    Lit act_init = 0;
    Lit act_bad = 0;
};

WindowCnf build_window_cnf(const TransitionSystem& sys);

// Depth-first path search that slides the (U,V) window along the path:
// at window i the solver is asked for a successor of the decided state
// s_i (the initial predicate replaces the fixed state at window 0, the
// bad predicate is activated at window k-1). A refuted state is blocked
// at the window below; blocked sets are discarded when their window is
// popped. Exposed as a class so the window mechanics are testable.
class JsatSearch {
public:
    JsatSearch(const TransitionSystem& sys, int k, JsatConfig cfg = {});
    ~JsatSearch();

    enum class StepOutcome { Advanced, Popped, Done, Exhausted, Limit };

    StepOutcome step();  // one solver call at the current window (k >= 1)
    BmcResult run();     // drives step() to completion; handles k = 0

    int level() const;  // current window index
    const std::vector<StateVector>& decided() const { return decided_; }
    size_t blocked_count(int level) const;
    void block_state(int level, const StateVector& s);
    Trace trace() const;  // valid after Done
    const WindowCnf& window() const { return wc_; }
    Solver& solver() { return solver_; }
    const EngineStats& stats() const { return stats_; }

private:
    std::vector<Lit> assumptions_for_level(int i) const;
    StateVector read_state(const std::vector<Lit>& vars) const;
    void retire_level(int level);
    void log_state(const char* tag, int level, const StateVector& s) const;

    const TransitionSystem& sys_;
    int k_;
    JsatConfig cfg_;
    WindowCnf wc_;
    Solver solver_;
    std::vector<Lit> u_vars_, v_vars_, in_vars_;
    std::vector<StateVector> decided_;
    std::vector<InputVector> step_inputs_;
    struct LevelBlocks {
        Lit sel = 0;
        std::vector<StateVector> states;
    };
    std::vector<LevelBlocks> blocks_;
    EngineStats stats_;
    std::chrono::steady_clock::time_point t0_;
};

BmcResult jsat_solve(const TransitionSystem& sys, int k, const JsatConfig& cfg = {});

}  // namespace qbmc
