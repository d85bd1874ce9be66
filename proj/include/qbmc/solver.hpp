#pragma once

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbmc/cnf.hpp"

namespace qbmc {

enum class SolveStatus { Sat, Unsat, Limit };

struct SolverOptions {
    bool learning = true;      // keep learned clauses across solve() calls
    bool restarts = true;      // Luby-scheduled restarts
    bool phase_saving = true;
    double var_decay = 0.95;
    int luby_unit = 64;        // restart interval base, in conflicts
};

struct SolverStats {
    uint64_t decisions = 0;
    uint64_t propagations = 0;
    uint64_t conflicts = 0;
    uint64_t restarts = 0;
    uint64_t learned = 0;
    uint64_t removed = 0;
    uint64_t sat_calls = 0;
};

// Conflict-driven clause learning SAT solver with incremental solving
// under assumptions. Deterministic: activity ties break toward the lowest
// variable index, restarts follow the Luby sequence, no randomness.
class Solver {
public:
    explicit Solver(SolverOptions opts = {});

    int new_var();
    void ensure_vars(int n);
    int num_vars() const { return nvars_; }
    bool ok() const { return ok_; }

    // Registers a clause; handles units and the empty clause immediately.
    // Throws std::out_of_range when a literal references an undeclared
    // variable. Returns false once the database is known unsatisfiable.
    bool add_clause(std::span<const Lit> lits);
    bool add_clause(std::initializer_list<Lit> lits);
    void add_cnf(const Cnf& cnf);

    SolveStatus solve(std::span<const Lit> assumptions = {});
    SolveStatus solve(std::initializer_list<Lit> assumptions);

    // Total model after Sat.
    bool model_value(Lit l) const;
    // After Unsat under assumptions: a subset of them sufficient for
    // inconsistency (empty when the database itself is unsatisfiable).
    const std::vector<Lit>& failed_assumptions() const { return conflict_; }

    void clear_learnts();

    // Limits apply to subsequent solve() calls; breach yields Limit and
    // leaves the solver reusable.
    void set_deadline(std::optional<std::chrono::steady_clock::time_point> t) { deadline_ = t; }
    void set_mem_limit(uint64_t bytes) { mem_limit_ = bytes; }  // 0 = unlimited
    uint64_t db_bytes() const;

    size_t num_original() const { return live_orig_; }
    size_t num_learnts() const { return live_learnt_; }
    std::vector<std::vector<Lit>> learnt_clauses() const;
    std::string dump_dimacs(std::string_view comment = {}) const;
    const SolverStats& stats() const { return stats_; }

private:
    using CRef = uint32_t;
    static constexpr CRef kCRefUndef = 0xFFFFFFFFu;

    struct Cls {
        uint32_t* p;
        uint32_t size() const { return p[0]; }
        bool learnt() const { return p[1] & 1u; }
        bool dead() const { return p[1] & 2u; }
        void set_dead() { p[1] |= 2u; }
        uint32_t lbd() const { return p[1] >> 8; }
        Lit* lits() { return reinterpret_cast<Lit*>(p + 2); }
        const Lit* lits() const { return reinterpret_cast<const Lit*>(p + 2); }
    };
    struct Watcher {
        CRef cref;
        Lit blocker;
    };
    enum class Internal { Sat, Unsat, Limit, Restart };

    Cls cls(CRef r) { return Cls{ca_.data() + r}; }
    const Cls cls(CRef r) const { return Cls{const_cast<uint32_t*>(ca_.data() + r)}; }
    static size_t widx(Lit l) { return 2 * static_cast<size_t>(lit_var(l)) + (lit_sign(l) ? 1 : 0); }
    int value(Lit l) const {
        int8_t a = assign_[lit_var(l)];
        return lit_sign(l) ? -a : a;
    }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }
    void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }
    void check_var(Lit l) const;

    CRef alloc_clause(std::span<const Lit> lits, bool learnt, uint32_t lbd);
    void attach_clause(CRef cr);
    void detach_clause(CRef cr);
    void kill_clause(CRef cr);

    void unchecked_enqueue(Lit p, CRef from);
    CRef propagate();
    void analyze(CRef confl, std::vector<Lit>& out_learnt, int& out_btlevel, uint32_t& out_lbd);
    void analyze_final(Lit p);
    void cancel_until(int level);
    Lit pick_branch_lit();
    Internal search(int conflict_budget);
    void reduce_db();
    bool time_expired() const;
    bool deadline_passed() const;
    bool over_mem_limit() const;

    // activity order
    void bump_var(int v);
    void decay_activities();
    bool heap_less(int a, int b) const;
    void heap_insert(int v);
    void heap_sift_up(int i);
    void heap_sift_down(int i);
    int heap_pop();

    SolverOptions opts_;
    SolverStats stats_;

    int nvars_ = 0;
    bool ok_ = true;
    std::vector<uint32_t> ca_;  // clause arena
    std::vector<CRef> clauses_, learnts_;
    size_t live_orig_ = 0, live_learnt_ = 0;
    size_t reduce_threshold_ = 4000;
    uint64_t total_watchers_ = 0;

    std::vector<std::vector<Watcher>> watches_;
    std::vector<int8_t> assign_;   // per var: 0 undef, 1 true, -1 false
    std::vector<int> level_;
    std::vector<CRef> reason_;
    std::vector<uint8_t> polarity_;  // saved phase: 1 = assign false next
    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<int> heap_, heap_pos_;
    std::vector<uint8_t> seen_;
    std::vector<int> toclear_;
    std::vector<uint32_t> level_stamp_;
    uint32_t stamp_ = 0;

    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;

    std::vector<Lit> assumptions_;
    std::vector<Lit> conflict_;
    std::vector<int8_t> model_;

    std::optional<std::chrono::steady_clock::time_point> deadline_;
    uint64_t mem_limit_ = 0;
    mutable uint64_t check_counter_ = 0;
};

}  // namespace qbmc
