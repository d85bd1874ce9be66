#include "qbmc/jsat.hpp"

#include <cassert>
#include <chrono>
#include <ostream>

#include "qbmc/tseitin.hpp"

namespace qbmc {

namespace {

// Encodes a guarded cone: every clause of the cone (definitions and the
// root assertion) is extended with -guard, so the predicate only binds
// while the guard is assumed.
void encode_guarded_predicate(const TransitionSystem& sys, Cnf& cnf, VarMap& vm, VarRole role,
                              AigLit root, const std::vector<Lit>& leaves, Lit guard) {
    Cnf scratch;
    scratch.num_vars = cnf.num_vars;
    ConeEncoder enc(sys, scratch, vm, role, 0, leaves, {});
    EncLit e = enc.encode(root);
    assert_enclit(scratch, e, guard);
    for (auto& clause : scratch.clauses) {
        if (clause.empty() || clause[0] != -guard) clause.push_back(-guard);
        cnf.add(std::move(clause));
    }
    cnf.num_vars = vm.num_vars();
}

std::string state_bits(const StateVector& s) {
    std::string out;
    for (bool b : s) out += b ? '1' : '0';
    return out;
}

}  // namespace

WindowCnf build_window_cnf(const TransitionSystem& sys) {
    WindowCnf out;
    VarMap& vm = out.vm;
    Cnf& cnf = out.cnf;
    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();

    std::vector<Lit> u(n), v(n), in(m);
    for (unsigned j = 0; j < n; ++j) u[j] = vm.fresh(VarRole::Current, 0, static_cast<int>(j));
    for (unsigned j = 0; j < n; ++j) v[j] = vm.fresh(VarRole::Next, 0, static_cast<int>(j));
    for (unsigned x = 0; x < m; ++x) in[x] = vm.fresh(VarRole::Input, 0, static_cast<int>(x));
    out.act_init = vm.fresh(VarRole::Act, 0, 0);
    out.act_bad = vm.fresh(VarRole::Act, 0, 1);
    cnf.num_vars = vm.num_vars();

    // TR(U, inputs, V): unconditional bit definitions of the successor.
    {
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxTr, 0, u, in);
        ++vm.tr_cones;
        for (unsigned j = 0; j < n; ++j) {
            EncLit e = enc.encode(sys.latch_next(j));
            if (e.is_const)
                cnf.add({e.cval ? v[j] : -v[j]});
            else
                add_iff(cnf, v[j], e.lit);
        }
    }
    encode_guarded_predicate(sys, cnf, vm, VarRole::AuxInit, sys.init_lit(), u, out.act_init);
    encode_guarded_predicate(sys, cnf, vm, VarRole::AuxBad, sys.bad_lit(), v, out.act_bad);
    cnf.num_vars = vm.num_vars();
    return out;
}

JsatSearch::JsatSearch(const TransitionSystem& sys, int k, JsatConfig cfg)
    : sys_(sys),
      k_(k),
      cfg_(cfg),
      wc_(build_window_cnf(sys)),
      solver_(SolverOptions{.learning = cfg.learning, .restarts = cfg.restarts}),
      blocks_(k >= 1 ? k : 1),
      t0_(std::chrono::steady_clock::now()) {
    assert(k >= 0);
    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();
    for (unsigned j = 0; j < n; ++j) u_vars_.push_back(wc_.vm.lookup(VarRole::Current, 0, j));
    for (unsigned j = 0; j < n; ++j) v_vars_.push_back(wc_.vm.lookup(VarRole::Next, 0, j));
    for (unsigned x = 0; x < m; ++x) in_vars_.push_back(wc_.vm.lookup(VarRole::Input, 0, x));

    solver_.set_deadline(t0_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(cfg_.limits.timeout_seconds)));
    solver_.set_mem_limit(cfg_.limits.mem_bytes);
    solver_.add_cnf(wc_.cnf);
    stats_.vars = wc_.vm.num_vars();
    stats_.clauses = static_cast<int64_t>(wc_.cnf.num_clauses());
}

JsatSearch::~JsatSearch() = default;

int JsatSearch::level() const {
    return decided_.empty() ? 0 : static_cast<int>(decided_.size()) - 1;
}

size_t JsatSearch::blocked_count(int level) const {
    assert(level >= 0 && level < static_cast<int>(blocks_.size()));
    return blocks_[level].states.size();
}

StateVector JsatSearch::read_state(const std::vector<Lit>& vars) const {
    StateVector s(vars.size());
    for (size_t j = 0; j < vars.size(); ++j) s[j] = solver_.model_value(vars[j]);
    return s;
}

void JsatSearch::log_state(const char* tag, int level, const StateVector& s) const {
    if (cfg_.search_log) *cfg_.search_log << tag << ' ' << level << ' ' << state_bits(s) << '\n';
}

void JsatSearch::block_state(int level, const StateVector& s) {
    assert(level >= 0 && level <= this->level());
    LevelBlocks& lb = blocks_[level];
    if (lb.sel == 0) lb.sel = solver_.new_var();
    std::vector<Lit> clause{-lb.sel};
    for (size_t j = 0; j < v_vars_.size(); ++j) clause.push_back(s[j] ? -v_vars_[j] : v_vars_[j]);
    solver_.add_clause(clause);
    lb.states.push_back(s);
    ++stats_.blocks;
    log_state("BLOCK", level, s);
}

void JsatSearch::retire_level(int level) {
    LevelBlocks& lb = blocks_[level];
    if (lb.sel != 0) {
        solver_.add_clause({-lb.sel});  // permanently satisfies its clauses
        lb.sel = 0;
    }
    lb.states.clear();
}

std::vector<Lit> JsatSearch::assumptions_for_level(int i) const {
    std::vector<Lit> as;
    if (i == 0) {
        as.push_back(wc_.act_init);
    } else {
        as.push_back(-wc_.act_init);
        const StateVector& s = decided_[i];
        for (size_t j = 0; j < u_vars_.size(); ++j)
            as.push_back(s[j] ? u_vars_[j] : -u_vars_[j]);
    }
    as.push_back(i == k_ - 1 ? wc_.act_bad : Lit(-wc_.act_bad));
    for (int l = 0; l < static_cast<int>(blocks_.size()); ++l) {
        if (blocks_[l].sel == 0) continue;
        as.push_back(l == i ? blocks_[l].sel : Lit(-blocks_[l].sel));
    }
    return as;
}

JsatSearch::StepOutcome JsatSearch::step() {
    assert(k_ >= 1);
    const int i = level();
    ++stats_.sat_calls;
    SolveStatus st = solver_.solve(assumptions_for_level(i));
    if (st == SolveStatus::Limit) return StepOutcome::Limit;

    if (st == SolveStatus::Sat) {
        StateVector next = read_state(v_vars_);
        InputVector x(in_vars_.size());
        for (size_t j = 0; j < in_vars_.size(); ++j) x[j] = solver_.model_value(in_vars_[j]);
        if (i == 0) {
            // Both ends of the first window are decided here.
            StateVector s0 = read_state(u_vars_);
            decided_.assign({std::move(s0), next});
            step_inputs_.assign({std::move(x)});
            log_state("SHIFT", 0, decided_[0]);
        } else {
            decided_.push_back(next);
            step_inputs_.push_back(std::move(x));
        }
        log_state("SHIFT", static_cast<int>(decided_.size()) - 1, next);
        ++stats_.window_shifts;
        return static_cast<int>(decided_.size()) == k_ + 1 ? StepOutcome::Done
                                                           : StepOutcome::Advanced;
    }

    // No viable successor at this window.
    if (i == 0) return StepOutcome::Exhausted;
    StateVector refuted = decided_.back();
    decided_.pop_back();
    step_inputs_.pop_back();
    retire_level(i);  // its blocked set is cleared along with the window
    if (cfg_.search_log) *cfg_.search_log << "POP " << i << '\n';
    ++stats_.pops;
    block_state(i - 1, refuted);
    return StepOutcome::Popped;
}

Trace JsatSearch::trace() const {
    Trace t;
    t.states = decided_;
    t.inputs = step_inputs_;
    return t;
}

BmcResult JsatSearch::run() {
    BmcResult res;
    auto finish = [&](Verdict v) {
        res.verdict = v;
        stats_.decisions = static_cast<int64_t>(solver_.stats().decisions);
        stats_.propagations = static_cast<int64_t>(solver_.stats().propagations);
        stats_.conflicts = static_cast<int64_t>(solver_.stats().conflicts);
        stats_.learned = static_cast<int64_t>(solver_.stats().learned);
        stats_.peak_bytes = solver_.db_bytes();
        res.stats = stats_;
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        if (cfg_.search_log) *cfg_.search_log << "RESULT " << verdict_name(v) << '\n';
        return res;
    };

    assert(k_ >= 1 && "k = 0 is handled by jsat_solve");

    for (;;) {
        if (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count() >
            cfg_.limits.timeout_seconds)
            return finish(Verdict::ResourceLimit);
        switch (step()) {
            case StepOutcome::Done: {
                Trace t = trace();
                assert(!check_trace(sys_, t));
                res.trace = std::move(t);
                return finish(Verdict::Reachable);
            }
            case StepOutcome::Exhausted:
                return finish(Verdict::UnreachableAtBound);
            case StepOutcome::Limit:
                return finish(Verdict::ResourceLimit);
            case StepOutcome::Advanced:
            case StepOutcome::Popped:
                break;
        }
    }
}

BmcResult jsat_solve(const TransitionSystem& sys, int k, const JsatConfig& cfg) {
    if (k >= 1) return JsatSearch(sys, k, cfg).run();

    // k = 0: one satcore call on I(Z_0) and F(Z_0), both cones over one
    // state-variable vector.
    const auto t0 = std::chrono::steady_clock::now();
    BmcResult res;
    Cnf cnf;
    VarMap vm;
    std::vector<Lit> u;
    for (unsigned j = 0; j < sys.num_latches(); ++j)
        u.push_back(vm.fresh(VarRole::Current, 0, static_cast<int>(j)));
    cnf.num_vars = vm.num_vars();
    {
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxInit, 0, u, {});
        assert_enclit(cnf, enc.encode(sys.init_lit()));
    }
    {
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxBad, 0, u, {});
        assert_enclit(cnf, enc.encode(sys.bad_lit()));
    }
    cnf.num_vars = vm.num_vars();

    Solver solver(SolverOptions{.learning = cfg.learning, .restarts = cfg.restarts});
    solver.set_deadline(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(cfg.limits.timeout_seconds)));
    solver.set_mem_limit(cfg.limits.mem_bytes);
    solver.add_cnf(cnf);
    SolveStatus st = solver.solve();
    res.stats.vars = vm.num_vars();
    res.stats.clauses = static_cast<int64_t>(cnf.num_clauses());
    res.stats.sat_calls = 1;
    switch (st) {
        case SolveStatus::Sat: {
            Trace t;
            StateVector s(sys.num_latches());
            for (unsigned j = 0; j < sys.num_latches(); ++j) s[j] = solver.model_value(u[j]);
            t.states.push_back(std::move(s));
            assert(!check_trace(sys, t));
            res.trace = std::move(t);
            res.verdict = Verdict::Reachable;
            break;
        }
        case SolveStatus::Unsat:
            res.verdict = Verdict::UnreachableAtBound;
            break;
        case SolveStatus::Limit:
            res.verdict = Verdict::ResourceLimit;
            break;
    }
    if (cfg.search_log) *cfg.search_log << "RESULT " << verdict_name(res.verdict) << '\n';
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace qbmc
