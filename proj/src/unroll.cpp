#include "qbmc/unroll.hpp"

#include <cassert>
#include <chrono>

#include "qbmc/solver.hpp"
#include "qbmc/tseitin.hpp"

namespace qbmc {

UnrollEncoding encode_unrolled(const TransitionSystem& sys, int k) {
    assert(k >= 0);
    UnrollEncoding out;
    out.bound = k;
    VarMap& vm = out.vm;
    Cnf& cnf = out.cnf;
    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();

    for (int i = 0; i <= k; ++i)
        for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::State, i, static_cast<int>(j));
    for (int i = 0; i < k; ++i)
        for (unsigned x = 0; x < m; ++x) vm.fresh(VarRole::Input, i, static_cast<int>(x));
    cnf.num_vars = vm.num_vars();

    auto state_lits = [&](int i) {
        std::vector<Lit> v(n);
        for (unsigned j = 0; j < n; ++j) v[j] = vm.lookup(VarRole::State, i, static_cast<int>(j));
        return v;
    };
    auto input_lits = [&](int i) {
        std::vector<Lit> v(m);
        for (unsigned x = 0; x < m; ++x) v[x] = vm.lookup(VarRole::Input, i, static_cast<int>(x));
        return v;
    };

    {
        std::vector<Lit> z0 = state_lits(0);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxInit, 0, z0, {});
        assert_enclit(cnf, enc.encode(sys.init_lit()));
    }
    for (int i = 0; i < k; ++i) {
        std::vector<Lit> zi = state_lits(i);
        std::vector<Lit> zn = state_lits(i + 1);
        std::vector<Lit> xi = input_lits(i);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxTr, i, zi, xi);
        ++vm.tr_cones;
        for (unsigned j = 0; j < n; ++j) {
            EncLit e = enc.encode(sys.latch_next(j));
            if (e.is_const)
                cnf.add({e.cval ? zn[j] : -zn[j]});
            else
                add_iff(cnf, zn[j], e.lit);
        }
    }
    {
        std::vector<Lit> zk = state_lits(k);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxBad, 0, zk, {});
        assert_enclit(cnf, enc.encode(sys.bad_lit()));
    }
    cnf.num_vars = vm.num_vars();
    return out;
}

Trace decode_unrolled_trace(const TransitionSystem& sys, const UnrollEncoding& enc,
                            const Solver& solver) {
    Trace trace;
    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();
    for (int i = 0; i <= enc.bound; ++i) {
        StateVector s(n);
        for (unsigned j = 0; j < n; ++j)
            s[j] = solver.model_value(enc.vm.lookup(VarRole::State, i, static_cast<int>(j)));
        trace.states.push_back(std::move(s));
    }
    for (int i = 0; i < enc.bound; ++i) {
        InputVector x(m);
        for (unsigned xi = 0; xi < m; ++xi)
            x[xi] = solver.model_value(enc.vm.lookup(VarRole::Input, i, static_cast<int>(xi)));
        trace.inputs.push_back(std::move(x));
    }
    return trace;
}

BmcResult solve_unrolled(const TransitionSystem& sys, int k, const Limits& limits) {
    const auto t0 = std::chrono::steady_clock::now();
    BmcResult res;
    UnrollEncoding enc = encode_unrolled(sys, k);

    Solver solver;
    solver.set_deadline(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(limits.timeout_seconds)));
    solver.set_mem_limit(limits.mem_bytes);
    solver.add_cnf(enc.cnf);

    SolveStatus st = solver.solve();
    res.stats.vars = solver.num_vars();
    res.stats.clauses = static_cast<int64_t>(enc.cnf.num_clauses());
    res.stats.decisions = static_cast<int64_t>(solver.stats().decisions);
    res.stats.propagations = static_cast<int64_t>(solver.stats().propagations);
    res.stats.conflicts = static_cast<int64_t>(solver.stats().conflicts);
    res.stats.learned = static_cast<int64_t>(solver.stats().learned);
    res.stats.sat_calls = 1;
    res.stats.peak_bytes = solver.db_bytes();

    switch (st) {
        case SolveStatus::Sat: {
            res.verdict = Verdict::Reachable;
            Trace trace = decode_unrolled_trace(sys, enc, solver);
            assert(!check_trace(sys, trace));
            res.trace = std::move(trace);
            break;
        }
        case SolveStatus::Unsat:
            res.verdict = Verdict::UnreachableAtBound;
            break;
        case SolveStatus::Limit:
            res.verdict = Verdict::ResourceLimit;
            break;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace qbmc
