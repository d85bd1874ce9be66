#pragma once

#include "qbmc/aiger.hpp"
#include "qbmc/bmc.hpp"
#include "qbmc/cnf.hpp"
#include "qbmc/solver.hpp"

namespace qbmc {

struct QbfEncoding {
    Qbf qbf;
    VarMap vm;
    int bound = 0;
};

// Bounded reachability with a single transition-relation copy: the path
// states Z_0..Z_k are existential, one universal (U,V) pair constrains
// every adjacent pair to be a transition. The universal block always has
// exactly 2n variables, so growing the bound adds only equality
// scaffolding. Requires k >= 1.
QbfEncoding encode_diameter_qbf(const TransitionSystem& sys, int k);

// Reachability in exactly k = 2^m steps (m >= 1) by halving: each level
// introduces an existential midpoint and one universal (U,V) pair, giving
// m quantifier alternations and still a single transition-relation copy.
// Throws std::invalid_argument unless k is a power of two >= 2.
QbfEncoding encode_squaring_qbf(const TransitionSystem& sys, int k);

// TR'(U,V) = TR(U,V) or U = V, realized by one fresh primary input
// (appended last) that selects stay/step per latch. Reachability in <= k
// steps of `sys` equals reachability in exactly k steps of the result.
TransitionSystem add_self_loops(const TransitionSystem& sys);

struct QbfEvalOptions {
    int max_universals = 16;
    Limits limits;
};

struct QbfEvalResult {
    SolveStatus status = SolveStatus::Limit;
    // After Sat: values of the outermost existential block, indexed by
    // the original variable (-1 = not part of that block).
    std::vector<int8_t> outer_value;
};

// Exact desk-scale QBF evaluation by recursive universal expansion:
// every forall block is enumerated over all assignments, existential
// variables are duplicated per branch, and the resulting propositional
// conjunction goes to one satcore call. Limit on universal-count cap,
// timeout, or memory breach.
QbfEvalResult naive_qbf_eval(const Qbf& qbf, const QbfEvalOptions& opts = {});

}  // namespace qbmc
