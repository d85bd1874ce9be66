#pragma once

#include "qbmc/aiger.hpp"
#include "qbmc/bmc.hpp"
#include "qbmc/cnf.hpp"

namespace qbmc {

struct UnrollEncoding {
    Cnf cnf;
    VarMap vm;
    int bound = 0;
};

// Classic bounded reachability: I(Z_0) and F(Z_k) around k structural
// copies of the transition relation, one per step. Exactly-k semantics.
UnrollEncoding encode_unrolled(const TransitionSystem& sys, int k);

BmcResult solve_unrolled(const TransitionSystem& sys, int k, const Limits& limits);

// Decodes (states, per-step inputs) from a model of the unrolled CNF.
Trace decode_unrolled_trace(const TransitionSystem& sys, const UnrollEncoding& enc,
                            const class Solver& solver);

}  // namespace qbmc
