#pragma once

#include <cstdint>
#include <optional>

#include "qbmc/aiger.hpp"

namespace qbmc {

enum class ReachMode { Exact, UpTo };

struct ReachResult {
    bool reachable = false;
    std::optional<Trace> trace;
};

// Ground-truth reachability by explicit layered image computation:
// S_0 = {all-zero}, S_{i+1} = successors of S_i over all inputs. Exact
// mode asks whether S_k contains a bad state, UpTo whether any S_i with
// i <= k does. Witnesses are rebuilt by backward chaining over the
// layers. Requires num_latches <= 20 and num_inputs <= 8.
ReachResult layered_reach(const TransitionSystem& sys, int k, ReachMode mode);

struct RandomSystemParams {
    int num_latches = 4;
    int num_inputs = 1;  // <= 2 for corpus use
    int num_gates = 12;
};

// Deterministic function of the seed; the result always satisfies the
// parser/validator invariants (all-zero init, input-free bad cone).
TransitionSystem random_system(uint64_t seed, const RandomSystemParams& params = {});

// Adversarial model for limit tests: bound-1 unrolling reduces to a
// random width-3 CNF over `num_vars` free state bits at clause/variable
// ratio ~4.26 (the hard region for CDCL search).
TransitionSystem phase_transition_model(uint64_t seed, int num_vars);

}  // namespace qbmc
