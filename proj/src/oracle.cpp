#include "qbmc/oracle.hpp"

#include <cassert>
#include <random>
#include <stdexcept>

namespace qbmc {

namespace {

StateVector state_of_index(uint32_t idx, unsigned n) {
    StateVector s(n);
    for (unsigned j = 0; j < n; ++j) s[j] = (idx >> j) & 1u;
    return s;
}

InputVector input_of_index(uint32_t idx, unsigned m) {
    InputVector x(m);
    for (unsigned i = 0; i < m; ++i) x[i] = (idx >> i) & 1u;
    return x;
}

uint32_t index_of_state(const StateVector& s) {
    uint32_t idx = 0;
    for (size_t j = 0; j < s.size(); ++j)
        if (s[j]) idx |= 1u << j;
    return idx;
}

}  // namespace

ReachResult layered_reach(const TransitionSystem& sys, int k, ReachMode mode) {
    if (sys.num_latches() > 20 || sys.num_inputs() > 8)
        throw std::invalid_argument("layered_reach: system too large for explicit search");
    if (k < 0) throw std::invalid_argument("layered_reach: negative bound");

    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();
    const uint32_t nstates = 1u << n;
    const uint32_t ninputs = 1u << m;

    std::vector<int8_t> bad_cache(nstates, -1);
    auto is_bad = [&](uint32_t idx) {
        if (bad_cache[idx] < 0) bad_cache[idx] = sys.eval_bad(state_of_index(idx, n)) ? 1 : 0;
        return bad_cache[idx] == 1;
    };

    // Layer 0 is the all-zero reset state.
    std::vector<std::vector<bool>> layers(k + 1, std::vector<bool>(nstates, false));
    layers[0][0] = true;
    assert(sys.eval_init(state_of_index(0, n)));

    for (int i = 0; i < k; ++i) {
        for (uint32_t s = 0; s < nstates; ++s) {
            if (!layers[i][s]) continue;
            StateVector sv = state_of_index(s, n);
            for (uint32_t x = 0; x < ninputs; ++x)
                layers[i + 1][index_of_state(sys.step(sv, input_of_index(x, m)))] = true;
        }
    }

    int hit_layer = -1;
    uint32_t hit_state = 0;
    auto scan = [&](int layer) {
        for (uint32_t s = 0; s < nstates; ++s)
            if (layers[layer][s] && is_bad(s)) {
                hit_layer = layer;
                hit_state = s;
                return true;
            }
        return false;
    };
    if (mode == ReachMode::Exact) {
        scan(k);
    } else {
        for (int i = 0; i <= k && hit_layer < 0; ++i) scan(i);
    }
    if (hit_layer < 0) return {false, std::nullopt};

    // Backward chaining over the stored layers.
    Trace trace;
    trace.states.assign(hit_layer + 1, {});
    trace.inputs.assign(hit_layer, {});
    trace.states[hit_layer] = state_of_index(hit_state, n);
    uint32_t cur = hit_state;
    for (int i = hit_layer; i > 0; --i) {
        bool found = false;
        for (uint32_t s = 0; s < nstates && !found; ++s) {
            if (!layers[i - 1][s]) continue;
            StateVector sv = state_of_index(s, n);
            for (uint32_t x = 0; x < ninputs; ++x) {
                InputVector xv = input_of_index(x, m);
                if (index_of_state(sys.step(sv, xv)) == cur) {
                    trace.states[i - 1] = sv;
                    trace.inputs[i - 1] = xv;
                    cur = s;
                    found = true;
                    break;
                }
            }
        }
        assert(found && "layer sets must chain");
    }
    assert(!check_trace(sys, trace));
    return {true, std::move(trace)};
}

namespace {

// Deterministic across platforms, unlike uniform_int_distribution.
uint64_t pick(std::mt19937_64& rng, uint64_t range) { return rng() % range; }

}  // namespace

TransitionSystem random_system(uint64_t seed, const RandomSystemParams& params) {
    if (params.num_latches < 1 || params.num_latches > 8 || params.num_inputs < 0 ||
        params.num_inputs > 2 || params.num_gates < 0 || params.num_gates > 30)
        throw std::invalid_argument("random_system: parameters out of range");

    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 1);
    const unsigned m = params.num_inputs;
    const unsigned n = params.num_latches;
    const unsigned g = params.num_gates;

    std::vector<Gate> gates;
    std::vector<bool> input_cone(1 + m + n + g, false);
    for (unsigned i = 0; i < m; ++i) input_cone[1 + i] = true;

    auto rand_lit = [&](unsigned node_limit) {
        uint32_t node = 1 + static_cast<uint32_t>(pick(rng, node_limit));
        return aig_lit(node, pick(rng, 2) != 0);
    };

    for (unsigned gi = 0; gi < g; ++gi) {
        AigLit a = rand_lit(m + n + gi);
        AigLit b = rand_lit(m + n + gi);
        gates.push_back(Gate{a, b});
        input_cone[1 + m + n + gi] = input_cone[aig_node(a)] || input_cone[aig_node(b)];
    }

    std::vector<AigLit> latch_next(n);
    for (unsigned j = 0; j < n; ++j) latch_next[j] = rand_lit(m + n + g);

    // The bad predicate must be input-free; prefer gate cones, fall back
    // to a bare latch.
    std::vector<uint32_t> candidates;
    for (unsigned gi = 0; gi < g; ++gi)
        if (!input_cone[1 + m + n + gi]) candidates.push_back(1 + m + n + gi);
    uint32_t bad_node;
    if (!candidates.empty())
        bad_node = candidates[pick(rng, candidates.size())];
    else
        bad_node = 1 + m + pick(rng, n);
    AigLit bad = aig_lit(bad_node, pick(rng, 2) != 0);

    return TransitionSystem(m, n, std::move(latch_next), std::move(gates), bad);
}

TransitionSystem phase_transition_model(uint64_t seed, int num_vars) {
    if (num_vars < 3) throw std::invalid_argument("phase_transition_model: too few variables");
    std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ull + 7);
    const unsigned n = static_cast<unsigned>(num_vars);
    const unsigned m = n;  // next state is unconstrained
    const int num_clauses = static_cast<int>(n * 4.26);

    std::vector<Gate> gates;
    auto add_gate = [&](AigLit a, AigLit b) {
        gates.push_back(Gate{a, b});
        return aig_lit(1 + m + n + static_cast<uint32_t>(gates.size()) - 1);
    };

    AigLit conj = kAigTrue;
    for (int c = 0; c < num_clauses; ++c) {
        uint32_t v0 = static_cast<uint32_t>(pick(rng, n));
        uint32_t v1 = v0, v2 = v0;
        while (v1 == v0) v1 = static_cast<uint32_t>(pick(rng, n));
        while (v2 == v0 || v2 == v1) v2 = static_cast<uint32_t>(pick(rng, n));
        AigLit l0 = aig_lit(1 + m + v0, pick(rng, 2) != 0);
        AigLit l1 = aig_lit(1 + m + v1, pick(rng, 2) != 0);
        AigLit l2 = aig_lit(1 + m + v2, pick(rng, 2) != 0);
        // OR of three literals via two ANDs
        AigLit t = add_gate(aig_not(l0), aig_not(l1));
        AigLit u = add_gate(t, aig_not(l2));
        AigLit clause_lit = aig_not(u);
        conj = (conj == kAigTrue) ? clause_lit : add_gate(conj, clause_lit);
    }

    std::vector<AigLit> latch_next(n);
    for (unsigned j = 0; j < n; ++j) latch_next[j] = aig_lit(1 + j);  // latch j := input j

    return TransitionSystem(m, n, std::move(latch_next), std::move(gates), conj);
}

}  // namespace qbmc
