#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qbmc/oracle.hpp"
#include "qbmc/qbf.hpp"
#include "qbmc/unroll.hpp"
#include "test_util.hpp"

using namespace qbmc;
using namespace qbmc::test;

namespace {

bool qbf_sat(const Qbf& q, int cap = 16) {
    QbfEvalOptions opts;
    opts.max_universals = cap;
    QbfEvalResult r = naive_qbf_eval(q, opts);
    REQUIRE(r.status != SolveStatus::Limit);
    return r.status == SolveStatus::Sat;
}

}  // namespace

TEST_CASE("diameter prefix is exists-forall-exists with a 2n universal block") {
    TransitionSystem sys = counter_sys();
    for (int k : {1, 2, 3, 7, 8}) {
        QbfEncoding enc = encode_diameter_qbf(sys, k);
        REQUIRE(enc.qbf.prefix.size() == 3);
        CHECK(enc.qbf.prefix[0].q == Quant::Exists);
        CHECK(enc.qbf.prefix[1].q == Quant::Forall);
        CHECK(enc.qbf.prefix[2].q == Quant::Exists);
        CHECK(enc.qbf.prefix[1].vars.size() == 2 * sys.num_latches());
        CHECK(enc.vm.tr_cones == 1);
        // outer block carries all k+1 state vectors
        CHECK(enc.qbf.prefix[0].vars.size() == (k + 1) * sys.num_latches());
    }
}

TEST_CASE("diameter evaluation matches the counter golden bounds") {
    TransitionSystem sys = counter_sys();
    for (int k = 1; k <= 8; ++k) {
        bool expect = (k == 3 || k == 7);
        CHECK(qbf_sat(encode_diameter_qbf(sys, k).qbf) == expect);
    }
}

TEST_CASE("diameter at bound 1 agrees with unrolling at bound 1") {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 15; ++i) {
        RandomSystemParams p{.num_latches = 1 + static_cast<int>(rng() % 3),
                             .num_inputs = static_cast<int>(rng() % 2),
                             .num_gates = static_cast<int>(rng() % 15)};
        TransitionSystem sys = random_system(rng(), p);
        bool qbf_verdict = qbf_sat(encode_diameter_qbf(sys, 1).qbf);
        BmcResult unroll = solve_unrolled(sys, 1, {});
        CHECK(qbf_verdict == (unroll.verdict == Verdict::Reachable));
    }
}

TEST_CASE("clause growth per bound step is constant and TR-size independent") {
    TransitionSystem slim = counter_sys();
    TransitionSystem fat = fat_counter_sys();

    auto deltas = [](const TransitionSystem& sys) {
        std::vector<size_t> out;
        size_t prev = 0;
        for (int k = 1; k <= 8; ++k) {
            size_t clauses = encode_diameter_qbf(sys, k).qbf.matrix.num_clauses();
            if (k > 1) out.push_back(clauses - prev);
            prev = clauses;
        }
        return out;
    };
    std::vector<size_t> ds = deltas(slim);
    std::vector<size_t> df = deltas(fat);
    for (size_t d : ds) CHECK(d == ds[0]);  // constant in k
    CHECK(ds == df);                        // independent of the TR cone size

    // and the fat system really does have a much bigger transition cone
    size_t slim_aux = encode_unrolled(slim, 1).vm.count_role(VarRole::AuxTr);
    size_t fat_aux = encode_unrolled(fat, 1).vm.count_role(VarRole::AuxTr);
    CHECK(fat_aux >= 4 * slim_aux);
}

TEST_CASE("self-loop augmentation keeps stepping and adds a stay input") {
    TransitionSystem sys = counter_sys();
    TransitionSystem looped = add_self_loops(sys);
    CHECK(looped.num_inputs() == 1);
    CHECK(looped.num_latches() == 2);
    for (int s = 0; s < 4; ++s) {
        StateVector state = sv({s & 1, (s >> 1) & 1});
        CHECK(looped.step(state, {true}) == state);              // stay
        CHECK(looped.step(state, {false}) == sys.step(state, {}));  // step
        CHECK(looped.eval_bad(state) == sys.eval_bad(state));
    }
}

TEST_CASE("self-loops turn exact-k into within-k reachability") {
    TransitionSystem looped = add_self_loops(counter_sys());
    // counter reaches bad at depth 3: within 4 yes, within 2 no
    CHECK(layered_reach(looped, 4, ReachMode::Exact).reachable);
    CHECK_FALSE(layered_reach(looped, 2, ReachMode::Exact).reachable);
    BmcResult r4 = solve_unrolled(looped, 4, {});
    CHECK(r4.verdict == Verdict::Reachable);
}

TEST_CASE("squaring prefix has log2(k) universal blocks") {
    TransitionSystem sys = counter_sys();
    auto universal_blocks = [](const Qbf& q) {
        int count = 0;
        for (const auto& b : q.prefix)
            if (b.q == Quant::Forall) ++count;
        return count;
    };
    CHECK(universal_blocks(encode_squaring_qbf(sys, 2).qbf) == 1);
    CHECK(universal_blocks(encode_squaring_qbf(sys, 4).qbf) == 2);
    CHECK(universal_blocks(encode_squaring_qbf(sys, 8).qbf) == 3);
    CHECK(encode_squaring_qbf(sys, 8).vm.tr_cones == 1);
    CHECK_THROWS_AS(encode_squaring_qbf(sys, 3), std::invalid_argument);
    CHECK_THROWS_AS(encode_squaring_qbf(sys, 1), std::invalid_argument);
    CHECK_THROWS_AS(encode_squaring_qbf(sys, 0), std::invalid_argument);
}

TEST_CASE("squaring without self-loops checks exactly-k reachability") {
    TransitionSystem sys = counter_sys();
    CHECK_FALSE(qbf_sat(encode_squaring_qbf(sys, 4).qbf));  // bad only at 3 and 7
    CHECK_FALSE(qbf_sat(encode_squaring_qbf(sys, 2).qbf));
    CHECK(qbf_sat(encode_squaring_qbf(sys, 8).qbf) ==
          layered_reach(sys, 8, ReachMode::Exact).reachable);
}

TEST_CASE("squaring with self-loops checks within-k reachability") {
    TransitionSystem looped = add_self_loops(counter_sys());
    CHECK(qbf_sat(encode_squaring_qbf(looped, 4).qbf));        // depth 3 <= 4
    CHECK_FALSE(qbf_sat(encode_squaring_qbf(looped, 2).qbf));  // not within 2
}

TEST_CASE("naive evaluation implements quantifier semantics") {
    Qbf all_x;  // forall x: x  -- falsified by x = 0
    all_x.matrix = Cnf{1, {{1}}};
    all_x.prefix = {{Quant::Forall, {1}}};
    CHECK_FALSE(qbf_sat(all_x));

    Qbf ex_all;  // exists x forall y: x or y  -- pick x = 1
    ex_all.matrix = Cnf{2, {{1, 2}}};
    ex_all.prefix = {{Quant::Exists, {1}}, {Quant::Forall, {2}}};
    CHECK(qbf_sat(ex_all));

    Qbf swap;  // exists x forall y: x <-> y is false
    swap.matrix = Cnf{2, {{1, -2}, {-1, 2}}};
    swap.prefix = {{Quant::Exists, {1}}, {Quant::Forall, {2}}};
    CHECK_FALSE(qbf_sat(swap));

    Qbf dep;  // forall y exists x: x <-> y is true
    dep.matrix = Cnf{2, {{1, -2}, {-1, 2}}};
    dep.prefix = {{Quant::Forall, {2}}, {Quant::Exists, {1}}};
    CHECK(qbf_sat(dep));
}

TEST_CASE("universal cap and limits yield ResourceLimit") {
    // forall y1..y20 exists x: (x or y1) -- true, but the expansion is huge
    Qbf q;
    q.matrix = Cnf{21, {{21, 1}}};
    QuantBlock uni{Quant::Forall, {}};
    for (int v = 1; v <= 20; ++v) uni.vars.push_back(v);
    q.prefix = {uni, {Quant::Exists, {21}}};
    QbfEvalOptions opts;
    opts.max_universals = 16;
    CHECK(naive_qbf_eval(q, opts).status == SolveStatus::Limit);  // cap breach
    opts.max_universals = 20;
    opts.limits.mem_bytes = 1024;  // absurdly small
    CHECK(naive_qbf_eval(q, opts).status == SolveStatus::Limit);  // memory breach
    opts.limits.mem_bytes = uint64_t(1) << 30;
    opts.limits.timeout_seconds = 0.0;
    CHECK(naive_qbf_eval(q, opts).status == SolveStatus::Limit);  // deadline breach
}

TEST_CASE("every encoder builds an injective, total variable map") {
    TransitionSystem sys = counter_sys();
    auto check_vm = [](const VarMap& vm, int num_vars) {
        CHECK(vm.num_vars() == num_vars);
        for (int v = 1; v <= vm.num_vars(); ++v) {
            const VarInfo& vi = vm.info(v);
            CHECK(vm.lookup(vi.role, vi.group, vi.index) == v);
        }
    };
    for (int k : {1, 3, 8}) {
        UnrollEncoding u = encode_unrolled(sys, k);
        check_vm(u.vm, u.cnf.num_vars);
        QbfEncoding d = encode_diameter_qbf(sys, k);
        check_vm(d.vm, d.qbf.matrix.num_vars);
    }
    QbfEncoding sq = encode_squaring_qbf(sys, 8);
    check_vm(sq.vm, sq.qbf.matrix.num_vars);
}

TEST_CASE("diameter evaluation matches the oracle on random systems") {
    std::mt19937_64 rng(52);
    for (int i = 0; i < 8; ++i) {
        RandomSystemParams p{.num_latches = 1 + static_cast<int>(rng() % 4),
                             .num_inputs = static_cast<int>(rng() % 2),
                             .num_gates = static_cast<int>(rng() % 16)};
        TransitionSystem sys = random_system(rng(), p);
        for (int k = 1; k <= 5; ++k) {
            bool expect = layered_reach(sys, k, ReachMode::Exact).reachable;
            CHECK(qbf_sat(encode_diameter_qbf(sys, k).qbf) == expect);
        }
    }
}
