#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qbmc/oracle.hpp"
#include "qbmc/solver.hpp"
#include "qbmc/unroll.hpp"
#include "test_util.hpp"

using namespace qbmc;
using namespace qbmc::test;

TEST_CASE("counter bounds: reachable exactly at depth 3 and 7") {
    TransitionSystem sys = counter_sys();
    Limits lim;
    for (int k = 0; k <= 8; ++k) {
        BmcResult r = solve_unrolled(sys, k, lim);
        bool expect = (k == 3 || k == 7);
        CHECK((r.verdict == Verdict::Reachable) == expect);
    }
}

TEST_CASE("counter depth-3 witness is the counting path") {
    BmcResult r = solve_unrolled(counter_sys(), 3, {});
    REQUIRE(r.verdict == Verdict::Reachable);
    REQUIRE(r.trace.has_value());
    CHECK(r.trace->states ==
          std::vector<StateVector>{sv({0, 0}), sv({1, 0}), sv({0, 1}), sv({1, 1})});
}

TEST_CASE("counter depth-7 witness wraps through the reset state") {
    BmcResult r = solve_unrolled(counter_sys(), 7, {});
    REQUIRE(r.verdict == Verdict::Reachable);
    REQUIRE(r.trace.has_value());
    CHECK(r.trace->states[4] == sv({0, 0}));  // second lap starts at step 4
    CHECK(r.trace->states[7] == sv({1, 1}));
}

TEST_CASE("self-loop system is unreachable at every bound") {
    TransitionSystem sys = selfloop_sys();
    for (int k = 0; k <= 8; ++k)
        CHECK(solve_unrolled(sys, k, {}).verdict == Verdict::UnreachableAtBound);
}

TEST_CASE("the encoding instantiates exactly k transition cones") {
    TransitionSystem sys = counter_sys();
    size_t prev_aux = 0;
    size_t first_aux = 0;
    for (int k = 0; k <= 8; ++k) {
        UnrollEncoding enc = encode_unrolled(sys, k);
        CHECK(enc.vm.tr_cones == k);
        CHECK(enc.vm.groups(VarRole::AuxTr).size() == static_cast<size_t>(k));
        size_t aux = enc.vm.count_role(VarRole::AuxTr);
        if (k >= 2) CHECK(aux - prev_aux == first_aux);  // linear growth
        if (k == 1) first_aux = aux;
        prev_aux = aux;
    }
}

TEST_CASE("unrolled traces replay under step") {
    std::mt19937_64 rng(31);
    int reachable = 0;
    for (int i = 0; i < 25; ++i) {
        RandomSystemParams p{.num_latches = 1 + static_cast<int>(rng() % 5),
                             .num_inputs = static_cast<int>(rng() % 3),
                             .num_gates = static_cast<int>(rng() % 20)};
        TransitionSystem sys = random_system(rng(), p);
        for (int k = 0; k <= 5; ++k) {
            BmcResult r = solve_unrolled(sys, k, {});
            if (r.verdict == Verdict::Reachable) {
                REQUIRE(r.trace.has_value());
                CHECK_FALSE(check_trace(sys, *r.trace).has_value());
                CHECK(r.trace->bound() == k);
                ++reachable;
            }
        }
    }
    CHECK(reachable > 0);
}

TEST_CASE("verdicts agree with the explicit oracle") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 30; ++i) {
        RandomSystemParams p{.num_latches = 1 + static_cast<int>(rng() % 6),
                             .num_inputs = static_cast<int>(rng() % 3),
                             .num_gates = static_cast<int>(rng() % 26)};
        TransitionSystem sys = random_system(rng(), p);
        for (int k = 0; k <= 6; ++k) {
            BmcResult r = solve_unrolled(sys, k, {});
            ReachResult o = layered_reach(sys, k, ReachMode::Exact);
            REQUIRE(r.verdict != Verdict::ResourceLimit);
            CHECK((r.verdict == Verdict::Reachable) == o.reachable);
        }
    }
}

TEST_CASE("input words decode into the witness") {
    // one latch fed by an input; bad = latch
    TransitionSystem sys = parse_aiger("aag 2 1 1 1 0\n2\n4 2\n4\n");
    BmcResult r = solve_unrolled(sys, 1, {});
    REQUIRE(r.verdict == Verdict::Reachable);
    REQUIRE(r.trace.has_value());
    REQUIRE(r.trace->inputs.size() == 1);
    CHECK(r.trace->inputs[0] == InputVector{true});  // input must be driven high
}
