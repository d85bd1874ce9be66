// Acceptance suite: runs every top-level claim of the checker end to end
// and prints one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "qbmc/harness.hpp"
#include "qbmc/jsat.hpp"
#include "qbmc/oracle.hpp"
#include "qbmc/qbf.hpp"
#include "qbmc/solver.hpp"
#include "qbmc/unroll.hpp"
#include "test_util.hpp"

using namespace qbmc;
using namespace qbmc::test;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "PASS" : "FAIL") << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++failures;
}

// ---------------------------------------------------------------------
// Criterion 1: cross-engine agreement on >= 500 random (seed, bound)
// cells; engines unroll, jsat, oracle; zero tolerance.
void criterion_cross_engine() {
    const auto t0 = Clock::now();
    CompareOptions opts;
    opts.engines = {Engine::Unroll, Engine::Jsat, Engine::Oracle};
    opts.bounds = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    auto models = make_corpus(1, 60);  // 60 systems x 9 bounds = 540 cells
    CompareReport rep = compare(models, opts);
    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    size_t cells = models.size() * opts.bounds.size();
    bool pass = rep.ok() && cells >= 500 && rep.decided_cells == static_cast<int>(cells * 3) &&
                dt < 300.0;
    std::ostringstream detail;
    detail << cells << " cells, " << rep.disagreements << " disagreements, " << dt << "s";
    report("cross-engine agreement (unroll/jsat/oracle)", pass, detail.str());
}

// ---------------------------------------------------------------------
// Criterion 2: QBF semantic agreement. Diameter encoding vs the oracle's
// exact-k verdict on every n <= 4 corpus system, bounds 1..8; squaring on
// the self-loop augmented system vs within-k for k in {2,4,8} wherever
// the evaluator's universal cap (16) admits the instance.
void criterion_qbf_semantics() {
    std::vector<TransitionSystem> corpus;
    for (int n = 1; n <= 4; ++n)
        for (uint64_t s = 0; s < 3; ++s)
            corpus.push_back(random_system(100 + 10 * n + s,
                                           {.num_latches = n,
                                            .num_inputs = static_cast<int>(s % 2),
                                            .num_gates = 6 + 3 * n}));

    int diameter_checked = 0, diameter_wrong = 0;
    for (const TransitionSystem& sys : corpus) {
        for (int k = 1; k <= 8; ++k) {
            QbfEvalResult ev = naive_qbf_eval(encode_diameter_qbf(sys, k).qbf);
            bool oracle = layered_reach(sys, k, ReachMode::Exact).reachable;
            if (ev.status == SolveStatus::Limit) continue;  // cap precondition
            ++diameter_checked;
            if ((ev.status == SolveStatus::Sat) != oracle) ++diameter_wrong;
        }
    }
    bool diameter_pass =
        diameter_wrong == 0 && diameter_checked == static_cast<int>(corpus.size()) * 8;
    std::ostringstream d1;
    d1 << diameter_checked << " cells, " << diameter_wrong << " wrong";
    report("qbf semantic agreement: diameter vs oracle exact-k", diameter_pass, d1.str());

    QbfEvalOptions sq_opts;
    sq_opts.limits.timeout_seconds = 120.0;
    int sq_wrong = 0, sq_limited = 0;
    std::map<int, int> decided_per_k;
    for (const TransitionSystem& sys : corpus) {
        TransitionSystem looped = add_self_loops(sys);
        for (int k : {2, 4, 8}) {
            QbfEncoding enc = encode_squaring_qbf(looped, k);
            QbfEvalResult ev = naive_qbf_eval(enc.qbf, sq_opts);
            if (ev.status == SolveStatus::Limit) {
                ++sq_limited;
                continue;
            }
            ++decided_per_k[k];
            bool oracle = layered_reach(sys, k, ReachMode::UpTo).reachable;
            if ((ev.status == SolveStatus::Sat) != oracle) ++sq_wrong;
        }
    }
    // All 12 systems fit at k=2; n <= 3 ones must fit at k=4; n <= 2 at k=8.
    bool sq_pass = sq_wrong == 0 && decided_per_k[2] >= 12 && decided_per_k[4] >= 9 &&
                   decided_per_k[8] >= 6;
    std::ostringstream d2;
    d2 << "decided k2/k4/k8 = " << decided_per_k[2] << "/" << decided_per_k[4] << "/"
       << decided_per_k[8] << ", limited " << sq_limited << ", wrong " << sq_wrong;
    report("qbf semantic agreement: squaring vs oracle within-k", sq_pass, d2.str());
}

// ---------------------------------------------------------------------
// Criterion 3: structural claims about the encodings.
void criterion_structural() {
    TransitionSystem slim = counter_sys();
    TransitionSystem fat = fat_counter_sys();

    bool a = true;
    for (int k = 0; k <= 8; ++k) a = a && encode_unrolled(slim, k).vm.tr_cones == k;
    report("structural (a): unrolling instantiates exactly k TR cones", a);

    bool b = true;
    for (int k = 1; k <= 8; ++k) {
        QbfEncoding enc = encode_diameter_qbf(slim, k);
        size_t uni = 0;
        for (const auto& blk : enc.qbf.prefix)
            if (blk.q == Quant::Forall) uni += blk.vars.size();
        b = b && enc.vm.tr_cones == 1 && uni == 2 * slim.num_latches();
    }
    report("structural (b): diameter has one TR cone and a 2n universal block", b);

    auto deltas = [](const TransitionSystem& sys) {
        std::vector<long> out;
        long prev = 0;
        for (int k = 1; k <= 8; ++k) {
            long c = static_cast<long>(encode_diameter_qbf(sys, k).qbf.matrix.num_clauses());
            if (k > 1) out.push_back(c - prev);
            prev = c;
        }
        return out;
    };
    long slim_cone = encode_unrolled(slim, 1).vm.count_role(VarRole::AuxTr);
    long fat_cone = encode_unrolled(fat, 1).vm.count_role(VarRole::AuxTr);
    auto ds = deltas(slim), df = deltas(fat);
    bool c = fat_cone >= 4 * slim_cone && ds == df;
    for (long d : ds) c = c && d == ds[0];
    std::ostringstream d3;
    d3 << "delta " << ds[0] << " for cones of " << slim_cone << " and " << fat_cone << " gates";
    report("structural (c): per-bound clause growth independent of TR size", c, d3.str());

    bool d = true;
    for (int m = 1; m <= 3; ++m) {
        QbfEncoding enc = encode_squaring_qbf(slim, 1 << m);
        int uni_blocks = 0;
        for (const auto& blk : enc.qbf.prefix)
            if (blk.q == Quant::Forall) ++uni_blocks;
        d = d && uni_blocks == m && enc.vm.tr_cones == 1;
    }
    report("structural (d): squaring at 2^m has exactly m universal blocks", d);
}

// ---------------------------------------------------------------------
// Criterion 4: jsat holds a bound-independent clause database; only the
// decided-state stack scales with k.
void criterion_jsat_space() {
    TransitionSystem sys = counter_sys();
    BmcResult r3 = jsat_solve(sys, 3);
    BmcResult r64 = jsat_solve(sys, 64);
    bool same_db = r3.stats.clauses == r64.stats.clauses && r3.stats.vars == r64.stats.vars;

    // The only k-proportional structure is the decided stack: at bound 64
    // the unreachable counter forces the search through all 65 levels.
    bool stack_grows = r64.stats.window_shifts > r3.stats.window_shifts;
    bool pass = same_db && stack_grows && r3.verdict == Verdict::Reachable &&
                r64.verdict == Verdict::UnreachableAtBound;
    std::ostringstream d;
    d << "clauses " << r3.stats.clauses << " at k=3 vs " << r64.stats.clauses << " at k=64";
    report("jsat space: clause database independent of the bound", pass, d.str());
}

// ---------------------------------------------------------------------
// Criterion 5: counter golden bounds under every engine.
void criterion_counter_golden() {
    TransitionSystem sys = counter_sys();
    bool pass = true;
    std::ostringstream detail;
    for (int k = 0; k <= 7; ++k) {
        bool expect = (k == 3 || k == 7);
        for (Engine e : {Engine::Unroll, Engine::Jsat, Engine::Oracle, Engine::Qbf,
                         Engine::Square}) {
            if (e == Engine::Square && (k < 2 || (k & (k - 1)) != 0)) continue;
            RunSpec spec;
            spec.engine = e;
            spec.bound = k;
            RunOutcome out = run_on(sys, spec);
            bool got = out.result.verdict == Verdict::Reachable;
            if (got != expect || out.result.verdict == Verdict::ResourceLimit) {
                pass = false;
                detail << engine_name(e) << "@k=" << k << " wrong; ";
            }
        }
    }
    report("counter golden: reachable exactly at k in {3,7}", pass, detail.str());
}

// ---------------------------------------------------------------------
// Criterion 6: satcore soundness and completeness against exhaustive
// enumeration on 200 random CNFs.
void criterion_satcore() {
    std::mt19937_64 rng(77001);
    int checked = 0, wrong = 0, bad_model = 0;
    for (int i = 0; i < 200; ++i) {
        int nv = 8 + static_cast<int>(rng() % 13);  // 8..20 variables
        double ratio = 3.0 + (rng() % 21) * 0.1;    // 3.0..5.0
        Cnf cnf = random_cnf(rng, nv, static_cast<int>(nv * ratio));
        bool expected = brute_force_sat(cnf);
        Solver s;
        s.add_cnf(cnf);
        SolveStatus st = s.solve();
        ++checked;
        if ((st == SolveStatus::Sat) != expected || st == SolveStatus::Limit) ++wrong;
        if (st == SolveStatus::Sat) {
            std::vector<bool> model(nv + 1, false);
            for (int v = 1; v <= nv; ++v) model[v] = s.model_value(v);
            if (!eval_matrix(cnf, model)) ++bad_model;
        }
    }
    std::ostringstream d;
    d << checked << " instances, " << wrong << " wrong verdicts, " << bad_model << " bad models";
    report("satcore agrees with exhaustive enumeration", wrong == 0 && bad_model == 0 && checked == 200,
           d.str());
}

// ---------------------------------------------------------------------
// Criterion 7: serialization round-trips and byte-exact goldens.
void criterion_roundtrips() {
    std::mt19937_64 rng(88001);
    int wrong = 0;
    for (int i = 0; i < 100; ++i) {
        Cnf cnf = random_cnf(rng, 2 + rng() % 24, rng() % 50, 1 + rng() % 5);
        Cnf back = parse_dimacs(write_dimacs(cnf));
        if (back.num_vars != cnf.num_vars || back.clauses != cnf.clauses) ++wrong;
    }
    for (int i = 0; i < 100; ++i) {
        int nv = 4 + rng() % 16;
        Qbf q;
        q.matrix = random_cnf(rng, nv, 5 + rng() % 20);
        int v = 1;
        while (v <= nv) {
            QuantBlock b{rng() % 2 ? Quant::Exists : Quant::Forall, {}};
            for (int j = 0; j < 1 + static_cast<int>(rng() % 4) && v <= nv; ++j)
                b.vars.push_back(v++);
            q.prefix.push_back(std::move(b));
        }
        Qbf norm = q.normalized();
        Qbf back = parse_qdimacs(write_qdimacs(q));
        bool same = back.matrix.clauses == q.matrix.clauses &&
                    back.prefix.size() == norm.prefix.size();
        for (size_t bi = 0; same && bi < norm.prefix.size(); ++bi)
            same = back.prefix[bi].q == norm.prefix[bi].q &&
                   back.prefix[bi].vars == norm.prefix[bi].vars;
        if (!same) ++wrong;
    }

    bool golden = write_dimacs(Cnf{2, {{1, -2}}}) == "p cnf 2 1\n1 -2 0\n" &&
                  write_dimacs(Cnf{1, {}}) == "p cnf 1 0\n" &&
                  write_dimacs(Cnf{3, {{1}, {-1}}}) == "p cnf 3 2\n1 0\n-1 0\n";
    Qbf g1;
    g1.matrix = Cnf{3, {{1, 2, 3}}};
    g1.prefix = {{Quant::Exists, {1}}, {Quant::Forall, {2}}, {Quant::Exists, {3}}};
    golden = golden && write_qdimacs(g1) == "p cnf 3 1\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n";
    Qbf g2;
    g2.matrix = Cnf{1, {{1}}};
    golden = golden && write_qdimacs(g2) == "p cnf 1 1\ne 1 0\n1 0\n";

    std::ostringstream d;
    d << "200 round-trips, " << wrong << " mismatches, goldens " << (golden ? "exact" : "broken");
    report("dimacs/qdimacs round-trips and goldens", wrong == 0 && golden, d.str());
}

// Runs the CLI binary with the given arguments; returns its exit code
// (stdout silenced), or -1 on spawn trouble.
int run_cli(const char* bin, const std::vector<std::string>& args) {
    pid_t pid = fork();
    if (pid == 0) {
        FILE* devnull = std::freopen("/dev/null", "w", stdout);
        (void)devnull;
        std::vector<char*> argv{const_cast<char*>(bin)};
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        execv(bin, argv.data());
        _exit(127);
    }
    if (pid < 0) return -1;
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Supplementary: the exit-code contract of the CLI, end to end.
void cli_contract() {
    const char* bin = std::getenv("QBMC_BIN");
    if (!bin) {
        report("harness CLI exit codes", false, "QBMC_BIN not set");
        return;
    }
    const std::string model = "/tmp/qbmc_acceptance_counter.aag";
    {
        std::ofstream out(model, std::ios::binary);
        out << counter_aag();
    }
    const std::string witness = "/tmp/qbmc_acceptance_witness.txt";
    std::remove(witness.c_str());

    bool pass = true;
    std::ostringstream d;
    auto expect = [&](int want, const std::vector<std::string>& args) {
        int got = run_cli(bin, args);
        if (got != want) {
            pass = false;
            d << "want " << want << " got " << got << "; ";
        }
    };
    expect(10, {"--engine", "unroll", "--bound", "3", "--witness", witness, model});
    expect(20, {"--engine", "jsat", "--bound", "2", model});
    expect(1, {"--engine", "square", "--bound", "3", "--exact", model});
    expect(1, {"--engine", "nosuch", "--bound", "1", model});
    expect(1, {"/nonexistent/model.aag"});

    // the witness written above has four states and replays
    std::ifstream win(witness);
    std::string text((std::istreambuf_iterator<char>(win)), std::istreambuf_iterator<char>());
    if (text != "k=3\n00\n10\n01\n11\n") {
        pass = false;
        d << "bad witness bytes; ";
    }
    report("harness CLI exit codes and witness", pass, d.str());
}

// ---------------------------------------------------------------------
// Criterion 8: resource-limit plumbing through the CLI on an adversarial
// instance: a phase-transition 3-CNF with 300 variables behind a bound-1
// unrolling. --timeout 1 must exit 0 within 2 seconds of wall time.
void criterion_limit_plumbing() {
    const char* bin = std::getenv("QBMC_BIN");
    if (!bin) {
        report("resource-limit plumbing (CLI)", false, "QBMC_BIN not set");
        return;
    }
    const std::string model_path = "/tmp/qbmc_acceptance_pt.aag";
    {
        std::ofstream out(model_path, std::ios::binary);
        out << write_aag(phase_transition_model(1, 300));
    }

    const auto t0 = Clock::now();
    pid_t pid = fork();
    if (pid == 0) {
        // child: silence stdout, run the CLI with a one-second budget
        FILE* devnull = std::freopen("/dev/null", "w", stdout);
        (void)devnull;
        execl(bin, bin, "--engine", "unroll", "--bound", "1", "--timeout", "1",
              model_path.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    if (pid < 0) {
        report("resource-limit plumbing (CLI)", false, "fork failed");
        return;
    }
    int status = 0;
    waitpid(pid, &status, 0);
    double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ostringstream d;
    d << "exit " << code << " after " << wall << "s";
    report("resource-limit plumbing (CLI --timeout 1 exits 0 within 2s)",
           code == 0 && wall < 2.0, d.str());
}

}  // namespace

int main() {
    criterion_cross_engine();
    criterion_qbf_semantics();
    criterion_structural();
    criterion_jsat_space();
    criterion_counter_golden();
    criterion_satcore();
    criterion_roundtrips();
    cli_contract();
    criterion_limit_plumbing();
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
