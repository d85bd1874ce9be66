#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qbmc/harness.hpp"
#include "qbmc/oracle.hpp"

using namespace qbmc;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// "K" or "A..B".
bool parse_bounds(const std::string& s, std::vector<int>& out) {
    auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            out.push_back(std::stoi(s));
        } else {
            int a = std::stoi(s.substr(0, dots));
            int b = std::stoi(s.substr(dots + 2));
            if (a < 0 || b < a) return false;
            for (int k = a; k <= b; ++k) out.push_back(k);
        }
    } catch (const std::exception&) {
        return false;
    }
    return out.empty() ? false : out.front() >= 0;
}

void print_stats(const BmcResult& r) {
    std::cout << "stats: vars=" << r.stats.vars << " clauses=" << r.stats.clauses
              << " sat-calls=" << r.stats.sat_calls << " decisions=" << r.stats.decisions
              << " conflicts=" << r.stats.conflicts;
    if (r.stats.window_shifts || r.stats.pops || r.stats.blocks)
        std::cout << " shifts=" << r.stats.window_shifts << " pops=" << r.stats.pops
                  << " blocks=" << r.stats.blocks;
    std::cout << " time=" << r.seconds << "s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qbmc: bounded reachability via SAT unrolling, QBF encodings and "
                 "a sliding-window decision procedure over AIGER models"};

    std::vector<std::string> models;
    std::string engine_arg = "unroll";
    std::string bound_arg = "0";
    bool exact = false, upto = false, compare_mode = false;
    double timeout = 300.0;
    uint64_t mem_limit = uint64_t(1) << 30;
    std::string emit_dimacs, emit_qdimacs, witness, trace_search;
    uint64_t seed = 1;

    app.add_option("models", models, "AIGER model files ('random:N' for a seeded corpus)");
    app.add_option("--engine", engine_arg, "unroll|qbf|square|jsat|oracle (comma list with --compare)");
    app.add_option("--bound", bound_arg, "bound K, or range A..B with --compare");
    app.add_flag("--exact", exact, "reachability in exactly K steps (default)");
    app.add_flag("--upto", upto, "reachability in at most K steps");
    app.add_option("--timeout", timeout, "time limit in seconds")->default_val(300.0);
    app.add_option("--mem-limit", mem_limit, "memory limit in bytes")->default_val(uint64_t(1) << 30);
    app.add_option("--emit-dimacs", emit_dimacs, "write the propositional encoding");
    app.add_option("--emit-qdimacs", emit_qdimacs, "write the quantified encoding");
    app.add_option("--witness", witness, "write the reachability witness");
    app.add_option("--trace-search", trace_search, "stream the jsat search log");
    app.add_option("--seed", seed, "seed for generated corpora (env QBMC_SEED overrides)");
    app.add_flag("--compare", compare_mode, "run engines side by side and diff the verdicts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (exact && upto) {
        std::cerr << "error: --exact and --upto are mutually exclusive\n";
        return 1;
    }
    if (const char* env = std::getenv("QBMC_SEED")) {
        try {
            seed = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "error: bad QBMC_SEED value\n";
            return 1;
        }
    }

    std::vector<int> bounds;
    if (!parse_bounds(bound_arg, bounds)) {
        std::cerr << "error: bad --bound '" << bound_arg << "'\n";
        return 1;
    }

    try {
        if (compare_mode) {
            CompareOptions opts;
            opts.bounds = bounds;
            opts.limits.timeout_seconds = timeout;
            opts.limits.mem_bytes = mem_limit;
            for (const std::string& name : split_csv(engine_arg)) {
                auto e = engine_from_name(name);
                if (!e) {
                    std::cerr << "error: unknown engine '" << name << "'\n";
                    return 1;
                }
                opts.engines.push_back(*e);
            }

            std::vector<std::pair<std::string, TransitionSystem>> systems;
            for (const std::string& path : models) {
                if (path.rfind("random:", 0) == 0) {
                    int count = std::stoi(path.substr(7));
                    for (auto& entry : make_corpus(seed, count)) systems.push_back(std::move(entry));
                    continue;
                }
                std::ifstream in(path, std::ios::binary);
                if (!in) {
                    std::cerr << "error: cannot open " << path << "\n";
                    return 1;
                }
                std::stringstream buf;
                buf << in.rdbuf();
                systems.emplace_back(path, parse_aiger(buf.str()));
            }

            CompareReport report = compare(systems, opts);
            std::cout << report.table;
            std::cout << "cells=" << report.cells.size() << " decided=" << report.decided_cells
                      << " disagreements=" << report.disagreements << "\n";
            return report.ok() ? 0 : 3;
        }

        if (models.size() != 1) {
            std::cerr << "error: exactly one model file expected\n";
            return 1;
        }
        auto engine = engine_from_name(engine_arg);
        if (!engine) {
            std::cerr << "error: unknown engine '" << engine_arg << "'\n";
            return 1;
        }
        if (bounds.size() != 1) {
            std::cerr << "error: a single --bound is expected without --compare\n";
            return 1;
        }

        RunSpec spec;
        spec.model_path = models[0];
        spec.engine = *engine;
        spec.bound = bounds[0];
        spec.semantics = upto ? Semantics::UpTo : Semantics::Exact;
        spec.limits.timeout_seconds = timeout;
        spec.limits.mem_bytes = mem_limit;
        spec.emit_dimacs = emit_dimacs;
        spec.emit_qdimacs = emit_qdimacs;
        spec.witness_path = witness;
        spec.trace_search_path = trace_search;
        spec.seed = seed;

        RunOutcome out = run(spec);
        if (!out.note.empty()) std::cout << "note: " << out.note << "\n";
        if (out.exit_code == 1) {
            std::cerr << "error: invalid run\n";
            return 1;
        }
        std::cout << verdict_name(out.result.verdict) << " engine=" << engine_name(spec.engine)
                  << " bound=" << out.effective_bound
                  << (spec.semantics == Semantics::UpTo ? " (upto)" : "") << "\n";
        print_stats(out.result);
        if (out.result.trace && !witness.empty())
            std::cout << "witness: " << witness << "\n";
        return out.exit_code;
    } catch (const AigerError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
