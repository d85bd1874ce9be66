#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qbmc/aiger.hpp"

namespace qbmc {

enum class Verdict { Reachable, UnreachableAtBound, ResourceLimit };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Reachable: return "REACHABLE";
        case Verdict::UnreachableAtBound: return "UNREACHABLE";
        default: return "RESOURCE-LIMIT";
    }
}

struct Limits {
    double timeout_seconds = 300.0;
    uint64_t mem_bytes = uint64_t(1) << 30;
};

struct EngineStats {
    int64_t vars = 0;
    int64_t clauses = 0;  // encoding clauses, before learning
    int64_t decisions = 0;
    int64_t propagations = 0;
    int64_t conflicts = 0;
    int64_t learned = 0;
    int64_t sat_calls = 0;
    int64_t window_shifts = 0;
    int64_t pops = 0;
    int64_t blocks = 0;
    uint64_t peak_bytes = 0;
};

struct BmcResult {
    Verdict verdict = Verdict::UnreachableAtBound;
    std::optional<Trace> trace;  // present iff verdict == Reachable
    EngineStats stats;
    double seconds = 0.0;
};

}  // namespace qbmc
