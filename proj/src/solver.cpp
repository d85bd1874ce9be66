#include "qbmc/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <cstring>
#include <stdexcept>

namespace qbmc {

Solver::Solver(SolverOptions opts) : opts_(opts) {
    assign_.push_back(0);  // slot 0 unused; variables are 1-based
    level_.push_back(0);
    reason_.push_back(kCRefUndef);
    polarity_.push_back(1);
    activity_.push_back(0.0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    level_stamp_.push_back(0);
    watches_.resize(2);
}

int Solver::new_var() {
    ++nvars_;
    assign_.push_back(0);
    level_.push_back(0);
    reason_.push_back(kCRefUndef);
    polarity_.push_back(1);
    activity_.push_back(0.0);
    heap_pos_.push_back(-1);
    seen_.push_back(0);
    level_stamp_.push_back(0);
    watches_.resize(2 * static_cast<size_t>(nvars_) + 2);
    heap_insert(nvars_);
    return nvars_;
}

void Solver::ensure_vars(int n) {
    while (nvars_ < n) new_var();
}

void Solver::check_var(Lit l) const {
    if (l == 0 || lit_var(l) > nvars_)
        throw std::out_of_range("literal " + std::to_string(l) + " references an undeclared variable");
}

// ---------------------------------------------------------------- clauses

Solver::CRef Solver::alloc_clause(std::span<const Lit> lits, bool learnt, uint32_t lbd) {
    CRef cr = static_cast<CRef>(ca_.size());
    ca_.push_back(static_cast<uint32_t>(lits.size()));
    ca_.push_back((learnt ? 1u : 0u) | (std::min<uint32_t>(lbd, 0xFFFFFFu) << 8));
    for (Lit l : lits) {
        uint32_t u;
        std::memcpy(&u, &l, 4);
        ca_.push_back(u);
    }
    return cr;
}

void Solver::attach_clause(CRef cr) {
    Cls c = cls(cr);
    assert(c.size() >= 2);
    watches_[widx(c.lits()[0])].push_back({cr, c.lits()[1]});
    watches_[widx(c.lits()[1])].push_back({cr, c.lits()[0]});
    total_watchers_ += 2;
}

void Solver::detach_clause(CRef cr) {
    Cls c = cls(cr);
    for (int i = 0; i < 2; ++i) {
        auto& ws = watches_[widx(c.lits()[i])];
        for (size_t k = 0; k < ws.size(); ++k)
            if (ws[k].cref == cr) {
                ws[k] = ws.back();
                ws.pop_back();
                break;
            }
    }
    total_watchers_ -= 2;
}

void Solver::kill_clause(CRef cr) {
    Cls c = cls(cr);
    if (c.dead()) return;
    detach_clause(cr);
    c.set_dead();
    if (c.learnt()) {
        --live_learnt_;
        ++stats_.removed;
    } else {
        --live_orig_;
    }
}

bool Solver::add_clause(std::span<const Lit> lits) {
    assert(decision_level() == 0);
    for (Lit l : lits) check_var(l);
    if (!ok_) return false;

    // Normalize: sort, drop duplicates and level-0 false literals, detect
    // tautologies and level-0 satisfied clauses.
    std::vector<Lit> c(lits.begin(), lits.end());
    std::sort(c.begin(), c.end(), [](Lit a, Lit b) {
        return lit_var(a) != lit_var(b) ? lit_var(a) < lit_var(b) : a < b;
    });
    std::vector<Lit> out;
    Lit prev = 0;
    for (Lit l : c) {
        if (l == prev) continue;
        if (l == -prev || value(l) == 1) return true;  // tautology or satisfied
        if (value(l) == -1) continue;                  // falsified at level 0
        out.push_back(l);
        prev = l;
    }

    if (out.empty()) {
        ok_ = false;
        return false;
    }
    if (out.size() == 1) {
        unchecked_enqueue(out[0], kCRefUndef);
        if (propagate() != kCRefUndef) ok_ = false;
        return ok_;
    }
    CRef cr = alloc_clause(out, false, 0);
    clauses_.push_back(cr);
    ++live_orig_;
    attach_clause(cr);
    return true;
}

bool Solver::add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
}

void Solver::add_cnf(const Cnf& cnf) {
    ensure_vars(cnf.num_vars);
    for (const auto& clause : cnf.clauses) add_clause(clause);
}

// ------------------------------------------------------------ propagation

void Solver::unchecked_enqueue(Lit p, CRef from) {
    int v = lit_var(p);
    assert(assign_[v] == 0);
    assign_[v] = lit_sign(p) ? -1 : 1;
    level_[v] = decision_level();
    reason_[v] = decision_level() == 0 ? kCRefUndef : from;  // facts need no reason
    trail_.push_back(p);
}

Solver::CRef Solver::propagate() {
    CRef confl = kCRefUndef;
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        ++stats_.propagations;
        Lit false_lit = -p;
        auto& ws = watches_[widx(false_lit)];
        size_t i = 0, j = 0;
        while (i < ws.size()) {
            Watcher w = ws[i++];
            if (value(w.blocker) == 1) {
                ws[j++] = w;
                continue;
            }
            Cls c = cls(w.cref);
            Lit* lits = c.lits();
            if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
            assert(lits[1] == false_lit);
            Lit first = lits[0];
            if (first != w.blocker && value(first) == 1) {
                ws[j++] = {w.cref, first};
                continue;
            }
            bool moved = false;
            for (uint32_t k = 2; k < c.size(); ++k)
                if (value(lits[k]) != -1) {
                    std::swap(lits[1], lits[k]);
                    watches_[widx(lits[1])].push_back({w.cref, first});
                    moved = true;
                    break;
                }
            if (moved) continue;  // dropped from this watch list
            ws[j++] = {w.cref, first};
            if (value(first) == -1) {
                confl = w.cref;
                qhead_ = trail_.size();
                while (i < ws.size()) ws[j++] = ws[i++];
            } else {
                unchecked_enqueue(first, w.cref);
            }
        }
        ws.resize(j);
        if (confl != kCRefUndef) break;
    }
    return confl;
}

// --------------------------------------------------------------- analysis

void Solver::analyze(CRef confl, std::vector<Lit>& out_learnt, int& out_btlevel,
                     uint32_t& out_lbd) {
    int path_count = 0;
    Lit p = 0;
    out_learnt.push_back(0);  // slot for the asserting literal
    int index = static_cast<int>(trail_.size()) - 1;

    do {
        assert(confl != kCRefUndef);
        Cls c = cls(confl);
        for (uint32_t k = (p == 0 ? 0 : 1); k < c.size(); ++k) {
            Lit q = c.lits()[k];
            int v = lit_var(q);
            if (!seen_[v] && level_[v] > 0) {
                bump_var(v);
                seen_[v] = 1;
                toclear_.push_back(v);
                if (level_[v] >= decision_level())
                    ++path_count;
                else
                    out_learnt.push_back(q);
            }
        }
        while (!seen_[lit_var(trail_[index--])]) {}
        p = trail_[index + 1];
        confl = reason_[lit_var(p)];
        seen_[lit_var(p)] = 0;
        --path_count;
    } while (path_count > 0);
    out_learnt[0] = -p;

    // Cheap minimization: drop literals dominated by the rest of the clause.
    size_t j = 1;
    for (size_t i = 1; i < out_learnt.size(); ++i) {
        int v = lit_var(out_learnt[i]);
        if (reason_[v] == kCRefUndef) {
            out_learnt[j++] = out_learnt[i];
        } else {
            Cls rc = cls(reason_[v]);
            bool keep = false;
            for (uint32_t k = 1; k < rc.size(); ++k) {
                int rv = lit_var(rc.lits()[k]);
                if (!seen_[rv] && level_[rv] > 0) {
                    keep = true;
                    break;
                }
            }
            if (keep) out_learnt[j++] = out_learnt[i];
        }
    }
    out_learnt.resize(j);

    if (out_learnt.size() == 1) {
        out_btlevel = 0;
    } else {
        size_t max_i = 1;
        for (size_t i = 2; i < out_learnt.size(); ++i)
            if (level_[lit_var(out_learnt[i])] > level_[lit_var(out_learnt[max_i])]) max_i = i;
        std::swap(out_learnt[1], out_learnt[max_i]);
        out_btlevel = level_[lit_var(out_learnt[1])];
    }

    ++stamp_;
    out_lbd = 0;
    for (Lit l : out_learnt) {
        uint32_t lev = static_cast<uint32_t>(level_[lit_var(l)]);
        if (level_stamp_.size() <= lev) level_stamp_.resize(lev + 1, 0);
        if (level_stamp_[lev] != stamp_) {
            level_stamp_[lev] = stamp_;
            ++out_lbd;
        }
    }

    for (int v : toclear_) seen_[v] = 0;
    toclear_.clear();
}

// Marks the subset of assumptions responsible for forcing -p.
void Solver::analyze_final(Lit p) {
    conflict_.clear();
    conflict_.push_back(p);
    if (decision_level() == 0) return;

    seen_[lit_var(p)] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
        int v = lit_var(trail_[i]);
        if (!seen_[v]) continue;
        if (reason_[v] == kCRefUndef) {
            assert(level_[v] > 0);
            conflict_.push_back(trail_[i]);  // a decision here is always an assumption
        } else {
            Cls c = cls(reason_[v]);
            for (uint32_t k = 1; k < c.size(); ++k)
                if (level_[lit_var(c.lits()[k])] > 0) seen_[lit_var(c.lits()[k])] = 1;
        }
        seen_[v] = 0;
    }
    seen_[lit_var(p)] = 0;
}

void Solver::cancel_until(int level) {
    if (decision_level() <= level) return;
    for (int c = static_cast<int>(trail_.size()) - 1; c >= trail_lim_[level]; --c) {
        int v = lit_var(trail_[c]);
        if (opts_.phase_saving) polarity_[v] = lit_sign(trail_[c]) ? 1 : 0;
        assign_[v] = 0;
        reason_[v] = kCRefUndef;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    qhead_ = trail_lim_[level];
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
}

// ------------------------------------------------------------- heuristics

void Solver::bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (int x = 1; x <= nvars_; ++x) activity_[x] *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_sift_up(heap_pos_[v]);
}

void Solver::decay_activities() { var_inc_ /= opts_.var_decay; }

bool Solver::heap_less(int a, int b) const {
    return activity_[a] != activity_[b] ? activity_[a] > activity_[b] : a < b;
}

void Solver::heap_insert(int v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_sift_up(heap_pos_[v]);
}

void Solver::heap_sift_up(int i) {
    int v = heap_[i];
    while (i > 0) {
        int parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = i;
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

void Solver::heap_sift_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
        int child = 2 * i + 1;
        if (child >= n) break;
        if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) ++child;
        if (!heap_less(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = i;
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

int Solver::heap_pop() {
    int v = heap_[0];
    heap_pos_[v] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_sift_down(0);
    }
    return v;
}

Lit Solver::pick_branch_lit() {
    while (!heap_.empty()) {
        int v = heap_pop();
        if (assign_[v] == 0) return polarity_[v] ? -v : v;
    }
    return 0;
}

// ------------------------------------------------------------------ limits

bool Solver::time_expired() const {
    if (!deadline_) return false;
    if ((++check_counter_ & 63) != 0) return false;
    return std::chrono::steady_clock::now() > *deadline_;
}

bool Solver::deadline_passed() const {
    return deadline_ && std::chrono::steady_clock::now() > *deadline_;
}

uint64_t Solver::db_bytes() const {
    return ca_.capacity() * 4 + total_watchers_ * sizeof(Watcher) +
           static_cast<uint64_t>(nvars_) * 80 + trail_.capacity() * 4;
}

bool Solver::over_mem_limit() const { return mem_limit_ != 0 && db_bytes() > mem_limit_; }

// ------------------------------------------------------------------ search

namespace {
double luby(double y, int x) {
    int size, seq;
    for (size = 1, seq = 0; size < x + 1; ++seq, size = 2 * size + 1) {}
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::pow(y, seq);
}
}  // namespace

Solver::Internal Solver::search(int conflict_budget) {
    int conflicts_here = 0;
    std::vector<Lit> learnt;
    for (;;) {
        CRef confl = propagate();
        if (confl != kCRefUndef) {
            ++stats_.conflicts;
            ++conflicts_here;
            if (decision_level() == 0) {
                ok_ = false;
                return Internal::Unsat;
            }
            learnt.clear();
            int bt;
            uint32_t lbd;
            analyze(confl, learnt, bt, lbd);
            cancel_until(bt);
            CRef cr = kCRefUndef;
            if (learnt.size() > 1) {
                cr = alloc_clause(learnt, true, lbd);
                learnts_.push_back(cr);
                ++live_learnt_;
                ++stats_.learned;
                attach_clause(cr);
            }
            unchecked_enqueue(learnt[0], cr);
            decay_activities();
            if ((stats_.conflicts & 255) == 0 && (over_mem_limit() || deadline_passed()))
                return Internal::Limit;
        } else {
            if (conflicts_here >= conflict_budget) {
                cancel_until(0);
                ++stats_.restarts;
                return Internal::Restart;
            }
            if (time_expired()) return Internal::Limit;
            if (live_learnt_ >= reduce_threshold_) reduce_db();

            Lit next = 0;
            while (decision_level() < static_cast<int>(assumptions_.size())) {
                Lit p = assumptions_[decision_level()];
                if (value(p) == 1) {
                    new_decision_level();  // already satisfied; placeholder level
                } else if (value(p) == -1) {
                    analyze_final(p);
                    return Internal::Unsat;
                } else {
                    next = p;
                    break;
                }
            }
            if (next == 0) {
                next = pick_branch_lit();
                if (next == 0) return Internal::Sat;  // every variable assigned
                ++stats_.decisions;
            }
            new_decision_level();
            unchecked_enqueue(next, kCRefUndef);
        }
    }
}

void Solver::reduce_db() {
    // Keep roughly half of the learnts, preferring low LBD, then short.
    std::vector<CRef> live;
    live.reserve(live_learnt_);
    for (CRef cr : learnts_)
        if (!cls(cr).dead()) live.push_back(cr);
    std::sort(live.begin(), live.end(), [&](CRef a, CRef b) {
        const Cls ca_cls = cls(a), cb = cls(b);
        if (ca_cls.lbd() != cb.lbd()) return ca_cls.lbd() > cb.lbd();
        if (ca_cls.size() != cb.size()) return ca_cls.size() > cb.size();
        return a > b;
    });
    size_t target = live.size() / 2;
    size_t killed = 0;
    for (CRef cr : live) {
        if (killed >= target) break;
        Cls c = cls(cr);
        if (c.size() <= 2) continue;
        int v0 = lit_var(c.lits()[0]);
        bool locked = reason_[v0] == cr && value(c.lits()[0]) == 1;
        if (locked) continue;
        kill_clause(cr);
        ++killed;
    }
    learnts_.erase(std::remove_if(learnts_.begin(), learnts_.end(),
                                  [&](CRef cr) { return cls(cr).dead(); }),
                   learnts_.end());
    reduce_threshold_ = reduce_threshold_ + reduce_threshold_ / 2;
}

SolveStatus Solver::solve(std::span<const Lit> assumptions) {
    ++stats_.sat_calls;
    conflict_.clear();
    model_.clear();
    for (Lit p : assumptions) check_var(p);
    if (!ok_) return SolveStatus::Unsat;
    assert(decision_level() == 0);
    assumptions_.assign(assumptions.begin(), assumptions.end());

    Internal res;
    int restarts = 0;
    for (;;) {
        int budget = opts_.restarts
                         ? static_cast<int>(luby(2.0, restarts) * opts_.luby_unit)
                         : std::numeric_limits<int>::max();
        res = search(budget);
        if (res != Internal::Restart) break;
        ++restarts;
    }
    if (res == Internal::Sat) model_.assign(assign_.begin(), assign_.end());
    cancel_until(0);
    assumptions_.clear();
    if (!opts_.learning) clear_learnts();
    switch (res) {
        case Internal::Sat: return SolveStatus::Sat;
        case Internal::Unsat: return SolveStatus::Unsat;
        default: return SolveStatus::Limit;
    }
}

SolveStatus Solver::solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
}

bool Solver::model_value(Lit l) const {
    assert(!model_.empty() && lit_var(l) < static_cast<int>(model_.size()));
    int8_t a = model_[lit_var(l)];
    assert(a != 0);
    return lit_sign(l) ? a < 0 : a > 0;
}

void Solver::clear_learnts() {
    assert(decision_level() == 0);
    for (CRef cr : learnts_)
        if (!cls(cr).dead()) kill_clause(cr);
    learnts_.clear();
}

std::vector<std::vector<Lit>> Solver::learnt_clauses() const {
    std::vector<std::vector<Lit>> out;
    for (CRef cr : learnts_) {
        const Cls c = cls(cr);
        if (c.dead()) continue;
        out.emplace_back(c.lits(), c.lits() + c.size());
    }
    return out;
}

std::string Solver::dump_dimacs(std::string_view comment) const {
    size_t units = 0;
    for (size_t i = 0; i < trail_.size(); ++i)
        if (level_[lit_var(trail_[i])] == 0) ++units;
    std::string out;
    if (!comment.empty()) {
        out += "c ";
        out += comment;
        out += '\n';
    }
    out += "p cnf " + std::to_string(nvars_) + " " +
           std::to_string(units + live_orig_ + live_learnt_) + "\n";
    for (size_t i = 0; i < trail_.size(); ++i)
        if (level_[lit_var(trail_[i])] == 0)
            out += std::to_string(trail_[i]) + " 0\n";
    auto emit = [&](const std::vector<CRef>& refs) {
        for (CRef cr : refs) {
            const Cls c = cls(cr);
            if (c.dead()) continue;
            for (uint32_t k = 0; k < c.size(); ++k) out += std::to_string(c.lits()[k]) + " ";
            out += "0\n";
        }
    };
    emit(clauses_);
    emit(learnts_);
    return out;
}

}  // namespace qbmc
