#include "qbmc/cnf.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <set>

namespace qbmc {

Lit VarMap::fresh(VarRole role, int group, int index) {
    assert(group >= 0 && index >= 0);
    uint64_t k = key(role, group, index);
    assert(!index_.count(k) && "role slot allocated twice");
    info_.push_back(VarInfo{role, group, index});
    int v = static_cast<int>(info_.size());
    index_.emplace(k, v);
    return v;
}

int VarMap::lookup(VarRole role, int group, int index) const {
    auto it = index_.find(key(role, group, index));
    return it == index_.end() ? 0 : it->second;
}

const VarInfo& VarMap::info(int var) const {
    assert(var >= 1 && var <= num_vars());
    return info_[var - 1];
}

std::vector<int> VarMap::block(VarRole role, int group) const {
    std::vector<int> out;
    for (int v = 1; v <= num_vars(); ++v)
        if (info_[v - 1].role == role && info_[v - 1].group == group) out.push_back(v);
    return out;
}

int VarMap::count_role(VarRole role) const {
    int n = 0;
    for (const auto& vi : info_)
        if (vi.role == role) ++n;
    return n;
}

std::vector<int> VarMap::groups(VarRole role) const {
    std::set<int> gs;
    for (const auto& vi : info_)
        if (vi.role == role) gs.insert(vi.group);
    return {gs.begin(), gs.end()};
}

uint64_t VarMap::key(VarRole role, int group, int index) {
    assert(group >= 0 && group < (1 << 28) && index >= 0 && index < (1 << 28));
    return (uint64_t(uint8_t(role)) << 56) | (uint64_t(group) << 28) | uint64_t(index);
}

bool eval_matrix(const Cnf& cnf, const std::vector<bool>& assignment) {
    assert(static_cast<int>(assignment.size()) >= cnf.num_vars + 1);
    for (const auto& clause : cnf.clauses) {
        bool sat = false;
        for (Lit l : clause) {
            if (assignment[lit_var(l)] != lit_sign(l)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

size_t Qbf::num_universals() const {
    size_t n = 0;
    for (const auto& b : prefix)
        if (b.q == Quant::Forall) n += b.vars.size();
    return n;
}

Qbf Qbf::normalized() const {
    Qbf out;
    out.matrix = matrix;

    std::set<int> bound;
    for (const auto& b : prefix) bound.insert(b.vars.begin(), b.vars.end());

    std::set<int> free;
    for (const auto& clause : matrix.clauses)
        for (Lit l : clause)
            if (!bound.count(lit_var(l))) free.insert(lit_var(l));

    std::vector<QuantBlock> blocks;
    if (!free.empty()) blocks.push_back({Quant::Exists, {free.begin(), free.end()}});
    for (const auto& b : prefix) {
        if (b.vars.empty()) continue;
        if (!blocks.empty() && blocks.back().q == b.q) {
            auto& dst = blocks.back().vars;
            dst.insert(dst.end(), b.vars.begin(), b.vars.end());
        } else {
            blocks.push_back(b);
        }
    }
    out.prefix = std::move(blocks);
    return out;
}

namespace {

void append_clause_line(std::string& out, const std::vector<Lit>& clause) {
    for (Lit l : clause) {
        out += std::to_string(l);
        out += ' ';
    }
    out += "0\n";
}

}  // namespace

std::string write_dimacs(const Cnf& cnf, std::string_view comment) {
    std::string out;
    if (!comment.empty()) {
        out += "c ";
        out += comment;
        out += '\n';
    }
    out += "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
    for (const auto& clause : cnf.clauses) append_clause_line(out, clause);
    return out;
}

std::string write_qdimacs(const Qbf& qbf, std::string_view comment) {
    Qbf q = qbf.normalized();
    std::string out;
    if (!comment.empty()) {
        out += "c ";
        out += comment;
        out += '\n';
    }
    out += "p cnf " + std::to_string(q.matrix.num_vars) + " " +
           std::to_string(q.matrix.clauses.size()) + "\n";
    for (const auto& b : q.prefix) {
        out += (b.q == Quant::Exists) ? 'e' : 'a';
        for (int v : b.vars) {
            out += ' ';
            out += std::to_string(v);
        }
        out += " 0\n";
    }
    for (const auto& clause : q.matrix.clauses) append_clause_line(out, clause);
    return out;
}

namespace {

struct TokenStream {
    std::string_view text;
    size_t pos = 0;
    int line = 1;

    bool next(std::string_view& tok) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' ||
                                     text[pos] == '\t' || text[pos] == '\r')) {
            if (text[pos] == '\n') ++line;
            ++pos;
        }
        if (pos >= text.size()) return false;
        size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\n' &&
               text[pos] != '\t' && text[pos] != '\r')
            ++pos;
        tok = text.substr(start, pos - start);
        return true;
    }

    // Skips the rest of the current line (for comments).
    void skip_line() {
        while (pos < text.size() && text[pos] != '\n') ++pos;
    }

    long long next_int() {
        std::string_view tok;
        if (!next(tok)) throw FormatError(line, "unexpected end of input");
        long long v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw FormatError(line, "expected integer, got '" + std::string(tok) + "'");
        return v;
    }
};

// Parses "p cnf V C" after comments; leaves the stream at the first body token.
std::pair<int, long long> parse_problem_line(TokenStream& ts) {
    std::string_view tok;
    for (;;) {
        if (!ts.next(tok)) throw FormatError(ts.line, "missing problem line");
        if (tok == "c") {
            ts.skip_line();
            continue;
        }
        break;
    }
    if (tok != "p") throw FormatError(ts.line, "expected 'p cnf' header");
    const int header_line = ts.line;
    if (!ts.next(tok) || tok != "cnf" || ts.line != header_line)
        throw FormatError(ts.line, "expected 'p cnf' header");
    long long nv = ts.next_int();
    long long nc = ts.next_int();
    if (ts.line != header_line) throw FormatError(header_line, "truncated problem line");
    if (nv < 0 || nc < 0) throw FormatError(ts.line, "negative counts in header");
    return {static_cast<int>(nv), nc};
}

void parse_clauses(TokenStream& ts, Cnf& cnf, long long expected) {
    std::vector<Lit> cur;
    long long seen = 0;
    long long v;
    std::string_view tok;
    for (;;) {
        size_t save_pos = ts.pos;
        int save_line = ts.line;
        if (!ts.next(tok)) break;
        if (tok == "c") {
            ts.skip_line();
            continue;
        }
        ts.pos = save_pos;
        ts.line = save_line;
        v = ts.next_int();
        if (v == 0) {
            cnf.add(cur);
            cur.clear();
            ++seen;
            continue;
        }
        if (lit_var(static_cast<Lit>(v)) > cnf.num_vars)
            throw FormatError(ts.line, "literal out of range: " + std::to_string(v));
        cur.push_back(static_cast<Lit>(v));
    }
    if (!cur.empty()) throw FormatError(ts.line, "clause not 0-terminated");
    if (seen != expected)
        throw FormatError(ts.line, "clause count mismatch: header says " +
                                       std::to_string(expected) + ", found " + std::to_string(seen));
}

}  // namespace

Cnf parse_dimacs(std::string_view text) {
    TokenStream ts{text};
    auto [nv, nc] = parse_problem_line(ts);
    Cnf cnf;
    cnf.num_vars = nv;
    parse_clauses(ts, cnf, nc);
    return cnf;
}

Qbf parse_qdimacs(std::string_view text) {
    TokenStream ts{text};
    auto [nv, nc] = parse_problem_line(ts);
    Qbf qbf;
    qbf.matrix.num_vars = nv;

    std::string_view tok;
    for (;;) {
        size_t save_pos = ts.pos;
        int save_line = ts.line;
        if (!ts.next(tok)) break;
        if (tok == "c") {
            ts.skip_line();
            continue;
        }
        if (tok != "e" && tok != "a") {
            ts.pos = save_pos;
            ts.line = save_line;
            break;
        }
        QuantBlock b{tok == "e" ? Quant::Exists : Quant::Forall, {}};
        for (;;) {
            long long v = ts.next_int();
            if (v == 0) break;
            if (v < 0 || v > nv) throw FormatError(ts.line, "bad prefix variable " + std::to_string(v));
            b.vars.push_back(static_cast<int>(v));
        }
        if (b.vars.empty()) throw FormatError(ts.line, "empty quantifier block");
        qbf.prefix.push_back(std::move(b));
    }
    parse_clauses(ts, qbf.matrix, nc);
    return qbf;
}

}  // namespace qbmc
