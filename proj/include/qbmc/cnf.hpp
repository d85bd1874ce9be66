#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qbmc {

// Propositional literals use the DIMACS convention: nonzero signed
// integers, variables numbered from 1. -v is the negation of v.
using Lit = int32_t;

inline int lit_var(Lit l) { return l < 0 ? -l : l; }
inline bool lit_sign(Lit l) { return l < 0; }

struct Cnf {
    int num_vars = 0;
    std::vector<std::vector<Lit>> clauses;

    void add(std::vector<Lit> c) { clauses.push_back(std::move(c)); }
    size_t num_clauses() const { return clauses.size(); }
};

enum class Quant : uint8_t { Exists, Forall };

struct QuantBlock {
    Quant q;
    std::vector<int> vars;
};

// Prenex QBF: quantifier prefix over a CNF matrix. Matrix variables not
// bound by the prefix are implicitly existential at the outermost level.
struct Qbf {
    std::vector<QuantBlock> prefix;
    Cnf matrix;

    // Binds free matrix variables in an outermost e-block and merges
    // adjacent blocks with the same quantifier.
    Qbf normalized() const;
    size_t num_universals() const;
};

// Roles a solver variable can play in an encoding. `group` disambiguates
// copies of the same role (the time step for State/Input/AuxTr, the
// recursion level for Mid/Current/Next/AuxEq), `index` the bit within.
enum class VarRole : uint8_t {
    State,    // path state bit Z_i
    Mid,      // midpoint state bit of the squaring recursion
    Current,  // U bit
    Next,     // V bit
    Input,    // primary input bit at a step
    AuxTr,    // Tseitin variable inside a transition-cone copy
    AuxInit,  // Tseitin variable inside the initial-predicate cone
    AuxBad,   // Tseitin variable inside the bad-predicate cone
    AuxEq,    // Tseitin variable of state-equality scaffolding
    Act,      // activation literal (0 = init, 1 = bad)
};

struct VarInfo {
    VarRole role;
    int group;
    int index;
};

// Bidirectional (role, group, index) <-> variable table. Allocation order
// defines the variable numbering, so encodings are byte-reproducible.
class VarMap {
public:
    Lit fresh(VarRole role, int group, int index);
    int lookup(VarRole role, int group, int index) const;  // 0 if absent
    const VarInfo& info(int var) const;
    int num_vars() const { return static_cast<int>(info_.size()); }

    // Variables of one (role, group), in allocation order.
    std::vector<int> block(VarRole role, int group) const;
    int count_role(VarRole role) const;
    std::vector<int> groups(VarRole role) const;  // sorted, distinct

    // Number of transition-relation cones instantiated by the encoder
    // that owns this map.
    int tr_cones = 0;

private:
    static uint64_t key(VarRole role, int group, int index);
    std::vector<VarInfo> info_;
    std::unordered_map<uint64_t, int> index_;
};

// True iff every clause has a literal satisfied by `assignment`, which
// maps variable v to assignment[v] (index 0 unused, total over num_vars).
bool eval_matrix(const Cnf& cnf, const std::vector<bool>& assignment);

class FormatError : public std::runtime_error {
public:
    FormatError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// DIMACS / QDIMACS serialization. LF newlines, single spaces, clauses
// 0-terminated. A nonempty comment is emitted as a leading "c " line.
std::string write_dimacs(const Cnf& cnf, std::string_view comment = {});
std::string write_qdimacs(const Qbf& qbf, std::string_view comment = {});

Cnf parse_dimacs(std::string_view text);
Qbf parse_qdimacs(std::string_view text);

}  // namespace qbmc
