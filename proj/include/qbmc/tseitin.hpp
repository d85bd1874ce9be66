#pragma once

#include <span>

#include "qbmc/aiger.hpp"
#include "qbmc/cnf.hpp"

namespace qbmc {

// A circuit output after constant folding: either a known constant or a
// CNF literal.
struct EncLit {
    bool is_const = false;
    bool cval = false;
    Lit lit = 0;

    static EncLit constant(bool b) { return {true, b, 0}; }
    static EncLit of(Lit l) { return {false, false, l}; }
    EncLit operator~() const { return is_const ? constant(!cval) : of(-lit); }
};

// Bi-directional gate definitions. Gate variables can end up under
// universal quantifiers, where one-directional encodings are unsound.
void add_iff(Cnf& cnf, Lit a, Lit b);                       // a <-> b
void add_xnor_def(Cnf& cnf, Lit o, Lit a, Lit b);           // o <-> (a <-> b)
void add_and_def(Cnf& cnf, Lit g, std::span<const Lit> in); // g <-> AND(in)
void add_or_def(Cnf& cnf, Lit g, std::span<const Lit> in);  // g <-> OR(in)

// Asserts an encoded literal at the top level. guard == 0 asserts
// unconditionally; otherwise every emitted clause carries -guard.
// A constant-false root yields the empty clause (or the unit -guard).
void assert_enclit(Cnf& cnf, EncLit e, Lit guard = 0);

// Clause-encodes circuit cones over one frame. Leaves are bound to CNF
// literals by the caller; each gate in the cone gets one defining
// variable, shared across all roots encoded by the same instance.
class ConeEncoder {
public:
    ConeEncoder(const TransitionSystem& sys, Cnf& cnf, VarMap& vm, VarRole aux_role,
                int aux_group, std::span<const Lit> latch_lits, std::span<const Lit> input_lits);

    EncLit encode(AigLit root);

private:
    EncLit leaf(uint32_t node) const;
    const TransitionSystem& sys_;
    Cnf& cnf_;
    VarMap& vm_;
    VarRole aux_role_;
    int aux_group_;
    int next_aux_ = 0;
    std::span<const Lit> latch_lits_;
    std::span<const Lit> input_lits_;
    std::vector<EncLit> cache_;
    std::vector<uint8_t> have_;
};

// Standalone cone CNF: latch and input leaves are bound to fresh
// variables (roles State/Input, group 0).
struct ConeCnf {
    Cnf cnf;
    VarMap vm;
    std::vector<EncLit> roots;
};
ConeCnf tseitin_cone(const TransitionSystem& sys, std::span<const AigLit> roots);

}  // namespace qbmc
