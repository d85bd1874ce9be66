#include "qbmc/tseitin.hpp"

#include <cassert>

namespace qbmc {

void add_iff(Cnf& cnf, Lit a, Lit b) {
    cnf.add({-a, b});
    cnf.add({a, -b});
}

void add_xnor_def(Cnf& cnf, Lit o, Lit a, Lit b) {
    cnf.add({-o, -a, b});
    cnf.add({-o, a, -b});
    cnf.add({o, a, b});
    cnf.add({o, -a, -b});
}

void add_and_def(Cnf& cnf, Lit g, std::span<const Lit> in) {
    std::vector<Lit> last{g};
    for (Lit l : in) {
        cnf.add({-g, l});
        last.push_back(-l);
    }
    cnf.add(std::move(last));
}

void add_or_def(Cnf& cnf, Lit g, std::span<const Lit> in) {
    std::vector<Lit> last{-g};
    for (Lit l : in) {
        cnf.add({g, -l});
        last.push_back(l);
    }
    cnf.add(std::move(last));
}

void assert_enclit(Cnf& cnf, EncLit e, Lit guard) {
    if (e.is_const) {
        if (e.cval) return;  // trivially satisfied
        if (guard != 0)
            cnf.add({-guard});
        else
            cnf.add({});  // constant false: the formula is unsatisfiable
        return;
    }
    if (guard != 0)
        cnf.add({-guard, e.lit});
    else
        cnf.add({e.lit});
}

ConeEncoder::ConeEncoder(const TransitionSystem& sys, Cnf& cnf, VarMap& vm, VarRole aux_role,
                         int aux_group, std::span<const Lit> latch_lits,
                         std::span<const Lit> input_lits)
    : sys_(sys),
      cnf_(cnf),
      vm_(vm),
      aux_role_(aux_role),
      aux_group_(aux_group),
      latch_lits_(latch_lits),
      input_lits_(input_lits),
      cache_(sys.node_count()),
      have_(sys.node_count(), 0) {
    assert(latch_lits_.size() == sys.num_latches());
}

EncLit ConeEncoder::leaf(uint32_t node) const {
    if (node == 0) return EncLit::constant(false);
    if (sys_.is_input_node(node)) {
        assert(node - 1 < input_lits_.size() && "cone touches an unbound input");
        return EncLit::of(input_lits_[node - 1]);
    }
    assert(sys_.is_latch_node(node));
    return EncLit::of(latch_lits_[node - 1 - sys_.num_inputs()]);
}

EncLit ConeEncoder::encode(AigLit root) {
    // Iterative post-order over the cone; gate chains can be deep.
    std::vector<uint32_t> stack{aig_node(root)};
    while (!stack.empty()) {
        uint32_t node = stack.back();
        if (have_[node]) {
            stack.pop_back();
            continue;
        }
        if (!sys_.is_gate_node(node)) {
            cache_[node] = leaf(node);
            have_[node] = 1;
            stack.pop_back();
            continue;
        }
        const Gate& gt = sys_.gate(node - 1 - sys_.num_inputs() - sys_.num_latches());
        uint32_t ln = aig_node(gt.left), rn = aig_node(gt.right);
        if (!have_[ln] || !have_[rn]) {
            if (!have_[ln]) stack.push_back(ln);
            if (!have_[rn]) stack.push_back(rn);
            continue;
        }
        EncLit a = aig_neg(gt.left) ? ~cache_[ln] : cache_[ln];
        EncLit b = aig_neg(gt.right) ? ~cache_[rn] : cache_[rn];
        EncLit out;
        if (a.is_const)
            out = a.cval ? b : EncLit::constant(false);
        else if (b.is_const)
            out = b.cval ? a : EncLit::constant(false);
        else if (a.lit == b.lit)
            out = a;
        else if (a.lit == -b.lit)
            out = EncLit::constant(false);
        else {
            Lit g = vm_.fresh(aux_role_, aux_group_, next_aux_++);
            cnf_.add({-g, a.lit});
            cnf_.add({-g, b.lit});
            cnf_.add({g, -a.lit, -b.lit});
            if (cnf_.num_vars < g) cnf_.num_vars = g;
            out = EncLit::of(g);
        }
        cache_[node] = out;
        have_[node] = 1;
        stack.pop_back();
    }
    EncLit e = cache_[aig_node(root)];
    return aig_neg(root) ? ~e : e;
}

ConeCnf tseitin_cone(const TransitionSystem& sys, std::span<const AigLit> roots) {
    ConeCnf out;
    std::vector<Lit> latch_lits, input_lits;
    for (unsigned j = 0; j < sys.num_latches(); ++j)
        latch_lits.push_back(out.vm.fresh(VarRole::State, 0, static_cast<int>(j)));
    for (unsigned i = 0; i < sys.num_inputs(); ++i)
        input_lits.push_back(out.vm.fresh(VarRole::Input, 0, static_cast<int>(i)));
    out.cnf.num_vars = out.vm.num_vars();

    ConeEncoder enc(sys, out.cnf, out.vm, VarRole::AuxTr, 0, latch_lits, input_lits);
    for (AigLit r : roots) out.roots.push_back(enc.encode(r));
    out.cnf.num_vars = out.vm.num_vars();
    return out;
}

}  // namespace qbmc
