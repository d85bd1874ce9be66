#include "qbmc/qbf.hpp"

#include <cassert>
#include <chrono>

#include "qbmc/tseitin.hpp"

namespace qbmc {

namespace {

// Folding constructors for scaffolding nodes.
EncLit make_xnor(Cnf& cnf, VarMap& vm, VarRole role, int group, int& serial, EncLit a, EncLit b) {
    if (a.is_const && b.is_const) return EncLit::constant(a.cval == b.cval);
    if (a.is_const) return a.cval ? b : ~b;
    if (b.is_const) return b.cval ? a : ~a;
    if (a.lit == b.lit) return EncLit::constant(true);
    if (a.lit == -b.lit) return EncLit::constant(false);
    Lit o = vm.fresh(role, group, serial++);
    cnf.num_vars = vm.num_vars();
    add_xnor_def(cnf, o, a.lit, b.lit);
    return EncLit::of(o);
}

EncLit make_and(Cnf& cnf, VarMap& vm, VarRole role, int group, int& serial,
                const std::vector<EncLit>& items) {
    std::vector<Lit> lits;
    for (const EncLit& e : items) {
        if (e.is_const) {
            if (!e.cval) return EncLit::constant(false);
            continue;
        }
        lits.push_back(e.lit);
    }
    if (lits.empty()) return EncLit::constant(true);
    if (lits.size() == 1) return EncLit::of(lits[0]);
    Lit g = vm.fresh(role, group, serial++);
    cnf.num_vars = vm.num_vars();
    add_and_def(cnf, g, lits);
    return EncLit::of(g);
}

EncLit make_or(Cnf& cnf, VarMap& vm, VarRole role, int group, int& serial,
               const std::vector<EncLit>& items) {
    std::vector<Lit> lits;
    for (const EncLit& e : items) {
        if (e.is_const) {
            if (e.cval) return EncLit::constant(true);
            continue;
        }
        lits.push_back(e.lit);
    }
    if (lits.empty()) return EncLit::constant(false);
    if (lits.size() == 1) return EncLit::of(lits[0]);
    Lit g = vm.fresh(role, group, serial++);
    cnf.num_vars = vm.num_vars();
    add_or_def(cnf, g, lits);
    return EncLit::of(g);
}

std::vector<Lit> role_lits(const VarMap& vm, VarRole role, int group, unsigned count) {
    std::vector<Lit> out(count);
    for (unsigned j = 0; j < count; ++j) {
        out[j] = vm.lookup(role, group, static_cast<int>(j));
        assert(out[j] != 0);
    }
    return out;
}

// One transition-relation cone: encodes next(U, inputs) and constrains V
// bitwise-equal to it; returns the conjunction literal t <-> TR(U,V).
EncLit encode_tr_conjunct(const TransitionSystem& sys, Cnf& cnf, VarMap& vm,
                          const std::vector<Lit>& u, const std::vector<Lit>& v,
                          const std::vector<Lit>& in) {
    ConeEncoder enc(sys, cnf, vm, VarRole::AuxTr, 0, u, in);
    ++vm.tr_cones;
    int serial = static_cast<int>(sys.node_count());  // past any gate serial
    std::vector<EncLit> conjuncts;
    for (unsigned j = 0; j < sys.num_latches(); ++j) {
        EncLit c = enc.encode(sys.latch_next(j));
        conjuncts.push_back(make_xnor(cnf, vm, VarRole::AuxTr, 0, serial, EncLit::of(v[j]), c));
    }
    return make_and(cnf, vm, VarRole::AuxTr, 0, serial, conjuncts);
}

}  // namespace

QbfEncoding encode_diameter_qbf(const TransitionSystem& sys, int k) {
    assert(k >= 1);
    QbfEncoding out;
    out.bound = k;
    VarMap& vm = out.vm;
    Cnf& cnf = out.qbf.matrix;
    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();

    for (int i = 0; i <= k; ++i)
        for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::State, i, static_cast<int>(j));
    for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::Current, 0, static_cast<int>(j));
    for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::Next, 0, static_cast<int>(j));
    for (unsigned x = 0; x < m; ++x) vm.fresh(VarRole::Input, 0, static_cast<int>(x));
    cnf.num_vars = vm.num_vars();

    std::vector<Lit> u = role_lits(vm, VarRole::Current, 0, n);
    std::vector<Lit> v = role_lits(vm, VarRole::Next, 0, n);
    std::vector<Lit> in = role_lits(vm, VarRole::Input, 0, m);

    {
        std::vector<Lit> z0 = role_lits(vm, VarRole::State, 0, n);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxInit, 0, z0, {});
        assert_enclit(cnf, enc.encode(sys.init_lit()));
    }
    {
        std::vector<Lit> zk = role_lits(vm, VarRole::State, k, n);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxBad, 0, zk, {});
        assert_enclit(cnf, enc.encode(sys.bad_lit()));
    }

    EncLit t = encode_tr_conjunct(sys, cnf, vm, u, v, in);

    // ((U = Z_i) and (V = Z_{i+1})) -> TR(U,V), for every step i.
    for (int i = 0; i < k; ++i) {
        int serial = 0;
        std::vector<EncLit> eq_bits;
        std::vector<Lit> zi = role_lits(vm, VarRole::State, i, n);
        std::vector<Lit> zn = role_lits(vm, VarRole::State, i + 1, n);
        for (unsigned j = 0; j < n; ++j)
            eq_bits.push_back(
                make_xnor(cnf, vm, VarRole::AuxEq, i, serial, EncLit::of(u[j]), EncLit::of(zi[j])));
        for (unsigned j = 0; j < n; ++j)
            eq_bits.push_back(
                make_xnor(cnf, vm, VarRole::AuxEq, i, serial, EncLit::of(v[j]), EncLit::of(zn[j])));
        EncLit d = make_and(cnf, vm, VarRole::AuxEq, i, serial, eq_bits);
        if (d.is_const && !d.cval) continue;
        if (t.is_const) {
            if (t.cval) continue;
            if (d.is_const)
                cnf.add({});
            else
                cnf.add({-d.lit});
        } else if (d.is_const) {
            cnf.add({t.lit});
        } else {
            cnf.add({-d.lit, t.lit});
        }
    }
    cnf.num_vars = vm.num_vars();

    // Prefix: exists path states, forall (U,V), exists inputs + all aux.
    QuantBlock outer{Quant::Exists, {}};
    for (int i = 0; i <= k; ++i)
        for (int var : vm.block(VarRole::State, i)) outer.vars.push_back(var);
    QuantBlock universal{Quant::Forall, {}};
    for (Lit l : u) universal.vars.push_back(l);
    for (Lit l : v) universal.vars.push_back(l);
    QuantBlock inner{Quant::Exists, {}};
    for (int var = 1; var <= vm.num_vars(); ++var) {
        VarRole r = vm.info(var).role;
        if (r == VarRole::Input || r == VarRole::AuxTr || r == VarRole::AuxInit ||
            r == VarRole::AuxBad || r == VarRole::AuxEq)
            inner.vars.push_back(var);
    }
    out.qbf.prefix.push_back(std::move(outer));
    out.qbf.prefix.push_back(std::move(universal));
    if (!inner.vars.empty()) out.qbf.prefix.push_back(std::move(inner));
    return out;
}

QbfEncoding encode_squaring_qbf(const TransitionSystem& sys, int k) {
    if (k < 2 || (k & (k - 1)) != 0)
        throw std::invalid_argument("squaring bound must be a power of two >= 2");
    int levels = 0;
    for (int x = k; x > 1; x >>= 1) ++levels;

    QbfEncoding out;
    out.bound = k;
    VarMap& vm = out.vm;
    Cnf& cnf = out.qbf.matrix;
    const unsigned n = sys.num_latches();
    const unsigned m = sys.num_inputs();

    for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::State, 0, static_cast<int>(j));
    for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::State, k, static_cast<int>(j));
    for (int l = 1; l <= levels; ++l)
        for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::Mid, l, static_cast<int>(j));
    for (int l = 1; l <= levels; ++l) {
        for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::Current, l, static_cast<int>(j));
        for (unsigned j = 0; j < n; ++j) vm.fresh(VarRole::Next, l, static_cast<int>(j));
    }
    for (unsigned x = 0; x < m; ++x) vm.fresh(VarRole::Input, 0, static_cast<int>(x));
    cnf.num_vars = vm.num_vars();

    {
        std::vector<Lit> z0 = role_lits(vm, VarRole::State, 0, n);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxInit, 0, z0, {});
        assert_enclit(cnf, enc.encode(sys.init_lit()));
    }
    {
        std::vector<Lit> zk = role_lits(vm, VarRole::State, k, n);
        ConeEncoder enc(sys, cnf, vm, VarRole::AuxBad, 0, zk, {});
        assert_enclit(cnf, enc.encode(sys.bad_lit()));
    }

    // Level l relates (X,Y) through midpoint M: the universal pair (U,V)
    // must match either (X,M) or (M,Y) for the next level to apply.
    std::vector<EncLit> antecedents;
    for (int l = 1; l <= levels; ++l) {
        int serial = 0;
        std::vector<Lit> x = l == 1 ? role_lits(vm, VarRole::State, 0, n)
                                    : role_lits(vm, VarRole::Current, l - 1, n);
        std::vector<Lit> y = l == 1 ? role_lits(vm, VarRole::State, k, n)
                                    : role_lits(vm, VarRole::Next, l - 1, n);
        std::vector<Lit> mid = role_lits(vm, VarRole::Mid, l, n);
        std::vector<Lit> ul = role_lits(vm, VarRole::Current, l, n);
        std::vector<Lit> vl = role_lits(vm, VarRole::Next, l, n);

        auto eq_vec = [&](const std::vector<Lit>& a, const std::vector<Lit>& b) {
            std::vector<EncLit> bits;
            for (unsigned j = 0; j < n; ++j)
                bits.push_back(make_xnor(cnf, vm, VarRole::AuxEq, l, serial, EncLit::of(a[j]),
                                         EncLit::of(b[j])));
            return make_and(cnf, vm, VarRole::AuxEq, l, serial, bits);
        };
        EncLit first_half = make_and(cnf, vm, VarRole::AuxEq, l, serial,
                                     {eq_vec(ul, x), eq_vec(vl, mid)});
        EncLit second_half = make_and(cnf, vm, VarRole::AuxEq, l, serial,
                                      {eq_vec(ul, mid), eq_vec(vl, y)});
        antecedents.push_back(
            make_or(cnf, vm, VarRole::AuxEq, l, serial, {first_half, second_half}));
    }

    std::vector<Lit> u_in = role_lits(vm, VarRole::Current, levels, n);
    std::vector<Lit> v_in = role_lits(vm, VarRole::Next, levels, n);
    std::vector<Lit> in = role_lits(vm, VarRole::Input, 0, m);
    EncLit t = encode_tr_conjunct(sys, cnf, vm, u_in, v_in, in);

    // (a_1 and ... and a_levels) -> TR(U_levels, V_levels)
    std::vector<Lit> clause;
    bool satisfied = false;
    for (const EncLit& a : antecedents) {
        if (a.is_const) {
            if (!a.cval) satisfied = true;
        } else {
            clause.push_back(-a.lit);
        }
    }
    if (!satisfied) {
        if (t.is_const) {
            if (!t.cval) {
                if (clause.empty())
                    cnf.add({});
                else
                    cnf.add(clause);
            }
        } else {
            clause.push_back(t.lit);
            cnf.add(clause);
        }
    }
    cnf.num_vars = vm.num_vars();

    // Prefix: E(Z_0, Z_k, M_1) A(U_1,V_1) E(M_2) ... A(U_m,V_m) E(rest).
    auto push_role = [&](QuantBlock& b, VarRole role, int group) {
        for (int var : vm.block(role, group)) b.vars.push_back(var);
    };
    QuantBlock outer{Quant::Exists, {}};
    push_role(outer, VarRole::State, 0);
    push_role(outer, VarRole::State, k);
    push_role(outer, VarRole::Mid, 1);
    out.qbf.prefix.push_back(std::move(outer));
    for (int l = 1; l <= levels; ++l) {
        QuantBlock uni{Quant::Forall, {}};
        push_role(uni, VarRole::Current, l);
        push_role(uni, VarRole::Next, l);
        out.qbf.prefix.push_back(std::move(uni));
        QuantBlock ex{Quant::Exists, {}};
        if (l < levels) push_role(ex, VarRole::Mid, l + 1);
        if (l == levels) {
            for (int var = 1; var <= vm.num_vars(); ++var) {
                VarRole r = vm.info(var).role;
                if (r == VarRole::Input || r == VarRole::AuxTr || r == VarRole::AuxInit ||
                    r == VarRole::AuxBad || r == VarRole::AuxEq)
                    ex.vars.push_back(var);
            }
        }
        if (!ex.vars.empty()) out.qbf.prefix.push_back(std::move(ex));
    }
    return out;
}

TransitionSystem add_self_loops(const TransitionSystem& sys) {
    const unsigned m = sys.num_inputs();
    const unsigned n = sys.num_latches();

    // Node v > m shifts by one to make room for the new input at m+1.
    auto remap = [&](AigLit l) {
        uint32_t v = aig_node(l);
        return v <= m ? l : aig_lit(v + 1, aig_neg(l));
    };
    const AigLit stay = aig_lit(m + 1);

    std::vector<Gate> gates;
    gates.reserve(sys.num_file_gates() + 3 * n);
    for (unsigned g = 0; g < sys.num_file_gates(); ++g)
        gates.push_back(Gate{remap(sys.gate(g).left), remap(sys.gate(g).right)});

    auto add_gate = [&](AigLit a, AigLit b) {
        gates.push_back(Gate{a, b});
        return aig_lit(1 + (m + 1) + n + static_cast<uint32_t>(gates.size()) - 1);
    };

    std::vector<AigLit> latch_next(n);
    for (unsigned j = 0; j < n; ++j) {
        AigLit cur = aig_lit(1 + (m + 1) + j);
        AigLit hold = add_gate(stay, cur);
        AigLit move = add_gate(aig_not(stay), remap(sys.latch_next(j)));
        AigLit neither = add_gate(aig_not(hold), aig_not(move));
        latch_next[j] = aig_not(neither);
    }
    return TransitionSystem(m + 1, n, std::move(latch_next), std::move(gates),
                            remap(sys.bad_lit()));
}

QbfEvalResult naive_qbf_eval(const Qbf& qbf, const QbfEvalOptions& opts) {
    Qbf q = qbf.normalized();
    QbfEvalResult res;
    if (q.num_universals() > static_cast<size_t>(opts.max_universals)) return res;  // Limit

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(opts.limits.timeout_seconds));

    Solver solver;
    solver.set_deadline(deadline);
    solver.set_mem_limit(opts.limits.mem_bytes);

    const int nv = q.matrix.num_vars;
    std::vector<Lit> env_lit(nv + 1, 0);
    std::vector<int8_t> env_const(nv + 1, -1);

    bool limit_hit = false;
    uint64_t branch_count = 0;
    std::vector<Lit> scratch;

    auto emit_matrix = [&]() {
        for (const auto& clause : q.matrix.clauses) {
            scratch.clear();
            bool satisfied = false;
            for (Lit l : clause) {
                int v = lit_var(l);
                if (env_const[v] >= 0) {
                    if ((env_const[v] == 1) != lit_sign(l)) {
                        satisfied = true;
                        break;
                    }
                    continue;  // falsified literal drops out
                }
                assert(env_lit[v] != 0);
                scratch.push_back(lit_sign(l) ? -env_lit[v] : env_lit[v]);
            }
            if (satisfied) continue;
            solver.add_clause(scratch);
            if (!solver.ok()) return;  // already unsatisfiable; stop expanding
        }
    };

    auto expand = [&](auto&& self, size_t bi) -> void {
        if (limit_hit || !solver.ok()) return;
        if ((++branch_count & 255) == 0) {
            if (std::chrono::steady_clock::now() > deadline ||
                (opts.limits.mem_bytes && solver.db_bytes() > opts.limits.mem_bytes)) {
                limit_hit = true;
                return;
            }
        }
        if (bi == q.prefix.size()) {
            emit_matrix();
            return;
        }
        const QuantBlock& b = q.prefix[bi];
        if (b.q == Quant::Exists) {
            for (int v : b.vars) env_lit[v] = solver.new_var();
            self(self, bi + 1);
        } else {
            const size_t width = b.vars.size();
            for (uint64_t a = 0; a < (uint64_t(1) << width) && !limit_hit && solver.ok(); ++a) {
                for (size_t i = 0; i < width; ++i)
                    env_const[b.vars[i]] = static_cast<int8_t>((a >> i) & 1);
                self(self, bi + 1);
            }
            for (int v : b.vars) env_const[v] = -1;
        }
    };
    expand(expand, 0);

    if (limit_hit) return res;  // Limit
    if (opts.limits.mem_bytes && solver.db_bytes() > opts.limits.mem_bytes) return res;

    res.status = solver.solve();
    if (res.status == SolveStatus::Sat && !q.prefix.empty() && q.prefix[0].q == Quant::Exists) {
        res.outer_value.assign(nv + 1, -1);
        for (int v : q.prefix[0].vars)
            res.outer_value[v] = solver.model_value(env_lit[v]) ? 1 : 0;
    }
    return res;
}

}  // namespace qbmc
