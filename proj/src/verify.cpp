#include "hcf/verify.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hcf/bandlimited.hpp"

namespace hcf {

namespace {

/// S with the holomorphic index raised: comp (i, p) = S^p_i = g^{p qbar} S_{i qbar}.
TensorField raise_second_index(const TensorField& S, const TensorField& ginv) {
    return einsum("pq,iq->ip", {ginv, S});
}

/// comp (j, q) = Sbar^qbar_jbar = g^{p qbar} S_{p jbar}.
TensorField raise_first_index(const TensorField& S, const TensorField& ginv) {
    return einsum("pq,pj->jq", {ginv, S});
}

}  // namespace

TensorField RmEvolutionRhs::full() const {
    TensorField out = laplacian_sym.clone();
    out += torsion_bracket;
    out += quadratic;
    out += s_quartet;
    return out;
}

TensorField RmEvolutionRhs::full_onesided() const {
    TensorField out = laplacian_onesided.clone();
    out += torsion_bracket;
    out += quadratic;
    out += s_quartet;
    return out;
}

RmEvolutionRhs rhs_rm_evolution(const ChernPackage& pkg) {
    const TensorField& R = pkg.Rm_lowered;
    const TensorField& ginv = pkg.g_inv;
    const TensorField& T = pkg.T_mixed;

    RmEvolutionRhs out{laplacian_sym(R, pkg),
                       laplacian_onesided(R, pkg),
                       TensorField(R.grid_ptr(), R.signature()),
                       TensorField(R.grid_ptr(), R.signature()),
                       TensorField(R.grid_ptr(), R.signature())};

    {
        TensorField gradR_anti = covariant_derivative(R, pkg, Holomorphy::Anti);
        einsum_into(out.torsion_bracket, 1.0, "rs,pri,spjkl->ijkl", {ginv, T, gradR_anti});
    }
    {
        TensorField gradR_holo = covariant_derivative(R, pkg, Holomorphy::Holo);
        einsum_into(out.torsion_bracket, 1.0, "rs,qsj,riqkl->ijkl", {ginv, conj_op(T), gradR_holo});
    }
    einsum_into(out.torsion_bracket, 1.0, "rs,pri,qsj,pqkl->ijkl", {ginv, T, conj_op(T), R});

    einsum_into(out.quadratic, 1.0, "rs,ijrp,pskl->ijkl", {ginv, pkg.Rm_mixed, R});
    einsum_into(out.quadratic, 1.0, "rs,rjkp,ispl->ijkl", {ginv, pkg.Rm_mixed, R});
    einsum_into(out.quadratic, -1.0, "rs,rjpl,iskp->ijkl", {ginv, R, pkg.Rm_mixed});

    TensorField Sup = raise_second_index(pkg.Ric_second, ginv);
    TensorField Sbar = raise_first_index(pkg.Ric_second, ginv);
    einsum_into(out.s_quartet, -0.5, "ip,pjkl->ijkl", {Sup, R});
    einsum_into(out.s_quartet, -0.5, "kp,ijpl->ijkl", {Sup, R});
    einsum_into(out.s_quartet, -0.5, "jq,iqkl->ijkl", {Sbar, R});
    einsum_into(out.s_quartet, -0.5, "lq,ijkq->ijkl", {Sbar, R});
    return out;
}

TensorField RicciEvolutionRhs::full() const {
    TensorField out = laplacian_sym.clone();
    out += torsion_bracket;
    out += quadratic;
    out += s_pair;
    return out;
}

TensorField RicciEvolutionRhs::full_onesided() const {
    TensorField out = laplacian_onesided.clone();
    out += torsion_bracket;
    out += quadratic;
    out += s_pair;
    return out;
}

RicciEvolutionRhs rhs_ricci_evolution(const ChernPackage& pkg) {
    const TensorField& Ric = pkg.Ric_first;
    const TensorField& ginv = pkg.g_inv;
    const TensorField& T = pkg.T_mixed;

    RicciEvolutionRhs out{laplacian_sym(Ric, pkg),
                          laplacian_onesided(Ric, pkg),
                          TensorField(Ric.grid_ptr(), Ric.signature()),
                          TensorField(Ric.grid_ptr(), Ric.signature()),
                          TensorField(Ric.grid_ptr(), Ric.signature())};

    {
        TensorField gradRic_anti = covariant_derivative(Ric, pkg, Holomorphy::Anti);
        einsum_into(out.torsion_bracket, 1.0, "rs,pri,spj->ij", {ginv, T, gradRic_anti});
    }
    {
        TensorField gradRic_holo = covariant_derivative(Ric, pkg, Holomorphy::Holo);
        einsum_into(out.torsion_bracket, 1.0, "rs,qsj,riq->ij", {ginv, conj_op(T), gradRic_holo});
    }
    einsum_into(out.torsion_bracket, 1.0, "rs,pri,qsj,pq->ij", {ginv, T, conj_op(T), Ric});

    TensorField ric_raised = einsum("kq,pq->pk", {ginv, Ric});  // R_p^k
    einsum_into(out.quadratic, 1.0, "ijkp,pk->ij", {pkg.Rm_mixed, ric_raised});

    TensorField Sup = raise_second_index(pkg.Ric_second, ginv);
    TensorField Sbar = raise_first_index(pkg.Ric_second, ginv);
    einsum_into(out.s_pair, -0.5, "ip,pj->ij", {Sup, Ric});
    einsum_into(out.s_pair, -0.5, "jq,iq->ij", {Sbar, Ric});
    return out;
}

// ---------------------------------------------------------------------------

TensorField fd_time_derivative(const MetricField& g_lo, const MetricField& g_hi, double delta,
                               EvolvedQuantity q) {
    if (!(delta > 0.0)) throw std::invalid_argument("fd_time_derivative: delta must be positive");
    if (!g_lo.grid().compatible(g_hi.grid()))
        throw std::invalid_argument("fd_time_derivative: mismatched grids");

    auto quantity = [&](const MetricField& g) {
        if (q == EvolvedQuantity::Rm) return curvature(g).lowered;
        ChernPackage pkg = compute_chern(g);
        return pkg.Ric_first.clone();
    };
    TensorField hi = quantity(g_hi);
    TensorField lo = quantity(g_lo);
    hi -= lo;
    hi *= cplx(1.0 / (2.0 * delta));
    return hi;
}

EvolutionStudy evolution_study(const MetricField& g0, double t_star, std::vector<double> deltas,
                               EvolvedQuantity q, double dt_hint) {
    if (deltas.empty()) throw std::invalid_argument("evolution_study: no deltas");
    std::sort(deltas.begin(), deltas.end(), std::greater<>());

    // fixed dt dividing every delta and t_star so snapshots land exactly
    double dt = dt_hint > 0.0 ? dt_hint : deltas.back() / 4.0;
    const double cap = 0.9 * stability_dt(g0);
    while (dt > cap) dt *= 0.5;
    auto steps_of = [&](double t) {
        const double k = t / dt;
        const long rounded = std::lround(k);
        if (std::abs(k - rounded) > 1e-9)
            throw std::invalid_argument("evolution_study: dt does not divide the target times");
        return rounded;
    };
    const long n_star = steps_of(t_star);
    for (double d : deltas) steps_of(d);  // validation

    // integrate once, storing metrics at every needed step index
    std::vector<long> want;
    want.push_back(n_star);
    for (double d : deltas) {
        want.push_back(n_star - steps_of(d));
        want.push_back(n_star + steps_of(d));
    }
    const long last = *std::max_element(want.begin(), want.end());
    for (long w : want)
        if (w < 0) throw std::invalid_argument("evolution_study: delta exceeds t_star");

    std::vector<MetricField> stored;
    std::vector<long> stored_step;
    FlowState s(MetricField(g0.tensor().clone()));
    for (long k = 0; k <= last; ++k) {
        if (std::find(want.begin(), want.end(), k) != want.end()) {
            stored.push_back(MetricField(s.g.tensor().clone()));
            stored_step.push_back(k);
        }
        if (k < last) s = step_hcf(s, dt).state;
    }
    auto metric_at = [&](long k) -> const MetricField& {
        for (std::size_t i = 0; i < stored_step.size(); ++i)
            if (stored_step[i] == k) return stored[i];
        throw std::logic_error("evolution_study: missing stored state");
    };

    // right-hand sides at t_star
    ChernPackage pkg = compute_chern(metric_at(n_star));
    TensorField rhs_sym(pkg.g.grid_ptr(), Signature{});
    TensorField rhs_one(pkg.g.grid_ptr(), Signature{});
    if (q == EvolvedQuantity::Rm) {
        RmEvolutionRhs rhs = rhs_rm_evolution(pkg);
        rhs_sym = rhs.full();
        rhs_one = rhs.full_onesided();
    } else {
        RicciEvolutionRhs rhs = rhs_ricci_evolution(pkg);
        rhs_sym = rhs.full();
        rhs_one = rhs.full_onesided();
    }
    const double rhs_scale = sup_abs(rhs_sym);

    EvolutionStudy study{};
    for (double d : deltas) {
        const long off = steps_of(d);
        TensorField fd =
            fd_time_derivative(metric_at(n_star - off), metric_at(n_star + off), d, q);
        EvolutionResidual row;
        row.which = q == EvolvedQuantity::Rm ? "full_curvature" : "first_ricci";
        row.t_star = t_star;
        row.delta = d;
        row.resolution = pkg.g.grid().resolution();
        row.residual_sup = sup_abs_diff(fd, rhs_sym);
        row.residual_sup_onesided = sup_abs_diff(fd, rhs_one);
        double acc = 0.0;
        {
            TensorField diff = fd.clone();
            diff -= rhs_sym;
            for (const auto& v : diff.raw()) acc += std::abs(v);
            row.residual_mean = acc / static_cast<double>(diff.raw().size());
        }
        row.rhs_sup = rhs_scale;
        study.rows.push_back(row);
    }

    if (study.rows.size() >= 2)
        study.measured_order = std::log2(study.rows[0].residual_sup / study.rows[1].residual_sup) /
                               std::log2(study.rows[0].delta / study.rows[1].delta);
    else
        study.measured_order = 0.0;

    // least squares for residual ~ A delta^2 + floor
    {
        double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
        for (const auto& row : study.rows) {
            const double x = row.delta * row.delta;
            s1 += 1;
            sx += x;
            sxx += x * x;
            sy += row.residual_sup;
            sxy += x * row.residual_sup;
        }
        const double det = s1 * sxx - sx * sx;
        if (std::abs(det) > 0) {
            study.fitted_A = (s1 * sxy - sx * sy) / det;
            study.fitted_floor = (sxx * sy - sx * sxy) / det;
        }
    }
    return study;
}

// ---------------------------------------------------------------------------

namespace {

/// [nabla_i, nabla_jbar] t with output slots (i, jbar, t-slots...).
TensorField commutator_holo_anti(const TensorField& t, const ChernPackage& pkg) {
    TensorField ab =
        covariant_derivative(covariant_derivative(t, pkg, Holomorphy::Anti), pkg, Holomorphy::Holo);
    TensorField ba =
        covariant_derivative(covariant_derivative(t, pkg, Holomorphy::Holo), pkg, Holomorphy::Anti);
    // swap the two prepended direction slots of ba
    std::string in = "ji";
    std::string out = "ij";
    for (int s = 0; s < t.rank(); ++s) {
        in.push_back(static_cast<char>('k' + s));
        out.push_back(static_cast<char>('k' + s));
    }
    ab -= permuted(ba, in + "->" + out);
    return ab;
}

TensorField random_slot_field(const GridPtr& grid, Slot slot, std::uint64_t seed) {
    TensorField x(grid, Signature{slot});
    for (int c = 0; c < grid->n(); ++c) {
        TrigPoly f = random_complex_trigpoly(grid->naxes(), grid->period(0), 2, 5, 1.0,
                                                          seed + static_cast<std::uint64_t>(c));
        TensorField s = sample_scalar(grid, f);
        auto src = s.comp(0);
        auto dst = x.comp(static_cast<std::size_t>(c));
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return x;
}

}  // namespace

std::vector<IdentityRecord> identity_suite(const ChernPackage& pkg, double tol, std::uint64_t seed) {
    std::vector<IdentityRecord> out;
    auto push = [&](const std::string& name, double value) {
        out.push_back({name, value, tol, value <= tol});
    };

    const TensorField& R = pkg.Rm_lowered;
    const GridPtr grid = R.grid_ptr();

    // commutation rules on random band-limited fields
    {
        TensorField X = random_slot_field(grid, uh, seed);
        TensorField lhs = commutator_holo_anti(X, pkg);
        TensorField rhs = einsum("ijkl,k->ijl", {pkg.Rm_mixed, X});
        push("commutation/vector-holo", sup_abs_diff(lhs, rhs));
    }
    {
        TensorField a = random_slot_field(grid, lh, seed + 11);
        TensorField lhs = commutator_holo_anti(a, pkg);
        TensorField rhs = einsum("ijkl,l->ijk", {pkg.Rm_mixed, a}, -1.0);
        push("commutation/form-holo", sup_abs_diff(lhs, rhs));
    }
    {
        TensorField Xb = random_slot_field(grid, ua, seed + 23);
        TensorField lhs = commutator_holo_anti(Xb, pkg);
        TensorField rhs = einsum("jikl,k->ijl", {conj_op(pkg.Rm_mixed), Xb}, -1.0);
        push("commutation/vector-anti", sup_abs_diff(lhs, rhs));
    }
    {
        TensorField ab = random_slot_field(grid, la, seed + 37);
        TensorField lhs = commutator_holo_anti(ab, pkg);
        TensorField rhs = einsum("jikl,l->ijk", {conj_op(pkg.Rm_mixed), ab});
        push("commutation/form-anti", sup_abs_diff(lhs, rhs));
    }

    // torsion-Bianchi identities
    TensorField gradT_anti = covariant_derivative(pkg.T_lowered, pkg, Holomorphy::Anti);
    TensorField conjT = pkg.T_lowered.conjugated();
    TensorField gradTc_holo = covariant_derivative(conjT, pkg, Holomorphy::Holo);
    {
        TensorField res = R.clone();
        res -= permuted(R, "kjil->ijkl");
        res += permuted(gradT_anti, "jikl->ijkl");
        push("bianchi/first-pair-swap", sup_abs(res));
    }
    {
        TensorField res = R.clone();
        res -= permuted(R, "ilkj->ijkl");
        res += permuted(gradTc_holo, "ijlk->ijkl");
        push("bianchi/second-pair-swap", sup_abs(res));
    }
    {
        TensorField res = R.clone();
        res -= permuted(R, "klij->ijkl");
        res += permuted(gradT_anti, "jikl->ijkl");
        res += permuted(gradTc_holo, "kjli->ijkl");
        push("bianchi/block-swap-a", sup_abs(res));
    }
    {
        TensorField res = R.clone();
        res -= permuted(R, "klij->ijkl");
        res += permuted(gradTc_holo, "ijlk->ijkl");
        res += permuted(gradT_anti, "likj->ijkl");
        push("bianchi/block-swap-b", sup_abs(res));
    }
    {
        TensorField gradR = covariant_derivative(R, pkg, Holomorphy::Holo);
        TensorField res = gradR.clone();
        res -= permuted(gradR, "ipjkl->pijkl");
        einsum_into(res, 1.0, "rpi,rjkl->pijkl", {pkg.T_mixed, R});
        push("bianchi/derivative-holo", sup_abs(res));
    }
    {
        TensorField gradR = covariant_derivative(R, pkg, Holomorphy::Anti);
        TensorField res = gradR.clone();
        res -= permuted(gradR, "jiqkl->qijkl");
        einsum_into(res, 1.0, "sqj,iskl->qijkl", {conj_op(pkg.T_mixed), R});
        push("bianchi/derivative-anti", sup_abs(res));
    }

    // conjugation symmetry and realness
    {
        TensorField mirrored = permuted(R.conjugated(), "jilk->ijkl");
        push("conjugation-symmetry", sup_abs_diff(R, mirrored));
    }
    {
        TensorField X = random_slot_field(grid, uh, seed + 53);
        TensorField Y = random_slot_field(grid, uh, seed + 71);
        TensorField val = einsum("ijkl,i,j,k,l->", {R, X, conj_op(X), Y, conj_op(Y)});
        push("bihermitian-realness", sup_imag(val));
    }

    // Ricci cross-checks
    push("ricci-trace-vs-logdet", sup_abs_diff(pkg.Ric_first, first_ricci_logdet(pkg.g)));
    {
        TensorField m1 = permuted(pkg.Ric_first.conjugated(), "ji->ij");
        push("first-ricci-hermitian", sup_abs_diff(pkg.Ric_first, m1));
        TensorField m2 = permuted(pkg.Ric_second.conjugated(), "ji->ij");
        push("second-ricci-hermitian", sup_abs_diff(pkg.Ric_second, m2));
    }
    {
        // traced block-swap identity: Ric - S = -g^{k lbar}(nabla_jbar T_{i k lbar}
        // + nabla_k T_{jbar lbar i})
        TensorField res = pkg.Ric_first.clone();
        res -= pkg.Ric_second;
        einsum_into(res, 1.0, "kl,jikl->ij", {pkg.g_inv, gradT_anti});
        einsum_into(res, 1.0, "kl,kjli->ij", {pkg.g_inv, gradTc_holo});
        push("ricci-difference-vs-torsion", sup_abs(res));
    }

    // metric compatibility and the B-trace constant
    {
        TensorField nh = covariant_derivative(pkg.g.tensor(), pkg, Holomorphy::Holo);
        TensorField na = covariant_derivative(pkg.g.tensor(), pkg, Holomorphy::Anti);
        push("nabla-g", std::max(sup_abs(nh), sup_abs(na)));
    }
    {
        EpsilonShift shift = eps_shift(R, pkg.g, 0.0);
        push("b-trace", shift.trace_residual);
    }
    return out;
}

bool all_pass(const std::vector<IdentityRecord>& records) {
    for (const auto& r : records)
        if (!r.pass) return false;
    return true;
}

std::string format_report(const std::vector<IdentityRecord>& records) {
    std::ostringstream os;
    for (const auto& r : records) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        for (std::size_t pad = r.name.size(); pad < 34; ++pad) os << ' ';
        os.setf(std::ios::scientific);
        os.precision(3);
        os << "  value " << r.value << "  tol " << r.tol << "\n";
    }
    return os.str();
}

}  // namespace hcf
