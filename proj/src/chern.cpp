#include "hcf/chern.hpp"

#include <cmath>
#include <stdexcept>

namespace hcf {

TensorField christoffel(const MetricField& g) {
    g.require_positive("christoffel");
    TensorField ginv = g.inverse();
    TensorField dg = indexed_partial(g.tensor(), Holomorphy::Holo);  // (i, j, l) = d_i g_{j lbar}
    return einsum("kl,ijl->kij", {ginv, dg});
}

TorsionPair torsion(const TensorField& Gamma, const MetricField& g) {
    TensorField mixed = Gamma - permuted(Gamma, "kij->kji");
    TensorField lowered = einsum("pij,pk->ijk", {mixed, g.tensor()});
    return {std::move(mixed), std::move(lowered)};
}

namespace {

TensorField curvature_mixed_from_gamma(const TensorField& Gamma) {
    TensorField dGamma = indexed_partial(Gamma, Holomorphy::Anti);  // (j, l, i, k) = d_jbar Gamma^l_{ik}
    return einsum("jlik->ijkl", {dGamma}, -1.0);
}

}  // namespace

CurvaturePair curvature(const MetricField& g) {
    TensorField Gamma = christoffel(g);
    TensorField mixed = curvature_mixed_from_gamma(Gamma);
    TensorField lowered = einsum("ijkp,pl->ijkl", {mixed, g.tensor()});
    return {std::move(mixed), std::move(lowered)};
}

TensorField first_ricci_trace(const TensorField& Rm_lowered, const TensorField& g_inv) {
    return einsum("kl,ijkl->ij", {g_inv, Rm_lowered});
}

TensorField first_ricci_logdet(const MetricField& g) {
    TensorField ld = g.log_determinant();
    TensorField hess = indexed_partial(indexed_partial(ld, Holomorphy::Anti), Holomorphy::Holo);
    hess *= -1.0;
    return hess;
}

TensorField second_ricci(const TensorField& Rm_lowered, const TensorField& g_inv) {
    return einsum("kl,klij->ij", {g_inv, Rm_lowered});
}

TensorField second_ricci_of(const MetricField& g) {
    g.require_positive("second_ricci_of");
    TensorField ginv = g.inverse();
    TensorField dg = indexed_partial(g.tensor(), Holomorphy::Holo);
    TensorField Gamma = einsum("kl,ijl->kij", {ginv, dg});
    TensorField dGamma = indexed_partial(Gamma, Holomorphy::Anti);  // (l, p, k, i)
    // S_{i jbar} = g^{k lbar} g_{p jbar} R_{k lbar i}^p,  R_{k lbar i}^p = -d_lbar Gamma^p_{ki}
    return einsum("kl,lpki,pj->ij", {ginv, dGamma, g.tensor()}, -1.0);
}

ChernPackage compute_chern(const MetricField& g) {
    g.require_positive("compute_chern");
    TensorField ginv = g.inverse();
    TensorField dg = indexed_partial(g.tensor(), Holomorphy::Holo);
    TensorField Gamma = einsum("kl,ijl->kij", {ginv, dg});
    TorsionPair T = torsion(Gamma, g);
    TensorField Rm_mixed = curvature_mixed_from_gamma(Gamma);
    TensorField Rm_lowered = einsum("ijkp,pl->ijkl", {Rm_mixed, g.tensor()});
    TensorField ric1 = first_ricci_trace(Rm_lowered, ginv);
    TensorField ric2 = second_ricci(Rm_lowered, ginv);
    return ChernPackage{MetricField(g.tensor().clone()), std::move(ginv),     std::move(Gamma),
                        std::move(T.mixed),              std::move(T.lowered), std::move(Rm_mixed),
                        std::move(Rm_lowered),           std::move(ric1),      std::move(ric2)};
}

TensorField cov_deriv_dir(const TensorField& t, const ChernPackage& pkg, Holomorphy dir, int axis) {
    const TorusGrid& grid = t.grid();
    if (!grid.compatible(pkg.g.grid()))
        throw std::invalid_argument("cov_deriv_dir: tensor grid does not match package grid");
    if (axis < 0 || axis >= grid.n()) throw std::invalid_argument("cov_deriv_dir: axis out of range");

    const bool anti = (dir == Holomorphy::Anti);
    TensorField out(t.grid_ptr(), t.signature());
    for (std::size_t c = 0; c < t.ncomp(); ++c)
        grid.wirtinger(t.comp(c).data(), out.comp(c).data(), axis, anti);

    const int n = grid.n();
    const int rank = t.rank();
    const std::size_t np = grid.npoints();
    const auto& sig = t.signature();

    // Slot weights, first slot most significant.
    std::vector<std::size_t> weight(static_cast<std::size_t>(rank), 1);
    for (int s = rank - 2; s >= 0; --s)
        weight[static_cast<std::size_t>(s)] =
            weight[static_cast<std::size_t>(s + 1)] * static_cast<std::size_t>(n);

    for (std::size_t c = 0; c < t.ncomp(); ++c) {
        // decode digits
        int digit[8];
        std::size_t rest = c;
        for (int s = rank - 1; s >= 0; --s) {
            digit[s] = static_cast<int>(rest % static_cast<std::size_t>(n));
            rest /= static_cast<std::size_t>(n);
        }
        cplx* dst = out.comp(c).data();
        for (int s = 0; s < rank; ++s) {
            const Slot slot = sig[static_cast<std::size_t>(s)];
            const bool slot_anti = (slot.h == Holomorphy::Anti);
            if (slot_anti != anti) continue;  // connection acts within one holomorphy class
            const bool upper = (slot.v == Variance::Upper);
            const int k = digit[s];
            for (int p = 0; p < n; ++p) {
                const std::size_t cp = c + (static_cast<std::size_t>(p) - static_cast<std::size_t>(k)) *
                                               weight[static_cast<std::size_t>(s)];
                // upper slot k: + Gamma^k_{a p} t[... p ...]
                // lower slot j: - Gamma^p_{a j} t[... p ...]
                const std::size_t gc = upper
                                           ? pkg.Gamma.comp_index({k, axis, p})
                                           : pkg.Gamma.comp_index({p, axis, k});
                const cplx* gsrc = pkg.Gamma.comp(gc).data();
                const cplx* tsrc = t.comp(cp).data();
                const double sign = upper ? 1.0 : -1.0;
                if (!anti) {
                    for (std::size_t q = 0; q < np; ++q) dst[q] += sign * gsrc[q] * tsrc[q];
                } else {
                    for (std::size_t q = 0; q < np; ++q) dst[q] += sign * std::conj(gsrc[q]) * tsrc[q];
                }
            }
        }
    }
    return out;
}

TensorField covariant_derivative(const TensorField& t, const ChernPackage& pkg, Holomorphy dir) {
    Signature sig;
    sig.reserve(t.signature().size() + 1);
    sig.push_back(Slot{dir, Variance::Lower});
    sig.insert(sig.end(), t.signature().begin(), t.signature().end());
    TensorField out(t.grid_ptr(), sig);
    const int n = t.grid().n();
    for (int a = 0; a < n; ++a) {
        TensorField da = cov_deriv_dir(t, pkg, dir, a);
        for (std::size_t c = 0; c < t.ncomp(); ++c) {
            auto dst = out.comp(static_cast<std::size_t>(a) * t.ncomp() + c);
            auto src = da.comp(c);
            std::copy(src.begin(), src.end(), dst.begin());
        }
    }
    return out;
}

TensorField laplacian_sym(const TensorField& t, const ChernPackage& pkg) {
    const int n = t.grid().n();
    TensorField out(t.grid_ptr(), t.signature());
    for (int r = 0; r < n; ++r) {
        TensorField dr = cov_deriv_dir(t, pkg, Holomorphy::Holo, r);
        for (int s = 0; s < n; ++s) {
            TensorField ds = cov_deriv_dir(t, pkg, Holomorphy::Anti, s);
            TensorField holo_first = cov_deriv_dir(ds, pkg, Holomorphy::Holo, r);
            TensorField anti_first = cov_deriv_dir(dr, pkg, Holomorphy::Anti, s);
            holo_first += anti_first;
            axpy_scalar_field(out, pkg.g_inv.comp(pkg.g_inv.comp_index({r, s})), holo_first, 0.5);
        }
    }
    return out;
}

TensorField laplacian_onesided(const TensorField& t, const ChernPackage& pkg) {
    const int n = t.grid().n();
    TensorField out(t.grid_ptr(), t.signature());
    for (int s = 0; s < n; ++s) {
        TensorField ds = cov_deriv_dir(t, pkg, Holomorphy::Anti, s);
        for (int r = 0; r < n; ++r) {
            TensorField rs = cov_deriv_dir(ds, pkg, Holomorphy::Holo, r);
            axpy_scalar_field(out, pkg.g_inv.comp(pkg.g_inv.comp_index({r, s})), rs, 1.0);
        }
    }
    return out;
}

TensorField tensor_norm_sq(const TensorField& t, const TensorField& g_inv) {
    const int rank = t.rank();
    if (rank > 4) throw std::invalid_argument("tensor_norm_sq: rank > 4 not supported");
    for (const auto& s : t.signature())
        if (s.v != Variance::Lower)
            throw std::invalid_argument("tensor_norm_sq: only all-lower signatures supported");

    std::string spec;
    std::vector<EinsumOp> ops;
    std::string t_letters, c_letters;
    for (int s = 0; s < rank; ++s) {
        const char lt = static_cast<char>('a' + 2 * s);
        const char lc = static_cast<char>('a' + 2 * s + 1);
        t_letters.push_back(lt);
        c_letters.push_back(lc);
        // lower-holo slot pairs (uh x lh) on t and (ua x la) on conj(t);
        // lower-anti slot is the mirror image.
        if (t.signature()[static_cast<std::size_t>(s)].h == Holomorphy::Holo)
            spec += std::string{lt, lc} + ",";
        else
            spec += std::string{lc, lt} + ",";
        ops.emplace_back(g_inv);
    }
    spec += t_letters + "," + c_letters + "->";
    ops.emplace_back(t);
    ops.emplace_back(t, true);
    return einsum(spec, std::move(ops));
}

void axpy_scalar_field(TensorField& out, std::span<const cplx> coeff, const TensorField& t,
                       cplx scale) {
    out.require_same_layout(t);
    if (coeff.size() != out.npoints())
        throw std::invalid_argument("axpy_scalar_field: coeff length mismatch");
    const std::size_t np = out.npoints();
    const cplx* cf = coeff.data();
    for (std::size_t c = 0; c < out.ncomp(); ++c) {
        cplx* dst = out.comp(c).data();
        const cplx* src = t.comp(c).data();
        for (std::size_t p = 0; p < np; ++p) dst[p] += scale * cf[p] * src[p];
    }
}

TensorField scalar_product(const TensorField& a, const TensorField& b) {
    a.require_same_layout(b);
    if (a.rank() != 0) throw std::invalid_argument("scalar_product: scalar fields only");
    TensorField out(a.grid_ptr(), Signature{});
    const cplx* pa = a.comp(0).data();
    const cplx* pb = b.comp(0).data();
    cplx* dst = out.comp(0).data();
    for (std::size_t p = 0; p < a.npoints(); ++p) dst[p] = pa[p] * pb[p];
    return out;
}

TensorNorms tensor_norms(const ChernPackage& pkg) {
    TensorNorms out{
        tensor_norm_sq(pkg.Rm_lowered, pkg.g_inv),
        tensor_norm_sq(pkg.T_lowered, pkg.g_inv),
        TensorField(pkg.Rm_lowered.grid_ptr(), Signature{}),
        TensorField(pkg.Rm_lowered.grid_ptr(), Signature{}),
        0, 0, 0, 0, 0};

    {
        TensorField gradT_h = covariant_derivative(pkg.T_lowered, pkg, Holomorphy::Holo);
        out.gradT_sq = tensor_norm_sq(gradT_h, pkg.g_inv);
    }
    {
        TensorField gradT_a = covariant_derivative(pkg.T_lowered, pkg, Holomorphy::Anti);
        out.gradT_sq += tensor_norm_sq(gradT_a, pkg.g_inv);
    }

    const std::size_t np = pkg.Rm_lowered.npoints();
    cplx* F = out.F.comp(0).data();
    const cplx* rm = out.rm_sq.comp(0).data();
    const cplx* ts = out.t_sq.comp(0).data();
    const cplx* gt = out.gradT_sq.comp(0).data();
    double k_now = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
        const double rm2 = std::max(0.0, rm[p].real());
        const double t2 = std::max(0.0, ts[p].real());
        const double gt2 = std::max(0.0, gt[p].real());
        F[p] = cplx(rm2 + t2 * t2 + gt2, 0.0);
        k_now = std::max(k_now, std::sqrt(rm2) + t2 + std::sqrt(gt2));
    }
    out.sup_rm = 0.0;
    out.sup_t_sq = 0.0;
    out.sup_gradT = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
        out.sup_rm = std::max(out.sup_rm, std::sqrt(std::max(0.0, rm[p].real())));
        out.sup_t_sq = std::max(out.sup_t_sq, std::max(0.0, ts[p].real()));
        out.sup_gradT = std::max(out.sup_gradT, std::sqrt(std::max(0.0, gt[p].real())));
    }
    out.sup_F = max_real(out.F);
    out.K_now = k_now;
    return out;
}

}  // namespace hcf
