#include "hcf/conditions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hcf/chern.hpp"
#include "hcf/rng.hpp"

namespace hcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

pointwise::Vec random_unit(int n, const pointwise::Mat& g, RngStream& rng) {
    pointwise::Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.next_gaussian();
    return pointwise::g_normalized(g, x);
}

/// Form matrix of the X-quadratic at fixed Y:
///   f = sum conj(X[a]) H[a][b] X[b],  H[a][b] = sum_{kl} R[b,a,k,l] Y[k] conj(Y[l]).
pointwise::Mat x_form(const PointTensor4& R, const pointwise::Vec& y) {
    const int n = R.n;
    pointwise::Mat h(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx acc = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += R.at(b, a, k, l) * y(k) * std::conj(y(l));
            h(a, b) = acc;
        }
    return h;
}

/// Same with the roles swapped: H[a][b] = sum_{ij} R[i,j,b,a] X[i] conj(X[j]).
pointwise::Mat y_form(const PointTensor4& R, const pointwise::Vec& x) {
    const int n = R.n;
    pointwise::Mat h(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) acc += R.at(i, j, b, a) * x(i) * std::conj(x(j));
            h(a, b) = acc;
        }
    return h;
}

}  // namespace

double PointTensor4::hermitian_deviation() const {
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    dev = std::max(dev, std::abs(std::conj(at(i, j, k, l)) - at(j, i, l, k)));
    return dev;
}

PointTensor4 gather4(const TensorField& t, std::size_t p) {
    if (t.rank() != 4) throw std::invalid_argument("gather4: rank-4 field required");
    PointTensor4 out;
    out.n = t.grid().n();
    for (std::size_t c = 0; c < t.ncomp(); ++c) out.v[c] = t.at(c, p);
    return out;
}

PointTensor4 b_tensor_point(const pointwise::Mat& g) {
    PointTensor4 b;
    b.n = static_cast<int>(g.rows());
    for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j)
            for (int k = 0; k < b.n; ++k)
                for (int l = 0; l < b.n; ++l)
                    b.at(i, j, k, l) = g(i, j) * g(k, l) + g(i, l) * g(k, j);
    return b;
}

double bihermitian_value(const PointTensor4& R, const pointwise::Vec& X, const pointwise::Vec& Y) {
    cplx acc = 0.0;
    for (int i = 0; i < R.n; ++i)
        for (int j = 0; j < R.n; ++j)
            for (int k = 0; k < R.n; ++k)
                for (int l = 0; l < R.n; ++l)
                    acc += R.at(i, j, k, l) * X(i) * std::conj(X(j)) * Y(k) * std::conj(Y(l));
    return acc.real();
}

// ---------------------------------------------------------------------------

GriffithsPoint griffiths_extremum_point(const PointTensor4& R_in, const pointwise::Mat& g,
                                        const GriffithsOptions& opt, std::uint64_t point_label,
                                        double reference_scale) {
    const int n = R_in.n;
    // Index-wiring bugs produce O(1) relative asymmetry; discretization tails
    // scale with the field, not the point. Gate on the deviation relative to
    // the larger of the point's own scale and the caller-provided field
    // scale, then work with the Hermitian part so the eigenproblems are
    // exactly well-posed.
    double scale = reference_scale;
    for (const auto& v : R_in.v) scale = std::max(scale, std::abs(v));
    const double dev = R_in.hermitian_deviation();
    if (dev > 1e-9 && dev > 0.05 * scale)
        throw std::invalid_argument("griffiths_extremum: input tensor is not Hermitian-consistent");
    if (pointwise::min_eigenvalue(g) <= 0.0)
        throw std::invalid_argument("griffiths_extremum: metric not positive definite");

    PointTensor4 R = R_in;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    R.at(i, j, k, l) =
                        0.5 * (R_in.at(i, j, k, l) + std::conj(R_in.at(j, i, l, k)));

    const pointwise::Mat gform = pointwise::form_matrix(g);

    GriffithsPoint best{-std::numeric_limits<double>::infinity(), pointwise::Vec(n),
                        pointwise::Vec(n), true, 0, kNaN};

    RngStream rng(opt.seed, 0x62196, point_label);
    // starts: each g-normalized basis vector, then random draws
    std::vector<pointwise::Vec> starts;
    for (int k = 0; k < n; ++k) {
        pointwise::Vec e = pointwise::Vec::Zero(n);
        e(k) = 1.0;
        starts.push_back(pointwise::g_normalized(g, e));
    }
    for (int r = 0; r < opt.restarts; ++r) starts.push_back(random_unit(n, g, rng));

    for (const auto& y0 : starts) {
        pointwise::Vec y = y0;
        pointwise::Vec x = pointwise::Vec::Zero(n);
        double value = -std::numeric_limits<double>::infinity();
        bool converged = false;
        int it = 0;
        for (; it < opt.max_iters; ++it) {
            // maximize over X at fixed Y, then over Y at fixed X
            {
                Eigen::GeneralizedSelfAdjointEigenSolver<pointwise::Mat> s(x_form(R, y), gform);
                x = s.eigenvectors().col(n - 1);
                x = pointwise::g_normalized(g, x);
            }
            Eigen::GeneralizedSelfAdjointEigenSolver<pointwise::Mat> s(y_form(R, x), gform);
            const double next = s.eigenvalues()(n - 1);
            y = pointwise::g_normalized(g, s.eigenvectors().col(n - 1));
            if (std::abs(next - value) <= opt.fp_tol * (1.0 + std::abs(next))) {
                value = next;
                converged = true;
                break;
            }
            value = next;
        }
        // the eigenvalue IS the form value at the normalized pair
        if (value > best.kappa) {
            best.kappa = value;
            best.X = x;
            best.Y = y;
            best.converged = converged;
            best.iters = it + 1;
        }
    }

    if (opt.compute_ratio_bound && best.kappa <= 0.0) {
        // maximize R/B by the same alternation; B-side forms are positive.
        const PointTensor4 B = b_tensor_point(g);
        double ratio = -std::numeric_limits<double>::infinity();
        pointwise::Vec y = best.Y;
        if (y.norm() == 0.0) y = random_unit(n, g, rng);
        for (int it = 0; it < opt.max_iters; ++it) {
            Eigen::GeneralizedSelfAdjointEigenSolver<pointwise::Mat> sx(x_form(R, y), x_form(B, y));
            pointwise::Vec x = sx.eigenvectors().col(n - 1);
            Eigen::GeneralizedSelfAdjointEigenSolver<pointwise::Mat> sy(y_form(R, x), y_form(B, x));
            const double next = sy.eigenvalues()(n - 1);
            y = sy.eigenvectors().col(n - 1);
            if (std::abs(next - ratio) <= opt.fp_tol * (1.0 + std::abs(next))) {
                ratio = next;
                break;
            }
            ratio = next;
        }
        best.kappa_ratio = ratio;
    }
    return best;
}

GriffithsField griffiths_field(const TensorField& Rm_lowered, const MetricField& g,
                               const GriffithsOptions& opt, std::size_t stride) {
    if (stride == 0) stride = 1;
    const std::size_t np = Rm_lowered.npoints();
    GriffithsField out{TensorField(Rm_lowered.grid_ptr(), Signature{}),
                       TensorField(Rm_lowered.grid_ptr(), Signature{}),
                       -std::numeric_limits<double>::infinity(),
                       0,
                       pointwise::Vec(),
                       pointwise::Vec(),
                       0,
                       opt.restarts,
                       true};
    auto kappa = out.kappa.comp(0);
    auto ratio = out.kappa_ratio.comp(0);
    std::fill(kappa.begin(), kappa.end(), cplx(kNaN, 0.0));
    std::fill(ratio.begin(), ratio.end(), cplx(kNaN, 0.0));

    const double field_scale = sup_abs(Rm_lowered);
    for (std::size_t p = 0; p < np; p += stride) {
        const PointTensor4 R = gather4(Rm_lowered, p);
        const pointwise::Mat gm = pointwise::gather(g.tensor(), p);
        GriffithsPoint gp = griffiths_extremum_point(R, gm, opt, p, field_scale);
        kappa[p] = cplx(gp.kappa, 0.0);
        ratio[p] = cplx(gp.kappa_ratio, 0.0);
        out.all_converged = out.all_converged && gp.converged;
        ++out.points_sampled;
        if (gp.kappa > out.global_max) {
            out.global_max = gp.kappa;
            out.argmax = p;
            out.X = gp.X;
            out.Y = gp.Y;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

EpsilonShift eps_shift(const TensorField& Rm_lowered, const MetricField& g, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("eps_shift: epsilon must be nonnegative");
    const TensorField& gt = g.tensor();
    TensorField B = einsum("ij,kl->ijkl", {gt, gt});
    einsum_into(B, 1.0, "il,kj->ijkl", {gt, gt});

    TensorField R_eps = Rm_lowered.clone();
    R_eps -= B * cplx(epsilon);
    // restore: B*(eps) mutated a copy, not B itself
    // (operator* copies; nothing to undo)

    // exact pointwise identity: g^{k lbar} B_{i jbar k lbar} = (n+1) g_{i jbar}
    TensorField traceB = einsum("kl,ijkl->ij", {g.inverse(), B});
    TensorField expect = gt.clone();
    expect *= cplx(static_cast<double>(g.n() + 1));
    const double residual = sup_abs_diff(traceB, expect);
    if (residual > 1e-10)
        throw std::logic_error("eps_shift: B trace identity violated (residual " +
                               std::to_string(residual) + ")");
    return {epsilon, std::move(B), std::move(R_eps), residual};
}

// ---------------------------------------------------------------------------

RicciSpectrum ricci_spectrum(const TensorField& Ric, const MetricField& g) {
    const int n = g.n();
    const std::size_t np = Ric.npoints();
    RicciSpectrum out;
    out.eigenvalues.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out.eigenvalues.emplace_back(Ric.grid_ptr(), Signature{});
    out.global_max = -std::numeric_limits<double>::infinity();
    out.min_of_max = std::numeric_limits<double>::infinity();
    out.argmax = 0;
    out.arg_min_of_max = 0;

    for (std::size_t p = 0; p < np; ++p) {
        const pointwise::Mat ric = pointwise::gather(Ric, p);
        const pointwise::Mat gm = pointwise::gather(g.tensor(), p);
        const pointwise::RVec ev = pointwise::pencil_eigvals(ric, gm);
        for (int k = 0; k < n; ++k) out.eigenvalues[static_cast<std::size_t>(k)].at(0, p) = ev(k);
        const double top = ev(n - 1);
        if (top > out.global_max) {
            out.global_max = top;
            out.argmax = p;
        }
        if (top < out.min_of_max) {
            out.min_of_max = top;
            out.arg_min_of_max = p;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

PinchPointResult pinch_margin_point(const PointTensor4& R_eps, const pointwise::Mat& ric_eps,
                                    const pointwise::Mat& g, double K, double t, long nsamples,
                                    std::uint64_t seed) {
    const int n = static_cast<int>(g.rows());
    PinchPointResult out{std::numeric_limits<double>::infinity(), true, 0, 0.0};

    const auto pe = pointwise::pencil_eig(ric_eps, g);
    if (pe.evals(n - 1) >= 0.0) out.precondition_ok = false;

    const pointwise::Mat ric_form = pointwise::form_matrix(ric_eps);
    const double factor = 1.0 + K * t;

    auto margin = [&](const pointwise::Vec& x, const pointwise::Vec& u, const pointwise::Vec& v) {
        const double ruu = (u.adjoint() * ric_form * u)(0).real();
        const double rvv = (v.adjoint() * ric_form * v)(0).real();
        cplx ruvxx = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        ruvxx += R_eps.at(i, j, k, l) * u(i) * std::conj(v(j)) * x(k) *
                                 std::conj(x(l));
        const double prod = ruu * rvv;
        if (prod > 0.0)
            out.polarization_ratio = std::max(out.polarization_ratio, std::norm(ruvxx) / prod);
        return factor * prod - std::norm(ruvxx);
    };

    // structured directions: eigenvectors of the Ric_eps pencil, g-normalized
    std::vector<pointwise::Vec> dirs;
    for (int k = 0; k < n; ++k) dirs.push_back(pointwise::g_normalized(g, pe.evecs.col(k)));
    for (const auto& x : dirs)
        for (const auto& u : dirs)
            for (const auto& v : dirs) {
                out.min_margin = std::min(out.min_margin, margin(x, u, v));
                ++out.samples;
            }

    RngStream rng(seed, 0x714c4);
    while (out.samples < nsamples) {
        const pointwise::Vec x = random_unit(n, g, rng);
        const pointwise::Vec u = random_unit(n, g, rng);
        const pointwise::Vec v = random_unit(n, g, rng);
        out.min_margin = std::min(out.min_margin, margin(x, u, v));
        ++out.samples;
    }
    return out;
}

PinchReport pinch_margin(const EpsilonShift& shift, const MetricField& g, const PinchOptions& opt) {
    g.require_positive("pinch_margin");
    const std::size_t np = g.tensor().npoints();
    const std::size_t stride = opt.stride == 0 ? 1 : opt.stride;
    const std::size_t points = (np + stride - 1) / stride;
    const long per_point =
        std::max<long>(1, (opt.samples + static_cast<long>(points) - 1) / static_cast<long>(points));

    TensorField ric_eps = first_ricci_trace(shift.R_eps, g.inverse());

    PinchReport out{std::numeric_limits<double>::infinity(), 0, true, "", 0, 0.0,
                    TensorField(g.grid_ptr(), Signature{})};
    auto wm = out.worst_margin.comp(0);
    std::fill(wm.begin(), wm.end(), cplx(kNaN, 0.0));

    for (std::size_t p = 0; p < np; p += stride) {
        const PointTensor4 R = gather4(shift.R_eps, p);
        const pointwise::Mat ric = pointwise::gather(ric_eps, p);
        const pointwise::Mat gm = pointwise::gather(g.tensor(), p);
        PinchPointResult r = pinch_margin_point(R, ric, gm, opt.K, opt.t, per_point,
                                                splitmix64(opt.seed) ^ p);
        wm[p] = cplx(r.min_margin, 0.0);
        out.samples_evaluated += r.samples;
        out.polarization_ratio = std::max(out.polarization_ratio, r.polarization_ratio);
        if (!r.precondition_ok && out.precondition_ok) {
            out.precondition_ok = false;
            out.violation_reason = "Ric_eps not strictly negative at point " + std::to_string(p);
        }
        if (r.min_margin < out.min_margin) {
            out.min_margin = r.min_margin;
            out.argmin_point = p;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

ConditionSummary classify(const GriffithsField& griffiths, const RicciSpectrum& ricci,
                          double tolerance) {
    ConditionSummary s{};
    s.tolerance = tolerance;
    s.kappa_max = griffiths.global_max;
    s.ricci_max_eigenvalue = ricci.global_max;
    s.ricci_min_of_max_eigenvalue = ricci.min_of_max;
    s.griffiths_witness = griffiths.argmax;
    s.ricci_witness = ricci.argmax;
    s.griffiths_nonpositive = griffiths.global_max <= tolerance;
    s.ricci_nonpositive = ricci.global_max <= tolerance;
    s.ricci_quasi_negative = s.ricci_nonpositive && ricci.min_of_max < -tolerance;
    return s;
}

}  // namespace hcf
