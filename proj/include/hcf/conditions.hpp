/// @file conditions.hpp
/// @brief Pointwise curvature-condition analysis.
///
/// Point kernels operate on per-point tensor blocks so they serve both grid
/// fields and synthetic injected tensors. Sign conventions:
///   kappa_hat(p) = max over g-unit X, Y of Re R(X, Xbar, Y, Ybar)
///   (<= 0 everywhere is Griffiths non-positivity), and the Def-style bound
///   kappa_ratio(p) = max over pairs of R(...)/B(...), valid when kappa_hat <= 0.
/// B_{i jbar k lbar} = g_{i jbar} g_{k lbar} + g_{i lbar} g_{k jbar}.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hcf/linalg.hpp"
#include "hcf/metric.hpp"
#include "hcf/tensor.hpp"

namespace hcf {

// ---------------------------------------------------------------------------
// Point-level data

struct PointTensor4 {
    int n = 1;
    std::array<cplx, 81> v{};
    cplx& at(int i, int j, int k, int l) {
        return v[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
    }
    const cplx& at(int i, int j, int k, int l) const {
        return v[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
    }
    /// max | conj(R_{i jbar k lbar}) - R_{j ibar l kbar} |
    double hermitian_deviation() const;
};

PointTensor4 gather4(const TensorField& t, std::size_t p);

/// B at a point from the metric block.
PointTensor4 b_tensor_point(const pointwise::Mat& g);

/// Re R(X, Xbar, Y, Ybar).
double bihermitian_value(const PointTensor4& R, const pointwise::Vec& X, const pointwise::Vec& Y);

// ---------------------------------------------------------------------------
// Griffiths extremization (alternating generalized-eigenvector ascent)

struct GriffithsOptions {
    int restarts = 8;       // random restarts per point (basis starts are always added)
    int max_iters = 100;
    double fp_tol = 1e-10;
    std::uint64_t seed = 1;
    bool compute_ratio_bound = true;
};

struct GriffithsPoint {
    double kappa;  // max R over unit pairs
    pointwise::Vec X, Y;
    bool converged;
    int iters;
    double kappa_ratio;  // max R/B (meaningful when kappa <= 0); NaN if skipped
};

/// Throws std::invalid_argument when R is not Hermitian-consistent (relative
/// to max(its own scale, reference_scale); field drivers pass the field sup so
/// near-zero points are judged against the field, not against themselves) or
/// when g is not positive definite. The extremizer works on the Hermitian
/// projection of the input.
GriffithsPoint griffiths_extremum_point(const PointTensor4& R, const pointwise::Mat& g,
                                        const GriffithsOptions& opt, std::uint64_t point_label = 0,
                                        double reference_scale = 0.0);

struct GriffithsField {
    TensorField kappa;        // 0-slot real; NaN at unsampled points
    TensorField kappa_ratio;  // same layout
    double global_max;
    std::size_t argmax;
    pointwise::Vec X, Y;  // extremizing pair at argmax
    long points_sampled;
    int restarts;
    bool all_converged;
};

/// Every `stride`-th grid point is analyzed (stride 1 = certified sampling of
/// the whole grid at the per-point level).
GriffithsField griffiths_field(const TensorField& Rm_lowered, const MetricField& g,
                               const GriffithsOptions& opt, std::size_t stride = 1);

// ---------------------------------------------------------------------------
// Epsilon shift

struct EpsilonShift {
    double epsilon;
    TensorField B;      // g_{i jbar} g_{k lbar} + g_{i lbar} g_{k jbar}
    TensorField R_eps;  // R - epsilon B
    double trace_residual;  // sup | g^{k lbar} B_{i jbar k lbar} - (n+1) g_{i jbar} |
};

/// Throws std::invalid_argument for epsilon < 0; std::logic_error if the
/// exact pointwise trace identity fails beyond rounding.
EpsilonShift eps_shift(const TensorField& Rm_lowered, const MetricField& g, double epsilon);

// ---------------------------------------------------------------------------
// Ricci spectrum

struct RicciSpectrum {
    std::vector<TensorField> eigenvalues;  // n real scalar fields, ascending
    double global_max;
    std::size_t argmax;
    double min_of_max;  // min over points of the largest eigenvalue
    std::size_t arg_min_of_max;
};

RicciSpectrum ricci_spectrum(const TensorField& Ric, const MetricField& g);

// ---------------------------------------------------------------------------
// Pinching margin

struct PinchOptions {
    double K = 0.0;
    double t = 0.0;
    long samples = 10000;  // total triples across all sampled points
    std::uint64_t seed = 1;
    std::size_t stride = 1;
};

struct PinchReport {
    double min_margin;
    std::size_t argmin_point;
    bool precondition_ok;          // Ric_eps strictly negative at sampled points
    std::string violation_reason;  // empty when precondition_ok
    long samples_evaluated;
    /// max over samples of |R_eps(u,vbar,x,xbar)|^2 / (Ric_eps(u) Ric_eps(v));
    /// the empirical polarization constant (logged, never asserted).
    double polarization_ratio;
    TensorField worst_margin;  // per-point minimum over that point's triples (NaN unsampled)
};

/// margin(x,u,v) = (1 + K t) Ric_eps(u,ubar) Ric_eps(v,vbar) - |R_eps(u,vbar,x,xbar)|^2
/// minimized over g-unit triples: stratified random samples plus all triples
/// of Ric_eps eigenvector directions.
PinchReport pinch_margin(const EpsilonShift& shift, const MetricField& g, const PinchOptions& opt);

/// Point-level variant used by the synthetic injection path.
struct PinchPointResult {
    double min_margin;
    bool precondition_ok;
    long samples;
    double polarization_ratio;
};
PinchPointResult pinch_margin_point(const PointTensor4& R_eps, const pointwise::Mat& ric_eps,
                                    const pointwise::Mat& g, double K, double t, long nsamples,
                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Classification

struct ConditionSummary {
    bool griffiths_nonpositive;
    bool ricci_nonpositive;
    bool ricci_quasi_negative;
    double kappa_max;
    double ricci_max_eigenvalue;
    double ricci_min_of_max_eigenvalue;
    std::size_t griffiths_witness;
    std::size_t ricci_witness;
    double tolerance;
};

ConditionSummary classify(const GriffithsField& griffiths, const RicciSpectrum& ricci,
                          double tolerance = 1e-8);

}  // namespace hcf
