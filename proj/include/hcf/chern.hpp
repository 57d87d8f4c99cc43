/// @file chern.hpp
/// @brief Chern connection, torsion, curvature and derived tensors of a
/// Hermitian metric.
///
/// Slot-order conventions (component index order = symbol reading order):
///   Gamma^k_{ij}      -> comps (k, i, j), slots (uh, lh, lh); i is the
///                        derivative direction: Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}
///   T^k_{ij}          -> comps (k, i, j);  T_{ij kbar} -> comps (i, j, k)
///   R_{i jbar k}^l    -> comps (i, j, k, l), slots (lh, la, lh, uh),
///                        R_{i jbar k}^l = -d_{jbar} Gamma^l_{ik}
///   R_{i jbar k lbar} -> comps (i, j, k, l), all lower
///   R_{i jbar}        -> first Ricci (trace over k,l);  S_{i jbar} -> second
///                        Ricci (trace over the first pair)
///
/// covariant_derivative() prepends the direction slot: (nabla_p t)[p, ...].

#pragma once

#include "hcf/metric.hpp"
#include "hcf/tensor.hpp"

namespace hcf {

struct ChernPackage {
    MetricField g;
    TensorField g_inv;      // g^{k lbar}
    TensorField Gamma;      // Gamma^k_{ij}
    TensorField T_mixed;    // T^k_{ij}
    TensorField T_lowered;  // T_{ij kbar}
    TensorField Rm_mixed;   // R_{i jbar k}^l
    TensorField Rm_lowered; // R_{i jbar k lbar}
    TensorField Ric_first;  // R_{i jbar}
    TensorField Ric_second; // S_{i jbar}
};

/// Full curvature package. Requires g positive definite (throws with the
/// offending point otherwise).
ChernPackage compute_chern(const MetricField& g);

// Stand-alone stages (the package builder composes these).
TensorField christoffel(const MetricField& g);
struct TorsionPair {
    TensorField mixed;
    TensorField lowered;
};
TorsionPair torsion(const TensorField& Gamma, const MetricField& g);
struct CurvaturePair {
    TensorField mixed;
    TensorField lowered;
};
CurvaturePair curvature(const MetricField& g);

TensorField first_ricci_trace(const TensorField& Rm_lowered, const TensorField& g_inv);
/// -d_i d_{jbar} log det g; shares no intermediate with the Gamma route, so it
/// serves as the module's independent Ricci oracle.
TensorField first_ricci_logdet(const MetricField& g);
TensorField second_ricci(const TensorField& Rm_lowered, const TensorField& g_inv);

/// Second Ricci straight from the metric without materializing Rm (flow stages).
TensorField second_ricci_of(const MetricField& g);

/// Fixed-direction covariant derivative; signature-preserving. For the mixed
/// second derivatives used by the tensor Laplacian the direction slots never
/// receive connection corrections, so composing two of these is exact.
TensorField cov_deriv_dir(const TensorField& t, const ChernPackage& pkg, Holomorphy dir, int axis);

/// All directions assembled, prepending one lower slot of the given class.
TensorField covariant_derivative(const TensorField& t, const ChernPackage& pkg, Holomorphy dir);

/// 1/2 g^{r sbar} (nabla_r nabla_sbar + nabla_sbar nabla_r) t.
TensorField laplacian_sym(const TensorField& t, const ChernPackage& pkg);
/// g^{r sbar} nabla_r nabla_sbar t (outer holomorphic derivative).
TensorField laplacian_onesided(const TensorField& t, const ChernPackage& pkg);

/// |t|^2 with every lower slot contracted against g^{-1} and the conjugate;
/// 0-slot real field. Only all-lower signatures are supported.
TensorField tensor_norm_sq(const TensorField& t, const TensorField& g_inv);

struct TensorNorms {
    TensorField rm_sq;     // |Rm|^2 pointwise
    TensorField t_sq;      // |T|^2 pointwise
    TensorField gradT_sq;  // |nabla T|^2 + |nablabar T|^2 pointwise
    TensorField F;         // |Rm|^2 + |T|^4 + |nabla T|^2
    double sup_rm;
    double sup_t_sq;
    double sup_gradT;
    double sup_F;
    double K_now;  // sup over points of |Rm| + |T|^2 + |nabla T|
};
TensorNorms tensor_norms(const ChernPackage& pkg);

/// out += scale * coeff * t, with coeff one scalar component (npoints values).
void axpy_scalar_field(TensorField& out, std::span<const cplx> coeff, const TensorField& t,
                       cplx scale = 1.0);

/// Pointwise product of two 0-slot fields.
TensorField scalar_product(const TensorField& a, const TensorField& b);

}  // namespace hcf
