/// @file verify.hpp
/// @brief Independent oracles for the curvature evolution equations and the
/// end-to-end identity suites.
///
/// The evolution check compares a centered finite difference in time of the
/// curvature (recomputed from stored metrics, never from cached packages)
/// against the analytic right-hand side assembled from the current package.
/// Both Laplacian conventions are assembled and reported; the symmetrized
/// form 1/2 g^{r sbar}(nabla_r nabla_sbar + nabla_sbar nabla_r) is the one
/// that closes against the finite difference.

#pragma once

#include <string>
#include <vector>

#include "hcf/chern.hpp"
#include "hcf/flow.hpp"
#include "hcf/metric.hpp"

namespace hcf {

// ---------------------------------------------------------------------------
// Right-hand sides

/// Terms of the lowered-curvature evolution equation; full() adds them with
/// the symmetrized Laplacian, full_onesided() with g^{r sbar} nabla_r nabla_sbar.
struct RmEvolutionRhs {
    TensorField laplacian_sym;
    TensorField laplacian_onesided;
    TensorField torsion_bracket;  // g^{r sbar}[ T nabla R + Tbar nabla R + T Tbar R ]
    TensorField quadratic;        // the three curvature-product terms
    TensorField s_quartet;        // -(1/2) [S R + S R + Sbar R + Sbar R]

    TensorField full() const;
    TensorField full_onesided() const;
};
RmEvolutionRhs rhs_rm_evolution(const ChernPackage& pkg);

struct RicciEvolutionRhs {
    TensorField laplacian_sym;
    TensorField laplacian_onesided;
    TensorField torsion_bracket;
    TensorField quadratic;  // R_{i jbar k}^p R_p^k
    TensorField s_pair;     // -(1/2)[S^p_i R_{p jbar} + Sbar^q_jbar R_{i qbar}]

    TensorField full() const;
    TensorField full_onesided() const;
};
RicciEvolutionRhs rhs_ricci_evolution(const ChernPackage& pkg);

// ---------------------------------------------------------------------------
// Finite-difference oracle

enum class EvolvedQuantity { Rm, Ric };

/// Centered difference (Q(g_hi) - Q(g_lo)) / (2 delta), with Q recomputed
/// from the stored metrics.
TensorField fd_time_derivative(const MetricField& g_lo, const MetricField& g_hi, double delta,
                               EvolvedQuantity q);

struct EvolutionResidual {
    std::string which;  // "full_curvature" | "first_ricci"
    double t_star;
    double delta;
    int resolution;
    double residual_sup;            // |fd - rhs| with the symmetrized Laplacian
    double residual_mean;
    double residual_sup_onesided;   // alternate assembly, reported alongside
    double rhs_sup;                 // scale of the right-hand side
};

/// Integrates the flow from g0 with a fixed dt that lands exactly on
/// t_star - delta_k, t_star, t_star + delta_k for every requested delta, then
/// evaluates the residual per delta and fits residual ~ A delta^2 + floor.
struct EvolutionStudy {
    std::vector<EvolutionResidual> rows;  // one per delta, descending delta
    double measured_order;                // log2 ratio between the two largest deltas
    double fitted_A;                      // residual ~ A delta^2 + floor
    double fitted_floor;
    double tol(double delta) const { return 2.0 * (fitted_A * delta * delta + fitted_floor); }
};
EvolutionStudy evolution_study(const MetricField& g0, double t_star, std::vector<double> deltas,
                               EvolvedQuantity q, double dt_hint = 0.0);

// ---------------------------------------------------------------------------
// Identity suite

struct IdentityRecord {
    std::string name;
    double value;
    double tol;
    bool pass;
};

/// One named residual per identity: the four commutation rules, the five
/// torsion-Bianchi identities (both forms of the third), conjugation
/// symmetry, Ricci trace-vs-logdet, nabla g = 0, the B-trace constant,
/// realness of R(X, Xbar, Y, Ybar), Hermitianity of both Ricci tensors, and
/// the traced Ricci-difference identity.
std::vector<IdentityRecord> identity_suite(const ChernPackage& pkg, double tol,
                                           std::uint64_t seed = 7);

bool all_pass(const std::vector<IdentityRecord>& records);

/// Plain-text report: one line per record (name, value, tolerance, PASS/FAIL).
std::string format_report(const std::vector<IdentityRecord>& records);

}  // namespace hcf
