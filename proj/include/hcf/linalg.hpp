/// @file linalg.hpp
/// @brief Pointwise Hermitian linear algebra on n x n blocks (n <= 3).
///
/// Conventions: a rank-2 field with comp (i, j) holding h_{i jbar} defines the
/// sesquilinear form  h(X, Ybar) = sum_{ij} h[i][j] X^i conj(Y^j).  As an
/// Eigen quadratic form x^H A x this corresponds to A = M^T, which is what
/// form_matrix() returns; eigenvectors of the pencil (A, G^T) are component
/// vectors X^i directly.

#pragma once

#include <Eigen/Dense>
#include <complex>

#include "hcf/tensor.hpp"

namespace hcf::pointwise {

using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// M[i][j] = comp(i, j) at grid point p.
inline Mat gather(const TensorField& rank2, std::size_t p) {
    const int n = rank2.grid().n();
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = rank2.at(static_cast<std::size_t>(i * n + j), p);
    return m;
}

inline void scatter(TensorField& rank2, std::size_t p, const Mat& m) {
    const int n = rank2.grid().n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rank2.at(static_cast<std::size_t>(i * n + j), p) = m(i, j);
}

/// Quadratic-form matrix of the index convention above.
inline Mat form_matrix(const Mat& m) { return m.transpose(); }

/// h(X, Xbar) for a gathered rank-2 block.
inline double form_value(const Mat& m, const Vec& x) {
    cplx acc = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * x(i) * std::conj(x(j));
    return acc.real();
}

struct PencilEig {
    RVec evals;  // ascending
    Mat evecs;   // columns are component vectors X^i
};

/// Eigenvalues/vectors of h(X, Xbar) = lambda g(X, Xbar); g positive definite.
inline PencilEig pencil_eig(const Mat& h, const Mat& g) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(form_matrix(h), form_matrix(g),
                                                         Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RVec pencil_eigvals(const Mat& h, const Mat& g) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(form_matrix(h), form_matrix(g),
                                                         Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return solver.eigenvalues();
}

/// Smallest eigenvalue of a Hermitian block (metric positivity diagnostics).
inline double min_eigenvalue(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(form_matrix(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

/// g-norm and g-normalization of a component vector.
inline double g_norm_sq(const Mat& g, const Vec& x) { return form_value(g, x); }

inline Vec g_normalized(const Mat& g, const Vec& x) {
    double nn = g_norm_sq(g, x);
    return x / std::sqrt(nn);
}

}  // namespace hcf::pointwise
