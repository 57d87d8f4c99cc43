/// @file metric.hpp
/// @brief Positive-definite Hermitian metric fields g_{i jbar}.

#pragma once

#include <cstddef>
#include <string>

#include "hcf/tensor.hpp"

namespace hcf {

/// In-place Hermitian projection of a (lower-holo, lower-anti) field:
/// t <- (t + conj-transpose)/2.
void hermitize_rank2(TensorField& t);

class MetricField {
public:
    /// Flat metric g = delta.
    static MetricField identity(const GridPtr& grid);

    /// Takes ownership of a (lower-holo, lower-anti) field; throws on a wrong
    /// signature. Hermitianity/positivity are the caller's contract and can be
    /// checked with hermitian_deviation() / positivity().
    explicit MetricField(TensorField g);

    const TensorField& tensor() const { return g_; }
    TensorField& tensor() { return g_; }
    const TorusGrid& grid() const { return g_.grid(); }
    const GridPtr& grid_ptr() const { return g_.grid_ptr(); }
    int n() const { return g_.grid().n(); }

    /// max |g_{i jbar} - conj(g_{j ibar})| over the grid.
    double hermitian_deviation() const;

    /// Projects onto the Hermitian part: g <- (g + conj-transpose)/2.
    void hermitize();

    struct Positivity {
        bool positive;
        std::size_t worst_point;
        double min_eigenvalue;
    };
    /// Sylvester scan over all points; the reported eigenvalue is computed at
    /// the worst point found.
    Positivity positivity() const;

    /// Throws std::runtime_error naming the offending point unless positive.
    void require_positive(const std::string& where) const;

    /// Inverse metric, comp (k, l) = g^{k lbar}  (so g^{k lbar} g_{j lbar} = delta^k_j).
    TensorField inverse() const;

    /// Scalar field log det g; throws on non-positive determinant.
    TensorField log_determinant() const;

private:
    TensorField g_;
};

}  // namespace hcf
