/// @file tensor.hpp
/// @brief Grid-valued complex tensors with typed index signatures.
///
/// Every index slot is tagged (holomorphic | antiholomorphic) x (upper | lower).
/// Contractions go through einsum(), which checks that each summed pair joins
/// an upper slot with a lower slot of the same holomorphy class -- the only
/// contractions that are meaningful here -- so a miswired index chain throws
/// instead of silently producing numbers.
///
/// Storage is component-major: each component is a contiguous scalar field,
/// which keeps both spectral differentiation (per component) and einsum
/// accumulation (streaming over grid points) cache-friendly.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcf/grid.hpp"
#include "hcf/trigpoly.hpp"

namespace hcf {

enum class Holomorphy : std::uint8_t { Holo, Anti };
enum class Variance : std::uint8_t { Upper, Lower };

struct Slot {
    Holomorphy h;
    Variance v;
    bool operator==(const Slot&) const = default;
};

using Signature = std::vector<Slot>;

// Shorthand used throughout: lh/la = lower holo/anti, uh/ua = upper holo/anti.
inline constexpr Slot lh{Holomorphy::Holo, Variance::Lower};
inline constexpr Slot la{Holomorphy::Anti, Variance::Lower};
inline constexpr Slot uh{Holomorphy::Holo, Variance::Upper};
inline constexpr Slot ua{Holomorphy::Anti, Variance::Upper};

class TensorField {
public:
    TensorField() = default;
    TensorField(GridPtr grid, Signature sig);  // zero-initialized

    const TorusGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const Signature& signature() const { return sig_; }
    int rank() const { return static_cast<int>(sig_.size()); }
    std::size_t ncomp() const { return ncomp_; }
    std::size_t npoints() const { return grid_->npoints(); }

    std::span<cplx> comp(std::size_t c) {
        return {data_.data() + c * npoints(), npoints()};
    }
    std::span<const cplx> comp(std::size_t c) const {
        return {data_.data() + c * npoints(), npoints()};
    }

    /// Flat component index from per-slot indices (first slot most significant).
    std::size_t comp_index(std::initializer_list<int> idx) const;

    cplx& at(std::size_t c, std::size_t p) { return data_[c * npoints() + p]; }
    const cplx& at(std::size_t c, std::size_t p) const { return data_[c * npoints() + p]; }

    std::span<cplx> raw() { return data_; }
    std::span<const cplx> raw() const { return data_; }

    TensorField clone() const { return *this; }

    /// Same data conjugated; every slot's holomorphy class flips.
    TensorField conjugated() const;

    // Elementwise algebra (signatures and grids must match).
    TensorField& operator+=(const TensorField& o);
    TensorField& operator-=(const TensorField& o);
    TensorField& operator*=(cplx s);
    friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
    friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
    friend TensorField operator*(TensorField a, cplx s) { return a *= s; }

    void require_same_layout(const TensorField& o) const;

private:
    GridPtr grid_;
    Signature sig_;
    std::size_t ncomp_ = 0;
    std::vector<cplx> data_;
};

/// Componentwise Wirtinger derivatives; the output keeps the input signature
/// (callers assemble indexed derivative tensors from the per-axis results).
TensorField partial_holo(const TensorField& f, int a);
TensorField partial_anti(const TensorField& f, int a);

/// Assembles the indexed coordinate derivative: a new lower slot of the given
/// holomorphy class is prepended, with comp (a, rest...) = d_a f[rest].
TensorField indexed_partial(const TensorField& f, Holomorphy dir);

/// Exact sampling of a trig polynomial as a 0-slot scalar field.
TensorField sample_scalar(const GridPtr& grid, const TrigPoly& f);

/// Scalar field of ones/constant.
TensorField constant_scalar(const GridPtr& grid, cplx value);

// ---------------------------------------------------------------------------
// einsum

struct EinsumOp {
    const TensorField* f;
    bool conjugate = false;
    EinsumOp(const TensorField& t) : f(&t) {}  // NOLINT: implicit by design
    EinsumOp(const TensorField& t, bool c) : f(&t), conjugate(c) {}
};

inline EinsumOp conj_op(const TensorField& t) { return {t, true}; }

/// Contraction driven by a spec string, e.g. "kl,ijkl->ij".
/// Letters appearing in two input groups are summed; letters appearing once
/// must appear in the output. Throws std::invalid_argument on rank mismatch,
/// invalid slot pairing, or grid mismatch.
TensorField einsum(std::string_view spec, std::vector<EinsumOp> ops, cplx scale = 1.0);

/// Accumulating variant: out += scale * einsum(spec, ops). The output field
/// must already have the signature the spec implies.
void einsum_into(TensorField& out, cplx scale, std::string_view spec, std::vector<EinsumOp> ops);

/// Pure slot permutation, e.g. permuted(t, "ijkl->kjil").
TensorField permuted(const TensorField& t, std::string_view spec);

// ---------------------------------------------------------------------------
// Reductions

/// max over components and points of |value|
double sup_abs(const TensorField& t);
double sup_abs_diff(const TensorField& a, const TensorField& b);

/// Extremes of Re(value) over points of a scalar (0-slot) field.
double max_real(const TensorField& scalar);
double min_real(const TensorField& scalar);

/// max over points of |Im(value)| (for fields that must be real).
double sup_imag(const TensorField& t);

}  // namespace hcf
