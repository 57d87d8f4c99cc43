/// @file grid.hpp
/// @brief Periodic discretization of the complex torus C^n / Lambda.
///
/// A TorusGrid carries 2n real axes (x^1..x^n, y^1..y^n with z^a = x^a + i y^a),
/// each sampled at `resolution` points (a power of two, >= 8). Differentiation
/// along a real axis is either spectral (FFT, exact for band-limited data) or
/// 4th-order central differences; holomorphic/antiholomorphic derivatives are
/// the Wirtinger combinations
///     d/dz^a   = (d/dx^a - i d/dy^a) / 2,
///     d/dzbar^a= (d/dx^a + i d/dy^a) / 2.

#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

namespace hcf {

using cplx = std::complex<double>;

enum class DerivativeMode { Spectral, CentralDifference4 };

class TorusGrid {
public:
    static constexpr int kMaxAxes = 6;

    /// Throws std::invalid_argument unless 1 <= n <= 3 and resolution is a
    /// power of two >= 8. All 2n real axes share `resolution`; `period`
    /// applies to every axis (rectangular lattice).
    TorusGrid(int n, int resolution, DerivativeMode mode = DerivativeMode::Spectral,
              double period = 2.0 * 3.14159265358979323846);

    ~TorusGrid();
    TorusGrid(const TorusGrid&) = delete;
    TorusGrid& operator=(const TorusGrid&) = delete;

    int n() const { return n_; }
    int naxes() const { return 2 * n_; }
    int resolution() const { return resolution_; }
    double period(int axis) const { return periods_[axis]; }
    DerivativeMode mode() const { return mode_; }
    std::size_t npoints() const { return npoints_; }

    /// Real coordinate of grid point `p` along real axis `axis` (0..2n-1).
    double coordinate(std::size_t p, int axis) const {
        std::size_t idx = (p / strides_[axis]) % static_cast<std::size_t>(resolution_);
        return static_cast<double>(idx) * periods_[axis] / resolution_;
    }

    void coordinates(std::size_t p, double* x) const {
        for (int a = 0; a < naxes(); ++a) x[a] = coordinate(p, a);
    }

    std::size_t stride(int axis) const { return strides_[axis]; }

    /// d/dx_axis of a scalar field (npoints values) in the grid's mode.
    void derivative_axis(const cplx* in, cplx* out, int axis) const;

    /// Wirtinger derivative along complex axis a (0..n-1).
    /// anti = false: d/dz^a; anti = true: d/dzbar^a.
    void wirtinger(const cplx* in, cplx* out, int a, bool anti) const;

    /// Two grids are interchangeable for field algebra when all descriptors match.
    bool compatible(const TorusGrid& other) const {
        return n_ == other.n_ && resolution_ == other.resolution_ && mode_ == other.mode_ &&
               periods_ == other.periods_;
    }

private:
    struct FftEngine;

    int n_;
    int resolution_;
    DerivativeMode mode_;
    std::array<double, kMaxAxes> periods_{};
    std::array<std::size_t, kMaxAxes> strides_{};
    std::size_t npoints_;
    std::unique_ptr<FftEngine> fft_;
    mutable std::vector<cplx> scratch_;  // single-threaded derivative workspace
};

using GridPtr = std::shared_ptr<const TorusGrid>;

inline GridPtr make_grid(int n, int resolution, DerivativeMode mode = DerivativeMode::Spectral,
                         double period = 2.0 * 3.14159265358979323846) {
    return std::make_shared<const TorusGrid>(n, resolution, mode, period);
}

}  // namespace hcf
