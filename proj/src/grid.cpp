#include "hcf/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hcf {

namespace {
bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

/// Owns one forward/backward FFTW plan pair bound to a fixed line buffer.
/// Plans use FFTW_ESTIMATE so the chosen algorithm depends only on the
/// transform size, keeping runs reproducible bit-for-bit.
struct TorusGrid::FftEngine {
    explicit FftEngine(int npts) : n(npts) {
        line = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        fwd = fftw_plan_dft_1d(n, line, spec, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, spec, line, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftEngine() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(line);
        fftw_free(spec);
    }

    int n;
    fftw_complex* line;
    fftw_complex* spec;
    fftw_plan fwd;
    fftw_plan bwd;
};

TorusGrid::TorusGrid(int n, int resolution, DerivativeMode mode, double period)
    : n_(n), resolution_(resolution), mode_(mode) {
    if (n < 1 || n > 3)
        throw std::invalid_argument("TorusGrid: complex dimension must be in [1, 3], got " +
                                    std::to_string(n));
    if (resolution < 8 || !is_pow2(resolution))
        throw std::invalid_argument(
            "TorusGrid: resolution must be a power of two >= 8 on every axis, got " +
            std::to_string(resolution));
    if (!(period > 0.0)) throw std::invalid_argument("TorusGrid: period must be positive");

    npoints_ = 1;
    for (int a = 0; a < naxes(); ++a) {
        periods_[a] = period;
        strides_[a] = npoints_;
        npoints_ *= static_cast<std::size_t>(resolution_);
    }
    fft_ = std::make_unique<FftEngine>(resolution_);
}

TorusGrid::~TorusGrid() = default;

void TorusGrid::derivative_axis(const cplx* in, cplx* out, int axis) const {
    if (axis < 0 || axis >= naxes())
        throw std::invalid_argument("TorusGrid::derivative_axis: axis out of range");

    const int N = resolution_;
    const std::size_t s = strides_[axis];
    const std::size_t nlines = npoints_ / static_cast<std::size_t>(N);
    const double L = periods_[axis];

    if (mode_ == DerivativeMode::Spectral) {
        // Signed wavenumbers; the Nyquist mode's derivative is set to zero
        // (exact for data band-limited below N/2).
        std::vector<double> k(N);
        for (int j = 0; j < N; ++j) {
            int ks = (j <= N / 2) ? j : j - N;
            if (j == N / 2) ks = 0;
            k[j] = 2.0 * M_PI * ks / L;
        }
        auto* eng = fft_.get();
        for (std::size_t l = 0; l < nlines; ++l) {
            const std::size_t start = (l / s) * s * static_cast<std::size_t>(N) + (l % s);
            for (int j = 0; j < N; ++j) {
                const cplx v = in[start + static_cast<std::size_t>(j) * s];
                eng->line[j][0] = v.real();
                eng->line[j][1] = v.imag();
            }
            fftw_execute(eng->fwd);
            for (int j = 0; j < N; ++j) {
                // multiply by i*k and fold in the 1/N normalization
                const double re = eng->spec[j][0];
                const double im = eng->spec[j][1];
                const double f = k[j] / N;
                eng->spec[j][0] = -im * f;
                eng->spec[j][1] = re * f;
            }
            fftw_execute(eng->bwd);
            for (int j = 0; j < N; ++j)
                out[start + static_cast<std::size_t>(j) * s] = cplx(eng->line[j][0], eng->line[j][1]);
        }
    } else {
        // 4th-order centered stencil, periodic wrap.
        const double h = L / N;
        std::vector<cplx> buf(N);
        for (std::size_t l = 0; l < nlines; ++l) {
            const std::size_t start = (l / s) * s * static_cast<std::size_t>(N) + (l % s);
            for (int j = 0; j < N; ++j) buf[j] = in[start + static_cast<std::size_t>(j) * s];
            for (int j = 0; j < N; ++j) {
                const cplx fp1 = buf[(j + 1) % N], fp2 = buf[(j + 2) % N];
                const cplx fm1 = buf[(j + N - 1) % N], fm2 = buf[(j + N - 2) % N];
                out[start + static_cast<std::size_t>(j) * s] =
                    (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
            }
        }
    }
}

void TorusGrid::wirtinger(const cplx* in, cplx* out, int a, bool anti) const {
    if (a < 0 || a >= n_) throw std::invalid_argument("TorusGrid::wirtinger: axis out of range");
    scratch_.resize(npoints_);
    derivative_axis(in, out, a);                 // d/dx^a
    derivative_axis(in, scratch_.data(), n_ + a);  // d/dy^a
    const cplx iy = anti ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
    for (std::size_t p = 0; p < npoints_; ++p) out[p] = 0.5 * out[p] + iy * scratch_[p];
}

}  // namespace hcf
