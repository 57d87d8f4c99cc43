#include "hcf/metric.hpp"

#include <cmath>
#include <stdexcept>
#include <limits>

#include "hcf/linalg.hpp"

namespace hcf {

MetricField MetricField::identity(const GridPtr& grid) {
    TensorField g(grid, Signature{lh, la});
    const int n = grid->n();
    for (int i = 0; i < n; ++i) {
        auto c = g.comp(static_cast<std::size_t>(i * n + i));
        std::fill(c.begin(), c.end(), cplx(1.0, 0.0));
    }
    return MetricField(std::move(g));
}

MetricField::MetricField(TensorField g) : g_(std::move(g)) {
    if (g_.signature() != Signature{lh, la})
        throw std::invalid_argument("MetricField: signature must be (lower-holo, lower-anti)");
}

double MetricField::hermitian_deviation() const {
    const int n = this->n();
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            auto cij = g_.comp(static_cast<std::size_t>(i * n + j));
            auto cji = g_.comp(static_cast<std::size_t>(j * n + i));
            for (std::size_t p = 0; p < g_.npoints(); ++p)
                dev = std::max(dev, std::abs(cij[p] - std::conj(cji[p])));
        }
    return dev;
}

void hermitize_rank2(TensorField& t) {
    if (t.signature() != Signature{lh, la})
        throw std::invalid_argument("hermitize_rank2: signature must be (lower-holo, lower-anti)");
    const int n = t.grid().n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            auto cij = t.comp(static_cast<std::size_t>(i * n + j));
            auto cji = t.comp(static_cast<std::size_t>(j * n + i));
            for (std::size_t p = 0; p < t.npoints(); ++p) {
                const cplx avg = 0.5 * (cij[p] + std::conj(cji[p]));
                cij[p] = avg;
                cji[p] = std::conj(avg);
            }
            if (i == j)
                for (std::size_t p = 0; p < t.npoints(); ++p) cij[p] = cplx(cij[p].real(), 0.0);
        }
}

void MetricField::hermitize() { hermitize_rank2(g_); }

MetricField::Positivity MetricField::positivity() const {
    const int n = this->n();
    const std::size_t np = g_.npoints();
    // Leading principal minors; track the smallest one seen as "worst".
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_p = 0;
    bool ok = true;
    for (std::size_t p = 0; p < np; ++p) {
        auto G = [&](int i, int j) { return g_.at(static_cast<std::size_t>(i * n + j), p); };
        double m1 = G(0, 0).real();
        double mmin = m1;
        if (n >= 2) {
            double m2 = (G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0)).real();
            mmin = std::min(mmin, m2);
        }
        if (n >= 3) {
            cplx d = G(0, 0) * (G(1, 1) * G(2, 2) - G(1, 2) * G(2, 1)) -
                     G(0, 1) * (G(1, 0) * G(2, 2) - G(1, 2) * G(2, 0)) +
                     G(0, 2) * (G(1, 0) * G(2, 1) - G(1, 1) * G(2, 0));
            mmin = std::min(mmin, d.real());
        }
        if (!(mmin > 0.0)) ok = false;  // also catches NaN
        if (mmin < worst) {
            worst = mmin;
            worst_p = p;
        }
    }
    double min_eig = pointwise::min_eigenvalue(pointwise::gather(g_, worst_p));
    return {ok, worst_p, min_eig};
}

void MetricField::require_positive(const std::string& where) const {
    auto pos = positivity();
    if (!pos.positive)
        throw std::runtime_error(where + ": metric not positive definite at point " +
                                 std::to_string(pos.worst_point) +
                                 " (min eigenvalue = " + std::to_string(pos.min_eigenvalue) + ")");
}

TensorField MetricField::inverse() const {
    TensorField inv(g_.grid_ptr(), Signature{uh, ua});
    const int n = this->n();
    const std::size_t np = g_.npoints();
    for (std::size_t p = 0; p < np; ++p) {
        pointwise::Mat G = pointwise::gather(g_, p);
        pointwise::Mat Gi(n, n);
        if (n == 1) {
            Gi(0, 0) = 1.0 / G(0, 0);
        } else if (n == 2) {
            const cplx det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
            Gi(0, 0) = G(1, 1) / det;
            Gi(1, 1) = G(0, 0) / det;
            Gi(0, 1) = -G(0, 1) / det;
            Gi(1, 0) = -G(1, 0) / det;
        } else {
            Gi = G.inverse();
        }
        // g^{k lbar} = (G^{-1})[l][k]
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                inv.at(static_cast<std::size_t>(k * n + l), p) = Gi(l, k);
    }
    return inv;
}

TensorField MetricField::log_determinant() const {
    TensorField out(g_.grid_ptr(), Signature{});
    const int n = this->n();
    auto dst = out.comp(0);
    for (std::size_t p = 0; p < g_.npoints(); ++p) {
        auto G = [&](int i, int j) { return g_.at(static_cast<std::size_t>(i * n + j), p); };
        cplx det;
        if (n == 1)
            det = G(0, 0);
        else if (n == 2)
            det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
        else
            det = G(0, 0) * (G(1, 1) * G(2, 2) - G(1, 2) * G(2, 1)) -
                  G(0, 1) * (G(1, 0) * G(2, 2) - G(1, 2) * G(2, 0)) +
                  G(0, 2) * (G(1, 0) * G(2, 1) - G(1, 1) * G(2, 0));
        if (!(det.real() > 0.0))
            throw std::runtime_error("log_determinant: non-positive determinant at point " +
                                     std::to_string(p));
        dst[p] = cplx(std::log(det.real()), 0.0);
    }
    return out;
}

}  // namespace hcf
