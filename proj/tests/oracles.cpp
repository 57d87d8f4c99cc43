#include "oracles.hpp"

#include <stdexcept>

#include "hcf/bandlimited.hpp"
#include "hcf/rng.hpp"

namespace hcf::oracle {

namespace {

/// Inverse of the n x n matrix G (values g_{i jbar}) in the index convention
/// ginv[k][l] = g^{k lbar} = (G^{-1})[l][k].
void invert_metric(int n, const std::array<std::array<cplx, 3>, 3>& g,
                   std::array<std::array<cplx, 3>, 3>& ginv) {
    std::array<std::array<cplx, 3>, 3> gi{};
    if (n == 1) {
        gi[0][0] = 1.0 / g[0][0];
    } else if (n == 2) {
        const cplx det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        gi[0][0] = g[1][1] / det;
        gi[1][1] = g[0][0] / det;
        gi[0][1] = -g[0][1] / det;
        gi[1][0] = -g[1][0] / det;
    } else {
        const cplx det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                         g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        gi[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) / det;
        gi[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / det;
        gi[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / det;
        gi[1][0] = (g[1][2] * g[2][0] - g[1][0] * g[2][2]) / det;
        gi[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / det;
        gi[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / det;
        gi[2][0] = (g[1][0] * g[2][1] - g[1][1] * g[2][0]) / det;
        gi[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) / det;
        gi[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / det;
    }
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) ginv[k][l] = gi[l][k];
}

}  // namespace

MetricPointData evaluate_metric(const SymbolicMetric& m, const double* x) {
    MetricPointData d{};
    d.n = m.n;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            const TrigPoly& e = m.at(i, j);
            d.g[i][j] = e.eval(x);
            for (int a = 0; a < m.n; ++a) {
                d.dg[a][i][j] = e.wirtinger_holo(a).eval(x);
                d.dbarg[a][i][j] = e.wirtinger_anti(a).eval(x);
                for (int b = 0; b < m.n; ++b)
                    d.ddbarg[a][b][i][j] = e.wirtinger_holo(a).wirtinger_anti(b).eval(x);
            }
        }
    invert_metric(m.n, d.g, d.ginv);
    return d;
}

cplx christoffel_point(const MetricPointData& d, int k, int i, int j) {
    cplx acc = 0.0;
    for (int l = 0; l < d.n; ++l) acc += d.ginv[k][l] * d.dg[i][j][l];
    return acc;
}

cplx torsion_mixed_point(const MetricPointData& d, int k, int i, int j) {
    return christoffel_point(d, k, i, j) - christoffel_point(d, k, j, i);
}

cplx torsion_lowered_point(const MetricPointData& d, int i, int j, int k) {
    cplx acc = 0.0;
    for (int p = 0; p < d.n; ++p) acc += d.g[p][k] * torsion_mixed_point(d, p, i, j);
    return acc;
}

cplx curvature_mixed_point(const MetricPointData& d, int i, int j, int k, int l) {
    // R_{i jbar k}^l = -d_jbar (g^{l qbar} d_i g_{k qbar})
    //   d_jbar g^{l rbar} = - g^{l qbar} (d_jbar g_{p qbar}) g^{p rbar}
    cplx acc = 0.0;
    for (int q = 0; q < d.n; ++q) {
        cplx dginv = 0.0;
        for (int p = 0; p < d.n; ++p)
            for (int r = 0; r < d.n; ++r) dginv += -d.ginv[l][r] * d.dbarg[j][p][r] * d.ginv[p][q];
        acc += dginv * d.dg[i][k][q] + d.ginv[l][q] * d.ddbarg[i][j][k][q];
    }
    return -acc;
}

cplx curvature_lowered_point(const MetricPointData& d, int i, int j, int k, int l) {
    cplx acc = 0.0;
    for (int p = 0; p < d.n; ++p) acc += d.g[p][l] * curvature_mixed_point(d, i, j, k, p);
    return acc;
}

cplx first_ricci_point(const MetricPointData& d, int i, int j) {
    cplx acc = 0.0;
    for (int k = 0; k < d.n; ++k)
        for (int l = 0; l < d.n; ++l) acc += d.ginv[k][l] * curvature_lowered_point(d, i, j, k, l);
    return acc;
}

cplx second_ricci_point(const MetricPointData& d, int i, int j) {
    cplx acc = 0.0;
    for (int k = 0; k < d.n; ++k)
        for (int l = 0; l < d.n; ++l) acc += d.ginv[k][l] * curvature_lowered_point(d, k, l, i, j);
    return acc;
}

// ---------------------------------------------------------------------------

ConformalOracle::ConformalOracle(const TrigPoly& u_in) : u(u_in), L(u_in.like()) {
    du_ = u.wirtinger_holo(0);
    dbu_ = u.wirtinger_anti(0);
    L = du_.wirtinger_anti(0);

    // Reduced fixed-direction covariant derivatives. For the lowered curvature
    // R = e^u * rho (two lower-holo and two lower-anti slots, one metric
    // factor), each nabla_1 acts on the reduced part as q -> dq - (du)q and
    // each nabla_1bar as q -> dbar q - (dbar u) q; the same maps apply to the
    // w-free Ricci (one slot of each class).
    auto Dh = [&](const TrigPoly& q) { return q.wirtinger_holo(0) - du_ * q; };
    auto Da = [&](const TrigPoly& q) { return q.wirtinger_anti(0) - dbu_ * q; };

    const TrigPoly rho = -L;
    const TrigPoly lap = (Dh(Da(rho)) + Da(Dh(rho))) * 0.5;

    // Lowered evolution RHS at n = 1: the torsion bracket vanishes, two of the
    // three quadratic terms cancel, and the metric factors cancel throughout:
    //   RHS = Delta R + L^2 - 2 L^2   (all divided by e^u, times e^u)
    rm_rhs_trig_ = lap - L * L;
    ric_lap_trig_ = lap;
}

cplx ConformalOracle::gamma(const double* x) const { return du_.eval(x); }

cplx ConformalOracle::curvature_lowered(const double* x) const {
    return -std::exp(u.eval(x).real()) * L.eval(x);
}

cplx ConformalOracle::ricci(const double* x) const { return -L.eval(x); }

cplx ConformalOracle::second_ricci(const double* x) const { return -L.eval(x); }

cplx ConformalOracle::rm_evolution_rhs(const double* x) const { return rm_rhs_trig_.eval(x); }

cplx ConformalOracle::ricci_evolution_rhs(const double* x) const {
    return std::exp(-u.eval(x).real()) * ric_lap_trig_.eval(x);
}

// ---------------------------------------------------------------------------

double sample_disagreement(const TensorField& field, const PointOracle& oracle, int nsamples,
                           std::uint64_t seed) {
    const TorusGrid& grid = field.grid();
    RngStream rng(seed, 0x0eac1e);
    const int rank = field.rank();
    const int n = grid.n();
    double worst = 0.0;
    std::vector<int> digits(static_cast<std::size_t>(rank), 0);
    double x[TorusGrid::kMaxAxes] = {};
    for (int s = 0; s < nsamples; ++s) {
        const std::size_t p = static_cast<std::size_t>(rng.next_u64() % grid.npoints());
        grid.coordinates(p, x);
        for (std::size_t c = 0; c < field.ncomp(); ++c) {
            std::size_t rest = c;
            for (int sl = rank - 1; sl >= 0; --sl) {
                digits[static_cast<std::size_t>(sl)] = static_cast<int>(rest % static_cast<std::size_t>(n));
                rest /= static_cast<std::size_t>(n);
            }
            const cplx expect = oracle(digits, x);
            worst = std::max(worst, std::abs(field.at(c, p) - expect));
        }
    }
    return worst;
}

TrigPoly random_real_trigpoly(int naxes, double period, int max_mode, int nterms, double amplitude,
                              std::uint64_t seed) {
    return hcf::random_real_trigpoly(naxes, period, max_mode, nterms, amplitude, seed);
}

TrigPoly random_complex_trigpoly(int naxes, double period, int max_mode, int nterms,
                                 double amplitude, std::uint64_t seed) {
    return hcf::random_complex_trigpoly(naxes, period, max_mode, nterms, amplitude, seed);
}

}  // namespace hcf::oracle
