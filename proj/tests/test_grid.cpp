/// @file test_grid.cpp
/// @brief Derivative operators on the periodic grid vs symbolic references.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcf/grid.hpp"
#include "hcf/probe.hpp"
#include "hcf/tensor.hpp"
#include "oracles.hpp"

using namespace hcf;

namespace {
std::array<double, TrigPoly::kMaxAxes> twopi_periods(int naxes) {
    std::array<double, TrigPoly::kMaxAxes> p{};
    for (int a = 0; a < naxes; ++a) p[a] = 2.0 * M_PI;
    return p;
}
}  // namespace

TEST_CASE("grid construction validates its invariants") {
    CHECK_THROWS_AS(TorusGrid(0, 16), std::invalid_argument);
    CHECK_THROWS_AS(TorusGrid(4, 16), std::invalid_argument);
    CHECK_THROWS_AS(TorusGrid(1, 7), std::invalid_argument);   // not a power of two
    CHECK_THROWS_AS(TorusGrid(1, 4), std::invalid_argument);   // below minimum
    CHECK_THROWS_AS(TorusGrid(1, 24), std::invalid_argument);  // 24 = 2^3*3

    TorusGrid g(2, 16);
    CHECK(g.npoints() == 16u * 16u * 16u * 16u);  // resolution^(2n)
    CHECK(g.naxes() == 4);
}

TEST_CASE("derivative of a constant vanishes in both modes") {
    for (auto mode : {DerivativeMode::Spectral, DerivativeMode::CentralDifference4}) {
        GridPtr grid = make_grid(1, 16, mode);
        TensorField f = constant_scalar(grid, cplx(2.5, -0.75));
        CHECK(sup_abs(partial_holo(f, 0)) < 1e-14);
        CHECK(sup_abs(partial_anti(f, 0)) < 1e-14);
    }
}

TEST_CASE("d/dz of exp(i x^1) is (i/2) exp(i x^1) to machine precision") {
    GridPtr grid = make_grid(1, 16);
    TrigPoly f = TrigPoly::mode(2, twopi_periods(2), 0, 1);  // exp(i x^1)
    TensorField s = sample_scalar(grid, f);
    TensorField d = partial_holo(s, 0);
    double worst = 0.0;
    for (std::size_t p = 0; p < grid->npoints(); ++p)
        worst = std::max(worst, std::abs(d.at(0, p) - cplx(0.0, 0.5) * s.at(0, p)));
    CHECK(worst < 1e-13);

    TensorField da = partial_anti(s, 0);
    worst = 0.0;
    for (std::size_t p = 0; p < grid->npoints(); ++p)
        worst = std::max(worst, std::abs(da.at(0, p) - cplx(0.0, 0.5) * s.at(0, p)));
    CHECK(worst < 1e-13);
}

TEST_CASE("band-limited zbar surrogate matches the symbolic oracle") {
    // sin(x^1) - i sin(y^1), a periodic stand-in for zbar^1
    auto periods = twopi_periods(2);
    TrigPoly f = TrigPoly::sine(2, periods, 0) - cplx(0.0, 1.0) * TrigPoly::sine(2, periods, 1);
    GridPtr grid = make_grid(1, 32);
    TensorField s = sample_scalar(grid, f);
    TensorField d = partial_holo(s, 0);
    TensorField want = sample_scalar(grid, f.wirtinger_holo(0));
    CHECK(sup_abs_diff(d, want) < 1e-10);
}

TEST_CASE("conjugation duality: partial_anti(conj f) == conj(partial_holo f)") {
    for (int n : {1, 2}) {
        TrigPoly f = oracle::random_complex_trigpoly(2 * n, 2.0 * M_PI, 3, 6, 1.0, 77);
        GridPtr grid = make_grid(n, 16);
        TensorField s = sample_scalar(grid, f);
        for (int a = 0; a < n; ++a) {
            TensorField lhs = partial_anti(s.conjugated(), a);
            TensorField rhs = partial_holo(s, a).conjugated();
            CHECK(sup_abs_diff(lhs, rhs) < 1e-12);
        }
    }
}

TEST_CASE("mixed partials commute") {
    TrigPoly f = oracle::random_complex_trigpoly(4, 2.0 * M_PI, 3, 8, 1.0, 1234);
    for (auto mode : {DerivativeMode::Spectral, DerivativeMode::CentralDifference4}) {
        GridPtr grid = make_grid(2, 16, mode);
        TensorField s = sample_scalar(grid, f);
        TensorField ab = partial_anti(partial_holo(s, 0), 1);
        TensorField ba = partial_holo(partial_anti(s, 1), 0);
        // both are convolutions, so they commute to rounding in either mode
        CHECK(sup_abs_diff(ab, ba) < 1e-12);
    }
}

TEST_CASE("axis bounds are enforced") {
    GridPtr grid = make_grid(1, 16);
    TensorField s = constant_scalar(grid, 1.0);
    CHECK_THROWS_AS(partial_holo(s, 1), std::invalid_argument);
    CHECK_THROWS_AS(partial_anti(s, -1), std::invalid_argument);
}

TEST_CASE("mismatched grids are rejected in field algebra") {
    GridPtr g16 = make_grid(1, 16);
    GridPtr g32 = make_grid(1, 32);
    TensorField a = constant_scalar(g16, 1.0);
    TensorField b = constant_scalar(g32, 1.0);
    CHECK_THROWS_AS(a += b, std::invalid_argument);
}

TEST_CASE("convergence probe: FD4 order and spectral floor") {
    auto periods = twopi_periods(2);
    // sin(x^1) cos(y^1)
    TrigPoly f = TrigPoly::sine(2, periods, 0) * TrigPoly::cosine(2, periods, 1);
    auto rows = convergence_probe(f, 0, /*anti=*/false, {16, 32, 64});
    REQUIRE(rows.size() == 3);

    // spectral mode resolves the band-limited field essentially exactly
    for (const auto& r : rows) CHECK(r.err_spectral < 1e-10);

    // 4th-order decay: error ratio between successive resolutions ~ 16
    const double ratio1 = rows[0].err_fd4 / rows[1].err_fd4;
    const double ratio2 = rows[1].err_fd4 / rows[2].err_fd4;
    CHECK(ratio1 > 10.0);
    CHECK(ratio1 < 26.0);
    CHECK(ratio2 > 10.0);
    CHECK(ratio2 < 26.0);
}

TEST_CASE("convergence probe: zero field has zero error") {
    TrigPoly zero(2, twopi_periods(2));
    auto rows = convergence_probe(zero, 0, false, {16, 32});
    for (const auto& r : rows) {
        CHECK(r.err_spectral == 0.0);
        CHECK(r.err_fd4 == 0.0);
    }
}
