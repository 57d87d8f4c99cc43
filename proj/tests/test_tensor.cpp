/// @file test_tensor.cpp
/// @brief TensorField storage, einsum contraction engine, reductions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcf/rng.hpp"
#include "hcf/tensor.hpp"

using namespace hcf;

namespace {

TensorField random_field(const GridPtr& grid, Signature sig, std::uint64_t seed) {
    TensorField f(grid, std::move(sig));
    RngStream rng(seed);
    for (auto& v : f.raw()) v = cplx(rng.next_double(-1, 1), rng.next_double(-1, 1));
    return f;
}

}  // namespace

TEST_CASE("component index order: first slot most significant") {
    GridPtr grid = make_grid(2, 8);
    TensorField t(grid, Signature{lh, la});
    CHECK(t.comp_index({0, 0}) == 0u);
    CHECK(t.comp_index({0, 1}) == 1u);
    CHECK(t.comp_index({1, 0}) == 2u);
    CHECK(t.ncomp() == 4u);
    CHECK_THROWS_AS(t.comp_index({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(t.comp_index({0}), std::invalid_argument);
}

TEST_CASE("einsum matches a hand-written contraction") {
    GridPtr grid = make_grid(2, 8);
    TensorField ginv = random_field(grid, {uh, ua}, 11);
    TensorField dg = random_field(grid, {lh, lh, la}, 22);

    TensorField got = einsum("kl,ijl->kij", {ginv, dg});
    REQUIRE(got.signature() == Signature{uh, lh, lh});

    const int n = 2;
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (std::size_t p = 0; p < grid->npoints(); p += 37) {
                    cplx acc = 0.0;
                    for (int l = 0; l < n; ++l)
                        acc += ginv.at(ginv.comp_index({k, l}), p) *
                               dg.at(dg.comp_index({i, j, l}), p);
                    worst = std::max(worst,
                                     std::abs(acc - got.at(got.comp_index({k, i, j}), p)));
                }
    CHECK(worst < 1e-14);
}

TEST_CASE("einsum with conjugated operand and scale") {
    GridPtr grid = make_grid(2, 8);
    // conjugation flips holomorphy, so (uh, la) pairs against conj of (la, uh)
    TensorField t = random_field(grid, {uh, la}, 5);
    TensorField s = random_field(grid, {la, uh}, 6);

    TensorField got = einsum("ij,ij->", {t, conj_op(s)}, 2.0);
    double worst = 0.0;
    for (std::size_t p = 0; p < grid->npoints(); p += 23) {
        cplx acc = 0.0;
        for (std::size_t c = 0; c < t.ncomp(); ++c) acc += t.at(c, p) * std::conj(s.at(c, p));
        worst = std::max(worst, std::abs(2.0 * acc - got.at(0, p)));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("einsum rejects invalid contractions") {
    GridPtr grid = make_grid(2, 8);
    TensorField gdown = random_field(grid, {lh, la}, 1);
    TensorField gup = random_field(grid, {uh, ua}, 2);
    TensorField v = random_field(grid, {uh}, 3);

    // lower-lower pairing: invalid without a metric
    CHECK_THROWS_AS(einsum("ij,jk->ik", {gdown, gdown}), std::invalid_argument);
    // holomorphy classes must match: slot j on gup is anti, on v is holo
    CHECK_THROWS_AS(einsum("ij,j->i", {gup, v}), std::invalid_argument);
    // rank mismatch
    CHECK_THROWS_AS(einsum("ijk,j->i", {gdown, v}), std::invalid_argument);
    // free letter missing from output
    CHECK_THROWS_AS(einsum("ij->i", {gdown}), std::invalid_argument);
    // contracted letter in output
    CHECK_THROWS_AS(einsum("ij,jk->ijk", {gdown, gup}), std::invalid_argument);

    // upper-lower same holomorphy: valid
    CHECK_NOTHROW(einsum("ij,i->j", {gdown, v}));
}

TEST_CASE("permutation einsum reorders slots") {
    GridPtr grid = make_grid(2, 8);
    TensorField t = random_field(grid, {uh, lh, lh}, 9);
    TensorField p = permuted(t, "kij->kji");
    REQUIRE(p.signature() == Signature{uh, lh, lh});
    double worst = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (std::size_t q = 0; q < grid->npoints(); q += 41)
                    worst = std::max(worst, std::abs(p.at(p.comp_index({k, i, j}), q) -
                                                     t.at(t.comp_index({k, j, i}), q)));
    CHECK(worst == 0.0);
}

TEST_CASE("conjugated flips holomorphy and conjugates values") {
    GridPtr grid = make_grid(2, 8);
    TensorField t = random_field(grid, {lh, la, uh}, 13);
    TensorField c = t.conjugated();
    CHECK(c.signature() == Signature{la, lh, ua});
    CHECK(std::abs(c.at(3, 100) - std::conj(t.at(3, 100))) == 0.0);
}

TEST_CASE("einsum_into accumulates") {
    GridPtr grid = make_grid(1, 8);
    TensorField a = random_field(grid, {lh}, 3);
    TensorField out(grid, Signature{lh});
    einsum_into(out, 1.0, "i->i", {a});
    einsum_into(out, -1.0, "i->i", {a});
    CHECK(sup_abs(out) < 1e-15);
    CHECK_THROWS_AS(einsum_into(out, 1.0, "i->i", {out}), std::invalid_argument);
}

TEST_CASE("reductions") {
    GridPtr grid = make_grid(1, 8);
    TensorField s(grid, Signature{});
    s.at(0, 5) = cplx(3.0, 0.25);
    s.at(0, 9) = cplx(-7.0, 0.0);
    CHECK(sup_abs(s) == doctest::Approx(7.0));
    CHECK(max_real(s) == doctest::Approx(3.0));
    CHECK(min_real(s) == doctest::Approx(-7.0));
    CHECK(sup_imag(s) == doctest::Approx(0.25));
}
