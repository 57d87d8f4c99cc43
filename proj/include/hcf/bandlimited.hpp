/// @file bandlimited.hpp
/// @brief Seeded random band-limited trig polynomials (test fields, preset
/// perturbations). Deterministic in (seed, parameters).

#pragma once

#include <cstdint>

#include "hcf/trigpoly.hpp"

namespace hcf {

/// Real-valued: Hermitian-symmetric spectrum by construction.
TrigPoly random_real_trigpoly(int naxes, double period, int max_mode, int nterms, double amplitude,
                              std::uint64_t seed);

TrigPoly random_complex_trigpoly(int naxes, double period, int max_mode, int nterms,
                                 double amplitude, std::uint64_t seed);

}  // namespace hcf
