/// @file presets.hpp
/// @brief Analytic metric families used as initial data.
///
/// Every preset is generated from trig polynomials, so its components (or the
/// conformal exponent) have exact symbolic derivatives and essentially no
/// spectral tail at the working resolutions. Registered names:
///   flat             g = delta
///   conformal        g = e^u delta, u = amplitude * real mode mix
///   kahler_potential g = delta + dd-bar(phi), phi band-limited real
///   non_kahler       g = delta + (d_i f)(d_jbar fbar), f complex band-limited
/// The non_kahler family is Hermitian by construction (rank-one dyad) and
/// positive definite for every amplitude >= 0.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcf/metric.hpp"
#include "hcf/tensor.hpp"
#include "hcf/trigpoly.hpp"

namespace hcf {

struct Preset {
    std::string name;
    int n = 1;
    double amplitude = 0.1;

    /// Exact symbolic entries g_{i jbar} (row-major), empty for conformal.
    std::vector<TrigPoly> entries;
    /// Conformal exponent when the family is g = e^u delta.
    std::optional<TrigPoly> conformal_u;
    /// Built from a Kahler potential: torsion is expected to vanish.
    bool kahler = false;

    /// Exact sampling onto a grid. Throws std::runtime_error if the resulting
    /// metric is not positive definite (amplitude too large).
    MetricField build(const GridPtr& grid) const;
};

/// Throws std::invalid_argument for unknown names.
Preset make_preset(const std::string& name, int n, double period, double amplitude, int modes,
                   std::uint64_t seed);

std::vector<std::string> preset_names();

/// Nonnegative band-limited bump for the heat companion:
///   amplitude * prod_axes ((1 + cos(2 pi (x - c)/L)) / 2)^power,
/// strictly positive except at the antipodal sheet, concentrated near c.
TrigPoly bump_profile(int n, double period, int power, double amplitude,
                      const std::vector<double>& center);

}  // namespace hcf
