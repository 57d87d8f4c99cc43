/// @file probe.hpp
/// @brief Derivative-convergence probe: measured error of the grid operators
/// against exact symbolic derivatives, per resolution and mode.

#pragma once

#include <vector>

#include "hcf/tensor.hpp"
#include "hcf/trigpoly.hpp"

namespace hcf {

struct ProbeRow {
    int resolution;
    double err_spectral;
    double err_fd4;
};

/// Max-norm error of the holomorphic (or antiholomorphic) derivative along
/// complex axis `a` for the analytic field `f`, at each resolution, in both
/// derivative modes. The reference is f's symbolic Wirtinger derivative.
std::vector<ProbeRow> convergence_probe(const TrigPoly& f, int a, bool anti,
                                        const std::vector<int>& resolutions);

}  // namespace hcf
