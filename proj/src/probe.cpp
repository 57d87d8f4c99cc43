#include "hcf/probe.hpp"

namespace hcf {

std::vector<ProbeRow> convergence_probe(const TrigPoly& f, int a, bool anti,
                                        const std::vector<int>& resolutions) {
    const int n = f.naxes() / 2;
    const double period = f.periods()[0];
    const TrigPoly ref = anti ? f.wirtinger_anti(a) : f.wirtinger_holo(a);

    std::vector<ProbeRow> rows;
    for (int res : resolutions) {
        ProbeRow row{res, 0.0, 0.0};
        for (int pass = 0; pass < 2; ++pass) {
            const auto mode = pass == 0 ? DerivativeMode::Spectral : DerivativeMode::CentralDifference4;
            GridPtr grid = make_grid(n, res, mode, period);
            TensorField sampled = sample_scalar(grid, f);
            TensorField got = anti ? partial_anti(sampled, a) : partial_holo(sampled, a);
            TensorField want = sample_scalar(grid, ref);
            const double err = sup_abs_diff(got, want);
            (pass == 0 ? row.err_spectral : row.err_fd4) = err;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hcf
