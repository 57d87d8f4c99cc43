#include "hcf/presets.hpp"

#include <cmath>
#include <stdexcept>

#include "hcf/rng.hpp"

namespace hcf {

namespace {

std::array<double, TrigPoly::kMaxAxes> uniform_periods(int naxes, double period) {
    std::array<double, TrigPoly::kMaxAxes> p{};
    for (int a = 0; a < naxes; ++a) p[a] = period;
    return p;
}

/// Real mode mix with unit scale; deterministic for seed 0, seeded otherwise.
TrigPoly mode_mix(int naxes, double period, int modes, std::uint64_t seed) {
    auto periods = uniform_periods(naxes, period);
    if (seed == 0) {
        TrigPoly u = TrigPoly::sine(naxes, periods, 0, 1);
        if (modes >= 2) {
            u = u + TrigPoly::cosine(naxes, periods, naxes / 2, 1) * 0.5;
            TrigPoly cross = TrigPoly::sine(naxes, periods, 0, 1) *
                             TrigPoly::cosine(naxes, periods, naxes / 2, 1);
            u = u + cross * 0.25;
        }
        if (modes >= 3 && naxes >= 4) {
            u = u + TrigPoly::sine(naxes, periods, 1, 2) * 0.35;
            u = u + TrigPoly::cosine(naxes, periods, naxes / 2 + 1, 1) * 0.3;
        }
        return u;
    }
    TrigPoly u(naxes, periods);
    RngStream rng(seed, 0x9135e7);
    const int nterms = 2 * modes + 2;
    for (int t = 0; t < nterms; ++t) {
        TrigPoly::Freq f{};
        bool nz = false;
        for (int a = 0; a < naxes; ++a) {
            f[a] = rng.next_int(-modes, modes);
            nz = nz || f[a] != 0;
        }
        if (!nz) f[0] = 1;
        const cplx c = cplx(rng.next_double(-1, 1), rng.next_double(-1, 1)) / double(nterms);
        u.add_term(f, c);
        TrigPoly::Freq nf{};
        for (int a = 0; a < TrigPoly::kMaxAxes; ++a) nf[a] = -f[a];
        u.add_term(nf, std::conj(c));
    }
    return u;
}

TrigPoly complex_mode_mix(int naxes, double period, int modes, std::uint64_t seed) {
    auto periods = uniform_periods(naxes, period);
    if (seed == 0) {
        // fixed asymmetric mix so the torsion is visibly nonzero
        TrigPoly f = TrigPoly::mode(naxes, periods, 0, 1, cplx(0.7, 0.2));
        f = f + TrigPoly::mode(naxes, periods, naxes / 2, 1, cplx(0.0, 0.5));
        if (naxes >= 4) {
            f = f + TrigPoly::mode(naxes, periods, 1, 1, cplx(0.4, -0.3));
            f = f + TrigPoly::mode(naxes, periods, naxes / 2 + 1, -1, cplx(-0.25, 0.15));
        }
        if (modes >= 2) {
            TrigPoly::Freq fr{};
            fr[0] = 1;
            fr[naxes / 2] = -1;
            TrigPoly extra(naxes, periods);
            extra.add_term(fr, cplx(0.2, 0.35));
            f = f + extra;
        }
        return f;
    }
    TrigPoly f(naxes, periods);
    RngStream rng(seed, 0xab5a1);
    const int nterms = 2 * modes + 2;
    for (int t = 0; t < nterms; ++t) {
        TrigPoly::Freq fr{};
        bool nz = false;
        for (int a = 0; a < naxes; ++a) {
            fr[a] = rng.next_int(-modes, modes);
            nz = nz || fr[a] != 0;
        }
        if (!nz) fr[naxes / 2] = 1;
        f.add_term(fr, cplx(rng.next_double(-1, 1), rng.next_double(-1, 1)) / double(nterms));
    }
    return f;
}

}  // namespace

Preset make_preset(const std::string& name, int n, double period, double amplitude, int modes,
                   std::uint64_t seed) {
    Preset p;
    p.name = name;
    p.n = n;
    p.amplitude = amplitude;
    const int naxes = 2 * n;
    auto periods = uniform_periods(naxes, period);

    if (name == "flat") {
        p.kahler = true;
        p.entries.reserve(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                p.entries.push_back(
                    TrigPoly::constant(naxes, periods, i == j ? cplx(1.0) : cplx(0.0)));
        return p;
    }
    if (name == "conformal") {
        p.kahler = (n == 1);  // e^u delta is Kahler only in one complex dimension
        p.conformal_u = mode_mix(naxes, period, modes, seed) * amplitude;
        return p;
    }
    if (name == "kahler_potential") {
        p.kahler = true;
        TrigPoly phi = mode_mix(naxes, period, modes, seed) * amplitude;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                TrigPoly e = phi.wirtinger_holo(i).wirtinger_anti(j);
                if (i == j) e.add_term(TrigPoly::Freq{}, 1.0);
                p.entries.push_back(std::move(e));
            }
        return p;
    }
    if (name == "non_kahler") {
        p.kahler = false;
        TrigPoly f = complex_mode_mix(naxes, period, modes, seed) * std::sqrt(amplitude);
        TrigPoly fbar = f.conj();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                TrigPoly e = f.wirtinger_holo(i) * fbar.wirtinger_anti(j);
                if (i == j) e.add_term(TrigPoly::Freq{}, 1.0);
                p.entries.push_back(std::move(e));
            }
        return p;
    }
    throw std::invalid_argument("unknown preset '" + name + "' (known: flat, conformal, " +
                                "kahler_potential, non_kahler)");
}

std::vector<std::string> preset_names() {
    return {"flat", "conformal", "kahler_potential", "non_kahler"};
}

MetricField Preset::build(const GridPtr& grid) const {
    if (grid->n() != n) throw std::invalid_argument("Preset::build: grid dimension mismatch");
    TensorField g(grid, Signature{lh, la});
    const int nn = n;
    if (conformal_u) {
        double x[TorusGrid::kMaxAxes] = {};
        for (std::size_t pt = 0; pt < grid->npoints(); ++pt) {
            grid->coordinates(pt, x);
            const double w = std::exp(conformal_u->eval(x).real());
            for (int i = 0; i < nn; ++i) g.at(static_cast<std::size_t>(i * nn + i), pt) = w;
        }
    } else {
        double x[TorusGrid::kMaxAxes] = {};
        for (std::size_t pt = 0; pt < grid->npoints(); ++pt) {
            grid->coordinates(pt, x);
            for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j)
                    g.at(static_cast<std::size_t>(i * nn + j), pt) =
                        entries[static_cast<std::size_t>(i * nn + j)].eval(x);
        }
    }
    MetricField m(std::move(g));
    m.hermitize();  // clears roundoff-level asymmetry from pointwise evaluation
    auto pos = m.positivity();
    if (!pos.positive)
        throw std::runtime_error("preset '" + name + "' is not positive definite at amplitude " +
                                 std::to_string(amplitude) + " (min eigenvalue " +
                                 std::to_string(pos.min_eigenvalue) + ")");
    return m;
}

TrigPoly bump_profile(int n, double period, int power, double amplitude,
                      const std::vector<double>& center) {
    const int naxes = 2 * n;
    auto periods = uniform_periods(naxes, period);
    TrigPoly prod = TrigPoly::constant(naxes, periods, 1.0);
    for (int a = 0; a < naxes; ++a) {
        const double c = a < static_cast<int>(center.size()) ? center[static_cast<std::size_t>(a)] : 0.0;
        // (1 + cos(2 pi (x - c)/L)) / 2 as a shifted mode pair
        TrigPoly half(naxes, periods);
        TrigPoly::Freq fp{};
        fp[a] = 1;
        const cplx phase = std::polar(1.0, -2.0 * M_PI * c / period);
        half.add_term(TrigPoly::Freq{}, 0.5);
        half.add_term(fp, 0.25 * phase);
        TrigPoly::Freq fm{};
        fm[a] = -1;
        half.add_term(fm, 0.25 * std::conj(phase));
        for (int k = 0; k < power; ++k) prod = prod * half;
        // note: multiplying per-axis factors power times keeps the zero at the
        // antipode of order 2*power, so the bump is effectively localized
    }
    return prod * amplitude;
}

}  // namespace hcf
