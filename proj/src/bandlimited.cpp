#include "hcf/bandlimited.hpp"

#include <array>
#include <complex>

#include "hcf/rng.hpp"

namespace hcf {

namespace {
std::array<double, TrigPoly::kMaxAxes> uniform_periods(int naxes, double period) {
    std::array<double, TrigPoly::kMaxAxes> p{};
    for (int a = 0; a < naxes; ++a) p[a] = period;
    return p;
}
}  // namespace

TrigPoly random_real_trigpoly(int naxes, double period, int max_mode, int nterms, double amplitude,
                              std::uint64_t seed) {
    TrigPoly p(naxes, uniform_periods(naxes, period));
    RngStream rng(seed, 0x7ea1);
    for (int t = 0; t < nterms; ++t) {
        TrigPoly::Freq f{};
        bool nonzero = false;
        for (int a = 0; a < naxes; ++a) {
            f[a] = rng.next_int(-max_mode, max_mode);
            nonzero = nonzero || f[a] != 0;
        }
        if (!nonzero) f[0] = 1;
        const std::complex<double> c = amplitude *
                                       std::complex<double>(rng.next_double(-1.0, 1.0),
                                                            rng.next_double(-1.0, 1.0)) /
                                       static_cast<double>(nterms);
        p.add_term(f, c);
        TrigPoly::Freq nf{};
        for (int a = 0; a < TrigPoly::kMaxAxes; ++a) nf[a] = -f[a];
        p.add_term(nf, std::conj(c));
    }
    return p;
}

TrigPoly random_complex_trigpoly(int naxes, double period, int max_mode, int nterms,
                                 double amplitude, std::uint64_t seed) {
    TrigPoly p(naxes, uniform_periods(naxes, period));
    RngStream rng(seed, 0xc0351);
    for (int t = 0; t < nterms; ++t) {
        TrigPoly::Freq f{};
        bool nonzero = false;
        for (int a = 0; a < naxes; ++a) {
            f[a] = rng.next_int(-max_mode, max_mode);
            nonzero = nonzero || f[a] != 0;
        }
        if (!nonzero) f[0] = 1;
        p.add_term(f, amplitude *
                          std::complex<double>(rng.next_double(-1.0, 1.0),
                                               rng.next_double(-1.0, 1.0)) /
                          static_cast<double>(nterms));
    }
    return p;
}

}  // namespace hcf
