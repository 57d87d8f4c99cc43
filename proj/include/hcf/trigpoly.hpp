/// @file trigpoly.hpp
/// @brief Exact trigonometric polynomials on the periodic box.
///
/// A TrigPoly is a finite sum  sum_m c_m exp(i <2*pi*m/L, x>)  over integer
/// frequency vectors m on up to six real axes. The class is closed under
/// sum, product, conjugation and partial differentiation, which makes it
/// usable both as the generator of analytic metric presets (sampled exactly
/// onto grids) and as an independent derivative oracle in tests: its
/// derivatives are computed symbolically, never through a grid operator.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace hcf {

class TrigPoly {
public:
    static constexpr int kMaxAxes = 6;
    using Freq = std::array<int, kMaxAxes>;
    using cplx = std::complex<double>;

    TrigPoly() = default;

    explicit TrigPoly(int naxes, std::array<double, kMaxAxes> periods)
        : naxes_(naxes), periods_(periods) {}

    /// Polynomial with the same axes/periods layout but no terms.
    TrigPoly like() const { return TrigPoly(naxes_, periods_); }

    static TrigPoly constant(int naxes, std::array<double, kMaxAxes> periods, cplx value) {
        TrigPoly p(naxes, periods);
        p.add_term(Freq{}, value);
        return p;
    }

    /// exp(i * 2*pi/L_axis * x_axis) raised to integer power k (k may be negative).
    static TrigPoly mode(int naxes, std::array<double, kMaxAxes> periods, int axis, int k,
                         cplx coeff = 1.0) {
        TrigPoly p(naxes, periods);
        Freq f{};
        f[axis] = k;
        p.add_term(f, coeff);
        return p;
    }

    /// cos(2*pi*k_axis*x/L) and sin: convenience real building blocks.
    static TrigPoly cosine(int naxes, std::array<double, kMaxAxes> periods, int axis, int k = 1) {
        TrigPoly p = mode(naxes, periods, axis, k, 0.5);
        p.add_term(negated(single(axis, k)), 0.5);
        return p;
    }
    static TrigPoly sine(int naxes, std::array<double, kMaxAxes> periods, int axis, int k = 1) {
        TrigPoly p = mode(naxes, periods, axis, k, cplx(0.0, -0.5));
        p.add_term(negated(single(axis, k)), cplx(0.0, 0.5));
        return p;
    }

    void add_term(const Freq& f, cplx c) {
        auto it = terms_.find(f);
        if (it == terms_.end()) {
            if (std::abs(c) != 0.0) terms_.emplace(f, c);
        } else {
            it->second += c;
            if (std::abs(it->second) == 0.0) terms_.erase(it);
        }
    }

    int naxes() const { return naxes_; }
    const std::array<double, kMaxAxes>& periods() const { return periods_; }
    const std::map<Freq, cplx>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// Largest |m_axis| over all terms; bounds the bandwidth per axis.
    int max_frequency() const {
        int m = 0;
        for (const auto& [f, c] : terms_)
            for (int a = 0; a < naxes_; ++a) m = std::max(m, std::abs(f[a]));
        return m;
    }

    cplx eval(const double* x) const {
        cplx sum = 0.0;
        for (const auto& [f, c] : terms_) {
            double phase = 0.0;
            for (int a = 0; a < naxes_; ++a)
                if (f[a] != 0) phase += 2.0 * M_PI * f[a] * x[a] / periods_[a];
            sum += c * std::polar(1.0, phase);
        }
        return sum;
    }

    TrigPoly operator+(const TrigPoly& o) const {
        check_compatible(o);
        TrigPoly r = *this;
        for (const auto& [f, c] : o.terms_) r.add_term(f, c);
        return r;
    }
    TrigPoly operator-(const TrigPoly& o) const {
        check_compatible(o);
        TrigPoly r = *this;
        for (const auto& [f, c] : o.terms_) r.add_term(f, -c);
        return r;
    }
    TrigPoly operator*(const TrigPoly& o) const {
        check_compatible(o);
        TrigPoly r = like();
        for (const auto& [f1, c1] : terms_)
            for (const auto& [f2, c2] : o.terms_) {
                Freq f{};
                for (int a = 0; a < kMaxAxes; ++a) f[a] = f1[a] + f2[a];
                r.add_term(f, c1 * c2);
            }
        return r;
    }
    TrigPoly operator*(cplx s) const {
        TrigPoly r = like();
        for (const auto& [f, c] : terms_) r.add_term(f, c * s);
        return r;
    }
    TrigPoly operator-() const { return *this * cplx(-1.0); }

    TrigPoly conj() const {
        TrigPoly r = like();
        for (const auto& [f, c] : terms_) r.add_term(negated(f), std::conj(c));
        return r;
    }

    /// d/dx_axis, exact.
    TrigPoly deriv(int axis) const {
        if (axis < 0 || axis >= naxes_) throw std::invalid_argument("TrigPoly::deriv: bad axis");
        TrigPoly r = like();
        for (const auto& [f, c] : terms_)
            if (f[axis] != 0) r.add_term(f, c * cplx(0.0, 2.0 * M_PI * f[axis] / periods_[axis]));
        return r;
    }

    /// Wirtinger derivatives for the complex pairing z^a = x_a + i*x_{n+a},
    /// where n = naxes/2 complex dimensions.
    TrigPoly wirtinger_holo(int a) const {
        int n = naxes_ / 2;
        return (deriv(a) - deriv(n + a) * cplx(0.0, 1.0)) * 0.5;
    }
    TrigPoly wirtinger_anti(int a) const {
        int n = naxes_ / 2;
        return (deriv(a) + deriv(n + a) * cplx(0.0, 1.0)) * 0.5;
    }

private:
    static Freq single(int axis, int k) {
        Freq f{};
        f[axis] = k;
        return f;
    }
    static Freq negated(const Freq& f) {
        Freq g{};
        for (int a = 0; a < kMaxAxes; ++a) g[a] = -f[a];
        return g;
    }
    void check_compatible(const TrigPoly& o) const {
        if (naxes_ != o.naxes_ || periods_ != o.periods_)
            throw std::invalid_argument("TrigPoly: mixed axis layouts");
    }

    int naxes_ = 0;
    std::array<double, kMaxAxes> periods_{};
    std::map<Freq, cplx> terms_;
};

inline TrigPoly operator*(std::complex<double> s, const TrigPoly& p) { return p * s; }

}  // namespace hcf
