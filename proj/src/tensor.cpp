#include "hcf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <limits>

namespace hcf {

namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= base;
    return r;
}

}  // namespace

TensorField::TensorField(GridPtr grid, Signature sig)
    : grid_(std::move(grid)), sig_(std::move(sig)) {
    ncomp_ = ipow(static_cast<std::size_t>(grid_->n()), sig_.size());
    data_.assign(ncomp_ * grid_->npoints(), cplx(0.0, 0.0));
}

std::size_t TensorField::comp_index(std::initializer_list<int> idx) const {
    if (idx.size() != sig_.size())
        throw std::invalid_argument("TensorField::comp_index: wrong number of indices");
    std::size_t c = 0;
    const int n = grid_->n();
    for (int i : idx) {
        if (i < 0 || i >= n) throw std::invalid_argument("TensorField::comp_index: index out of range");
        c = c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    }
    return c;
}

TensorField TensorField::conjugated() const {
    Signature flipped = sig_;
    for (auto& s : flipped) s.h = (s.h == Holomorphy::Holo) ? Holomorphy::Anti : Holomorphy::Holo;
    TensorField out(grid_, flipped);
    const std::size_t total = data_.size();
    for (std::size_t i = 0; i < total; ++i) out.data_[i] = std::conj(data_[i]);
    return out;
}

void TensorField::require_same_layout(const TensorField& o) const {
    if (!grid_ || !o.grid_ || !grid_->compatible(*o.grid_))
        throw std::invalid_argument("TensorField: mismatched grids");
    if (sig_ != o.sig_) throw std::invalid_argument("TensorField: mismatched signatures");
}

TensorField& TensorField::operator+=(const TensorField& o) {
    require_same_layout(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
    require_same_layout(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

TensorField& TensorField::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

TensorField partial_holo(const TensorField& f, int a) {
    if (a < 0 || a >= f.grid().n())
        throw std::invalid_argument("partial_holo: complex axis out of range");
    TensorField out(f.grid_ptr(), f.signature());
    for (std::size_t c = 0; c < f.ncomp(); ++c)
        f.grid().wirtinger(f.comp(c).data(), out.comp(c).data(), a, /*anti=*/false);
    return out;
}

TensorField partial_anti(const TensorField& f, int a) {
    if (a < 0 || a >= f.grid().n())
        throw std::invalid_argument("partial_anti: complex axis out of range");
    TensorField out(f.grid_ptr(), f.signature());
    for (std::size_t c = 0; c < f.ncomp(); ++c)
        f.grid().wirtinger(f.comp(c).data(), out.comp(c).data(), a, /*anti=*/true);
    return out;
}

TensorField indexed_partial(const TensorField& f, Holomorphy dir) {
    Signature sig;
    sig.reserve(f.signature().size() + 1);
    sig.push_back(Slot{dir, Variance::Lower});
    sig.insert(sig.end(), f.signature().begin(), f.signature().end());
    TensorField out(f.grid_ptr(), sig);

    const int n = f.grid().n();
    const std::size_t np = f.npoints();
    for (int a = 0; a < n; ++a)
        for (std::size_t c = 0; c < f.ncomp(); ++c) {
            auto dst = out.comp(static_cast<std::size_t>(a) * f.ncomp() + c);
            f.grid().wirtinger(f.comp(c).data(), dst.data(), a, dir == Holomorphy::Anti);
            (void)np;
        }
    return out;
}

TensorField sample_scalar(const GridPtr& grid, const TrigPoly& f) {
    if (f.naxes() != grid->naxes())
        throw std::invalid_argument("sample_scalar: axis count mismatch");
    TensorField out(grid, Signature{});
    auto dst = out.comp(0);
    double x[TorusGrid::kMaxAxes] = {};
    for (std::size_t p = 0; p < grid->npoints(); ++p) {
        grid->coordinates(p, x);
        dst[p] = f.eval(x);
    }
    return out;
}

TensorField constant_scalar(const GridPtr& grid, cplx value) {
    TensorField out(grid, Signature{});
    auto dst = out.comp(0);
    std::fill(dst.begin(), dst.end(), value);
    return out;
}

// ---------------------------------------------------------------------------
// einsum

namespace {

struct ParsedSpec {
    std::vector<std::string> inputs;
    std::string output;
};

ParsedSpec parse_spec(std::string_view spec) {
    ParsedSpec out;
    auto arrow = spec.find("->");
    if (arrow == std::string_view::npos)
        throw std::invalid_argument("einsum: spec needs '->': " + std::string(spec));
    std::string_view in = spec.substr(0, arrow);
    out.output = std::string(spec.substr(arrow + 2));
    std::size_t start = 0;
    while (true) {
        auto comma = in.find(',', start);
        if (comma == std::string_view::npos) {
            out.inputs.emplace_back(in.substr(start));
            break;
        }
        out.inputs.emplace_back(in.substr(start, comma - start));
        start = comma + 1;
    }
    for (const auto& g : out.inputs)
        for (char ch : g)
            if (ch < 'a' || ch > 'z') throw std::invalid_argument("einsum: bad letter in spec");
    for (char ch : out.output)
        if (ch < 'a' || ch > 'z') throw std::invalid_argument("einsum: bad letter in spec");
    return out;
}

Slot effective_slot(const EinsumOp& op, int slot) {
    Slot s = op.f->signature()[static_cast<std::size_t>(slot)];
    if (op.conjugate) s.h = (s.h == Holomorphy::Holo) ? Holomorphy::Anti : Holomorphy::Holo;
    return s;
}

struct Occurrence {
    int op;
    int slot;
};

}  // namespace

void einsum_into(TensorField& out, cplx scale, std::string_view spec_sv, std::vector<EinsumOp> ops) {
    const ParsedSpec spec = parse_spec(spec_sv);
    if (spec.inputs.size() != ops.size())
        throw std::invalid_argument("einsum: operand count does not match spec " +
                                    std::string(spec_sv));
    if (ops.empty()) throw std::invalid_argument("einsum: no operands");

    const TorusGrid& grid = ops[0].f->grid();
    for (const auto& op : ops) {
        if (&op.f->grid() == &out.grid()) continue;
        if (!op.f->grid().compatible(grid) || !out.grid().compatible(grid))
            throw std::invalid_argument("einsum: mismatched grids");
    }
    for (const auto& op : ops)
        if (op.f == &out) throw std::invalid_argument("einsum: output aliases an input");

    // Letter bookkeeping.
    std::vector<Occurrence> first(26, {-1, -1}), second(26, {-1, -1});
    for (int oi = 0; oi < static_cast<int>(ops.size()); ++oi) {
        const std::string& g = spec.inputs[static_cast<std::size_t>(oi)];
        if (static_cast<int>(g.size()) != ops[static_cast<std::size_t>(oi)].f->rank())
            throw std::invalid_argument("einsum: rank mismatch for operand " + std::to_string(oi) +
                                        " in " + std::string(spec_sv));
        for (int sl = 0; sl < static_cast<int>(g.size()); ++sl) {
            int L = g[static_cast<std::size_t>(sl)] - 'a';
            if (first[L].op < 0)
                first[L] = {oi, sl};
            else if (second[L].op < 0)
                second[L] = {oi, sl};
            else
                throw std::invalid_argument("einsum: letter used more than twice in inputs");
        }
    }

    std::string letters;  // distinct letters in a fixed order: output first, then contracted
    std::vector<bool> in_output(26, false);
    for (char ch : spec.output) {
        int L = ch - 'a';
        if (in_output[L]) throw std::invalid_argument("einsum: repeated output letter");
        if (first[L].op < 0) throw std::invalid_argument("einsum: output letter missing from inputs");
        if (second[L].op >= 0)
            throw std::invalid_argument("einsum: contracted letter cannot appear in output");
        in_output[L] = true;
        letters.push_back(ch);
    }
    for (int L = 0; L < 26; ++L) {
        if (first[L].op < 0) continue;
        if (in_output[L]) continue;
        if (second[L].op < 0)
            throw std::invalid_argument("einsum: free letter '" + std::string(1, char('a' + L)) +
                                        "' missing from output in " + std::string(spec_sv));
        // Contraction validity: same holomorphy class, opposite variance.
        Slot s1 = effective_slot(ops[static_cast<std::size_t>(first[L].op)], first[L].slot);
        Slot s2 = effective_slot(ops[static_cast<std::size_t>(second[L].op)], second[L].slot);
        if (s1.h != s2.h || s1.v == s2.v)
            throw std::invalid_argument("einsum: invalid contraction on letter '" +
                                        std::string(1, char('a' + L)) + "' in " +
                                        std::string(spec_sv));
        letters.push_back(static_cast<char>('a' + L));
    }

    // Expected output signature.
    Signature out_sig;
    for (char ch : spec.output) {
        int L = ch - 'a';
        out_sig.push_back(effective_slot(ops[static_cast<std::size_t>(first[L].op)], first[L].slot));
    }
    if (out.signature() != out_sig)
        throw std::invalid_argument("einsum: output signature mismatch for " + std::string(spec_sv));

    const int n = grid.n();
    const std::size_t np = grid.npoints();
    const int nletters = static_cast<int>(letters.size());

    // Per-operand weights: comp = sum over slots of value[letter] * n^(rank-1-slot).
    std::vector<std::vector<std::size_t>> weights(ops.size());  // indexed by letter position
    for (std::size_t oi = 0; oi < ops.size(); ++oi) {
        weights[oi].assign(static_cast<std::size_t>(nletters), 0);
        const std::string& g = spec.inputs[oi];
        const int rank = static_cast<int>(g.size());
        for (int sl = 0; sl < rank; ++sl) {
            std::size_t w = ipow(static_cast<std::size_t>(n), static_cast<std::size_t>(rank - 1 - sl));
            int lpos = static_cast<int>(letters.find(g[static_cast<std::size_t>(sl)]));
            weights[oi][static_cast<std::size_t>(lpos)] += w;
        }
    }
    std::vector<std::size_t> out_weights(static_cast<std::size_t>(nletters), 0);
    {
        const int rank = static_cast<int>(spec.output.size());
        for (int sl = 0; sl < rank; ++sl) {
            std::size_t w = ipow(static_cast<std::size_t>(n), static_cast<std::size_t>(rank - 1 - sl));
            int lpos = static_cast<int>(letters.find(spec.output[static_cast<std::size_t>(sl)]));
            out_weights[static_cast<std::size_t>(lpos)] += w;
        }
    }

    std::vector<int> assign(static_cast<std::size_t>(nletters), 0);
    const std::size_t nassign = ipow(static_cast<std::size_t>(n), static_cast<std::size_t>(nletters));
    const std::size_t nops = ops.size();

    for (std::size_t ai = 0; ai < nassign; ++ai) {
        std::size_t out_c = 0;
        for (int l = 0; l < nletters; ++l)
            out_c += static_cast<std::size_t>(assign[static_cast<std::size_t>(l)]) *
                     out_weights[static_cast<std::size_t>(l)];

        cplx* dst = out.comp(out_c).data();

        // Gather operand component pointers for this assignment.
        const cplx* srcs[8];
        bool conjf[8];
        for (std::size_t oi = 0; oi < nops; ++oi) {
            std::size_t c = 0;
            for (int l = 0; l < nletters; ++l)
                c += static_cast<std::size_t>(assign[static_cast<std::size_t>(l)]) *
                     weights[oi][static_cast<std::size_t>(l)];
            srcs[oi] = ops[oi].f->comp(c).data();
            conjf[oi] = ops[oi].conjugate;
        }

        auto term = [&](std::size_t oi, std::size_t p) {
            return conjf[oi] ? std::conj(srcs[oi][p]) : srcs[oi][p];
        };

        switch (nops) {
            case 1:
                for (std::size_t p = 0; p < np; ++p) dst[p] += scale * term(0, p);
                break;
            case 2:
                for (std::size_t p = 0; p < np; ++p) dst[p] += scale * term(0, p) * term(1, p);
                break;
            case 3:
                for (std::size_t p = 0; p < np; ++p)
                    dst[p] += scale * term(0, p) * term(1, p) * term(2, p);
                break;
            default:
                for (std::size_t p = 0; p < np; ++p) {
                    cplx acc = term(0, p);
                    for (std::size_t oi = 1; oi < nops; ++oi) acc *= term(oi, p);
                    dst[p] += scale * acc;
                }
        }

        // Odometer over letter values (last letter fastest).
        for (int l = nletters - 1; l >= 0; --l) {
            if (++assign[static_cast<std::size_t>(l)] < n) break;
            assign[static_cast<std::size_t>(l)] = 0;
        }
    }
}

TensorField einsum(std::string_view spec_sv, std::vector<EinsumOp> ops, cplx scale) {
    const ParsedSpec spec = parse_spec(spec_sv);
    if (spec.inputs.size() != ops.size() || ops.empty())
        throw std::invalid_argument("einsum: operand count does not match spec " +
                                    std::string(spec_sv));
    // Build the output signature the same way einsum_into will expect it.
    std::vector<Occurrence> first(26, {-1, -1}), second(26, {-1, -1});
    for (int oi = 0; oi < static_cast<int>(ops.size()); ++oi) {
        const std::string& g = spec.inputs[static_cast<std::size_t>(oi)];
        if (static_cast<int>(g.size()) != ops[static_cast<std::size_t>(oi)].f->rank())
            throw std::invalid_argument("einsum: rank mismatch in " + std::string(spec_sv));
        for (int sl = 0; sl < static_cast<int>(g.size()); ++sl) {
            int L = g[static_cast<std::size_t>(sl)] - 'a';
            if (first[L].op < 0)
                first[L] = {oi, sl};
            else
                second[L] = {oi, sl};
        }
    }
    Signature out_sig;
    for (char ch : spec.output) {
        int L = ch - 'a';
        if (first[L].op < 0) throw std::invalid_argument("einsum: output letter missing from inputs");
        out_sig.push_back(effective_slot(ops[static_cast<std::size_t>(first[L].op)], first[L].slot));
    }
    TensorField out(ops[0].f->grid_ptr(), out_sig);
    einsum_into(out, scale, spec_sv, std::move(ops));
    return out;
}

TensorField permuted(const TensorField& t, std::string_view spec) { return einsum(spec, {t}); }

// ---------------------------------------------------------------------------

double sup_abs(const TensorField& t) {
    double m = 0.0;
    for (const auto& v : t.raw()) m = std::max(m, std::abs(v));
    return m;
}

double sup_abs_diff(const TensorField& a, const TensorField& b) {
    a.require_same_layout(b);
    double m = 0.0;
    auto ra = a.raw();
    auto rb = b.raw();
    for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
    return m;
}

double max_real(const TensorField& scalar) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : scalar.raw()) m = std::max(m, v.real());
    return m;
}

double min_real(const TensorField& scalar) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : scalar.raw()) m = std::min(m, v.real());
    return m;
}

double sup_imag(const TensorField& t) {
    double m = 0.0;
    for (const auto& v : t.raw()) m = std::max(m, std::abs(v.imag()));
    return m;
}

}  // namespace hcf
