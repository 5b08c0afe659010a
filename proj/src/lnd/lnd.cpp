#include "cotame/lnd.hpp"

#include <cmath>

namespace cotame {

TriangularDerivation::TriangularDerivation(std::vector<Poly> images) : img_(std::move(images)) {
    int n = dim();
    for (int i = 0; i < n; ++i) {
        if (img_[i].nvars() != n) throw DimensionMismatch("derivation image in the wrong dimension");
        for (int v = i; v < n; ++v)
            if (img_[i].depends_on(v))
                throw PreconditionError("derivation is not triangular: D(x" + std::to_string(i + 1) + ") involves x" +
                                        std::to_string(v + 1));
    }
}

TriangularDerivation TriangularDerivation::scaled(const Poly& f) const {
    TriangularDerivation d;
    for (auto& p : img_) d.img_.push_back(p * f);
    return d;
}

Poly apply(const TriangularDerivation& d, const Poly& p) {
    if (p.nvars() != d.dim()) throw DimensionMismatch("derivation and polynomial dimensions differ");
    Poly out(p.nvars(), p.field());
    for (int i = 0; i < d.dim(); ++i) {
        if (d.image(i).is_zero() || !p.depends_on(i)) continue;
        out += partial_derivative(p, i) * d.image(i);
    }
    return out;
}

bool kernel_member(const TriangularDerivation& d, const Poly& f) { return apply(d, f).is_zero(); }

Endo exponential(const TriangularDerivation& d, const Poly& f) {
    if (!kernel_member(d, f)) throw PreconditionError("F is not in the kernel of D");
    int n = d.dim();
    long maxdeg = std::max<long>(0, f.total_degree());
    for (auto& p : d.images()) maxdeg = std::max(maxdeg, p.total_degree());
    double capd = 1.0 + n * std::pow(1.0 + static_cast<double>(maxdeg), n);
    long cap = capd > 1e9 ? 1000000000L : static_cast<long>(capd);
    std::vector<Poly> comps;
    for (int r = 0; r < n; ++r) {
        Poly term = Poly::var(n, r);
        Poly sum = term;
        long i = 1;
        while (true) {
            term = (apply(d, term) * f).scaled(Scalar(1, i));
            if (term.is_zero()) break;
            sum += term;
            if (++i > cap) throw InternalError("exponential series did not terminate within its cap");
        }
        comps.push_back(sum);
    }
    return Endo(std::move(comps));
}

TriangularDerivation nagata_derivation() {
    return TriangularDerivation({Poly(3), Poly::var(3, 0), Poly::var(3, 1).scaled(Scalar(-2))});
}

Poly nagata_kernel_element() { return Poly::var(3, 1).pow(2) + Poly::var(3, 0) * Poly::var(3, 2); }

Endo nagata_map() { return exponential(nagata_derivation(), nagata_kernel_element()); }

TriangularDerivation parse_derivation(const std::string& text, const VarContext& ctx) {
    std::vector<Poly> img(ctx.n, Poly(ctx.n, ctx.field));
    std::vector<bool> seen(ctx.n, false);
    size_t start = 0;
    while (start <= text.size()) {
        size_t semi = text.find(';', start);
        std::string part = trim(text.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
        start = semi == std::string::npos ? text.size() + 1 : semi + 1;
        if (part.empty()) continue;
        size_t arrow = part.find("->");
        if (arrow == std::string::npos) throw ParseError("expected 'xi -> image' in derivation: " + part);
        Poly v = parse_poly(part.substr(0, arrow), ctx);
        int idx = v.max_var();
        if (v.size() != 1 || !v.leading().c.is_one() || v.total_degree() != 1 || idx >= ctx.n)
            throw ParseError("left side of a derivation entry must be a variable: " + part);
        if (seen[idx]) throw ParseError("variable assigned twice in derivation");
        seen[idx] = true;
        img[idx] = parse_poly(part.substr(arrow + 2), ctx);
    }
    try {
        return TriangularDerivation(std::move(img));
    } catch (const PreconditionError& e) {
        throw ParseError(e.what());
    }
}

std::string to_string(const TriangularDerivation& d, const VarContext& ctx) {
    std::string out;
    for (int i = 0; i < d.dim(); ++i) {
        if (i) out += "; ";
        out += ctx.name(i) + " -> " + to_string(d.image(i), ctx);
    }
    return out;
}

}  // namespace cotame
