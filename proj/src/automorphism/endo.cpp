#include "cotame/endo.hpp"

#include <algorithm>

namespace cotame {

Endo::Endo(std::vector<Poly> comps) : c_(std::move(comps)) {
    for (auto& p : c_)
        if (p.nvars() != c_[0].nvars()) throw DimensionMismatch("components of different dimensions");
    if (!c_.empty() && c_[0].nvars() < dim()) throw DimensionMismatch("fewer variables than components");
}

Endo Endo::identity(int n, int nvars) {
    if (nvars < 0) nvars = n;
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(Poly::var(nvars, i));
    return Endo(std::move(c));
}

Field Endo::field() const {
    Field f;
    for (auto& p : c_) f = join(f, p.field());
    return f;
}

bool Endo::is_identity() const {
    for (int i = 0; i < dim(); ++i)
        if (c_[i] != Poly::var(nvars(), i)) return false;
    return true;
}

long Endo::degree() const {
    long d = kNegInf;
    for (auto& p : c_) d = std::max(d, p.total_degree());
    return d;
}

size_t Endo::term_count() const {
    size_t s = 0;
    for (auto& p : c_) s += p.size();
    return s;
}

Endo Endo::widen(int nvars) const {
    std::vector<Poly> c;
    for (auto& p : c_) c.push_back(p.widen(nvars));
    return Endo(std::move(c));
}

Endo Endo::affine_part() const {
    std::vector<Poly> c;
    for (auto& p : c_) c.push_back(p.degree_part(0, 1));
    return Endo(std::move(c));
}

Endo compose(const Endo& a, const Endo& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("composing maps of different dimensions");
    std::vector<Poly> c;
    c.reserve(a.dim());
    for (auto& p : a.components()) c.push_back(substitute(p, b.components()));
    return Endo(std::move(c));
}

Endo compose_all(const std::vector<Endo>& seq) {
    if (seq.empty()) throw PreconditionError("empty composition");
    Endo r = seq[0];
    for (size_t i = 1; i < seq.size(); ++i) r = compose(r, seq[i]);
    return r;
}

bool is_affine(const Endo& e) { return e.degree() <= 1; }

bool is_affine_in_x(const Endo& e) {
    int n = e.dim();
    for (auto& p : e.components())
        for (auto& t : p.terms()) {
            int d = 0;
            for (int i = 0; i < n; ++i) d += t.m.e[i];
            if (d > 1) return false;
        }
    return true;
}

Matrix linear_part(const Endo& e) {
    int n = e.dim();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Monomial mono;
            mono.e[j] = 1;
            m(i, j) = e[i].coeff(mono);
        }
    return m;
}

std::vector<Scalar> constant_part(const Endo& e) {
    std::vector<Scalar> v;
    for (auto& p : e.components()) v.push_back(p.constant_term());
    return v;
}

Endo affine_endo(const Matrix& m, const std::vector<Scalar>& v) {
    int n = m.rows();
    if (m.cols() != n || static_cast<int>(v.size()) != n) throw DimensionMismatch("affine data shape");
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) {
        std::vector<Term> ts;
        for (int j = 0; j < n; ++j) {
            if (m(i, j).is_zero()) continue;
            Monomial mono;
            mono.e[j] = 1;
            ts.push_back(Term{mono, m(i, j)});
        }
        if (!v[i].is_zero()) ts.push_back(Term{Monomial{}, v[i]});
        c.push_back(Poly::from_terms(n, std::move(ts)));
    }
    return Endo(std::move(c));
}

Endo affine_inverse(const Endo& e) {
    if (!is_affine(e)) throw PreconditionError("map is not affine");
    Matrix inv = linear_part(e).inverse();
    std::vector<Scalar> v = inv * constant_part(e);
    for (auto& x : v) x = -x;
    return affine_endo(inv, v);
}

Endo translation(int n, int var, const Scalar& c) {
    std::vector<Poly> comps;
    for (int i = 0; i < n; ++i) comps.push_back(Poly::var(n, i));
    comps[var] += Poly::constant(n, c);
    return Endo(std::move(comps));
}

Endo swap_vars(int n, int i, int j) {
    std::vector<int> s(n);
    for (int k = 0; k < n; ++k) s[k] = k;
    std::swap(s[i], s[j]);
    return permutation_endo(s);
}

Endo permutation_endo(const std::vector<int>& sigma) {
    int n = static_cast<int>(sigma.size());
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(Poly::var(n, sigma[i]));
    return Endo(std::move(c));
}

VarContext context_for(const Endo& e) {
    VarContext ctx;
    ctx.n = e.dim();
    ctx.field = e.field();
    ctx.with_t = e.nvars() > e.dim();
    return ctx;
}

Endo parse_endo(const std::string& text, const VarContext& ctx) {
    auto parts = split_tuple(text);
    if (static_cast<int>(parts.size()) != ctx.n)
        throw ParseError("expected " + std::to_string(ctx.n) + " components, got " + std::to_string(parts.size()));
    std::vector<Poly> c;
    for (auto& s : parts) c.push_back(parse_poly(s, ctx));
    return Endo(std::move(c));
}

std::string to_string(const Endo& e, const VarContext& ctx) {
    std::string out = "(";
    for (int i = 0; i < e.dim(); ++i) {
        if (i) out += ", ";
        out += to_string(e[i], ctx);
    }
    return out + ")";
}

std::string to_string(const Endo& e) { return to_string(e, context_for(e)); }

}  // namespace cotame
