#include "cotame/automorphism.hpp"

#include <algorithm>

namespace cotame {

TriangularData triangular_data(const Endo& e) {
    int n = e.dim();
    TriangularData d;
    for (int i = 0; i < n; ++i) {
        const Poly& p = e[i];
        Monomial xi;
        xi.e[i] = 1;
        Scalar u = p.coeff(xi);
        if (u.is_zero()) throw PreconditionError("component " + std::to_string(i + 1) + " lacks a unit times x" + std::to_string(i + 1));
        Poly tail = p - Poly::monomial(p.nvars(), xi, u);
        for (int v = i; v < p.nvars(); ++v)
            if (tail.depends_on(v))
                throw PreconditionError("component " + std::to_string(i + 1) + " is not lower triangular");
        d.units.push_back(u);
        d.tails.push_back(tail);
    }
    return d;
}

bool is_triangular(const Endo& e) {
    try {
        triangular_data(e);
        return true;
    } catch (const PreconditionError&) {
        return false;
    }
}

Endo triangular_endo(const TriangularData& d) {
    int n = static_cast<int>(d.units.size());
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(Poly::var(n, i).scaled(d.units[i]) + d.tails[i]);
    return Endo(std::move(c));
}

TriangularData triangular_inverse(const TriangularData& d) {
    int n = static_cast<int>(d.units.size());
    TriangularData r;
    std::vector<Poly> sigma;
    for (int i = 0; i < n; ++i) {
        Scalar inv = d.units[i].inverse();
        Poly tail = d.tails[i].is_zero() ? Poly(n) : substitute(d.tails[i], sigma);
        tail = (-tail).scaled(inv);
        if (tail.nvars() != n) tail = tail.widen(n);
        r.units.push_back(inv);
        r.tails.push_back(tail);
        sigma.push_back(Poly::var(n, i).scaled(inv) + tail);
    }
    return r;
}

GeneratorToken GeneratorToken::affine(const Matrix& m, const std::vector<Scalar>& v) {
    if (m.rows() != m.cols() || static_cast<int>(v.size()) != m.rows()) throw DimensionMismatch("affine token shape");
    if (!m.invertible()) throw PreconditionError("affine token with a singular matrix");
    GeneratorToken t;
    t.kind_ = Kind::Affine;
    t.n_ = m.rows();
    t.m_ = m;
    t.v_ = v;
    return t;
}

GeneratorToken GeneratorToken::affine(const Endo& e) {
    if (!is_affine(e)) throw PreconditionError("not an affine map");
    return affine(linear_part(e), constant_part(e));
}

GeneratorToken GeneratorToken::triangular(const TriangularData& d) {
    GeneratorToken t;
    t.kind_ = Kind::Triangular;
    t.n_ = static_cast<int>(d.units.size());
    if (static_cast<int>(d.tails.size()) != t.n_) throw DimensionMismatch("triangular token shape");
    // re-validate through the Endo
    t.tri_ = cotame::triangular_data(triangular_endo(d));
    return t;
}

GeneratorToken GeneratorToken::triangular(const Endo& e) { return triangular(cotame::triangular_data(e)); }

GeneratorToken GeneratorToken::permutation(const std::vector<int>& sigma) {
    int n = static_cast<int>(sigma.size());
    std::vector<int> s = sigma;
    std::sort(s.begin(), s.end());
    for (int i = 0; i < n; ++i)
        if (s[i] != i) throw PreconditionError("not a permutation");
    GeneratorToken t;
    t.kind_ = Kind::Permutation;
    t.n_ = n;
    t.sigma_ = sigma;
    return t;
}

GeneratorToken GeneratorToken::exp_fd(const TriangularDerivation& d, const Poly& f) {
    if (f.nvars() != d.dim()) throw DimensionMismatch("kernel element dimension");
    if (!kernel_member(d, f)) throw PreconditionError("F is not in the kernel of D");
    GeneratorToken t;
    t.kind_ = Kind::ExpFD;
    t.n_ = d.dim();
    t.d_ = d;
    t.f_ = f;
    return t;
}

GeneratorToken GeneratorToken::inverted() const {
    GeneratorToken t = *this;
    t.inv_ = !inv_;
    return t;
}

GeneratorToken GeneratorToken::base() const {
    GeneratorToken t = *this;
    t.inv_ = false;
    return t;
}

GeneratorToken invert_token(const GeneratorToken& t) {
    if (t.is_inverse()) return t.base();
    switch (t.kind()) {
        case GeneratorToken::Kind::Affine: {
            Endo inv = affine_inverse(affine_endo(t.matrix(), t.vector()));
            return GeneratorToken::affine(inv);
        }
        case GeneratorToken::Kind::Triangular:
            return GeneratorToken::triangular(triangular_inverse(t.triangular_data()));
        case GeneratorToken::Kind::Permutation: {
            std::vector<int> inv(t.dim());
            for (int i = 0; i < t.dim(); ++i) inv[t.sigma()[i]] = i;
            return GeneratorToken::permutation(inv);
        }
        case GeneratorToken::Kind::ExpFD:
            return GeneratorToken::exp_fd(t.derivation(), -t.kernel_element());
    }
    throw Error("unknown token kind");
}

Endo flatten(const GeneratorToken& t) {
    if (t.is_inverse()) return flatten(invert_token(t.base()));
    switch (t.kind()) {
        case GeneratorToken::Kind::Affine:
            return affine_endo(t.matrix(), t.vector());
        case GeneratorToken::Kind::Triangular:
            return triangular_endo(t.triangular_data());
        case GeneratorToken::Kind::Permutation:
            return permutation_endo(t.sigma());
        case GeneratorToken::Kind::ExpFD:
            return exponential(t.derivation(), t.kernel_element());
    }
    throw Error("unknown token kind");
}

AutoWord::AutoWord(int dim, std::vector<GeneratorToken> toks) : n(dim), tokens(std::move(toks)) {
    for (auto& t : tokens)
        if (t.dim() != n) throw DimensionMismatch("token dimension differs from word dimension");
}

AutoWord& AutoWord::push(const GeneratorToken& t) {
    if (t.dim() != n) throw DimensionMismatch("token dimension differs from word dimension");
    tokens.push_back(t);
    return *this;
}

AutoWord& AutoWord::append(const AutoWord& w) {
    if (w.n != n) throw DimensionMismatch("word dimensions differ");
    tokens.insert(tokens.end(), w.tokens.begin(), w.tokens.end());
    return *this;
}

AutoWord inverse(const AutoWord& w) {
    AutoWord r(w.n);
    for (auto it = w.tokens.rbegin(); it != w.tokens.rend(); ++it) r.tokens.push_back(it->inverted());
    return r;
}

AutoWord concat(const AutoWord& a, const AutoWord& b) {
    AutoWord r = a;
    r.append(b);
    return r;
}

namespace {

bool lower_triangular_shape(const Endo& g) {
    int n = g.dim();
    for (int i = 0; i < n; ++i) {
        Monomial m;
        m.e[i] = 1;
        if (g[i].coeff(m).is_zero()) return false;
        Poly tail = g[i] - Poly::var(g.nvars(), i).scaled(g[i].coeff(m));
        if (tail.max_var() >= i) return false;
    }
    return true;
}

Endo solve_triangular_conjugate(const Endo& g, const Endo& t) {
    int n = g.dim();
    Endo tg = compose(t, g);
    std::vector<Poly> r;
    r.reserve(n);
    for (int i = 0; i < n; ++i) {
        Monomial m;
        m.e[i] = 1;
        Scalar u = g[i].coeff(m);
        Poly tail = g[i] - Poly::var(g.nvars(), i).scaled(u);
        Poly rhs = tg[i];
        if (!tail.is_zero()) rhs -= i == 0 ? tail.widen(rhs.nvars()) : substitute(tail, r);
        r.push_back(rhs.scaled(u.inverse()));
    }
    return Endo(std::move(r));
}

}  // namespace

Endo conjugate_by_triangular(const Endo& g, const Endo& t) {
    if (!lower_triangular_shape(g)) throw PreconditionError("map is not lower triangular");
    return solve_triangular_conjugate(g, t);
}

Endo conjugate_segment(const WordSegment& g, const Endo& t) {
    if (g.triangular) return solve_triangular_conjugate(g.map, t);
    return compose(compose(g.inv, t), g.map);
}

std::vector<WordSegment> flatten_segments(const AutoWord& w) {
    std::vector<WordSegment> out;
    Endo run;
    bool have_run = false;
    auto flush = [&] {
        if (have_run && !run.is_identity()) out.push_back({run, affine_inverse(run)});
        have_run = false;
    };
    for (auto& t : w.tokens) {
        Endo e = flatten(t);
        if (is_affine(e)) {
            run = have_run ? compose(run, e) : std::move(e);
            have_run = true;
            continue;
        }
        flush();
        // the inverse of a triangular token is left empty; conjugate_segment never needs it
        bool tri = lower_triangular_shape(e);
        Endo inv = tri ? Endo() : flatten(t.inverted());
        out.push_back({std::move(e), std::move(inv), tri});
    }
    flush();
    return out;
}

namespace {

Endo flatten_plain(const AutoWord& w) {
    std::vector<WordSegment> seg = flatten_segments(w);
    if (seg.empty()) return Endo::identity(w.n);
    Endo r = std::move(seg[0].map);
    for (size_t i = 1; i < seg.size(); ++i) r = compose(r, seg[i].map);
    return r;
}

bool mutually_inverse(const GeneratorToken& a, const GeneratorToken& b) {
    if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
    return flatten(a) == flatten(b.inverted());
}

}  // namespace

Endo flatten(const AutoWord& w) {
    // U⁻¹ X U is flattened as a conjugation, which never substitutes into the inverses of U's tokens
    size_t m = w.tokens.size(), k = 0;
    while (2 * k + 1 < m && mutually_inverse(w.tokens[k], w.tokens[m - 1 - k])) ++k;
    if (k == 0) return flatten_plain(w);
    AutoWord mid(w.n, {w.tokens.begin() + k, w.tokens.end() - k});
    AutoWord u(w.n, {w.tokens.end() - k, w.tokens.end()});
    Endo t = flatten_plain(mid);
    for (auto& seg : flatten_segments(u)) t = conjugate_segment(seg, t);
    return t;
}

bool verify_automorphism(const AutoWord& w) {
    return compose(flatten(w), flatten(inverse(w))).is_identity();
}

std::vector<std::string> Classification::labels() const {
    std::vector<std::string> out;
    if (identity) out.push_back("identity");
    if (translation) out.push_back("translation");
    if (affine) out.push_back("affine");
    if (linear) out.push_back("linear");
    if (triangular) out.push_back("triangular");
    if (permutation) out.push_back("permutation");
    if (parabolic) out.push_back("parabolic");
    return out;
}

bool is_parabolic(const Endo& e) {
    int n = e.dim();
    int last = n - 1;
    for (int i = 0; i < last; ++i)
        if (e[i].depends_on(last)) return false;
    const Poly& p = e[last];
    if (p.degree_in(last) != 1) return false;
    Monomial xn;
    xn.e[last] = 1;
    Scalar a = p.coeff(xn);
    if (a.is_zero()) return false;
    Poly rest = p - Poly::monomial(p.nvars(), xn, a);
    return !rest.depends_on(last);
}

bool is_translation(const Endo& e) {
    for (int i = 0; i < e.dim(); ++i) {
        Poly d = e[i] - Poly::var(e.nvars(), i);
        if (!d.is_constant()) return false;
    }
    return true;
}

Classification classify(const Endo& e) {
    Classification c;
    c.identity = e.is_identity();
    c.affine = is_affine(e);
    c.translation = c.affine && is_translation(e);
    if (c.affine) {
        c.linear = true;
        for (auto& p : e.components())
            if (!p.constant_term().is_zero()) c.linear = false;
    }
    c.triangular = is_triangular(e);
    c.permutation = true;
    std::vector<bool> used(e.dim(), false);
    for (auto& p : e.components()) {
        if (p.size() != 1 || !p.leading().c.is_one() || p.total_degree() != 1) {
            c.permutation = false;
            break;
        }
        int v = p.max_var();
        if (v >= e.dim() || used[v]) {
            c.permutation = false;
            break;
        }
        used[v] = true;
    }
    c.parabolic = is_parabolic(e);
    return c;
}

AffineNormalization affine_normalize(const Endo& e) {
    if (!is_triangular(e) && !is_parabolic(e)) throw PreconditionError("affine_normalize needs a triangular or parabolic map");
    Endo a1 = e.affine_part();
    Endo core = compose(affine_inverse(a1), e);
    return {a1, core, Endo::identity(e.dim())};
}

}  // namespace cotame
