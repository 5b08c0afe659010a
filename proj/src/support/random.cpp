#include "cotame/random.hpp"

namespace cotame {

Scalar random_scalar(Rng& rng, int bound, int den) {
    std::uniform_int_distribution<int> num(-bound, bound), dd(1, den);
    int a = 0;
    while (a == 0) a = num(rng);
    return Scalar(a, dd(rng));
}

Scalar random_nonzero_integer(Rng& rng, int bound) {
    std::uniform_int_distribution<int> num(-bound, bound);
    int a = 0;
    while (a == 0) a = num(rng);
    return Scalar(a);
}

Poly random_poly(Rng& rng, int nvars, int first, int last, int mindeg, int maxdeg, int terms) {
    if (last <= first) return Poly(nvars);
    std::uniform_int_distribution<int> deg(mindeg, maxdeg), var(first, last - 1);
    std::vector<Term> ts;
    for (int k = 0; k < terms; ++k) {
        Monomial m;
        int d = deg(rng);
        for (int i = 0; i < d; ++i) ++m.e[var(rng)];
        ts.push_back(Term{m, random_scalar(rng)});
    }
    return Poly::from_terms(nvars, std::move(ts));
}

Matrix random_invertible(Rng& rng, int n, int bound) {
    std::uniform_int_distribution<int> e(-bound, bound);
    while (true) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Scalar(e(rng));
        if (m.invertible()) return m;
    }
}

Endo random_triangular(Rng& rng, int n, int maxdeg, int terms, bool unit_diag) {
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) {
        Scalar u = unit_diag ? Scalar(1) : random_scalar(rng, 3, 2);
        Poly tail = random_poly(rng, n, 0, i, 0, maxdeg, terms);
        c.push_back(Poly::var(n, i).scaled(u) + tail);
    }
    return Endo(std::move(c));
}

TriangularDerivation random_triangular_derivation(Rng& rng, int n, int maxdeg, int terms) {
    std::vector<Poly> img;
    for (int i = 0; i < n; ++i) img.push_back(random_poly(rng, n, 0, i, 0, maxdeg, terms));
    return TriangularDerivation(std::move(img));
}

TTDParams random_ttd_params(Rng& rng, int n) {
    TTDParams p = TTDParams::make(n);
    for (int k = 1; k < n; ++k) {
        p.d[k] = static_cast<int>(rng() % 2);
        p.b[k] = rng() % 3 ? random_scalar(rng, 3, 2) : Scalar(0);
    }
    return p;
}

AutoWord upper_shear_word(const Poly& p_lower, int n) {
    std::vector<int> rev(n);
    for (int i = 0; i < n; ++i) rev[i] = n - 1 - i;
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(Poly::var(n, i));
    c[n - 1] += p_lower;
    auto pr = GeneratorToken::permutation(rev);
    return AutoWord(n, {pr, GeneratorToken::triangular(Endo(std::move(c))), pr});
}

TDInstance random_td_instance(Rng& rng, int n, int maxdeg) {
    TDInstance inst;
    inst.r = static_cast<int>(rng() % n);
    AutoWord v(n);
    v.push(GeneratorToken::affine(random_invertible(rng, n), std::vector<Scalar>(n, Scalar(0))));
    v.push(GeneratorToken::triangular(ttd_build(random_ttd_params(rng, n))).inverted());
    // γ: triangular in x2..xn with tails free of x1
    std::vector<Poly> g{Poly::var(n, 0)};
    for (int k = 1; k < n; ++k)
        g.push_back(Poly::var(n, k).scaled(random_scalar(rng, 3, 2)) + random_poly(rng, n, 1, k, 0, maxdeg, 2));
    v.push(GeneratorToken::triangular(Endo(std::move(g))));
    v.append(upper_shear_word(random_poly(rng, n, 0, n - 1, 0, maxdeg, 2), n));
    std::vector<int> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = i;
    std::swap(rho[0], rho[inst.r]);
    v.push(GeneratorToken::permutation(rho));
    inst.v = v;
    inst.phi = inverse(v);
    return inst;
}

Endo random_affine(Rng& rng, int n) {
    std::vector<Scalar> v(n);
    for (auto& x : v) x = rng() % 2 ? random_scalar(rng, 3, 1) : Scalar(0);
    return affine_endo(random_invertible(rng, n), v);
}

AutoWord random_parabolic_word(Rng& rng, int n, int maxdeg, int terms) {
    AutoWord w(n);
    std::vector<Poly> base;
    if (rng() % 3 == 0) {
        Endo a = random_affine(rng, n - 1);
        for (int i = 0; i < n - 1; ++i) base.push_back(a[i].widen(n));
    } else {
        for (int i = 0; i < n - 1; ++i)
            base.push_back(Poly::var(n, i).scaled(random_scalar(rng, 2, 1)) + random_poly(rng, n, 0, i, 0, maxdeg, terms));
    }
    base.push_back(Poly::var(n, n - 1));
    Endo y(base);
    w.push(is_affine(y) ? GeneratorToken::affine(y) : GeneratorToken::triangular(y));
    std::vector<Poly> last;
    for (int i = 0; i < n - 1; ++i) last.push_back(Poly::var(n, i));
    last.push_back(Poly::var(n, n - 1).scaled(random_scalar(rng, 2, 1)) + random_poly(rng, n, 0, n - 1, 0, maxdeg, terms));
    w.push(GeneratorToken::triangular(Endo(last)));
    return w;
}

AutoWord random_3triangular_word(Rng& rng, int n, int maxdeg, int terms, long max_product) {
    std::uniform_int_distribution<int> deg(1, maxdeg);
    for (;;) {
        AutoWord w(n);
        long product = 1;
        for (int k = 0; k < 3; ++k) {
            Endo t = random_triangular(rng, n, deg(rng), terms);
            product *= std::max<long>(1, t.degree());
            w.push(GeneratorToken::affine(random_affine(rng, n)));
            w.push(GeneratorToken::triangular(t));
        }
        w.push(GeneratorToken::affine(random_affine(rng, n)));
        if (max_product <= 0 || product <= max_product) return w;
    }
}

ExpInstance random_exp_instance(Rng& rng, int n, int maxdeg) {
    ExpInstance e;
    std::vector<Poly> img(n, Poly(n));
    Poly p = random_poly(rng, n, 0, 1, 0, 1, 1), q = random_poly(rng, n, 0, 1, 0, 1, 1);
    if (p.is_zero()) p = Poly::constant(n, Scalar(1));
    img[1] = p;
    img[n - 1] = q;
    e.d = TriangularDerivation(img);
    Poly k = q * Poly::var(n, 1) - p * Poly::var(n, n - 1);
    int kd = std::max<long>(k.total_degree(), 1);
    int top = std::max(1, (maxdeg - 1) / kd);
    int j = 1 + static_cast<int>(rng() % top);
    e.f = k.pow(j).scaled(random_scalar(rng, 2, 1)) + random_poly(rng, n, 0, 1, 0, 2, 1);
    e.psi1 = rng() % 2 ? random_parabolic_word(rng, n, 2, 1) : AutoWord(n);
    e.psi2 = rng() % 2 ? random_parabolic_word(rng, n, 2, 1) : AutoWord(n);
    return e;
}

}  // namespace cotame
