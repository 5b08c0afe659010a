#include "doctest.h"
#include "oracle.hpp"

#include "cotame/random.hpp"

using namespace cotame;
using oracle::E;
using oracle::P;

namespace {

Endo ttd_example() { return E("(x1, x2 - 1/2 x1^2, x3 - x1 x2 + 1/3 x1^3)"); }
AutoWord word_of(const Endo& e) { return AutoWord(e.dim(), {GeneratorToken::triangular(e)}); }

// ∂^k H_i/∂x1^k by repeated differentiation, compared with Σ (A^k)_ij H_j + (A^{k-1} B)_i
bool nilpotent_law_holds(const Endo& h, const LinearSystemData& s, int k) {
    int n = h.dim();
    Matrix ak = s.A.pow(k);
    std::vector<Scalar> bk = s.A.pow(k - 1) * s.B;
    for (int i = 0; i < n; ++i) {
        Poly d = h[i];
        for (int j = 0; j < k; ++j) d = partial_derivative(d, 0);
        Poly rhs = Poly::constant(h.nvars(), bk[i]);
        for (int j = 0; j < n; ++j) rhs += h[j].scaled(ak(i, j));
        if (d != rhs) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("translation degeneracy test") {
    CHECK(td_test(word_of(ttd_example()), 0));
    AutoWord inv = inverse(word_of(ttd_example()));
    CHECK_FALSE(td_test(inv, 0));
    // t-parametrized conjugate of the worked example
    Endo conj = td_test_detail(word_of(ttd_example()), 0).conjugate;
    VarContext ctx{3};
    ctx.with_t = true;
    CHECK(conj == parse_endo("(x1 + t, x2 + t x1 + 1/2 t^2, x3 + t x2 + 1/2 t^2 x1 + 1/6 t^3)", ctx));

    Rng rng(1);
    for (int it = 0; it < 10; ++it) {
        int n = 3;
        std::vector<Poly> c;
        for (int i = 0; i < n - 1; ++i) c.push_back(Poly::var(n, i) + random_poly(rng, n, 0, i, 0, 3, 2));
        c.push_back(Poly::var(n, n - 1).scaled(random_scalar(rng)) + random_poly(rng, n, 0, n - 1, 0, 3, 3));
        AutoWord w(n, {GeneratorToken::affine(E("(x1 + 2 x2, x2 - x1, 3 x3 + x1 - 1)")), GeneratorToken::triangular(Endo(c))});
        CHECK(td_test(w, n - 1));
    }
}

TEST_CASE("non-degenerate maps have non-affine conjugates at small constants") {
    Rng rng(6);
    int found = 0;
    for (int it = 0; it < 30; ++it) {
        AutoWord w(3);
        w.push(GeneratorToken::triangular(random_triangular(rng, 3, 3, 2)));
        w.push(GeneratorToken::permutation({2, 0, 1}));
        w.push(GeneratorToken::triangular(random_triangular(rng, 3, 2, 2)));
        int r = static_cast<int>(rng() % 3);
        TDTest t = td_test_detail(w, r);
        if (t.degenerate) continue;
        ++found;
        Scalar c = nonaffine_constant(t);
        CHECK(c.rational() >= 1);
        CHECK(c.rational() <= t.t_bound + 1);
        // independent check: conjugate the concrete translation through the flattened map
        AutoWord conj = inverse(w);
        conj.push(GeneratorToken::affine(translation(3, r, c)));
        conj.append(w);
        CHECK_FALSE(is_affine(flatten(conj)));
    }
    CHECK(found > 10);
    CHECK_THROWS_AS(nonaffine_constant(td_test_detail(word_of(ttd_example()), 0)), PreconditionError);
}

TEST_CASE("linear system extraction") {
    LinearSystemData s = extract_linear_system(word_of(ttd_example()));
    Matrix a(3, 3);
    a(1, 0) = Scalar(1);
    a(2, 1) = Scalar(1);
    CHECK(s.A == a);
    CHECK(s.B == std::vector<Scalar>{Scalar(1), Scalar(0), Scalar(0)});

    LinearSystemData id = extract_linear_system(AutoWord(4));
    CHECK(id.A.is_zero());
    CHECK(id.B == std::vector<Scalar>{Scalar(1), Scalar(0), Scalar(0), Scalar(0)});

    CHECK_THROWS_AS(extract_linear_system(inverse(word_of(ttd_example()))), NotDegenerate);
}

TEST_CASE("nilpotent laws for higher derivatives") {
    Rng rng(31);
    for (int it = 0; it < 15; ++it) {
        int n = 3 + static_cast<int>(rng() % 2);
        TDInstance inst = random_td_instance(rng, n, 3);
        AutoWord w = inst.phi;
        std::vector<int> rho(n);
        for (int i = 0; i < n; ++i) rho[i] = i;
        std::swap(rho[0], rho[inst.r]);
        AutoWord shifted(n, {GeneratorToken::permutation(rho)});
        shifted.append(w);
        REQUIRE(td_test(shifted, 0));
        Endo h = flatten(inverse(shifted));
        LinearSystemData s = extract_linear_system_from(h);
        CHECK(s.A.pow(n).is_zero());
        CHECK(nilpotent_law_holds(h, s, 1));
        CHECK(nilpotent_law_holds(h, s, 2));
        CHECK(nilpotent_law_holds(h, s, 3));
    }
}

TEST_CASE("Jordan normalization") {
    auto j = jordan_normalize(word_of(ttd_example()));
    CHECK(j.lambda.is_identity());

    auto ji = jordan_normalize(AutoWord(3));
    CHECK(ji.lambda.is_identity());
    CHECK(ji.data.A.is_zero());

    Rng rng(12);
    for (int it = 0; it < 20; ++it) {
        int n = 3 + static_cast<int>(rng() % 3);
        AutoWord w(n, {GeneratorToken::triangular(ttd_build(random_ttd_params(rng, n))),
                       GeneratorToken::affine(random_invertible(rng, n), std::vector<Scalar>(n, Scalar(0)))});
        auto r = jordan_normalize(w);
        AutoWord wl = w;
        wl.push(GeneratorToken::affine(r.lambda));
        LinearSystemData re = extract_linear_system(wl);
        CHECK(is_jordan_form(re));
        CHECK(re.B[0] == Scalar(1));
        CHECK(re.A == r.data.A);
        CHECK(re.B == r.data.B);
    }
}

TEST_CASE("TTD construction") {
    for (int n = 3; n <= 5; ++n) {
        TTDParams p = TTDParams::make(n);
        p.d[1] = 1;
        std::vector<Poly> c;
        for (int i = 0; i < n; ++i) c.push_back(Poly::var(n, i));
        c[1] -= Poly::var(n, 0).pow(2).scaled(Scalar(1, 2));
        CHECK(ttd_build(p) == Endo(c));
    }
    TTDParams p = TTDParams::make(3);
    p.d[1] = p.d[2] = 1;
    CHECK(ttd_build(p) == ttd_example());

    TTDParams q = TTDParams::make(4);
    q.b[1] = Scalar(2);
    q.b[2] = Scalar(-1, 3);
    q.b[3] = Scalar(5);
    CHECK(ttd_build(q) == E("(x1, x2 - 2 x1, x3 + 1/3 x1, x4 - 5 x1)", 4));
    CHECK(is_affine(ttd_build(q)));

    Rng rng(40);
    for (int it = 0; it < 40; ++it) {
        int n = 2 + static_cast<int>(rng() % 4);
        TTDParams r = random_ttd_params(rng, n);
        Endo t = ttd_build(r);
        CHECK(t == ttd_build_via_exp(r));
        CHECK(td_test(word_of(t), 0));
        for (int k = 1; k < n; ++k) CHECK((t[k].total_degree() <= 1) == (r.d[k] == 0));
    }
}

TEST_CASE("x1 elimination") {
    Elimination e = eliminate_x1(word_of(ttd_example()));
    CHECK(e.tau == ttd_example());
    CHECK(e.G[1] == P("x2"));
    CHECK(e.G[2] == P("x3"));

    Elimination id = eliminate_x1(AutoWord(3));
    CHECK(id.tau.is_identity());
    CHECK(id.G[1] == P("x2"));

    AutoWord derksen(3, {GeneratorToken::triangular(E("(x1, x2 - 1/2 x1^2, x3)"))});
    Elimination d = eliminate_x1(derksen);
    CHECK(d.tau == E("(x1, x2 - 1/2 x1^2, x3)"));
    CHECK(d.G[1] == P("x2"));
    CHECK(d.G[2] == P("x3"));

    CHECK_THROWS_AS(eliminate_x1(AutoWord(3, {GeneratorToken::permutation({1, 0, 2})})), PreconditionError);
}

TEST_CASE("factorization round trip") {
    TDFactorization idf = factorize_td(AutoWord(3), 0);
    CHECK(idf.lambda.is_identity());
    CHECK(idf.tau.is_identity());
    CHECK(idf.gamma.is_identity());
    CHECK(idf.mu.is_identity());

    TDFactorization ex = factorize_td(word_of(ttd_example()), 0);
    CHECK(ex.lambda.is_identity());
    CHECK(recompose(ex) == flatten(inverse(word_of(ttd_example()))));

    Rng rng(77);
    for (int it = 0; it < 20; ++it) {
        int n = 3 + static_cast<int>(rng() % 2);
        TDInstance inst = random_td_instance(rng, n, 3);
        TDFactorization f = factorize_td(inst.phi, inst.r);
        CHECK(recompose(f) == flatten(inst.v));
        for (int k = 1; k < n; ++k) CHECK_FALSE(f.G[k].depends_on(0));
        CHECK_FALSE((f.mu[0] - Poly::var(n, 0)).depends_on(0));
    }
    CHECK_THROWS_AS(factorize_td(inverse(word_of(ttd_example())), 0), NotDegenerate);
}
