#include "doctest.h"
#include "oracle.hpp"

#include "cotame/engine.hpp"
#include "cotame/lnd.hpp"
#include "cotame/random.hpp"

using namespace cotame;
using oracle::E;
using oracle::eval_map;
using Point = std::vector<Scalar>;

namespace {

Endo ttd_example() { return E("(x1, x2 - 1/2 x1^2, x3 - x1 x2 + 1/3 x1^3)"); }
AutoWord one(const Endo& e) { return AutoWord(e.dim(), {GeneratorToken::triangular(e)}); }

Point random_point(Rng& rng, int n) {
    Point p;
    for (int i = 0; i < n; ++i) p.push_back(Scalar(static_cast<long>(rng() % 7) - 3));
    return p;
}

// token by token; each token is flattened on its own
Point apply_word(const AutoWord& w, Point p) {
    for (auto it = w.tokens.rbegin(); it != w.tokens.rend(); ++it) p = eval_map(flatten(*it), p);
    return p;
}
Point apply_word_inverse(const AutoWord& w, Point p) {
    for (auto& t : w.tokens) p = eval_map(flatten(invert_token(t)), p);
    return p;
}
Point eval_endo(const Endo& e, const Point& p) { return eval_map(e, p); }

const Endo& param(const ReductionStep& s, const char* k) {
    const Endo* e = s.param(k);
    REQUIRE(e != nullptr);
    return *e;
}

// what each step claims, evaluated at p from the previous word
Point expected_at(const ReductionStep& s, const AutoWord& prev, const Point& p) {
    switch (s.pattern) {
        case Pattern::ConjugateByAffine: return eval_endo(param(s, "left"), apply_word(prev, eval_endo(param(s, "right"), p)));
        case Pattern::CommutatorWithAffine:
        case Pattern::CommutatorWithTranslation:
            return eval_endo(param(s, "left"), apply_word_inverse(prev, eval_endo(param(s, "inner"), apply_word(prev, p))));
        case Pattern::TDFactorRoute: {
            const Endo& l = param(s, "lambda");
            const Endo& rho = param(s, "perm");
            Point q = eval_endo(rho, apply_word(prev, eval_endo(l, p)));
            q = eval_endo(affine_inverse(rho), eval_endo(param(s, "inner"), q));
            return eval_endo(affine_inverse(l), apply_word_inverse(prev, q));
        }
        case Pattern::LambdaConstruction: return apply_word_inverse(prev, eval_endo(param(s, "lambda"), apply_word(prev, p)));
        case Pattern::CaseSplit: return apply_word(prev, p);
    }
    return {};
}

// every step and the terminal witness checked at random points, without flattening whole words
void point_oracle(const ReductionTrace& t, int points = 3) {
    Rng rng(99);
    int n = t.input.n;
    const AutoWord* prev = &t.input;
    for (auto& s : t.steps) {
        for (int k = 0; k < points; ++k) {
            Point p = random_point(rng, n);
            CHECK_MESSAGE(apply_word(s.result, p) == expected_at(s, *prev, p), s.claim);
        }
        prev = &s.result;
    }
    const AutoWord& fin = t.final_word();
    for (int k = 0; k < points; ++k) {
        Point p = random_point(rng, n);
        if (t.terminal == TerminalKind::DerksenEquivalent)
            CHECK(apply_word(fin, p) == eval_endo(t.alpha1, eval_endo(derksen_map(n), eval_endo(t.alpha2, p))));
        else
            CHECK(is_affine(flatten(fin)));
    }
}

void check_full(const ReductionTrace& t) {
    TraceCheck c = check_trace(t);
    CHECK_MESSAGE(c.ok, c.message);
    point_oracle(t);
}

bool has_pattern(const ReductionTrace& t, Pattern p) {
    for (auto& s : t.steps)
        if (s.pattern == p) return true;
    return false;
}

AutoWord worked_3tri() {
    Endo t = E("(x1, x2 + x1^2, x3 + x2^2)");
    auto rev = GeneratorToken::permutation({2, 1, 0});
    return AutoWord(3, {GeneratorToken::triangular(t), rev, GeneratorToken::triangular(t), rev, GeneratorToken::triangular(t)});
}

}  // namespace

TEST_CASE("degree vectors") {
    CHECK(d_r_vector(Endo::identity(3), 1) == DegVector{0, 1, 0});
    CHECK(d_r_vector(ttd_example(), 0) == DegVector{1, 2, 3});
    CHECK(d_r_vector(ttd_example(), 1) == DegVector{0, 1, 1});
    CHECK(lex_less(DegVector{1, 0, 0}, DegVector{1, 0, 1}));
    CHECK_FALSE(lex_less(DegVector{1, 2, 0}, DegVector{1, 1, 5}));
    CHECK(unit_vector(3, 2) == DegVector{0, 0, 1});
}

TEST_CASE("conjugate descent step") {
    Endo tau = E("(x1, x2, x3 + x1 x2)");
    Endo th = translation(3, 0, Scalar(1));
    Endo got = conjugate_descent_step(tau, th);
    CHECK(got == E("(x1 + 1, x2, x3 - x2)"));
    CHECK(d_r_vector(tau, 0) == DegVector{1, 0, 1});
    CHECK(d_r_vector(got, 0) == DegVector{1, 0, 0});
    // τ τ̃ = θ τ as point maps
    CHECK(compose(tau, got) == compose(th, tau));

    Endo g2 = conjugate_descent_step(ttd_example(), th);
    CHECK(lex_less(d_r_vector(g2, 0), DegVector{1, 2, 3}));

    CHECK_THROWS_AS(conjugate_descent_step(tau, E("(2 x1, x2, x3)")), PreconditionError);
    CHECK_THROWS_AS(conjugate_descent_step(tau, Endo::identity(3)), PreconditionError);
    CHECK_THROWS_AS(conjugate_descent_step(Endo::identity(3), th), PreconditionError);
}

TEST_CASE("descent fails when theta also moves a coordinate between r and the first dependent tail") {
    Endo tau = E("(x1, x2, x3 + x1^2 x2)");
    Endo th = E("(x1 + 1, x2 + 1, x3)");
    Endo got = conjugate_descent_step(tau, th);
    Endo tau_inv = E("(x1, x2, x3 - x1^2 x2)");
    CHECK(got == compose_all({tau_inv, th, tau}));
    CHECK(got == E("(x1 + 1, x2 + 1, x3 - x1^2 - 2 x1 x2 - 2 x1 - x2 - 1)"));
    CHECK(d_r_vector(tau, 0) == DegVector{1, 0, 2});
    CHECK(d_r_vector(got, 0) == DegVector{1, 0, 2});
}

TEST_CASE("descent holds for single-coordinate translations") {
    Rng rng(11);
    int tested = 0;
    for (int it = 0; it < 120; ++it) {
        int n = 2 + static_cast<int>(rng() % 3);
        Endo tau = random_triangular(rng, n, 3, 3);
        int r = static_cast<int>(rng() % n);
        if (!lex_less(unit_vector(n, r), d_r_vector(tau, r))) continue;
        ++tested;
        Endo th = translation(n, r, random_scalar(rng));
        Endo got = conjugate_descent_step(tau, th);
        CHECK(compose(tau, got) == compose(th, tau));
        CHECK(lex_less(d_r_vector(got, r), d_r_vector(tau, r)));
    }
    CHECK(tested > 40);
}

TEST_CASE("triangular weights drop under conjugation by any translation") {
    CHECK(triangular_weights(E("(x1, x2 + x1^2, x3 + x2^2)")) == DegVector{1, 2, 4});
    CHECK(triangular_weights(E("(x1 + 1, 2 x2 + 3, x3 + x1)")) == DegVector{1, 1, 1});
    CHECK(weights_descend(DegVector{1, 2, 4}, DegVector{1, 1, 3}));
    CHECK_FALSE(weights_descend(DegVector{1, 2, 4}, DegVector{1, 1, 4}));
    CHECK_FALSE(weights_descend(DegVector{1, 1, 1}, DegVector{1, 1, 1}));
    CHECK_THROWS_AS(triangular_weights(E("(x2, x1, x3)")), PreconditionError);

    Rng rng(12);
    int tested = 0;
    for (int it = 0; it < 80; ++it) {
        int n = 2 + static_cast<int>(rng() % 3);
        Endo tau = random_triangular(rng, n, 3, 3);
        if (is_affine(tau)) continue;
        ++tested;
        std::vector<Scalar> c;
        for (int i = 0; i < n; ++i) c.push_back(rng() % 2 ? random_scalar(rng) : Scalar(0));
        Endo th = Endo::identity(n);
        for (int i = 0; i < n; ++i) th = compose(th, translation(n, i, c[i]));
        Endo got = conjugate_by_triangular(tau, th);
        CHECK(compose(tau, got) == compose(th, tau));
        CHECK(weights_descend(triangular_weights(tau), triangular_weights(got)));
    }
    CHECK(tested > 40);
}

TEST_CASE("terminal shape and witness") {
    TerminalShape s;
    REQUIRE(terminal_shape(E("(x1, x2, x3 + 2 x1^2 - x1 + 5)"), &s));
    CHECK(s.j == 2);
    CHECK(s.i == 0);
    CHECK(s.q2 == Scalar(2));
    CHECK(s.q1 == Scalar(-1));
    CHECK(s.q0 == Scalar(5));
    CHECK_FALSE(terminal_shape(E("(x1, x2, x3 + x1 x2)")));
    CHECK_FALSE(terminal_shape(E("(x1, x2 + x1^2, x3 + x1^2)")));
    CHECK_FALSE(terminal_shape(E("(x1, x2, x3 + x1^3)")));
    CHECK_FALSE(terminal_shape(Endo::identity(3)));

    Rng rng(3);
    for (Endo e : {E("(x1, x2, x3 + 2 x1^2 - x1 + 5)"), E("(x1 - 1/3 x3^2, x2, x3)"), E("(x1, x2 + x3^2 + x3, x3)")}) {
        auto [a1, a2] = derksen_witness(e);
        CHECK(is_affine(a1));
        CHECK(is_affine(a2));
        CHECK(compose_all({a1, derksen_map(3), a2}) == e);
        Point p = random_point(rng, 3);
        CHECK(eval_endo(a1, eval_endo(derksen_map(3), eval_endo(a2, p))) == eval_endo(e, p));
    }
}

TEST_CASE("triangular family") {
    auto t = reduce_triangular(derksen_map(3));
    CHECK(t.steps.empty());
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    t = reduce_triangular(E("(x1, x2, x3 + x1^3)"));
    CHECK(t.steps.size() == 1);
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    t = reduce_triangular(E("(x1 + 1, x2, x3)"));
    CHECK(t.terminal == TerminalKind::Affine);
    check_full(t);

    t = reduce_triangular(E("(2 x1, x2 + x1^2, x3 + x1 x2^2 + x2)"));
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);
}

TEST_CASE("parabolic family") {
    for (Endo e : {derksen_map(3), E("(x1, x2, 3 x3 + x1^3)"), E("(x2, x1 + 1, x3 + x1^2 x2)"), E("(x1, x2 + x1^2, -x3 + x2^2 + x1)")}) {
        auto t = reduce_parabolic(e);
        CHECK(t.terminal == TerminalKind::DerksenEquivalent);
        check_full(t);
    }
    CHECK(reduce_parabolic(E("(x1 + x3, x2, x3)")).terminal == TerminalKind::Affine);
    CHECK_THROWS_AS(reduce_parabolic(E("(x1 + x3^2, x2, x3)")), PreconditionError);
}

TEST_CASE("biparabolic family") {
    AutoWord sq = one(E("(x1, x2, x3 + x1^2)"));
    auto t = reduce_biparabolic(sq, swap_vars(3, 0, 2), sq);
    CHECK(has_pattern(t, Pattern::TDFactorRoute));
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    t = reduce_biparabolic(one(E("(x1, x2, x3 + x1 x2)")), swap_vars(3, 0, 2), one(E("(x1, x2 + x1^2, x3 + x2^2)")));
    REQUIRE_FALSE(t.steps.empty());
    CHECK(t.steps[0].pattern == Pattern::CommutatorWithTranslation);
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    t = reduce_biparabolic(AutoWord(3), E("(x2, x3, x1 + 1)"), one(E("(x1, x2, x3 + x1 x2^2)")));
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    t = reduce_biparabolic(one(E("(x1 + 1, x2, x3)")), swap_vars(3, 0, 1), one(E("(x1, 2 x2, x3 - 1)")));
    CHECK(t.terminal == TerminalKind::Affine);
    check_full(t);

    CHECK_THROWS_AS(reduce_biparabolic(sq, E("(x1, x2, x3 + x1^2)"), sq), PreconditionError);
}

TEST_CASE("3-triangular family") {
    auto t = reduce_3triangular(worked_3tri());
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    Endo a = E("(x1, x2 + x1^2, x3 + x1 x2)");
    auto rev = GeneratorToken::permutation({2, 1, 0});
    AutoWord mid_id(3, {GeneratorToken::triangular(a), rev, GeneratorToken::triangular(Endo::identity(3)), rev, GeneratorToken::triangular(a)});
    t = reduce_3triangular(mid_id);
    check_full(t);

    AutoWord affine_only(3, {GeneratorToken::affine(E("(x1 + x2, x2, x3 - 1)")), rev});
    t = reduce_3triangular(affine_only);
    CHECK(t.steps.empty());
    CHECK(t.terminal == TerminalKind::Affine);
    check_full(t);

    AutoWord bad(3, {GeneratorToken::exp_fd(nagata_derivation(), nagata_kernel_element())});
    CHECK_THROWS_AS(reduce_3triangular(bad), PreconditionError);
}

TEST_CASE("exp family") {
    auto t = reduce_exp(AutoWord(3), nagata_derivation(), nagata_kernel_element(), AutoWord(3));
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    check_full(t);

    t = reduce_exp(one(E("(x1, x2 + x1, x3)")), nagata_derivation(), Poly::constant(3, Scalar(2)), AutoWord(3));
    check_full(t);

    t = reduce_exp(AutoWord(3), nagata_derivation(), Poly(3), AutoWord(3));
    CHECK(t.terminal == TerminalKind::Affine);
    check_full(t);

    CHECK_THROWS_AS(reduce_exp(AutoWord(3), nagata_derivation(), oracle::P("x2"), AutoWord(3)), PreconditionError);
}

TEST_CASE("translation degenerate family") {
    auto t = reduce_td(one(ttd_example()), 0);
    CHECK(t.terminal == TerminalKind::DerksenEquivalent);
    CHECK(has_pattern(t, Pattern::LambdaConstruction));
    check_full(t);

    t = reduce_td(AutoWord(3), 0);
    CHECK(t.steps.empty());
    CHECK(t.terminal == TerminalKind::Affine);

    t = reduce_td(one(E("(x1, x2 + x1^2, x3 + x1 x2)")), 2);
    check_full(t);

    CHECK_THROWS_AS(reduce_td(inverse(one(ttd_example())), 0), NotDegenerate);
}

TEST_CASE("lambda construction") {
    TTDParams p = TTDParams::make(4);
    p.b[1] = Scalar(1);
    p.b[2] = Scalar(2);
    CHECK(w_sequence(p) == std::vector<Scalar>{Scalar(-1), Scalar(1), Scalar(1)});
    CHECK(w_sequence(TTDParams::make(4)) == std::vector<Scalar>(3, Scalar(0)));

    Rng rng(21);
    for (int it = 0; it < 12; ++it) {
        int n = 2 + static_cast<int>(rng() % 3);
        TTDParams q = random_ttd_params(rng, n);
        for (int k = 1; k < n; ++k) q.d[k] = 1;
        Scalar a = random_scalar(rng), g = random_scalar(rng);
        LambdaResult res = lambda_construct(q, a, g);
        CHECK(res.w.size() == static_cast<size_t>(n - 1));
        CHECK(res.lambda_tilde == lambda_tilde_formula(q, a, g));
        Endo tau = ttd_build(q);
        Point x = random_point(rng, n);
        // τ λ τ⁻¹ evaluated as τ(λ(τ⁻¹(x)))
        Point y = eval_endo(flatten(GeneratorToken::triangular(tau).inverted()), x);
        CHECK(eval_endo(tau, eval_endo(res.lambda, y)) == eval_endo(res.lambda_tilde, x));
    }
    TTDParams bad = TTDParams::make(3);
    CHECK_THROWS_AS(lambda_construct(bad, Scalar(2), Scalar(1)), PreconditionError);
}

TEST_CASE("tampered traces are rejected") {
    auto base = reduce_biparabolic(one(E("(x1, x2, x3 + x1 x2)")), swap_vars(3, 0, 2), one(E("(x1, x2 + x1^2, x3 + x2^2)")));
    REQUIRE(verify_trace(base));
    REQUIRE(base.steps.size() >= 2);

    auto t = base;
    for (auto& [k, e] : t.steps[0].params)
        if (k == "inner") e = translation(3, 2, Scalar(7));
    CHECK_FALSE(verify_trace(t));

    t = base;
    t.steps[1].digest[0] = t.steps[1].digest[0] == '0' ? '1' : '0';
    CHECK_FALSE(verify_trace(t));

    t = base;
    REQUIRE_FALSE(t.steps[0].scalars.empty());
    t.steps[0].scalars[0].second += Scalar(1);
    CHECK_FALSE(verify_trace(t));

    t = base;
    t.steps[0].claim += " ";
    CHECK_FALSE(verify_trace(t));

    t = base;
    t.alpha1 = compose(t.alpha1, translation(3, 0, Scalar(1)));
    CHECK_FALSE(verify_trace(t));

    t = base;
    t.steps.back().result.tokens.back() = GeneratorToken::affine(translation(3, 1, Scalar(1)));
    CHECK_FALSE(verify_trace(t));

    t = base;
    t.steps.pop_back();
    CHECK_FALSE(verify_trace(t));

    // removing a step that only re-represents the map still breaks the digest chain
    auto tri = reduce_3triangular(worked_3tri());
    for (size_t k = 0; k < tri.steps.size(); ++k) {
        auto d = tri;
        d.steps.erase(d.steps.begin() + static_cast<long>(k));
        CHECK_FALSE(verify_trace(d));
    }
}

TEST_CASE("trace json round trip") {
    for (auto t : {reduce_3triangular(worked_3tri()), reduce_td(one(ttd_example()), 0),
                   reduce_exp(AutoWord(3), nagata_derivation(), nagata_kernel_element(), AutoWord(3))}) {
        std::string text = trace_to_json(t);
        ReductionTrace back = trace_from_json(text);
        CHECK(verify_trace(back));
        CHECK(trace_to_json(back) == text);
    }
    CHECK_THROWS_AS(trace_from_json("{"), ParseError);
    CHECK_THROWS_AS(trace_from_json("{\"n\": 3}"), ParseError);
}

TEST_CASE("small random corpus") {
    Rng rng(5);
    for (int it = 0; it < 4; ++it) {
        check_full(reduce_triangular(random_triangular(rng, 3, 3, 2)));
        check_full(reduce_parabolic(random_parabolic_word(rng, 3, 3, 2)));
        AutoWord p1 = random_parabolic_word(rng, 3, 2, 2), p2 = random_parabolic_word(rng, 3, 2, 2);
        check_full(reduce_biparabolic(p1, random_affine(rng, 3), p2));
        check_full(reduce_3triangular(random_3triangular_word(rng, 3, 3, 2, 16)));
        ExpInstance ex = random_exp_instance(rng, 3, 2);
        check_full(reduce_exp(ex.psi1, ex.d, ex.f, ex.psi2));
        TDInstance td = random_td_instance(rng, 3, 2);
        check_full(reduce_td(td.phi, td.r));
    }
}
