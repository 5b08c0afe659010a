#include "cotame/engine.hpp"

#include <climits>
#include <cstdio>

namespace cotame {

namespace {

Endo id_map(int n) { return Endo::identity(n); }

Endo with_component(const Endo& e, int i, const Poly& p) {
    std::vector<Poly> c = e.components();
    c[i] = p;
    return Endo(std::move(c));
}

// (x_1, …, x_{n-1}, x_n + p)
Endo last_shear(int n, const Poly& p) { return with_component(id_map(n), n - 1, Poly::var(n, n - 1) + p); }

Poly nonlinear_part(const Poly& p) { return p.degree_part(2, LONG_MAX); }

GeneratorToken aff(const Endo& e) { return GeneratorToken::affine(e); }
GeneratorToken tri(const Endo& e) { return GeneratorToken::triangular(e); }

AutoWord word_of(int n, std::vector<GeneratorToken> t) { return AutoWord(n, std::move(t)); }

AutoWord cat(std::initializer_list<AutoWord> parts) {
    AutoWord out(parts.begin()->n);
    for (auto& p : parts) out.append(p);
    return out;
}

std::vector<int> swap_sigma(int n, int i, int j) {
    std::vector<int> s(n);
    for (int k = 0; k < n; ++k) s[k] = k;
    std::swap(s[i], s[j]);
    return s;
}

std::vector<int> reversal_sigma(int n) {
    std::vector<int> s(n);
    for (int k = 0; k < n; ++k) s[k] = n - 1 - k;
    return s;
}

// word for (x_1 + G, x_2, …, x_{n-1}, x_n + a) with G free of x_1
AutoWord x1_shear_word(const Poly& g, const Scalar& a) {
    int n = g.nvars();
    if (g.depends_on(0)) throw InternalError("shear function depends on x1");
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(Poly::var(n, i));
    c[0] += g;
    c[n - 1] += Poly::constant(n, a);
    Endo mu(std::move(c));
    Endo pi = swap_vars(n, 0, n - 1);
    Endo core = compose_all({pi, mu, pi});
    auto s = swap_sigma(n, 0, n - 1);
    return word_of(n, {GeneratorToken::permutation(s), tri(core), GeneratorToken::permutation(s)});
}

void require_nonaffine(const Endo& e, const char* where) {
    if (is_affine(e)) throw InternalError(std::string("expected a non-affine map after ") + where);
}

Scalar translation_amount(const Endo& theta, int i) { return (theta[i] - Poly::var(theta.nvars(), i)).constant_term(); }

class Builder {
   public:
    Builder(std::string family, const AutoWord& input, const EngineOptions& o) : opts_(o) {
        t_.family = std::move(family);
        t_.input = input;
        map_ = flatten(input);
        input_map_ = map_;
        t_.field = map_.field();
    }

    int n() const { return t_.input.n; }
    const AutoWord& word() const { return t_.final_word(); }
    const Endo& map() const { return map_; }

    void step(Pattern p, std::vector<std::pair<std::string, Endo>> params, std::string claim, AutoWord result,
              std::vector<std::pair<std::string, Scalar>> scalars = {}) {
        if (static_cast<long>(t_.steps.size()) >= opts_.max_steps)
            throw InternalError("safety cap on reduction steps exceeded");
        ReductionStep s;
        s.pattern = p;
        s.params = std::move(params);
        s.scalars = std::move(scalars);
        s.claim = std::move(claim);
        s.result = std::move(result);
        Endo now = flatten(s.result);
        if (opts_.self_check && replay_step(s, word(), map_) != now)
            throw InternalError("representative word disagrees with replay at: " + s.claim);
        s.digest = step_digest(s, now, t_.steps.empty() ? endo_digest(input_map_) : t_.steps.back().digest);
        t_.steps.push_back(std::move(s));
        map_ = std::move(now);
    }

    ReductionTrace finish() {
        if (is_affine(map_)) {
            if (!is_affine(input_map_)) throw InternalError("reduction of a non-affine map ended on an affine map");
            t_.terminal = TerminalKind::Affine;
            t_.alpha1 = t_.alpha2 = Endo();
        } else {
            if (!terminal_shape(map_)) throw InternalError("reduction ended away from the Derksen shape");
            t_.terminal = TerminalKind::DerksenEquivalent;
            auto [a1, a2] = derksen_witness(map_);
            t_.alpha1 = a1;
            t_.alpha2 = a2;
        }
        return t_;
    }

   private:
    EngineOptions opts_;
    ReductionTrace t_;
    Endo map_, input_map_;
};

void run_triangular(Builder& b);
void run_parabolic(Builder& b);
void run_td(Builder& b, int r);

void run_triangular(Builder& b) {
    int n = b.n();
    Endo m = b.map();
    if (is_affine(m) || terminal_shape(m)) return;
    if (!is_triangular(m)) {
        Endo rev = permutation_endo(reversal_sigma(n));
        Endo flipped = compose_all({rev, m, rev});
        if (!is_triangular(flipped)) throw PreconditionError("map is not triangular");
        b.step(Pattern::ConjugateByAffine, {{"left", rev}, {"right", rev}}, "upper triangular map: reverse the variables",
               word_of(n, {tri(flipped)}));
        m = b.map();
        if (terminal_shape(m)) return;
    }
    TriangularData td = triangular_data(m);

    // phase 1: move one nonlinear component into the last slot
    int r = -1;
    for (int i = 0; i + 1 < n && r < 0; ++i)
        if (!nonlinear_part(td.tails[i]).is_zero()) r = i;
    if (r >= 0) {
        Endo alpha = last_shear(n, Poly::var(n, r));
        Endo res = last_shear(n, m[r].scaled(td.units[n - 1].inverse()));
        b.step(Pattern::CommutatorWithAffine, {{"left", id_map(n)}, {"inner", alpha}},
               "triangular phase 1: conjugate (x_n + x_" + std::to_string(r + 1) + ") to isolate a component of degree >= 2",
               word_of(n, {tri(res)}));
        m = b.map();
        if (terminal_shape(m)) return;
    }

    // strip the affine part: (x', u x_n + P) ~ (x', x_n + P_nl / u)
    {
        Endo ell = m.affine_part();
        if (!ell.is_identity()) {
            Scalar u = triangular_data(m).units[n - 1];
            Endo res = last_shear(n, nonlinear_part(m[n - 1]).scaled(u.inverse()));
            b.step(Pattern::ConjugateByAffine, {{"left", affine_inverse(ell)}, {"right", id_map(n)}},
                   "triangular: remove the affine part", word_of(n, {tri(res)}));
            m = b.map();
            if (terminal_shape(m)) return;
        }
    }

    // phase 2: shrink the variable support with δ = (…, x_s + x_1, …)
    for (;;) {
        Poly p = m[n - 1] - Poly::var(n, n - 1);
        int s = p.max_var();
        if (s <= 0) break;
        std::vector<Poly> img;
        for (int i = 0; i < n; ++i) img.push_back(Poly::var(n, i));
        img[s] += Poly::var(n, 0);
        Poly p0 = p - substitute(p, img);
        if (p0.degree_in(s) >= p.degree_in(s) || p0.total_degree() < 2)
            throw InternalError("phase 2 commutator failed to lower the degree");
        Endo delta = with_component(id_map(n), s, img[s]);
        Endo delta_inv = with_component(id_map(n), s, Poly::var(n, s) - Poly::var(n, 0));
        b.step(Pattern::CommutatorWithAffine, {{"left", delta_inv}, {"inner", delta}},
               "triangular phase 2: lower the degree in x_" + std::to_string(s + 1), word_of(n, {tri(last_shear(n, p0))}));
        m = b.map();
        if (terminal_shape(m)) return;
    }

    // phase 3: univariate degree descent with θ_{1,1}
    while (!terminal_shape(m)) {
        Poly p = m[n - 1] - Poly::var(n, n - 1);
        if (p.total_degree() < 2) throw InternalError("phase 3 reached a map of degree below 2");
        Poly p0 = p - shift_var(p, 0, Scalar(1));
        Endo theta = translation(n, 0, Scalar(1));
        b.step(Pattern::CommutatorWithTranslation, {{"left", translation(n, 0, Scalar(-1))}, {"inner", theta}},
               "triangular phase 3: lower the degree in x_1 to " + std::to_string(p0.total_degree()),
               word_of(n, {tri(last_shear(n, p0))}));
        m = b.map();
    }
}

void run_parabolic(Builder& b) {
    int n = b.n();
    Endo m = b.map();
    if (is_affine(m)) return;
    if (!is_parabolic(m)) throw PreconditionError("map is not parabolic");
    Monomial xn;
    xn.e[n - 1] = 1;
    Scalar a = m[n - 1].coeff(xn);
    int r = -1;
    for (int i = 0; i + 1 < n && r < 0; ++i)
        if (m[i].total_degree() >= 2) r = i;
    if (r < 0) {
        Endo beta = with_component(m, n - 1, Poly::var(n, n - 1));
        if (!beta.is_identity()) {
            Endo res = with_component(id_map(n), n - 1, m[n - 1]);
            b.step(Pattern::ConjugateByAffine, {{"left", affine_inverse(beta)}, {"right", id_map(n)}},
                   "parabolic with affine base: reduce to a triangular map", word_of(n, {tri(res)}));
        }
    } else {
        Endo alpha = last_shear(n, Poly::var(n, r).scaled(a));
        Endo res = last_shear(n, m[r]);
        b.step(Pattern::CommutatorWithAffine, {{"left", id_map(n)}, {"inner", alpha}},
               "parabolic: conjugate (x_n + a x_" + std::to_string(r + 1) + ") to get a triangular map",
               word_of(n, {tri(res)}));
    }
    require_nonaffine(b.map(), "the parabolic step");
    run_triangular(b);
}

void run_biparabolic(Builder& b, const AutoWord& psi1, const Endo& alpha, const AutoWord& psi2) {
    int n = b.n();
    if (is_affine(b.map())) return;
    std::optional<Scalar> pick = choose_translation_constant(b.word(), n - 1);
    if (!pick) {
        run_td(b, n - 1);
        return;
    }
    Scalar c = *pick;
    Endo theta = translation(n, n - 1, c);
    AutoWord head = psi1;
    head.push(aff(alpha));
    Endo inner = conjugate_by_word(theta, head);
    if (!is_translation(inner)) throw InternalError("biparabolic: inner conjugate is not a translation");
    AutoWord res = cat({inverse(psi2), word_of(n, {aff(inner)}), psi2});
    b.step(Pattern::CommutatorWithTranslation, {{"left", id_map(n)}, {"inner", theta}},
           "biparabolic: conjugate theta_{n,c} to a non-affine parabolic map", res, {{"c", c}});
    require_nonaffine(b.map(), "the biparabolic step");
    run_parabolic(b);
}

void run_3trispecial(Builder& b, const Endo& tau, const TTDParams& params, Poly g, Scalar a) {
    int n = b.n();
    AutoWord tw = word_of(n, {tri(tau)});
    AutoWord tinv = inverse(tw);
    for (;;) {
        if (!g.depends_on(n - 1)) {
            if (!is_parabolic(b.map())) throw InternalError("tau^-1 mu tau with G free of x_n is not parabolic");
            require_nonaffine(b.map(), "the non-affine check for tau^-1 mu tau");
            run_parabolic(b);
            return;
        }
        long dn = g.degree_in(n - 1);
        Poly lead = g.coeff_in(n - 1, 1);
        if (dn >= 2 || !lead.is_constant()) {
            Poly g1 = g - shift_var(g, n - 1, Scalar(1));
            std::string claim = dn >= 2 ? "TD route: lower deg_{x_n} G with theta_{n,1}"
                                        : "TD route case 1: G linear in x_n with non-constant coefficient";
            b.step(Pattern::CommutatorWithTranslation,
                   {{"left", id_map(n)}, {"inner", translation(n, n - 1, Scalar(1))}}, claim,
                   cat({tinv, x1_shear_word(g1, Scalar(1)), tw}));
            require_nonaffine(b.map(), "theta_{n,1} conjugation");
            g = g1;
            a = Scalar(1);
            continue;
        }
        // case 2: G = c x_n + Q
        Scalar c = lead.constant_term();
        if (!a.is_zero()) {
            b.step(Pattern::ConjugateByAffine, {{"left", translation(n, n - 1, -a)}, {"right", id_map(n)}},
                   "TD route: drop the translation part of mu", cat({tinv, x1_shear_word(g, Scalar(0)), tw}));
            a = Scalar(0);
        }
        Endo lambda;
        std::string claim;
        Pattern pat = Pattern::CommutatorWithAffine;
        std::vector<std::pair<std::string, Scalar>> scal{{"c", c}};
        int i21 = -1;
        for (int i = 1; i + 1 < n && i21 < 0; ++i)
            if (params.d[i] == 0) i21 = i;
        if (i21 >= 0) {
            lambda = last_shear(n, Poly::var(n, i21) - Poly::var(n, 0).scaled(params.b[i21]));
            claim = "TD route case 2.1: d_" + std::to_string(i21 + 1) + " = 0";
        } else if (params.d[n - 1] == 0) {
            std::vector<Poly> comps = id_map(n).components();
            comps[n - 1] = Poly::var(n, n - 1).scaled(Scalar(2)) - Poly::var(n, 0).scaled(c.inverse() + params.b[n - 1]);
            lambda = Endo(std::move(comps));
            claim = "TD route case 2.2: d_2..d_{n-1} = 1, d_n = 0";
        } else {
            Scalar two(2);
            Scalar gg = (two - two.pow(n)) / c;
            lambda = lambda_construct(params, two, gg).lambda;
            claim = "TD route case 2.3: all d = 1, lambda from the closed form with a = 2";
            pat = Pattern::LambdaConstruction;
            scal.push_back({"a", two});
            scal.push_back({"g", gg});
        }
        Endo lt = compose_all({tau, lambda, flatten(tinv)});
        if (!is_affine(lt)) throw InternalError("tau lambda tau^-1 is not affine");
        AutoWord mw = x1_shear_word(g, Scalar(0));
        AutoWord res = cat({tinv, inverse(mw), word_of(n, {aff(lt)}), mw, tw});
        if (pat == Pattern::LambdaConstruction)
            b.step(pat, {{"lambda", lambda}}, claim, res, scal);
        else
            b.step(pat, {{"left", id_map(n)}, {"inner", lambda}}, claim, res, scal);
        if (!is_parabolic(b.map())) throw InternalError("case 2 conjugate is not parabolic");
        require_nonaffine(b.map(), claim.c_str());
        run_parabolic(b);
        return;
    }
}

void run_td(Builder& b, int r) {
    int n = b.n();
    AutoWord w = b.word();
    TDFactorization f = factorize_td(w, r);
    Endo pi = swap_vars(n, 0, n - 1);
    Endo rho = permutation_endo(f.rho);
    Endo tau_inv = flatten(inverse(word_of(n, {tri(f.tau)})));
    if (is_affine(f.tau)) {
        Endo left = compose(pi, rho);
        Endo right = compose_all({f.lambda, tau_inv, pi});
        AutoWord res = cat({word_of(n, {aff(left)}), w, word_of(n, {aff(right)})});
        b.step(Pattern::ConjugateByAffine, {{"left", left}, {"right", right}},
               "TD route: affine TTD factor, the map is affinely parabolic", res);
        if (!is_parabolic(b.map())) throw InternalError("TD route with affine TTD factor did not give a parabolic map");
        run_parabolic(b);
        return;
    }
    Endo alpha = with_component(id_map(n), 0, Poly::var(n, 0) + Poly::var(n, n - 1));
    AutoWord psi_inv = cat({word_of(n, {GeneratorToken::permutation(f.rho)}), w,
                            word_of(n, {aff(f.lambda), tri(f.tau).inverted()})});
    Poly g = flatten(psi_inv)[n - 1];
    AutoWord tw = word_of(n, {tri(f.tau)});
    AutoWord res = cat({inverse(tw), x1_shear_word(g, Scalar(0)), tw});
    b.step(Pattern::TDFactorRoute, {{"lambda", f.lambda}, {"perm", rho}, {"inner", alpha}},
           "TD route: factor and conjugate (x_1 + x_n) to tau^-1 mu tau", res);
    require_nonaffine(b.map(), "the TD factor route");
    run_3trispecial(b, f.tau, f.params, g, Scalar(0));
}

std::string weights_text(const DegVector& w) {
    std::string s = "(";
    for (size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + std::to_string(w[i]);
    return s + ")";
}

long triangular_degree_sum(const std::vector<Endo>& ts) {
    long s = 0;
    for (auto& t : ts) s += std::max<long>(t.degree(), 0);
    return s;
}

void run_3tri_loop(Builder& b, const Endo& psi, const Endo& lin, Endo tau, long cap) {
    int n = b.n();
    AutoWord pw = word_of(n, {tri(psi)});
    AutoWord lw = word_of(n, {aff(lin)});
    AutoWord head = cat({inverse(pw), inverse(lw)});
    for (long round = 0;; ++round) {
        if (round > cap) throw InternalError("3-triangular loop exceeded its round cap");
        if (is_affine(tau)) {
            Endo mid = compose_all({affine_inverse(lin), tau, lin});
            AutoWord res = cat({inverse(pw), word_of(n, {aff(mid)}), pw});
            b.step(Pattern::CaseSplit, {}, "3-triangular: translation conjugate is affine, biparabolic route", res);
            run_biparabolic(b, inverse(pw), mid, pw);
            return;
        }
        std::optional<Scalar> pick = choose_translation_constant(b.word(), n - 1);
        if (!pick) {
            run_td(b, n - 1);
            return;
        }
        Scalar c = *pick;
        Endo theta = translation(n, n - 1, c);
        Endo inner = conjugate_by_word(theta, head);
        if (!is_translation(inner)) throw InternalError("3-triangular: inner conjugate is not a translation");
        DegVector before = triangular_weights(tau);
        Endo next = conjugate_by_triangular(tau, inner);
        if (!is_triangular(next)) throw InternalError("3-triangular: conjugate is not triangular");
        DegVector after = triangular_weights(next);
        if (!weights_descend(before, after)) throw InternalError("3-triangular: the weight measure did not decrease");
        std::string claim = "3-triangular descent, weights " + weights_text(before) + " -> " + weights_text(after);
        b.step(Pattern::CommutatorWithTranslation, {{"left", id_map(n)}, {"inner", theta}}, claim,
               cat({inverse(pw), inverse(lw), word_of(n, {tri(next)}), lw, pw}), {{"c", c}});
        require_nonaffine(b.map(), "the 3-triangular step");
        tau = next;
    }
}

void run_exp(Builder& b, AutoWord psi1, const TriangularDerivation& d, Poly f, const AutoWord& psi2) {
    int n = b.n();
    if (is_affine(b.map())) return;
    for (;;) {
        if (!f.depends_on(n - 1)) {
            if (!is_parabolic(b.map())) throw InternalError("exp route: base case is not parabolic");
            run_parabolic(b);
            return;
        }
        std::optional<Scalar> pick = choose_translation_constant(b.word(), n - 1);
        if (!pick) {
            run_td(b, n - 1);
            return;
        }
        Scalar c = *pick;
        Endo theta = translation(n, n - 1, c);
        Endo th1 = conjugate_by_word(theta, psi1);
        if (!is_translation(th1)) throw InternalError("exp route: psi1-conjugate of theta is not a translation");
        Poly f1 = f - substitute(f, th1.components());
        Endo th2 = conjugate_by_word(th1, psi2);
        if (!is_translation(th2)) throw InternalError("exp route: psi2-conjugate of theta is not a translation");
        if (f1.degree_in(n - 1) >= f.degree_in(n - 1)) throw InternalError("exp route: deg_{x_n} F did not drop");
        AutoWord res = cat({inverse(psi2), word_of(n, {GeneratorToken::exp_fd(d, f1)}), psi2});
        b.step(Pattern::CommutatorWithTranslation, {{"left", affine_inverse(th2)}, {"inner", theta}},
               "exp route: F -> F - (F)theta lowers deg_{x_n} F to " + std::to_string(std::max<long>(f1.degree_in(n - 1), 0)),
               res, {{"c", c}});
        require_nonaffine(b.map(), "the exp step");
        psi1 = inverse(psi2);
        f = f1;
    }
}

struct ThreeTriShape {
    Endo a0, t1, a1, t2, a2, t3, a3;
};

bool is_affine_token(const GeneratorToken& t) {
    return t.kind() == GeneratorToken::Kind::Affine || t.kind() == GeneratorToken::Kind::Permutation;
}

ThreeTriShape parse_3tri(const AutoWord& w) {
    int n = w.n;
    std::vector<Endo> groups;  // alternating affine, triangular, affine, …
    std::vector<bool> kinds;   // true = triangular
    for (auto& t : w.tokens) {
        bool is_tri;
        if (is_affine_token(t))
            is_tri = false;
        else if (t.kind() == GeneratorToken::Kind::Triangular)
            is_tri = true;
        else
            throw PreconditionError("3-triangular word may contain only affine, permutation and triangular tokens");
        Endo e = flatten(t);
        if (!kinds.empty() && kinds.back() == is_tri)
            groups.back() = compose(groups.back(), e);
        else {
            groups.push_back(e);
            kinds.push_back(is_tri);
        }
    }
    std::vector<Endo> aff_g, tri_g;
    size_t k = 0;
    Endo idn = id_map(n);
    auto take_aff = [&] {
        if (k < groups.size() && !kinds[k]) return groups[k++];
        return idn;
    };
    auto take_tri = [&] {
        if (k < groups.size() && kinds[k]) return groups[k++];
        return idn;
    };
    ThreeTriShape s;
    s.a0 = take_aff();
    s.t1 = take_tri();
    s.a1 = take_aff();
    s.t2 = take_tri();
    s.a2 = take_aff();
    s.t3 = take_tri();
    s.a3 = take_aff();
    if (k != groups.size()) throw PreconditionError("word has more than three triangular factors");
    return s;
}

// A = L · Tr with L linear and Tr a translation
std::pair<Endo, Endo> split_affine(const Endo& a) {
    Matrix m = linear_part(a);
    std::vector<Scalar> v = constant_part(a);
    std::vector<Scalar> t = m.inverse() * v;
    int n = a.dim();
    Endo tr = id_map(n);
    for (int i = 0; i < n; ++i) tr = with_component(tr, i, tr[i] + Poly::constant(n, t[i]));
    return {affine_endo(m, std::vector<Scalar>(n, Scalar(0))), tr};
}

}  // namespace

DegVector d_r_vector(const Endo& tau, int r) {
    if (!is_triangular(tau)) throw PreconditionError("d_r is defined for triangular maps");
    if (r < 0 || r >= tau.dim()) throw DimensionMismatch("index out of range");
    DegVector d;
    for (int i = 0; i < tau.dim(); ++i) d.push_back(std::max<long>(tau[i].degree_in(r), 0));
    return d;
}

bool lex_less(const DegVector& a, const DegVector& b) { return a < b; }

DegVector unit_vector(int n, int r) {
    DegVector d(n, 0);
    d[r] = 1;
    return d;
}

DegVector triangular_weights(const Endo& tau) {
    if (!is_triangular(tau)) throw PreconditionError("weights are defined for triangular maps");
    int n = tau.dim();
    DegVector w(n, 1);
    for (int i = 1; i < n; ++i) {
        Monomial m;
        m.e[i] = 1;
        Poly tail = tau[i] - Poly::var(tau.nvars(), i).scaled(tau[i].coeff(m));
        WeightVector wv(w.begin(), w.begin() + i);
        w[i] = std::max(1L, weighted_degree(tail, wv));
    }
    return w;
}

bool weights_descend(const DegVector& before, const DegVector& after) {
    if (before.size() != after.size()) return false;
    bool strict = false;
    for (size_t i = 0; i < before.size(); ++i) {
        if (after[i] > std::max(1L, before[i] - 1)) return false;
        if (after[i] < before[i]) strict = true;
    }
    return strict;
}

Endo conjugate_descent_step(const Endo& tau, const Endo& theta) {
    int n = tau.dim();
    if (!is_translation(theta)) throw PreconditionError("theta must be a translation");
    int r = -1;
    for (int i = 0; i < n && r < 0; ++i)
        if (!translation_amount(theta, i).is_zero()) r = i;
    if (r < 0) throw PreconditionError("theta must move some coordinate");
    if (!lex_less(unit_vector(n, r), d_r_vector(tau, r))) throw PreconditionError("d_r(tau) must exceed e_r");
    return conjugate_by_triangular(tau, theta);
}

std::string pattern_name(Pattern p) {
    switch (p) {
        case Pattern::ConjugateByAffine: return "ConjugateByAffine";
        case Pattern::CommutatorWithAffine: return "CommutatorWithAffine";
        case Pattern::CommutatorWithTranslation: return "CommutatorWithTranslation";
        case Pattern::TDFactorRoute: return "TDFactorRoute";
        case Pattern::LambdaConstruction: return "LambdaConstruction";
        case Pattern::CaseSplit: return "CaseSplit";
    }
    return "";
}

Pattern parse_pattern(const std::string& s) {
    for (Pattern p : {Pattern::ConjugateByAffine, Pattern::CommutatorWithAffine, Pattern::CommutatorWithTranslation,
                      Pattern::TDFactorRoute, Pattern::LambdaConstruction, Pattern::CaseSplit})
        if (pattern_name(p) == s) return p;
    throw ParseError("unknown step pattern: " + s);
}

const Endo* ReductionStep::param(const std::string& key) const {
    for (auto& [k, v] : params)
        if (k == key) return &v;
    return nullptr;
}

namespace {

std::string fnv_hex(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string endo_digest(const Endo& e) { return fnv_hex(to_string(e)); }

std::string step_digest(const ReductionStep& s, const Endo& map, const std::string& previous) {
    std::string text = previous + "\n" + to_string(map) + "\n" + s.claim + "\n";
    for (auto& [k, v] : s.scalars) text += k + "=" + to_string(v) + "\n";
    return fnv_hex(text);
}

Endo derksen_map(int n) {
    Endo e = id_map(n);
    return with_component(e, 0, Poly::var(n, 0) + Poly::var(n, 1).pow(2));
}

Endo conjugate_by_word(const Endo& a, const AutoWord& w) {
    Endo t = a;
    for (auto& seg : flatten_segments(w)) t = conjugate_segment(seg, t);
    return t;
}

Endo replay_step(const ReductionStep& s, const AutoWord& prev) { return replay_step(s, prev, flatten(prev)); }

Endo replay_step(const ReductionStep& s, const AutoWord& prev, const Endo& prev_map) {
    if (prev_map.dim() != prev.n) throw DimensionMismatch("flattened map does not match the word");
    auto need = [&](const char* key) -> const Endo& {
        const Endo* e = s.param(key);
        if (!e) throw PreconditionError(std::string("step is missing parameter ") + key);
        if (e->dim() != prev.n) throw DimensionMismatch(std::string("parameter ") + key + " has the wrong dimension");
        return *e;
    };
    switch (s.pattern) {
        case Pattern::ConjugateByAffine: {
            const Endo& l = need("left");
            const Endo& r = need("right");
            if (l.is_identity() && r.is_identity()) return prev_map;
            return flatten(cat({word_of(prev.n, {aff(l)}), prev, word_of(prev.n, {aff(r)})}));
        }
        case Pattern::CommutatorWithAffine:
        case Pattern::CommutatorWithTranslation: return compose(need("left"), conjugate_by_word(need("inner"), prev));
        case Pattern::TDFactorRoute: {
            const Endo& l = need("lambda");
            const Endo& rho = need("perm");
            Endo inner = compose_all({affine_inverse(rho), need("inner"), rho});
            return compose_all({affine_inverse(l), conjugate_by_word(inner, prev), l});
        }
        case Pattern::LambdaConstruction: return conjugate_by_word(need("lambda"), prev);
        case Pattern::CaseSplit: return prev_map;
    }
    throw InternalError("unknown pattern");
}

bool terminal_shape(const Endo& e, TerminalShape* out) {
    int n = e.dim();
    if (e.nvars() != n) return false;
    int j = -1;
    for (int k = 0; k < n; ++k)
        if (e[k] != Poly::var(n, k)) {
            if (j >= 0) return false;
            j = k;
        }
    if (j < 0) return false;
    Poly q = e[j] - Poly::var(n, j);
    if (q.total_degree() != 2) return false;
    int i = -1;
    for (auto& t : q.terms())
        for (int v = 0; v < n; ++v)
            if (t.m.e[v]) {
                if (i >= 0 && i != v) return false;
                i = v;
            }
    if (i < 0 || i == j) return false;
    if (out) {
        Monomial m2, m1;
        m2.e[i] = 2;
        m1.e[i] = 1;
        out->j = j;
        out->i = i;
        out->q2 = q.coeff(m2);
        out->q1 = q.coeff(m1);
        out->q0 = q.constant_term();
    }
    return true;
}

std::pair<Endo, Endo> derksen_witness(const Endo& e) {
    TerminalShape s;
    if (!terminal_shape(e, &s)) throw PreconditionError("map is not of the form x_j + q(x_i)");
    int n = e.dim();
    // π: x_1 -> x_j, x_2 -> x_i, the rest in order
    std::vector<int> sigma{s.j, s.i};
    for (int k = 0; k < n; ++k)
        if (k != s.j && k != s.i) sigma.push_back(k);
    std::vector<int> inv(n);
    for (int k = 0; k < n; ++k) inv[sigma[k]] = k;
    Endo pi = permutation_endo(sigma), pi_inv = permutation_endo(inv);
    Endo a1 = with_component(id_map(n), s.j, Poly::var(n, s.j).scaled(s.q2));
    Poly tail = Poly::var(n, s.j) + Poly::var(n, s.i).scaled(s.q1) + Poly::constant(n, s.q0);
    Endo a2 = with_component(id_map(n), s.j, tail.scaled(s.q2.inverse()));
    return {compose(a1, pi_inv), compose(pi, a2)};
}

AutoWord word_for(const Endo& e) {
    int n = e.dim();
    if (is_affine(e)) return word_of(n, {aff(e)});
    if (is_triangular(e)) return word_of(n, {tri(e)});
    auto rev = reversal_sigma(n);
    Endo r = permutation_endo(rev);
    Endo flipped = compose_all({r, e, r});
    if (is_triangular(flipped))
        return word_of(n, {GeneratorToken::permutation(rev), tri(flipped), GeneratorToken::permutation(rev)});
    if (is_parabolic(e)) {
        Endo y = with_component(e, n - 1, Poly::var(n, n - 1));
        Endo x = with_component(id_map(n), n - 1, e[n - 1]);
        if (is_affine(y)) return word_of(n, {aff(y), tri(x)});
        if (is_triangular(y)) return word_of(n, {tri(y), tri(x)});
    }
    throw PreconditionError("no token word for this map (needs triangular, affine, or parabolic with triangular base)");
}

ReductionTrace reduce_triangular(const AutoWord& w, const EngineOptions& o) {
    Builder b("triangular", w, o);
    run_triangular(b);
    return b.finish();
}

ReductionTrace reduce_triangular(const Endo& tau, const EngineOptions& o) { return reduce_triangular(word_for(tau), o); }

ReductionTrace reduce_parabolic(const AutoWord& w, const EngineOptions& o) {
    Builder b("parabolic", w, o);
    if (!is_affine(b.map()) && !is_parabolic(b.map())) throw PreconditionError("map is not parabolic");
    run_parabolic(b);
    return b.finish();
}

ReductionTrace reduce_parabolic(const Endo& psi, const EngineOptions& o) { return reduce_parabolic(word_for(psi), o); }

ReductionTrace reduce_biparabolic(const AutoWord& psi1, const Endo& alpha, const AutoWord& psi2, const EngineOptions& o) {
    if (!is_parabolic(flatten(psi1)) || !is_parabolic(flatten(psi2))) throw PreconditionError("psi1 and psi2 must be parabolic");
    if (!is_affine(alpha)) throw PreconditionError("alpha must be affine");
    AutoWord w = cat({psi1, word_of(psi1.n, {aff(alpha)}), psi2});
    Builder b("biparabolic", w, o);
    run_biparabolic(b, psi1, alpha, psi2);
    return b.finish();
}

ReductionTrace reduce_3triangular(const AutoWord& w, const EngineOptions& o) {
    int n = w.n;
    ThreeTriShape s = parse_3tri(w);
    Builder b("3triangular", w, o);
    if (is_affine(b.map())) return b.finish();
    auto [l1, tr1] = split_affine(s.a1);
    auto [l2, tr2] = split_affine(s.a2);
    Endo t2 = compose(tr1, s.t2), t3 = compose(tr2, s.t3);
    AutoWord res = word_of(n, {tri(s.t1), aff(l1), tri(t2), aff(l2), tri(t3)});
    if (s.a0.is_identity() && s.a3.is_identity())
        b.step(Pattern::CaseSplit, {}, "3-triangular preprocessing: split affines into linear and translation parts", res);
    else
        b.step(Pattern::ConjugateByAffine, {{"left", affine_inverse(s.a0)}, {"right", affine_inverse(s.a3)}},
               "3-triangular preprocessing: strip the outer affine factors", res);
    std::optional<Scalar> pick = choose_translation_constant(b.word(), n - 1);
    if (!pick) {
        run_td(b, n - 1);
        return b.finish();
    }
    Scalar c = *pick;
    Endo theta = translation(n, n - 1, c);
    Endo tau = conjugate_by_word(theta, word_of(n, {tri(s.t1), aff(l1), tri(t2)}));
    if (!is_triangular(tau)) throw InternalError("3-triangular: inner conjugate is not triangular");
    AutoWord pw = word_of(n, {tri(t3)}), lw = word_of(n, {aff(l2)});
    b.step(Pattern::CommutatorWithTranslation, {{"left", id_map(n)}, {"inner", theta}},
           "3-triangular: conjugate theta_{n,c} into psi^-1 alpha^-1 tau alpha psi",
           cat({inverse(pw), inverse(lw), word_of(n, {tri(tau)}), lw, pw}), {{"c", c}});
    require_nonaffine(b.map(), "the first 3-triangular step");
    long base = 1 + triangular_degree_sum({s.t1, s.t2, s.t3});
    long cap = n;
    for (int k = 0; k < n; ++k) cap = cap > LONG_MAX / base ? LONG_MAX : cap * base;
    run_3tri_loop(b, t3, l2, tau, cap);
    return b.finish();
}

ReductionTrace reduce_exp(const AutoWord& psi1, const TriangularDerivation& d, const Poly& f, const AutoWord& psi2,
                          const EngineOptions& o) {
    if (!is_parabolic(flatten(psi1)) || !is_parabolic(flatten(psi2))) throw PreconditionError("psi1 and psi2 must be parabolic");
    if (!kernel_member(d, f)) throw PreconditionError("F is not in the kernel of D");
    AutoWord w = cat({psi1, word_of(psi1.n, {GeneratorToken::exp_fd(d, f)}), psi2});
    Builder b("exp", w, o);
    run_exp(b, psi1, d, f, psi2);
    return b.finish();
}

ReductionTrace reduce_td(const AutoWord& w, int r, const EngineOptions& o) {
    if (!td_test(w, r)) throw NotDegenerate("map is not translation degenerate in the given variable");
    Builder b("td", w, o);
    if (!is_affine(b.map())) run_td(b, r);
    return b.finish();
}

std::vector<Scalar> w_sequence(const TTDParams& p) {
    int n = p.dim();
    auto bb = [&](int m) { return m <= n ? p.b[m - 1] : Scalar(0); };  // 1-based b_m, b_{n+1} = 0
    std::vector<Scalar> w;
    for (int j = 1; j <= n - 1; ++j) {
        Scalar s(0);
        if (j == 1)
            s = -bb(2);
        else
            for (int i = 1; i <= j - 1; ++i) s -= w[i - 1] * bb(j - i + 1);
        w.push_back(s);
    }
    return w;
}

Endo lambda_tilde_formula(const TTDParams& p, const Scalar& a, const Scalar& g) {
    int n = p.dim();
    auto w = w_sequence(p);
    std::vector<Poly> c{Poly::var(n, 0).scaled(a)};
    for (int k = 2; k <= n; ++k) {
        Scalar ak = a.pow(k), ak1 = a.pow(k - 1);
        Poly comp = Poly::var(n, k - 1).scaled(ak);
        if (k < n)
            comp += Poly::constant(n, (ak - Scalar(1)) * p.b[k]);
        else
            comp += Poly::var(n, 0).scaled(g);
        for (int r = 2; r <= k - 1; ++r) comp += Poly::var(n, r - 1).scaled((ak - ak1) * w[k - r - 1]);
        c.push_back(std::move(comp));
    }
    return Endo(std::move(c));
}

LambdaResult lambda_construct(const TTDParams& p, const Scalar& a, const Scalar& g) {
    int n = p.dim();
    if (n < 2) throw PreconditionError("dimension must be at least 2");
    for (int k = 1; k < n; ++k)
        if (p.d[k] != 1) throw PreconditionError("lambda construction needs d_2 = … = d_n = 1");
    if (a.is_zero()) throw PreconditionError("a must be nonzero");
    LambdaResult out;
    out.w = w_sequence(p);
    std::vector<Poly> l0{Poly::var(n, 0).scaled(a)}, l1{Poly::var(n, 0)};
    Scalar f = (a - Scalar(1)) / a;
    for (int k = 2; k <= n; ++k) {
        Scalar ak = a.pow(k);
        Scalar bk1 = k < n ? p.b[k] : Scalar(0);
        l0.push_back(Poly::var(n, k - 1).scaled(ak) + Poly::constant(n, (ak - Scalar(1)) * bk1));
        Poly s = Poly::var(n, k - 1);
        for (int r = 1; r <= k - 1; ++r) s += Poly::var(n, r - 1).scaled(f * out.w[k - r - 1]);
        l1.push_back(std::move(s));
    }
    Endo l2 = last_shear(n, Poly::var(n, 0).scaled(g / a.pow(n)));
    out.lambda = compose_all({Endo(l0), Endo(l1), l2});
    Endo tau = ttd_build(p);
    Endo tau_inv = flatten(GeneratorToken::triangular(tau).inverted());
    out.lambda_tilde = compose_all({tau, out.lambda, tau_inv});
    return out;
}

namespace {
// tokens validate invertibility on construction
bool tokens_fit(const AutoWord& w, int n) {
    if (w.n != n) return false;
    for (auto& t : w.tokens)
        if (t.dim() != n) return false;
    return true;
}
}  // namespace

TraceCheck check_trace(const ReductionTrace& t) {
    auto fail = [](std::string m) { return TraceCheck{false, std::move(m)}; };
    try {
        int n = t.input.n;
        if (n < 2) return fail("input dimension below 2");
        if (!tokens_fit(t.input, n)) return fail("input word has tokens of the wrong dimension");
        AutoWord prev = t.input;
        const Endo input_map = flatten(t.input);
        Endo prev_map = input_map;
        std::string prev_digest = endo_digest(input_map);
        for (size_t k = 0; k < t.steps.size(); ++k) {
            const ReductionStep& s = t.steps[k];
            std::string at = "step " + std::to_string(k + 1) + ": ";
            for (auto& [key, e] : s.params) {
                if (e.dim() != n || e.nvars() != n) return fail(at + "parameter " + key + " has the wrong shape");
                if (!is_affine(e) || !linear_part(e).invertible()) return fail(at + "parameter " + key + " is not an affine automorphism");
                if (s.pattern == Pattern::CommutatorWithTranslation && !is_translation(e))
                    return fail(at + "parameter " + key + " is not a translation");
            }
            if (s.pattern == Pattern::TDFactorRoute) {
                const Endo* p = s.param("perm");
                if (p && !(is_affine(*p) && linear_part(*p).rank() == n && constant_part(*p) == std::vector<Scalar>(n, Scalar(0))))
                    return fail(at + "perm is not a permutation");
            }
            if (!tokens_fit(s.result, n)) return fail(at + "result word is malformed");
            Endo expected = replay_step(s, prev, prev_map);
            if (step_digest(s, expected, prev_digest) != s.digest) return fail(at + "digest mismatch on replay");
            prev_digest = s.digest;
            if (s.pattern == Pattern::CommutatorWithTranslation)
                for (auto& [k, v] : s.scalars)
                    if (k == "c" && s.param("inner") && translation_amount(*s.param("inner"), n - 1) != v)
                        return fail(at + "recorded c does not match the translation");
            if (flatten(s.result) != expected) return fail(at + "result word does not equal the replayed map");
            prev = s.result;
            prev_map = std::move(expected);
        }
        const Endo& fin = prev_map;
        if (t.terminal == TerminalKind::Affine) {
            if (!is_affine(fin) || !is_affine(input_map)) return fail("affine terminal on a non-affine map");
        } else {
            if (is_affine(fin)) return fail("Derksen terminal on an affine map");
            for (const Endo* a : {&t.alpha1, &t.alpha2})
                if (a->dim() != n || !is_affine(*a) || !linear_part(*a).invertible())
                    return fail("terminal witness is not an affine automorphism");
            if (compose_all({t.alpha1, derksen_map(n), t.alpha2}) != fin) return fail("terminal witness does not reproduce the final map");
        }
        return {true, "ok"};
    } catch (const Error& e) {
        return fail(std::string("replay error: ") + e.what());
    }
}

bool verify_trace(const ReductionTrace& t) { return check_trace(t).ok; }

}  // namespace cotame
