#include "cotame/degeneracy.hpp"

#include <optional>
#include <random>
#include <unordered_map>

namespace cotame {

TTDParams TTDParams::make(int n) {
    TTDParams p;
    p.b.assign(n, Scalar(0));
    p.b[0] = Scalar(1);
    p.d.assign(n, 0);
    return p;
}

int TTDParams::dprod(int j, int k) const {
    int r = 1;
    for (int i = j; i <= k; ++i) r *= d[i - 1];
    return r;
}

Endo conjugate_translation_t(const AutoWord& w, int r) {
    int n = w.n;
    if (r < 0 || r >= n) throw DimensionMismatch("translation index out of range");
    std::vector<Poly> c;
    for (int i = 0; i < n; ++i) c.push_back(Poly::var(n + 1, i));
    c[r] += Poly::var(n + 1, n);
    Endo t(std::move(c));
    for (auto& seg : flatten_segments(w)) t = conjugate_segment(seg, t);
    return t;
}

namespace {

long x_degree(const Monomial& m, int n) {
    long d = 0;
    for (int i = 0; i < n; ++i) d += m.e[i];
    return d;
}

}  // namespace

TDTest td_test_detail(const AutoWord& w, int r) {
    TDTest out;
    out.conjugate = conjugate_translation_t(w, r);
    out.degenerate = is_affine_in_x(out.conjugate);
    int n = w.n;
    for (auto& comp : out.conjugate.components())
        for (auto& t : comp.terms())
            if (x_degree(t.m, n) >= 2) out.t_bound = std::max<long>(out.t_bound, t.m.e[n]);
    return out;
}

namespace {

// arithmetic mod the Mersenne prime 2^61 - 1
constexpr uint64_t kPrime = 2305843009213693951ULL;

uint64_t mul_mod(uint64_t a, uint64_t b) { return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % kPrime); }
uint64_t add_mod(uint64_t a, uint64_t b) { return (a + b) % kPrime; }
uint64_t sub_mod(uint64_t a, uint64_t b) { return (a + kPrime - b) % kPrime; }

uint64_t pow_mod(uint64_t a, uint64_t e) {
    uint64_t r = 1;
    for (; e; e >>= 1, a = mul_mod(a, a))
        if (e & 1) r = mul_mod(r, a);
    return r;
}

std::optional<uint64_t> reduce_mod(const Scalar& s) {
    if (!s.is_rational()) return std::nullopt;
    const mpq_class& q = s.rational();
    uint64_t num = mpz_fdiv_ui(q.get_num_mpz_t(), kPrime);
    uint64_t den = mpz_fdiv_ui(q.get_den_mpz_t(), kPrime);
    if (den == 0) return std::nullopt;
    return mul_mod(num, pow_mod(den, kPrime - 2));
}

using ModPoint = std::vector<uint64_t>;

struct ModMap {
    struct ModTerm {
        Monomial m;
        uint64_t c;
    };
    std::vector<std::vector<ModTerm>> comps;

    static std::optional<ModMap> of(const Endo& e) {
        ModMap out;
        for (auto& p : e.components()) {
            std::vector<ModTerm> ts;
            for (auto& t : p.terms()) {
                auto c = reduce_mod(t.c);
                if (!c) return std::nullopt;
                ts.push_back({t.m, *c});
            }
            out.comps.push_back(std::move(ts));
        }
        return out;
    }

    // y with (*this)(y) = x, for a lower triangular map
    std::optional<ModPoint> solve_triangular(const ModPoint& x) const {
        int n = static_cast<int>(x.size());
        ModPoint y(n, 0);
        for (int i = 0; i < n; ++i) {
            uint64_t unit = 0, rest = 0;
            for (auto& t : comps[i]) {
                if (t.m.degree() == 1 && t.m.e[i] == 1) {
                    unit = t.c;
                    continue;
                }
                uint64_t v = t.c;
                for (int k = 0; k < i; ++k)
                    if (t.m.e[k]) v = mul_mod(v, pow_mod(y[k], t.m.e[k]));
                rest = add_mod(rest, v);
            }
            if (unit == 0) return std::nullopt;
            y[i] = mul_mod(sub_mod(x[i], rest), pow_mod(unit, kPrime - 2));
        }
        return y;
    }

    ModPoint operator()(const ModPoint& x) const {
        int n = static_cast<int>(x.size());
        ModPoint y(comps.size(), 0);
        for (size_t i = 0; i < comps.size(); ++i)
            for (auto& t : comps[i]) {
                uint64_t v = t.c;
                for (int k = 0; k < n; ++k)
                    if (t.m.e[k]) v = mul_mod(v, pow_mod(x[k], t.m.e[k]));
                y[i] = add_mod(y[i], v);
            }
        return y;
    }
};

// true only when θ_{r,c} conjugated through w has a nonzero second difference mod the prime, which proves it
// is not affine; false means nothing
bool conjugate_certainly_nonaffine(const AutoWord& w, int r, const Scalar& c) {
    auto cm = reduce_mod(c);
    if (!cm) return false;
    std::vector<WordSegment> segs = flatten_segments(w);
    std::vector<ModMap> fwd, inv;
    for (auto& seg : segs) {
        auto f = ModMap::of(seg.map);
        if (!f) return false;
        fwd.push_back(std::move(*f));
        if (seg.triangular) {
            inv.emplace_back();
            continue;
        }
        auto g = ModMap::of(seg.inv);
        if (!g) return false;
        inv.push_back(std::move(*g));
    }
    auto apply = [&](ModPoint x) -> std::optional<ModPoint> {
        for (size_t k = fwd.size(); k-- > 0;) x = fwd[k](x);
        x[r] = add_mod(x[r], *cm);
        for (size_t k = 0; k < segs.size(); ++k) {
            if (!segs[k].triangular) {
                x = inv[k](x);
                continue;
            }
            // solve g(y) = x one coordinate at a time
            auto y = fwd[k].solve_triangular(x);
            if (!y) return std::nullopt;
            x = std::move(*y);
        }
        return x;
    };
    int n = w.n;
    std::mt19937_64 gen(0x5eed);
    std::uniform_int_distribution<uint64_t> coord(0, kPrime - 1);
    for (int trial = 0; trial < 3; ++trial) {
        ModPoint p(n), u(n), v(n);
        for (int i = 0; i < n; ++i) p[i] = coord(gen), u[i] = coord(gen), v[i] = coord(gen);
        ModPoint pu(n), pv(n), puv(n);
        for (int i = 0; i < n; ++i) {
            pu[i] = add_mod(p[i], u[i]);
            pv[i] = add_mod(p[i], v[i]);
            puv[i] = add_mod(pu[i], v[i]);
        }
        auto a = apply(puv), b = apply(pu), d = apply(pv), e = apply(p);
        if (!a || !b || !d || !e) return false;
        for (int i = 0; i < n; ++i)
            if (sub_mod(add_mod((*a)[i], (*e)[i]), add_mod((*b)[i], (*d)[i])) != 0) return true;
    }
    return false;
}

}  // namespace

bool td_test(const AutoWord& w, int r) {
    if (r >= 0 && r < w.n && conjugate_certainly_nonaffine(w, r, Scalar(1))) return false;
    return td_test_detail(w, r).degenerate;
}

std::optional<Scalar> choose_translation_constant(const AutoWord& w, int r) {
    int n = w.n;
    if (r < 0 || r >= n) throw DimensionMismatch("translation index out of range");
    if (conjugate_certainly_nonaffine(w, r, Scalar(1))) return Scalar(1);
    Endo t = translation(n, r, Scalar(1));
    for (auto& seg : flatten_segments(w)) t = conjugate_segment(seg, t);
    if (!is_affine(t)) return Scalar(1);
    TDTest d = td_test_detail(w, r);
    if (d.degenerate) return std::nullopt;
    return nonaffine_constant(d);
}

Endo specialize_t(const Endo& e, int n, const Scalar& c) {
    std::vector<Poly> out;
    for (auto& comp : e.components()) out.push_back(evaluate_var(comp, n, c).widen(n));
    return Endo(std::move(out));
}

Scalar nonaffine_constant(const TDTest& t) {
    if (t.degenerate) throw PreconditionError("map is translation degenerate; every conjugate is affine");
    int n = t.conjugate.dim();
    for (long c = 1; c <= t.t_bound + 1; ++c)
        if (!is_affine(specialize_t(t.conjugate, n, Scalar(c)))) return Scalar(c);
    throw InternalError("no non-affine conjugate within the t-degree bound");
}

LinearSystemData extract_linear_system_from(const Endo& h) {
    int n = h.dim();
    std::vector<Poly> dh;
    for (int i = 0; i < n; ++i) dh.push_back(partial_derivative(h[i], 0));
    std::unordered_map<Monomial, int, MonomialHash> row;
    row[Monomial{}] = 0;
    auto index = [&](const Monomial& m) {
        auto it = row.find(m);
        if (it != row.end()) return it->second;
        int k = static_cast<int>(row.size());
        row.emplace(m, k);
        return k;
    };
    for (auto& p : h.components())
        for (auto& t : p.terms()) index(t.m);
    for (auto& p : dh)
        for (auto& t : p.terms()) index(t.m);
    int cols = 2 * n + 1;
    Matrix m(static_cast<int>(row.size()), cols);
    for (int j = 0; j < n; ++j)
        for (auto& t : h[j].terms()) m(row[t.m], j) = t.c;
    m(0, n) = Scalar(1);
    for (int i = 0; i < n; ++i)
        for (auto& t : dh[i].terms()) m(row[t.m], n + 1 + i) = t.c;
    std::vector<int> piv;
    Matrix r = m.rref(&piv);
    for (int p : piv)
        if (p > n) throw NotDegenerate("∂H_i/∂x1 is not an affine combination of the components");
    if (static_cast<int>(piv.size()) != n + 1) throw PreconditionError("components are linearly dependent with 1");
    LinearSystemData out{Matrix(n, n), std::vector<Scalar>(n)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out.A(i, j) = r(j, n + 1 + i);
        out.B[i] = r(n, n + 1 + i);
    }
    return out;
}

LinearSystemData extract_linear_system(const AutoWord& w) { return extract_linear_system_from(flatten(inverse(w))); }

bool is_jordan_form(const LinearSystemData& s) {
    int n = s.A.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Scalar& a = s.A(i, j);
            if (j == i - 1) {
                if (!a.is_zero() && !a.is_one()) return false;
            } else if (!a.is_zero()) {
                return false;
            }
        }
    return true;
}

namespace {

std::vector<Scalar> mat_vec(const Matrix& m, const std::vector<Scalar>& v) { return m * v; }

Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    Scalar s(0);
    for (size_t i = 0; i < a.size(); ++i) s.add_product(a[i], b[i]);
    return s;
}

int rank_of(const std::vector<std::vector<Scalar>>& vs, int n) {
    if (vs.empty()) return 0;
    Matrix m(static_cast<int>(vs.size()), n);
    for (size_t i = 0; i < vs.size(); ++i)
        for (int j = 0; j < n; ++j) m(static_cast<int>(i), j) = vs[i][j];
    return m.rank();
}

struct Chain {
    std::vector<std::vector<Scalar>> rows;  // bottom (N^{k-1} v) first, generator last
};

}  // namespace

JordanResult jordan_normalize_system(const LinearSystemData& sys) {
    int n = sys.A.rows();
    Matrix N = sys.A.transpose();
    std::vector<Matrix> pw{Matrix::identity(n)};
    while (!pw.back().is_zero()) {
        if (static_cast<int>(pw.size()) > n) throw NotDegenerate("linear part is not nilpotent");
        pw.push_back(pw.back() * N);
    }
    int kmax = static_cast<int>(pw.size()) - 1;
    std::vector<Chain> chains;
    // heights of the vectors collected so far
    std::vector<std::pair<std::vector<Scalar>, int>> collected;
    for (int k = kmax; k >= 1; --k) {
        std::vector<std::vector<Scalar>> base = pw[k - 1].nullspace();
        for (auto& [v, h] : collected)
            if (h == k) base.push_back(v);
        int rk = rank_of(base, n);
        for (auto& cand : pw[k].nullspace()) {
            base.push_back(cand);
            int r2 = rank_of(base, n);
            if (r2 == rk) {
                base.pop_back();
                continue;
            }
            rk = r2;
            Chain ch;
            std::vector<std::vector<Scalar>> up{cand};
            for (int j = 1; j < k; ++j) up.push_back(mat_vec(N, up.back()));
            for (int j = 0; j < k; ++j) collected.emplace_back(up[j], k - j);
            ch.rows.assign(up.rbegin(), up.rend());
            chains.push_back(std::move(ch));
        }
    }
    size_t chosen = chains.size();
    Scalar lead;
    for (size_t i = 0; i < chains.size(); ++i) {
        Scalar b = dot(chains[i].rows.front(), sys.B);
        if (!b.is_zero()) {
            chosen = i;
            lead = b;
            break;
        }
    }
    if (chosen == chains.size()) throw NotDegenerate("no Jordan block has a nonzero constant at its top");
    Matrix L(n, n);
    int row = 0;
    auto emit = [&](const Chain& ch, const Scalar& scale) {
        for (auto& v : ch.rows) {
            for (int j = 0; j < n; ++j) L(row, j) = v[j] * scale;
            ++row;
        }
    };
    emit(chains[chosen], lead.inverse());
    for (size_t i = 0; i < chains.size(); ++i)
        if (i != chosen) emit(chains[i], Scalar(1));
    if (row != n) throw InternalError("Jordan chains do not span the space");
    Matrix Linv = L.inverse();
    JordanResult out;
    out.L = L;
    out.lambda = affine_endo(Linv, std::vector<Scalar>(n, Scalar(0)));
    out.data.A = L * sys.A * Linv;
    out.data.B = L * sys.B;
    if (!is_jordan_form(out.data) || !out.data.B[0].is_one()) throw InternalError("Jordan normalization failed");
    return out;
}

JordanResult jordan_normalize(const AutoWord& w) { return jordan_normalize_system(extract_linear_system(w)); }

Endo ttd_build(const TTDParams& p) {
    int n = p.dim();
    Poly x1 = Poly::var(n, 0);
    std::vector<Poly> c{x1};
    for (int k = 2; k <= n; ++k) {
        Poly comp = Poly::var(n, k - 1);
        Scalar fact(1);
        Poly x1r = Poly::constant(n, Scalar(1));
        for (int r = 1; r <= k - 1; ++r) {
            fact *= Scalar(r);
            x1r *= x1;
            Scalar coef = Scalar(r % 2 ? -1 : 1) / fact;
            Poly inner = Poly::var(n, k - r - 1).scaled(Scalar(p.dprod(k - r + 1, k))) +
                         Poly::constant(n, p.b[k - r] * Scalar(p.dprod(k - r + 2, k)));
            comp += (x1r * inner).scaled(coef);
        }
        fact *= Scalar(k);
        x1r *= x1;
        comp += x1r.scaled(Scalar(k % 2 ? -1 : 1) * Scalar(p.dprod(2, k)) / fact);
        c.push_back(std::move(comp));
    }
    return Endo(std::move(c));
}

Endo ttd_build_via_exp(const TTDParams& p) {
    int n = p.dim();
    std::vector<Poly> img{Poly(n)}, nu{Poly::var(n, 0)};
    Scalar fact(1);
    for (int k = 2; k <= n; ++k) {
        img.push_back(Poly::var(n, k - 2).scaled(Scalar(p.d[k - 1])) + Poly::constant(n, p.b[k - 1]));
        fact *= Scalar(k);
        nu.push_back(Poly::var(n, k - 1) +
                     Poly::var(n, 0).pow(k).scaled(Scalar(k % 2 ? -1 : 1) * Scalar(p.dprod(2, k)) / fact));
    }
    return compose(Endo(std::move(nu)), exponential(TriangularDerivation(std::move(img)), -Poly::var(n, 0)));
}

Elimination eliminate_x1_from(const Endo& h, const LinearSystemData& sys) {
    int n = h.dim();
    if (!is_jordan_form(sys) || !sys.B[0].is_one()) throw PreconditionError("linear system is not in normalized Jordan form");
    Elimination out;
    out.params = TTDParams::make(n);
    for (int k = 1; k < n; ++k) {
        out.params.b[k] = sys.B[k];
        out.params.d[k] = sys.A(k, k - 1).is_one() ? 1 : 0;
    }
    out.tau = ttd_build(out.params);
    out.G.push_back(h[0]);
    for (int k = 1; k < n; ++k) {
        Poly g = substitute(out.tau[k], h.components());
        if (g.depends_on(0)) throw InternalError("eliminated component still depends on x1");
        out.G.push_back(std::move(g));
    }
    return out;
}

Elimination eliminate_x1(const AutoWord& w) {
    Endo h = flatten(inverse(w));
    return eliminate_x1_from(h, extract_linear_system_from(h));
}

TDFactorization factorize_td(const AutoWord& w, int r) {
    int n = w.n;
    if (r < 0 || r >= n) throw DimensionMismatch("variable index out of range");
    TDFactorization f;
    f.r = r;
    f.rho.resize(n);
    for (int i = 0; i < n; ++i) f.rho[i] = i;
    std::swap(f.rho[0], f.rho[r]);
    // φ' = ρφ is degenerate in x1 and φ'⁻¹ = φ⁻¹ρ
    AutoWord inv = inverse(w);
    inv.push(GeneratorToken::permutation(f.rho));
    Endo hraw = flatten(inv);
    f.raw = extract_linear_system_from(hraw);
    JordanResult j = jordan_normalize_system(f.raw);
    f.lambda = j.lambda;
    f.data = j.data;
    std::vector<Poly> h;
    for (int i = 0; i < n; ++i) {
        Poly s(hraw.nvars(), hraw.field());
        for (int k = 0; k < n; ++k)
            if (!j.L(i, k).is_zero()) s += hraw[k].scaled(j.L(i, k));
        h.push_back(std::move(s));
    }
    Elimination e = eliminate_x1_from(Endo(h), f.data);
    f.tau = e.tau;
    f.params = e.params;
    f.G = e.G;
    Poly g1 = h[0] - Poly::var(n, 0);
    if (g1.depends_on(0)) throw InternalError("first component is not x1 plus a function of the others");
    std::vector<Poly> mu{h[0]}, gamma{Poly::var(n, 0)};
    for (int k = 1; k < n; ++k) {
        mu.push_back(Poly::var(n, k));
        gamma.push_back(e.G[k]);
    }
    f.mu = Endo(std::move(mu));
    f.gamma = Endo(std::move(gamma));
    return f;
}

Endo recompose(const TDFactorization& f) {
    Endo tinv = triangular_endo(triangular_inverse(triangular_data(f.tau)));
    return compose_all({f.lambda, tinv, f.gamma, f.mu, permutation_endo(f.rho)});
}

}  // namespace cotame
