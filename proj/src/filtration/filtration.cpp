#include "cotame/filtration.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "cotame/random.hpp"

namespace cotame {

std::string to_string(const ExpTriple& v) {
    return "(" + std::to_string(v.i) + "," + std::to_string(v.j) + "," + std::to_string(v.k) + ")";
}

bool Order2::less(const ExpTriple& v, const ExpTriple& w) {
    if (v.i != w.i) return v.i > w.i;
    if (v.j != w.j) return v.j < w.j;
    return v.k < w.k;
}

namespace {

void need_xyz(const Poly& p) {
    if (p.nvars() != 3) throw DimensionMismatch("filtration data is defined for polynomials in x, y, z");
}

ExpTriple triple(const Monomial& m) { return {m.e[0], m.e[1], m.e[2]}; }

}  // namespace

ExpTriple ldeg2(const Poly& p) {
    need_xyz(p);
    if (p.is_zero()) throw PreconditionError("ldeg2 of the zero polynomial");
    ExpTriple best = triple(p.terms().front().m);
    for (auto& t : p.terms()) {
        ExpTriple v = triple(t.m);
        if (Order2::less(best, v)) best = v;
    }
    return best;
}

long deg110(const Poly& p) { return weighted_degree(p, {1, 1, 0}); }
long deg331(const Poly& p) { return weighted_degree(p, {3, 3, 1}); }

bool qstar_member(const Poly& p, const QStarIndex& idx) {
    need_xyz(p);
    if (p.is_zero()) throw PreconditionError("Q* membership of the zero polynomial");
    return deg110(p) <= idx.m && deg331(p) <= 3 * idx.m + idx.n && ldeg2(p) == ExpTriple{0, idx.m, idx.n};
}

namespace {

Endo E3(const std::string& s, const Field& f = nullptr) {
    VarContext ctx;
    ctx.n = 3;
    ctx.field = f;
    return parse_endo(s, ctx);
}

AutoWord beta_word() {
    // β is upper triangular; conjugate the lower triangular reversal
    std::vector<int> rev{2, 1, 0};
    Endo beta = E3("(x + y^2 (y + z^2)^2, y + z^2, z)");
    Endo rho = permutation_endo(rev);
    Endo lower = compose_all({rho, beta, rho});
    AutoWord w(3, {GeneratorToken::permutation(rev), GeneratorToken::triangular(lower), GeneratorToken::permutation(rev)});
    if (flatten(w) != beta) throw InternalError("beta word does not flatten to beta");
    return w;
}

AutoWord pi_word() { return AutoWord(3, {GeneratorToken::permutation({1, 0, 2})}); }

AutoWord power(const AutoWord& w, int k) {
    AutoWord out(w.n);
    for (int i = 0; i < k; ++i) out.append(w);
    return out;
}

}  // namespace

Generators build_generators() { return {beta_word(), pi_word()}; }

AutoWord theta_word(int N) {
    if (N < 1) throw PreconditionError("N must be at least 1");
    Generators g = build_generators();
    AutoWord pb = concat(g.pi, g.beta);
    AutoWord out = power(pb, N);
    out.append(g.pi);
    out.append(inverse(power(pb, N)));
    return out;
}

AutoWord conjugated_alpha_word(int N, const Endo& alpha) {
    if (N < 1) throw PreconditionError("N must be at least 1");
    Generators g = build_generators();
    AutoWord out = power(concat(g.pi, inverse(g.beta)), N);
    out.push(GeneratorToken::affine(alpha));
    out.append(g.pi);
    out.append(power(concat(g.pi, g.beta), N));
    return out;
}

std::string to_string(const GammaParams& p) { return "u=" + p.u.str() + " c=" + p.c.str() + " d=" + p.d.str(); }

namespace {

Field field_of(const GammaParams& p) { return join(join(p.u.field(), p.c.field()), p.d.field()); }

struct Vars {
    Field f;
    Poly x, y, z;
    explicit Vars(const Field& fld) : f(fld), x(Poly::var(3, 0, fld)), y(Poly::var(3, 1, fld)), z(Poly::var(3, 2, fld)) {}
    Poly k(const Scalar& s) const { return Poly::constant(3, s.with_field(f)); }
};

Poly z1_of(const GammaParams& p, const Vars& v) { return v.z * v.z * v.k(p.u.pow(8)) + v.z * v.k(p.c) + v.k(p.d); }
Poly z2_of(const GammaParams& p, const Vars& v) {
    return v.z * v.z * v.k(p.u.pow(8) - p.u.pow(2)) + v.z * v.k(p.c) + v.k(p.d);
}

}  // namespace

Endo gamma_alpha(const GammaParams& p) {
    if (p.u.is_zero()) throw PreconditionError("u must be nonzero");
    Vars v(field_of(p));
    return Endo({v.x * v.k(p.u.pow(8)) + v.z * v.k(p.c) + v.k(p.d), v.y * v.k(p.u.pow(2)), v.z * v.k(p.u)});
}

AutoWord gamma_word(const GammaParams& p) {
    Generators g = build_generators();
    AutoWord bi = inverse(g.beta);
    AutoWord w = concat(bi, g.pi);
    w.append(bi);
    w.push(GeneratorToken::affine(gamma_alpha(p)));
    w.append(g.beta);
    w.append(g.pi);
    w.append(g.beta);
    return w;
}

AutoWord pigamma_word(const GammaParams& p) { return concat(pi_word(), gamma_word(p)); }

XExpansion x_expansion(const GammaParams& p, Transcription t) {
    if (p.u.is_zero()) throw PreconditionError("u must be nonzero");
    bool lit = t == Transcription::Literal;
    Vars v(field_of(p));
    const Scalar& u = p.u;
    Poly z1 = z1_of(p, v), z2 = z2_of(p, v), z = v.z;
    Scalar two(2), one(1);
    Scalar cd = lit ? one : two;
    XExpansion e;
    e.x_coeff = lit ? z * z : v.k(u.pow(2));
    e.y_coeff.resize(5);
    e.y_coeff[4] = v.k(u.pow(2) * (one - u.pow(30)));
    e.y_coeff[3] = (z * z * v.k(one - u.pow(24) * (two * u.pow(6) - one)) - z * v.k(cd * u.pow(22) * p.c) -
                    v.k(cd * u.pow(22) * p.d)) *
                   v.k(two * u.pow(2));
    e.y_coeff[2] = (lit ? z.pow(4) : z.pow(4) * v.k(u.pow(2))) - (z1 * z1 + z1 * z2 * v.k(4) + z2 * z2) * v.k(u.pow(16));
    e.y_coeff[1] = -(z1 * z2 * z2 + z1 * z1 * z2) * v.k(two * (lit ? u.pow(2) : u.pow(8)));
    e.y_coeff[0] = -(z1 * z1 * z2 * z2);
    return e;
}

Poly assemble(const XExpansion& e) {
    int n = e.x_coeff.nvars();
    Poly x = Poly::var(n, 0), y = Poly::var(n, 1);
    Poly out = e.x_coeff * x;
    Poly yk = Poly::constant(n, Scalar(1));
    for (auto& c : e.y_coeff) {
        out += c * yk;
        yk *= y;
    }
    return out;
}

XExpansion split_x(const Poly& X) {
    need_xyz(X);
    XExpansion e;
    e.x_coeff = X.coeff_in(0, 1);
    Poly rest = X.coeff_in(0, 0);
    for (int k = 0; k <= 4; ++k) e.y_coeff.push_back(rest.coeff_in(1, k));
    return e;
}

GammaForms gamma_closed_form(const GammaParams& p, Transcription t) {
    Vars v(field_of(p));
    GammaForms g;
    g.gamma = flatten(gamma_word(p));
    g.X = g.gamma[0];
    g.Y = g.gamma[1];
    g.Z = g.gamma[2];
    g.Z1 = z1_of(p, v);
    g.Z2 = z2_of(p, v);
    const Scalar& u = p.u;
    Poly a = v.y * v.k(u.pow(8)) + g.Z1, b = v.y * v.k(u.pow(8)) + g.Z2;
    Poly lead = t == Transcription::Literal ? v.z * v.z * v.x : v.x * v.k(u.pow(2));
    Poly s = v.y + v.z * v.z;
    g.factored = Endo({lead + v.y * v.y * s * s * v.k(u.pow(2)) - a * a * b * b, b, v.z * v.k(u)});
    g.expansion = x_expansion(p, t);
    return g;
}

void Report::add(std::string name, bool ok, std::string detail) {
    lines.push_back({std::move(name), ok, std::move(detail)});
}

void Report::append(const Report& r, const std::string& prefix) {
    for (auto& l : r.lines) lines.push_back({prefix + l.name, l.ok, l.detail});
}

bool Report::ok() const { return failures() == 0; }

size_t Report::failures() const {
    size_t f = 0;
    for (auto& l : lines)
        if (!l.ok) ++f;
    return f;
}

std::string Report::text() const {
    std::ostringstream os;
    for (auto& l : lines) {
        os << l.name << ": " << (l.ok ? "pass" : "FAIL");
        if (!l.detail.empty()) os << " (" << l.detail << ")";
        os << "\n";
    }
    os << "summary: checks=" << lines.size() << " failed=" << failures() << " status=" << (ok() ? "pass" : "FAIL")
       << "\n";
    return os.str();
}

Report check_gamma(const GammaForms& g) {
    Report r;
    VarContext ctx;
    ctx.n = 3;
    ctx.field = g.X.field();
    auto diff = [&](const Poly& a, const Poly& b) { return a == b ? std::string() : "difference " + to_string(a - b, ctx); };
    r.add("factored X", g.factored[0] == g.X, diff(g.factored[0], g.X));
    r.add("factored Y", g.factored[1] == g.Y, diff(g.factored[1], g.Y));
    r.add("factored Z", g.factored[2] == g.Z, diff(g.factored[2], g.Z));
    XExpansion actual = split_x(g.X);
    r.add("expanded X coefficient of x", g.expansion.x_coeff == actual.x_coeff, diff(g.expansion.x_coeff, actual.x_coeff));
    for (int k = 4; k >= 0; --k)
        r.add("expanded X coefficient of y^" + std::to_string(k), g.expansion.y_coeff[k] == actual.y_coeff[k],
              diff(g.expansion.y_coeff[k], actual.y_coeff[k]));
    Poly e = assemble(g.expansion);
    r.add("expanded X", e == g.X, diff(e, g.X));
    return r;
}

std::string case_name(CaseTag t) {
    switch (t) {
        case CaseTag::A: return "A";
        case CaseTag::B2: return "B(2)";
        case CaseTag::B1: return "B(1)";
        case CaseTag::B0: return "B(0)";
    }
    return "";
}

CaseTag case_classify(const GammaParams& p) {
    if (p.u.is_zero()) throw PreconditionError("u must be nonzero");
    if (!p.u.pow(30).is_one()) return CaseTag::A;
    if (!p.u.pow(6).is_one()) return CaseTag::B2;
    if (!p.c.is_zero()) return CaseTag::B1;
    if (!p.d.is_zero()) return CaseTag::B0;
    throw PreconditionError("u^6 = 1 and c = d = 0: gamma has no entry in the case table");
}

int case_l(CaseTag t) {
    switch (t) {
        case CaseTag::B2: return 2;
        case CaseTag::B1: return 1;
        case CaseTag::B0: return 0;
        default: throw PreconditionError("case A has no l");
    }
}

DegreeStats degree_stats(const Poly& p) { return {deg110(p), deg331(p), ldeg2(p)}; }

Report verify_degree_table(const GammaParams& p) {
    CaseTag tag = case_classify(p);
    GammaForms g = gamma_closed_form(p);
    Report r;
    DegreeStats ex = tag == CaseTag::A ? DegreeStats{4, 12, {0, 4, 0}}
                                       : DegreeStats{3, 9 + case_l(tag), {0, 3, case_l(tag)}};
    std::vector<std::pair<std::string, std::pair<const Poly*, DegreeStats>>> rows{
        {"X", {&g.X, ex}}, {"Y", {&g.Y, {1, 3, {0, 1, 0}}}}, {"Z", {&g.Z, {0, 1, {0, 0, 1}}}}};
    for (auto& [name, row] : rows) {
        DegreeStats got = degree_stats(*row.first);
        const DegreeStats& want = row.second;
        std::string pre = name + " case " + case_name(tag) + " ";
        r.add(pre + "deg_(1,1,0)", got.d110 == want.d110,
              "got " + std::to_string(got.d110) + " table " + std::to_string(want.d110));
        r.add(pre + "deg_(3,3,1)", got.d331 == want.d331,
              "got " + std::to_string(got.d331) + " table " + std::to_string(want.d331));
        r.add(pre + "ldeg2", got.ldeg == want.ldeg, "got " + to_string(got.ldeg) + " table " + to_string(want.ldeg));
    }
    if (p.u.pow(6).is_one()) r.add("Z2 has z-degree at most 1", g.Z2.degree_in(2) <= 1);
    return r;
}

class MonomialImages {
   public:
    explicit MonomialImages(const Endo& m) : comps_(m.components()), pows_(3) {}

    const Poly& image(long i, long j, long k) {
        auto key = std::make_tuple(i, j, k);
        auto it = img_.find(key);
        if (it != img_.end()) return it->second;
        auto pk = std::make_pair(i, j);
        auto jt = pair_.find(pk);
        if (jt == pair_.end()) jt = pair_.emplace(pk, pow(0, i) * pow(1, j)).first;
        return img_.emplace(key, jt->second * pow(2, k)).first->second;
    }

   private:
    const Poly& pow(int v, long e) {
        auto& ps = pows_[v];
        if (ps.empty()) ps.push_back(Poly::constant(3, Scalar(1)));
        while (static_cast<long>(ps.size()) <= e) ps.push_back(ps.back() * comps_[v]);
        return ps[e];
    }

    std::vector<Poly> comps_;
    std::vector<std::vector<Poly>> pows_;
    std::map<std::pair<long, long>, Poly> pair_;
    std::map<std::tuple<long, long, long>, Poly> img_;
};

StabilityChecker::StabilityChecker(const AutoWord& map) : map_(flatten(map)) {
    if (map_.dim() != 3 || map_.nvars() != 3) throw DimensionMismatch("stability is checked for maps of x, y, z");
    for (auto& c : map_.components()) stats_.push_back(degree_stats(c));
    cache_ = std::make_unique<MonomialImages>(map_);
}

StabilityChecker::~StabilityChecker() = default;

namespace {

std::string idx_text(const QStarIndex& q) { return "Q*_{" + std::to_string(q.m) + "," + std::to_string(q.n) + "}"; }

template <class F>
void for_lattice(const QStarIndex& s, F&& f) {
    for (long i = 0; i <= s.m; ++i)
        for (long j = 0; i + j <= s.m; ++j)
            for (long k = 0; 3 * (i + j) + k <= 3 * s.m + s.n; ++k) f(ExpTriple{i, j, k});
}

}  // namespace

Report StabilityChecker::lattice(const QStarIndex& s, const QStarIndex& t) const {
    Report r;
    const DegreeStats &sx = stats_[0], &sy = stats_[1], &sz = stats_[2];
    std::string tag = idx_text(s) + " -> " + idx_text(t) + " ";
    long a = std::max(sx.d110, sy.d110), b = std::max(sx.d331, sy.d331);
    bool shape = sz.d110 == 0 && sz.d331 <= 1 && b >= 3;
    r.add(tag + "component shape", shape,
          shape ? "" : "z-image must have deg_(1,1,0) = 0 and deg_(3,3,1) <= 1");
    if (!shape) return r;
    bool tail110 = a * s.m <= t.m, tail331 = (b - 3) * s.m + 3 * s.m + s.n <= 3 * t.m + t.n;
    long points = 0, bad110 = 0, bad331 = 0, badl = 0, equal = 0, bad_eq = 0;
    ExpTriple top{0, t.m, t.n}, src_top{0, s.m, s.n};
    for_lattice(s, [&](const ExpTriple& v) {
        ++points;
        long d1 = v.i * sx.d110 + v.j * sy.d110 + v.k * sz.d110;
        long d3 = v.i * sx.d331 + v.j * sy.d331 + v.k * sz.d331;
        ExpTriple l = sx.ldeg.times(v.i) + sy.ldeg.times(v.j) + sz.ldeg.times(v.k);
        if (!(d1 <= a * (v.i + v.j) && a * (v.i + v.j) <= a * s.m)) ++bad110;
        if (!(d3 <= (b - 3) * (v.i + v.j) + 3 * v.i + 3 * v.j + v.k)) ++bad331;
        if (!Order2::less_equal(l, top)) ++badl;
        if (l == top) {
            ++equal;
            if (!(v == src_top)) ++bad_eq;
        }
    });
    r.add(tag + "deg_(1,1,0) chain", bad110 == 0 && tail110,
          std::to_string(points) + " points, " + std::to_string(bad110) + " violations, bound " + std::to_string(a) +
              "m = " + std::to_string(a * s.m) + " vs " + std::to_string(t.m));
    r.add(tag + "deg_(3,3,1) chain", bad331 == 0 && tail331,
          std::to_string(bad331) + " violations, bound " + std::to_string((b - 3) * s.m + 3 * s.m + s.n) + " vs " +
              std::to_string(3 * t.m + t.n));
    r.add(tag + "ldeg2 bound", badl == 0, std::to_string(badl) + " points above " + to_string(top));
    r.add(tag + "equality only at (0,m,n)", equal == 1 && bad_eq == 0,
          std::to_string(equal) + " points reach " + to_string(top));
    return r;
}

Report StabilityChecker::samples(const QStarIndex& s, const QStarIndex& t, const StabilityOptions& o) {
    Report r;
    std::string tag = idx_text(s) + " -> " + idx_text(t) + " ";
    ExpTriple top{0, s.m, s.n};
    std::vector<ExpTriple> below;
    for_lattice(s, [&](const ExpTriple& v) {
        if (Order2::less(v, top)) below.push_back(v);
    });
    Rng rng(o.seed * 1000003UL + static_cast<unsigned long>(s.m) * 1009UL + static_cast<unsigned long>(s.n));
    int bad_src = 0, bad_img = 0;
    std::string first;
    for (int it = 0; it < o.samples; ++it) {
        std::map<std::tuple<long, long, long>, Scalar> coeffs;
        coeffs[{top.i, top.j, top.k}] = random_scalar(rng);
        for (int e = 0; e < o.support && !below.empty(); ++e) {
            const ExpTriple& v = below[rng() % below.size()];
            coeffs[{v.i, v.j, v.k}] = random_scalar(rng);
        }
        std::vector<Term> terms;
        Poly img(3, map_.field());
        for (auto& [key, c] : coeffs) {
            auto [i, j, k] = key;
            Monomial m;
            m.e[0] = static_cast<uint16_t>(i);
            m.e[1] = static_cast<uint16_t>(j);
            m.e[2] = static_cast<uint16_t>(k);
            terms.push_back({m, c});
            img += cache_->image(i, j, k).scaled(c);
        }
        Poly p = Poly::from_terms(3, std::move(terms));
        if (!qstar_member(p, s)) ++bad_src;
        if (img.is_zero() || !qstar_member(img, t)) {
            if (!bad_img) {
                DegreeStats st = img.is_zero() ? DegreeStats{} : degree_stats(img);
                first = "first failure: image stats " + std::to_string(st.d110) + ", " + std::to_string(st.d331) + ", " +
                        to_string(st.ldeg);
            }
            ++bad_img;
        }
    }
    r.add(tag + "samples in source", bad_src == 0, std::to_string(o.samples - bad_src) + "/" + std::to_string(o.samples));
    r.add(tag + "samples map into target", bad_img == 0,
          std::to_string(o.samples - bad_img) + "/" + std::to_string(o.samples) + (first.empty() ? "" : ", " + first));
    return r;
}

Report verify_stability(const AutoWord& map, const QStarIndex& source, const QStarIndex& target,
                        const StabilityOptions& o) {
    StabilityChecker c(map);
    return o.mode == StabilityMode::Lattice ? c.lattice(source, target) : c.samples(source, target, o);
}

QStarIndex pigamma_target(const GammaParams& p, const QStarIndex& s) {
    CaseTag t = case_classify(p);
    if (t == CaseTag::A) return {4 * s.m, s.n};
    long l = case_l(t);
    return {3 * s.m, l * s.m + s.n};
}

std::vector<GammaParams> default_gamma_params() {
    Field f = cyclotomic5();
    Scalar z = Scalar::generator(f);
    return {{Scalar(2), Scalar(0), Scalar(0)},
            {Scalar(1), Scalar(1), Scalar(0)},
            {Scalar(1), Scalar(0), Scalar(1)},
            {z, Scalar(0), Scalar(1)},
            {z, Scalar(3), Scalar(5)}};
}

Report verify_theorem_noncotame(const NonCotameOptions& o) {
    if (o.N != 2) throw PreconditionError("the stability core is checked for N = 2");
    if (o.M < 4) throw PreconditionError("M must be at least 4");
    std::vector<GammaParams> params = o.params.empty() ? default_gamma_params() : o.params;
    Report r;
    Generators g = build_generators();
    Endo id = Endo::identity(3);
    r.add("generators pi^2 = id", flatten(concat(g.pi, g.pi)) == id);
    r.add("generators beta beta^-1 = id", flatten(concat(g.beta, inverse(g.beta))) == id);
    AutoWord th = theta_word(o.N);
    r.add("theta_N^2 = id", flatten(concat(th, th)) == id);

    for (auto& p : params) {
        std::string pre = "gamma[" + to_string(p) + "] ";
        GammaForms gf = gamma_closed_form(p);
        r.append(check_gamma(gf), pre);
        Endo pg = compose(permutation_endo({1, 0, 2}), gf.gamma);
        r.add(pre + "(pi beta^-1)^N alpha pi (pi beta)^N = pi gamma",
              flatten(conjugated_alpha_word(o.N, gamma_alpha(p))) == pg);
        r.append(verify_degree_table(p), pre);
    }

    struct Job {
        std::string name;
        AutoWord word;
        std::function<QStarIndex(const QStarIndex&)> target;
        Report out;
    };
    std::vector<Job> jobs;
    auto four = [](const QStarIndex& s) { return QStarIndex{4 * s.m, s.n}; };
    jobs.push_back({"pi beta", concat(g.pi, g.beta), four, {}});
    jobs.push_back({"pi beta^-1", concat(g.pi, inverse(g.beta)), four, {}});
    for (auto& p : params)
        jobs.push_back({"pi gamma[" + to_string(p) + "]", pigamma_word(p),
                        [p](const QStarIndex& s) { return pigamma_target(p, s); }, {}});

    StabilityOptions so;
    so.mode = StabilityMode::Samples;
    so.samples = o.samples;
    so.seed = o.seed;
    auto run = [&](Job& job) {
        StabilityChecker c(job.word);
        for (long m = 4; m <= o.M; ++m)
            for (long n = 0; n <= o.M; ++n) {
                QStarIndex s{m, n};
                QStarIndex t = job.target(s);
                job.out.append(c.lattice(s, t), job.name + " lattice ");
                if (o.with_samples) job.out.append(c.samples(s, t, so), job.name + " samples ");
            }
    };
    // each job owns its checker; reports are merged in job order
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errs(jobs.size());
    auto worker = [&] {
        for (size_t k; (k = next++) < jobs.size();) {
            try {
                run(jobs[k]);
            } catch (...) {
                errs[k] = std::current_exception();
            }
        }
    };
    int nw = std::max(1, std::min<int>(o.workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < nw; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (size_t k = 0; k < jobs.size(); ++k) {
        if (errs[k]) std::rethrow_exception(errs[k]);
        r.append(jobs[k].out);
    }
    return r;
}

}  // namespace cotame
