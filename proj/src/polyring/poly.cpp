#include "cotame/poly.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace cotame {

bool grlex_greater(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    for (int i = 0; i < kMaxVars; ++i)
        if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    return false;
}

size_t MonomialHash::operator()(const Monomial& m) const {
    uint64_t h = 1469598103934665603ull;
    for (auto x : m.e) {
        h ^= x;
        h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
}

namespace {

void sort_terms(std::vector<Term>& ts) {
    std::sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) { return grlex_greater(a.m, b.m); });
}

// sorted input, possibly with repeats and zeros
std::vector<Term> combine_sorted(std::vector<Term>&& ts) {
    std::vector<Term> out;
    out.reserve(ts.size());
    for (auto& t : ts) {
        if (!out.empty() && out.back().m == t.m) {
            out.back().c += t.c;
        } else {
            if (!out.empty() && out.back().c.is_zero()) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().c.is_zero()) out.pop_back();
    return out;
}

void require_same_n(const Poly& a, const Poly& b) {
    if (a.nvars() != b.nvars())
        throw DimensionMismatch("polynomials in " + std::to_string(a.nvars()) + " and " +
                                std::to_string(b.nvars()) + " variables");
}

// sum of two sorted term lists, consuming both
std::vector<Term> merge_consume(std::vector<Term>&& a, std::vector<Term>&& b) {
    if (a.empty()) return std::move(b);
    if (b.empty()) return std::move(a);
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && grlex_greater(a[i].m, b[j].m))) {
            out.push_back(std::move(a[i++]));
        } else if (i == a.size() || grlex_greater(b[j].m, a[i].m)) {
            out.push_back(std::move(b[j++]));
        } else {
            a[i].c += b[j].c;
            if (!a[i].c.is_zero()) out.push_back(std::move(a[i]));
            ++i;
            ++j;
        }
    }
    return out;
}

std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && grlex_greater(a[i].m, b[j].m))) {
            out.push_back(a[i++]);
        } else if (i == a.size() || grlex_greater(b[j].m, a[i].m)) {
            out.push_back(negate_b ? Term{b[j].m, -b[j].c} : b[j]);
            ++j;
        } else {
            Scalar c = a[i].c;
            if (negate_b) c -= b[j].c;
            else c += b[j].c;
            if (!c.is_zero()) out.push_back(Term{a[i].m, std::move(c)});
            ++i;
            ++j;
        }
    }
    return out;
}

// grlex key: degree, then x1..x7 (x8 is implied); keys add under monomial product
using Key = unsigned __int128;

Key grlex_key(const Monomial& m) {
    Key k = static_cast<Key>(m.degree());
    for (int i = 0; i < kMaxVars - 1; ++i) k = (k << 16) | m.e[i];
    return k;
}

bool all_rational(const std::vector<Term>& v) {
    for (auto& t : v)
        if (!t.c.is_rational()) return false;
    return true;
}

// integer numerators over a common denominator
mpz_class clear_denominators(const std::vector<Term>& v, std::vector<mpz_class>& out) {
    mpz_class l = 1;
    for (auto& t : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.rational().get_den_mpz_t());
    out.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        const mpq_class& q = v[i].c.rational();
        mpz_divexact(out[i].get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
        out[i] *= q.get_num();
    }
    return l;
}

template <class Emit, class Acc>
void heap_product(const std::vector<Term>& rows, const std::vector<Term>& cols, Acc&& acc, Emit&& emit) {
    std::vector<Key> rk(rows.size()), ck(cols.size());
    for (size_t i = 0; i < rows.size(); ++i) rk[i] = grlex_key(rows[i].m);
    for (size_t j = 0; j < cols.size(); ++j) ck[j] = grlex_key(cols[j].m);
    struct Entry {
        Key key;
        uint32_t row, col;
    };
    auto cmp = [](const Entry& x, const Entry& y) { return x.key < y.key; };
    std::vector<Entry> heap;
    heap.reserve(rows.size());
    for (uint32_t r = 0; r < rows.size(); ++r) heap.push_back(Entry{rk[r] + ck[0], r, 0});
    std::make_heap(heap.begin(), heap.end(), cmp);
    bool open = false;
    Key cur = 0;
    uint32_t cr = 0, cc = 0;
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Entry& e = heap.back();
        if (open && e.key == cur) {
            acc(e.row, e.col, false);
        } else {
            if (open) emit(rows[cr].m * cols[cc].m);
            cur = e.key;
            cr = e.row;
            cc = e.col;
            acc(e.row, e.col, true);
            open = true;
        }
        if (e.col + 1 < cols.size()) {
            ++e.col;
            e.key = rk[e.row] + ck[e.col];
            std::push_heap(heap.begin(), heap.end(), cmp);
        } else {
            heap.pop_back();
        }
    }
    if (open) emit(rows[cr].m * cols[cc].m);
}

std::vector<Term> mul_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
    if (a.empty() || b.empty()) return {};
    const auto& rows = a.size() <= b.size() ? a : b;
    const auto& cols = a.size() <= b.size() ? b : a;
    std::vector<Term> out;
    if (rows.size() == 1) {
        out.reserve(cols.size());
        for (auto& t : cols) out.push_back(Term{t.m * rows[0].m, t.c * rows[0].c});
        return out;
    }
    out.reserve(cols.size() * 2);
    if (all_rational(rows) && all_rational(cols)) {
        Field f = join(rows[0].c.field(), cols[0].c.field());
        std::vector<mpz_class> ri, ci;
        mpz_class den = clear_denominators(rows, ri) * clear_denominators(cols, ci);
        mpz_class sum;
        heap_product(
            rows, cols,
            [&](uint32_t r, uint32_t c, bool fresh) {
                if (fresh) mpz_mul(sum.get_mpz_t(), ri[r].get_mpz_t(), ci[c].get_mpz_t());
                else mpz_addmul(sum.get_mpz_t(), ri[r].get_mpz_t(), ci[c].get_mpz_t());
            },
            [&](const Monomial& m) {
                if (sgn(sum) == 0) return;
                Scalar s(mpq_class(sum, den));
                out.push_back(Term{m, f ? s.with_field(f) : std::move(s)});
            });
        return out;
    }
    Scalar sum;
    heap_product(
        rows, cols,
        [&](uint32_t r, uint32_t c, bool fresh) {
            if (fresh) sum = rows[r].c * cols[c].c;
            else sum.add_product(rows[r].c, cols[c].c);
        },
        [&](const Monomial& m) {
            if (!sum.is_zero()) out.push_back(Term{m, sum});
        });
    return out;
}

}  // namespace

void Poly::check_n() const {
    if (n_ < 0 || n_ > kMaxVars) throw DimensionMismatch("unsupported number of variables: " + std::to_string(n_));
}

Poly Poly::constant(int nvars, const Scalar& c) {
    Poly p(nvars, c.field());
    if (!c.is_zero()) p.t_.push_back(Term{Monomial{}, c});
    return p;
}

Poly Poly::var(int nvars, int i, const Field& f) {
    if (i < 0 || i >= nvars) throw DimensionMismatch("variable index out of range");
    Poly p(nvars, f);
    Monomial m;
    m.e[i] = 1;
    p.t_.push_back(Term{m, Scalar(1)});
    return p;
}

Poly Poly::monomial(int nvars, const Monomial& m, const Scalar& c) {
    Poly p(nvars, c.field());
    for (int i = nvars; i < kMaxVars; ++i)
        if (m.e[i]) throw DimensionMismatch("monomial uses a variable past the dimension");
    if (!c.is_zero()) p.t_.push_back(Term{m, c});
    return p;
}

Poly Poly::from_terms(int nvars, std::vector<Term> terms, const Field& f) {
    Poly p(nvars, f);
    for (auto& t : terms) {
        if (t.c.field()) p.f_ = join(p.f_, t.c.field());
        for (int i = nvars; i < kMaxVars; ++i)
            if (t.m.e[i]) throw DimensionMismatch("monomial uses a variable past the dimension");
    }
    sort_terms(terms);
    p.t_ = combine_sorted(std::move(terms));
    return p;
}

Poly Poly::from_sorted(int nvars, std::vector<Term> terms, const Field& f) {
    Poly p(nvars, f);
    p.t_ = std::move(terms);
    return p;
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.degree() == 0); }

Scalar Poly::constant_term() const {
    if (!t_.empty() && t_.back().m.degree() == 0) return t_.back().c;
    return Scalar(0);
}

Scalar Poly::coeff(const Monomial& m) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), m,
                               [](const Term& t, const Monomial& x) { return grlex_greater(t.m, x); });
    if (it != t_.end() && it->m == m) return it->c;
    return Scalar(0);
}

long Poly::total_degree() const {
    if (t_.empty()) return kNegInf;
    return t_.front().m.degree();
}

long Poly::degree_in(int var) const {
    if (t_.empty()) return kNegInf;
    long d = 0;
    for (auto& t : t_) d = std::max<long>(d, t.m.e[var]);
    return d;
}

bool Poly::depends_on(int var) const {
    for (auto& t : t_)
        if (t.m.e[var]) return true;
    return false;
}

int Poly::max_var() const {
    int v = -1;
    for (auto& t : t_)
        for (int i = kMaxVars - 1; i > v; --i)
            if (t.m.e[i]) {
                v = i;
                break;
            }
    return v;
}

Poly Poly::widen(int nvars) const {
    if (nvars < n_ && max_var() >= nvars) throw DimensionMismatch("cannot narrow a polynomial that uses dropped variables");
    Poly p = *this;
    p.n_ = nvars;
    p.check_n();
    return p;
}

Poly Poly::with_field(const Field& f) const {
    Poly p = *this;
    p.f_ = join(f_, f);
    return p;
}

Poly Poly::degree_part(long lo, long hi) const {
    Poly p(n_, f_);
    for (auto& t : t_) {
        long d = t.m.degree();
        if (d >= lo && d <= hi) p.t_.push_back(t);
    }
    return p;
}

Poly Poly::coeff_in(int var, int k) const {
    std::vector<Term> ts;
    for (auto& t : t_)
        if (t.m.e[var] == k) {
            Term s = t;
            s.m.e[var] = 0;
            ts.push_back(std::move(s));
        }
    return from_terms(n_, std::move(ts), f_);
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.t_) t.c = -t.c;
    return p;
}

Poly& Poly::operator+=(const Poly& o) {
    require_same_n(*this, o);
    f_ = join(f_, o.f_);
    if (o.t_.empty()) return *this;
    if (t_.empty()) {
        t_ = o.t_;
        return *this;
    }
    t_ = merge(t_, o.t_, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    require_same_n(*this, o);
    f_ = join(f_, o.f_);
    if (o.t_.empty()) return *this;
    t_ = merge(t_, o.t_, true);
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    require_same_n(*this, o);
    f_ = join(f_, o.f_);
    t_ = mul_terms(t_, o.t_);
    return *this;
}

Poly Poly::scaled(const Scalar& c) const {
    Poly p(n_, join(f_, c.field()));
    if (c.is_zero()) return p;
    p.t_.reserve(t_.size());
    for (auto& t : t_) p.t_.push_back(Term{t.m, t.c * c});
    return p;
}

Poly Poly::shifted(const Monomial& m) const {
    Poly p = *this;
    for (auto& t : p.t_) t.m = t.m * m;
    for (int i = n_; i < kMaxVars; ++i)
        if (m.e[i]) throw DimensionMismatch("monomial uses a variable past the dimension");
    return p;
}

Poly Poly::pow(int e) const {
    if (e < 0) throw PreconditionError("negative exponent");
    Poly r = constant(n_, Scalar(1)).with_field(f_);
    for (int i = 0; i < e; ++i) r *= *this;
    return r;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    r += b;
    return r;
}
Poly operator-(const Poly& a, const Poly& b) {
    Poly r = a;
    r -= b;
    return r;
}
Poly operator*(const Poly& a, const Poly& b) {
    Poly r = a;
    r *= b;
    return r;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (size_t i = 0; i < a.t_.size(); ++i)
        if (a.t_[i].m != b.t_[i].m || a.t_[i].c != b.t_[i].c) return false;
    return true;
}

Poly add(const Poly& a, const Poly& b) { return a + b; }
Poly sub(const Poly& a, const Poly& b) { return a - b; }
Poly mul(const Poly& a, const Poly& b) { return a * b; }

namespace {

class Substituter {
   public:
    Substituter(const std::vector<Poly>& images, int out_n, const Field& f)
        : img_(images), out_n_(out_n), f_(f), pow_(images.size()) {
        ident_.resize(images.size());
        for (size_t v = 0; v < images.size(); ++v) {
            const auto& p = images[v];
            ident_[v] = p.size() == 1 && p.leading().c.is_one() && p.leading().m.degree() == 1 &&
                        p.leading().m.e[v] == 1;
        }
    }

    Poly run(std::vector<Term> ts) { return eval(std::move(ts), 0); }

   private:
    const Poly& power(size_t v, int k) {
        auto& cache = pow_[v];
        if (cache.empty()) cache.push_back(Poly::constant(out_n_, Scalar(1)));
        while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * img_[v]);
        return cache[k];
    }

    Poly eval(std::vector<Term> ts, size_t v) {
        while (v < img_.size() && ident_[v]) ++v;
        if (v == img_.size()) return Poly::from_terms(out_n_, std::move(ts), f_);
        std::map<int, std::vector<Term>> groups;
        for (auto& t : ts) {
            int k = t.m.e[v];
            t.m.e[v] = 0;
            groups[k].push_back(std::move(t));
        }
        if (img_[v].size() <= kHornerMax) {
            // Horner in x_v: multiply by the (small) image, never by its large powers
            Poly acc(out_n_, f_);
            int prev = -1;
            for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
                int k = it->first;
                if (prev >= 0) acc *= power(v, prev - k);
                acc += eval(std::move(it->second), v + 1);
                prev = k;
            }
            if (prev > 0) acc *= power(v, prev);
            return acc;
        }
        std::vector<std::vector<Term>> parts;
        parts.reserve(groups.size());
        for (auto& [k, g] : groups) {
            Poly r = eval(std::move(g), v + 1);
            if (k > 0) r *= power(v, k);
            parts.push_back(std::move(r).release_terms());
        }
        // pairwise merge keeps the summation near-linear in the output size
        while (parts.size() > 1) {
            std::vector<std::vector<Term>> next;
            next.reserve((parts.size() + 1) / 2);
            for (size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(merge_consume(std::move(parts[i]), std::move(parts[i + 1])));
            if (parts.size() % 2) next.push_back(std::move(parts.back()));
            parts = std::move(next);
        }
        return Poly::from_sorted(out_n_, parts.empty() ? std::vector<Term>{} : std::move(parts[0]), f_);
    }

    static constexpr size_t kHornerMax = 16;

    const std::vector<Poly>& img_;
    int out_n_;
    Field f_;
    std::vector<std::vector<Poly>> pow_;
    std::vector<bool> ident_;
};

}  // namespace

Poly substitute(const Poly& p, const std::vector<Poly>& images) {
    if (images.size() > static_cast<size_t>(p.nvars()))
        throw DimensionMismatch("more images than variables");
    int out_n = p.nvars();
    Field f = p.field();
    int img_n = -1;
    for (auto& q : images) {
        if (img_n >= 0 && q.nvars() != img_n) throw DimensionMismatch("images of different dimensions");
        img_n = q.nvars();
        f = join(f, q.field());
    }
    if (img_n > out_n) out_n = img_n;
    std::vector<Poly> img;
    img.reserve(images.size());
    for (auto& q : images) img.push_back(q.nvars() == out_n ? q : q.widen(out_n));

    bool all_mono = true;
    for (auto& q : img)
        if (q.size() != 1) all_mono = false;
    if (all_mono) {
        std::vector<Term> out;
        out.reserve(p.size());
        for (auto& t : p.terms()) {
            Term r{Monomial{}, t.c};
            for (size_t v = 0; v < img.size(); ++v) {
                int k = t.m.e[v];
                if (!k) continue;
                const auto& lt = img[v].leading();
                for (int i = 0; i < kMaxVars; ++i) r.m.e[i] += lt.m.e[i] * k;
                if (!lt.c.is_one()) r.c *= lt.c.pow(k);
            }
            for (int i = static_cast<int>(img.size()); i < kMaxVars; ++i) r.m.e[i] += t.m.e[i];
            out.push_back(std::move(r));
        }
        return Poly::from_terms(out_n, std::move(out), f);
    }
    Substituter s(img, out_n, f);
    return s.run(p.terms());
}

long add_degrees(long a, long b) {
    if (a == kNegInf || b == kNegInf) return kNegInf;
    return a + b;
}

long weighted_degree(const Poly& p, const WeightVector& w) {
    if (static_cast<int>(w.size()) > p.nvars()) throw DimensionMismatch("weight vector longer than dimension");
    long best = kNegInf;
    for (auto& t : p.terms()) {
        long d = 0;
        for (size_t i = 0; i < w.size(); ++i) d += w[i] * t.m.e[i];
        best = std::max(best, d);
    }
    return best;
}

Poly partial_derivative(const Poly& p, int var) {
    if (var < 0 || var >= p.nvars()) throw DimensionMismatch("derivative index out of range");
    std::vector<Term> out;
    out.reserve(p.size());
    for (auto& t : p.terms()) {
        int k = t.m.e[var];
        if (!k) continue;
        Term r = t;
        r.m.e[var] = k - 1;
        r.c *= Scalar(k);
        out.push_back(std::move(r));
    }
    return Poly::from_terms(p.nvars(), std::move(out), p.field());
}

Poly shift_var(const Poly& p, int var, const Scalar& c) {
    if (var < 0 || var >= p.nvars()) throw DimensionMismatch("variable index out of range");
    std::vector<Poly> img;
    for (int i = 0; i <= var; ++i) img.push_back(Poly::var(p.nvars(), i));
    img[var] += Poly::constant(p.nvars(), c);
    return substitute(p, img);
}

Poly evaluate_var(const Poly& p, int var, const Scalar& c) {
    if (var < 0 || var >= p.nvars()) throw DimensionMismatch("variable index out of range");
    std::vector<Term> out;
    out.reserve(p.size());
    for (auto& t : p.terms()) {
        Term r = t;
        int k = r.m.e[var];
        r.m.e[var] = 0;
        if (k) r.c *= c.pow(k);
        if (!r.c.is_zero()) out.push_back(std::move(r));
    }
    return Poly::from_terms(p.nvars(), std::move(out), join(p.field(), c.field()));
}

Poly finite_difference(const Poly& p, int var) { return shift_var(p, var, Scalar(1)) - p; }

}  // namespace cotame
