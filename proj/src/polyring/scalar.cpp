#include "cotame/scalar.hpp"

#include <sstream>

namespace cotame {

namespace {

using QVec = std::vector<mpq_class>;

void trim_vec(QVec& v) {
    while (!v.empty() && sgn(v.back()) == 0) v.pop_back();
}

QVec poly_mul(const QVec& a, const QVec& b) {
    if (a.empty() || b.empty()) return {};
    QVec r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim_vec(r);
    return r;
}

// remainder modulo a monic p
void reduce_mod(QVec& a, const QVec& p) {
    const size_t d = p.size() - 1;
    for (size_t k = a.size(); k-- > d;) {
        if (sgn(a[k]) == 0) continue;
        mpq_class c = a[k];
        for (size_t i = 0; i <= d; ++i) a[k - d + i] -= c * p[i];
    }
    if (a.size() > d) a.resize(d);
    trim_vec(a);
}

// quotient and remainder of general division
void poly_divmod(const QVec& a, const QVec& b, QVec& q, QVec& r) {
    r = a;
    trim_vec(r);
    q.clear();
    if (r.size() < b.size()) return;
    q.assign(r.size() - b.size() + 1, mpq_class(0));
    const mpq_class& lead = b.back();
    while (r.size() >= b.size()) {
        size_t shift = r.size() - b.size();
        mpq_class c = r.back() / lead;
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) r[shift + i] -= c * b[i];
        trim_vec(r);
    }
    trim_vec(q);
}

QVec poly_sub(const QVec& a, const QVec& b) {
    QVec r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim_vec(r);
    return r;
}

std::string qvec_str(const QVec& c) {
    std::string out;
    bool first = true;
    for (size_t k = c.size(); k-- > 0;) {
        if (sgn(c[k]) == 0) continue;
        mpq_class a = c[k];
        bool neg = sgn(a) < 0;
        if (neg) a = -a;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        std::string mono = k == 0 ? "" : (k == 1 ? "u" : "u^" + std::to_string(k));
        if (mono.empty()) {
            out += rational_str(a);
        } else if (a == 1) {
            out += mono;
        } else {
            out += rational_str(a) + "*" + mono;
        }
    }
    return first ? "0" : out;
}

}  // namespace

std::string rational_str(const mpq_class& q) { return q.get_str(); }

NumberField::NumberField(QVec modulus) : p_(std::move(modulus)) {
    trim_vec(p_);
    if (p_.size() < 2) throw PreconditionError("field modulus must have degree at least 1");
    if (p_.back() != 1) throw PreconditionError("field modulus must be monic");
}

std::string NumberField::str() const { return qvec_str(p_); }

Field make_field(QVec modulus) { return std::make_shared<const NumberField>(std::move(modulus)); }

Field cyclotomic5() { return make_field({1, 1, 1, 1, 1}); }

bool same_field(const Field& a, const Field& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->same_as(*b);
}

Field join(const Field& a, const Field& b) {
    if (!a) return b;
    if (!b) return a;
    if (a == b || a->same_as(*b)) return a;
    throw RingMismatch("operands live in different coefficient rings");
}

Scalar::Scalar(long num, long den) : c0_(num, den) {
    if (den == 0) throw PreconditionError("zero denominator");
    c0_.canonicalize();
}

Scalar Scalar::generator(const Field& f) {
    if (!f) throw PreconditionError("u needs an extension field");
    return from_coeffs(f, {0, 1});
}

Scalar Scalar::from_coeffs(const Field& f, QVec c) {
    if (f) reduce_mod(c, f->modulus());
    else if (c.size() > 1) {
        trim_vec(c);
        if (c.size() > 1) throw PreconditionError("u needs an extension field");
    }
    Scalar s;
    s.f_ = f;
    if (!c.empty()) s.c0_ = c[0];
    s.hi_.assign(c.size() > 1 ? c.begin() + 1 : c.end(), c.end());
    s.trim();
    return s;
}

const mpq_class& Scalar::rational() const {
    if (!hi_.empty()) throw PreconditionError("scalar is not rational");
    return c0_;
}

QVec Scalar::coeffs() const {
    QVec c;
    c.reserve(hi_.size() + 1);
    c.push_back(c0_);
    c.insert(c.end(), hi_.begin(), hi_.end());
    return c;
}

Scalar Scalar::with_field(const Field& f) const {
    Scalar s = *this;
    s.f_ = join(f_, f);
    return s;
}

void Scalar::trim() {
    while (!hi_.empty() && sgn(hi_.back()) == 0) hi_.pop_back();
}

Scalar Scalar::operator-() const {
    Scalar s = *this;
    s.c0_ = -s.c0_;
    for (auto& h : s.hi_) h = -h;
    return s;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    if (o.f_ && f_ != o.f_) f_ = join(f_, o.f_);
    c0_ += o.c0_;
    if (!o.hi_.empty()) {
        if (hi_.size() < o.hi_.size()) hi_.resize(o.hi_.size());
        for (size_t i = 0; i < o.hi_.size(); ++i) hi_[i] += o.hi_[i];
        trim();
    }
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    if (o.f_ && f_ != o.f_) f_ = join(f_, o.f_);
    c0_ -= o.c0_;
    if (!o.hi_.empty()) {
        if (hi_.size() < o.hi_.size()) hi_.resize(o.hi_.size());
        for (size_t i = 0; i < o.hi_.size(); ++i) hi_[i] -= o.hi_[i];
        trim();
    }
    return *this;
}

void Scalar::add_product(const Scalar& a, const Scalar& b) {
    if (a.hi_.empty() && b.hi_.empty() && hi_.empty()) {
        if (a.f_ && f_ != a.f_) f_ = join(f_, a.f_);
        if (b.f_ && f_ != b.f_) f_ = join(f_, b.f_);
        thread_local mpq_class tmp;
        mpq_mul(tmp.get_mpq_t(), a.c0_.get_mpq_t(), b.c0_.get_mpq_t());
        mpq_add(c0_.get_mpq_t(), c0_.get_mpq_t(), tmp.get_mpq_t());
        return;
    }
    *this += a * b;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    if (o.f_ && f_ != o.f_) f_ = join(f_, o.f_);
    if (hi_.empty() && o.hi_.empty()) {
        c0_ *= o.c0_;
        return *this;
    }
    if (o.hi_.empty()) {
        c0_ *= o.c0_;
        for (auto& h : hi_) h *= o.c0_;
        trim();
        return *this;
    }
    if (hi_.empty()) {
        mpq_class k = c0_;
        c0_ = o.c0_ * k;
        hi_ = o.hi_;
        for (auto& h : hi_) h *= k;
        trim();
        return *this;
    }
    QVec r = poly_mul(coeffs(), o.coeffs());
    reduce_mod(r, f_->modulus());
    *this = from_coeffs(f_, std::move(r));
    return *this;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw PreconditionError("division by zero");
    if (hi_.empty()) {
        Scalar s;
        s.f_ = f_;
        s.c0_ = 1 / c0_;
        return s;
    }
    // extended Euclid: find s with s*a = 1 mod p
    QVec r0 = f_->modulus(), r1 = coeffs();
    QVec s0, s1 = {mpq_class(1)};
    while (!(r1.size() == 1)) {
        if (r1.empty()) throw PreconditionError("element is not invertible (modulus reducible?)");
        QVec q, r;
        poly_divmod(r0, r1, q, r);
        QVec s = poly_sub(s0, poly_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    mpq_class c = 1 / r1[0];
    for (auto& x : s1) x *= c;
    return from_coeffs(f_, std::move(s1));
}

Scalar Scalar::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar result(1), base = *this;
    result.f_ = f_;
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

bool Scalar::needs_parens() const {
    if (hi_.empty()) return false;
    int nz = sgn(c0_) != 0 ? 1 : 0;
    for (auto& h : hi_) nz += sgn(h) != 0;
    return nz > 1;
}

std::string Scalar::str() const {
    if (hi_.empty()) return rational_str(c0_);
    return qvec_str(coeffs());
}

std::string Scalar::str_factor() const {
    std::string s = str();
    return needs_parens() ? "(" + s + ")" : s;
}

}  // namespace cotame
