#pragma once

#include <gmpxx.h>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cotame {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct RingMismatch : Error {
    using Error::Error;
};
struct PreconditionError : Error {
    using Error::Error;
};
struct NotDegenerate : Error {
    using Error::Error;
};
// A loop exceeded its documented bound.
struct InternalError : Error {
    using Error::Error;
};

// Q[u]/(p(u)), p monic. Irreducibility is the caller's promise.
class NumberField {
   public:
    // coefficients of p, lowest degree first; leading one must be 1
    explicit NumberField(std::vector<mpq_class> modulus);

    int degree() const { return static_cast<int>(p_.size()) - 1; }
    const std::vector<mpq_class>& modulus() const { return p_; }
    std::string str() const;
    bool same_as(const NumberField& o) const { return p_ == o.p_; }

   private:
    std::vector<mpq_class> p_;
};

using Field = std::shared_ptr<const NumberField>;

Field make_field(std::vector<mpq_class> modulus);
Field cyclotomic5();
// null stands for Q; throws RingMismatch on two different extensions
Field join(const Field& a, const Field& b);
bool same_field(const Field& a, const Field& b);

class Scalar {
   public:
    Scalar() = default;
    Scalar(long v) : c0_(v) {}
    Scalar(int v) : c0_(v) {}
    Scalar(const mpq_class& q) : c0_(q) { c0_.canonicalize(); }
    Scalar(long num, long den);

    static Scalar generator(const Field& f);
    static Scalar from_coeffs(const Field& f, std::vector<mpq_class> c);

    bool is_zero() const { return hi_.empty() && sgn(c0_) == 0; }
    bool is_one() const { return hi_.empty() && c0_ == 1; }
    bool is_rational() const { return hi_.empty(); }
    const mpq_class& rational() const;
    const Field& field() const { return f_; }
    // u-adic coefficients, lowest first, trailing zeros trimmed (at least one entry)
    std::vector<mpq_class> coeffs() const;
    Scalar with_field(const Field& f) const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }
    Scalar inverse() const;
    Scalar pow(long e) const;
    // *this += a * b without temporaries on the rational path
    void add_product(const Scalar& a, const Scalar& b);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.c0_ == b.c0_ && a.hi_ == b.hi_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // rational: "3", "-1/2"; otherwise a polynomial in u, e.g. "u^2 - 1/2*u + 3"
    std::string str() const;
    // str() wrapped in parentheses when it has more than one term
    std::string str_factor() const;
    bool needs_parens() const;
    bool is_negative_rational() const { return hi_.empty() && sgn(c0_) < 0; }

   private:
    void trim();

    mpq_class c0_;
    std::vector<mpq_class> hi_;
    Field f_;
};

std::string rational_str(const mpq_class& q);

}  // namespace cotame
