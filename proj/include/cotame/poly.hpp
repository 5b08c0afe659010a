#pragma once

#include <array>
#include <climits>
#include <cstdint>
#include <string>
#include <vector>

#include "cotame/scalar.hpp"

namespace cotame {

// n ≤ 7 plus room for the formal parameter t
constexpr int kMaxVars = 8;

struct Monomial {
    std::array<uint16_t, kMaxVars> e{};

    int degree() const {
        int d = 0;
        for (auto x : e) d += x;
        return d;
    }
    uint16_t operator[](int i) const { return e[i]; }
    uint16_t& operator[](int i) { return e[i]; }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e != b.e; }
    Monomial operator*(const Monomial& o) const {
        Monomial r;
        for (int i = 0; i < kMaxVars; ++i) r.e[i] = e[i] + o.e[i];
        return r;
    }
    bool divisible_by(const Monomial& o) const {
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i] < o.e[i]) return false;
        return true;
    }
};

// graded lex, x1 > x2 > ...; true when a comes strictly before b
bool grlex_greater(const Monomial& a, const Monomial& b);

struct MonomialHash {
    size_t operator()(const Monomial& m) const;
};

struct Term {
    Monomial m;
    Scalar c;
};

constexpr long kNegInf = LONG_MIN;

class Poly {
   public:
    Poly() = default;
    explicit Poly(int nvars, const Field& f = nullptr) : n_(nvars), f_(f) { check_n(); }

    static Poly constant(int nvars, const Scalar& c);
    static Poly var(int nvars, int i, const Field& f = nullptr);
    static Poly monomial(int nvars, const Monomial& m, const Scalar& c);
    // terms in any order, repeated monomials combined
    static Poly from_terms(int nvars, std::vector<Term> terms, const Field& f = nullptr);
    // terms already strictly grlex-descending and nonzero
    static Poly from_sorted(int nvars, std::vector<Term> terms, const Field& f);

    int nvars() const { return n_; }
    const Field& field() const { return f_; }
    std::vector<Term> release_terms() && { return std::move(t_); }
    const std::vector<Term>& terms() const { return t_; }
    size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return t_.size() == 1; }
    Scalar constant_term() const;
    Scalar coeff(const Monomial& m) const;
    const Term& leading() const { return t_.front(); }
    // −∞ (kNegInf) for zero
    long total_degree() const;
    long degree_in(int var) const;
    bool depends_on(int var) const;
    // highest variable index occurring, -1 for constants
    int max_var() const;

    Poly widen(int nvars) const;
    Poly with_field(const Field& f) const;
    // keep terms whose total degree is in [lo, hi]
    Poly degree_part(long lo, long hi) const;
    // coefficient of var^k as a polynomial in the other variables
    Poly coeff_in(int var, int k) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly scaled(const Scalar& c) const;
    Poly shifted(const Monomial& m) const;
    Poly pow(int e) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

   private:
    void check_n() const;

    int n_ = 0;
    std::vector<Term> t_;
    Field f_;
};

Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);

// (p) with x_i -> images[i]; variables of p past images.size() are left alone.
// The result has max(p.nvars(), images' nvars) variables.
Poly substitute(const Poly& p, const std::vector<Poly>& images);

using WeightVector = std::vector<long>;
long weighted_degree(const Poly& p, const WeightVector& w);
long add_degrees(long a, long b);

Poly partial_derivative(const Poly& p, int var);
// (p)θ_{var,1} − p
Poly finite_difference(const Poly& p, int var);
// substitute var -> var + c
Poly shift_var(const Poly& p, int var, const Scalar& c);
// specialize var to a constant
Poly evaluate_var(const Poly& p, int var, const Scalar& c);

}  // namespace cotame
