#pragma once

#include <string>
#include <vector>

#include "cotame/matrix.hpp"
#include "cotame/poly.hpp"
#include "cotame/poly_io.hpp"

namespace cotame {

// Polynomial endomorphism as its component tuple: component i is (x_i)φ.
// Components may carry extra inert variables (the parameter t).
class Endo {
   public:
    Endo() = default;
    explicit Endo(std::vector<Poly> comps);
    static Endo identity(int n, int nvars = -1);

    int dim() const { return static_cast<int>(c_.size()); }
    int nvars() const { return c_.empty() ? 0 : c_[0].nvars(); }
    const Poly& operator[](int i) const { return c_[i]; }
    const std::vector<Poly>& components() const { return c_; }
    Field field() const;

    bool is_identity() const;
    long degree() const;
    size_t term_count() const;
    Endo widen(int nvars) const;
    // degree ≤ 1 part of every component
    Endo affine_part() const;

    friend bool operator==(const Endo& a, const Endo& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Endo& a, const Endo& b) { return !(a == b); }

   private:
    std::vector<Poly> c_;
};

// a then b: (x_i)(ab) = ((x_i)a)b
Endo compose(const Endo& a, const Endo& b);
Endo compose_all(const std::vector<Endo>& seq);

bool is_affine(const Endo& e);
// total degree ≤ 1 in the first n variables only (t may appear freely)
bool is_affine_in_x(const Endo& e);
Matrix linear_part(const Endo& e);
std::vector<Scalar> constant_part(const Endo& e);
Endo affine_endo(const Matrix& m, const std::vector<Scalar>& v);
Endo affine_inverse(const Endo& e);
Endo translation(int n, int var, const Scalar& c);
Endo swap_vars(int n, int i, int j);
// (x_i) -> x_{sigma[i]}
Endo permutation_endo(const std::vector<int>& sigma);

Endo parse_endo(const std::string& text, const VarContext& ctx);
std::string to_string(const Endo& e, const VarContext& ctx);
std::string to_string(const Endo& e);
VarContext context_for(const Endo& e);

}  // namespace cotame
