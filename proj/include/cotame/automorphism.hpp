#pragma once

#include <string>
#include <vector>

#include "cotame/endo.hpp"
#include "cotame/lnd.hpp"

namespace cotame {

struct TriangularData {
    std::vector<Scalar> units;
    std::vector<Poly> tails;  // tails[i] ∈ K[x_1..x_{i-1}]
};

// throws PreconditionError unless component i is u_i x_i + P_i(x_1..x_{i-1}), u_i ≠ 0
TriangularData triangular_data(const Endo& e);
bool is_triangular(const Endo& e);
Endo triangular_endo(const TriangularData& d);
// back-substitution
TriangularData triangular_inverse(const TriangularData& d);

class GeneratorToken {
   public:
    enum class Kind { Affine, Triangular, Permutation, ExpFD };

    static GeneratorToken affine(const Matrix& m, const std::vector<Scalar>& v);
    static GeneratorToken affine(const Endo& e);
    static GeneratorToken triangular(const TriangularData& d);
    static GeneratorToken triangular(const Endo& e);
    // (x_i) -> x_{sigma[i]}
    static GeneratorToken permutation(const std::vector<int>& sigma);
    static GeneratorToken exp_fd(const TriangularDerivation& d, const Poly& f);
    // InverseOf(this)
    GeneratorToken inverted() const;

    Kind kind() const { return kind_; }
    bool is_inverse() const { return inv_; }
    int dim() const { return n_; }
    const Matrix& matrix() const { return m_; }
    const std::vector<Scalar>& vector() const { return v_; }
    const TriangularData& triangular_data() const { return tri_; }
    const std::vector<int>& sigma() const { return sigma_; }
    const TriangularDerivation& derivation() const { return d_; }
    const Poly& kernel_element() const { return f_; }

    // the token without its InverseOf flag
    GeneratorToken base() const;

   private:
    GeneratorToken() = default;
    Kind kind_ = Kind::Affine;
    bool inv_ = false;
    int n_ = 0;
    Matrix m_;
    std::vector<Scalar> v_;
    TriangularData tri_;
    std::vector<int> sigma_;
    TriangularDerivation d_;
    Poly f_;
};

// exact inverse as a plain token (no InverseOf flag)
GeneratorToken invert_token(const GeneratorToken& t);
Endo flatten(const GeneratorToken& t);

struct AutoWord {
    int n = 0;
    std::vector<GeneratorToken> tokens;

    AutoWord() = default;
    explicit AutoWord(int dim) : n(dim) {}
    AutoWord(int dim, std::vector<GeneratorToken> toks);
    AutoWord& push(const GeneratorToken& t);
    AutoWord& append(const AutoWord& w);
    size_t size() const { return tokens.size(); }
};

AutoWord inverse(const AutoWord& w);
AutoWord concat(const AutoWord& a, const AutoWord& b);
// left to right; the empty word flattens to the identity
struct WordSegment {
    Endo map;
    Endo inv;  // empty when triangular
    bool triangular = false;
};
// g⁻¹ · t · g, i.e. compose(compose(g⁻¹, t), g); for lower triangular g this solves g(R) = t(g) row by row
// instead of substituting into g⁻¹. t may carry extra trailing variables.
Endo conjugate_segment(const WordSegment& g, const Endo& t);
// same for a lower triangular map given directly
Endo conjugate_by_triangular(const Endo& g, const Endo& t);
// flattened tokens with their inverses; each run of affine tokens becomes one map, identities dropped
std::vector<WordSegment> flatten_segments(const AutoWord& w);
Endo flatten(const AutoWord& w);
bool verify_automorphism(const AutoWord& w);

struct Classification {
    bool identity = false;
    bool translation = false;
    bool affine = false;
    bool linear = false;
    bool triangular = false;
    bool permutation = false;
    bool parabolic = false;

    std::vector<std::string> labels() const;
};

Classification classify(const Endo& e);
bool is_parabolic(const Endo& e);
bool is_translation(const Endo& e);

struct AffineNormalization {
    Endo alpha1;
    Endo core;
    Endo alpha2;
};
// e = alpha1 · core · alpha2, core with identity affine part
AffineNormalization affine_normalize(const Endo& e);

}  // namespace cotame
