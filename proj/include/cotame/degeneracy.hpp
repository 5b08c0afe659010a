#pragma once

#include <optional>

#include <vector>

#include "cotame/automorphism.hpp"

namespace cotame {

// b[0] = 1 and d[0] = 0 are stored but fixed; d[k] ∈ {0, 1}
struct TTDParams {
    std::vector<Scalar> b;
    std::vector<int> d;

    static TTDParams make(int n);
    int dim() const { return static_cast<int>(b.size()); }
    // d_{j,k} = d_j ⋯ d_k (1 when k < j), 1-based indices as in the TTD formula
    int dprod(int j, int k) const;
};

struct LinearSystemData {
    Matrix A;
    std::vector<Scalar> B;
};

struct TDTest {
    bool degenerate = false;
    // φ⁻¹θ_{r,t}φ with t as variable n (0-based)
    Endo conjugate;
    // max t-degree among coefficients of terms of x-degree ≥ 2
    long t_bound = 0;
};

// conjugate of θ_{r,t} through the word, computed token by token from the inside out
Endo conjugate_translation_t(const AutoWord& w, int r);
TDTest td_test_detail(const AutoWord& w, int r);
bool td_test(const AutoWord& w, int r);
// the c that nonaffine_constant would pick, or nothing when w is TD in x_r; tries c = 1 concretely first
std::optional<Scalar> choose_translation_constant(const AutoWord& w, int r);
// first c ∈ {1, …, t_bound + 1} making the specialized conjugate non-affine; throws if degenerate
Scalar nonaffine_constant(const TDTest& t);
// specialize t -> c and drop the parameter variable
Endo specialize_t(const Endo& e, int n, const Scalar& c);

// ∂H_i/∂x1 = Σ a_ij H_j + b_i where (H_1..H_n) = flatten(w⁻¹)
LinearSystemData extract_linear_system(const AutoWord& w);
LinearSystemData extract_linear_system_from(const Endo& h);

struct JordanResult {
    Endo lambda;
    // (x_i)λ⁻¹ = Σ L_ik x_k, so the new system is (L A L⁻¹, L B)
    Matrix L;
    LinearSystemData data;
};
JordanResult jordan_normalize(const AutoWord& w);
JordanResult jordan_normalize_system(const LinearSystemData& sys);

Endo ttd_build(const TTDParams& p);
// ν · exp(−x1 D) with D(x_k) = d_k x_{k−1} + b_k for k ≥ 2, D(x1) = 0
Endo ttd_build_via_exp(const TTDParams& p);
bool is_jordan_form(const LinearSystemData& s);

struct Elimination {
    Endo tau;
    TTDParams params;
    // G[0] = H_1; G[k] free of x1 for k ≥ 1
    std::vector<Poly> G;
};
// w already normalized: its extracted system is in Jordan form with b₁ = 1
Elimination eliminate_x1(const AutoWord& w);
Elimination eliminate_x1_from(const Endo& h, const LinearSystemData& sys);

struct TDFactorization {
    int r = 0;
    Endo lambda;
    std::vector<int> rho;
    Endo tau;
    TTDParams params;
    Endo gamma;
    Endo mu;
    LinearSystemData data;  // Jordan-normalized system
    LinearSystemData raw;   // system before normalization
    std::vector<Poly> G;
};
// φ⁻¹ = λ τ⁻¹ γ μ ρ for φ = flatten(w), degenerate in x_r
TDFactorization factorize_td(const AutoWord& w, int r);
// λ τ⁻¹ γ μ ρ flattened
Endo recompose(const TDFactorization& f);

}  // namespace cotame
