#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cotame/degeneracy.hpp"

namespace cotame {

using DegVector = std::vector<long>;

// (deg_{x_r} (x_1)τ, …, deg_{x_r} (x_n)τ)
DegVector d_r_vector(const Endo& tau, int r);
bool lex_less(const DegVector& a, const DegVector& b);
DegVector unit_vector(int n, int r);
// τ⁻¹θτ; requires θ a translation whose first moved coordinate is r and d_r(τ) >_lex e_r
Endo conjugate_descent_step(const Endo& tau, const Endo& theta);

// w_1 = 1, w_i = max(1, weighted degree of the tail of (x_i)τ under (w_1, …, w_{i−1}))
DegVector triangular_weights(const Endo& tau);
// every entry drops to at most max(1, w_i − 1), and at least one drops
bool weights_descend(const DegVector& before, const DegVector& after);

enum class Pattern {
    ConjugateByAffine,          // left · M · right
    CommutatorWithAffine,       // left · M⁻¹ · inner · M
    CommutatorWithTranslation,  // same shape, translations only
    TDFactorRoute,              // λ⁻¹ · M⁻¹ · ρ⁻¹ inner ρ · M · λ
    LambdaConstruction,         // M⁻¹ · λ · M
    CaseSplit,                  // M itself, re-represented
};
std::string pattern_name(Pattern p);
Pattern parse_pattern(const std::string& s);

struct ReductionStep {
    Pattern pattern = Pattern::CaseSplit;
    // affine maps by role: "left", "right", "inner", "lambda", "perm"
    std::vector<std::pair<std::string, Endo>> params;
    // scalars recorded for the reader (c, a, g, …); not used by replay
    std::vector<std::pair<std::string, Scalar>> scalars;
    std::string claim;
    // a word equal to the new map, used as the base for the next step
    AutoWord result;
    std::string digest;

    const Endo* param(const std::string& key) const;
};

enum class TerminalKind { Affine, DerksenEquivalent };

struct ReductionTrace {
    std::string family;
    Field field;
    AutoWord input;
    std::vector<ReductionStep> steps;
    TerminalKind terminal = TerminalKind::Affine;
    // final map = alpha1 · (x1 + x2², x2, …, xn) · alpha2
    Endo alpha1, alpha2;

    const AutoWord& final_word() const { return steps.empty() ? input : steps.back().result; }
};

// FNV-1a 64 over the canonical text of the map
std::string endo_digest(const Endo& e);
// FNV-1a 64 over the previous digest, the map text, the claim and the recorded scalars;
// the first step chains from endo_digest of the input map
std::string step_digest(const ReductionStep& s, const Endo& map, const std::string& previous);
Endo derksen_map(int n);
// W⁻¹ · a · W computed token by token
Endo conjugate_by_word(const Endo& a, const AutoWord& w);
Endo replay_step(const ReductionStep& s, const AutoWord& prev);
// same, reusing prev_map = flatten(prev)
Endo replay_step(const ReductionStep& s, const AutoWord& prev, const Endo& prev_map);

struct TerminalShape {
    int j = -1, i = -1;
    Scalar q2, q1, q0;  // (x_j) ↦ x_j + q2 x_i² + q1 x_i + q0
};
// identity except one component x_j + q(x_i), q quadratic; false otherwise
bool terminal_shape(const Endo& e, TerminalShape* out = nullptr);
// α1, α2 with α1 · derksen · α2 = e
std::pair<Endo, Endo> derksen_witness(const Endo& e);

struct EngineOptions {
    long max_steps = 20000;
    // replay every step while building; verify_trace does the same work afterwards
    bool self_check = false;
};

ReductionTrace reduce_triangular(const AutoWord& w, const EngineOptions& o = {});
ReductionTrace reduce_triangular(const Endo& tau, const EngineOptions& o = {});
ReductionTrace reduce_parabolic(const AutoWord& w, const EngineOptions& o = {});
// the base (x_1..x_{n-1} part) must be triangular or affine
ReductionTrace reduce_parabolic(const Endo& psi, const EngineOptions& o = {});
ReductionTrace reduce_biparabolic(const AutoWord& psi1, const Endo& alpha, const AutoWord& psi2,
                                  const EngineOptions& o = {});
ReductionTrace reduce_3triangular(const AutoWord& w, const EngineOptions& o = {});
ReductionTrace reduce_exp(const AutoWord& psi1, const TriangularDerivation& d, const Poly& f, const AutoWord& psi2,
                          const EngineOptions& o = {});
ReductionTrace reduce_td(const AutoWord& w, int r, const EngineOptions& o = {});

// token word for an Endo: triangular, affine, or parabolic with triangular/affine base
AutoWord word_for(const Endo& e);

struct LambdaResult {
    Endo lambda;
    // w[0] = w_1, …, w[n-2] = w_{n-1}
    std::vector<Scalar> w;
    Endo lambda_tilde;  // τ λ τ⁻¹
};
std::vector<Scalar> w_sequence(const TTDParams& p);
// the closed form of τλτ⁻¹
Endo lambda_tilde_formula(const TTDParams& p, const Scalar& a, const Scalar& g);
LambdaResult lambda_construct(const TTDParams& p, const Scalar& a, const Scalar& g);

struct TraceCheck {
    bool ok = false;
    std::string message;
};
TraceCheck check_trace(const ReductionTrace& t);
bool verify_trace(const ReductionTrace& t);

std::string trace_to_json(const ReductionTrace& t);
ReductionTrace trace_from_json(const std::string& text);

}  // namespace cotame
