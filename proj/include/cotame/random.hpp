#pragma once

#include <random>

#include "cotame/degeneracy.hpp"

namespace cotame {

using Rng = std::mt19937_64;

// small nonzero rational, numerator in [-bound, bound], denominator in [1, den]
Scalar random_scalar(Rng& rng, int bound = 5, int den = 3);
Scalar random_nonzero_integer(Rng& rng, int bound = 5);
// random polynomial in variables [first, last) of an nvars-dimensional ring,
// up to `terms` terms with total degree in [mindeg, maxdeg]
Poly random_poly(Rng& rng, int nvars, int first, int last, int mindeg, int maxdeg, int terms);
// random invertible matrix with small integer entries
Matrix random_invertible(Rng& rng, int n, int bound = 2);
// random triangular map, tails of degree ≤ maxdeg with at most `terms` terms
Endo random_triangular(Rng& rng, int n, int maxdeg, int terms, bool unit_diag = false);
// random triangular derivation with images of degree ≤ maxdeg
TriangularDerivation random_triangular_derivation(Rng& rng, int n, int maxdeg, int terms);

// random TTD parameters; d_k ∈ {0,1}, b_k small rationals
TTDParams random_ttd_params(Rng& rng, int n);
// (x1, …, x_n + P(x_1..x_{n-1})) conjugated by the reversal, i.e. (x1 + G(x2..xn), x2, …, xn)
AutoWord upper_shear_word(const Poly& p_lower, int n);

// A word V = λ·τ⁻¹·γ·μ·ρ from random factors; its inverse is translation degenerate in x_r.
struct TDInstance {
    AutoWord phi;  // inverse(V)
    AutoWord v;
    int r = 0;
};
TDInstance random_td_instance(Rng& rng, int n, int maxdeg);

// random affine automorphism
Endo random_affine(Rng& rng, int n);
// (base, a x_n + P(x_1..x_{n-1})) with the base triangular or affine, as a token word
AutoWord random_parabolic_word(Rng& rng, int n, int maxdeg, int terms);
// α0 τ1 α1 τ2 α2 τ3 α3; each τk gets its own degree bound drawn from 1..maxdeg, and words whose
// τ-degrees multiply past max_product are redrawn (0: no limit)
AutoWord random_3triangular_word(Rng& rng, int n, int maxdeg, int terms, long max_product = 0);

// D = (0, p(x1), q(x1), …) and F a polynomial in x1 and q x2 − p x3
struct ExpInstance {
    AutoWord psi1, psi2;
    TriangularDerivation d;
    Poly f;
};
ExpInstance random_exp_instance(Rng& rng, int n, int maxdeg);

}  // namespace cotame
