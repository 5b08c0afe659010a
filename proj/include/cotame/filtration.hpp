#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cotame/automorphism.hpp"

namespace cotame {

// exponents of x, y, z
struct ExpTriple {
    long i = 0, j = 0, k = 0;

    ExpTriple operator+(const ExpTriple& o) const { return {i + o.i, j + o.j, k + o.k}; }
    ExpTriple times(long s) const { return {s * i, s * j, s * k}; }
    friend bool operator==(const ExpTriple& a, const ExpTriple& b) = default;
};
std::string to_string(const ExpTriple& v);

// v ≤₂ w iff (−i, j, k) ≤_lex for w; the only place the order is defined
struct Order2 {
    static bool less(const ExpTriple& v, const ExpTriple& w);
    static bool less_equal(const ExpTriple& v, const ExpTriple& w) { return v == w || less(v, w); }
};

// ≤₂-maximum of the support; p must be a nonzero polynomial in 3 variables
ExpTriple ldeg2(const Poly& p);

struct QStarIndex {
    long m = 1, n = 0;
    friend bool operator==(const QStarIndex&, const QStarIndex&) = default;
};
long deg110(const Poly& p);
long deg331(const Poly& p);
// deg_(1,1,0) ≤ m, deg_(3,3,1) ≤ 3m + n and ldeg2 = (0, m, n)
bool qstar_member(const Poly& p, const QStarIndex& idx);

struct Generators {
    AutoWord beta, pi;
};
// β = (x + y²(y + z²)², y + z², z), π = (y, x, z)
Generators build_generators();
// (πβ)^N π (πβ)^{−N}
AutoWord theta_word(int N);
// (πβ⁻¹)^N α π (πβ)^N
AutoWord conjugated_alpha_word(int N, const Endo& alpha);

struct GammaParams {
    Scalar u, c, d;
};
std::string to_string(const GammaParams& p);
// (u⁸x + cz + d, u²y, uz)
Endo gamma_alpha(const GammaParams& p);
// β⁻¹ π β⁻¹ α β π β
AutoWord gamma_word(const GammaParams& p);

// Literal reproduces the printed coefficients; Corrected is the exact expansion
enum class Transcription { Corrected, Literal };

// X = x_coeff·x + Σ y_coeff[k]·y^k, every coefficient a polynomial in z
struct XExpansion {
    Poly x_coeff;
    std::vector<Poly> y_coeff;  // k = 0..4
};
XExpansion x_expansion(const GammaParams& p, Transcription t = Transcription::Corrected);
Poly assemble(const XExpansion& e);
// the same split taken from an actual X
XExpansion split_x(const Poly& X);

struct GammaForms {
    Endo gamma;  // flattened word
    Poly X, Y, Z, Z1, Z2;
    Endo factored;
    XExpansion expansion;
};
GammaForms gamma_closed_form(const GammaParams& p, Transcription t = Transcription::Corrected);

struct ReportLine {
    std::string name;
    bool ok = false;
    std::string detail;
};
struct Report {
    std::vector<ReportLine> lines;

    void add(std::string name, bool ok, std::string detail = "");
    void append(const Report& r, const std::string& prefix = "");
    bool ok() const;
    size_t failures() const;
    // "name: pass|FAIL detail" lines, then a summary footer
    std::string text() const;
};

// factored and expanded forms against the flattened word; one line per coefficient for the expansion
Report check_gamma(const GammaForms& g);

enum class CaseTag { A, B2, B1, B0 };
std::string case_name(CaseTag t);
// throws PreconditionError when u = 0 or u⁶ = 1, c = d = 0
CaseTag case_classify(const GammaParams& p);
// l in the B(l) rows
int case_l(CaseTag t);

struct DegreeStats {
    long d110 = 0, d331 = 0;
    ExpTriple ldeg;
    friend bool operator==(const DegreeStats&, const DegreeStats&) = default;
};
DegreeStats degree_stats(const Poly& p);
Report verify_degree_table(const GammaParams& p);

enum class StabilityMode { Lattice, Samples };
struct StabilityOptions {
    StabilityMode mode = StabilityMode::Lattice;
    int samples = 50;
    int support = 4;  // extra monomials per sample besides (0, m, n)
    unsigned long seed = 1;
};
class MonomialImages;

// one flattened map, reused across many (m, n)
class StabilityChecker {
   public:
    explicit StabilityChecker(const AutoWord& map);
    ~StabilityChecker();
    StabilityChecker(const StabilityChecker&) = delete;
    StabilityChecker& operator=(const StabilityChecker&) = delete;

    const Endo& map() const { return map_; }
    const std::vector<DegreeStats>& component_stats() const { return stats_; }
    Report lattice(const QStarIndex& source, const QStarIndex& target) const;
    Report samples(const QStarIndex& source, const QStarIndex& target, const StabilityOptions& o);

   private:
    Endo map_;
    std::vector<DegreeStats> stats_;
    std::unique_ptr<MonomialImages> cache_;
};

// lattice: every exponent triple of Q*_{m,n} checked through the leading data of the components;
// samples: random members pushed through the map and tested for membership at the target
Report verify_stability(const AutoWord& map, const QStarIndex& source, const QStarIndex& target,
                        const StabilityOptions& o = {});
// target index of (m, n) under πγ for the case of p
QStarIndex pigamma_target(const GammaParams& p, const QStarIndex& source);
// π·γ as a word
AutoWord pigamma_word(const GammaParams& p);

struct NonCotameOptions {
    int N = 2;
    int M = 8;
    std::vector<GammaParams> params;  // empty: the default sample set
    int samples = 50;
    unsigned long seed = 1;
    bool with_samples = true;
    int workers = 1;
};
std::vector<GammaParams> default_gamma_params();
Report verify_theorem_noncotame(const NonCotameOptions& o = {});

}  // namespace cotame
