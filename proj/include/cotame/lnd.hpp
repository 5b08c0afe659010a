#pragma once

#include <string>
#include <vector>

#include "cotame/endo.hpp"

namespace cotame {

// D with D(x_i) ∈ K[x_1..x_{i-1}]; locally nilpotent by shape.
class TriangularDerivation {
   public:
    TriangularDerivation() = default;
    explicit TriangularDerivation(std::vector<Poly> images);

    int dim() const { return static_cast<int>(img_.size()); }
    const Poly& image(int i) const { return img_[i]; }
    const std::vector<Poly>& images() const { return img_; }
    TriangularDerivation scaled(const Poly& f) const;
    friend bool operator==(const TriangularDerivation& a, const TriangularDerivation& b) { return a.img_ == b.img_; }

   private:
    std::vector<Poly> img_;
};

Poly apply(const TriangularDerivation& d, const Poly& p);
bool kernel_member(const TriangularDerivation& d, const Poly& f);
// exp(F·D); throws PreconditionError when F ∉ ker D
Endo exponential(const TriangularDerivation& d, const Poly& f);

TriangularDerivation nagata_derivation();
Poly nagata_kernel_element();
Endo nagata_map();

// "x1 -> 0; x2 -> x1; x3 -> -2 x2" (missing entries are zero)
TriangularDerivation parse_derivation(const std::string& text, const VarContext& ctx);
std::string to_string(const TriangularDerivation& d, const VarContext& ctx);

}  // namespace cotame
