#pragma once

#include <string>
#include <vector>

#include "cotame/poly.hpp"

namespace cotame {

// Names for printing and parsing. x1..xn always parse; x,y,z also parse when n = 3.
// With `with_t`, index n is the formal parameter t.
struct VarContext {
    int n = 0;
    Field field;
    bool with_t = false;
    bool xyz = false;  // print x,y,z instead of x1,x2,x3

    int nvars() const { return with_t ? n + 1 : n; }
    std::string name(int i) const;
};

Poly parse_poly(const std::string& text, const VarContext& ctx);
Scalar parse_scalar(const std::string& text, const Field& field);
std::string to_string(const Poly& p, const VarContext& ctx);
std::string to_string(const Poly& p);
std::string to_string(const Scalar& s);

// "(p1, p2, ...)" split at top-level commas
std::vector<std::string> split_tuple(const std::string& text);
std::string trim(const std::string& s);

}  // namespace cotame
