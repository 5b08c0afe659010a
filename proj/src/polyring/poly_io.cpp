#include "cotame/poly_io.hpp"

#include <cctype>

namespace cotame {

std::string VarContext::name(int i) const {
    if (with_t && i == n) return "t";
    if (xyz && n == 3 && i < 3) return std::string(1, "xyz"[i]);
    return "x" + std::to_string(i + 1);
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_tuple(const std::string& text) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ParseError("expected a parenthesized tuple: " + s);
    s = s.substr(1, s.size() - 2);
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (depth < 0) throw ParseError("unbalanced parentheses");
        if (ch == ',' && depth == 0) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (depth != 0) throw ParseError("unbalanced parentheses");
    if (!trim(cur).empty() || !parts.empty()) parts.push_back(trim(cur));
    return parts;
}

namespace {

class Parser {
   public:
    Parser(const std::string& s, const VarContext& ctx) : s_(s), ctx_(ctx), nv_(ctx.nvars()) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

   private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool starts_factor() {
        char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) || c == '(';
    }

    Poly expr() {
        Poly acc(nv_, ctx_.field);
        bool neg = false;
        char c = peek();
        if (c == '+' || c == '-') {
            neg = c == '-';
            ++pos_;
        }
        Poly t = term();
        acc = neg ? -t : t;
        while (true) {
            c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            Poly u = term();
            if (c == '+') acc += u;
            else acc -= u;
        }
        return acc;
    }

    Poly term() {
        Poly acc = factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc *= factor();
            } else if (c == '/') {
                ++pos_;
                Poly d = factor();
                if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
                acc = acc.scaled(d.constant_term().inverse());
            } else if (starts_factor()) {
                acc *= factor();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly factor() {
        Poly base = primary();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected an exponent");
            long e = std::stol(s_.substr(start, pos_ - start));
            if (e > 100000) fail("exponent too large");
            if (base.is_constant()) return Poly::constant(nv_, base.constant_term().pow(e)).with_field(ctx_.field);
            return base.pow(static_cast<int>(e));
        }
        return base;
    }

    Poly primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            mpq_class q(mpz_class(s_.substr(start, pos_ - start)));
            return Poly::constant(nv_, Scalar(q)).with_field(ctx_.field);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            return ident(id);
        }
        fail("expected a number, variable or '('");
    }

    Poly ident(const std::string& id) {
        if (id == "u") {
            if (!ctx_.field) fail("u is only available over an extension field");
            return Poly::constant(nv_, Scalar::generator(ctx_.field));
        }
        if (id == "t") {
            if (!ctx_.with_t) fail("t is not available here");
            return Poly::var(nv_, ctx_.n, ctx_.field);
        }
        if (ctx_.n == 3 && id.size() == 1 && (id == "x" || id == "y" || id == "z"))
            return Poly::var(nv_, id[0] - 'x', ctx_.field);
        if (id.size() >= 2 && id[0] == 'x') {
            for (size_t i = 1; i < id.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(id[i]))) fail("unknown identifier " + id);
            int k = std::stoi(id.substr(1));
            if (k < 1 || k > ctx_.n) fail("variable " + id + " outside dimension " + std::to_string(ctx_.n));
            return Poly::var(nv_, k - 1, ctx_.field);
        }
        fail("unknown identifier " + id);
    }

    const std::string& s_;
    const VarContext& ctx_;
    int nv_;
    size_t pos_ = 0;
};

std::string monomial_str(const Monomial& m, const VarContext& ctx, int nvars) {
    std::string out;
    for (int i = 0; i < nvars; ++i) {
        if (!m.e[i]) continue;
        if (!out.empty()) out += "*";
        out += ctx.name(i);
        if (m.e[i] > 1) out += "^" + std::to_string(m.e[i]);
    }
    return out;
}

}  // namespace

Poly parse_poly(const std::string& text, const VarContext& ctx) {
    if (trim(text).empty()) throw ParseError("empty polynomial");
    Parser p(text, ctx);
    return p.parse();
}

Scalar parse_scalar(const std::string& text, const Field& field) {
    VarContext ctx{0, field, false, false};
    ctx.n = 1;
    Poly p = parse_poly(text, ctx);
    if (!p.is_constant()) throw ParseError("expected a constant: " + text);
    return p.constant_term().with_field(field);
}

std::string to_string(const Poly& p, const VarContext& ctx) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto& t : p.terms()) {
        std::string mono = monomial_str(t.m, ctx, p.nvars());
        const Scalar& c = t.c;
        bool neg = c.is_negative_rational();
        Scalar a = neg ? -c : c;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        std::string coef = a.is_rational() ? a.str() : "(" + a.str() + ")";
        if (mono.empty()) {
            out += coef;
        } else if (a.is_one()) {
            out += mono;
        } else {
            out += coef + "*" + mono;
        }
    }
    return out;
}

std::string to_string(const Poly& p) {
    VarContext ctx;
    ctx.n = p.nvars();
    ctx.field = p.field();
    return to_string(p, ctx);
}

std::string to_string(const Scalar& s) { return s.str(); }

}  // namespace cotame
