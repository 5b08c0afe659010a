#include "cotame/word_io.hpp"

#include <fstream>
#include <sstream>

namespace cotame {

namespace {

bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

// top-level comma split of "[a, b, ...]"
std::vector<std::string> split_brackets(const std::string& text) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ParseError("expected a bracketed list: " + s);
    std::string inner = "(" + s.substr(1, s.size() - 2) + ")";
    return split_tuple(inner);
}

std::string strip_inv(const std::string& body, bool& inv) {
    std::string s = trim(body);
    inv = false;
    if (s.size() >= 3 && s.compare(s.size() - 3, 3, "inv") == 0) {
        std::string head = s.substr(0, s.size() - 3);
        if (head.empty() || std::isspace(static_cast<unsigned char>(head.back())) || head.back() == ')' ||
            head.back() == ']') {
            inv = true;
            s = trim(head);
        }
    }
    return s;
}

std::vector<int> parse_cycles(const std::string& text, int n) {
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = i;
    std::vector<bool> seen(n, false);
    size_t pos = 0;
    std::string s = trim(text);
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            continue;
        }
        if (s[pos] != '(') throw ParseError("expected '(' in permutation: " + s);
        size_t close = s.find(')', pos);
        if (close == std::string::npos) throw ParseError("unclosed cycle in permutation: " + s);
        std::istringstream in(s.substr(pos + 1, close - pos - 1));
        std::vector<int> cyc;
        std::string tok;
        while (in >> tok) {
            int k;
            try {
                k = std::stoi(tok);
            } catch (...) {
                throw ParseError("bad permutation entry: " + tok);
            }
            if (k < 1 || k > n) throw ParseError("permutation entry out of range: " + tok);
            if (seen[k - 1]) throw ParseError("repeated permutation entry: " + tok);
            seen[k - 1] = true;
            cyc.push_back(k - 1);
        }
        for (size_t i = 0; i < cyc.size(); ++i) sigma[cyc[i]] = cyc[(i + 1) % cyc.size()];
        pos = close + 1;
    }
    return sigma;
}

std::string format_cycles(const std::vector<int>& sigma) {
    int n = static_cast<int>(sigma.size());
    std::vector<bool> done(n, false);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (done[i] || sigma[i] == i) continue;
        out += "(";
        int j = i;
        bool first = true;
        while (!done[j]) {
            done[j] = true;
            if (!first) out += " ";
            out += std::to_string(j + 1);
            first = false;
            j = sigma[j];
        }
        out += ")";
    }
    return out.empty() ? "()" : out;
}

std::string scalar_text(const Scalar& s) { return s.str(); }

}  // namespace

Field parse_field_modulus(const std::string& text) {
    std::string s = text;
    for (auto& ch : s)
        if (ch == 'u') ch = 'z';
    VarContext ctx;
    ctx.n = 3;
    Poly p = parse_poly(s, ctx);
    std::vector<mpq_class> coeffs(static_cast<size_t>(std::max<long>(p.total_degree(), 0)) + 1);
    for (auto& t : p.terms()) {
        if (t.m.e[0] || t.m.e[1]) throw ParseError("ring modulus must be a polynomial in u");
        if (!t.c.is_rational()) throw ParseError("ring modulus must have rational coefficients");
        coeffs[t.m.e[2]] = t.c.rational();
    }
    try {
        return make_field(coeffs);
    } catch (const PreconditionError& e) {
        throw ParseError(e.what());
    }
}

std::string format_field_header(const Field& f) { return f ? "ring: " + f->str() : ""; }

GeneratorToken parse_token(const std::string& line, const VarContext& ctx) {
    std::string s = trim(line);
    bool inv = false;
    try {
        if (starts_with(s, "tri:")) {
            std::string body = strip_inv(s.substr(4), inv);
            GeneratorToken t = GeneratorToken::triangular(parse_endo(body, ctx));
            return inv ? t.inverted() : t;
        }
        if (starts_with(s, "aff:")) {
            std::string body = strip_inv(s.substr(4), inv);
            GeneratorToken t = [&] {
                if (!body.empty() && body[0] == '[') {
                    int depth = 0;
                    size_t end = 0;
                    for (size_t i = 0; i < body.size(); ++i) {
                        if (body[i] == '[') ++depth;
                        if (body[i] == ']' && --depth == 0) {
                            end = i;
                            break;
                        }
                    }
                    auto rows = split_brackets(body.substr(0, end + 1));
                    int n = ctx.n;
                    if (static_cast<int>(rows.size()) != n) throw ParseError("matrix must have n rows");
                    Matrix m(n, n);
                    for (int i = 0; i < n; ++i) {
                        auto entries = split_brackets(rows[i]);
                        if (static_cast<int>(entries.size()) != n) throw ParseError("matrix row must have n entries");
                        for (int j = 0; j < n; ++j) m(i, j) = parse_scalar(entries[j], ctx.field);
                    }
                    std::vector<Scalar> v(n);
                    std::string rest = trim(body.substr(end + 1));
                    if (!rest.empty()) {
                        if (rest[0] != '+') throw ParseError("expected '+ (vector)' after the matrix");
                        auto parts = split_tuple(rest.substr(1));
                        if (static_cast<int>(parts.size()) != n) throw ParseError("vector must have n entries");
                        for (int j = 0; j < n; ++j) v[j] = parse_scalar(parts[j], ctx.field);
                    }
                    return GeneratorToken::affine(m, v);
                }
                return GeneratorToken::affine(parse_endo(body, ctx));
            }();
            return inv ? t.inverted() : t;
        }
        if (starts_with(s, "perm:")) {
            std::string body = strip_inv(s.substr(5), inv);
            GeneratorToken t = GeneratorToken::permutation(parse_cycles(body, ctx.n));
            return inv ? t.inverted() : t;
        }
        if (starts_with(s, "exp:")) {
            std::string body = strip_inv(s.substr(4), inv);
            size_t fpos = body.rfind("F=");
            std::string dpart = trim(body.substr(0, fpos));
            if (fpos == std::string::npos || !starts_with(dpart, "D=")) throw ParseError("exp token needs D=...; F=...");
            dpart = trim(dpart.substr(2));
            if (!dpart.empty() && dpart.back() == ';') dpart.pop_back();
            TriangularDerivation d = parse_derivation(dpart, ctx);
            Poly f = parse_poly(body.substr(fpos + 2), ctx);
            GeneratorToken t = GeneratorToken::exp_fd(d, f);
            return inv ? t.inverted() : t;
        }
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("invalid token: ") + e.what());
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("invalid token: ") + e.what());
    }
    throw ParseError("unknown token line: " + s);
}

std::string format_token(const GeneratorToken& t, const VarContext& ctx) {
    std::string out;
    switch (t.kind()) {
        case GeneratorToken::Kind::Affine: {
            out = "aff: [";
            int n = t.dim();
            for (int i = 0; i < n; ++i) {
                out += i ? ", [" : "[";
                for (int j = 0; j < n; ++j) out += (j ? ", " : "") + scalar_text(t.matrix()(i, j));
                out += "]";
            }
            out += "] + (";
            for (int j = 0; j < n; ++j) out += (j ? ", " : "") + scalar_text(t.vector()[j]);
            out += ")";
            break;
        }
        case GeneratorToken::Kind::Triangular:
            out = "tri: " + to_string(triangular_endo(t.triangular_data()), ctx);
            break;
        case GeneratorToken::Kind::Permutation:
            out = "perm: " + format_cycles(t.sigma());
            break;
        case GeneratorToken::Kind::ExpFD:
            out = "exp: D=" + to_string(t.derivation(), ctx) + "; F=" + to_string(t.kernel_element(), ctx);
            break;
    }
    if (t.is_inverse()) out += " inv";
    return out;
}

std::string format_word(const AutoWord& w, const Field& field) {
    VarContext ctx;
    ctx.n = w.n;
    ctx.field = field;
    std::string out = "n: " + std::to_string(w.n) + "\n";
    if (field) out += format_field_header(field) + "\n";
    for (auto& t : w.tokens) out += format_token(t, ctx) + "\n";
    return out;
}

std::string format_word_file(const WordFile& f) {
    VarContext ctx;
    ctx.n = f.n;
    ctx.field = f.field;
    std::string out = "n: " + std::to_string(f.n) + "\n";
    if (f.field) out += format_field_header(f.field) + "\n";
    for (auto& it : f.items) out += (it.token ? format_token(*it.token, ctx) : "endo: " + to_string(it.raw, ctx)) + "\n";
    return out;
}

bool WordFile::has_raw() const {
    for (auto& it : items)
        if (!it.token) return true;
    return false;
}

AutoWord WordFile::word() const {
    AutoWord w(n);
    for (auto& it : items) {
        if (!it.token) throw ParseError("word contains a raw 'endo:' item, which is not a generator");
        w.push(*it.token);
    }
    return w;
}

std::vector<Endo> WordFile::flattened() const {
    std::vector<Endo> out;
    for (auto& it : items) out.push_back(it.token ? flatten(*it.token) : it.raw);
    return out;
}

WordFile parse_word_file(const std::string& text) {
    WordFile f;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> body;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (starts_with(line, "n:")) {
            try {
                f.n = std::stoi(line.substr(2));
            } catch (...) {
                throw ParseError("bad dimension line: " + line);
            }
            if (f.n < 1 || f.n >= kMaxVars) throw ParseError("dimension out of range: " + line);
        } else if (starts_with(line, "ring:")) {
            std::string r = trim(line.substr(5));
            if (r != "Q") f.field = parse_field_modulus(r);
        } else {
            body.push_back(line);
        }
    }
    if (f.n == 0) {
        for (auto& l : body) {
            size_t open = l.find('(');
            if ((starts_with(l, "tri:") || starts_with(l, "endo:") || starts_with(l, "aff:")) && open != std::string::npos) {
                std::string rest = l.substr(l.find(':') + 1);
                bool inv;
                rest = strip_inv(rest, inv);
                if (starts_with(trim(rest), "[")) {
                    auto rows = split_brackets(trim(rest).substr(0, trim(rest).find("]]") + 2));
                    f.n = static_cast<int>(rows.size());
                } else {
                    f.n = static_cast<int>(split_tuple(rest).size());
                }
                break;
            }
        }
        if (f.n == 0) throw ParseError("cannot infer the dimension; add an 'n: <dim>' line");
    }
    VarContext ctx;
    ctx.n = f.n;
    ctx.field = f.field;
    for (auto& l : body) {
        WordItem it;
        if (starts_with(l, "endo:")) {
            it.raw = parse_endo(l.substr(5), ctx);
        } else {
            it.token = parse_token(l, ctx);
        }
        f.items.push_back(std::move(it));
    }
    return f;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

WordFile read_word_file(const std::string& path) { return parse_word_file(read_text_file(path)); }

}  // namespace cotame
