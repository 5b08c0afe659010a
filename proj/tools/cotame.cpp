#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cotame/engine.hpp"
#include "cotame/filtration.hpp"
#include "cotame/lnd.hpp"
#include "cotame/word_io.hpp"

using namespace cotame;

namespace {

struct MathFailure {
    std::string what;
};

VarContext ctx_of(const WordFile& f) {
    VarContext c;
    c.n = f.n;
    c.field = f.field;
    return c;
}

std::string endo_file(const Endo& e, const Field& field) {
    WordFile out;
    out.n = e.dim();
    out.field = field;
    out.items.push_back({std::nullopt, e});
    return format_word_file(out);
}

// raw items become tokens when they are affine, triangular or parabolic
AutoWord word_of_file(const WordFile& f) {
    AutoWord w(f.n);
    for (auto& it : f.items) {
        if (it.token)
            w.push(*it.token);
        else
            w.append(word_for(it.raw));
    }
    return w;
}

int variable(int one_based, int n) {
    if (one_based < 1 || one_based > n) throw ParseError("variable index must be in 1.." + std::to_string(n));
    return one_based - 1;
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream o(path);
    if (!o) throw ParseError("cannot write " + path);
    o << text;
}

std::vector<GammaParams> read_params(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    Field f;
    std::vector<GammaParams> out;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("ring:", 0) == 0) {
            f = parse_field_modulus(trim(line.substr(5)));
            continue;
        }
        std::vector<std::string> parts;
        std::stringstream ss(line);
        for (std::string s; std::getline(ss, s, ';');) parts.push_back(trim(s));
        if (parts.size() != 3) throw ParseError("parameter line must read 'u; c; d': " + line);
        out.push_back({parse_scalar(parts[0], f), parse_scalar(parts[1], f), parse_scalar(parts[2], f)});
    }
    if (out.empty()) throw ParseError("no parameter lines in " + path);
    return out;
}

int workers_from_env() {
    const char* s = std::getenv("COTAME_WORKERS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v > 0 ? v : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact tools for polynomial automorphisms"};
    app.require_subcommand(1);

    std::vector<std::string> compose_files;
    auto* c_compose = app.add_subcommand("compose", "flatten and compose word files left to right");
    c_compose->add_option("files", compose_files)->required();

    std::string file;
    bool inv_flat = false;
    auto* c_invert = app.add_subcommand("invert", "inverse of a word");
    c_invert->add_option("file", file)->required();
    c_invert->add_flag("--flatten", inv_flat, "print the flattened inverse");

    auto* c_classify = app.add_subcommand("classify", "class labels of the flattened map");
    c_classify->add_option("file", file)->required();

    std::string deriv, kernel;
    int n_exp = 3;
    auto* c_exp = app.add_subcommand("exp", "exp(F D) for a triangular derivation");
    c_exp->add_option("--derivation", deriv, "e.g. 'x1 -> 0; x2 -> x1; x3 -> -2 x2'")->required();
    c_exp->add_option("--kernel", kernel, "F, an element of ker D")->default_val("1");
    c_exp->add_option("--n", n_exp)->default_val(3);

    int var = 1;
    auto* c_td = app.add_subcommand("td-test", "is the word translation degenerate in x_var");
    c_td->add_option("file", file)->required();
    c_td->add_option("--var", var)->default_val(1);

    auto* c_fact = app.add_subcommand("ttd-factor", "lambda, tau^-1, gamma, mu, rho with phi^-1 = their product");
    c_fact->add_option("file", file)->required();
    c_fact->add_option("--var", var)->default_val(1);

    std::string family, out, psi1_file, psi2_file, alpha_file;
    auto* c_reduce = app.add_subcommand("reduce", "reduce to Derksen's map or an affine map, writing a trace");
    c_reduce->add_option("--family", family)
        ->required()
        ->check(CLI::IsMember({"triangular", "parabolic", "biparabolic", "3triangular", "exp", "td"}));
    c_reduce->add_option("file", file, "input word; for exp it holds psi1, one exp token, psi2");
    c_reduce->add_option("--psi1", psi1_file);
    c_reduce->add_option("--alpha", alpha_file);
    c_reduce->add_option("--psi2", psi2_file);
    c_reduce->add_option("--var", var)->default_val(1);
    c_reduce->add_option("-o,--out", out, "trace file, default stdout");

    auto* c_verify = app.add_subcommand("verify-trace", "replay a trace file");
    c_verify->add_option("file", file)->required();

    int N = 2, M = 8, samples = 50;
    unsigned long seed = 1;
    std::string params_file;
    bool no_samples = false;
    auto* c_nc = app.add_subcommand("verify-non-cotame", "closed forms, degree table and Q* stability");
    c_nc->add_option("--N", N)->default_val(2);
    c_nc->add_option("--M", M)->default_val(8);
    c_nc->add_option("--params", params_file, "lines 'u; c; d', optional 'ring:' header");
    c_nc->add_option("--samples", samples)->default_val(50);
    c_nc->add_option("--seed", seed)->default_val(1);
    c_nc->add_flag("--no-samples", no_samples, "lattice mode only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_compose) {
            Endo acc;
            Field field;
            for (auto& f : compose_files) {
                WordFile wf = read_word_file(f);
                field = join(field, wf.field);
                for (auto& e : wf.flattened()) acc = acc.dim() ? compose(acc, e) : e;
            }
            if (!acc.dim()) throw ParseError("nothing to compose");
            std::cout << endo_file(acc, field);
        } else if (*c_invert) {
            WordFile wf = read_word_file(file);
            AutoWord w = inverse(word_of_file(wf));
            if (inv_flat) {
                std::cout << endo_file(flatten(w), wf.field);
            } else {
                std::cout << format_word(w, wf.field);
            }
        } else if (*c_classify) {
            WordFile wf = read_word_file(file);
            Endo e = flatten(word_of_file(wf));
            auto labels = classify(e).labels();
            std::string s;
            for (auto& l : labels) s += (s.empty() ? "" : ", ") + l;
            std::cout << "classes: " << (s.empty() ? "general" : s) << "\n";
            std::cout << "degree: " << e.degree() << "\n";
        } else if (*c_exp) {
            VarContext ctx;
            ctx.n = n_exp;
            TriangularDerivation d = parse_derivation(deriv, ctx);
            Poly f = parse_poly(kernel, ctx);
            if (!kernel_member(d, f)) throw MathFailure{"F is not in the kernel of D"};
            std::cout << endo_file(exponential(d, f), nullptr);
        } else if (*c_td) {
            WordFile wf = read_word_file(file);
            std::cout << (td_test(word_of_file(wf), variable(var, wf.n)) ? "true" : "false") << "\n";
        } else if (*c_fact) {
            WordFile wf = read_word_file(file);
            AutoWord w = word_of_file(wf);
            int r = variable(var, wf.n);
            if (!td_test(w, r)) throw MathFailure{"map is not translation degenerate in x" + std::to_string(var)};
            TDFactorization f = factorize_td(w, r);
            VarContext ctx = ctx_of(wf);
            bool ok = recompose(f) == flatten(inverse(w));
            std::cout << format_field_header(wf.field) << "n: " << wf.n << "\n";
            std::cout << "# lambda\n" << format_token(GeneratorToken::affine(f.lambda), ctx) << "\n";
            std::cout << "# tau^-1\n" << format_token(GeneratorToken::triangular(f.tau).inverted(), ctx) << "\n";
            std::cout << "# gamma\nendo: " << to_string(f.gamma, ctx) << "\n";
            std::cout << "# mu\nendo: " << to_string(f.mu, ctx) << "\n";
            std::cout << "# rho\n" << format_token(GeneratorToken::permutation(f.rho), ctx) << "\n";
            std::cout << "# verified: " << (ok ? "true" : "false") << "\n";
            if (!ok) return 1;
        } else if (*c_reduce) {
            ReductionTrace t;
            auto need_file = [&] {
                if (file.empty()) throw ParseError("reduce --family " + family + " needs an input word file");
                return read_word_file(file);
            };
            if (family == "biparabolic") {
                if (psi1_file.empty() || psi2_file.empty() || alpha_file.empty())
                    throw ParseError("biparabolic needs --psi1, --alpha and --psi2");
                WordFile a = read_word_file(psi1_file), b = read_word_file(alpha_file), c = read_word_file(psi2_file);
                t = reduce_biparabolic(word_of_file(a), flatten(word_of_file(b)), word_of_file(c));
            } else if (family == "exp") {
                WordFile wf = need_file();
                AutoWord p1(wf.n), p2(wf.n);
                const GeneratorToken* ex = nullptr;
                for (auto& it : wf.items) {
                    if (it.token && it.token->kind() == GeneratorToken::Kind::ExpFD && !it.token->is_inverse()) {
                        if (ex) throw ParseError("exp input must hold exactly one exp token");
                        ex = &*it.token;
                        continue;
                    }
                    AutoWord piece = it.token ? AutoWord(wf.n, {*it.token}) : word_for(it.raw);
                    (ex ? p2 : p1).append(piece);
                }
                if (!ex) throw ParseError("exp input must hold exactly one exp token");
                t = reduce_exp(p1, ex->derivation(), ex->kernel_element(), p2);
            } else {
                WordFile wf = need_file();
                AutoWord w = word_of_file(wf);
                if (family == "triangular") t = reduce_triangular(w);
                if (family == "parabolic") t = reduce_parabolic(w);
                if (family == "3triangular") t = reduce_3triangular(w);
                if (family == "td") t = reduce_td(w, variable(var, wf.n));
            }
            TraceCheck ck = check_trace(t);
            write_out(out, trace_to_json(t));
            if (!out.empty() && out != "-") {
                std::cout << "terminal: " << (t.terminal == TerminalKind::Affine ? "Affine" : "DerksenEquivalent") << "\n";
                std::cout << "steps: " << t.steps.size() << "\n";
                std::cout << "verified: " << (ck.ok ? "true" : "false") << "\n";
            }
            if (!ck.ok) throw MathFailure{"trace does not verify: " + ck.message};
        } else if (*c_verify) {
            ReductionTrace t = trace_from_json(read_text_file(file));
            TraceCheck ck = check_trace(t);
            std::cout << "valid: " << (ck.ok ? "true" : "false") << "\n";
            if (!ck.ok) {
                std::cout << "reason: " << ck.message << "\n";
                return 1;
            }
        } else if (*c_nc) {
            NonCotameOptions o;
            o.N = N;
            o.M = M;
            o.samples = samples;
            o.seed = seed;
            o.with_samples = !no_samples;
            o.workers = workers_from_env();
            if (!params_file.empty()) o.params = read_params(params_file);
            Report r = verify_theorem_noncotame(o);
            std::cout << r.text();
            if (!r.ok()) return 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const MathFailure& e) {
        std::cerr << "failure: " << e.what << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
