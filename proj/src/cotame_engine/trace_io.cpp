#include <sstream>

#include "cotame/engine.hpp"
#include "cotame/word_io.hpp"
#include "json.hpp"

namespace cotame {

namespace {

using json = nlohmann::ordered_json;

json word_json(const AutoWord& w, const VarContext& ctx) {
    json a = json::array();
    for (auto& t : w.tokens) a.push_back(format_token(t, ctx));
    return a;
}

AutoWord word_from(const json& a, const VarContext& ctx) {
    if (!a.is_array()) throw ParseError("word must be an array of token lines");
    AutoWord w(ctx.n);
    for (auto& line : a) w.push(parse_token(line.get<std::string>(), ctx));
    return w;
}

std::string scalar_text(const Scalar& s) { return to_string(s); }

}  // namespace

std::string trace_to_json(const ReductionTrace& t) {
    VarContext ctx;
    ctx.n = t.input.n;
    ctx.field = t.field;
    json j;
    j["format"] = "cotame-trace/1";
    j["family"] = t.family;
    j["n"] = t.input.n;
    if (t.field) j["ring"] = t.field->str();
    j["input"] = word_json(t.input, ctx);
    json steps = json::array();
    for (auto& s : t.steps) {
        json js;
        js["pattern"] = pattern_name(s.pattern);
        js["claim"] = s.claim;
        json p = json::object();
        for (auto& [k, e] : s.params) p[k] = to_string(e, ctx);
        js["params"] = p;
        if (!s.scalars.empty()) {
            json sc = json::object();
            for (auto& [k, v] : s.scalars) sc[k] = scalar_text(v);
            js["scalars"] = sc;
        }
        js["result"] = word_json(s.result, ctx);
        js["digest"] = s.digest;
        steps.push_back(js);
    }
    j["steps"] = steps;
    json term;
    if (t.terminal == TerminalKind::Affine) {
        term["kind"] = "Affine";
    } else {
        term["kind"] = "DerksenEquivalent";
        term["alpha1"] = to_string(t.alpha1, ctx);
        term["alpha2"] = to_string(t.alpha2, ctx);
    }
    j["terminal"] = term;
    return j.dump(2) + "\n";
}

ReductionTrace trace_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("trace is not valid JSON: ") + e.what());
    }
    try {
        ReductionTrace t;
        VarContext ctx;
        ctx.n = j.at("n").get<int>();
        if (ctx.n < 1) throw ParseError("trace dimension must be positive");
        if (j.contains("ring")) ctx.field = parse_field_modulus(j["ring"].get<std::string>());
        t.field = ctx.field;
        t.family = j.value("family", "");
        t.input = word_from(j.at("input"), ctx);
        for (auto& js : j.at("steps")) {
            ReductionStep s;
            s.pattern = parse_pattern(js.at("pattern").get<std::string>());
            s.claim = js.value("claim", "");
            for (auto& [k, v] : js.at("params").items()) s.params.push_back({k, parse_endo(v.get<std::string>(), ctx)});
            if (js.contains("scalars"))
                for (auto& [k, v] : js["scalars"].items()) s.scalars.push_back({k, parse_scalar(v.get<std::string>(), ctx.field)});
            s.result = word_from(js.at("result"), ctx);
            s.digest = js.at("digest").get<std::string>();
            t.steps.push_back(std::move(s));
        }
        auto& term = j.at("terminal");
        std::string kind = term.at("kind").get<std::string>();
        if (kind == "Affine") {
            t.terminal = TerminalKind::Affine;
        } else if (kind == "DerksenEquivalent") {
            t.terminal = TerminalKind::DerksenEquivalent;
            t.alpha1 = parse_endo(term.at("alpha1").get<std::string>(), ctx);
            t.alpha2 = parse_endo(term.at("alpha2").get<std::string>(), ctx);
        } else {
            throw ParseError("unknown terminal kind: " + kind);
        }
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed trace: ") + e.what());
    }
}

}  // namespace cotame
