#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cotame/automorphism.hpp"

namespace cotame {

// One line of a word file: a generator token or a raw component tuple ("endo:").
struct WordItem {
    std::optional<GeneratorToken> token;
    Endo raw;
};

struct WordFile {
    int n = 0;
    Field field;
    std::vector<WordItem> items;

    bool has_raw() const;
    // throws ParseError if a raw item is present
    AutoWord word() const;
    std::vector<Endo> flattened() const;
};

// Lines: optional "n: 3", optional "ring: u^4 + u^3 + u^2 + u + 1", then one item per line.
// '#' starts a comment.
WordFile parse_word_file(const std::string& text);
WordFile read_word_file(const std::string& path);

GeneratorToken parse_token(const std::string& line, const VarContext& ctx);
std::string format_token(const GeneratorToken& t, const VarContext& ctx);
std::string format_word(const AutoWord& w, const Field& field = nullptr);
std::string format_word_file(const WordFile& f);
std::string format_field_header(const Field& f);
Field parse_field_modulus(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace cotame
