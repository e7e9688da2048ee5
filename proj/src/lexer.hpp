#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "haiproto/diagnostic.hpp"

namespace haiproto::dsl::detail {

enum class Tok {
    Word,
    String,
    Comment,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Dot,
    Pipe,
    At,
    Equals,
    Define,  // :=
    Arrow,   // ->
    LArrow,  // <-
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;  // word text, decoded string, or comment body
    Span span;
    // Comments only: nothing but whitespace precedes it on its line.
    bool own_line = false;
    // A blank line separates this token from the previous one.
    bool blank_before = false;
};

[[nodiscard]] std::string_view describe(Tok kind);

struct LexResult {
    std::vector<Token> tokens;  // always ends with End
    std::vector<Diagnostic> diagnostics;
};

[[nodiscard]] LexResult lex(std::string_view text, const std::string& path, std::size_t max_diagnostics);

}  // namespace haiproto::dsl::detail
