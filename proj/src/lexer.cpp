#include "lexer.hpp"

namespace haiproto::dsl::detail {

std::string_view describe(Tok kind) {
    switch (kind) {
    case Tok::Word: return "identifier";
    case Tok::String: return "string";
    case Tok::Comment: return "comment";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::Pipe: return "'|'";
    case Tok::At: return "'@'";
    case Tok::Equals: return "'='";
    case Tok::Define: return "':='";
    case Tok::Arrow: return "'->'";
    case Tok::LArrow: return "'<-'";
    case Tok::End: return "end of input";
    }
    return "token";
}

namespace {

bool word_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool word_char(char c) {
    return word_start(c) || (c >= '0' && c <= '9');
}

class Lexer {
public:
    Lexer(std::string_view text, const std::string& path, std::size_t cap)
        : text_(text), path_(path), cap_(cap) {}

    LexResult run() {
        while (pos_ < text_.size()) {
            if (out_.diagnostics.size() >= cap_) break;
            char c = text_[pos_];
            if (c == '\n') {
                advance();
                if (line_blank_) blank_pending_ = true;
                line_blank_ = true;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            const Span start = here(1);
            if (c == '/' && peek(1) == '/') {
                comment(start);
            } else if (word_start(c)) {
                word(start);
            } else if (c == '"') {
                string(start);
            } else {
                punct(start);
            }
            line_blank_ = false;
        }
        Token end;
        end.kind = Tok::End;
        end.span = here(0);
        end.blank_before = blank_pending_;
        out_.tokens.push_back(end);
        return std::move(out_);
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    Span here(int length) const { return {line_, col_, length}; }

    void push(Tok kind, std::string text, Span span) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = span;
        t.blank_before = blank_pending_;
        t.own_line = line_blank_;
        blank_pending_ = false;
        out_.tokens.push_back(std::move(t));
    }

    void error(Span span, std::string message) {
        if (out_.diagnostics.size() < cap_)
            out_.diagnostics.push_back(make_error(codes::lex, std::move(message), span, path_));
    }

    void comment(Span start) {
        pos_ += 2;
        col_ += 2;
        const std::size_t begin = pos_;
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        std::string body(text_.substr(begin, pos_ - begin));
        while (!body.empty() && (body.back() == ' ' || body.back() == '\t' || body.back() == '\r'))
            body.pop_back();
        start.length = static_cast<int>(pos_ - begin + 2);
        push(Tok::Comment, std::move(body), start);
    }

    void word(Span start) {
        const std::size_t begin = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (word_char(c)) {
                advance();
            } else if (c == '-' && word_char(peek(1))) {
                advance();
            } else {
                break;
            }
        }
        start.length = static_cast<int>(pos_ - begin);
        push(Tok::Word, std::string(text_.substr(begin, pos_ - begin)), start);
    }

    void string(Span start) {
        const std::size_t begin = pos_;
        advance();
        std::string value;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') {
                start.length = static_cast<int>(pos_ - begin);
                error(start, "unterminated string literal");
                return;
            }
            char c = text_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                char e = peek(1);
                if (e == '"' || e == '\\') {
                    value += e;
                } else if (e == 'n') {
                    value += '\n';
                } else {
                    error(here(2), "unknown escape sequence");
                    value += e;
                }
                advance();
                if (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            value += c;
            advance();
        }
        start.length = static_cast<int>(pos_ - begin);
        push(Tok::String, std::move(value), start);
    }

    void punct(Span start) {
        const char c = text_[pos_];
        auto single = [&](Tok kind) {
            advance();
            push(kind, std::string(1, c), start);
        };
        auto pair = [&](Tok kind, const char* spelling) {
            advance();
            advance();
            start.length = 2;
            push(kind, spelling, start);
        };
        switch (c) {
        case '(': return single(Tok::LParen);
        case ')': return single(Tok::RParen);
        case '[': return single(Tok::LBracket);
        case ']': return single(Tok::RBracket);
        case ',': return single(Tok::Comma);
        case ';': return single(Tok::Semi);
        case '.': return single(Tok::Dot);
        case '|': return single(Tok::Pipe);
        case '@': return single(Tok::At);
        case '=': return single(Tok::Equals);
        case ':':
            if (peek(1) == '=') return pair(Tok::Define, ":=");
            return single(Tok::Colon);
        case '-':
            if (peek(1) == '>') return pair(Tok::Arrow, "->");
            break;
        case '<':
            if (peek(1) == '-') return pair(Tok::LArrow, "<-");
            break;
        default: break;
        }
        const auto byte = static_cast<unsigned char>(c);
        std::string shown;
        if (byte >= 0x20 && byte < 0x7f) {
            shown = std::string("'") + c + "'";
        } else {
            static const char* hex = "0123456789abcdef";
            shown = std::string("byte 0x") + hex[byte >> 4] + hex[byte & 15];
        }
        error(start, "unexpected character " + shown);
        advance();
    }

    std::string_view text_;
    const std::string& path_;
    std::size_t cap_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    bool line_blank_ = true;
    bool blank_pending_ = false;
    LexResult out_;
};

}  // namespace

LexResult lex(std::string_view text, const std::string& path, std::size_t max_diagnostics) {
    return Lexer(text, path, max_diagnostics).run();
}

}  // namespace haiproto::dsl::detail
