#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>

#include "haiproto/agents.hpp"

namespace haiproto::agents {

namespace {

class LiteralParser {
public:
    explicit LiteralParser(std::string_view text) : text_(text) {}

    Value parse_all() {
        Value v = value();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("payload literal '" + std::string(text_) + "': " + what + " at offset " +
                                    std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    static bool symbol_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    }

    double number() {
        skip_space();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e' ||
                text_[pos_] == 'E' || ((text_[pos_] == '-' || text_[pos_] == '+') && pos_ > start &&
                                       (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
            ++pos_;
        std::string_view digits = text_.substr(start, pos_ - start);
        if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
        double d = 0;
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
        if (ec != std::errc{} || end != digits.data() + digits.size() || digits.empty()) {
            pos_ = start;
            fail("malformed number");
        }
        return d;
    }

    Value value() {
        skip_space();
        if (pos_ >= text_.size()) fail("expected a value");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            std::vector<double> v;
            if (!peek(')')) {
                v.push_back(number());
                while (peek(',')) {
                    ++pos_;
                    v.push_back(number());
                }
            }
            expect(')');
            return Value{v};
        }
        if (c == '[') {
            ++pos_;
            ValueList list;
            if (!peek(']')) {
                list.items.push_back(value());
                while (peek(',')) {
                    ++pos_;
                    list.items.push_back(value());
                }
            }
            expect(']');
            return Value{list};
        }
        if (c == '"') {
            ++pos_;
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
                out += text_[pos_++];
            }
            if (pos_ >= text_.size()) fail("unterminated string");
            ++pos_;
            return Value{Symbol{out}};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') return Value{number()};
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') fail(std::string("unexpected '") + c + "'");
        std::size_t start = pos_;
        while (pos_ < text_.size() && symbol_char(text_[pos_])) ++pos_;
        std::string word(text_.substr(start, pos_ - start));
        if (word == "blob" && pos_ < text_.size() && text_[pos_] == ':') {
            ++pos_;
            std::size_t ref = pos_;
            while (pos_ < text_.size() && (symbol_char(text_[pos_]) || text_[pos_] == '/')) ++pos_;
            if (pos_ == ref) fail("empty blob reference");
            return Value{BlobRef{std::string(text_.substr(ref, pos_ - ref))}};
        }
        return Value{Symbol{word}};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Value parse_value(std::string_view text) {
    return LiteralParser(text).parse_all();
}

}  // namespace haiproto::agents
