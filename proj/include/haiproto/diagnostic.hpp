#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace haiproto {

enum class Severity { Error, Warning };

struct Span {
    int line = 0;    // 1-based; 0 when the entity has no source position
    int column = 0;  // 1-based
    int length = 0;
    bool operator==(const Span&) const = default;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    Span span;
    std::string message;
    std::string path;
    bool operator==(const Diagnostic&) const = default;
};

// Closed set of diagnostic codes.
namespace codes {
// parser
inline constexpr std::string_view lex = "E-LEX";
inline constexpr std::string_view syntax = "E-SYNTAX";
inline constexpr std::string_view arity = "E-ARITY";
inline constexpr std::string_view dup_name = "E-DUP-NAME";
inline constexpr std::string_view dup_var = "E-DUP-VAR";
inline constexpr std::string_view dup_subtype = "E-DUP-SUBTYPE";
inline constexpr std::string_view params = "E-PARAMS";
inline constexpr std::string_view undeclared_var = "E-UNDECLARED-VAR";
inline constexpr std::string_view empty_pattern = "E-EMPTY-PATTERN";
inline constexpr std::string_view empty_scenario = "E-EMPTY-SCENARIO";
inline constexpr std::string_view forward_ref = "E-FORWARD-REF";
inline constexpr std::string_view dup_mod = "E-DUP-MOD";
inline constexpr std::string_view unknown_tag = "E-UNKNOWN-TAG";
// checker
inline constexpr std::string_view modify_type = "E-MODIFY-TYPE";
inline constexpr std::string_view select_elem = "E-SELECT-ELEM";
inline constexpr std::string_view select_nonlist = "E-SELECT-NONLIST";
inline constexpr std::string_view unknown_action = "E-UNKNOWN-ACTION";
inline constexpr std::string_view unknown_message = "E-UNKNOWN-MESSAGE";
inline constexpr std::string_view unknown_pattern = "E-UNKNOWN-PATTERN";
inline constexpr std::string_view unknown_role = "E-UNKNOWN-ROLE";
inline constexpr std::string_view self_send = "E-SELF-SEND";
inline constexpr std::string_view unknown_mod_var = "E-UNKNOWN-MOD-VAR";
inline constexpr std::string_view msg_arity = "E-MSG-ARITY";
inline constexpr std::string_view binding = "E-BINDING";
inline constexpr std::string_view unanswered_warning = "W-UNANSWERED";
inline constexpr std::string_view unanswered_error = "E-UNANSWERED";
// catalog
inline constexpr std::string_view unresolved = "E-UNRESOLVED";
// io
inline constexpr std::string_view io = "E-IO";
}  // namespace codes

[[nodiscard]] const std::vector<std::string_view>& all_codes();

[[nodiscard]] std::string_view to_string(Severity severity);

// `path:line:col: severity[code]: message`
[[nodiscard]] std::string render(const Diagnostic& d);

[[nodiscard]] Diagnostic make_error(std::string_view code, std::string message, Span span = {},
                                    std::string path = {});
[[nodiscard]] Diagnostic make_warning(std::string_view code, std::string message, Span span = {},
                                      std::string path = {});

[[nodiscard]] bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace haiproto
