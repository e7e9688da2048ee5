#include "haiproto/diagnostic.hpp"

#include <algorithm>

namespace haiproto {

const std::vector<std::string_view>& all_codes() {
    static const std::vector<std::string_view> list{
        codes::lex,            codes::syntax,          codes::arity,          codes::dup_name,
        codes::dup_var,        codes::dup_subtype,     codes::params,         codes::undeclared_var,
        codes::empty_pattern,  codes::empty_scenario,  codes::forward_ref,    codes::dup_mod,
        codes::unknown_tag,    codes::modify_type,     codes::select_elem,    codes::select_nonlist,
        codes::unknown_action, codes::unknown_message, codes::unknown_pattern, codes::unknown_role,
        codes::self_send,      codes::unknown_mod_var, codes::msg_arity,      codes::binding,
        codes::unanswered_warning, codes::unanswered_error, codes::unresolved, codes::io,
    };
    return list;
}

std::string_view to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

std::string render(const Diagnostic& d) {
    std::string out = d.path.empty() ? "<input>" : d.path;
    out += ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": ";
    out += to_string(d.severity);
    out += "[" + d.code + "]: " + d.message;
    return out;
}

Diagnostic make_error(std::string_view code, std::string message, Span span, std::string path) {
    return {Severity::Error, std::string(code), span, std::move(message), std::move(path)};
}

Diagnostic make_warning(std::string_view code, std::string message, Span span, std::string path) {
    return {Severity::Warning, std::string(code), span, std::move(message), std::move(path)};
}

bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace haiproto
