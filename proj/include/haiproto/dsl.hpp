#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "haiproto/core.hpp"
#include "haiproto/diagnostic.hpp"

namespace haiproto::dsl {

// A `//` comment line; text excludes the slashes.
struct CommentLine {
    std::string text;
    bool blank_before = false;
    bool operator==(const CommentLine&) const = default;
};

struct RoleDecl {
    AgentRole role;
    bool operator==(const RoleDecl&) const = default;
};

using DeclNode = std::variant<RoleDecl, ActionDef, Message, Pattern, Scenario>;

struct Decl {
    DeclNode node;
    Span span;
    std::vector<CommentLine> leading;
    std::optional<std::string> trailing;
    bool blank_before = false;
};

[[nodiscard]] std::string_view decl_keyword(const DeclNode& node);
[[nodiscard]] const std::string& decl_name(const DeclNode& node);

struct SourceFile {
    std::string path;
    std::vector<Decl> declarations;
    std::vector<CommentLine> trailing;
};

struct ParseResult {
    std::optional<SourceFile> file;
    std::vector<Diagnostic> diagnostics;
    [[nodiscard]] bool ok() const { return file.has_value(); }
};

// Upper bound on diagnostics reported for one input.
inline constexpr std::size_t max_diagnostics = 64;

[[nodiscard]] ParseResult parse(std::string_view text, std::string path = "<input>");

// `input.raw_data|fvector`, `[output.label]`, `[X: input, Y: output]`.
[[nodiscard]] std::optional<TypeExpr> parse_type(std::string_view text);

[[nodiscard]] std::string print(const SourceFile& file);
[[nodiscard]] std::string print(const DeclNode& node);

// Equality ignoring source spans and path.
[[nodiscard]] bool structurally_equal(const SourceFile& a, const SourceFile& b);

}  // namespace haiproto::dsl
