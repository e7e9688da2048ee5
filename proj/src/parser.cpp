#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "haiproto/check.hpp"
#include "haiproto/dsl.hpp"
#include "lexer.hpp"

namespace haiproto::dsl {

using detail::Tok;
using detail::Token;

std::string_view decl_keyword(const DeclNode& node) {
    static constexpr std::string_view words[] = {"role", "action", "message", "pattern", "scenario"};
    return words[node.index()];
}

const std::string& decl_name(const DeclNode& node) {
    struct Visitor {
        const std::string& operator()(const RoleDecl& d) const { return d.role.name; }
        const std::string& operator()(const ActionDef& d) const { return d.name; }
        const std::string& operator()(const Message& d) const { return d.name; }
        const std::string& operator()(const Pattern& d) const { return d.name; }
        const std::string& operator()(const Scenario& d) const { return d.name; }
    };
    return std::visit(Visitor{}, node);
}

namespace {

struct SyntaxError {};

struct Reference {
    std::size_t kind;  // DeclNode index of the referenced declaration kind
    std::string name;
    Span span;
};

struct ParsedArg {
    Arg arg;
    bool valid = true;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string path, std::vector<Diagnostic> lex_diags)
        : toks_(std::move(tokens)), path_(std::move(path)), diags_(std::move(lex_diags)) {}

    ParseResult run() {
        SourceFile file;
        file.path = path_;
        std::vector<CommentLine> pending;
        int last_end_line = -1;

        while (raw().kind != Tok::End && diags_.size() < max_diagnostics) {
            const Token& t = raw();
            if (t.kind == Tok::Comment) {
                if (!t.own_line && t.span.line == last_end_line && !file.declarations.empty() &&
                    !file.declarations.back().trailing) {
                    file.declarations.back().trailing = t.text;
                } else {
                    pending.push_back({t.text, t.blank_before && !first_item(file, pending)});
                }
                ++idx_;
                continue;
            }
            const bool blank = t.blank_before && !first_item(file, pending);
            interior_.clear();
            refs_.clear();
            try {
                Decl decl = parse_decl();
                decl.leading = std::move(pending);
                decl.leading.insert(decl.leading.end(), interior_.begin(), interior_.end());
                decl.blank_before = blank;
                pending.clear();
                last_end_line = toks_[idx_ - 1].span.line;
                register_decl(decl, file.declarations.size());
                file.declarations.push_back(std::move(decl));
            } catch (const SyntaxError&) {
                pending.clear();
                recover();
            }
        }
        file.trailing = std::move(pending);
        if (diags_.size() > max_diagnostics) diags_.resize(max_diagnostics);

        if (!has_errors(diags_)) check_forward_refs(file);

        ParseResult result;
        if (!has_errors(diags_)) result.file = std::move(file);
        result.diagnostics = std::move(diags_);
        return result;
    }

private:
    static bool first_item(const SourceFile& file, const std::vector<CommentLine>& pending) {
        return file.declarations.empty() && pending.empty();
    }

    const Token& raw() const { return toks_[idx_]; }

    const Token& peek() {
        while (toks_[idx_].kind == Tok::Comment) {
            interior_.push_back({toks_[idx_].text, false});
            ++idx_;
        }
        return toks_[idx_];
    }

    const Token& next() {
        const Token& t = peek();
        if (t.kind != Tok::End) ++idx_;
        return t;
    }

    bool accept(Tok kind) {
        if (peek().kind != kind) return false;
        ++idx_;
        return true;
    }

    bool accept_word(std::string_view word) {
        if (peek().kind != Tok::Word || peek().text != word) return false;
        ++idx_;
        return true;
    }

    [[noreturn]] void fail(const Token& at, const std::string& expected) {
        std::string got = at.kind == Tok::Word ? "'" + at.text + "'" : std::string(detail::describe(at.kind));
        error(codes::syntax, "expected " + expected + ", found " + got, at.span);
        throw SyntaxError{};
    }

    void error(std::string_view code, std::string message, Span span) {
        diags_.push_back(make_error(code, std::move(message), span, path_));
    }

    const Token& expect(Tok kind) {
        const Token& t = peek();
        if (t.kind != kind) fail(t, std::string(detail::describe(kind)));
        ++idx_;
        return t;
    }

    const Token& expect_word(std::string_view word) {
        const Token& t = peek();
        if (t.kind != Tok::Word || t.text != word) fail(t, "'" + std::string(word) + "'");
        ++idx_;
        return t;
    }

    const Token& expect_name(const char* what = "name") {
        const Token& t = peek();
        if (t.kind != Tok::Word) fail(t, what);
        ++idx_;
        return t;
    }

    const Token& expect_var() {
        const Token& t = peek();
        if (t.kind != Tok::Word || !is_variable_name(t.text)) fail(t, "variable (uppercase identifier)");
        ++idx_;
        return t;
    }

    void recover() {
        while (raw().kind != Tok::End) {
            const Tok k = raw().kind;
            ++idx_;
            if (k == Tok::Semi) return;
        }
    }

    Decl parse_decl() {
        const Token& kw = peek();
        if (kw.kind != Tok::Word) fail(kw, "declaration keyword");
        Decl decl;
        decl.span = kw.span;
        if (kw.text == "role") {
            ++idx_;
            decl.node = parse_role();
        } else if (kw.text == "action") {
            ++idx_;
            decl.node = parse_action(kw.span);
        } else if (kw.text == "message") {
            ++idx_;
            decl.node = parse_message();
        } else if (kw.text == "pattern") {
            ++idx_;
            decl.node = parse_pattern();
        } else if (kw.text == "scenario") {
            ++idx_;
            decl.node = parse_scenario();
        } else {
            fail(kw, "'role', 'action', 'message', 'pattern' or 'scenario'");
        }
        return decl;
    }

    RoleDecl parse_role() {
        const Token& name = expect_name("role name");
        name_spans_.push_back(name.span);
        expect(Tok::Semi);
        return RoleDecl{AgentRole{name.text}};
    }

    // base := role ("." IDENT ("|" IDENT)*)?
    std::optional<TypeExpr> parse_base() {
        const Token& role_tok = peek();
        auto role = role_tok.kind == Tok::Word ? parse_role(role_tok.text) : std::nullopt;
        if (!role) fail(role_tok, "type role 'input', 'output' or 'feedback'");
        ++idx_;
        std::vector<std::string> subtypes;
        bool valid = true;
        if (accept(Tok::Dot)) {
            do {
                const Token& st = expect_name("subtype name");
                if (std::find(subtypes.begin(), subtypes.end(), st.text) != subtypes.end()) {
                    error(codes::dup_subtype, "duplicate subtype '" + st.text + "'", st.span);
                    valid = false;
                }
                subtypes.push_back(st.text);
            } while (accept(Tok::Pipe));
        }
        if (!valid) return std::nullopt;
        return TypeExpr::base(*role, std::move(subtypes));
    }

    static std::optional<Role> parse_role(const std::string& text) { return haiproto::parse_role(text); }

    // typeexpr := base | "[" base "]"
    std::optional<TypeExpr> parse_typeexpr() {
        if (accept(Tok::LBracket)) {
            auto elem = parse_base();
            expect(Tok::RBracket);
            if (!elem) return std::nullopt;
            return TypeExpr::list(std::move(*elem));
        }
        return parse_base();
    }

    // arg := VAR ":" typeexpr | "[" VAR ":" typeexpr ("," VAR ":" typeexpr)+ "]"
    ParsedArg parse_arg() {
        ParsedArg out{Arg{std::nullopt, TypeExpr::base(Role::Input)}, true};
        if (accept(Tok::LBracket)) {
            std::vector<TypeExpr::Member> members;
            std::set<std::string> seen;
            std::size_t entries = 0;
            do {
                ++entries;
                const Token& var = expect_var();
                expect(Tok::Colon);
                auto type = parse_typeexpr();
                if (!seen.insert(var.text).second) {
                    error(codes::dup_var, "duplicate variable '" + var.text + "' in group", var.span);
                    out.valid = false;
                }
                if (!type) {
                    out.valid = false;
                } else {
                    members.push_back({var.text, std::move(*type)});
                }
            } while (accept(Tok::Comma));
            const Token& close = peek();
            expect(Tok::RBracket);
            if (entries < 2) {
                error(codes::syntax, "a group needs at least two members", close.span);
                throw SyntaxError{};
            }
            if (out.valid) out.arg.type = TypeExpr::group(std::move(members));
            return out;
        }
        const Token& var = expect_var();
        expect(Tok::Colon);
        auto type = parse_typeexpr();
        out.arg.var = var.text;
        if (type) {
            out.arg.type = std::move(*type);
        } else {
            out.valid = false;
        }
        return out;
    }

    ActionDef parse_action(Span decl_span) {
        ActionDef def;
        const Token& name = expect_name("action name");
        def.name = name.text;
        name_spans_.push_back(name.span);
        expect(Tok::LParen);
        do {
            def.params.push_back(expect_var().text);
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        expect(Tok::Define);

        const Token& kind = peek();
        if (kind.kind == Tok::Word && kind.text == "provide") {
            def.primitive.kind = PrimitiveKind::Provide;
        } else if (kind.kind == Tok::Word && kind.text == "request") {
            def.primitive.kind = PrimitiveKind::Request;
        } else {
            fail(kind, "'provide' or 'request'");
        }
        ++idx_;
        expect(Tok::LParen);
        bool valid = true;
        std::vector<Arg> args;
        do {
            ParsedArg a = parse_arg();
            valid = valid && a.valid;
            args.push_back(std::move(a.arg));
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        def.primitive.head = std::move(args.front());
        def.primitive.refs.assign(std::make_move_iterator(args.begin() + 1), std::make_move_iterator(args.end()));

        if (accept(Tok::LArrow)) {
            do {
                const Token& op_tok = peek();
                auto op_kind = op_tok.kind == Tok::Word ? parse_op_kind(op_tok.text) : std::nullopt;
                if (!op_kind) fail(op_tok, "operation 'select', 'map', 'modify' or 'create'");
                ++idx_;
                Operation op{*op_kind, {}};
                expect(Tok::LParen);
                do {
                    op.args.push_back(expect_var().text);
                } while (accept(Tok::Comma));
                expect(Tok::RParen);
                const auto bounds = arity_bounds(op.kind);
                if (op.args.size() < bounds.min || op.args.size() > bounds.max) {
                    error(codes::arity,
                          std::string(to_string(op.kind)) + " takes " + arity_text(bounds) + ", got " +
                              std::to_string(op.args.size()),
                          op_tok.span);
                    valid = false;
                }
                def.operations.push_back(std::move(op));
            } while (accept(Tok::Comma));
        }
        if (accept_word("doc")) def.doc = expect(Tok::String).text;
        expect(Tok::Semi);

        if (valid) {
            for (auto& d : action_invariants(def)) {
                if (d.code == codes::arity) continue;
                d.span = decl_span;
                d.path = path_;
                diags_.push_back(std::move(d));
            }
        }
        return def;
    }

public:
    std::optional<TypeExpr> parse_type_only() {
        try {
            std::optional<TypeExpr> type;
            if (peek().kind == Tok::LBracket && toks_[idx_ + 1].kind == Tok::Word &&
                toks_[idx_ + 2].kind == Tok::Colon) {
                ParsedArg a = parse_arg();
                if (a.valid) type = std::move(a.arg.type);
            } else {
                type = parse_typeexpr();
            }
            if (peek().kind != Tok::End || has_errors(diags_)) return std::nullopt;
            return type;
        } catch (const SyntaxError&) {
            return std::nullopt;
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }

    static std::string arity_text(ArityBounds b) {
        if (b.min == b.max) return "exactly " + std::to_string(b.min) + (b.min == 1 ? " argument" : " arguments");
        return std::to_string(b.min) + " to " + std::to_string(b.max) + " arguments";
    }

    Message parse_message() {
        Message msg;
        const Token& name = expect_name("message name");
        msg.name = name.text;
        name_spans_.push_back(name.span);
        expect(Tok::Define);
        const Token& sender = expect_name("sender role");
        expect(Tok::Arrow);
        const Token& receiver = expect_name("receiver role");
        msg.sender = AgentRole{sender.text};
        msg.receiver = AgentRole{receiver.text};
        refs_.push_back({0, sender.text, sender.span});
        refs_.push_back({0, receiver.text, receiver.span});
        expect(Tok::Colon);
        const Token& action = expect_name("action name");
        msg.action = action.text;
        refs_.push_back({1, action.text, action.span});
        expect(Tok::LParen);
        do {
            msg.args.push_back(expect_var().text);
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        if (accept(Tok::LBracket)) {
            std::set<std::string> keys;
            do {
                const Token& key = expect_name("modifier key");
                Modifier mod;
                mod.key = key.text;
                if (accept(Tok::Equals)) {
                    mod.value = expect(Tok::String).text;
                } else {
                    if (!is_variable_name(key.text)) fail(peek(), "'='");
                    expect(Tok::Colon);
                    mod.annotates_variable = true;
                    mod.value = expect_name("modifier value").text;
                    while (accept(Tok::Comma)) mod.value += "," + expect_name("modifier value").text;
                }
                if (!keys.insert(mod.key).second)
                    error(codes::dup_mod, "duplicate modifier key '" + mod.key + "'", key.span);
                msg.modifiers.push_back(std::move(mod));
            } while (accept(Tok::Semi));
            expect(Tok::RBracket);
        }
        expect(Tok::Semi);
        std::stable_sort(msg.modifiers.begin(), msg.modifiers.end(),
                         [](const Modifier& a, const Modifier& b) { return a.key < b.key; });
        return msg;
    }

    std::vector<std::string> parse_name_list(std::size_t ref_kind, std::string_view empty_code,
                                             const char* what) {
        std::vector<std::string> names;
        const Token& open = expect(Tok::LBracket);
        if (accept(Tok::RBracket)) {
            error(empty_code, std::string(what) + " must list at least one entry", open.span);
            return names;
        }
        do {
            const Token& n = expect_name("name");
            names.push_back(n.text);
            refs_.push_back({ref_kind, n.text, n.span});
        } while (accept(Tok::Comma));
        expect(Tok::RBracket);
        return names;
    }

    Pattern parse_pattern() {
        Pattern pat;
        const Token& name = expect_name("pattern name");
        pat.name = name.text;
        name_spans_.push_back(name.span);
        expect(Tok::Define);
        pat.messages = parse_name_list(2, codes::empty_pattern, "a pattern");
        if (accept(Tok::At)) {
            do {
                const Token& t = expect_name("tag");
                auto tag = parse_tag(t.text);
                if (!tag) {
                    error(codes::unknown_tag, "unknown tag '" + t.text + "' (expected xai, hitl, hi, control or query)",
                          t.span);
                } else {
                    pat.tags.insert(*tag);
                }
            } while (accept(Tok::Comma));
        }
        if (accept_word("note")) pat.notes = expect(Tok::String).text;
        expect(Tok::Semi);
        return pat;
    }

    Scenario parse_scenario() {
        Scenario sc;
        const Token& name = expect_name("scenario name");
        sc.name = name.text;
        name_spans_.push_back(name.span);
        expect(Tok::Define);
        sc.patterns = parse_name_list(3, codes::empty_scenario, "a scenario");
        expect(Tok::Semi);
        return sc;
    }

    void register_decl(const Decl& decl, std::size_t index) {
        const std::size_t kind = decl.node.index();
        const std::string& name = decl_name(decl.node);
        const Span span = name_spans_.back();
        auto [it, inserted] = declared_[kind].emplace(name, index);
        if (!inserted)
            error(codes::dup_name,
                  std::string(decl_keyword(decl.node)) + " '" + name + "' is already declared in this file", span);
        for (auto& r : refs_) pending_refs_.push_back({index, r});
    }

    void check_forward_refs(const SourceFile&) {
        for (const auto& [at, ref] : pending_refs_) {
            auto it = declared_[ref.kind].find(ref.name);
            if (it != declared_[ref.kind].end() && it->second > at) {
                static constexpr const char* kinds[] = {"role", "action", "message", "pattern", "scenario"};
                error(codes::forward_ref,
                      std::string(kinds[ref.kind]) + " '" + ref.name + "' is used before its declaration", ref.span);
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
    std::string path_;
    std::vector<Diagnostic> diags_;
    std::vector<CommentLine> interior_;
    std::vector<Reference> refs_;
    std::vector<Span> name_spans_;
    std::map<std::string, std::size_t> declared_[5];
    std::vector<std::pair<std::size_t, Reference>> pending_refs_;
};

}  // namespace

ParseResult parse(std::string_view text, std::string path) {
    auto lexed = detail::lex(text, path, max_diagnostics);
    if (!lexed.diagnostics.empty()) {
        ParseResult r;
        r.diagnostics = std::move(lexed.diagnostics);
        return r;
    }
    return Parser(std::move(lexed.tokens), std::move(path), {}).run();
}

std::optional<TypeExpr> parse_type(std::string_view text) {
    auto lexed = detail::lex(text, "<type>", max_diagnostics);
    if (!lexed.diagnostics.empty()) return std::nullopt;
    return Parser(std::move(lexed.tokens), "<type>", {}).parse_type_only();
}

}  // namespace haiproto::dsl
