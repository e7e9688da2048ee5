#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace haiproto {

enum class Role { Input, Output, Feedback };

[[nodiscard]] std::string_view to_string(Role role);
[[nodiscard]] std::optional<Role> parse_role(std::string_view text);

// Type language for communicated information: `input.raw_data|fvector`,
// `[output.label]`, `[X: input, Y: output]`.
class TypeExpr {
public:
    // The input wildcard.
    TypeExpr() = default;

    enum class Kind { Base, List, Group };
    struct Member;

    // Factories enforce the invariants and throw std::invalid_argument.
    [[nodiscard]] static TypeExpr base(Role role, std::vector<std::string> subtypes = {});
    [[nodiscard]] static TypeExpr list(TypeExpr element);
    [[nodiscard]] static TypeExpr group(std::vector<Member> members);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_base() const { return kind_ == Kind::Base; }
    [[nodiscard]] bool is_list() const { return kind_ == Kind::List; }
    [[nodiscard]] bool is_group() const { return kind_ == Kind::Group; }

    // Base only.
    [[nodiscard]] Role role() const { return role_; }
    [[nodiscard]] const std::vector<std::string>& subtypes() const { return subtypes_; }
    // List only.
    [[nodiscard]] const TypeExpr& element() const;
    // Group only.
    [[nodiscard]] const std::vector<Member>& members() const { return members_; }

    [[nodiscard]] std::string to_string() const;

    bool operator==(const TypeExpr& other) const;

private:

    Kind kind_ = Kind::Base;
    Role role_ = Role::Input;
    std::vector<std::string> subtypes_;
    std::vector<TypeExpr> element_;
    std::vector<Member> members_;
};

struct TypeExpr::Member {
    std::string name;
    TypeExpr type;
    bool operator==(const Member&) const = default;
};

[[nodiscard]] bool is_identifier(std::string_view text);
[[nodiscard]] bool is_variable_name(std::string_view text);

[[nodiscard]] bool type_compatible(const TypeExpr& expected, const TypeExpr& actual);

// Most specific type admitted by both arguments; requires type_compatible(a, b).
[[nodiscard]] TypeExpr narrow(const TypeExpr& a, const TypeExpr& b);

enum class PrimitiveKind { Provide, Request };

[[nodiscard]] std::string_view to_string(PrimitiveKind kind);

// A primitive argument. Group arguments carry no variable of their own.
struct Arg {
    std::optional<std::string> var;
    TypeExpr type;
    bool operator==(const Arg&) const = default;
};

struct PrimitiveSpec {
    PrimitiveKind kind = PrimitiveKind::Provide;
    Arg head;
    std::vector<Arg> refs;
    bool operator==(const PrimitiveSpec&) const = default;
};

enum class OpKind { Select, Map, Modify, Create };

[[nodiscard]] std::string_view to_string(OpKind kind);
[[nodiscard]] std::optional<OpKind> parse_op_kind(std::string_view text);

struct ArityBounds {
    std::size_t min;
    std::size_t max;
};

[[nodiscard]] ArityBounds arity_bounds(OpKind kind);

struct Operation {
    OpKind kind = OpKind::Select;
    std::vector<std::string> args;
    bool operator==(const Operation&) const = default;
};

struct ActionDef {
    std::string name;
    std::vector<std::string> params;
    PrimitiveSpec primitive;
    std::vector<Operation> operations;
    std::string doc;
    bool operator==(const ActionDef&) const = default;
};

struct ScopeEntry {
    std::string var;
    TypeExpr type;
    bool head = false;
    bool operator==(const ScopeEntry&) const = default;
};

// Every declared variable, group members flattened, in declaration order.
// Throws std::logic_error on a duplicate variable.
[[nodiscard]] std::vector<ScopeEntry> action_scope(const ActionDef& def);

// Type of a declared variable, or nullopt.
[[nodiscard]] std::optional<TypeExpr> scope_type(const ActionDef& def, std::string_view var);

struct AgentRole {
    std::string name;
    auto operator<=>(const AgentRole&) const = default;
};

inline const AgentRole user_role{"user"};
inline const AgentRole model_role{"model"};

struct Modifier {
    std::string key;
    std::string value;
    // `X:WalkStand` style; false for `key="..."`.
    bool annotates_variable = false;
    bool operator==(const Modifier&) const = default;
};

struct Message {
    std::string name;
    AgentRole sender;
    AgentRole receiver;
    std::string action;
    std::vector<std::string> args;
    std::vector<Modifier> modifiers;
    bool operator==(const Message&) const = default;
};

[[nodiscard]] std::string direction(const Message& msg);

enum class Tag { Xai, Hitl, Hi, Control, Query };

[[nodiscard]] std::string_view to_string(Tag tag);
[[nodiscard]] std::optional<Tag> parse_tag(std::string_view text);
[[nodiscard]] const std::vector<Tag>& all_tags();

struct Pattern {
    std::string name;
    std::vector<std::string> messages;
    std::set<Tag> tags;
    std::string notes;
    bool operator==(const Pattern&) const = default;
};

struct Scenario {
    std::string name;
    std::vector<std::string> patterns;
    bool operator==(const Scenario&) const = default;
};

// All declarations of a corpus, keyed per kind.
struct Corpus {
    std::set<std::string> roles{user_role.name, model_role.name};
    std::map<std::string, ActionDef> actions;
    std::map<std::string, Message> messages;
    std::map<std::string, Pattern> patterns;
    std::map<std::string, Scenario> scenarios;

    [[nodiscard]] const ActionDef* find_action(std::string_view name) const;
    [[nodiscard]] const Message* find_message(std::string_view name) const;
    [[nodiscard]] const Pattern* find_pattern(std::string_view name) const;
    [[nodiscard]] const Scenario* find_scenario(std::string_view name) const;
};

// Concrete values exchanged at run time.
struct Symbol {
    std::string text;
    bool operator==(const Symbol&) const = default;
};

struct BlobRef {
    std::string ref;
    bool operator==(const BlobRef&) const = default;
};

struct Value;

struct ValueList {
    std::vector<Value> items;
    bool operator==(const ValueList& other) const;
};

struct Value {
    std::variant<Symbol, double, std::vector<double>, ValueList, BlobRef> data;
    bool operator==(const Value&) const = default;
};

[[nodiscard]] std::string to_string(const Value& value);

struct Payload {
    TypeExpr tag;
    Value value;
    bool operator==(const Payload&) const = default;
};

// True when the value shape matches the tag (List tag iff list value, no groups).
[[nodiscard]] bool well_shaped(const Payload& payload);

struct BoundVariable {
    TypeExpr type;
    std::optional<Payload> payload;
    bool operator==(const BoundVariable&) const = default;
};

class Binding {
public:
    enum class Result { Fresh, Narrowed, Conflict };

    // Accumulates `type` for `var`; Conflict leaves the binding unchanged.
    Result bind_type(const std::string& var, const TypeExpr& type);
    // Requires a prior compatible bind_type; returns false if a payload exists.
    bool set_payload(const std::string& var, Payload payload);

    [[nodiscard]] const BoundVariable* find(std::string_view var) const;
    [[nodiscard]] bool has_payload(std::string_view var) const;
    [[nodiscard]] const std::map<std::string, BoundVariable, std::less<>>& variables() const { return vars_; }

private:
    std::map<std::string, BoundVariable, std::less<>> vars_;
};

}  // namespace haiproto
