#include "haiproto/core.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace haiproto {

std::string_view to_string(Role role) {
    switch (role) {
    case Role::Input: return "input";
    case Role::Output: return "output";
    case Role::Feedback: return "feedback";
    }
    return "input";
}

std::optional<Role> parse_role(std::string_view text) {
    if (text == "input") return Role::Input;
    if (text == "output") return Role::Output;
    if (text == "feedback") return Role::Feedback;
    return std::nullopt;
}

static bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

static bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}

bool is_identifier(std::string_view text) {
    if (text.empty() || !ident_start(text.front()) || !ident_char(text.back())) return false;
    for (char c : text)
        if (!ident_char(c) && c != '-') return false;
    return true;
}

bool is_variable_name(std::string_view text) {
    return is_identifier(text) && text.front() >= 'A' && text.front() <= 'Z';
}

TypeExpr TypeExpr::base(Role role, std::vector<std::string> subtypes) {
    for (std::size_t i = 0; i < subtypes.size(); ++i) {
        if (!is_identifier(subtypes[i]))
            throw std::invalid_argument("subtype is not an identifier: '" + subtypes[i] + "'");
        for (std::size_t j = 0; j < i; ++j)
            if (subtypes[j] == subtypes[i])
                throw std::invalid_argument("duplicate subtype '" + subtypes[i] + "'");
    }
    TypeExpr t;
    t.kind_ = Kind::Base;
    t.role_ = role;
    t.subtypes_ = std::move(subtypes);
    return t;
}

TypeExpr TypeExpr::list(TypeExpr element) {
    if (!element.is_base()) throw std::invalid_argument("list element must be a base type");
    TypeExpr t;
    t.kind_ = Kind::List;
    t.element_.push_back(std::move(element));
    return t;
}

TypeExpr TypeExpr::group(std::vector<Member> members) {
    if (members.size() < 2) throw std::invalid_argument("group needs at least two members");
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!is_variable_name(members[i].name))
            throw std::invalid_argument("bad group member name '" + members[i].name + "'");
        if (members[i].type.is_group()) throw std::invalid_argument("nested group");
        for (std::size_t j = 0; j < i; ++j)
            if (members[j].name == members[i].name)
                throw std::invalid_argument("duplicate group member '" + members[i].name + "'");
    }
    TypeExpr t;
    t.kind_ = Kind::Group;
    t.members_ = std::move(members);
    return t;
}

const TypeExpr& TypeExpr::element() const {
    if (!is_list()) throw std::logic_error("element() on a non-list type");
    return element_.front();
}

bool TypeExpr::operator==(const TypeExpr& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
    case Kind::Base: return role_ == other.role_ && subtypes_ == other.subtypes_;
    case Kind::List: return element_ == other.element_;
    case Kind::Group: return members_ == other.members_;
    }
    return false;
}

std::string TypeExpr::to_string() const {
    switch (kind_) {
    case Kind::Base: {
        std::string out{haiproto::to_string(role_)};
        for (std::size_t i = 0; i < subtypes_.size(); ++i) {
            out += i == 0 ? "." : "|";
            out += subtypes_[i];
        }
        return out;
    }
    case Kind::List: return "[" + element_.front().to_string() + "]";
    case Kind::Group: {
        std::string out = "[";
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (i) out += ", ";
            out += members_[i].name + ": " + members_[i].type.to_string();
        }
        return out + "]";
    }
    }
    return {};
}

static bool subtypes_meet(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return true;
    for (const auto& s : a)
        if (std::find(b.begin(), b.end(), s) != b.end()) return true;
    return false;
}

bool type_compatible(const TypeExpr& expected, const TypeExpr& actual) {
    if (expected.kind() != actual.kind()) return false;
    switch (expected.kind()) {
    case TypeExpr::Kind::Base:
        return expected.role() == actual.role() && subtypes_meet(expected.subtypes(), actual.subtypes());
    case TypeExpr::Kind::List:
        return type_compatible(expected.element(), actual.element());
    case TypeExpr::Kind::Group: {
        const auto& a = expected.members();
        const auto& b = actual.members();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!type_compatible(a[i].type, b[i].type)) return false;
        return true;
    }
    }
    return false;
}

TypeExpr narrow(const TypeExpr& a, const TypeExpr& b) {
    if (!type_compatible(a, b)) throw std::invalid_argument("narrow() on incompatible types");
    switch (a.kind()) {
    case TypeExpr::Kind::Base: {
        if (a.subtypes().empty()) return b;
        if (b.subtypes().empty()) return a;
        std::vector<std::string> common;
        for (const auto& s : a.subtypes())
            if (std::find(b.subtypes().begin(), b.subtypes().end(), s) != b.subtypes().end())
                common.push_back(s);
        return TypeExpr::base(a.role(), std::move(common));
    }
    case TypeExpr::Kind::List:
        return TypeExpr::list(narrow(a.element(), b.element()));
    case TypeExpr::Kind::Group: {
        std::vector<TypeExpr::Member> members;
        for (std::size_t i = 0; i < a.members().size(); ++i)
            members.push_back({a.members()[i].name, narrow(a.members()[i].type, b.members()[i].type)});
        return TypeExpr::group(std::move(members));
    }
    }
    return a;
}

std::string_view to_string(PrimitiveKind kind) {
    return kind == PrimitiveKind::Provide ? "provide" : "request";
}

std::string_view to_string(OpKind kind) {
    switch (kind) {
    case OpKind::Select: return "select";
    case OpKind::Map: return "map";
    case OpKind::Modify: return "modify";
    case OpKind::Create: return "create";
    }
    return "select";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
    if (text == "select") return OpKind::Select;
    if (text == "map") return OpKind::Map;
    if (text == "modify") return OpKind::Modify;
    if (text == "create") return OpKind::Create;
    return std::nullopt;
}

ArityBounds arity_bounds(OpKind kind) {
    switch (kind) {
    case OpKind::Select: return {1, 2};
    case OpKind::Map: return {2, 3};
    case OpKind::Modify: return {2, 2};
    case OpKind::Create: return {1, 1};
    }
    return {0, 0};
}

static void flatten(const Arg& arg, bool head, std::vector<ScopeEntry>& out) {
    if (arg.type.is_group()) {
        for (const auto& m : arg.type.members()) out.push_back({m.name, m.type, head});
    } else {
        out.push_back({arg.var.value_or(""), arg.type, head});
    }
}

std::vector<ScopeEntry> action_scope(const ActionDef& def) {
    std::vector<ScopeEntry> out;
    flatten(def.primitive.head, true, out);
    for (const auto& r : def.primitive.refs) flatten(r, false, out);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (out[j].var == out[i].var)
                throw std::logic_error("duplicate variable '" + out[i].var + "' in action '" + def.name + "'");
    return out;
}

std::optional<TypeExpr> scope_type(const ActionDef& def, std::string_view var) {
    std::vector<ScopeEntry> entries;
    flatten(def.primitive.head, true, entries);
    for (const auto& r : def.primitive.refs) flatten(r, false, entries);
    for (const auto& e : entries)
        if (e.var == var) return e.type;
    return std::nullopt;
}

std::string direction(const Message& msg) {
    return msg.sender.name + "->" + msg.receiver.name;
}

std::string_view to_string(Tag tag) {
    switch (tag) {
    case Tag::Xai: return "xai";
    case Tag::Hitl: return "hitl";
    case Tag::Hi: return "hi";
    case Tag::Control: return "control";
    case Tag::Query: return "query";
    }
    return "xai";
}

std::optional<Tag> parse_tag(std::string_view text) {
    for (Tag t : all_tags())
        if (to_string(t) == text) return t;
    return std::nullopt;
}

const std::vector<Tag>& all_tags() {
    static const std::vector<Tag> tags{Tag::Xai, Tag::Hitl, Tag::Hi, Tag::Control, Tag::Query};
    return tags;
}

template <class Map>
static auto find_in(const Map& map, std::string_view name) -> const typename Map::mapped_type* {
    auto it = map.find(std::string(name));
    return it == map.end() ? nullptr : &it->second;
}

const ActionDef* Corpus::find_action(std::string_view name) const { return find_in(actions, name); }
const Message* Corpus::find_message(std::string_view name) const { return find_in(messages, name); }
const Pattern* Corpus::find_pattern(std::string_view name) const { return find_in(patterns, name); }
const Scenario* Corpus::find_scenario(std::string_view name) const { return find_in(scenarios, name); }

bool ValueList::operator==(const ValueList& other) const { return items == other.items; }

static std::string format_number(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    // Prefer the shortest representation that round-trips.
    for (int p = 1; p <= 17; ++p) {
        std::ostringstream s;
        s.precision(p);
        s << d;
        if (std::stod(s.str()) == d) return s.str();
    }
    return os.str();
}

std::string to_string(const Value& value) {
    struct Visitor {
        std::string operator()(const Symbol& s) const { return s.text; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(const std::vector<double>& v) const {
            std::string out = "(";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ", ";
                out += format_number(v[i]);
            }
            return out + ")";
        }
        std::string operator()(const ValueList& l) const {
            std::string out = "[";
            for (std::size_t i = 0; i < l.items.size(); ++i) {
                if (i) out += ", ";
                out += to_string(l.items[i]);
            }
            return out + "]";
        }
        std::string operator()(const BlobRef& b) const { return "blob:" + b.ref; }
    };
    return std::visit(Visitor{}, value.data);
}

bool well_shaped(const Payload& payload) {
    const bool is_list_value = std::holds_alternative<ValueList>(payload.value.data);
    if (payload.tag.is_group()) return false;
    if (payload.tag.is_list() != is_list_value) return false;
    if (is_list_value)
        for (const auto& item : std::get<ValueList>(payload.value.data).items)
            if (std::holds_alternative<ValueList>(item.data)) return false;
    return true;
}

Binding::Result Binding::bind_type(const std::string& var, const TypeExpr& type) {
    auto it = vars_.find(var);
    if (it == vars_.end()) {
        vars_.emplace(var, BoundVariable{type, std::nullopt});
        return Result::Fresh;
    }
    if (!type_compatible(it->second.type, type)) return Result::Conflict;
    it->second.type = narrow(it->second.type, type);
    return Result::Narrowed;
}

bool Binding::set_payload(const std::string& var, Payload payload) {
    auto it = vars_.find(var);
    if (it == vars_.end() || it->second.payload) return false;
    it->second.payload = std::move(payload);
    return true;
}

const BoundVariable* Binding::find(std::string_view var) const {
    auto it = vars_.find(var);
    return it == vars_.end() ? nullptr : &it->second;
}

bool Binding::has_payload(std::string_view var) const {
    const auto* b = find(var);
    return b && b->payload.has_value();
}

}  // namespace haiproto
