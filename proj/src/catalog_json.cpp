#include <json.hpp>

#include "haiproto/catalog.hpp"

namespace haiproto {

using nlohmann::json;

namespace {

json arg_json(const Arg& arg) {
    json j;
    j["type"] = arg.type.to_string();
    if (arg.var) j["var"] = *arg.var;
    return j;
}

Arg arg_from(const json& j) {
    auto type = dsl::parse_type(j.at("type").get<std::string>());
    if (!type) throw std::invalid_argument("bad type expression " + j.at("type").dump());
    Arg arg{std::nullopt, *type};
    if (j.contains("var")) arg.var = j.at("var").get<std::string>();
    return arg;
}

json action_json(const ActionDef& a) {
    json refs = json::array();
    for (const auto& r : a.primitive.refs) refs.push_back(arg_json(r));
    json ops = json::array();
    for (const auto& op : a.operations) ops.push_back({{"op", to_string(op.kind)}, {"args", op.args}});
    return {{"name", a.name},
            {"params", a.params},
            {"primitive", {{"kind", to_string(a.primitive.kind)}, {"head", arg_json(a.primitive.head)}, {"refs", refs}}},
            {"operations", ops},
            {"doc", a.doc}};
}

ActionDef action_from(const json& j) {
    ActionDef a;
    a.name = j.at("name").get<std::string>();
    a.params = j.at("params").get<std::vector<std::string>>();
    const json& prim = j.at("primitive");
    const auto kind = prim.at("kind").get<std::string>();
    if (kind != "provide" && kind != "request") throw std::invalid_argument("bad primitive kind " + kind);
    a.primitive.kind = kind == "provide" ? PrimitiveKind::Provide : PrimitiveKind::Request;
    a.primitive.head = arg_from(prim.at("head"));
    for (const auto& r : prim.at("refs")) a.primitive.refs.push_back(arg_from(r));
    for (const auto& op : j.at("operations")) {
        auto k = parse_op_kind(op.at("op").get<std::string>());
        if (!k) throw std::invalid_argument("bad operation " + op.at("op").dump());
        a.operations.push_back({*k, op.at("args").get<std::vector<std::string>>()});
    }
    a.doc = j.value("doc", "");
    return a;
}

json message_json(const Message& m) {
    json mods = json::array();
    for (const auto& mod : m.modifiers)
        mods.push_back({{"key", mod.key}, {"value", mod.value}, {"variable", mod.annotates_variable}});
    return {{"name", m.name},         {"sender", m.sender.name}, {"receiver", m.receiver.name},
            {"action", m.action},     {"args", m.args},          {"modifiers", mods}};
}

Message message_from(const json& j) {
    Message m;
    m.name = j.at("name").get<std::string>();
    m.sender = AgentRole{j.at("sender").get<std::string>()};
    m.receiver = AgentRole{j.at("receiver").get<std::string>()};
    m.action = j.at("action").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    for (const auto& mod : j.at("modifiers"))
        m.modifiers.push_back({mod.at("key").get<std::string>(), mod.at("value").get<std::string>(),
                               mod.at("variable").get<bool>()});
    return m;
}

json pattern_json(const Pattern& p) {
    json tags = json::array();
    for (Tag t : p.tags) tags.push_back(to_string(t));
    return {{"name", p.name}, {"messages", p.messages}, {"tags", tags}, {"notes", p.notes}};
}

Pattern pattern_from(const json& j) {
    Pattern p;
    p.name = j.at("name").get<std::string>();
    p.messages = j.at("messages").get<std::vector<std::string>>();
    for (const auto& t : j.at("tags")) {
        auto tag = parse_tag(t.get<std::string>());
        if (!tag) throw std::invalid_argument("bad tag " + t.dump());
        p.tags.insert(*tag);
    }
    p.notes = j.value("notes", "");
    return p;
}

}  // namespace

std::string export_json(const Corpus& corpus, int indent) {
    json out;
    out["roles"] = corpus.roles;
    out["actions"] = json::array();
    for (const auto& [name, a] : corpus.actions) out["actions"].push_back(action_json(a));
    out["messages"] = json::array();
    for (const auto& [name, m] : corpus.messages) out["messages"].push_back(message_json(m));
    out["patterns"] = json::array();
    for (const auto& [name, p] : corpus.patterns) out["patterns"].push_back(pattern_json(p));
    out["scenarios"] = json::array();
    for (const auto& [name, s] : corpus.scenarios)
        out["scenarios"].push_back({{"name", s.name}, {"patterns", s.patterns}});
    return out.dump(indent) + "\n";
}

Corpus import_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        Corpus c;
        for (const auto& r : j.at("roles")) c.roles.insert(r.get<std::string>());
        for (const auto& a : j.at("actions")) {
            auto def = action_from(a);
            c.actions.emplace(def.name, std::move(def));
        }
        for (const auto& m : j.at("messages")) {
            auto msg = message_from(m);
            c.messages.emplace(msg.name, std::move(msg));
        }
        for (const auto& p : j.at("patterns")) {
            auto pat = pattern_from(p);
            c.patterns.emplace(pat.name, std::move(pat));
        }
        for (const auto& s : j.at("scenarios")) {
            Scenario sc{s.at("name").get<std::string>(), s.at("patterns").get<std::vector<std::string>>()};
            c.scenarios.emplace(sc.name, std::move(sc));
        }
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed catalog JSON: ") + e.what());
    }
}

}  // namespace haiproto
