#include <json.hpp>
#include <sstream>

#include "haiproto/dsl.hpp"
#include "haiproto/runtime.hpp"

namespace haiproto::runtime {

using nlohmann::json;

namespace {

json value_json(const Value& v) {
    struct Visitor {
        json operator()(const Symbol& s) const { return {{"symbol", s.text}}; }
        json operator()(double d) const { return {{"number", d}}; }
        json operator()(const std::vector<double>& xs) const { return {{"vector", xs}}; }
        json operator()(const ValueList& l) const {
            json items = json::array();
            for (const auto& i : l.items) items.push_back(value_json(i));
            return {{"list", items}};
        }
        json operator()(const BlobRef& b) const { return {{"blob", b.ref}}; }
    };
    return std::visit(Visitor{}, v.data);
}

Value value_from(const json& j) {
    if (!j.is_object() || j.size() != 1) throw std::invalid_argument("value must be a one-key object");
    const auto& [key, v] = *j.items().begin();
    if (key == "symbol") return Value{Symbol{v.get<std::string>()}};
    if (key == "number") return Value{v.get<double>()};
    if (key == "vector") return Value{v.get<std::vector<double>>()};
    if (key == "blob") return Value{BlobRef{v.get<std::string>()}};
    if (key == "list") {
        ValueList l;
        for (const auto& i : v) l.items.push_back(value_from(i));
        return Value{l};
    }
    throw std::invalid_argument("unknown value kind '" + key + "'");
}

json header(const Trace& t, const char* kind) {
    return {{"kind", kind}, {"run", t.run_id}, {"pattern", t.pattern}, {"seed", t.seed}, {"repetition", t.repetition}};
}

}  // namespace

std::string to_jsonl(const std::vector<Trace>& traces) {
    std::string out;
    for (const auto& t : traces) {
        for (const auto& st : t.steps) {
            json j = header(t, "step");
            j["step"] = st.step;
            j["message"] = st.message;
            j["sender"] = st.sender;
            j["receiver"] = st.receiver;
            j["action"] = st.action;
            json b = json::object();
            for (const auto& [var, p] : st.bindings) b[var] = {{"type", p.tag.to_string()}, {"value", value_json(p.value)}};
            j["bindings"] = b;
            j["verdict"] = st.violation ? "violation" : "conformant";
            if (st.violation) j["code"] = *st.violation;
            if (!st.detail.empty()) j["detail"] = st.detail;
            out += j.dump() + "\n";
        }
        json o = header(t, "outcome");
        o["status"] = t.outcome.completed ? "completed" : "aborted";
        o["steps"] = t.steps.size();
        if (!t.outcome.completed) {
            o["step"] = t.outcome.step;
            o["code"] = t.outcome.code;
        }
        out += o.dump() + "\n";
    }
    return out;
}

std::vector<Trace> parse_jsonl(std::string_view text) {
    std::vector<Trace> out;
    std::optional<Trace> current;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    try {
        while (std::getline(in, line)) {
            ++n;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const json j = json::parse(line);
            const std::string run = j.at("run").get<std::string>();
            if (!current || current->run_id != run) {
                if (current) throw std::invalid_argument("run '" + current->run_id + "' has no outcome record");
                current.emplace();
                current->run_id = run;
                current->pattern = j.at("pattern").get<std::string>();
                current->seed = j.at("seed").get<std::uint64_t>();
                current->repetition = j.at("repetition").get<std::size_t>();
            }
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "step") {
                TraceStep st;
                st.step = j.at("step").get<std::size_t>();
                st.message = j.at("message").get<std::string>();
                st.sender = j.at("sender").get<std::string>();
                st.receiver = j.at("receiver").get<std::string>();
                st.action = j.at("action").get<std::string>();
                for (const auto& [var, b] : j.at("bindings").items()) {
                    auto tag = dsl::parse_type(b.at("type").get<std::string>());
                    if (!tag) throw std::invalid_argument("bad type tag for " + var);
                    st.bindings.emplace(var, Payload{*tag, value_from(b.at("value"))});
                }
                if (j.at("verdict") == "violation") st.violation = j.at("code").get<std::string>();
                if (j.contains("detail")) st.detail = j.at("detail").get<std::string>();
                current->steps.push_back(std::move(st));
            } else if (kind == "outcome") {
                current->outcome.completed = j.at("status") == "completed";
                if (!current->outcome.completed) {
                    current->outcome.step = j.at("step").get<std::size_t>();
                    current->outcome.code = j.at("code").get<std::string>();
                }
                out.push_back(std::move(*current));
                current.reset();
            } else {
                throw std::invalid_argument("unknown record kind '" + kind + "'");
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument("trace line " + std::to_string(n) + ": " + e.what());
    }
    if (current) throw std::invalid_argument("run '" + current->run_id + "' has no outcome record");
    return out;
}

}  // namespace haiproto::runtime
