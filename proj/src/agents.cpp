#include "haiproto/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "haiproto/dsl.hpp"

namespace haiproto::agents {

void Script::add(const std::string& message, const std::string& var, Response response) {
    entries_[{message, var}].push_back(std::move(response));
}

bool Script::has(const std::string& message, const std::string& var) const {
    return entries_.count({message, var}) > 0;
}

const std::vector<Response>& Script::responses(const std::string& message, const std::string& var) const {
    static const std::vector<Response> none;
    auto it = entries_.find({message, var});
    return it == entries_.end() ? none : it->second;
}

Payload realize(const Response& response, const TypeExpr& slot_type, const Binding& binding) {
    const TypeExpr tag = response.tag.value_or(slot_type);
    if (response.judge) {
        const auto& [a, b] = *response.judge;
        const BoundVariable* x = binding.find(a);
        const BoundVariable* y = binding.find(b);
        if (!x || !x->payload || !y || !y->payload)
            throw std::runtime_error("judge(" + a + ", " + b + ") needs both variables bound");
        return {tag, Value{Symbol{x->payload->value == y->payload->value ? "accept" : "reject"}}};
    }
    return {tag, *response.value};
}

namespace {

const Response* next_response(const Script& script, const runtime::MessageTemplate& tmpl, const std::string& var,
                              std::map<std::pair<std::string, std::string>, std::size_t>& cursor) {
    const auto& options = script.responses(tmpl.message->name, var);
    if (options.empty()) return nullptr;
    std::size_t& i = cursor[{tmpl.message->name, var}];
    return &options[i++ % options.size()];
}

[[noreturn]] void no_response(const runtime::MessageTemplate& tmpl, const std::string& var) {
    throw std::runtime_error("no response for " + tmpl.message->name + "." + var);
}

}  // namespace

void ScriptedAgent::begin(std::uint64_t) {
    cursor_.clear();
}

runtime::Payloads ScriptedAgent::produce(const runtime::MessageTemplate& tmpl, const Binding& binding) {
    runtime::Payloads out;
    for (const auto& var : tmpl.unbound(binding)) {
        const Response* r = next_response(*script_, tmpl, var, cursor_);
        if (!r) no_response(tmpl, var);
        out.emplace(var, realize(*r, tmpl.slot(var)->type, binding));
    }
    return out;
}

void RandomAgent::begin(std::uint64_t seed) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : role_) h = (h ^ c) * 16777619u;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), h};
    rng_.seed(seq);
}

runtime::Payloads RandomAgent::produce(const runtime::MessageTemplate& tmpl, const Binding& binding) {
    runtime::Payloads out;
    for (const auto& var : tmpl.unbound(binding)) {
        const auto& options = script_->responses(tmpl.message->name, var);
        if (options.empty()) no_response(tmpl, var);
        // Modulo keeps the choice identical across standard libraries.
        const Response& r = options[static_cast<std::size_t>(rng_() % options.size())];
        out.emplace(var, realize(r, tmpl.slot(var)->type, binding));
    }
    return out;
}

void NearestCentroid::add(std::vector<double> x, std::string label) {
    if (!examples_.empty() && examples_.front().x.size() != x.size())
        throw std::logic_error("example dimension " + std::to_string(x.size()) + " differs from " +
                               std::to_string(examples_.front().x.size()));
    examples_.push_back({std::move(x), std::move(label)});
}

std::map<std::string, std::vector<double>> NearestCentroid::centroids() const {
    std::map<std::string, std::vector<double>> sums;
    std::map<std::string, std::size_t> counts;
    for (const auto& e : examples_) {
        auto& s = sums[e.label];
        s.resize(e.x.size(), 0.0);
        for (std::size_t i = 0; i < e.x.size(); ++i) s[i] += e.x[i];
        ++counts[e.label];
    }
    for (auto& [label, s] : sums)
        for (double& v : s) v /= static_cast<double>(counts[label]);
    return sums;
}

std::string NearestCentroid::classify(const std::vector<double>& x) const {
    if (examples_.empty()) throw std::logic_error("classify on an empty training set");
    if (examples_.front().x.size() != x.size())
        throw std::logic_error("input dimension " + std::to_string(x.size()) + " differs from " +
                               std::to_string(examples_.front().x.size()));
    std::string best;
    double best_d = std::numeric_limits<double>::infinity();
    // Map order visits labels lexicographically; strict < keeps the first on ties.
    for (const auto& [label, c] : centroids()) {
        double d = 0;
        for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - c[i]) * (x[i] - c[i]);
        if (best.empty() || d < best_d) {
            best = label;
            best_d = d;
        }
    }
    return best;
}

void StubModelAgent::begin(std::uint64_t) {
    cursor_.clear();
}

void StubModelAgent::on_receive(const runtime::ConcreteMessage& msg, const runtime::RunState& state) {
    if (!learn_.count(msg.tmpl->action->name) || !state.binding) return;
    const std::vector<double>* x = nullptr;
    const std::string* label = nullptr;
    for (const auto& s : msg.tmpl->slots) {
        const BoundVariable* b = state.binding->find(s.var);
        if (!b || !b->payload) continue;
        const Value& v = b->payload->value;
        if (!x) x = std::get_if<std::vector<double>>(&v.data);
        if (!label && s.type.is_base() && s.type.role() == Role::Output)
            if (auto* sym = std::get_if<Symbol>(&v.data)) label = &sym->text;
    }
    if (x && label) model_.add(*x, *label);
}

runtime::Payloads StubModelAgent::produce(const runtime::MessageTemplate& tmpl, const Binding& binding) {
    runtime::Payloads out;
    std::vector<std::string> predicted;
    for (const auto& var : tmpl.unbound(binding)) {
        if (const Response* r = next_response(*script_, tmpl, var, cursor_)) {
            out.emplace(var, realize(*r, tmpl.slot(var)->type, binding));
            continue;
        }
        const TypeExpr& type = tmpl.slot(var)->type;
        if (!type.is_base() || type.role() != Role::Output) no_response(tmpl, var);
        predicted.push_back(var);
    }
    // Predictions see the scripted values of this message as well as the binding.
    for (const auto& var : predicted) {
        const std::vector<double>* x = nullptr;
        for (const auto& s : tmpl.slots) {
            if (!s.type.is_base() || s.type.role() != Role::Input) continue;
            const Payload* p = nullptr;
            if (const BoundVariable* b = binding.find(s.var); b && b->payload) p = &*b->payload;
            else if (auto it = out.find(s.var); it != out.end()) p = &it->second;
            if (p && (x = std::get_if<std::vector<double>>(&p->value.data))) break;
        }
        if (!x) no_response(tmpl, var);
        out.emplace(var, Payload{tmpl.slot(var)->type, Value{Symbol{model_.classify(*x)}}});
    }
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

Response parse_response(std::size_t line, std::string text) {
    Response r;
    if (!text.empty() && text.front() == '<') {
        const auto close = text.find('>');
        if (close == std::string::npos) throw AgentsError(line, "unterminated type tag");
        r.tag = dsl::parse_type(text.substr(1, close - 1));
        if (!r.tag) throw AgentsError(line, "malformed type tag '" + text.substr(1, close - 1) + "'");
        text = trim(text.substr(close + 1));
    }
    if (text.rfind("judge(", 0) == 0 && text.back() == ')') {
        const std::string inner = text.substr(6, text.size() - 7);
        const auto comma = inner.find(',');
        if (comma == std::string::npos) throw AgentsError(line, "judge needs two variables");
        r.judge = std::make_pair(trim(inner.substr(0, comma)), trim(inner.substr(comma + 1)));
        return r;
    }
    try {
        r.value = parse_value(text);
    } catch (const std::invalid_argument& e) {
        throw AgentsError(line, e.what());
    }
    return r;
}

}  // namespace

AgentsFile parse_agents(std::string_view text) {
    AgentsFile file;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s.rfind("//", 0) == 0) continue;

        if (s.rfind("agent ", 0) == 0) {
            const auto colon = s.find(':');
            if (colon == std::string::npos) throw AgentsError(line, "expected 'agent ROLE : KIND'");
            const std::string role = trim(s.substr(6, colon - 6));
            const std::string kind = trim(s.substr(colon + 1));
            if (!is_identifier(role)) throw AgentsError(line, "bad role name '" + role + "'");
            AgentKind k;
            if (kind == "scripted") k = AgentKind::Scripted;
            else if (kind == "random") k = AgentKind::Random;
            else if (kind == "stub-model") k = AgentKind::StubModel;
            else throw AgentsError(line, "unknown agent kind '" + kind + "'");
            if (!file.roles.emplace(role, k).second) throw AgentsError(line, "role '" + role + "' declared twice");
            continue;
        }
        if (s.rfind("learn ", 0) == 0) {
            file.learn.insert(trim(s.substr(6)));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw AgentsError(line, "expected '='");
        const std::string lhs = trim(s.substr(0, eq));
        const std::string rhs = trim(s.substr(eq + 1));
        if (rhs.empty()) throw AgentsError(line, "missing value");
        if (lhs.rfind("example ", 0) == 0) {
            Value x;
            try {
                x = parse_value(lhs.substr(8));
            } catch (const std::invalid_argument& e) {
                throw AgentsError(line, e.what());
            }
            const auto* vec = std::get_if<std::vector<double>>(&x.data);
            if (!vec || !is_identifier(rhs)) throw AgentsError(line, "expected 'example (x, ...) = label'");
            file.examples.push_back({*vec, rhs});
            continue;
        }
        const auto dot = lhs.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size())
            throw AgentsError(line, "expected 'MESSAGE.VAR = value'");
        const std::string var = lhs.substr(dot + 1);
        if (!is_variable_name(var)) throw AgentsError(line, "'" + var + "' is not a variable name");
        file.script.add(lhs.substr(0, dot), var, parse_response(line, rhs));
    }
    return file;
}

AgentSet instantiate(const AgentsFile& file) {
    AgentSet out;
    auto script = std::make_shared<const Script>(file.script);
    for (const auto& [role, kind] : file.roles) {
        switch (kind) {
        case AgentKind::Scripted: out.agents[role] = std::make_shared<ScriptedAgent>(script); break;
        case AgentKind::Random: out.agents[role] = std::make_shared<RandomAgent>(role, script); break;
        case AgentKind::StubModel: {
            auto model = std::make_shared<StubModelAgent>(script, file.learn);
            for (const auto& e : file.examples) model->add_example(e.x, e.label);
            out.models[role] = model;
            out.agents[role] = model;
            break;
        }
        }
    }
    return out;
}

}  // namespace haiproto::agents
