#include "haiproto/runtime.hpp"

#include <algorithm>

#include "haiproto/catalog.hpp"

namespace haiproto::runtime {

const Slot* MessageTemplate::slot(const std::string& var) const {
    for (const auto& s : slots)
        if (s.var == var) return &s;
    return nullptr;
}

std::vector<std::string> MessageTemplate::unbound(const Binding& binding) const {
    const bool request = action->primitive.kind == PrimitiveKind::Request;
    std::vector<std::string> out;
    for (const auto& s : slots) {
        if (request && s.head) continue;
        if (binding.has_payload(s.var)) continue;
        if (std::find(out.begin(), out.end(), s.var) == out.end()) out.push_back(s.var);
    }
    return out;
}

namespace {

bool is_head(const ActionDef& def, const std::string& param) {
    const Arg& head = def.primitive.head;
    if (head.type.is_group()) {
        const auto& ms = head.type.members();
        return std::any_of(ms.begin(), ms.end(), [&](const auto& m) { return m.name == param; });
    }
    return head.var == param;
}

}  // namespace

std::vector<MessageTemplate> templates(const Pattern& pattern, const Corpus& corpus) {
    std::vector<MessageTemplate> out;
    for (const auto& name : pattern.messages) {
        MessageTemplate t;
        t.message = corpus.find_message(name);
        if (!t.message) throw std::invalid_argument("unknown message '" + name + "'");
        t.action = corpus.find_action(t.message->action);
        if (!t.action) throw std::invalid_argument("unknown action '" + t.message->action + "'");
        if (t.message->args.size() != t.action->params.size())
            throw std::invalid_argument("message '" + name + "' does not match the arity of its action");
        t.step = out.size() + 1;
        for (std::size_t k = 0; k < t.message->args.size(); ++k) {
            const auto& param = t.action->params[k];
            auto type = scope_type(*t.action, param);
            if (!type) throw std::invalid_argument("action '" + t.action->name + "' has no parameter " + param);
            t.slots.push_back({t.message->args[k], *type, is_head(*t.action, param)});
        }
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

void require_valid(const Pattern& pattern, const Corpus& corpus, Scope scope) {
    std::vector<Diagnostic> errors;
    auto keep = [&](const CheckReport& r) {
        for (const auto& d : r.diagnostics)
            if (d.severity == Severity::Error) errors.push_back(d);
    };
    std::set<std::string> seen;
    for (const auto& name : pattern.messages) {
        const Message* m = corpus.find_message(name);
        if (!m || !seen.insert(name).second) continue;
        keep(check_message(*m, corpus));
        if (const ActionDef* a = corpus.find_action(m->action)) keep(check_action(*a));
    }
    keep(check_pattern(pattern, corpus, scope));
    if (!errors.empty())
        throw RunError(RunError::Kind::Check, "'" + pattern.name + "' does not pass checking", std::move(errors));
}

void require_agents(const std::vector<MessageTemplate>& tmpls, const AgentMap& agents) {
    std::set<std::string> missing;
    for (const auto& t : tmpls)
        for (const auto* role : {&t.message->sender.name, &t.message->receiver.name}) {
            auto it = agents.find(*role);
            if (it == agents.end() || !it->second) missing.insert(*role);
        }
    if (missing.empty()) return;
    std::string list;
    for (const auto& r : missing) list += (list.empty() ? "" : ", ") + r;
    throw RunError(RunError::Kind::MissingAgent, "no agent for role(s): " + list);
}

Payloads snapshot(const Binding& binding) {
    Payloads out;
    for (const auto& [var, bound] : binding.variables())
        if (bound.payload) out.emplace(var, *bound.payload);
    return out;
}

// Executes one pass; returns false when the pass aborted.
bool execute_once(const std::vector<MessageTemplate>& tmpls, AgentMap& agents, Trace& trace) {
    Binding binding;
    for (const auto& tmpl : tmpls) {
        TraceStep st;
        st.step = tmpl.step;
        st.message = tmpl.message->name;
        st.sender = tmpl.message->sender.name;
        st.receiver = tmpl.message->receiver.name;
        st.action = tmpl.action->name;

        auto abort = [&](std::string_view code, std::string detail) {
            st.bindings = snapshot(binding);
            st.violation = std::string(code);
            st.detail = std::move(detail);
            trace.steps.push_back(std::move(st));
            trace.outcome = {false, tmpl.step, std::string(code)};
            return false;
        };

        for (const auto& s : tmpl.slots)
            if (binding.bind_type(s.var, s.type) == Binding::Result::Conflict)
                return abort(violations::type, s.var + " is bound as " + binding.find(s.var)->type.to_string() +
                                                   ", template expects " + s.type.to_string());

        const auto expected = tmpl.unbound(binding);
        Payloads produced;
        try {
            produced = agents.at(st.sender)->produce(tmpl, binding);
        } catch (const std::exception& e) {
            return abort(violations::agent, st.sender + " failed to produce: " + e.what());
        }

        for (const auto& [var, p] : produced) {
            const Slot* s = tmpl.slot(var);
            if (!s) return abort(violations::agent, st.sender + " produced " + var + ", which the message does not carry");
            const BoundVariable* bound = binding.find(var);
            if (bound->payload) {
                if (*bound->payload == p) continue;
                return abort(violations::rebind, var + " is already bound to " + to_string(bound->payload->value));
            }
            if (std::find(expected.begin(), expected.end(), var) == expected.end())
                return abort(violations::agent, st.sender + " produced " + var + ", which the receiver must answer");
            if (!well_shaped(p))
                return abort(violations::type, var + " payload " + to_string(p.value) + " does not have the shape of " +
                                                   p.tag.to_string());
            if (!type_compatible(s->type, p.tag) || !type_compatible(bound->type, p.tag))
                return abort(violations::type,
                             var + " payload tagged " + p.tag.to_string() + " does not fit " + bound->type.to_string());
        }
        for (const auto& var : expected)
            if (!produced.count(var)) return abort(violations::missing, st.sender + " did not produce " + var);

        for (const auto& [var, p] : produced)
            if (!binding.has_payload(var)) binding.set_payload(var, p);

        ConcreteMessage msg{&tmpl, produced};
        RunState state{&binding, trace.repetition, tmpl.step};
        try {
            agents.at(st.receiver)->on_receive(msg, state);
        } catch (const std::exception& e) {
            return abort(violations::agent, st.receiver + " failed on receipt: " + e.what());
        }
        st.bindings = snapshot(binding);
        trace.steps.push_back(std::move(st));
    }
    trace.outcome = {true, 0, {}};
    return true;
}

}  // namespace

std::vector<Trace> run_repeated(const Pattern& pattern, const Corpus& corpus, AgentMap& agents, std::uint64_t seed,
                                std::size_t repeat, Scope scope) {
    require_valid(pattern, corpus, scope);
    const auto tmpls = templates(pattern, corpus);
    require_agents(tmpls, agents);

    std::vector<Trace> out;
    if (repeat == 0) return out;
    for (auto& [role, agent] : agents)
        if (agent) agent->begin(seed);
    for (std::size_t rep = 1; rep <= repeat; ++rep) {
        Trace t;
        t.run_id = pattern.name + "#" + std::to_string(seed) + "#" + std::to_string(rep);
        t.pattern = pattern.name;
        t.seed = seed;
        t.repetition = rep;
        const bool ok = execute_once(tmpls, agents, t);
        out.push_back(std::move(t));
        if (!ok) break;
    }
    return out;
}

Trace run(const Pattern& pattern, const Corpus& corpus, AgentMap& agents, std::uint64_t seed) {
    return run_repeated(pattern, corpus, agents, seed, 1, Scope::Pattern).front();
}

std::vector<Trace> run_scenario(const std::vector<Pattern>& scenario, const Corpus& corpus, AgentMap& agents,
                                std::uint64_t seed, std::size_t repeat) {
    Composition c = compose(corpus, scenario);
    return run_repeated(c.pattern, corpus, agents, seed, repeat, Scope::Scenario);
}

std::vector<Diagnostic> replay_bindings(const std::vector<Trace>& traces, const Corpus* corpus) {
    std::vector<Diagnostic> out;
    for (const auto& t : traces) {
        BindingChecker checker("trace '" + t.run_id + "'");
        for (const auto& st : t.steps) {
            if (corpus) {
                const Message* m = corpus->find_message(st.message);
                const ActionDef* a = m ? corpus->find_action(m->action) : nullptr;
                if (a && m->args.size() == a->params.size())
                    for (std::size_t k = 0; k < m->args.size(); ++k)
                        if (auto type = scope_type(*a, a->params[k]))
                            if (auto d = checker.bind(m->args[k], *type, st.message)) out.push_back(std::move(*d));
            }
            for (const auto& [var, p] : st.bindings)
                if (auto d = checker.bind(var, p.tag, st.message)) out.push_back(std::move(*d));
        }
    }
    return out;
}

}  // namespace haiproto::runtime
