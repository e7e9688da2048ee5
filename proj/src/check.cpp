#include "haiproto/check.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace haiproto {

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Warn: return "warn";
    case Verdict::Fail: return "fail";
    }
    return "pass";
}

Verdict CheckReport::verdict() const {
    if (has_errors(diagnostics)) return Verdict::Fail;
    return diagnostics.empty() ? Verdict::Pass : Verdict::Warn;
}

std::size_t CheckReport::count(std::string_view code) const {
    return static_cast<std::size_t>(
        std::count_if(diagnostics.begin(), diagnostics.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

namespace {

void collect(const Arg& arg, std::vector<std::pair<std::string, const TypeExpr*>>& out) {
    if (arg.type.is_group()) {
        for (const auto& m : arg.type.members()) out.emplace_back(m.name, &m.type);
    } else {
        out.emplace_back(arg.var.value_or(""), &arg.type);
    }
}

std::vector<std::pair<std::string, const TypeExpr*>> declared(const ActionDef& def) {
    std::vector<std::pair<std::string, const TypeExpr*>> out;
    collect(def.primitive.head, out);
    for (const auto& r : def.primitive.refs) collect(r, out);
    return out;
}

std::string ticked(std::string_view s) {
    return "'" + std::string(s) + "'";
}

}  // namespace

std::vector<Diagnostic> action_invariants(const ActionDef& def) {
    std::vector<Diagnostic> out;
    const auto vars = declared(def);
    std::set<std::string> names;
    for (const auto& [name, type] : vars) {
        if (!names.insert(name).second)
            out.push_back(make_error(codes::dup_var,
                                     "variable " + ticked(name) + " is declared more than once in action " +
                                         ticked(def.name)));
    }

    std::set<std::string> params;
    for (const auto& p : def.params) {
        if (!params.insert(p).second)
            out.push_back(make_error(codes::params, "parameter " + ticked(p) + " is listed twice in action " +
                                                        ticked(def.name)));
    }
    for (const auto& p : def.params)
        if (!names.count(p))
            out.push_back(make_error(codes::params, "parameter " + ticked(p) + " of action " + ticked(def.name) +
                                                        " is not declared by its primitive"));
    for (const auto& n : names)
        if (!params.count(n))
            out.push_back(make_error(codes::params, "variable " + ticked(n) + " of action " + ticked(def.name) +
                                                        " is missing from its parameter list"));

    for (const auto& op : def.operations) {
        const auto bounds = arity_bounds(op.kind);
        if (op.args.size() < bounds.min || op.args.size() > bounds.max)
            out.push_back(make_error(codes::arity, std::string(to_string(op.kind)) + " in action " + ticked(def.name) +
                                                       " has " + std::to_string(op.args.size()) + " arguments"));
        for (const auto& a : op.args)
            if (!names.count(a))
                out.push_back(make_error(codes::undeclared_var,
                                         std::string(to_string(op.kind)) + " argument " + ticked(a) +
                                             " is not declared in action " + ticked(def.name)));
    }
    return out;
}

CheckReport check_action(const ActionDef& def) {
    CheckReport report{def.name, action_invariants(def)};
    const auto vars = declared(def);
    auto type_of = [&](const std::string& v) -> const TypeExpr* {
        for (const auto& [name, type] : vars)
            if (name == v) return type;
        return nullptr;
    };
    for (const auto& op : def.operations) {
        if (op.kind == OpKind::Select && op.args.size() == 2) {
            const TypeExpr* a = type_of(op.args[0]);
            const TypeExpr* b = type_of(op.args[1]);
            if (!a || !b) continue;
            if (!b->is_list()) {
                report.diagnostics.push_back(make_error(
                    codes::select_nonlist, "select(" + op.args[0] + ", " + op.args[1] + ") in action " +
                                               ticked(def.name) + ": " + op.args[1] + " has non-list type " +
                                               b->to_string()));
            } else if (!type_compatible(b->element(), *a)) {
                report.diagnostics.push_back(make_error(
                    codes::select_elem, "select(" + op.args[0] + ", " + op.args[1] + ") in action " +
                                            ticked(def.name) + ": element type " + b->element().to_string() +
                                            " is incompatible with " + a->to_string()));
            }
        } else if (op.kind == OpKind::Modify && op.args.size() == 2) {
            const TypeExpr* a = type_of(op.args[0]);
            const TypeExpr* b = type_of(op.args[1]);
            if (!a || !b) continue;
            if (!type_compatible(*a, *b))
                report.diagnostics.push_back(make_error(
                    codes::modify_type, "modify(" + op.args[0] + ", " + op.args[1] + ") in action " +
                                            ticked(def.name) + ": " + a->to_string() + " is incompatible with " +
                                            b->to_string()));
        }
    }
    return report;
}

CheckReport check_message(const Message& msg, const Corpus& corpus) {
    CheckReport report{msg.name, {}};
    auto& ds = report.diagnostics;
    const ActionDef* action = corpus.find_action(msg.action);
    if (!action) {
        ds.push_back(make_error(codes::unknown_action,
                                "message " + ticked(msg.name) + " uses unknown action " + ticked(msg.action)));
    } else if (msg.args.size() != action->params.size()) {
        ds.push_back(make_error(codes::msg_arity, "message " + ticked(msg.name) + " passes " +
                                                      std::to_string(msg.args.size()) + " arguments to " +
                                                      ticked(msg.action) + ", which takes " +
                                                      std::to_string(action->params.size())));
    }
    if (msg.sender == msg.receiver)
        ds.push_back(make_error(codes::self_send, "message " + ticked(msg.name) + " is sent from " +
                                                      ticked(msg.sender.name) + " to itself"));
    for (const AgentRole* r : {&msg.sender, &msg.receiver})
        if (!corpus.roles.count(r->name))
            ds.push_back(make_error(codes::unknown_role,
                                    "message " + ticked(msg.name) + " uses undeclared role " + ticked(r->name)));
    std::set<std::string> keys;
    for (const auto& mod : msg.modifiers) {
        if (!keys.insert(mod.key).second)
            ds.push_back(make_error(codes::dup_mod,
                                    "message " + ticked(msg.name) + " repeats modifier key " + ticked(mod.key)));
        if (mod.annotates_variable &&
            std::find(msg.args.begin(), msg.args.end(), mod.key) == msg.args.end())
            ds.push_back(make_error(codes::unknown_mod_var, "modifier " + ticked(mod.key + ":" + mod.value) +
                                                                " names a variable that message " +
                                                                ticked(msg.name) + " does not pass"));
    }
    return report;
}

std::optional<Diagnostic> BindingChecker::bind(const std::string& var, const TypeExpr& type, std::string_view where) {
    const BoundVariable* before = binding_.find(var);
    const std::string previous = before ? before->type.to_string() : std::string{};
    if (binding_.bind_type(var, type) != Binding::Result::Conflict) return std::nullopt;
    return make_error(codes::binding, context_ + ": variable " + ticked(var) + " bound as " + previous +
                                          " is used as incompatible " + type.to_string() + " in " +
                                          ticked(where));
}

namespace {

struct Resolved {
    const Message* msg = nullptr;
    const ActionDef* action = nullptr;
};

std::vector<Resolved> resolve(const Pattern& pat, const Corpus& corpus) {
    std::vector<Resolved> out;
    for (const auto& name : pat.messages) {
        Resolved r;
        r.msg = corpus.find_message(name);
        if (r.msg) r.action = corpus.find_action(r.msg->action);
        out.push_back(r);
    }
    return out;
}

bool answers(const Resolved& reply, const TypeExpr& wanted) {
    const auto& prim = reply.action->primitive;
    if (prim.kind == PrimitiveKind::Provide) return type_compatible(wanted, prim.head.type);
    std::vector<std::pair<std::string, const TypeExpr*>> refs;
    for (const auto& r : prim.refs) collect(r, refs);
    return std::any_of(refs.begin(), refs.end(), [&](const auto& e) { return type_compatible(wanted, *e.second); });
}

}  // namespace

std::vector<Obligation> dialogue_obligations(const Pattern& pat, const Corpus& corpus) {
    const auto steps = resolve(pat, corpus);
    std::vector<Obligation> out;
    std::vector<std::size_t> open;  // indices into out
    for (std::size_t j = 0; j < steps.size(); ++j) {
        const Resolved& s = steps[j];
        if (!s.msg || !s.action) continue;
        for (auto it = open.begin(); it != open.end(); ++it) {
            const Resolved& req = steps[out[*it].request];
            if (req.msg->sender != s.msg->receiver || req.msg->receiver != s.msg->sender) continue;
            if (!answers(s, req.action->primitive.head.type)) continue;
            out[*it].answer = j;
            open.erase(it);
            break;
        }
        if (s.action->primitive.kind == PrimitiveKind::Request) {
            out.push_back({j, std::nullopt});
            open.push_back(out.size() - 1);
        }
    }
    return out;
}

CheckReport check_pattern(const Pattern& pat, const Corpus& corpus, Scope scope) {
    CheckReport report{pat.name, {}};
    auto& ds = report.diagnostics;
    const auto steps = resolve(pat, corpus);

    BindingChecker checker(std::string(scope == Scope::Scenario ? "scenario " : "pattern ") + ticked(pat.name));
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Resolved& s = steps[i];
        if (!s.msg) {
            ds.push_back(make_error(codes::unknown_message,
                                    "pattern " + ticked(pat.name) + " uses unknown message " + ticked(pat.messages[i])));
            continue;
        }
        if (!s.action) {
            ds.push_back(make_error(codes::unknown_action, "message " + ticked(s.msg->name) + " uses unknown action " +
                                                               ticked(s.msg->action)));
            continue;
        }
        if (s.msg->args.size() != s.action->params.size()) continue;
        for (std::size_t k = 0; k < s.msg->args.size(); ++k) {
            auto type = scope_type(*s.action, s.action->params[k]);
            if (!type) continue;
            if (auto d = checker.bind(s.msg->args[k], *type, s.msg->name)) ds.push_back(std::move(*d));
        }
    }

    for (const auto& o : dialogue_obligations(pat, corpus)) {
        if (o.answer) continue;
        const Resolved& r = steps[o.request];
        std::string text = "request " + ticked(r.msg->name) + " (" + r.action->name + ", " + direction(*r.msg) +
                           ", head " + r.action->primitive.head.type.to_string() + ") is never answered in " +
                           ticked(pat.name);
        if (scope == Scope::Scenario) {
            ds.push_back(make_error(codes::unanswered_error, std::move(text)));
        } else {
            ds.push_back(make_warning(codes::unanswered_warning, std::move(text)));
        }
    }
    return report;
}

std::vector<CheckReport> check_corpus(const Corpus& corpus) {
    std::vector<CheckReport> out;
    for (const auto& [name, def] : corpus.actions) out.push_back(check_action(def));
    for (const auto& [name, msg] : corpus.messages) out.push_back(check_message(msg, corpus));
    for (const auto& [name, pat] : corpus.patterns) out.push_back(check_pattern(pat, corpus));
    for (const auto& [name, sc] : corpus.scenarios) {
        CheckReport report{name, {}};
        Pattern composed;
        composed.name = name;
        for (const auto& p : sc.patterns) {
            const Pattern* part = corpus.find_pattern(p);
            if (!part) {
                report.diagnostics.push_back(make_error(
                    codes::unknown_pattern, "scenario " + ticked(name) + " uses unknown pattern " + ticked(p)));
                continue;
            }
            composed.messages.insert(composed.messages.end(), part->messages.begin(), part->messages.end());
        }
        if (sc.patterns.empty())
            report.diagnostics.push_back(make_error(codes::empty_scenario, "scenario " + ticked(name) + " is empty"));
        if (!composed.messages.empty()) {
            auto inner = check_pattern(composed, corpus, Scope::Scenario);
            report.diagnostics.insert(report.diagnostics.end(), inner.diagnostics.begin(), inner.diagnostics.end());
        }
        out.push_back(std::move(report));
    }
    return out;
}

}  // namespace haiproto
