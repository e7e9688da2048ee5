#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "haiproto/runtime.hpp"

namespace haiproto::agents {

// Parses a payload literal: symbol, number, (x, y), [a, b], blob:ref or "text".
// Throws std::invalid_argument.
[[nodiscard]] Value parse_value(std::string_view text);

// A scripted response: either a fixed value or judge(A, B), which yields
// `accept` when the payloads bound to A and B are equal and `reject` otherwise.
struct Response {
    std::optional<TypeExpr> tag;
    std::optional<Value> value;
    std::optional<std::pair<std::string, std::string>> judge;
};

// Responses per (message, variable); repeated lines cycle in file order.
class Script {
public:
    void add(const std::string& message, const std::string& var, Response response);
    [[nodiscard]] bool has(const std::string& message, const std::string& var) const;
    [[nodiscard]] const std::vector<Response>& responses(const std::string& message, const std::string& var) const;
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, std::string>, std::vector<Response>> entries_;
};

// Resolves a response into a payload tagged with `slot_type` unless the
// response carries its own tag. Throws std::runtime_error for judge() on
// unbound variables.
[[nodiscard]] Payload realize(const Response& response, const TypeExpr& slot_type, const Binding& binding);

class ScriptedAgent : public runtime::AgentBehavior {
public:
    explicit ScriptedAgent(std::shared_ptr<const Script> script) : script_(std::move(script)) {}

    void begin(std::uint64_t seed) override;
    void on_receive(const runtime::ConcreteMessage&, const runtime::RunState&) override {}
    runtime::Payloads produce(const runtime::MessageTemplate& tmpl, const Binding& binding) override;

private:
    std::shared_ptr<const Script> script_;
    std::map<std::pair<std::string, std::string>, std::size_t> cursor_;
};

// Picks uniformly among the scripted alternatives.
class RandomAgent : public runtime::AgentBehavior {
public:
    RandomAgent(std::string role, std::shared_ptr<const Script> script)
        : role_(std::move(role)), script_(std::move(script)) {}

    void begin(std::uint64_t seed) override;
    void on_receive(const runtime::ConcreteMessage&, const runtime::RunState&) override {}
    runtime::Payloads produce(const runtime::MessageTemplate& tmpl, const Binding& binding) override;

private:
    std::string role_;
    std::shared_ptr<const Script> script_;
    std::mt19937_64 rng_;
};

struct Example {
    std::vector<double> x;
    std::string label;
};

// Nearest-centroid classifier; ties go to the lexicographically smallest label.
class NearestCentroid {
public:
    void add(std::vector<double> x, std::string label);
    [[nodiscard]] std::size_t size() const { return examples_.size(); }
    [[nodiscard]] const std::vector<Example>& examples() const { return examples_; }
    // Throws std::logic_error when empty or on a dimension mismatch.
    [[nodiscard]] std::string classify(const std::vector<double>& x) const;
    [[nodiscard]] std::map<std::string, std::vector<double>> centroids() const;

private:
    std::vector<Example> examples_;
};

// Model stand-in: learns (vector, label) pairs from received messages whose
// action is in the learn set, and predicts output.label slots from the first
// bound vector payload in the same message. Scripted responses take priority.
class StubModelAgent : public runtime::AgentBehavior {
public:
    StubModelAgent(std::shared_ptr<const Script> script, std::set<std::string> learn_actions)
        : script_(std::move(script)), learn_(std::move(learn_actions)) {}

    void add_example(std::vector<double> x, std::string label) { model_.add(std::move(x), std::move(label)); }
    [[nodiscard]] const NearestCentroid& model() const { return model_; }
    [[nodiscard]] std::string classify(const std::vector<double>& x) const { return model_.classify(x); }

    void begin(std::uint64_t seed) override;
    void on_receive(const runtime::ConcreteMessage& msg, const runtime::RunState& state) override;
    runtime::Payloads produce(const runtime::MessageTemplate& tmpl, const Binding& binding) override;

private:
    std::shared_ptr<const Script> script_;
    std::set<std::string> learn_;
    NearestCentroid model_;
    std::map<std::pair<std::string, std::string>, std::size_t> cursor_;
};

enum class AgentKind { Scripted, Random, StubModel };

// Parsed .agents file.
struct AgentsFile {
    std::map<std::string, AgentKind> roles;
    std::set<std::string> learn;
    std::vector<Example> examples;
    Script script;
};

class AgentsError : public std::invalid_argument {
public:
    AgentsError(std::size_t line, const std::string& what)
        : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

[[nodiscard]] AgentsFile parse_agents(std::string_view text);

struct AgentSet {
    runtime::AgentMap agents;
    std::map<std::string, std::shared_ptr<StubModelAgent>> models;
};

[[nodiscard]] AgentSet instantiate(const AgentsFile& file);

}  // namespace haiproto::agents
