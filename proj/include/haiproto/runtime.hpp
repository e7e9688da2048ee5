#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "haiproto/check.hpp"
#include "haiproto/core.hpp"
#include "haiproto/diagnostic.hpp"

namespace haiproto::runtime {

// One action parameter as seen by the message that instantiates it.
struct Slot {
    std::string var;     // pattern-level variable (message argument)
    TypeExpr type;       // declared type of the action parameter
    bool head = false;   // parameter is the primitive's head
};

struct MessageTemplate {
    const Message* message = nullptr;
    const ActionDef* action = nullptr;
    std::size_t step = 0;  // 1-based position in the pattern
    std::vector<Slot> slots;

    [[nodiscard]] const Slot* slot(const std::string& var) const;
    // Variables the sender is expected to produce given the current binding.
    [[nodiscard]] std::vector<std::string> unbound(const Binding& binding) const;
};

using Payloads = std::map<std::string, Payload>;

struct ConcreteMessage {
    const MessageTemplate* tmpl = nullptr;
    Payloads produced;
};

struct RunState {
    const Binding* binding = nullptr;
    std::size_t repetition = 1;
    std::size_t step = 0;
};

class AgentBehavior {
public:
    virtual ~AgentBehavior() = default;

    // Called once per run or run_scenario before the first message.
    virtual void begin(std::uint64_t /*seed*/) {}
    virtual void on_receive(const ConcreteMessage& msg, const RunState& state) = 0;
    virtual Payloads produce(const MessageTemplate& tmpl, const Binding& binding) = 0;
};

using AgentMap = std::map<std::string, std::shared_ptr<AgentBehavior>>;

namespace violations {
inline constexpr std::string_view type = "V-TYPE";
inline constexpr std::string_view rebind = "V-REBIND";
inline constexpr std::string_view missing = "V-MISSING";
inline constexpr std::string_view agent = "V-AGENT";
}  // namespace violations

struct TraceStep {
    std::size_t step = 0;
    std::string message;
    std::string sender;
    std::string receiver;
    std::string action;
    Payloads bindings;                 // every variable holding a payload after this step
    std::optional<std::string> violation;
    std::string detail;

    bool operator==(const TraceStep&) const = default;
};

struct Outcome {
    bool completed = true;
    std::size_t step = 0;  // aborting step when !completed
    std::string code;

    bool operator==(const Outcome&) const = default;
};

struct Trace {
    std::string run_id;
    std::string pattern;
    std::uint64_t seed = 0;
    std::size_t repetition = 1;
    std::vector<TraceStep> steps;
    Outcome outcome;

    bool operator==(const Trace&) const = default;
};

// Precondition failures: pattern does not check, or a role has no agent.
class RunError : public std::runtime_error {
public:
    enum class Kind { Check, MissingAgent };
    RunError(Kind kind, const std::string& what, std::vector<Diagnostic> diagnostics = {})
        : std::runtime_error(what), kind_(kind), diagnostics_(std::move(diagnostics)) {}

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    Kind kind_;
    std::vector<Diagnostic> diagnostics_;
};

[[nodiscard]] std::vector<MessageTemplate> templates(const Pattern& pattern, const Corpus& corpus);

// Single pass over a pattern checked at pattern scope.
[[nodiscard]] Trace run(const Pattern& pattern, const Corpus& corpus, AgentMap& agents, std::uint64_t seed);

// `repeat` passes over one pattern, agents keep state between passes.
[[nodiscard]] std::vector<Trace> run_repeated(const Pattern& pattern, const Corpus& corpus, AgentMap& agents,
                                              std::uint64_t seed, std::size_t repeat,
                                              Scope scope = Scope::Pattern);

// Composes the patterns and runs the result at scenario scope.
[[nodiscard]] std::vector<Trace> run_scenario(const std::vector<Pattern>& scenario, const Corpus& corpus,
                                              AgentMap& agents, std::uint64_t seed, std::size_t repeat);

// JSON lines: one record per step, then one outcome record per trace.
[[nodiscard]] std::string to_jsonl(const std::vector<Trace>& traces);
// Throws std::invalid_argument on malformed input.
[[nodiscard]] std::vector<Trace> parse_jsonl(std::string_view text);

// Replays the recorded payload tags (and, when known, the template types)
// through the binding checker; returns E-BINDING diagnostics.
[[nodiscard]] std::vector<Diagnostic> replay_bindings(const std::vector<Trace>& traces, const Corpus* corpus = nullptr);

}  // namespace haiproto::runtime
