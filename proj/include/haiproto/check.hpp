#pragma once

#include <optional>
#include <string>
#include <vector>

#include "haiproto/core.hpp"
#include "haiproto/diagnostic.hpp"

namespace haiproto {

enum class Verdict { Pass, Warn, Fail };

[[nodiscard]] std::string_view to_string(Verdict verdict);

struct CheckReport {
    std::string target;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] Verdict verdict() const;
    [[nodiscard]] std::size_t count(std::string_view code) const;
};

// ActionDef invariants only: duplicate variables, params, undeclared
// operation args, operation arity.
[[nodiscard]] std::vector<Diagnostic> action_invariants(const ActionDef& def);

[[nodiscard]] CheckReport check_action(const ActionDef& def);
[[nodiscard]] CheckReport check_message(const Message& msg, const Corpus& corpus);

// Pattern scope reports unanswered requests as warnings; scenario scope as errors.
enum class Scope { Pattern, Scenario };

[[nodiscard]] CheckReport check_pattern(const Pattern& pat, const Corpus& corpus, Scope scope = Scope::Pattern);

// A request and the message that discharged it, by position in the pattern.
struct Obligation {
    std::size_t request = 0;
    std::optional<std::size_t> answer;
};

[[nodiscard]] std::vector<Obligation> dialogue_obligations(const Pattern& pat, const Corpus& corpus);

// Binding consistency over an explicit sequence of (variable, type) uses.
class BindingChecker {
public:
    explicit BindingChecker(std::string context) : context_(std::move(context)) {}

    // Returns an E-BINDING diagnostic when `type` conflicts with the accumulated type.
    std::optional<Diagnostic> bind(const std::string& var, const TypeExpr& type, std::string_view where);

    [[nodiscard]] const Binding& binding() const { return binding_; }

private:
    std::string context_;
    Binding binding_;
};

// Every declaration in the corpus, including scenarios at scenario scope.
[[nodiscard]] std::vector<CheckReport> check_corpus(const Corpus& corpus);

}  // namespace haiproto
