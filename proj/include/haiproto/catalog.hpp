#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "haiproto/check.hpp"
#include "haiproto/core.hpp"
#include "haiproto/dsl.hpp"

namespace haiproto {

// Fixture files compiled into the library (path relative to fixtures/).
struct EmbeddedFile {
    std::string_view path;
    std::string_view text;
};

[[nodiscard]] const std::vector<EmbeddedFile>& embedded_fixtures();

enum class DeclKind { Role, Action, Message, Pattern, Scenario };

[[nodiscard]] std::string_view to_string(DeclKind kind);

struct Origin {
    std::string path;
    Span span;
};

struct SourceText {
    std::string path;
    std::string text;
};

// Parsed and merged declarations before any validation.
struct CorpusBuild {
    Corpus corpus;
    std::map<std::pair<DeclKind, std::string>, Origin> origins;
    std::vector<Diagnostic> diagnostics;  // parse errors and E-DUP-NAME
};

[[nodiscard]] CorpusBuild build_corpus(const std::vector<SourceText>& sources);
[[nodiscard]] CorpusBuild build_corpus(const std::vector<dsl::SourceFile>& files);

// Every name referenced anywhere resolves (E-UNRESOLVED otherwise).
[[nodiscard]] std::vector<Diagnostic> closure_diagnostics(const Corpus& corpus);

// Build diagnostics, closure, then every check; paths and spans are filled
// from the declaration origins.
[[nodiscard]] std::vector<Diagnostic> check_build(const CorpusBuild& build);

// Expands directories recursively into sorted files with the given extension.
// Throws std::runtime_error for a path that does not exist.
[[nodiscard]] std::vector<std::filesystem::path> collect_sources(const std::vector<std::filesystem::path>& paths,
                                                                 std::string_view extension = ".hai");

[[nodiscard]] std::vector<SourceText> read_sources(const std::vector<std::filesystem::path>& files);
[[nodiscard]] std::vector<SourceText> embedded_sources();

class LoadError : public std::runtime_error {
public:
    explicit LoadError(std::vector<Diagnostic> diagnostics);
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

class UnknownName : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Catalog {
public:
    Catalog() = default;

    // Throws LoadError on parse errors, duplicates, unresolved names or failing checks.
    [[nodiscard]] static Catalog load(const std::vector<std::filesystem::path>& paths);
    [[nodiscard]] static Catalog from_sources(const std::vector<SourceText>& sources);
    [[nodiscard]] static Catalog from_corpus(Corpus corpus);

    [[nodiscard]] const Corpus& corpus() const { return corpus_; }
    [[nodiscard]] const std::map<std::string, std::string>& annotations() const { return annotations_; }
    [[nodiscard]] const Origin* origin(DeclKind kind, const std::string& name) const;
    // Warnings found while loading (errors abort the load).
    [[nodiscard]] const std::vector<Diagnostic>& warnings() const { return warnings_; }

    // Patterns whose tags intersect `tags`, sorted by name; all patterns for an empty set.
    [[nodiscard]] std::vector<const Pattern*> query(const std::set<Tag>& tags) const;
    // Same, from tag spellings; throws UnknownName for a tag outside the vocabulary.
    [[nodiscard]] std::vector<const Pattern*> query(const std::vector<std::string>& tags) const;

    // A pattern, or a scenario composed into one; throws UnknownName.
    [[nodiscard]] Pattern resolve_runnable(const std::string& name) const;

private:
    static Catalog finish(CorpusBuild build);

    Corpus corpus_;
    std::map<std::pair<DeclKind, std::string>, Origin> origins_;
    std::map<std::string, std::string> annotations_;
    std::vector<Diagnostic> warnings_;
};

struct DiffStep {
    std::size_t index = 0;
    std::string message;
    std::string direction;
    std::string action;
    bool operator==(const DiffStep&) const = default;
};

struct DirectionChange {
    DiffStep a;
    DiffStep b;
    bool operator==(const DirectionChange&) const = default;
};

struct PatternDiff {
    std::vector<std::pair<DiffStep, DiffStep>> shared;
    std::vector<DiffStep> only_in_a;
    std::vector<DiffStep> only_in_b;
    std::vector<DirectionChange> direction_changes;

    [[nodiscard]] bool identical() const {
        return only_in_a.empty() && only_in_b.empty() && direction_changes.empty();
    }
};

// Longest common subsequence over (direction, action) pairs.
[[nodiscard]] PatternDiff diff(const Pattern& a, const Pattern& b, const Corpus& corpus);

struct Composition {
    Pattern pattern;
    CheckReport report;
};

// Concatenates the named patterns and checks the result at scenario scope.
// Throws std::invalid_argument for an empty list, UnknownName for unknown patterns.
[[nodiscard]] Composition compose(const Corpus& corpus, const std::vector<std::string>& pattern_names);
[[nodiscard]] Composition compose(const Corpus& corpus, const Scenario& scenario);
// Concatenates already-built patterns (used for nested composition).
[[nodiscard]] Composition compose(const Corpus& corpus, const std::vector<Pattern>& parts);

// Stable JSON schema: {actions, messages, patterns, roles, scenarios}, keys sorted.
[[nodiscard]] std::string export_json(const Corpus& corpus, int indent = 2);
// Inverse of export_json; throws std::invalid_argument on malformed input.
[[nodiscard]] Corpus import_json(std::string_view text);

}  // namespace haiproto
