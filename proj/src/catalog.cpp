#include "haiproto/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

namespace haiproto {

std::string_view to_string(DeclKind kind) {
    switch (kind) {
    case DeclKind::Role: return "role";
    case DeclKind::Action: return "action";
    case DeclKind::Message: return "message";
    case DeclKind::Pattern: return "pattern";
    case DeclKind::Scenario: return "scenario";
    }
    return "role";
}

namespace {

std::string ticked(std::string_view s) {
    return "'" + std::string(s) + "'";
}

template <class T>
void insert_unique(std::map<std::string, T>& table, const T& value, DeclKind kind, const Origin& where,
                   CorpusBuild& build) {
    const auto key = std::make_pair(kind, value.name);
    if (!table.emplace(value.name, value).second) {
        const Origin& first = build.origins.at(key);
        build.diagnostics.push_back(make_error(codes::dup_name,
                                               std::string(to_string(kind)) + " " + ticked(value.name) +
                                                   " is already declared at " + first.path + ":" +
                                                   std::to_string(first.span.line),
                                               where.span, where.path));
        return;
    }
    build.origins.emplace(key, where);
}

}  // namespace

CorpusBuild build_corpus(const std::vector<dsl::SourceFile>& files) {
    CorpusBuild build;
    for (const auto& file : files) {
        for (const auto& decl : file.declarations) {
            const Origin where{file.path, decl.span};
            if (const auto* r = std::get_if<dsl::RoleDecl>(&decl.node)) {
                build.corpus.roles.insert(r->role.name);
                build.origins.emplace(std::make_pair(DeclKind::Role, r->role.name), where);
            } else if (const auto* a = std::get_if<ActionDef>(&decl.node)) {
                insert_unique(build.corpus.actions, *a, DeclKind::Action, where, build);
            } else if (const auto* m = std::get_if<Message>(&decl.node)) {
                insert_unique(build.corpus.messages, *m, DeclKind::Message, where, build);
            } else if (const auto* p = std::get_if<Pattern>(&decl.node)) {
                insert_unique(build.corpus.patterns, *p, DeclKind::Pattern, where, build);
            } else if (const auto* s = std::get_if<Scenario>(&decl.node)) {
                insert_unique(build.corpus.scenarios, *s, DeclKind::Scenario, where, build);
            }
        }
    }
    return build;
}

CorpusBuild build_corpus(const std::vector<SourceText>& sources) {
    std::vector<dsl::SourceFile> files;
    std::vector<Diagnostic> parse_errors;
    for (const auto& src : sources) {
        auto result = dsl::parse(src.text, src.path);
        if (result.ok()) {
            files.push_back(std::move(*result.file));
        } else {
            parse_errors.insert(parse_errors.end(), result.diagnostics.begin(), result.diagnostics.end());
        }
    }
    CorpusBuild build = build_corpus(files);
    build.diagnostics.insert(build.diagnostics.begin(), parse_errors.begin(), parse_errors.end());
    return build;
}

std::vector<Diagnostic> closure_diagnostics(const Corpus& corpus) {
    std::vector<Diagnostic> out;
    auto missing = [&](std::string_view what, const std::string& name, std::string_view from) {
        out.push_back(make_error(codes::unresolved,
                                 std::string(what) + " " + ticked(name) + " referenced by " + std::string(from) +
                                     " is not declared"));
    };
    for (const auto& [name, msg] : corpus.messages) {
        const std::string from = "message " + ticked(name);
        if (!corpus.find_action(msg.action)) missing("action", msg.action, from);
        if (!corpus.roles.count(msg.sender.name)) missing("role", msg.sender.name, from);
        if (!corpus.roles.count(msg.receiver.name)) missing("role", msg.receiver.name, from);
    }
    for (const auto& [name, pat] : corpus.patterns)
        for (const auto& m : pat.messages)
            if (!corpus.find_message(m)) missing("message", m, "pattern " + ticked(name));
    for (const auto& [name, sc] : corpus.scenarios)
        for (const auto& p : sc.patterns)
            if (!corpus.find_pattern(p)) missing("pattern", p, "scenario " + ticked(name));
    return out;
}

std::vector<std::filesystem::path> collect_sources(const std::vector<std::filesystem::path>& paths,
                                                   std::string_view extension) {
    namespace fs = std::filesystem;
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == extension) found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p, ec)) {
            out.push_back(p);
        } else {
            throw std::runtime_error("no such file or directory: " + p.string());
        }
    }
    return out;
}

std::vector<SourceText> read_sources(const std::vector<std::filesystem::path>& files) {
    std::vector<SourceText> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + f.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        out.push_back({f.string(), buf.str()});
    }
    return out;
}

std::vector<SourceText> embedded_sources() {
    std::vector<SourceText> out;
    for (const auto& f : embedded_fixtures())
        if (f.path.size() > 4 && f.path.substr(f.path.size() - 4) == ".hai")
            out.push_back({"<builtin>/" + std::string(f.path), std::string(f.text)});
    return out;
}

static std::string summarize(const std::vector<Diagnostic>& ds) {
    std::string out = "catalog failed to load";
    for (const auto& d : ds)
        if (d.severity == Severity::Error) {
            out += ": " + render(d);
            break;
        }
    return out;
}

LoadError::LoadError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Catalog Catalog::load(const std::vector<std::filesystem::path>& paths) {
    std::vector<SourceText> sources;
    try {
        sources = read_sources(collect_sources(paths));
    } catch (const std::runtime_error& e) {
        throw LoadError({make_error(codes::io, e.what())});
    }
    return from_sources(sources);
}

Catalog Catalog::from_sources(const std::vector<SourceText>& sources) {
    return finish(build_corpus(sources));
}

Catalog Catalog::from_corpus(Corpus corpus) {
    CorpusBuild build;
    build.corpus = std::move(corpus);
    return finish(std::move(build));
}

std::vector<Diagnostic> check_build(const CorpusBuild& build) {
    std::vector<Diagnostic> ds = build.diagnostics;
    auto closure = closure_diagnostics(build.corpus);
    ds.insert(ds.end(), closure.begin(), closure.end());
    if (has_errors(ds)) return ds;

    // check_corpus reports actions, messages, patterns, then scenarios.
    const auto& c = build.corpus;
    const std::size_t bounds[] = {c.actions.size(), c.actions.size() + c.messages.size(),
                                  c.actions.size() + c.messages.size() + c.patterns.size()};
    auto reports = check_corpus(c);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const DeclKind kind = i < bounds[0]   ? DeclKind::Action
                              : i < bounds[1] ? DeclKind::Message
                              : i < bounds[2] ? DeclKind::Pattern
                                              : DeclKind::Scenario;
        auto it = build.origins.find({kind, reports[i].target});
        for (auto& d : reports[i].diagnostics) {
            if (d.path.empty() && it != build.origins.end()) {
                d.path = it->second.path;
                d.span = it->second.span;
            }
            ds.push_back(std::move(d));
        }
    }
    return ds;
}

Catalog Catalog::finish(CorpusBuild build) {
    Catalog cat;
    std::vector<Diagnostic> errors;
    for (auto& d : check_build(build)) {
        if (d.severity == Severity::Error) {
            errors.push_back(std::move(d));
        } else {
            cat.warnings_.push_back(std::move(d));
        }
    }
    if (!errors.empty()) throw LoadError(std::move(errors));

    cat.corpus_ = std::move(build.corpus);
    cat.origins_ = std::move(build.origins);
    for (const auto& [name, pat] : cat.corpus_.patterns)
        if (!pat.notes.empty()) cat.annotations_.emplace(name, pat.notes);
    return cat;
}

const Origin* Catalog::origin(DeclKind kind, const std::string& name) const {
    auto it = origins_.find({kind, name});
    return it == origins_.end() ? nullptr : &it->second;
}

std::vector<const Pattern*> Catalog::query(const std::set<Tag>& tags) const {
    std::vector<const Pattern*> out;
    for (const auto& [name, pat] : corpus_.patterns) {
        const bool hit = tags.empty() || std::any_of(tags.begin(), tags.end(),
                                                     [&](Tag t) { return pat.tags.count(t) > 0; });
        if (hit) out.push_back(&pat);
    }
    return out;
}

std::vector<const Pattern*> Catalog::query(const std::vector<std::string>& tags) const {
    std::set<Tag> parsed;
    for (const auto& t : tags) {
        auto tag = parse_tag(t);
        if (!tag) throw UnknownName("unknown tag " + ticked(t) + " (expected xai, hitl, hi, control or query)");
        parsed.insert(*tag);
    }
    return query(parsed);
}

Pattern Catalog::resolve_runnable(const std::string& name) const {
    if (const Pattern* p = corpus_.find_pattern(name)) return *p;
    if (const Scenario* s = corpus_.find_scenario(name)) return compose(corpus_, *s).pattern;
    throw UnknownName("no pattern or scenario named " + ticked(name));
}

namespace {

std::vector<DiffStep> diff_steps(const Pattern& p, const Corpus& corpus) {
    std::vector<DiffStep> out;
    for (std::size_t i = 0; i < p.messages.size(); ++i) {
        DiffStep s;
        s.index = i;
        s.message = p.messages[i];
        if (const Message* m = corpus.find_message(p.messages[i])) {
            s.direction = direction(*m);
            s.action = m->action;
        } else {
            s.action = "?" + p.messages[i];
        }
        out.push_back(std::move(s));
    }
    return out;
}

bool same_key(const DiffStep& a, const DiffStep& b) {
    return a.direction == b.direction && a.action == b.action;
}

bool key_less(const DiffStep& a, const DiffStep& b) {
    return std::tie(a.direction, a.action) < std::tie(b.direction, b.action);
}

// Pairs up same-action steps inside one unmatched gap; the k-th occurrence in
// a pairs with the k-th occurrence in b, which keeps diff anti-symmetric.
void close_gap(std::vector<DiffStep>& gap_a, std::vector<DiffStep>& gap_b, PatternDiff& out) {
    std::vector<bool> used(gap_b.size(), false);
    for (const auto& a : gap_a) {
        bool paired = false;
        for (std::size_t j = 0; j < gap_b.size(); ++j) {
            if (!used[j] && gap_b[j].action == a.action) {
                used[j] = true;
                out.direction_changes.push_back({a, gap_b[j]});
                paired = true;
                break;
            }
        }
        if (!paired) out.only_in_a.push_back(a);
    }
    for (std::size_t j = 0; j < gap_b.size(); ++j)
        if (!used[j]) out.only_in_b.push_back(gap_b[j]);
    gap_a.clear();
    gap_b.clear();
}

}  // namespace

PatternDiff diff(const Pattern& pa, const Pattern& pb, const Corpus& corpus) {
    const auto a = diff_steps(pa, corpus);
    const auto b = diff_steps(pb, corpus);
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    // suffix[i][j] = LCS length of a[i..] and b[j..]
    std::vector<std::vector<std::size_t>> suffix(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            suffix[i][j] = same_key(a[i], b[j]) ? suffix[i + 1][j + 1] + 1
                                                : std::max(suffix[i + 1][j], suffix[i][j + 1]);

    PatternDiff out;
    std::vector<DiffStep> gap_a, gap_b;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (same_key(a[i], b[j])) {
            close_gap(gap_a, gap_b, out);
            out.shared.emplace_back(a[i], b[j]);
            ++i;
            ++j;
        } else if (suffix[i + 1][j] > suffix[i][j + 1] ||
                   (suffix[i + 1][j] == suffix[i][j + 1] && key_less(b[j], a[i]))) {
            // Ties skip the larger key so that swapping arguments mirrors the result.
            gap_a.push_back(a[i++]);
        } else {
            gap_b.push_back(b[j++]);
        }
    }
    while (i < n) gap_a.push_back(a[i++]);
    while (j < m) gap_b.push_back(b[j++]);
    close_gap(gap_a, gap_b, out);
    return out;
}

Composition compose(const Corpus& corpus, const std::vector<Pattern>& parts) {
    if (parts.empty()) throw std::invalid_argument("cannot compose an empty list of patterns");
    Composition out;
    for (const auto& p : parts) {
        if (!out.pattern.name.empty()) out.pattern.name += "+";
        out.pattern.name += p.name;
        out.pattern.messages.insert(out.pattern.messages.end(), p.messages.begin(), p.messages.end());
        out.pattern.tags.insert(p.tags.begin(), p.tags.end());
    }
    out.report = check_pattern(out.pattern, corpus, Scope::Scenario);
    return out;
}

Composition compose(const Corpus& corpus, const std::vector<std::string>& pattern_names) {
    std::vector<Pattern> parts;
    for (const auto& name : pattern_names) {
        const Pattern* p = corpus.find_pattern(name);
        if (!p) throw UnknownName("no pattern named " + ticked(name));
        parts.push_back(*p);
    }
    return compose(corpus, parts);
}

Composition compose(const Corpus& corpus, const Scenario& scenario) {
    Composition out = compose(corpus, scenario.patterns);
    out.pattern.name = scenario.name;
    out.report.target = scenario.name;
    return out;
}

}  // namespace haiproto
