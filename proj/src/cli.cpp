#include "haiproto/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "haiproto/agents.hpp"
#include "haiproto/catalog.hpp"
#include "haiproto/dsl.hpp"
#include "haiproto/runtime.hpp"

namespace haiproto::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string fixtures;  // --fixtures

    // Flag, then HAIPROTO_FIXTURES, then the embedded corpus.
    std::vector<SourceText> default_sources() const {
        std::string dir = fixtures;
        if (dir.empty())
            if (const char* env = std::getenv("HAIPROTO_FIXTURES")) dir = env;
        if (dir.empty()) return embedded_sources();
        try {
            return read_sources(collect_sources({fs::path(dir)}));
        } catch (const std::runtime_error& e) {
            throw UsageError(e.what());
        }
    }

    Catalog catalog() const {
        try {
            return Catalog::from_sources(default_sources());
        } catch (const LoadError& e) {
            for (const auto& d : e.diagnostics()) err << render(d) << "\n";
            throw;
        }
    }
};

json diagnostic_json(const Diagnostic& d) {
    return {{"severity", to_string(d.severity)}, {"code", d.code},   {"path", d.path},
            {"line", d.span.line},               {"column", d.span.column}, {"message", d.message}};
}

int cmd_check(Context& ctx, const std::vector<std::string>& paths, bool deny_warnings, bool as_json) {
    std::vector<SourceText> sources;
    if (paths.empty()) {
        sources = ctx.default_sources();
    } else {
        std::vector<fs::path> ps(paths.begin(), paths.end());
        try {
            sources = read_sources(collect_sources(ps));
        } catch (const std::runtime_error& e) {
            throw UsageError(e.what());
        }
    }
    const auto diags = check_build(build_corpus(sources));
    std::size_t errors = 0;
    std::size_t warnings = 0;
    for (const auto& d : diags) (d.severity == Severity::Error ? errors : warnings)++;

    if (as_json) {
        json j = {{"files", sources.size()}, {"errors", errors}, {"warnings", warnings}};
        j["diagnostics"] = json::array();
        for (const auto& d : diags) j["diagnostics"].push_back(diagnostic_json(d));
        ctx.out << j.dump(2) << "\n";
    } else {
        for (const auto& d : diags) ctx.out << render(d) << "\n";
        ctx.out << "checked " << sources.size() << " file(s): " << errors << " error(s), " << warnings
                << " warning(s)\n";
    }
    if (errors > 0 || (deny_warnings && warnings > 0)) return check_failed;
    return ok;
}

int cmd_fmt(Context& ctx, const std::vector<std::string>& paths, bool check_only) {
    std::vector<fs::path> files;
    try {
        files = collect_sources(std::vector<fs::path>(paths.begin(), paths.end()));
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
    int status = ok;
    for (const auto& f : files) {
        const std::string text = read_file(f);
        auto parsed = dsl::parse(text, f.string());
        if (!parsed.ok()) {
            for (const auto& d : parsed.diagnostics) ctx.err << render(d) << "\n";
            status = check_failed;
            continue;
        }
        const std::string canonical = dsl::print(*parsed.file);
        if (canonical == text) continue;
        if (check_only) {
            ctx.out << "would reformat " << f.string() << "\n";
            status = check_failed;
        } else {
            std::ofstream o(f, std::ios::binary | std::ios::trunc);
            if (!(o << canonical)) throw UsageError("cannot write " + f.string());
            ctx.out << "reformatted " << f.string() << "\n";
        }
    }
    return status;
}

std::string tag_list(const Pattern& p) {
    std::string out;
    for (Tag t : p.tags) out += (out.empty() ? "" : ",") + std::string(to_string(t));
    return out.empty() ? "-" : out;
}

Pattern resolve(const Catalog& cat, const std::string& name) {
    try {
        return cat.resolve_runnable(name);
    } catch (const UnknownName& e) {
        throw UsageError(e.what());
    }
}

void print_step(std::ostream& out, const DiffStep& s) {
    out << "  " << s.index + 1 << ". " << s.message << "  " << s.direction << "  " << s.action << "\n";
}

json step_json(const DiffStep& s) {
    return {{"index", s.index}, {"message", s.message}, {"direction", s.direction}, {"action", s.action}};
}

int cmd_diff(Context& ctx, const std::string& a, const std::string& b, bool as_json) {
    const Catalog cat = ctx.catalog();
    const Pattern pa = resolve(cat, a);
    const Pattern pb = resolve(cat, b);
    const PatternDiff d = diff(pa, pb, cat.corpus());
    if (as_json) {
        json j;
        j["a"] = a;
        j["b"] = b;
        j["shared"] = json::array();
        for (const auto& [x, y] : d.shared) j["shared"].push_back({{"a", step_json(x)}, {"b", step_json(y)}});
        j["only_in_a"] = json::array();
        for (const auto& s : d.only_in_a) j["only_in_a"].push_back(step_json(s));
        j["only_in_b"] = json::array();
        for (const auto& s : d.only_in_b) j["only_in_b"].push_back(step_json(s));
        j["direction_changes"] = json::array();
        for (const auto& c : d.direction_changes)
            j["direction_changes"].push_back({{"a", step_json(c.a)}, {"b", step_json(c.b)}});
        ctx.out << j.dump(2) << "\n";
        return ok;
    }
    ctx.out << "shared (" << d.shared.size() << "):\n";
    for (const auto& [x, y] : d.shared) print_step(ctx.out, x);
    ctx.out << "only in " << a << " (" << d.only_in_a.size() << "):\n";
    for (const auto& s : d.only_in_a) print_step(ctx.out, s);
    ctx.out << "only in " << b << " (" << d.only_in_b.size() << "):\n";
    for (const auto& s : d.only_in_b) print_step(ctx.out, s);
    ctx.out << "direction changes (" << d.direction_changes.size() << "):\n";
    for (const auto& c : d.direction_changes)
        ctx.out << "  " << c.a.action << ": " << c.a.direction << " -> " << c.b.direction << "\n";
    return ok;
}

int cmd_list(Context& ctx) {
    const Catalog cat = ctx.catalog();
    for (const auto& [name, p] : cat.corpus().patterns)
        ctx.out << name << "\t" << tag_list(p) << "\t" << p.messages.size() << "\n";
    return ok;
}

int cmd_query(Context& ctx, const std::vector<std::string>& tags) {
    const Catalog cat = ctx.catalog();
    std::vector<const Pattern*> hits;
    try {
        hits = cat.query(tags);
    } catch (const UnknownName& e) {
        throw UsageError(e.what());
    }
    for (const Pattern* p : hits) ctx.out << p->name << "\t" << tag_list(*p) << "\t" << p->messages.size() << "\n";
    return ok;
}

int cmd_export(Context& ctx) {
    const Catalog cat = ctx.catalog();
    ctx.out << export_json(cat.corpus()) << "\n";
    return ok;
}

int cmd_run(Context& ctx, const std::string& name, const std::string& agents_path, std::uint64_t seed,
            std::size_t repeat, const std::string& trace_path) {
    const Catalog cat = ctx.catalog();
    const bool scenario = cat.corpus().find_scenario(name) != nullptr;
    const Pattern pattern = resolve(cat, name);

    agents::AgentsFile file;
    try {
        file = agents::parse_agents(read_file(agents_path));
    } catch (const agents::AgentsError& e) {
        throw UsageError(agents_path + ": " + e.what());
    }
    auto set = agents::instantiate(file);

    std::vector<runtime::Trace> traces;
    try {
        traces = runtime::run_repeated(pattern, cat.corpus(), set.agents, seed, repeat,
                                       scenario ? Scope::Scenario : Scope::Pattern);
    } catch (const runtime::RunError& e) {
        for (const auto& d : e.diagnostics()) ctx.err << render(d) << "\n";
        ctx.err << "error: " << e.what() << "\n";
        return e.kind() == runtime::RunError::Kind::MissingAgent ? usage_error : check_failed;
    }

    if (!trace_path.empty()) {
        std::ofstream o(trace_path, std::ios::binary | std::ios::trunc);
        if (!(o << runtime::to_jsonl(traces))) throw UsageError("cannot write " + trace_path);
    }

    std::size_t completed = 0;
    std::size_t messages = 0;
    for (const auto& t : traces) {
        messages += t.steps.size();
        if (t.outcome.completed) {
            ++completed;
            ctx.out << t.run_id << ": completed, " << t.steps.size() << " steps\n";
        } else {
            ctx.out << t.run_id << ": aborted at step " << t.outcome.step << " (" << t.outcome.code
                    << "): " << t.steps.back().detail << "\n";
        }
    }
    ctx.out << traces.size() << " run(s): " << completed << " completed, " << traces.size() - completed
            << " aborted, " << messages << " messages\n";
    for (const auto& [role, model] : set.models)
        ctx.out << role << ": " << model->model().size() << " stored examples\n";
    return completed == traces.size() ? ok : check_failed;
}

int cmd_diagram(Context& ctx, const std::string& name, const std::string& format) {
    if (format != "mermaid") throw UsageError("unsupported diagram format '" + format + "'");
    const Catalog cat = ctx.catalog();
    const Pattern pattern = resolve(cat, name);
    std::vector<std::string> participants;
    auto note = [&](const std::string& r) {
        if (std::find(participants.begin(), participants.end(), r) == participants.end()) participants.push_back(r);
    };
    std::vector<std::string> arrows;
    for (const auto& m : pattern.messages) {
        const Message* msg = cat.corpus().find_message(m);
        const ActionDef* act = msg ? cat.corpus().find_action(msg->action) : nullptr;
        if (!act) throw UsageError("cannot resolve message '" + m + "'");
        note(msg->sender.name);
        note(msg->receiver.name);
        arrows.push_back("    " + msg->sender.name + "->>" + msg->receiver.name + ": " + act->name + " [" +
                         act->primitive.head.type.to_string() + "]");
    }
    ctx.out << "sequenceDiagram\n";
    for (const auto& p : participants) ctx.out << "    participant " << p << "\n";
    for (const auto& a : arrows) ctx.out << a << "\n";
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Human-AI interaction protocol toolkit", "haiproto"};
    app.require_subcommand(1);
    Context ctx{out, err, {}};
    app.add_option("--fixtures", ctx.fixtures, "Fixture directory (overrides HAIPROTO_FIXTURES)");

    std::vector<std::string> paths;
    bool deny_warnings = false;
    bool as_json = false;
    bool check_only = false;
    std::vector<std::string> tags;
    std::string name_a;
    std::string name_b;
    std::string agents_path;
    std::uint64_t seed = 0;
    std::size_t repeat = 1;
    std::string trace_path;
    std::string format = "mermaid";

    auto* check = app.add_subcommand("check", "Parse and check sources (default: the fixture corpus)");
    check->add_option("paths", paths, "Files or directories");
    check->add_flag("--deny-warnings", deny_warnings, "Treat warnings as failures");
    check->add_flag("--json", as_json, "Machine-readable output");

    auto* fmt = app.add_subcommand("fmt", "Rewrite sources in canonical form");
    fmt->add_option("paths", paths, "Files or directories")->required();
    fmt->add_flag("--check", check_only, "Report files that would change without writing");

    auto* catalog = app.add_subcommand("catalog", "Inspect the pattern catalog");
    catalog->require_subcommand(1);
    auto* list = catalog->add_subcommand("list", "Patterns with tags and message counts");
    auto* query = catalog->add_subcommand("query", "Patterns carrying any of the tags");
    query->add_option("--tag", tags, "Tag (repeatable)")->required();
    auto* diff_cmd = catalog->add_subcommand("diff", "Structural diff of two patterns or scenarios");
    diff_cmd->add_option("a", name_a)->required();
    diff_cmd->add_option("b", name_b)->required();
    diff_cmd->add_flag("--json", as_json, "Machine-readable output");
    auto* export_cmd = catalog->add_subcommand("export", "Export the corpus");
    bool export_json_flag = false;
    export_cmd->add_flag("--json", export_json_flag, "JSON output (the only format)");

    auto* run_cmd = app.add_subcommand("run", "Simulate a pattern or scenario between agents");
    run_cmd->add_option("name", name_a)->required();
    run_cmd->add_option("--agents", agents_path, "Agents fixture")->required();
    run_cmd->add_option("--seed", seed, "Seed for agent randomness");
    run_cmd->add_option("--repeat", repeat, "Repetitions");
    run_cmd->add_option("--trace", trace_path, "JSON-lines trace output");

    auto* diagram = app.add_subcommand("diagram", "Sequence diagram of a pattern or scenario");
    diagram->add_option("name", name_a)->required();
    diagram->add_option("--format", format, "Output format")->check(CLI::IsMember({"mermaid"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*check) return cmd_check(ctx, paths, deny_warnings, as_json);
        if (*fmt) return cmd_fmt(ctx, paths, check_only);
        if (*list) return cmd_list(ctx);
        if (*query) return cmd_query(ctx, tags);
        if (*diff_cmd) return cmd_diff(ctx, name_a, name_b, as_json);
        if (*export_cmd) return cmd_export(ctx);
        if (*run_cmd) return cmd_run(ctx, name_a, agents_path, seed, repeat, trace_path);
        if (*diagram) return cmd_diagram(ctx, name_a, format);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const LoadError& e) {
        for (const auto& d : e.diagnostics())
            if (d.code == codes::io) return usage_error;
        return check_failed;
    }
    return usage_error;
}

}  // namespace haiproto::cli
