// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "haiproto/agents.hpp"
#include "haiproto/catalog.hpp"
#include "haiproto/check.hpp"
#include "haiproto/dsl.hpp"
#include "haiproto/runtime.hpp"

using namespace haiproto;
namespace fs = std::filesystem;

namespace {

const std::string fixtures = HAIPROTO_FIXTURE_DIR;
const std::string binary = HAIPROTO_BINARY;

struct Shell {
    int code = -1;
    std::string out;
};

Shell sh(const std::string& args) {
    Shell r;
    const std::string cmd = binary + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(fixtures))
        if (e.path().extension() == ".hai") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

const Catalog& shipped() {
    static const Catalog c = Catalog::load({fixtures});
    return c;
}

// Criteria report their failures through this sink.
struct Findings {
    std::vector<std::string> problems;
    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
};

void corpus_fidelity(Findings& v) {
    const Corpus& c = shipped().corpus();
    for (const char* a :
         {"req-class_selection", "select-class", "req-new_class_sample", "req-class_sample", "req-sample_class",
          "req-gsample_class", "req-sel_sample_class", "annotate-sample", "show-policy", "give-evaluative_advice",
          "modify-prediction", "show-candidate_samples", "select-sample", "modify-sample", "generate-sample",
          "modify-mparams", "modify-features", "req-prediction_evaluation", "evaluate-prediction",
          "show-prediction_XAI"})
        v.require(c.find_action(a), std::string("missing action ") + a);
    for (const char* p :
         {"class-selection", "new_sample", "new_class_sample", "sample-annotation", "new_sample-annotation",
          "candidate_samples", "sample-modification", "feature-modification", "parameter-modification",
          "prediction-modification", "policy-visualization", "informative_advice", "evaluative_advice",
          "prediction-based_XAI", "outcome-evaluation", "prediction_parameters", "turn_taking-evaluation",
          "prediction-with-XAI", "recommendations"})
        v.require(c.find_pattern(p), std::string("missing pattern ") + p);
    for (auto [prefix, n] : std::vector<std::pair<char, int>>{
             {'A', 6}, {'B', 9}, {'C', 5}, {'D', 5}, {'E', 3}, {'F', 7}, {'G', 5}, {'H', 2}})
        for (int i = 1; i <= n; ++i) {
            const std::string label = prefix + std::to_string(i);
            v.require(c.find_message(label), "missing message " + label);
        }

    const auto t0 = std::chrono::steady_clock::now();
    const Shell r = sh("check " + fixtures + " --json");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(r.code == 0, "check exit " + std::to_string(r.code));
    try {
        const auto j = nlohmann::json::parse(r.out);
        v.require(j.at("errors") == 0 && j.at("warnings") == 0, "check reported diagnostics");
    } catch (const std::exception& e) {
        v.require(false, std::string("check output: ") + e.what());
    }
    v.require(secs < 5.0, "check took " + std::to_string(secs) + " s");
}

void round_trip(Findings& v) {
    std::vector<std::string> seeds;
    for (const auto& p : corpus_files()) {
        const std::string text = slurp(p);
        seeds.push_back(text);
        auto a = dsl::parse(text, p.string());
        if (!a.ok()) {
            v.require(false, "parse " + p.string());
            continue;
        }
        const std::string once = dsl::print(*a.file);
        auto b = dsl::parse(once, p.string());
        v.require(b.ok() && dsl::structurally_equal(*a.file, *b.file), "round trip " + p.filename().string());
        v.require(b.ok() && dsl::print(*b.file) == once, "idempotence " + p.filename().string());
    }
    v.require(sh("fmt --check " + fixtures).code == 0, "fmt --check on the corpus");

    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t len = std::min<std::size_t>(
            1u << 20, static_cast<std::size_t>(std::exp2(std::uniform_real_distribution<double>(0, 20)(rng))));
        std::string input;
        if (i % 2) {
            input.resize(len);
            for (char& ch : input) ch = static_cast<char>(rng() & 0xff);
        } else {
            input = seeds[rng() % seeds.size()];
            input.resize(std::min(input.size(), len));
            for (int k = 0; k < 4 && !input.empty(); ++k) input[rng() % input.size()] = static_cast<char>(rng());
        }
        const auto r = dsl::parse(input);
        v.require(r.ok() || !r.diagnostics.empty(), "fuzz input " + std::to_string(i) + " failed silently");
    }
}

void coherence(Findings& v) {
    const Corpus& c = shipped().corpus();
    std::size_t mutants = 0;
    for (const auto& [name, p] : c.patterns) {
        bool has_request = false;
        for (const auto& m : p.messages)
            has_request |= c.actions.at(c.messages.at(m).action).primitive.kind == PrimitiveKind::Request;
        const auto obligations = dialogue_obligations(p, c);
        v.require(has_request == !obligations.empty(), "obligations of " + name);
        for (const auto& o : obligations) {
            if (!o.answer) {
                v.require(false, name + " has an unanswered request");
                continue;
            }
            Pattern mutant = p;
            mutant.messages.erase(mutant.messages.begin() + static_cast<std::ptrdiff_t>(*o.answer));
            if (mutant.messages.empty()) continue;
            ++mutants;
            v.require(check_pattern(mutant, c).count(codes::unanswered_warning) > 0,
                      "false negative: " + name + " without " + p.messages[*o.answer]);
        }
    }
    v.require(mutants > 0, "no mutants generated");
    v.require(check_pattern(c.patterns.at("policy-visualization"), c).diagnostics.empty(),
              "policy-visualization warns");
}

ActionDef action(std::string_view text) {
    auto r = dsl::parse(text);
    if (!r.ok()) throw std::runtime_error(render(r.diagnostics.at(0)));
    return std::get<ActionDef>(r.file->declarations.at(0).node);
}

void type_matrix(Findings& v) {
    const std::vector<std::pair<std::string_view, std::function<ActionDef()>>> matrix = {
        {codes::modify_type,
         [] { return action("action a(Y, Z) := provide(Z: output.label, Y: input.raw_data) <- modify(Y, Z);"); }},
        {codes::select_nonlist,
         [] { return action("action s(X, Y) := provide(X: output.label, Y: output.label) <- select(X, Y);"); }},
        {codes::select_elem,
         [] { return action("action b(X, L) := provide(X: input.raw_data, L: [output.label]) <- select(X, L);"); }},
        {codes::undeclared_var,
         [] {
             auto a = action("action u(X, Y) := provide(Y: output.label, X: input.raw_data) <- map(X, Y);");
             a.operations[0].args[1] = "W";
             return a;
         }},
        {codes::dup_var,
         [] {
             auto a = action("action d(X, Y) := provide(Y: output.label, X: input.raw_data);");
             a.primitive.refs[0].var = "Y";
             return a;
         }},
        {codes::arity,
         [] {
             auto a = action("action m(X, Y) := provide(Y: input.raw_data, X: input.raw_data) <- modify(X, Y);");
             a.operations[0].args.push_back("X");
             return a;
         }},
    };
    for (const auto& [code, build] : matrix) {
        const auto r = check_action(build());
        v.require(r.verdict() == haiproto::Verdict::Fail && r.count(code) > 0, "not rejected: " + std::string(code));
    }
    for (const auto& [name, def] : shipped().corpus().actions)
        v.require(check_action(def).verdict() == haiproto::Verdict::Pass, "corpus action fails: " + name);
}

void diff_reproduction(Findings& v) {
    const Shell r = sh("--fixtures " + fixtures + " catalog diff query-P1 query-P2 --json");
    v.require(r.code == 0, "catalog diff exit " + std::to_string(r.code));
    try {
        const auto j = nlohmann::json::parse(r.out);
        v.require(j.at("only_in_a").size() == 1 && j.at("only_in_a")[0].at("action") == "annotate-sample",
                  "only in P1");
        v.require(j.at("only_in_b").size() == 1 && j.at("only_in_b")[0].at("action") == "req-modified_prediction",
                  "only in P2");
        v.require(j.at("shared").size() == 2 && j.at("direction_changes").empty(), "shared remainder");
    } catch (const std::exception& e) {
        v.require(false, std::string("diff output: ") + e.what());
    }
}

void scenarios(Findings& v) {
    const Corpus& c = shipped().corpus();
    std::map<std::string, std::size_t> len;
    for (const char* d : {"D1", "D2", "D3", "D4"}) {
        const Scenario* s = c.find_scenario(d);
        if (!s) {
            v.require(false, std::string("missing scenario ") + d);
            continue;
        }
        const auto comp = compose(c, *s);
        v.require(comp.report.verdict() == haiproto::Verdict::Pass, std::string(d) + " fails scenario check");
        len[d] = comp.pattern.messages.size();
    }
    const std::size_t xai = c.patterns.at("prediction-based_XAI").messages.size();
    v.require(xai == 2, "prediction-based_XAI length");
    v.require(len["D4"] == len["D3"] + xai, "D4 - D3 = " + std::to_string(len["D4"] - len["D3"]));
}

void determinism(Findings& v) {
    const fs::path dir = fs::temp_directory_path() / "haiproto_acceptance";
    fs::create_directories(dir);
    const std::string base = "--fixtures " + fixtures + " run D1 --agents " + fixtures +
                             "/agents/robot_demo.agents --seed 7 --repeat 6 --trace ";
    const Shell a = sh(base + (dir / "a.jsonl").string());
    const Shell b = sh(base + (dir / "b.jsonl").string());
    const std::string ta = slurp(dir / "a.jsonl");
    const std::string tb = slurp(dir / "b.jsonl");
    fs::remove_all(dir);
    v.require(a.code == 0 && b.code == 0, "run exit codes");
    v.require(!ta.empty() && ta == tb, "traces differ");
    v.require(a.out.find("model: 6 stored examples") != std::string::npos, "stored example count");
    try {
        const auto traces = runtime::parse_jsonl(ta);
        v.require(traces.size() == 6, "trace count");
        v.require(runtime::replay_bindings(traces, &shipped().corpus()).empty(), "replay reports E-BINDING");
    } catch (const std::exception& e) {
        v.require(false, std::string("trace parse: ") + e.what());
    }
}

// Brute-force nearest centroid, independent of the library.
std::string oracle(const std::vector<agents::Example>& data, const std::vector<double>& x) {
    std::map<std::string, std::pair<std::vector<double>, double>> acc;
    for (const auto& e : data) {
        auto& [sum, n] = acc[e.label];
        sum.resize(x.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) sum[i] += e.x[i];
        n += 1;
    }
    std::string best;
    double best_d = 0;
    for (const auto& [label, s] : acc) {
        double d = 0;
        for (std::size_t i = 0; i < x.size(); ++i) d += std::pow(x[i] - s.first[i] / s.second, 2);
        if (best.empty() || d < best_d || (d == best_d && label < best)) {
            best = label;
            best_d = d;
        }
    }
    return best;
}

void classifier(Findings& v) {
    const auto file = agents::parse_agents(slurp(fs::path(fixtures) / "agents" / "robot_demo.agents"));
    // The fixture's six points are the scripted T3b samples paired with the T1b labels.
    const auto& xs = file.script.responses("T3b", "X");
    const auto& ys = file.script.responses("T1b", "Y");
    std::vector<agents::Example> data;
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
        data.push_back({std::get<std::vector<double>>(xs[i].value->data), std::get<Symbol>(ys[i].value->data).text});
    v.require(data.size() == 6, "fixture has " + std::to_string(data.size()) + " points");

    agents::NearestCentroid nc;
    for (const auto& e : data) nc.add(e.x, e.label);
    for (const auto& e : data) {
        v.require(oracle(data, e.x) == e.label, "oracle misclassifies a training point");
        v.require(nc.classify(e.x) == oracle(data, e.x), "training point disagreement");
    }
    std::mt19937_64 rng(1000);
    std::uniform_real_distribution<double> coord(-2.0, 10.0);
    std::uniform_int_distribution<int> grid(-4, 20);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x = i % 2 ? std::vector<double>{coord(rng), coord(rng)}
                                            : std::vector<double>{grid(rng) * 0.5, grid(rng) * 0.5};
        if (nc.classify(x) != oracle(data, x)) {
            v.require(false, "disagreement at (" + std::to_string(x[0]) + ", " + std::to_string(x[1]) + ")");
            break;
        }
    }
    const std::vector<agents::Example> tie = {{{0, 0}, "b"}, {{2, 0}, "a"}};
    agents::NearestCentroid t;
    for (const auto& e : tie) t.add(e.x, e.label);
    v.require(t.classify({1, 0}) == "a" && oracle(tie, {1, 0}) == "a", "tie-break");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, void (*)(Findings&)>> criteria = {
        {"1 corpus fidelity", corpus_fidelity},
        {"2 round-trip and fuzz", round_trip},
        {"3 coherence sensitivity", coherence},
        {"4 type-rule matrix", type_matrix},
        {"5 query diff P1/P2", diff_reproduction},
        {"6 design scenarios D1-D4", scenarios},
        {"7 determinism", determinism},
        {"8 classifier oracle", classifier},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Findings v;
        try {
            fn(v);
        } catch (const std::exception& e) {
            v.problems.push_back(std::string("exception: ") + e.what());
        }
        if (v.problems.empty()) {
            std::cout << "PASS " << name << "\n";
        } else {
            ++failed;
            std::cout << "FAIL " << name << ": " << v.problems.front();
            if (v.problems.size() > 1) std::cout << " (+" << v.problems.size() - 1 << " more)";
            std::cout << "\n";
        }
    }
    return failed == 0 ? 0 : 1;
}
