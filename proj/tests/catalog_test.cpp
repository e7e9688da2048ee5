#include <gtest/gtest.h>

#include <algorithm>

#include "haiproto/catalog.hpp"

using namespace haiproto;

namespace {

const Catalog& shipped() {
    static const Catalog c = Catalog::load({HAIPROTO_FIXTURE_DIR});
    return c;
}

std::vector<std::string> names(const std::vector<const Pattern*>& ps) {
    std::vector<std::string> out;
    for (const auto* p : ps) out.push_back(p->name);
    return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<std::string> labels(const std::string& prefix, int n) {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

std::vector<std::string> actions_of(const std::vector<DiffStep>& steps) {
    std::vector<std::string> out;
    for (const auto& s : steps) out.push_back(s.action);
    return out;
}

}  // namespace

TEST(Coverage, ActionTableRows) {
    const std::vector<std::string> rows = {
        "req-class_selection",   "select-class",         "req-new_class_sample",   "req-class_sample",
        "req-sample_class",      "req-gsample_class",    "req-sel_sample_class",   "annotate-sample",
        "show-policy",           "give-evaluative_advice", "modify-prediction",    "show-candidate_samples",
        "select-sample",         "modify-sample",        "generate-sample",        "modify-mparams",
        "modify-features",       "req-prediction_evaluation", "evaluate-prediction", "show-prediction_XAI",
    };
    const Corpus& c = shipped().corpus();
    for (const auto& r : rows) EXPECT_TRUE(c.find_action(r)) << r;
}

TEST(Coverage, PatternTableRows) {
    const std::vector<std::string> rows = {
        "class-selection",        "new_sample",           "new_class_sample",     "sample-annotation",
        "new_sample-annotation",  "candidate_samples",    "sample-modification",  "feature-modification",
        "parameter-modification", "prediction-modification", "policy-visualization", "informative_advice",
        "evaluative_advice",      "prediction-based_XAI", "outcome-evaluation",   "prediction_parameters",
        "turn_taking-evaluation", "prediction-with-XAI",  "recommendations",
    };
    ASSERT_EQ(rows.size(), 19u);
    const Corpus& c = shipped().corpus();
    for (const auto& r : rows) EXPECT_TRUE(c.find_pattern(r)) << r;
    EXPECT_GE(c.patterns.size(), 19u + 19u);
}

TEST(Coverage, UseCaseMessageLabels) {
    std::vector<std::string> all;
    for (auto [prefix, n] : std::vector<std::pair<std::string, int>>{
             {"A", 6}, {"B", 9}, {"C", 5}, {"D", 5}, {"E", 3}, {"F", 7}, {"G", 5}, {"H", 2}}) {
        auto l = labels(prefix, n);
        all.insert(all.end(), l.begin(), l.end());
    }
    const Corpus& c = shipped().corpus();
    for (const auto& m : all) EXPECT_TRUE(c.find_message(m)) << m;
}

TEST(Coverage, ImplementationNotesAreKept) {
    const auto& notes = shipped().annotations();
    for (const char* p : {"candidate_samples", "prediction-modification", "policy-visualization",
                          "informative_advice", "evaluative_advice", "prediction-based_XAI"})
        EXPECT_TRUE(notes.count(p)) << p;
}

TEST(Coverage, MultiAgentRolesAreDeclared) {
    const Corpus& c = shipped().corpus();
    for (const char* r : {"supervisor", "decision_subject", "human_controller"}) EXPECT_TRUE(c.roles.count(r)) << r;
    for (const char* p : {"modification-request", "negotiation"}) EXPECT_TRUE(c.find_pattern(p)) << p;
}

TEST(Load, ShippedCorpusIsClean) {
    EXPECT_TRUE(shipped().warnings().empty());
    for (const auto& r : check_corpus(shipped().corpus())) EXPECT_TRUE(r.diagnostics.empty()) << r.target;
}

TEST(Load, ZeroFilesGiveAnEmptyCatalog) {
    const Catalog c = Catalog::from_sources({});
    EXPECT_TRUE(c.corpus().actions.empty());
    EXPECT_TRUE(c.corpus().patterns.empty());
    EXPECT_TRUE(c.query(std::set<Tag>{}).empty());
}

TEST(Load, DuplicateAcrossFiles) {
    const std::string def =
        "action annotate-sample(X, Y) := provide(Y: output.label, X: input.raw_data|fvector) <- map(X, Y);\n";
    try {
        (void)Catalog::from_sources({{"a.hai", def}, {"b.hai", def}});
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        ASSERT_FALSE(e.diagnostics().empty());
        EXPECT_EQ(e.diagnostics()[0].code, codes::dup_name);
        EXPECT_EQ(e.diagnostics()[0].path, "b.hai");
        EXPECT_EQ(e.diagnostics()[0].span.line, 1);
    }
}

TEST(Load, UnresolvedReference) {
    try {
        (void)Catalog::from_sources({{"a.hai", "message m := model -> user : nowhere(X);\n"}});
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_EQ(e.diagnostics().at(0).code, codes::unresolved);
    }
}

TEST(Load, MissingPathIsAnIoError) {
    try {
        (void)Catalog::load({"/nonexistent/fixtures"});
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_EQ(e.diagnostics().at(0).code, codes::io);
    }
}

TEST(Query, XaiPatterns) {
    const auto got = names(shipped().query(std::vector<std::string>{"xai"}));
    for (const char* p : {"prediction-based_XAI", "prediction-with-XAI", "prediction_parameters", "policy-visualization"})
        EXPECT_TRUE(contains(got, p)) << p;
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

TEST(Query, HitlPatterns) {
    const auto got = names(shipped().query(std::vector<std::string>{"hitl"}));
    for (const char* p : {"sample-annotation", "informative_advice", "evaluative_advice", "parameter-modification"})
        EXPECT_TRUE(contains(got, p)) << p;
}

TEST(Query, EmptyQueryAndTagUnion) {
    const Catalog& c = shipped();
    const auto all = names(c.query(std::set<Tag>{}));
    EXPECT_EQ(all.size(), c.corpus().patterns.size());
    std::set<std::string> united;
    for (Tag t : all_tags())
        for (const auto& n : names(c.query(std::set<Tag>{t}))) united.insert(n);
    EXPECT_EQ(std::vector<std::string>(united.begin(), united.end()), all);
}

TEST(Query, UnknownTagIsRejected) {
    EXPECT_THROW((void)shipped().query(std::vector<std::string>{"nosuch"}), UnknownName);
}

TEST(Diff, QueryAlternatives) {
    const Corpus& c = shipped().corpus();
    const auto d = diff(c.patterns.at("query-P1"), c.patterns.at("query-P2"), c);
    ASSERT_EQ(d.shared.size(), 2u);
    EXPECT_EQ(d.shared[0].first.action, "req-sample_class");
    EXPECT_EQ(d.shared[1].first.action, "modify-prediction");
    EXPECT_EQ(actions_of(d.only_in_a), std::vector<std::string>{"annotate-sample"});
    EXPECT_EQ(actions_of(d.only_in_b), std::vector<std::string>{"req-modified_prediction"});
    EXPECT_TRUE(d.direction_changes.empty());
}

TEST(Diff, IdentityIsEmpty) {
    const Corpus& c = shipped().corpus();
    for (const auto& [name, p] : c.patterns) {
        const auto d = diff(p, p, c);
        EXPECT_TRUE(d.identical()) << name;
        EXPECT_EQ(d.shared.size(), p.messages.size());
    }
}

TEST(Diff, AnnotationAndNewClassSampleShareNothing) {
    const Corpus& c = shipped().corpus();
    const auto d = diff(c.patterns.at("sample-annotation"), c.patterns.at("new_class_sample"), c);
    EXPECT_TRUE(d.shared.empty());
    EXPECT_EQ(d.only_in_a.size(), 2u);
    EXPECT_EQ(d.only_in_b.size(), 2u);
}

TEST(Diff, ReportsDirectionChanges) {
    const Corpus& c = shipped().corpus();
    // A6 and T4b carry the same action; T10a sends annotate-sample the other way.
    const Pattern a{"a", {"T4b"}, {}, {}};
    const Pattern b{"b", {"T10a"}, {}, {}};
    const auto d = diff(a, b, c);
    ASSERT_EQ(d.direction_changes.size(), 1u);
    EXPECT_EQ(d.direction_changes[0].a.action, "annotate-sample");
    EXPECT_NE(d.direction_changes[0].a.direction, d.direction_changes[0].b.direction);
}

TEST(Diff, SwappingArgumentsSwapsSides) {
    const Corpus& c = shipped().corpus();
    std::vector<const Pattern*> ps;
    for (const auto& [name, p] : c.patterns) ps.push_back(&p);
    for (std::size_t i = 0; i < ps.size(); i += 3) {
        for (std::size_t j = 0; j < ps.size(); j += 5) {
            const auto ab = diff(*ps[i], *ps[j], c);
            const auto ba = diff(*ps[j], *ps[i], c);
            EXPECT_EQ(ab.only_in_a, ba.only_in_b);
            EXPECT_EQ(ab.only_in_b, ba.only_in_a);
            EXPECT_EQ(ab.shared.size(), ba.shared.size());
        }
    }
}

TEST(Compose, DesignAlternativesPassAtScenarioScope) {
    const Corpus& c = shipped().corpus();
    const std::map<std::string, std::size_t> lengths = {{"D1", 6}, {"D2", 6}, {"D3", 6}, {"D4", 8}};
    for (const auto& [name, len] : lengths) {
        const auto comp = compose(c, c.scenarios.at(name));
        EXPECT_EQ(comp.report.verdict(), Verdict::Pass) << name;
        EXPECT_EQ(comp.pattern.messages.size(), len) << name;
    }
    const auto d1 = compose(c, std::vector<std::string>{"class-selection", "new_class_sample", "sample-annotation"});
    EXPECT_EQ(d1.pattern.messages, compose(c, c.scenarios.at("D1")).pattern.messages);
}

TEST(Compose, D4ExtendsD3ByTheXaiPattern) {
    const Corpus& c = shipped().corpus();
    const auto d3 = compose(c, c.scenarios.at("D3")).pattern.messages;
    const auto d4 = compose(c, c.scenarios.at("D4")).pattern.messages;
    const auto& xai = c.patterns.at("prediction-based_XAI").messages;
    ASSERT_EQ(d4.size(), d3.size() + xai.size());
    EXPECT_EQ(xai.size(), 2u);
    EXPECT_TRUE(std::equal(d3.begin(), d3.end(), d4.begin()));
    EXPECT_TRUE(std::equal(xai.begin(), xai.end(), d4.begin() + static_cast<std::ptrdiff_t>(d3.size())));
}

TEST(Compose, EmptyAndUnknown) {
    const Corpus& c = shipped().corpus();
    EXPECT_THROW((void)compose(c, std::vector<std::string>{}), std::invalid_argument);
    EXPECT_THROW((void)compose(c, std::vector<std::string>{"nosuch"}), UnknownName);
}

TEST(Compose, UnansweredAtTheEndEscalates) {
    const Corpus& c = shipped().corpus();
    const auto comp = compose(c, std::vector<std::string>{"class-selection", "new_sample-annotation"});
    EXPECT_EQ(comp.report.verdict(), Verdict::Pass);
    Pattern half{"half", {"T1a"}, {}, {}};
    const auto open = compose(c, std::vector<Pattern>{half});
    EXPECT_EQ(open.report.count(codes::unanswered_error), 1u);
}

TEST(Compose, AssociativeOverMessages) {
    const Corpus& c = shipped().corpus();
    const Pattern& p = c.patterns.at("class-selection");
    const Pattern& q = c.patterns.at("new_sample_and_class");
    const Pattern& r = c.patterns.at("modify-prediction");
    const auto left = compose(c, std::vector<Pattern>{compose(c, std::vector<Pattern>{p, q}).pattern, r});
    const auto right = compose(c, std::vector<Pattern>{p, compose(c, std::vector<Pattern>{q, r}).pattern});
    EXPECT_EQ(left.pattern.messages, right.pattern.messages);
    EXPECT_EQ(left.report.diagnostics, right.report.diagnostics);
}

TEST(Json, RoundTripsTheCorpus) {
    const Corpus& c = shipped().corpus();
    const std::string text = export_json(c);
    const Corpus back = import_json(text);
    EXPECT_EQ(back.actions, c.actions);
    EXPECT_EQ(back.messages, c.messages);
    EXPECT_EQ(back.patterns, c.patterns);
    EXPECT_EQ(back.scenarios, c.scenarios);
    EXPECT_EQ(back.roles, c.roles);
    EXPECT_EQ(export_json(back), text);
}

TEST(Json, MalformedInputThrows) {
    EXPECT_THROW((void)import_json("{"), std::invalid_argument);
    EXPECT_THROW((void)import_json("{\"actions\": 3}"), std::invalid_argument);
}

TEST(Runnable, PatternsAndScenarios) {
    const Catalog& c = shipped();
    EXPECT_EQ(c.resolve_runnable("sample-annotation").messages.size(), 2u);
    EXPECT_EQ(c.resolve_runnable("D4").messages.size(), 8u);
    EXPECT_THROW((void)c.resolve_runnable("nosuch"), UnknownName);
}
