#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "haiproto/dsl.hpp"

using namespace haiproto;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(HAIPROTO_FIXTURE_DIR))
        if (e.path().extension() == ".hai") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

const ActionDef& only_action(const dsl::ParseResult& r) {
    return std::get<ActionDef>(r.file->declarations.at(0).node);
}

bool has_code(const dsl::ParseResult& r, std::string_view code) {
    return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const auto& d) { return d.code == code; });
}

}  // namespace

TEST(Parse, ClassSelectionAction) {
    auto r = dsl::parse(
        "action req-class_selection(Y,L) := request(Y: output.label, L: [output.label]) <- select(Y,L);");
    ASSERT_TRUE(r.ok()) << render(r.diagnostics.at(0));
    const ActionDef& a = only_action(r);
    EXPECT_EQ(a.name, "req-class_selection");
    EXPECT_EQ(a.params, (std::vector<std::string>{"Y", "L"}));
    EXPECT_EQ(a.primitive.kind, PrimitiveKind::Request);
    EXPECT_EQ(a.primitive.head.var, "Y");
    EXPECT_EQ(a.primitive.head.type, TypeExpr::base(Role::Output, {"label"}));
    ASSERT_EQ(a.primitive.refs.size(), 1u);
    EXPECT_EQ(a.primitive.refs[0].type, TypeExpr::list(TypeExpr::base(Role::Output, {"label"})));
    ASSERT_EQ(a.operations.size(), 1u);
    EXPECT_EQ(a.operations[0].kind, OpKind::Select);
    EXPECT_EQ(a.operations[0].args, (std::vector<std::string>{"Y", "L"}));
}

TEST(Parse, EmptyPatternIsRejected) {
    auto r = dsl::parse("pattern p := [];");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_code(r, codes::empty_pattern));
}

TEST(Parse, ModifyNeedsTwoArguments) {
    auto r = dsl::parse("action a(X) := provide(X: input) <- modify(X);");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_code(r, codes::arity));
}

TEST(Parse, LexicalAndSyntaxErrorsCarrySpans) {
    auto lex = dsl::parse("action a(X) := provide(X: input) $;");
    ASSERT_FALSE(lex.ok());
    EXPECT_EQ(lex.diagnostics[0].code, codes::lex);
    EXPECT_EQ(lex.diagnostics[0].span.line, 1);
    EXPECT_EQ(lex.diagnostics[0].span.column, 34);

    auto syn = dsl::parse("\naction a(X) provide(X: input);");
    ASSERT_FALSE(syn.ok());
    EXPECT_EQ(syn.diagnostics[0].code, codes::syntax);
    EXPECT_EQ(syn.diagnostics[0].span.line, 2);
}

TEST(Parse, DuplicateNamesAndForwardReferences) {
    auto dup = dsl::parse(
        "action a(X) := provide(X: input);\n"
        "action a(X) := provide(X: input);\n");
    EXPECT_TRUE(has_code(dup, codes::dup_name));

    auto fwd = dsl::parse(
        "message m := model -> user : a(X);\n"
        "action a(X) := provide(X: input);\n");
    EXPECT_TRUE(has_code(fwd, codes::forward_ref));
}

TEST(Parse, NoPartialResultOnError) {
    auto r = dsl::parse(
        "action a(X) := provide(X: input);\n"
        "pattern p := [];\n");
    EXPECT_FALSE(r.file.has_value());
}

TEST(Parse, BothModifierStyles) {
    auto r = dsl::parse(
        "action a(X) := provide(X: input);\n"
        "message m := model -> user : a(X) [X:WalkStand; note=\"shown on screen\"];\n");
    ASSERT_TRUE(r.ok());
    const auto& m = std::get<Message>(r.file->declarations.at(1).node);
    ASSERT_EQ(m.modifiers.size(), 2u);
    EXPECT_TRUE(m.modifiers[0].annotates_variable);
    EXPECT_EQ(m.modifiers[0].value, "WalkStand");
    EXPECT_FALSE(m.modifiers[1].annotates_variable);
    EXPECT_EQ(m.modifiers[1].value, "shown on screen");
}

TEST(Parse, DeterministicDiagnostics) {
    const std::string bad = "action a(X := provide(;\npattern q := [nope]\n@@";
    auto a = dsl::parse(bad);
    auto b = dsl::parse(bad);
    EXPECT_EQ(a.diagnostics, b.diagnostics);
}

TEST(Print, ActionWithoutOperationsOnOneLine) {
    auto r = dsl::parse("action generate-sample(X)   :=  provide( X : input.raw_data ) ;");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(dsl::print(*r.file), "action generate-sample(X) := provide(X: input.raw_data);\n");
}

TEST(Print, UnionSubtypeIsPreserved) {
    auto r = dsl::parse(
        "action annotate-sample(X, Y) := provide(Y: output.label, X: input.raw_data|fvector) <- map(X, Y);");
    ASSERT_TRUE(r.ok());
    const std::string text = dsl::print(*r.file);
    EXPECT_NE(text.find("X: input.raw_data|fvector"), std::string::npos) << text;
}

TEST(ParseType, SurfaceForms) {
    EXPECT_EQ(dsl::parse_type("input.raw_data|fvector"), TypeExpr::base(Role::Input, {"raw_data", "fvector"}));
    EXPECT_EQ(dsl::parse_type("[output.label]"), TypeExpr::list(TypeExpr::base(Role::Output, {"label"})));
    EXPECT_FALSE(dsl::parse_type("output.").has_value());
    EXPECT_FALSE(dsl::parse_type("[[input]]").has_value());
}

TEST(Corpus, EveryFileRoundTrips) {
    const auto files = corpus_files();
    ASSERT_GE(files.size(), 12u);
    for (const auto& p : files) {
        SCOPED_TRACE(p.string());
        auto first = dsl::parse(slurp(p), p.string());
        ASSERT_TRUE(first.ok()) << render(first.diagnostics.at(0));
        const std::string printed = dsl::print(*first.file);
        auto second = dsl::parse(printed, p.string());
        ASSERT_TRUE(second.ok()) << render(second.diagnostics.at(0));
        EXPECT_TRUE(dsl::structurally_equal(*first.file, *second.file));
        EXPECT_EQ(dsl::print(*second.file), printed);
    }
}

TEST(Corpus, ShippedFilesAreAlreadyCanonical) {
    for (const auto& p : corpus_files()) {
        const std::string text = slurp(p);
        auto r = dsl::parse(text, p.string());
        ASSERT_TRUE(r.ok());
        EXPECT_EQ(dsl::print(*r.file), text) << p;
    }
}

TEST(Fuzz, RandomBytesNeverCrash) {
    std::mt19937_64 rng(20260101);
    std::vector<std::string> seeds;
    for (const auto& p : corpus_files()) seeds.push_back(slurp(p));
    const std::string alphabet = "actionmessagepatternscenariorole:=->[](),;|.@<-\"/ \nXYZinputoutputfeedback";

    constexpr std::size_t runs = 10000;
    constexpr std::size_t max_len = 1u << 20;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        // Lengths are log-uniform so that a few inputs reach the 1 MiB cap.
        const double e = std::uniform_real_distribution<double>(0.0, 20.0)(rng);
        std::size_t len = std::min(max_len, static_cast<std::size_t>(std::exp2(e)));
        if (i % 1000 == 999) len = max_len;
        std::string input;
        input.reserve(len);
        switch (i % 3) {
        case 0:
            while (input.size() < len) input.push_back(static_cast<char>(rng() & 0xff));
            break;
        case 1:
            while (input.size() < len) input.push_back(alphabet[rng() % alphabet.size()]);
            break;
        default: {
            const std::string& base = seeds[rng() % seeds.size()];
            input = base.substr(0, std::min(len, base.size()));
            for (std::size_t k = 0, n = 1 + rng() % 8; k < n && !input.empty(); ++k)
                input[rng() % input.size()] = static_cast<char>(rng() & 0xff);
        }
        }
        auto r = dsl::parse(input);
        EXPECT_LE(r.diagnostics.size(), dsl::max_diagnostics);
        if (r.ok()) {
            ++ok;
            auto again = dsl::parse(dsl::print(*r.file));
            ASSERT_TRUE(again.ok());
        } else {
            ASSERT_FALSE(r.diagnostics.empty());
        }
    }
    EXPECT_LT(ok, runs);
}
