#include <doctest.h>

#include <set>

#include "testutil.hpp"

using namespace lw;
using namespace lwtest;

namespace {

GrammarModel parse_ok(const std::string& text) {
    Result<GrammarModel> r = parse_grammar(text, "test.mcg");
    REQUIRE_MESSAGE(r.ok(), (r.findings.empty() ? "" : render_finding(r.findings[0])));
    return std::move(*r.value);
}

std::vector<Finding> parse_fail(const std::string& text) {
    Result<GrammarModel> r = parse_grammar(text, "test.mcg");
    REQUIRE_FALSE(r.ok());
    REQUIRE_FALSE(r.findings.empty());
    return r.findings;
}

bool has_code(const std::vector<Finding>& fs, const std::string& code) {
    return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) { return f.code == code; });
}

} // namespace

TEST_CASE("parse: class production with modifier, keyword, and labeled token") {
    GrammarModel g = parse_ok(
        "grammar cd.CD {\n"
        "  token MOD = \"(public|private|protected)\\\\b\" ;\n"
        "  CDClass = Modifier \"class\" Name:ID \"{\" \"}\" ;\n"
        "  Modifier = (m:MOD)? ;\n"
        "}\n");
    CHECK(g.name.qualified() == "cd.CD");
    const ProductionRule* p = g.find_production("CDClass");
    REQUIRE(p != nullptr);
    CHECK(p->flavor == Flavor::Normal);
    REQUIRE(p->rhs->kind == RhsExpr::Kind::Sequence);
    const RhsExpr& first = *p->rhs->children[0];
    CHECK(first.kind == RhsExpr::Kind::NonterminalRef);
    CHECK(first.text == "Modifier");
    const RhsExpr& second = *p->rhs->children[1];
    CHECK(second.kind == RhsExpr::Kind::Terminal);
    CHECK(second.text == "class");
    const RhsExpr& third = *p->rhs->children[2];
    CHECK(third.kind == RhsExpr::Kind::TokenRef);
    CHECK(third.text == "ID");
    CHECK(third.label() == "Name");
}

TEST_CASE("parse: extends clause on grammar and production") {
    GrammarModel g = parse_ok(
        "grammar clarc.ClArc extends montiarc.MontiArc {\n"
        "  ClArcPort extends ArcPort = \"port\" \"[\" \"*\" \"]\" Name:ID \";\" ;\n"
        "}\n");
    REQUIRE(g.extends_grammar.has_value());
    CHECK(g.extends_grammar->qualified() == "montiarc.MontiArc");
    const ProductionRule* p = g.find_production("ClArcPort");
    REQUIRE(p != nullptr);
    CHECK(p->extends_production == "ArcPort");
}

TEST_CASE("parse: empty grammar") {
    GrammarModel g = parse_ok("grammar x.Empty { }");
    CHECK(g.productions.empty());
    CHECK_FALSE(g.start_production.has_value());
    CHECK_FALSE(g.effective_start().has_value());
}

TEST_CASE("parse: package header form equals embedded package form") {
    GrammarModel a = parse_ok("package a.b ; grammar Name { X = \"x\" ; }");
    GrammarModel b = parse_ok("grammar a.b.Name { X = \"x\" ; }");
    CHECK(structurally_equal(a, b));
    CHECK(a.name.qualified() == "a.b.Name");
}

TEST_CASE("parse: productions appear in source order; first normal is the start") {
    GrammarModel g = parse_ok(
        "grammar t.T { interface I ; A implements I = \"a\" ; B = \"b\" ; }");
    REQUIRE(g.productions.size() == 3);
    CHECK(g.productions[0].name == "I");
    CHECK(g.productions[1].name == "A");
    CHECK(g.effective_start() == "A");
}

TEST_CASE("parse failure: syntax error carries the first error position") {
    std::vector<Finding> fs = parse_fail("grammar t.T { A = ; B = \"b\" %%% ; }");
    CHECK(fs[0].code == "SyntaxError");
    CHECK(fs[0].pos.line == 1);
}

TEST_CASE("parse failure: flavor invariants become findings, never models") {
    CHECK(has_code(parse_fail("grammar t.T { external E = \"x\" ; }"), "ExternalWithBody"));
    CHECK(has_code(parse_fail("grammar t.T { external E extends F ; F = \"f\" ; }"),
                   "ExternalWithBody"));
    CHECK(has_code(parse_fail("grammar t.T { interface I = \"x\" ; }"), "InterfaceWithBody"));
    CHECK(has_code(parse_fail("grammar t.T { A ; }"), "MissingBody"));
    CHECK(has_code(parse_fail("grammar t.T { abstract A ; }"), "MissingBody"));
}

TEST_CASE("parse failure: duplicates, start markers, token rules") {
    CHECK(has_code(parse_fail("grammar t.T { A = \"a\" ; A = \"b\" ; }"), "DuplicateProduction"));
    CHECK(has_code(parse_fail("grammar t.T { start A = \"a\" ; start B = \"b\" ; }"),
                   "MultipleStart"));
    CHECK(has_code(parse_fail("grammar t.T { token ID = \"x+\" ; }"), "BuiltinTokenRedefined"));
    CHECK(has_code(parse_fail("grammar t.T { token X = \"[\" ; A = \"a\" ; }"), "BadTokenPattern"));
    CHECK(has_code(parse_fail("grammar t.T { token X = \"a*\" ; A = \"a\" ; }"), "BadTokenPattern"));
    CHECK(has_code(parse_fail("grammar t.T { token X = \"x\" ; token X = \"y\" ; }"),
                   "DuplicateToken"));
    CHECK(has_code(parse_fail("grammar t.T extends t.T { }"), "SelfExtends"));
    CHECK(has_code(parse_fail("package a ; grammar b.T { }"), "PackageConflict"));
}

TEST_CASE("validate: abstract production needs a normal extender") {
    GrammarModel g = parse_ok("grammar t.T { abstract A = \"a\" ; B = \"b\" ; }");
    std::vector<Finding> fs = validate_grammar(g, {});
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].code == "AbstractWithoutExtender");

    GrammarModel ok = parse_ok("grammar t.T { abstract A = \"a\" ; B extends A = \"b\" ; }");
    CHECK(validate_grammar(ok, {}).empty());
}

// Oracle: a reference is undefined iff its target is in no one's production
// list, token list, or the built-in token set.
TEST_CASE("validate: undefined nonterminal agrees with a linear-scan oracle") {
    GrammarModel g = parse_ok(
        "grammar t.T {\n"
        "  A = Foo \"x\" Bar:B ;\n"
        "  B = \"b\" Baz ;\n"
        "}\n");

    std::set<std::string> defined;
    for (const auto& p : g.productions) defined.insert(p.name);
    for (const auto& t : g.tokens) defined.insert(t.name);
    for (const auto& t : builtin_tokens()) defined.insert(t.name);
    std::vector<std::pair<std::string, SourcePos>> expected_undefined;
    std::function<void(const RhsExpr&)> scan = [&](const RhsExpr& e) {
        if (e.kind == RhsExpr::Kind::NonterminalRef && !defined.count(e.text))
            expected_undefined.emplace_back(e.text, e.pos);
        for (const auto& c : e.children) scan(*c);
    };
    for (const auto& p : g.productions)
        if (p.rhs) scan(*p.rhs);
    REQUIRE(expected_undefined.size() == 2); // Foo and Baz

    std::vector<Finding> fs = validate_grammar(g, {});
    std::vector<Finding> undefined;
    for (const auto& f : fs)
        if (f.code == "UndefinedNonterminal") undefined.push_back(f);
    REQUIRE(undefined.size() == expected_undefined.size());
    for (const auto& [name, pos] : expected_undefined) {
        bool found = std::any_of(undefined.begin(), undefined.end(), [&](const Finding& f) {
            return f.message.find("'" + name + "'") != std::string::npos && f.pos == pos;
        });
        CHECK_MESSAGE(found, "missing finding for ", name);
    }
}

TEST_CASE("validate: fixture grammars are clean") {
    GrammarModel cd = parse_fixture_grammar("cd/CD.mcg");
    CHECK(validate_grammar(cd, {}).empty());
    GrammarModel hql = parse_fixture_grammar("hql/HQL.mcg");
    CHECK(validate_grammar(hql, {}).empty());
    GrammarModel ma = parse_fixture_grammar("montiarc/MontiArc.mcg");
    CHECK(validate_grammar(ma, {}).empty());
    GrammarModel clarc = parse_fixture_grammar("clarc/ClArc.mcg");
    CHECK(validate_grammar(clarc, {&ma}).empty());
}

TEST_CASE("validate: extends/implements targets must exist with compatible flavor") {
    GrammarModel g = parse_ok(
        "grammar t.T {\n"
        "  interface I ;\n"
        "  A extends I = \"a\" ;\n"       // extends an interface
        "  B implements C = \"b\" ;\n"    // implements a normal production
        "  C = \"c\" ;\n"
        "  D extends Missing = \"d\" ;\n"
        "}\n");
    std::vector<Finding> fs = validate_grammar(g, {});
    CHECK(has_code(fs, "BadExtendsTarget"));
    CHECK(has_code(fs, "BadImplementsTarget"));
    int extends_errors = 0;
    for (const auto& f : fs)
        if (f.code == "BadExtendsTarget") ++extends_errors;
    CHECK(extends_errors == 2);
}

TEST_CASE("validate: left recursion is rejected, including through nullable prefixes") {
    GrammarModel direct = parse_ok("grammar t.T { A = A \"x\" | \"y\" ; }");
    CHECK(has_code(validate_grammar(direct, {}), "LeftRecursion"));

    GrammarModel indirect = parse_ok("grammar t.T { A = B \"x\" ; B = A \"y\" | \"z\" ; }");
    CHECK(has_code(validate_grammar(indirect, {}), "LeftRecursion"));

    GrammarModel nullable_prefix =
        parse_ok("grammar t.T { start A = M A \"x\" | \"y\" ; M = \"m\"? ; }");
    CHECK(has_code(validate_grammar(nullable_prefix, {}), "LeftRecursion"));

    // Right recursion and unreachable cycles are fine.
    GrammarModel right = parse_ok("grammar t.T { A = \"x\" A | \"y\" ; }");
    CHECK_FALSE(has_code(validate_grammar(right, {}), "LeftRecursion"));
    GrammarModel unreachable =
        parse_ok("grammar t.T { start S = \"s\" ; A = A \"x\" | \"y\" ; }");
    CHECK_FALSE(has_code(validate_grammar(unreachable, {}), "LeftRecursion"));
}

TEST_CASE("validate: deterministic and order-stable") {
    GrammarModel g = parse_ok(
        "grammar t.T { A = Foo ; abstract X = \"x\" ; B = Bar ; }");
    std::vector<Finding> a = validate_grammar(g, {});
    std::vector<Finding> b = validate_grammar(g, {});
    CHECK(a == b);
    REQUIRE(a.size() >= 2);
    // sorted by position
    for (std::size_t i = 1; i < a.size(); ++i)
        CHECK(a[i - 1].pos.line <= a[i].pos.line);
}

TEST_CASE("round-trip: fixture grammars survive parse -> print -> parse") {
    for (const char* rel : {"cd/CD.mcg", "hql/HQL.mcg", "expr/Expr.mcg", "montiarc/MontiArc.mcg",
                            "clarc/ClArc.mcg"}) {
        GrammarModel g = parse_fixture_grammar(rel);
        std::string printed = print_grammar(g);
        Result<GrammarModel> again = parse_grammar(printed, "printed.mcg");
        REQUIRE_MESSAGE(again.ok(), rel << ":\n" << printed);
        CHECK_MESSAGE(structurally_equal(g, *again.value), rel);
    }
}

TEST_CASE("round-trip: printer handles nesting, labels, and epsilon alternatives") {
    GrammarModel g = parse_ok(
        "grammar t.Gnarly {\n"
        "  token W = \"[a-z]+\" ;\n"
        "  start S = (A | ) (\"lit\" B:W)? (A (\",\" A)*)? ;\n"
        "  A = \"a\" (\"deep\" (\"deeper\" | W) )* ;\n"
        "}\n");
    std::string printed = print_grammar(g);
    Result<GrammarModel> again = parse_grammar(printed, "printed.mcg");
    REQUIRE_MESSAGE(again.ok(), printed);
    CHECK(structurally_equal(g, *again.value));

    std::string printed2 = print_grammar(*again.value);
    CHECK(printed == printed2);
}

TEST_CASE("repository: loads grammars by package path and caches") {
    GrammarRepository repo = fixture_repo();
    Result<GrammarModelPtr> ma = repo.load(grammar_name_from("montiarc.MontiArc"));
    REQUIRE(ma.ok());
    CHECK((*ma.value)->name.qualified() == "montiarc.MontiArc");

    Result<GrammarModelPtr> missing = repo.load(grammar_name_from("no.Such"));
    CHECK_FALSE(missing.ok());
}

TEST_CASE("start directive may name an inherited production") {
    GrammarModel clarc = parse_fixture_grammar("clarc/ClArc.mcg");
    CHECK(clarc.start_production == "Component");
    CHECK(clarc.find_production("Component") == nullptr);
}
