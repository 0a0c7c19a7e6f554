#include <doctest.h>

#include "testutil.hpp"

using namespace lw;
using namespace lwtest;

namespace {

GrammarModel gm(const std::string& text) {
    Result<GrammarModel> r = parse_grammar(text, "test.mcg");
    REQUIRE_MESSAGE(r.ok(), (r.findings.empty() ? "" : render_finding(r.findings[0])));
    return std::move(*r.value);
}

BoundLanguage bind_single(GrammarRepository& repo, const GrammarModel& g) {
    Result<ComposedGrammar> composed = flatten_inheritance(g, repo.loader());
    REQUIRE_MESSAGE(composed.ok(),
                    (composed.findings.empty() ? "" : render_finding(composed.findings[0])));
    BoundLanguage lang;
    lang.host = std::make_shared<const ComposedGrammar>(std::move(*composed.value));
    lang.grammars.push_back(lang.host);
    return lang;
}

AstNodePtr parse_ok(const BoundLanguage& lang, const std::string& text,
                    const std::string& start = "") {
    ParseOptions opts;
    opts.start_production = start;
    Result<AstNodePtr> r = parse_model(lang, text, "test-model", opts);
    REQUIRE_MESSAGE(r.ok(), text << "\n"
                                 << (r.findings.empty() ? "" : render_finding(r.findings[0])));
    return *r.value;
}

const AstNode* find_node(const AstNode& root, const std::string& production) {
    const AstNode* hit = nullptr;
    walk(root, [&](const AstNode& n) {
        if (!hit && n.production_name == production) hit = &n;
    });
    return hit;
}

} // namespace

TEST_CASE("parse: port text yields the expected attribute row") {
    Registries registries;
    ModelingLanguageDef montiarc = load_fixture_member("montiarc.lcfg", registries);
    AstNodePtr node = parse_ok(montiarc.bound, "port in Integer wattage;", "ArcPort");
    CHECK(node->production_name == "ArcPort");
    CHECK(node->origin_grammar.qualified() == "montiarc.MontiArc");
    REQUIRE(node->attributes.size() == 3);
    CHECK(node->attributes[0].label == "direction");
    CHECK(node->attributes[0].value.token.text == "in");
    CHECK(node->attributes[1].label == "Type");
    CHECK(node->attributes[1].value.token.text == "Integer");
    CHECK(node->attributes[2].label == "Name");
    CHECK(node->attributes[2].value.token.text == "wattage");
}

TEST_CASE("parse: replicating port dispatches to the extension, not the parent") {
    Registries registries;
    ModelingLanguageDef clarc = load_fixture_member("clarc.lcfg", registries);
    AstNodePtr node = parse_ok(clarc.bound, "port in String[*] signals;", "ArcPort");
    CHECK(node->production_name == "ClArcPort");
    CHECK(node->origin_grammar.qualified() == "clarc.ClArc");
    CHECK(node->token_attr("Name")->text == "signals");

    // Plain ports under the child language still come out as parent nodes.
    AstNodePtr plain = parse_ok(clarc.bound, "port in Integer wattage;", "ArcPort");
    CHECK(plain->production_name == "ArcPort");
    CHECK(plain->origin_grammar.qualified() == "montiarc.MontiArc");
}

TEST_CASE("parse: parent grammar rejects the extension syntax at the '['") {
    Registries registries;
    ModelingLanguageDef montiarc = load_fixture_member("montiarc.lcfg", registries);
    ParseOptions opts;
    opts.start_production = "ArcPort";
    Result<AstNodePtr> r = parse_model(montiarc.bound, "port in String[*] signals;", "m", opts);
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].code == "SyntaxError");
    CHECK(r.findings[0].pos.line == 1);
    CHECK(r.findings[0].pos.col == 15); // the '['
    CHECK(r.findings[0].message.find("ID") != std::string::npos);
}

// Hand-derived expected tree for the embedded query in the fixture model.
TEST_CASE("parse: embedded query hangs at the external production's position") {
    Registries registries;
    ModelingLanguageDef cdhql = load_fixture_member("cdhql.lcfg", registries);
    std::string model = read_file_or_throw(fixtures_dir() + "/models/SensorData.cd");
    Result<AstNodePtr> r = parse_model(cdhql.bound, model, "SensorData.cd");
    REQUIRE_MESSAGE(r.ok(), (r.findings.empty() ? "" : render_finding(r.findings[0])));

    const AstNode* method = find_node(**r.value, "CDMethod");
    REQUIRE(method != nullptr);
    CHECK(method->token_attr("Name")->text == "getValues");
    const AstAttribute* body = method->attr("Body");
    REQUIRE(body != nullptr);
    REQUIRE(body->value.kind == AstValue::Kind::Child);
    const AstNode& block = *body->value.child;
    CHECK(block.production_name == "HQLBlock");
    CHECK(block.origin_grammar.qualified() == "hql.HQL");

    REQUIRE(block.attributes.size() == 1);
    REQUIRE(block.attributes[0].value.kind == AstValue::Kind::ChildList);
    REQUIRE(block.attributes[0].value.children.size() == 1);
    const AstNode& select = *block.attributes[0].value.children[0];
    CHECK(select.production_name == "HQLSelect");
    CHECK(select.token_attr("Selected")->text == "v");
    CHECK(select.token_attr("Entity")->text == "SensorValue");
    CHECK(select.token_attr("Var")->text == "v");
    const AstNode* cond = find_node(select, "Cond");
    REQUIRE(cond != nullptr);
    CHECK(cond->token_attr("Lhs")->text == "v.key");
    CHECK(cond->token_attr("Param")->text == "?1");
}

TEST_CASE("parse: empty input against a starred start yields one empty child list") {
    GrammarRepository repo({});
    BoundLanguage lang = bind_single(repo, gm("grammar t.T { start Model = Def* ; Def = \"d\" ; }"));
    AstNodePtr root = parse_ok(lang, "");
    CHECK(root->production_name == "Model");
    REQUIRE(root->attributes.size() == 1);
    CHECK(root->attributes[0].label == "Def");
    CHECK(root->attributes[0].value.kind == AstValue::Kind::ChildList);
    CHECK(root->attributes[0].value.children.empty());
}

TEST_CASE("parse: trailing input is reported as not consumed") {
    Registries registries;
    ModelingLanguageDef montiarc = load_fixture_member("montiarc.lcfg", registries);
    ParseOptions opts;
    opts.start_production = "ArcPort";
    Result<AstNodePtr> r =
        parse_model(montiarc.bound, "port in Integer a; port out Integer b;", "m", opts);
    REQUIRE_FALSE(r.ok());
    CHECK(r.findings[0].code == "InputNotConsumed");
    CHECK(r.findings[0].pos.col == 20);
}

TEST_CASE("parse: ordered choice commits to the first success") {
    GrammarRepository repo({});
    BoundLanguage lang =
        bind_single(repo, gm("grammar t.T { start A = \"x\" | \"x\" \"y\" ; }"));
    CHECK(parse_ok(lang, "x") != nullptr);
    Result<AstNodePtr> r = parse_model(lang, "x y", "m");
    REQUIRE_FALSE(r.ok());
    CHECK(r.findings[0].code == "InputNotConsumed");
}

TEST_CASE("parse: determinism over repeated runs") {
    Registries registries;
    ModelingLanguageDef cdhql = load_fixture_member("cdhql.lcfg", registries);
    std::string model = read_file_or_throw(fixtures_dir() + "/models/SensorData.cd");
    AstNodePtr a = parse_ok(cdhql.bound, model);
    AstNodePtr b = parse_ok(cdhql.bound, model);
    CHECK(ast_equal(*a, *b));
}

TEST_CASE("parse: comments and whitespace are skipped uniformly") {
    GrammarRepository repo({});
    BoundLanguage lang = bind_single(repo, gm("grammar t.T { start S = \"a\" Name:ID \"b\" ; }"));
    AstNodePtr n = parse_ok(lang, "a /* block */ xyz // line\n b");
    CHECK(n->token_attr("Name")->text == "xyz");
}

TEST_CASE("parse: token sets switch at embedding boundaries") {
    GrammarRepository repo({});
    // Host and guest both define token W with different patterns.
    repo.add(gm("grammar g.G { start P = V:W ; token W = \"[0-9]+\" ; }"));
    GrammarModel host = gm(
        "grammar h.H { token W = \"[a-z]+\" ; start S = \"s\" V:W Ext ; external Ext ; }");
    Result<ComposedGrammar> composed = flatten_inheritance(host, repo.loader());
    REQUIRE(composed.ok());
    LanguageConfiguration cfg;
    cfg.language_name = "hx";
    cfg.file_extension = ".hx";
    cfg.host_grammar = grammar_name_from("h.H");
    cfg.bindings = {{"Ext", grammar_name_from("g.G"), "P", {}}};
    auto host_ptr = std::make_shared<const ComposedGrammar>(std::move(*composed.value));
    Result<BoundLanguage> lang = bind_embeddings(host_ptr, cfg, repo.loader());
    REQUIRE(lang.ok());

    // Host W is lowercase letters; guest W is digits.
    AstNodePtr good = parse_ok(*lang.value, "s abc 123");
    const AstNode* guest = find_node(*good, "P");
    REQUIRE(guest != nullptr);
    CHECK(guest->token_attr("V")->text == "123");
    CHECK_FALSE(parse_model(*lang.value, "s abc xyz", "m").ok());
    CHECK_FALSE(parse_model(*lang.value, "s 123 123", "m").ok());
}

TEST_CASE("pretty: canonical port text round-trips") {
    Registries registries;
    ModelingLanguageDef montiarc = load_fixture_member("montiarc.lcfg", registries);
    AstNodePtr node = parse_ok(montiarc.bound, "port   in\nInteger   wattage ;", "ArcPort");
    Result<std::string> printed = pretty_print(*node, montiarc.bound);
    REQUIRE(printed.ok());
    CHECK(*printed.value == "port in Integer wattage ;\n");
}

TEST_CASE("pretty: zero-repetition lists print terminals only") {
    GrammarRepository repo({});
    BoundLanguage lang =
        bind_single(repo, gm("grammar t.T { start Model = \"m\" Def* \"end\" ; Def = \"d\" ; }"));
    AstNodePtr root = parse_ok(lang, "m end");
    Result<std::string> printed = pretty_print(*root, lang);
    REQUIRE(printed.ok());
    CHECK(*printed.value == "m end\n");
}

TEST_CASE("pretty: fixture models re-parse to isomorphic trees") {
    Registries registries;
    ModelingLanguageDef cdhql = load_fixture_member("cdhql.lcfg", registries);
    ModelingLanguageDef clarc = load_fixture_member("clarc.lcfg", registries);
    struct Case {
        const ModelingLanguageDef* member;
        std::string path;
    };
    for (const Case& c : {Case{&cdhql, "/models/SensorData.cd"},
                          Case{&clarc, "/models/SensorDataSubmissionHandler.arc"}}) {
        std::string text = read_file_or_throw(fixtures_dir() + c.path);
        AstNodePtr first = parse_ok(c.member->bound, text);
        Result<std::string> printed = pretty_print(*first, c.member->bound);
        REQUIRE_MESSAGE(printed.ok(), c.path);
        Result<AstNodePtr> second = parse_model(c.member->bound, *printed.value, "printed");
        REQUIRE_MESSAGE(second.ok(), c.path << "\n" << *printed.value);
        CHECK_MESSAGE(ast_equal_ignoring_spans(*first, **second.value), c.path);
    }
}

TEST_CASE("pretty: node inconsistent with its production is an error") {
    Registries registries;
    ModelingLanguageDef montiarc = load_fixture_member("montiarc.lcfg", registries);
    AstNode bogus;
    bogus.production_name = "ArcPort";
    bogus.origin_grammar = grammar_name_from("montiarc.MontiArc");
    bogus.attributes.push_back(
        {"direction", AstValue{AstValue::Kind::Token, {"in", {}}, nullptr, {}}});
    // Type and Name attributes missing.
    Result<std::string> printed = pretty_print(bogus, montiarc.bound);
    REQUIRE_FALSE(printed.ok());
    CHECK(printed.findings[0].code == "InconsistentNode");
}

TEST_CASE("walk: port node count matches an independent scan of the fixture text") {
    Registries registries;
    ModelingLanguageDef clarc = load_fixture_member("clarc.lcfg", registries);
    std::string path = fixtures_dir() + "/models/SensorDataSubmissionHandler.arc";
    std::string text = read_file_or_throw(path);

    // Oracle: plain ports are lines introduced by the port keyword without a
    // replication marker.
    int expected = 0;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        auto pos = line.find_first_not_of(" \t");
        if (pos == std::string::npos) continue;
        if (line.compare(pos, 5, "port ") == 0 && line.find("[*]") == std::string::npos)
            ++expected;
    }
    REQUIRE(expected == 6); // pinned

    AstNodePtr root = parse_ok(clarc.bound, text);
    int plain = 0, replicating = 0;
    walk(*root, [&](const AstNode& n) {
        if (n.production_name == "ArcPort") ++plain;
        if (n.production_name == "ClArcPort") ++replicating;
    });
    CHECK(plain == expected);
    CHECK(replicating == 1);
}

TEST_CASE("walk: single-token production visits exactly one node") {
    GrammarRepository repo({});
    BoundLanguage lang = bind_single(repo, gm("grammar t.T { start S = Name:ID ; }"));
    AstNodePtr root = parse_ok(lang, "only");
    int visits = 0;
    walk(*root, [&](const AstNode&) { ++visits; });
    CHECK(visits == 1);
}

TEST_CASE("walk: pre-order delivers host nodes before their embedded subtrees") {
    Registries registries;
    ModelingLanguageDef cdhql = load_fixture_member("cdhql.lcfg", registries);
    std::string model = read_file_or_throw(fixtures_dir() + "/models/SensorData.cd");
    AstNodePtr root = parse_ok(cdhql.bound, model);

    std::vector<std::string> origins;
    walk(*root, [&](const AstNode& n) { origins.push_back(n.origin_grammar.qualified()); });
    REQUIRE(origins.front() == "cd.CD");
    bool seen_guest = false;
    for (std::size_t i = 0; i < origins.size(); ++i) {
        if (origins[i] == "hql.HQL" || origins[i] == "expr.Expr") {
            seen_guest = true;
            REQUIRE(i > 0);
        }
    }
    CHECK(seen_guest);
}

TEST_CASE("invariant: every node's production is defined by its origin grammar") {
    Registries registries;
    ModelingLanguageDef cdhql = load_fixture_member("cdhql.lcfg", registries);
    std::string model = read_file_or_throw(fixtures_dir() + "/models/SensorData.cd");
    AstNodePtr root = parse_ok(cdhql.bound, model);
    walk(*root, [&](const AstNode& n) {
        const std::string key = n.origin_grammar.qualified() + "." + n.production_name;
        bool defined = false;
        for (const auto& g : cdhql.bound.grammars)
            if (g->production_table.count(key)) defined = true;
        CHECK_MESSAGE(defined, key);
    });
}

TEST_CASE("invariant: parent-language text parses to parent-origin nodes only") {
    Registries registries;
    ModelingLanguageDef clarc = load_fixture_member("clarc.lcfg", registries);
    std::string text =
        "component Plain { port in Integer load ; Worker w ; load -> w.input ; }";
    AstNodePtr root = parse_ok(clarc.bound, text);
    walk(*root, [&](const AstNode& n) {
        CHECK(n.origin_grammar.qualified() == "montiarc.MontiArc");
    });
}

TEST_CASE("parse: spans cover exactly the consumed input") {
    GrammarRepository repo({});
    BoundLanguage lang = bind_single(repo, gm("grammar t.T { start S = \"a\" Name:ID ; }"));
    AstNodePtr n = parse_ok(lang, "  a hello  ");
    CHECK(n->span_start.col == 3);
    CHECK(n->span_end.col == 10); // one past 'hello'
}
