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

std::vector<std::string> dispatch_names(const ComposedGrammar& g, const std::string& name) {
    std::vector<std::string> out;
    for (const ProdEntry* e : g.dispatch_for(name)) out.push_back(e->qualified_key);
    return out;
}

bool has_code(const std::vector<Finding>& fs, const std::string& code) {
    return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) { return f.code == code; });
}

} // namespace

TEST_CASE("flatten: extending production joins the parent's dispatch list, derived first") {
    GrammarRepository repo = fixture_repo();
    Result<GrammarModelPtr> clarc = repo.load(grammar_name_from("clarc.ClArc"));
    REQUIRE(clarc.ok());
    Result<ComposedGrammar> composed = flatten_inheritance(**clarc.value, repo.loader());
    REQUIRE(composed.ok());

    CHECK(dispatch_names(*composed.value, "ArcPort") ==
          std::vector<std::string>{"clarc.ClArc.ClArcPort", "montiarc.MontiArc.ArcPort"});
    CHECK(dispatch_names(*composed.value, "Subcomponent") ==
          std::vector<std::string>{"clarc.ClArc.ReplicatingComponent",
                                   "montiarc.MontiArc.Subcomponent"});
    // Interface dispatch: all clarc-declared alternatives before montiarc's.
    CHECK(dispatch_names(*composed.value, "ArcElement") ==
          std::vector<std::string>{"clarc.ClArc.ClArcPort", "clarc.ClArc.ServicePort",
                                   "clarc.ClArc.ReplicatingComponent",
                                   "montiarc.MontiArc.ArcPort", "montiarc.MontiArc.Subcomponent",
                                   "montiarc.MontiArc.Connector"});
    CHECK(composed->start_production == "Component");
    // Inherited productions keep their origin.
    const ProdEntry* port = composed->find("ArcPort");
    REQUIRE(port != nullptr);
    CHECK(port->origin.qualified() == "montiarc.MontiArc");
}

TEST_CASE("flatten: grammar without extends flattens to itself") {
    GrammarRepository repo = fixture_repo();
    GrammarModel ma = parse_fixture_grammar("montiarc/MontiArc.mcg");
    Result<ComposedGrammar> composed = flatten_inheritance(ma, repo.loader());
    REQUIRE(composed.ok());
    CHECK(composed->production_table.size() == ma.productions.size());
    for (const auto& p : ma.productions) {
        const ProdEntry* e = composed->find(p.name);
        REQUIRE(e != nullptr);
        CHECK(e->origin.qualified() == "montiarc.MontiArc");
    }
    CHECK(dispatch_names(*composed.value, "Connector") ==
          std::vector<std::string>{"montiarc.MontiArc.Connector"});
    CHECK(dispatch_names(*composed.value, "ArcElement").size() == 3);
}

// Oracle: flatten a three-grammar chain by hand -- copy the root ancestor's
// productions, then apply each more derived grammar as name-keyed overrides
// -- and compare with flatten_inheritance.
TEST_CASE("flatten: chain override keeps the most derived rule only") {
    GrammarRepository repo({});
    repo.add(gm("grammar t.A { P = \"a\" ; Q = \"qa\" ; }"));
    repo.add(gm("grammar t.B extends t.A { P = \"b\" ; R = \"r\" ; }"));
    GrammarModel c = gm("grammar t.C extends t.B { S = \"s\" ; }");

    std::map<std::string, std::string> expected; // name -> owning grammar
    expected["P"] = "t.A";
    expected["Q"] = "t.A";
    expected["P"] = "t.B"; // override step
    expected["R"] = "t.B";
    expected["S"] = "t.C";

    Result<ComposedGrammar> composed = flatten_inheritance(c, repo.loader());
    REQUIRE(composed.ok());
    CHECK(composed->production_table.size() == expected.size());
    for (const auto& [name, owner] : expected) {
        const ProdEntry* e = composed->find(name);
        REQUIRE_MESSAGE(e != nullptr, name);
        CHECK_MESSAGE(e->origin.qualified() == owner, name);
        CHECK(e->qualified_key == owner + "." + name);
    }
    // The overridden rule is gone entirely.
    CHECK(composed->production_table.find("t.A.P") == composed->production_table.end());
    const ProdEntry* p = composed->find("P");
    CHECK(p->rule.rhs->text == "b");
}

TEST_CASE("flatten: inheritance errors") {
    GrammarRepository repo({});
    repo.add(gm("grammar t.X extends t.Y { A = \"a\" ; }"));
    repo.add(gm("grammar t.Y extends t.X { B = \"b\" ; }"));
    GrammarModel z = gm("grammar t.Z extends t.X { }");
    Result<ComposedGrammar> cyclic = flatten_inheritance(z, repo.loader());
    CHECK_FALSE(cyclic.ok());
    CHECK(has_code(cyclic.findings, "CyclicInheritance"));

    GrammarModel orphan = gm("grammar t.O extends t.Missing { A = \"a\" ; }");
    Result<ComposedGrammar> missing = flatten_inheritance(orphan, repo.loader());
    CHECK_FALSE(missing.ok());
    CHECK(has_code(missing.findings, "MissingParentGrammar"));

    GrammarRepository repo2({});
    repo2.add(gm("grammar t.P { token W = \"[a-z]+\" ; A = W ; }"));
    GrammarModel bad = gm("grammar t.Q extends t.P { W = \"w\" ; }");
    Result<ComposedGrammar> incompatible = flatten_inheritance(bad, repo2.loader());
    CHECK_FALSE(incompatible.ok());
    CHECK(has_code(incompatible.findings, "IncompatibleOverride"));
}

TEST_CASE("language configuration: fields and bindings parse") {
    std::string text = read_file_or_throw(fixtures_dir() + "/cdhql.lcfg");
    Result<LanguageConfiguration> cfg = parse_language_configuration(text, "cdhql.lcfg");
    REQUIRE(cfg.ok());
    CHECK(cfg->language_name == "cdhql");
    CHECK(cfg->file_extension == ".cd");
    CHECK(cfg->host_grammar.qualified() == "cd.CD");
    REQUIRE(cfg->bindings.size() == 2);
    CHECK(cfg->bindings[0].guest_grammar.qualified() == "hql.HQL");
    CHECK(cfg->bindings[0].guest_production == "HQLBlock");
    CHECK(cfg->bindings[0].host_external == "Body");
    CHECK(cfg->bindings[1].guest_grammar.qualified() == "expr.Expr");

    Result<LanguageConfiguration> bad =
        parse_language_configuration("language x { grammar a.B ; }", "x.lcfg");
    CHECK_FALSE(bad.ok());
}

TEST_CASE("bind: delegates recorded in binding order; unbound externals tracked") {
    Registries registries;
    ModelingLanguageDef member = load_fixture_member("cdhql.lcfg", registries);
    const BoundLanguage& lang = member.bound;
    REQUIRE(lang.external_delegates.count("Body"));
    const auto& delegates = lang.external_delegates.at("Body");
    REQUIRE(delegates.size() == 2);
    CHECK(delegates[0].grammar->root_name.qualified() == "hql.HQL");
    CHECK(delegates[0].production == "HQLBlock");
    CHECK(delegates[1].grammar->root_name.qualified() == "expr.Expr");
    CHECK(delegates[1].production == "PlaceholderExpr");
    CHECK(lang.unbound_externals.empty());
}

TEST_CASE("bind: configuration with zero bindings leaves the host untouched") {
    Registries registries;
    ModelingLanguageDef member = load_fixture_member("clarc.lcfg", registries);
    CHECK(member.bound.external_delegates.empty());
    CHECK(member.bound.unbound_externals.empty());
    CHECK(member.bound.grammars.size() == 1);
}

TEST_CASE("bind: unbound externals are fine until reached at parse time") {
    GrammarRepository repo = fixture_repo();
    Result<GrammarModelPtr> cd = repo.load(grammar_name_from("cd.CD"));
    REQUIRE(cd.ok());
    Result<ComposedGrammar> composed = flatten_inheritance(**cd.value, repo.loader());
    REQUIRE(composed.ok());
    CHECK(composed->unbound_externals == std::set<std::string>{"Body"});

    LanguageConfiguration cfg;
    cfg.language_name = "cdonly";
    cfg.file_extension = ".cd";
    cfg.host_grammar = grammar_name_from("cd.CD");
    auto host = std::make_shared<const ComposedGrammar>(std::move(*composed.value));
    Result<BoundLanguage> bound = bind_embeddings(host, cfg, repo.loader());
    REQUIRE(bound.ok());
    CHECK(bound->unbound_externals == std::set<std::string>{"Body"});

    std::string model = read_file_or_throw(fixtures_dir() + "/models/SensorData.cd");
    Result<AstNodePtr> parsed = parse_model(*bound.value, model, "SensorData.cd");
    REQUIRE_FALSE(parsed.ok());
    REQUIRE(parsed.findings.size() == 1);
    CHECK(parsed.findings[0].code == "UnboundExternalReached");
    CHECK(parsed.findings[0].message.find("Body") != std::string::npos);
}

TEST_CASE("bind: errors for unknown externals and guest productions") {
    GrammarRepository repo = fixture_repo();
    Result<GrammarModelPtr> cd = repo.load(grammar_name_from("cd.CD"));
    Result<ComposedGrammar> composed = flatten_inheritance(**cd.value, repo.loader());
    auto host = std::make_shared<const ComposedGrammar>(std::move(*composed.value));

    LanguageConfiguration cfg;
    cfg.language_name = "x";
    cfg.file_extension = ".x";
    cfg.host_grammar = grammar_name_from("cd.CD");
    cfg.bindings.push_back({"CDClass", grammar_name_from("hql.HQL"), "HQLBlock", {}});
    Result<BoundLanguage> bad1 = bind_embeddings(host, cfg, repo.loader());
    CHECK_FALSE(bad1.ok());
    CHECK(has_code(bad1.findings, "UnknownExternal"));

    cfg.bindings = {{"Body", grammar_name_from("hql.HQL"), "NoSuchProduction", {}}};
    Result<BoundLanguage> bad2 = bind_embeddings(host, cfg, repo.loader());
    CHECK_FALSE(bad2.ok());
    CHECK(has_code(bad2.findings, "UnknownGuestProduction"));
}

// Ordered-choice trace: with [HQLBlock, PlaceholderExpr] on Body, an input
// only the placeholder matches must fall through to it, and an input both
// match must go to the query language.
TEST_CASE("bind: delegate order is the alternative order at parse time") {
    Registries registries;
    ModelingLanguageDef member = load_fixture_member("cdhql.lcfg", registries);

    ParseOptions opts;
    opts.start_production = "Body";
    Result<AstNodePtr> placeholder_only = parse_model(member.bound, "{ 64 }", "m.cd", opts);
    REQUIRE_MESSAGE(placeholder_only.ok(),
                    (placeholder_only.findings.empty()
                         ? ""
                         : render_finding(placeholder_only.findings[0])));
    CHECK((*placeholder_only.value)->production_name == "PlaceholderExpr");
    CHECK((*placeholder_only.value)->origin_grammar.qualified() == "expr.Expr");

    Result<AstNodePtr> both_match = parse_model(member.bound, "{ }", "m.cd", opts);
    REQUIRE(both_match.ok());
    CHECK((*both_match.value)->production_name == "HQLBlock");
    CHECK((*both_match.value)->origin_grammar.qualified() == "hql.HQL");
}

TEST_CASE("property: child language accepts parent sentences (substitutability)") {
    GrammarRepository repo = fixture_repo();
    Result<GrammarModelPtr> ma = repo.load(grammar_name_from("montiarc.MontiArc"));
    Result<ComposedGrammar> ma_composed = flatten_inheritance(**ma.value, repo.loader());
    REQUIRE(ma_composed.ok());

    Registries registries;
    ModelingLanguageDef clarc = load_fixture_member("clarc.lcfg", registries);

    BoundLanguage parent_lang;
    parent_lang.host = std::make_shared<const ComposedGrammar>(std::move(*ma_composed.value));
    parent_lang.grammars.push_back(parent_lang.host);

    SentenceGenerator gen(*parent_lang.host, 20250711);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        auto sentence = gen.generate("Component", 6);
        REQUIRE(sentence.has_value());
        Result<AstNodePtr> under_parent = parse_model(parent_lang, *sentence, "gen.marc");
        REQUIRE_MESSAGE(under_parent.ok(), *sentence);
        Result<AstNodePtr> under_child = parse_model(clarc.bound, *sentence, "gen.arc");
        REQUIRE_MESSAGE(under_child.ok(), *sentence);
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("property: substitutability restricted to non-overridden sentences") {
    GrammarRepository repo({});
    repo.add(gm("grammar t.P { start S = \"s\" Q? ; Q = \"q\" ; }"));
    Result<GrammarModelPtr> parent = repo.load(grammar_name_from("t.P"));
    GrammarModel child_model = gm("grammar t.C extends t.P { Q = \"z\" ; }");

    Result<ComposedGrammar> parent_c = flatten_inheritance(**parent.value, repo.loader());
    Result<ComposedGrammar> child_c = flatten_inheritance(child_model, repo.loader());
    REQUIRE(parent_c.ok());
    REQUIRE(child_c.ok());
    BoundLanguage pl, cl;
    pl.host = std::make_shared<const ComposedGrammar>(std::move(*parent_c.value));
    pl.grammars.push_back(pl.host);
    cl.host = std::make_shared<const ComposedGrammar>(std::move(*child_c.value));
    cl.grammars.push_back(cl.host);

    // Sentence avoiding the overridden production: accepted by both.
    CHECK(parse_model(pl, "s", "a").ok());
    CHECK(parse_model(cl, "s", "a").ok());
    // Sentence through the overridden production: only the parent accepts.
    CHECK(parse_model(pl, "s q", "a").ok());
    CHECK_FALSE(parse_model(cl, "s q", "a").ok());
    CHECK(parse_model(cl, "s z", "a").ok());
}

TEST_CASE("property: adding a binding never removes accepted sentences") {
    GrammarRepository repo = fixture_repo();
    Result<GrammarModelPtr> cd = repo.load(grammar_name_from("cd.CD"));
    Result<ComposedGrammar> composed = flatten_inheritance(**cd.value, repo.loader());
    auto host = std::make_shared<const ComposedGrammar>(std::move(*composed.value));

    LanguageConfiguration one, two;
    one.language_name = two.language_name = "cdx";
    one.file_extension = two.file_extension = ".cd";
    one.host_grammar = two.host_grammar = grammar_name_from("cd.CD");
    one.bindings = {{"Body", grammar_name_from("hql.HQL"), "HQLBlock", {}}};
    two.bindings = {{"Body", grammar_name_from("hql.HQL"), "HQLBlock", {}},
                    {"Body", grammar_name_from("expr.Expr"), "PlaceholderExpr", {}}};
    Result<BoundLanguage> lang_one = bind_embeddings(host, one, repo.loader());
    Result<BoundLanguage> lang_two = bind_embeddings(host, two, repo.loader());
    REQUIRE(lang_one.ok());
    REQUIRE(lang_two.ok());

    SentenceGenerator gen(*host, 424242);
    int accepted = 0;
    for (int i = 0; i < 40; ++i) {
        auto sentence = gen.generate("CDDefinition", 6);
        REQUIRE(sentence.has_value());
        if (parse_model(*lang_one.value, *sentence, "g.cd").ok()) {
            ++accepted;
            CHECK_MESSAGE(parse_model(*lang_two.value, *sentence, "g.cd").ok(), *sentence);
        }
    }
    CHECK(accepted > 0);

    // Query bodies parse under both; placeholder bodies only under the pair.
    std::string with_query =
        "classdiagram D { class C { Integer f ( ) { select v from C v } } }";
    CHECK(parse_model(*lang_one.value, with_query, "q.cd").ok());
    CHECK(parse_model(*lang_two.value, with_query, "q.cd").ok());
    std::string with_placeholder = "classdiagram D { class C { Integer f ( ) { 1 } } }";
    CHECK_FALSE(parse_model(*lang_one.value, with_placeholder, "p.cd").ok());
    CHECK(parse_model(*lang_two.value, with_placeholder, "p.cd").ok());
}

TEST_CASE("flatten: composed start production resolution") {
    GrammarRepository repo({});
    GrammarModel empty = gm("grammar x.Empty { }");
    Result<ComposedGrammar> composed = flatten_inheritance(empty, repo.loader());
    REQUIRE(composed.ok());
    CHECK(composed->start_production.empty());

    BoundLanguage lang;
    lang.host = std::make_shared<const ComposedGrammar>(std::move(*composed.value));
    lang.grammars.push_back(lang.host);
    Result<AstNodePtr> r = parse_model(lang, "", "empty.x");
    CHECK_FALSE(r.ok());
    CHECK(r.findings[0].code == "NoStartProduction");
}
