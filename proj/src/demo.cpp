#include <algorithm>
#include <filesystem>
#include <set>

#include "lw/demo.hpp"

namespace fs = std::filesystem;

namespace lw::demo {

namespace {

const Kind kCdType{"cd", "Type"};
const Kind kCdMethod{"cd", "Method"};
const Kind kCdAttribute{"cd", "Attribute"};
const Kind kArcComponent{"arc", "Component"};
const Kind kArcPort{"arc", "Port"};
const Kind kArcType{"arc", "Type"};
const Kind kHqlType{"hql", "Type"};
const Kind kClArcComponent{"clarc", "Component"};
const Kind kClArcPort{"clarc", "Port"};
const Kind kClArcService{"clarc", "ServicePort"};

const GrammarName kCdGrammar = grammar_name_from("cd.CD");
const GrammarName kHqlGrammar = grammar_name_from("hql.HQL");
const GrammarName kExprGrammar = grammar_name_from("expr.Expr");
const GrammarName kMontiArcGrammar = grammar_name_from("montiarc.MontiArc");
const GrammarName kClArcGrammar = grammar_name_from("clarc.ClArc");

// Port types that need no class-diagram definition.
const std::set<std::string>& primitive_types() {
    static const std::set<std::string> prims{"Integer", "String", "Boolean",
                                             "Double",  "Float",  "Long"};
    return prims;
}

LanguageComponent cd_component() {
    LanguageComponent c;
    c.language_id = "cd";
    c.grammar = kCdGrammar;
    std::vector<EntryCreationRule> members = {
        {kCdGrammar, "CDAttribute", kCdAttribute, "Name", false, {}},
        {kCdGrammar, "CDMethod", kCdMethod, "Name", false, {}},
    };
    c.entry_rules = {
        {kCdGrammar, "CDClass", kCdType, "Name", true, members},
        {kCdGrammar, "CDInterface", kCdType, "Name", true, members},
    };
    c.exported_kinds = {kCdType, kCdMethod, kCdAttribute};
    c.hooks.node_hooks["cd.CD.CDDefinition"] = model_header_hook();
    return c;
}

LanguageComponent hql_component() {
    LanguageComponent c;
    c.language_id = "hql";
    c.grammar = kHqlGrammar;
    return c;
}

LanguageComponent expr_component() {
    LanguageComponent c;
    c.language_id = "expr";
    c.grammar = kExprGrammar;
    return c;
}

LanguageComponent montiarc_component() {
    LanguageComponent c;
    c.language_id = "arc";
    c.grammar = kMontiArcGrammar;
    c.entry_rules = {
        {kMontiArcGrammar,
         "Component",
         kArcComponent,
         "Name",
         true,
         {
             {kMontiArcGrammar, "ArcPort", kArcPort, "Name", false, {}},
             {kMontiArcGrammar, "Subcomponent", kArcComponent, "Type", false, {}},
         }},
    };
    c.exported_kinds = {kArcComponent, kArcPort};
    c.hooks.node_hooks["montiarc.MontiArc.Component"] = model_header_hook();
    return c;
}

LanguageComponent clarc_component() {
    LanguageComponent c;
    c.language_id = "clarc";
    c.grammar = kClArcGrammar;
    // New entries for the language extension; the family adapts them to the
    // inherited language's kinds.
    c.entry_rules = {
        {kClArcGrammar, "ClArcPort", kClArcPort, "Name", false, {}},
        {kClArcGrammar, "ServicePort", kClArcService, "Name", false, {}},
        {kClArcGrammar, "ReplicatingComponent", kClArcComponent, "Type", false, {}},
    };
    c.exported_kinds = {kClArcComponent, kClArcPort, kClArcService};
    return c;
}

// ---------------------------------------------------------------------------
// Condition predicates
// ---------------------------------------------------------------------------

void walk_namespaces(const NamespaceNode& ns, const std::function<void(const NamespaceNode&)>& fn) {
    fn(ns);
    for (const auto& c : ns.children) walk_namespaces(*c, fn);
}

// CC-CD-001: type names unique per class diagram.
std::vector<Finding> cd_unique_types(const ConditionContext& ctx) {
    std::vector<Finding> findings;
    if (!ctx.model || !ctx.model->ns_root) return findings;
    walk_namespaces(*ctx.model->ns_root, [&](const NamespaceNode& ns) {
        for (const auto& [key, entries] : ns.table) {
            if (key.kind != kCdType || entries.size() < 2) continue;
            for (std::size_t i = 1; i < entries.size(); ++i)
                findings.push_back(error_at(
                    "", "type name '" + key.name + "' is defined more than once",
                    entries[i]->origin().pos.value_or(SourcePos{ctx.model->path, 1, 1})));
        }
    });
    return findings;
}

// CC-ARC-001: connector endpoints name declared ports or subcomponents.
std::vector<Finding> arc_connector_endpoints(const ConditionContext& ctx) {
    std::vector<Finding> findings;
    if (!ctx.model || !ctx.model->ast) return findings;
    walk(*ctx.model->ast, [&](const AstNode& node) {
        if (node.production_name != "Component") return;
        std::set<std::string> ports, subs;
        std::vector<const AstNode*> connectors;
        walk(node, [&](const AstNode& n) {
            if (n.production_name == "ArcPort" || n.production_name == "ClArcPort" ||
                n.production_name == "ServicePort") {
                if (const TokenValue* t = n.token_attr("Name")) ports.insert(t->text);
            } else if (n.production_name == "Subcomponent" ||
                       n.production_name == "ReplicatingComponent") {
                if (const TokenValue* t = n.token_attr("Name")) subs.insert(t->text);
            } else if (n.production_name == "Connector") {
                connectors.push_back(&n);
            }
        });
        for (const AstNode* conn : connectors) {
            for (const char* side : {"Src", "Tgt"}) {
                const TokenValue* t = conn->token_attr(side);
                if (!t) continue;
                auto dot = t->text.find('.');
                if (dot == std::string::npos) {
                    if (!ports.count(t->text))
                        findings.push_back(error_at(
                            "", "connector endpoint '" + t->text + "' names no declared port",
                            t->pos));
                } else {
                    std::string sub = t->text.substr(0, dot);
                    if (!subs.count(sub))
                        findings.push_back(error_at(
                            "",
                            "connector endpoint '" + t->text +
                                "' names no declared subcomponent '" + sub + "'",
                            t->pos));
                }
            }
        }
    });
    return findings;
}

// CC-CMP-001: query entities resolve to classes of the surrounding diagram.
std::vector<Finding> hql_entities_resolve(const ConditionContext& ctx) {
    std::vector<Finding> findings;
    if (!ctx.model || !ctx.model->ast || !ctx.model->ns_root || !ctx.adapters) return findings;
    walk(*ctx.model->ast, [&](const AstNode& node) {
        if (node.production_name != "HQLSelect" ||
            node.origin_grammar.qualified() != "hql.HQL")
            return;
        const TokenValue* entity = node.token_attr("Entity");
        if (!entity) return;
        Result<EntryPtr> r =
            resolve(entity->text, kHqlType, *ctx.model->ns_root, nullptr, *ctx.adapters,
                    entity->pos);
        if (!r.ok()) findings.insert(findings.end(), r.findings.begin(), r.findings.end());
    });
    return findings;
}

// CC-FAM-001: port types resolve to class types exported by the family.
std::vector<Finding> port_types_resolve(const ConditionContext& ctx) {
    std::vector<Finding> findings;
    if (!ctx.all_models || !ctx.adapters) return findings;
    for (const ModelArtifact& m : *ctx.all_models) {
        if (!m.ast || !m.ns_root) continue;
        walk(*m.ast, [&](const AstNode& node) {
            if (node.production_name != "ArcPort" && node.production_name != "ClArcPort") return;
            const TokenValue* type = node.token_attr("Type");
            if (!type || primitive_types().count(type->text)) return;
            Result<EntryPtr> r =
                resolve(type->text, kArcType, *m.ns_root, ctx.repo, *ctx.adapters, type->pos);
            if (!r.ok()) findings.insert(findings.end(), r.findings.begin(), r.findings.end());
        });
    }
    return findings;
}

// CC-FAM-002: service ports reference a class-diagram model of the family.
std::vector<Finding> service_models_exist(const ConditionContext& ctx) {
    std::vector<Finding> findings;
    if (!ctx.all_models) return findings;
    auto exports_cd_types = [](const ModelingLanguageDef* member) {
        if (!member) return false;
        auto kinds = member->exported_kinds();
        return std::find(kinds.begin(), kinds.end(), kCdType) != kinds.end();
    };
    for (const ModelArtifact& m : *ctx.all_models) {
        if (!m.ast) continue;
        walk(*m.ast, [&](const AstNode& node) {
            if (node.production_name != "ServicePort") return;
            const TokenValue* model_ref = node.token_attr("Model");
            if (!model_ref) return;
            bool found = false;
            for (const ModelArtifact& other : *ctx.all_models) {
                if (fs::path(other.path).stem().generic_string() == model_ref->text &&
                    exports_cd_types(other.member)) {
                    found = true;
                    break;
                }
            }
            if (!found)
                findings.push_back(error_at(
                    "",
                    "service port references '" + model_ref->text +
                        "' which is no class-diagram model of this family",
                    model_ref->pos));
        });
    }
    return findings;
}

} // namespace

void register_demo_languages(Registries& registries) {
    registries.components["cd.CD"] = cd_component();
    registries.components["hql.HQL"] = hql_component();
    registries.components["expr.Expr"] = expr_component();
    registries.components["montiarc.MontiArc"] = montiarc_component();
    registries.components["clarc.ClArc"] = clarc_component();

    Registries::CompositeExtras cdhql;
    cdhql.adapters.push_back(AdapterSpec{kCdType, kHqlType, {}, {}});
    registries.composites["cdhql"] = std::move(cdhql);

    registries.predicates.add("cd.unique-types", cd_unique_types);
    registries.predicates.add("arc.connector-endpoints", arc_connector_endpoints);
    registries.predicates.add("cdhql.hql-entities-resolve", hql_entities_resolve);
    registries.predicates.add("family.port-types-resolve", port_types_resolve);
    registries.predicates.add("family.service-models-exist", service_models_exist);
}

} // namespace lw::demo
