#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lw/family.hpp"
#include "lw/scan.hpp"

namespace fs = std::filesystem;

namespace lw {

std::string condition_level_name(ConditionLevel l) {
    switch (l) {
        case ConditionLevel::Component: return "component";
        case ConditionLevel::Composite: return "composite";
        case ConditionLevel::Family: return "family";
    }
    return "?";
}

std::vector<EntryCreationRule> ModelingLanguageDef::entry_rules() const {
    std::vector<EntryCreationRule> out;
    for (const auto& c : components)
        out.insert(out.end(), c.entry_rules.begin(), c.entry_rules.end());
    return out;
}

std::vector<Kind> ModelingLanguageDef::exported_kinds() const {
    std::vector<Kind> out;
    for (const auto& c : components)
        for (const auto& k : c.exported_kinds)
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    return out;
}

BuildHooks ModelingLanguageDef::merged_hooks() const {
    BuildHooks hooks;
    for (const auto& c : components)
        for (const auto& [key, fn] : c.hooks.node_hooks) hooks.node_hooks.emplace(key, fn);
    return hooks;
}

std::vector<ContextConditionSpec> ModelingLanguageDef::component_conditions() const {
    std::vector<ContextConditionSpec> out;
    for (const auto& c : components)
        out.insert(out.end(), c.context_conditions.begin(), c.context_conditions.end());
    return out;
}

const AdapterRegistry* ModelingLanguageDef::composite_adapters() const {
    return composite ? &composite->adapters : nullptr;
}

std::vector<ContextConditionSpec> ModelingLanguageDef::composite_conditions() const {
    return composite ? composite->context_conditions : std::vector<ContextConditionSpec>{};
}

const ModelingLanguageDef* LanguageFamilyDef::member_for_extension(const std::string& ext) const {
    for (const auto& m : members)
        if (m.file_extension == ext) return &m;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Member assembly
// ---------------------------------------------------------------------------

Result<ModelingLanguageDef> assemble_member(const LanguageConfiguration& cfg,
                                            const GrammarLoader& loader,
                                            const Registries& registries) {
    std::vector<Finding> findings;

    Result<GrammarModelPtr> host_model = loader(cfg.host_grammar);
    if (!host_model.ok()) return Result<ModelingLanguageDef>::failure(std::move(host_model.findings));

    // Validate the host with its resolved parents before composing.
    {
        std::vector<GrammarModelPtr> parents_owned;
        std::vector<const GrammarModel*> parents;
        const GrammarModel* cur = host_model.value->get();
        std::set<std::string> seen{cur->name.qualified()};
        while (cur->extends_grammar && !seen.count(cur->extends_grammar->qualified())) {
            seen.insert(cur->extends_grammar->qualified());
            Result<GrammarModelPtr> parent = loader(*cur->extends_grammar);
            if (!parent.ok()) break; // flatten reports MissingParentGrammar
            parents_owned.push_back(*parent.value);
            parents.push_back(parents_owned.back().get());
            cur = parents_owned.back().get();
        }
        std::vector<Finding> vf = validate_grammar(**host_model.value, parents);
        findings.insert(findings.end(), vf.begin(), vf.end());
        if (has_error(findings)) return Result<ModelingLanguageDef>::failure(std::move(findings));
    }

    Result<ComposedGrammar> composed = flatten_inheritance(**host_model.value, loader);
    if (!composed.ok()) {
        findings.insert(findings.end(), composed.findings.begin(), composed.findings.end());
        return Result<ModelingLanguageDef>::failure(std::move(findings));
    }
    auto host = std::make_shared<const ComposedGrammar>(std::move(*composed.value));

    Result<BoundLanguage> bound = bind_embeddings(host, cfg, loader);
    findings.insert(findings.end(), bound.findings.begin(), bound.findings.end());
    if (!bound.ok()) return Result<ModelingLanguageDef>::failure(std::move(findings));

    ModelingLanguageDef member;
    member.name = cfg.language_name;
    member.file_extension = cfg.file_extension;
    member.bound = std::move(*bound.value);

    // Components for every grammar contributing productions: the host, its
    // inheritance chain, and each guest with its chain.
    std::vector<std::string> grammar_names;
    auto note_grammar = [&](const std::string& qualified) {
        if (std::find(grammar_names.begin(), grammar_names.end(), qualified) == grammar_names.end())
            grammar_names.push_back(qualified);
    };
    for (const auto& g : member.bound.grammars) {
        note_grammar(g->root_name.qualified());
        for (const auto& [key, entry] : g->production_table) note_grammar(entry.origin.qualified());
    }
    for (const auto& qualified : grammar_names) {
        auto it = registries.components.find(qualified);
        if (it == registries.components.end()) {
            findings.push_back(error_at("UnknownLanguageComponent",
                                        "no language component registered for grammar '" +
                                            qualified + "'",
                                        SourcePos{}));
            continue;
        }
        member.components.push_back(it->second);
    }
    if (has_error(findings)) return Result<ModelingLanguageDef>::failure(std::move(findings));

    // Embedding wraps the components into a composite carrying the adapters
    // and cross-language intra-model conditions registered for this language.
    if (!cfg.bindings.empty()) {
        CompositeLanguageDef composite;
        composite.name = cfg.language_name;
        composite.children = member.components;
        if (auto it = registries.composites.find(cfg.language_name);
            it != registries.composites.end()) {
            for (const auto& spec : it->second.adapters)
                if (auto dup = composite.adapters.add(spec)) findings.push_back(*dup);
            composite.context_conditions = it->second.conditions;
        }
        member.composite = std::move(composite);
    }
    if (has_error(findings)) return Result<ModelingLanguageDef>::failure(std::move(findings));

    Result<ModelingLanguageDef> r;
    r.value = std::move(member);
    r.findings = std::move(findings);
    return r;
}

// ---------------------------------------------------------------------------
// Family assembly
// ---------------------------------------------------------------------------

namespace {

Result<Kind> parse_kind(TextScanner& scan) {
    auto name = scan.accept_dotted_name();
    if (!name || std::count(name->begin(), name->end(), '.') != 1)
        return Result<Kind>::failure(scan.syntax_error("kind as <languageId>.<kindName>"));
    return Result<Kind>::success(kind_from(*name));
}

} // namespace

Result<LanguageFamilyDef> assemble_family(const std::string& cfg_text,
                                          const std::string& family_path,
                                          const GrammarLoader& loader,
                                          const Registries& registries) {
    TextScanner scan(cfg_text, family_path);
    std::vector<Finding> findings;
    LanguageFamilyDef family;
    family.base_dir = fs::path(family_path).parent_path().generic_string();
    if (family.base_dir.empty()) family.base_dir = ".";

    auto fail = [&](const std::string& expected) {
        findings.push_back(scan.syntax_error(expected));
        return Result<LanguageFamilyDef>::failure(std::move(findings));
    };

    if (!scan.accept("family")) return fail("'family'");
    auto name = scan.accept_identifier();
    if (!name) return fail("family name");
    family.name = *name;
    if (!scan.accept("{")) return fail("'{'");

    while (!scan.peek("}")) {
        if (scan.at_end()) return fail("'}'");
        SourcePos item_pos = scan.here();
        if (scan.accept("member")) {
            auto member_name = scan.accept_identifier();
            if (!member_name || !scan.accept("from")) return fail("member name followed by 'from'");
            auto path = scan.accept_string(findings);
            if (!path || !scan.accept(";")) return fail("configuration path followed by ';'");

            fs::path cfg_path = fs::path(family.base_dir) / *path;
            std::ifstream in(cfg_path, std::ios::binary);
            if (!in) {
                findings.push_back(error_at("ModelFileUnreadable",
                                            "cannot read language configuration " +
                                                cfg_path.generic_string(),
                                            item_pos));
                continue;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            Result<LanguageConfiguration> cfg =
                parse_language_configuration(buf.str(), cfg_path.generic_string());
            findings.insert(findings.end(), cfg.findings.begin(), cfg.findings.end());
            if (!cfg.ok()) continue;
            if (cfg->language_name != *member_name) {
                findings.push_back(error_at("MemberNameMismatch",
                                            "member '" + *member_name + "' loads configuration '" +
                                                cfg->language_name + "'",
                                            item_pos));
                continue;
            }
            Result<ModelingLanguageDef> member = assemble_member(*cfg.value, loader, registries);
            findings.insert(findings.end(), member.findings.begin(), member.findings.end());
            if (member.ok()) family.members.push_back(std::move(*member.value));
        } else if (scan.accept("adapter")) {
            AdapterSpec spec;
            Result<Kind> from = parse_kind(scan);
            if (!from.ok()) return Result<LanguageFamilyDef>::failure(std::move(from.findings));
            if (!scan.accept("->")) return fail("'->'");
            Result<Kind> to = parse_kind(scan);
            if (!to.ok()) return Result<LanguageFamilyDef>::failure(std::move(to.findings));
            spec.from_kind = *from.value;
            spec.to_kind = *to.value;
            while (scan.accept("child")) {
                Result<Kind> cf = parse_kind(scan);
                if (!cf.ok()) return Result<LanguageFamilyDef>::failure(std::move(cf.findings));
                if (!scan.accept("->")) return fail("'->'");
                Result<Kind> ct = parse_kind(scan);
                if (!ct.ok()) return Result<LanguageFamilyDef>::failure(std::move(ct.findings));
                spec.child_kind_map[*cf.value] = *ct.value;
            }
            if (!scan.accept(";")) return fail("';'");
            if (auto dup = family.adapters.add(std::move(spec))) {
                dup->pos = item_pos;
                findings.push_back(*dup);
            }
        } else if (scan.accept("condition")) {
            ContextConditionSpec spec;
            auto id = scan.accept_word_with("-");
            if (!id) return fail("condition id");
            spec.id = *id;
            if (!scan.accept("level")) return fail("'level'");
            if (scan.accept("component"))
                spec.level = ConditionLevel::Component;
            else if (scan.accept("composite"))
                spec.level = ConditionLevel::Composite;
            else if (scan.accept("family"))
                spec.level = ConditionLevel::Family;
            else
                return fail("'component', 'composite', or 'family'");
            if (!scan.accept("predicate")) return fail("'predicate'");
            auto predicate = scan.accept_word_with("-.");
            if (!predicate || !scan.accept(";")) return fail("predicate id followed by ';'");
            spec.predicate_id = *predicate;
            family.conditions.push_back(std::move(spec));
        } else {
            return fail("'member', 'adapter', 'condition', or '}'");
        }
    }
    scan.accept("}");

    // Every referenced predicate must exist before the pipeline runs.
    auto bind_predicate = [&](const ContextConditionSpec& spec) {
        if (family.bound_predicates.count(spec.predicate_id)) return;
        const Predicate* p = registries.predicates.find(spec.predicate_id);
        if (!p) {
            findings.push_back(error_at("UnknownPredicate",
                                        "condition " + spec.id + " names unregistered predicate '" +
                                            spec.predicate_id + "'",
                                        SourcePos{family_path, 1, 1}));
            return;
        }
        family.bound_predicates[spec.predicate_id] = *p;
    };
    for (const auto& spec : family.conditions) bind_predicate(spec);
    for (const auto& m : family.members) {
        for (const auto& spec : m.component_conditions()) bind_predicate(spec);
        for (const auto& spec : m.composite_conditions()) bind_predicate(spec);
    }

    // File extensions select members and must be pairwise distinct.
    std::map<std::string, std::string> ext_owner;
    for (const auto& m : family.members) {
        auto [it, inserted] = ext_owner.emplace(m.file_extension, m.name);
        if (!inserted)
            findings.push_back(error_at("DuplicateExtension",
                                        "members '" + it->second + "' and '" + m.name +
                                            "' both claim extension " + m.file_extension,
                                        SourcePos{family_path, 1, 1}));
    }

    if (has_error(findings)) return Result<LanguageFamilyDef>::failure(std::move(findings));
    Result<LanguageFamilyDef> r;
    r.value = std::move(family);
    r.findings = std::move(findings);
    return r;
}

// ---------------------------------------------------------------------------
// run_context_condition
// ---------------------------------------------------------------------------

std::vector<Finding> run_context_condition(const ContextConditionSpec& spec,
                                           const ConditionContext& ctx,
                                           const std::map<std::string, Predicate>& predicates) {
    auto it = predicates.find(spec.predicate_id);
    if (it == predicates.end()) {
        return {error_at("CC-INTERNAL",
                         "condition " + spec.id + ": predicate '" + spec.predicate_id +
                             "' is not bound",
                         SourcePos{})};
    }
    std::vector<Finding> findings;
    try {
        findings = it->second(ctx);
    } catch (const std::exception& e) {
        return {error_at("CC-INTERNAL",
                         "condition " + spec.id + " failed: " + e.what(), SourcePos{})};
    } catch (...) {
        return {error_at("CC-INTERNAL", "condition " + spec.id + " failed", SourcePos{})};
    }
    for (auto& f : findings) {
        f.code = spec.id;
        f.severity = spec.severity;
    }
    return findings;
}

std::vector<Finding> FamilyReport::all_findings() const {
    std::vector<Finding> out;
    for (const auto& m : per_model) out.insert(out.end(), m.findings.begin(), m.findings.end());
    out.insert(out.end(), cross_findings.begin(), cross_findings.end());
    return out;
}

} // namespace lw
