#include <algorithm>
#include <climits>

#include "lw/compose.hpp"

namespace lw {

const ProdEntry* ComposedGrammar::find(const std::string& ref) const {
    if (auto it = name_index.find(ref); it != name_index.end())
        return &production_table.at(it->second);
    if (auto it = production_table.find(ref); it != production_table.end()) return &it->second;
    return nullptr;
}

std::vector<const ProdEntry*> ComposedGrammar::dispatch_for(const std::string& ref) const {
    const ProdEntry* base = find(ref);
    if (!base) return {};
    auto it = dispatch_table.find(base->rule.name);
    if (it == dispatch_table.end()) return {};
    std::vector<const ProdEntry*> out;
    out.reserve(it->second.size());
    for (const auto& key : it->second) out.push_back(&production_table.at(key));
    return out;
}

const CompiledToken* ComposedGrammar::find_token(const std::string& name) const {
    auto it = tokens.find(name);
    return it == tokens.end() ? nullptr : &it->second;
}

namespace {

Result<std::vector<GrammarModelPtr>> resolve_chain(const GrammarModel& g,
                                                   const GrammarLoader& loader) {
    std::vector<GrammarModelPtr> chain;
    chain.push_back(std::make_shared<const GrammarModel>(g));
    std::set<std::string> seen{g.name.qualified()};
    const GrammarModel* cur = &g;
    while (cur->extends_grammar) {
        const GrammarName parent_name = *cur->extends_grammar;
        if (seen.count(parent_name.qualified())) {
            return Result<std::vector<GrammarModelPtr>>::failure(
                error_at("CyclicInheritance",
                         "inheritance cycle through grammar '" + parent_name.qualified() + "'",
                         SourcePos{cur->name.qualified(), 1, 1}));
        }
        Result<GrammarModelPtr> parent = loader(parent_name);
        if (!parent.ok()) {
            std::vector<Finding> fs;
            fs.push_back(error_at("MissingParentGrammar",
                                  "cannot load parent grammar '" + parent_name.qualified() +
                                      "' of '" + cur->name.qualified() + "'",
                                  SourcePos{cur->name.qualified(), 1, 1}));
            fs.insert(fs.end(), parent.findings.begin(), parent.findings.end());
            return Result<std::vector<GrammarModelPtr>>::failure(std::move(fs));
        }
        seen.insert(parent_name.qualified());
        chain.push_back(*parent.value);
        cur = chain.back().get();
    }
    return Result<std::vector<GrammarModelPtr>>::success(std::move(chain));
}

} // namespace

Result<ComposedGrammar> flatten_inheritance(const GrammarModel& g, const GrammarLoader& loader) {
    auto chain_r = resolve_chain(g, loader);
    if (!chain_r.ok()) return Result<ComposedGrammar>::failure(std::move(chain_r.findings));
    const std::vector<GrammarModelPtr>& chain = *chain_r.value; // [g, parent, ..., root]

    std::vector<Finding> findings;
    ComposedGrammar cg;
    cg.root_name = g.name;

    // Built-ins are available everywhere.
    for (const auto& t : builtin_tokens())
        cg.tokens[t.name] = CompiledToken{t, GrammarName{}, std::regex(t.pattern)};

    // Copy root-ancestor first so more derived rules override.
    for (int depth = static_cast<int>(chain.size()) - 1; depth >= 0; --depth) {
        const GrammarModel& gm = *chain[static_cast<std::size_t>(depth)];
        for (const auto& t : gm.tokens) {
            try {
                cg.tokens[t.name] = CompiledToken{t, gm.name, std::regex(t.pattern)};
            } catch (const std::regex_error& e) {
                findings.push_back(
                    error_at("BadTokenPattern",
                             "token '" + t.name + "' pattern does not compile: " + e.what(), t.pos));
            }
        }
        int decl = 0;
        for (const auto& p : gm.productions) {
            if (cg.tokens.count(p.name) && !cg.name_index.count(p.name)) {
                findings.push_back(error_at("IncompatibleOverride",
                                            "production '" + p.name +
                                                "' overrides a token rule of the same name",
                                            p.pos));
                ++decl;
                continue;
            }
            ProdEntry entry{p, gm.name, depth, decl++, gm.name.qualified() + "." + p.name};
            if (auto it = cg.name_index.find(p.name); it != cg.name_index.end()) {
                // Override: only the child's rule survives.
                cg.production_table.erase(it->second);
            }
            cg.name_index[p.name] = entry.qualified_key;
            cg.production_table.emplace(entry.qualified_key, std::move(entry));
        }
    }
    if (has_error(findings)) return Result<ComposedGrammar>::failure(std::move(findings));

    // Dispatch lists. The substitutable-for group of a name is the transitive
    // closure of extends/implements pointing at it (resolved post-override).
    for (const auto& [name, key] : cg.name_index) {
        const ProdEntry& base = cg.production_table.at(key);
        if (base.rule.flavor == Flavor::External) continue;

        std::set<std::string> group{name};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& [n, k] : cg.name_index) {
                if (group.count(n)) continue;
                const ProdEntry& e = cg.production_table.at(k);
                bool hit = e.rule.extends_production && group.count(*e.rule.extends_production);
                for (const auto& impl : e.rule.implements_list)
                    if (group.count(impl)) hit = true;
                if (hit) {
                    group.insert(n);
                    grew = true;
                }
            }
        }

        std::vector<const ProdEntry*> members;
        for (const auto& n : group) {
            const ProdEntry& e = cg.production_table.at(cg.name_index.at(n));
            if (e.rule.flavor == Flavor::Normal) members.push_back(&e);
        }
        // Most derived grammar first; within a grammar declaration order; the
        // named rule itself after extenders declared at its own depth.
        std::sort(members.begin(), members.end(), [&](const ProdEntry* a, const ProdEntry* b) {
            auto rank = [&](const ProdEntry* p) {
                return std::pair<int, int>(p->depth, p == &base ? INT_MAX : p->decl_index);
            };
            return rank(a) < rank(b);
        });
        std::vector<std::string> keys;
        keys.reserve(members.size());
        for (const ProdEntry* m : members) keys.push_back(m->qualified_key);
        cg.dispatch_table[name] = std::move(keys);
    }

    // Guard against extends cycles among productions (A extends B extends A).
    for (const auto& [name, key] : cg.name_index) {
        std::set<std::string> seen;
        const ProdEntry* cur = &cg.production_table.at(key);
        while (cur && cur->rule.extends_production) {
            if (!seen.insert(cur->rule.name).second) {
                findings.push_back(error_at("ProductionExtendsCycle",
                                            "production extends cycle through '" + cur->rule.name +
                                                "'",
                                            cur->rule.pos));
                break;
            }
            cur = cg.find(*cur->rule.extends_production);
        }
    }
    if (has_error(findings)) return Result<ComposedGrammar>::failure(std::move(findings));

    for (const auto& [key, entry] : cg.production_table)
        if (entry.rule.flavor == Flavor::External) cg.unbound_externals.insert(entry.rule.name);

    // Start: the most derived explicit start wins; otherwise the first
    // normal production starting from the root ancestor, since extension
    // grammars extend the parent's language rather than replace its root.
    for (const auto& gm : chain) {
        if (!gm->start_production) continue;
        if (!cg.find(*gm->start_production)) {
            findings.push_back(error_at("UnknownStartProduction",
                                        "start production '" + *gm->start_production +
                                            "' is not defined in the composed grammar",
                                        SourcePos{gm->name.qualified(), 1, 1}));
            return Result<ComposedGrammar>::failure(std::move(findings));
        }
        cg.start_production = *gm->start_production;
        break;
    }
    if (cg.start_production.empty()) {
        for (auto it = chain.rbegin(); it != chain.rend() && cg.start_production.empty(); ++it) {
            for (const auto& p : (*it)->productions) {
                if (p.flavor == Flavor::Normal) {
                    cg.start_production = p.name;
                    break;
                }
            }
        }
    }

    Result<ComposedGrammar> r;
    r.value = std::move(cg);
    r.findings = std::move(findings);
    return r;
}

// ---------------------------------------------------------------------------
// bind_embeddings
// ---------------------------------------------------------------------------

const ComposedGrammar* BoundLanguage::grammar_named(const std::string& qualified) const {
    for (const auto& g : grammars)
        if (g->root_name.qualified() == qualified) return g.get();
    return nullptr;
}

std::map<std::string, const std::map<std::string, CompiledToken>*>
BoundLanguage::token_set_per_grammar() const {
    std::map<std::string, const std::map<std::string, CompiledToken>*> out;
    for (const auto& g : grammars) out[g->root_name.qualified()] = &g->tokens;
    return out;
}

Result<BoundLanguage> bind_embeddings(ComposedGrammarPtr host, const LanguageConfiguration& cfg,
                                      const GrammarLoader& loader) {
    std::vector<Finding> findings;
    BoundLanguage lang;
    lang.host = host;
    lang.grammars.push_back(host);

    // Load every guest first so bindings may target externals of transitively
    // embedded guests regardless of order.
    std::map<std::string, ComposedGrammarPtr> composed_cache;
    composed_cache[host->root_name.qualified()] = host;
    for (const auto& b : cfg.bindings) {
        const std::string key = b.guest_grammar.qualified();
        if (composed_cache.count(key)) continue;
        Result<GrammarModelPtr> gm = loader(b.guest_grammar);
        if (!gm.ok()) {
            findings.push_back(error_at("MissingParentGrammar",
                                        "cannot load guest grammar '" + key + "'", b.pos));
            findings.insert(findings.end(), gm.findings.begin(), gm.findings.end());
            continue;
        }
        Result<ComposedGrammar> composed = flatten_inheritance(**gm.value, loader);
        if (!composed.ok()) {
            findings.insert(findings.end(), composed.findings.begin(), composed.findings.end());
            continue;
        }
        auto ptr = std::make_shared<const ComposedGrammar>(std::move(*composed.value));
        composed_cache[key] = ptr;
        lang.grammars.push_back(ptr);
    }
    if (has_error(findings)) return Result<BoundLanguage>::failure(std::move(findings));

    // The external universe spans host and guests.
    std::set<std::string> externals;
    for (const auto& g : lang.grammars)
        externals.insert(g->unbound_externals.begin(), g->unbound_externals.end());

    for (const auto& b : cfg.bindings) {
        if (!externals.count(b.host_external)) {
            findings.push_back(error_at(
                "UnknownExternal",
                "'" + b.host_external + "' is not an external production of the composed language",
                b.pos));
            continue;
        }
        const ComposedGrammarPtr& guest = composed_cache.at(b.guest_grammar.qualified());
        const ProdEntry* target = guest->find(b.guest_production);
        if (!target || target->rule.flavor == Flavor::External) {
            findings.push_back(error_at("UnknownGuestProduction",
                                        "guest grammar '" + b.guest_grammar.qualified() +
                                            "' has no production '" + b.guest_production + "'",
                                        b.pos));
            continue;
        }
        lang.external_delegates[b.host_external].push_back(
            BoundLanguage::Delegate{guest, target->rule.name});
    }
    if (has_error(findings)) return Result<BoundLanguage>::failure(std::move(findings));

    for (const auto& e : externals)
        if (!lang.external_delegates.count(e)) lang.unbound_externals.insert(e);

    Result<BoundLanguage> r;
    r.value = std::move(lang);
    r.findings = std::move(findings);
    return r;
}

} // namespace lw
