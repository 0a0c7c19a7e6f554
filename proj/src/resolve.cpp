#include <algorithm>
#include <set>

#include "lw/symfile.hpp"
#include "lw/symtab.hpp"

namespace lw {

namespace {

/// Candidate qualified names for a simple name seen from `ns`: the enclosing
/// namespace chain innermost-first, then every visible import prefix. A
/// dotted name is its own only candidate.
std::vector<std::string> qualified_candidates(const std::string& name, const NamespaceNode& ns) {
    if (name.find('.') != std::string::npos) return {name};
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto push = [&](const std::string& prefix) {
        std::string candidate = prefix.empty() ? name : prefix + "." + name;
        if (seen.insert(candidate).second) out.push_back(candidate);
    };
    for (const NamespaceNode* n = &ns; n; n = n->parent) push(n->qualified_name());
    for (const NamespaceNode* n = &ns; n; n = n->parent)
        for (const auto& import : n->imports) push(import);
    return out;
}

/// True when a namespace with qualified name = prefix(candidate) holds
/// (simple(candidate), kind) somewhere in the tree of `ns`.
bool locally_known(const std::string& candidate, const Kind& kind, const NamespaceNode& ns) {
    auto parts = split_dotted(candidate);
    std::string simple = parts.back();
    parts.pop_back();
    std::string prefix = join_dotted(parts);
    std::vector<const NamespaceNode*> spaces;
    ns.root().find_by_qualified(prefix, spaces);
    for (const NamespaceNode* s : spaces)
        if (s->lookup(TableKey{simple, kind})) return true;
    return false;
}

} // namespace

Result<EntryPtr> qualify(const EntryPtr& entry, const NamespaceNode& ns, const FamilyIndex& index) {
    if (entry->state() >= EntryState::Qualified) return Result<EntryPtr>::success(entry);

    const std::string& name = entry->simple_name();
    if (name.find('.') != std::string::npos) {
        // Already written in qualified form.
        entry->set_qualified_name(name);
        return Result<EntryPtr>::success(entry);
    }

    std::vector<std::string> survivors;
    for (const std::string& candidate : qualified_candidates(name, ns)) {
        if (locally_known(candidate, entry->kind(), ns) ||
            index.lookup(candidate, entry->kind()))
            survivors.push_back(candidate);
    }

    if (survivors.empty()) {
        return Result<EntryPtr>::failure(
            error_at("UnresolvableName",
                     "cannot qualify '" + name + "' of kind " + entry->kind().render(),
                     entry->origin().pos.value_or(SourcePos{})));
    }
    if (survivors.size() > 1) {
        std::string all;
        for (const auto& s : survivors) {
            if (!all.empty()) all += ", ";
            all += s;
        }
        return Result<EntryPtr>::failure(
            error_at("AmbiguousName", "'" + name + "' is ambiguous; candidates: " + all,
                     entry->origin().pos.value_or(SourcePos{})));
    }
    entry->set_qualified_name(survivors.front());
    return Result<EntryPtr>::success(entry);
}

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

namespace {

struct TableHit {
    EntryPtr entry;       // native entry or freshly built adapter
    std::string describe; // for ambiguity messages
};

/// Native-kind entries win; adapters are consulted only when no native entry
/// matches. Adapters never chain. `hidden` carries the consulting
/// namespace's shadowed import keys when looking through an import.
std::vector<TableHit> hits_in_table(const NamespaceNode& ns, const std::string& name,
                                    const Kind& kind, const AdapterRegistry& adapters,
                                    const std::set<TableKey>* hidden) {
    std::vector<TableHit> hits;
    auto blocked = [&](const TableKey& key) { return hidden && hidden->count(key) > 0; };
    TableKey native_key{name, kind};
    if (const auto* list = ns.lookup(native_key); list && !blocked(native_key)) {
        for (const auto& e : *list)
            hits.push_back(TableHit{e, kind.render() + " in " + ns.qualified_name()});
    }
    if (!hits.empty()) return hits;
    for (const AdapterSpecPtr& spec : adapters.sources_for(kind)) {
        TableKey key{name, spec->from_kind};
        if (const auto* list = ns.lookup(key); list && !blocked(key)) {
            for (const auto& e : *list)
                hits.push_back(TableHit{adapt_entry(e, kind, spec),
                                        spec->from_kind.render() + " (adapted) in " +
                                            ns.qualified_name()});
        }
    }
    return hits;
}

Result<EntryPtr> finish(std::vector<TableHit> hits, const std::string& name, const Kind& kind,
                        const SourcePos& at) {
    if (hits.size() > 1) {
        std::string all;
        for (const auto& h : hits) {
            if (!all.empty()) all += ", ";
            all += h.describe;
        }
        return Result<EntryPtr>::failure(error_at(
            "Ambiguous", "'" + name + "' of kind " + kind.render() + " is ambiguous: " + all, at));
    }
    hits.front().entry->mark_full();
    return Result<EntryPtr>::success(hits.front().entry);
}

std::string suggestion_from_index(const FamilyIndex& index, const std::string& name,
                                  const std::vector<Kind>& kinds) {
    std::string best;
    std::size_t best_dist = 3; // suggest within edit distance 2
    for (const auto& key : index.keys()) {
        if (std::find(kinds.begin(), kinds.end(), key.kind) == kinds.end()) continue;
        std::size_t d = edit_distance(name, key.simple_name);
        if (d > 2) continue;
        if (d < best_dist) {
            best = key.simple_name;
            best_dist = d;
        } else if (d == best_dist && key.simple_name < best) {
            best = key.simple_name;
        }
    }
    return best;
}

} // namespace

Result<EntryPtr> resolve(const std::string& name, const Kind& kind, const NamespaceNode& from,
                         ModelRepository* repo, const AdapterRegistry& adapters,
                         const SourcePos& at) {
    const bool dotted = name.find('.') != std::string::npos;

    if (!dotted) {
        // (1)-(3): own table, then non-hidden imports, ascending the chain.
        for (const NamespaceNode* ns = &from; ns; ns = ns->parent) {
            std::vector<TableHit> hits = hits_in_table(*ns, name, kind, adapters, nullptr);
            if (!hits.empty()) return finish(std::move(hits), name, kind, at);

            std::vector<TableHit> import_hits;
            for (const auto& import : ns->imports) {
                std::vector<const NamespaceNode*> sources;
                from.root().find_by_qualified(import, sources);
                for (const NamespaceNode* src : sources) {
                    if (src == ns) continue;
                    for (auto& h : hits_in_table(*src, name, kind, adapters, &ns->hidden_imports))
                        import_hits.push_back(std::move(h));
                }
            }
            if (!import_hits.empty()) return finish(std::move(import_hits), name, kind, at);
        }
    } else {
        // Dotted names may still denote a local entry.
        std::vector<TableHit> hits;
        auto parts = split_dotted(name);
        std::string simple = parts.back();
        parts.pop_back();
        std::vector<const NamespaceNode*> spaces;
        from.root().find_by_qualified(join_dotted(parts), spaces);
        for (const NamespaceNode* s : spaces)
            for (auto& h : hits_in_table(*s, simple, kind, adapters, nullptr))
                hits.push_back(std::move(h));
        if (!hits.empty()) return finish(std::move(hits), name, kind, at);
    }

    // (4) qualify and load from the exporting model's symbol file.
    std::vector<Kind> kind_order{kind};
    for (const AdapterSpecPtr& spec : adapters.sources_for(kind)) kind_order.push_back(spec->from_kind);

    if (repo) {
        struct IndexHit {
            std::string qualified;
            Kind kind;
            std::string path;
        };
        std::vector<IndexHit> native_hits, adapted_hits;
        for (const std::string& candidate : qualified_candidates(name, from)) {
            for (const Kind& k : kind_order) {
                if (auto path = repo->index_lookup(candidate, k)) {
                    (k == kind ? native_hits : adapted_hits)
                        .push_back(IndexHit{candidate, k, *path});
                }
            }
        }
        std::vector<IndexHit>& hits = native_hits.empty() ? adapted_hits : native_hits;
        if (hits.size() > 1) {
            std::string all;
            for (const auto& h : hits) {
                if (!all.empty()) all += ", ";
                all += h.qualified + "#" + h.kind.render();
            }
            return Result<EntryPtr>::failure(error_at(
                "Ambiguous", "'" + name + "' of kind " + kind.render() + " is ambiguous: " + all,
                at));
        }
        if (hits.size() == 1) {
            const IndexHit& hit = hits.front();
            Result<std::shared_ptr<const SymbolFile>> file = repo->load(hit.path);
            if (!file.ok()) {
                std::vector<Finding> fs;
                fs.push_back(error_at("SymbolFileMissing",
                                      "no loadable symbol file for '" + hit.qualified + "' (" +
                                          hit.path + ")",
                                      at));
                fs.insert(fs.end(), file.findings.begin(), file.findings.end());
                return Result<EntryPtr>::failure(std::move(fs));
            }
            EntryPtr entry = (*file.value)->find_entry(hit.qualified);
            if (!entry) {
                return Result<EntryPtr>::failure(error_at(
                    "SymbolFileMissing",
                    "symbol file " + hit.path + " does not contain '" + hit.qualified + "'", at));
            }
            entry->mark_full();
            if (hit.kind != kind) {
                const AdapterSpecPtr* spec = adapters.find(hit.kind, kind);
                entry = adapt_entry(entry, kind, *spec);
            }
            return Result<EntryPtr>::success(entry);
        }
    }

    std::string msg = "cannot resolve '" + name + "' of kind " + kind.render();
    if (repo) {
        std::string hint = suggestion_from_index(repo->index(), name, kind_order);
        if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
    }
    return Result<EntryPtr>::failure(error_at("NotFound", msg, at));
}

} // namespace lw
