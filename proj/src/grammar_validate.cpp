#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "lw/grammar.hpp"

namespace lw {

namespace {

struct ScopeProd {
    const ProductionRule* rule;
    int depth;      // 0 = the validated grammar, 1 = parent, ...
    int decl_index; // declaration order within its grammar
    std::string qualified_key;
};

// Override-resolved view of g plus its parents, mirroring flattening: a name
// defined in a more derived grammar shadows the parent's rule entirely.
struct Scope {
    std::map<std::string, ScopeProd> by_name;
    std::map<std::string, const ScopeProd*> by_qualified;
    std::set<std::string> token_names;

    const ScopeProd* find(const std::string& ref) const {
        if (auto it = by_name.find(ref); it != by_name.end()) return &it->second;
        if (auto it = by_qualified.find(ref); it != by_qualified.end()) return it->second;
        return nullptr;
    }
};

Scope build_scope(const GrammarModel& g, const std::vector<const GrammarModel*>& parents) {
    Scope s;
    std::vector<const GrammarModel*> chain{&g};
    chain.insert(chain.end(), parents.begin(), parents.end());
    // Walk from the root ancestor down so children overwrite.
    for (int depth = static_cast<int>(chain.size()) - 1; depth >= 0; --depth) {
        const GrammarModel* gm = chain[static_cast<std::size_t>(depth)];
        int decl = 0;
        for (const auto& p : gm->productions) {
            ScopeProd sp{&p, depth, decl++, gm->name.qualified() + "." + p.name};
            s.by_name[p.name] = sp;
        }
        for (const auto& t : gm->tokens) s.token_names.insert(t.name);
    }
    for (const auto& t : builtin_tokens()) s.token_names.insert(t.name);
    for (auto& [name, sp] : s.by_name) s.by_qualified[sp.qualified_key] = &sp;
    return s;
}

// Normal productions usable where `name` is referenced, most derived first.
std::vector<const ScopeProd*> dispatch_candidates(const Scope& s, const std::string& name) {
    const ScopeProd* base = s.find(name);
    if (!base) return {};
    // substitutable-for relation, transitively through extends/implements
    std::set<const ScopeProd*> subs;
    bool grew = true;
    std::set<std::string> group{base->rule->name};
    while (grew) {
        grew = false;
        for (const auto& [n, sp] : s.by_name) {
            if (group.count(n)) continue;
            bool hit = sp.rule->extends_production && group.count(*sp.rule->extends_production);
            for (const auto& impl : sp.rule->implements_list)
                if (group.count(impl)) hit = true;
            if (hit) {
                group.insert(n);
                grew = true;
            }
        }
    }
    std::vector<const ScopeProd*> out;
    for (const auto& [n, sp] : s.by_name)
        if (group.count(n) && sp.rule->flavor == Flavor::Normal) out.push_back(&sp);
    std::sort(out.begin(), out.end(), [&](const ScopeProd* a, const ScopeProd* b) {
        auto key = [&](const ScopeProd* p) {
            int decl = p == base ? INT_MAX : p->decl_index;
            return std::pair<int, int>(p->depth, decl);
        };
        return key(a) < key(b);
    });
    return out;
}

void collect_refs(const RhsExpr& e, std::vector<const RhsExpr*>& out) {
    if (e.kind == RhsExpr::Kind::NonterminalRef) {
        out.push_back(&e);
        return;
    }
    for (const auto& c : e.children) collect_refs(*c, out);
}

// Nullability per production, least fixpoint over the dispatch semantics.
struct Nullability {
    std::map<std::string, bool> by_prod_name;

    bool expr_nullable(const Scope& s, const RhsExpr& e) const {
        switch (e.kind) {
            case RhsExpr::Kind::Terminal:
            case RhsExpr::Kind::TokenRef:
                return false;
            case RhsExpr::Kind::NonterminalRef: {
                if (s.token_names.count(e.text)) return false;
                for (const ScopeProd* c : dispatch_candidates(s, e.text)) {
                    auto it = by_prod_name.find(c->rule->name);
                    if (it != by_prod_name.end() && it->second) return true;
                }
                return false;
            }
            case RhsExpr::Kind::Sequence: {
                for (const auto& c : e.children)
                    if (!expr_nullable(s, *c)) return false;
                return true;
            }
            case RhsExpr::Kind::OrderedChoice: {
                for (const auto& c : e.children)
                    if (expr_nullable(s, *c)) return true;
                return false;
            }
            case RhsExpr::Kind::Repetition:
                return e.rep_min == 0 || expr_nullable(s, *e.children[0]);
            case RhsExpr::Kind::Optional:
                return true;
        }
        return false;
    }
};

Nullability compute_nullability(const Scope& s) {
    Nullability nb;
    for (const auto& [n, sp] : s.by_name) nb.by_prod_name[n] = false;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [n, sp] : s.by_name) {
            if (nb.by_prod_name[n] || !sp.rule->rhs) continue;
            if (nb.expr_nullable(s, *sp.rule->rhs)) {
                nb.by_prod_name[n] = true;
                changed = true;
            }
        }
    }
    return nb;
}

// Reference names reachable at the left edge before any input is consumed.
void first_refs(const Scope& s, const Nullability& nb, const RhsExpr& e,
                std::set<std::string>& out) {
    switch (e.kind) {
        case RhsExpr::Kind::Terminal:
        case RhsExpr::Kind::TokenRef:
            return;
        case RhsExpr::Kind::NonterminalRef:
            if (!s.token_names.count(e.text)) out.insert(e.text);
            return;
        case RhsExpr::Kind::Sequence:
            for (const auto& c : e.children) {
                first_refs(s, nb, *c, out);
                if (!nb.expr_nullable(s, *c)) return;
            }
            return;
        case RhsExpr::Kind::OrderedChoice:
            for (const auto& c : e.children) first_refs(s, nb, *c, out);
            return;
        case RhsExpr::Kind::Repetition:
        case RhsExpr::Kind::Optional:
            first_refs(s, nb, *e.children[0], out);
            return;
    }
}

} // namespace

std::vector<Finding> validate_grammar(const GrammarModel& g,
                                      const std::vector<const GrammarModel*>& resolved_parents) {
    std::vector<Finding> findings;
    Scope scope = build_scope(g, resolved_parents);

    // (a) every reference resolves to a production or token
    for (const auto& p : g.productions) {
        if (!p.rhs) continue;
        std::vector<const RhsExpr*> refs;
        collect_refs(*p.rhs, refs);
        for (const RhsExpr* r : refs) {
            if (scope.token_names.count(r->text)) continue;
            if (!scope.find(r->text))
                findings.push_back(error_at(
                    "UndefinedNonterminal", "reference to undefined nonterminal '" + r->text + "'",
                    r->pos));
        }
    }

    // (b) abstract productions need at least one normal extender
    for (const auto& [name, sp] : scope.by_name) {
        if (sp.rule->flavor != Flavor::Abstract) continue;
        if (dispatch_candidates(scope, name).empty())
            findings.push_back(error_at("AbstractWithoutExtender",
                                        "abstract production '" + name +
                                            "' has no normal production extending it",
                                        sp.rule->pos));
    }

    // (c) extends/implements targets exist with compatible flavor
    for (const auto& p : g.productions) {
        if (p.extends_production) {
            const ScopeProd* t = scope.find(*p.extends_production);
            if (!t || (t->rule->flavor != Flavor::Normal && t->rule->flavor != Flavor::Abstract))
                findings.push_back(error_at("BadExtendsTarget",
                                            "'" + p.name + "' extends '" + *p.extends_production +
                                                "' which is not a normal or abstract production",
                                            p.pos));
        }
        for (const auto& impl : p.implements_list) {
            const ScopeProd* t = scope.find(impl);
            if (!t || t->rule->flavor != Flavor::Interface)
                findings.push_back(error_at("BadImplementsTarget",
                                            "'" + p.name + "' implements '" + impl +
                                                "' which is not an interface production",
                                            p.pos));
        }
    }

    // (d) no left-recursive cycle reachable from the start production
    std::optional<std::string> start = g.effective_start();
    if (!start) {
        for (const GrammarModel* parent : resolved_parents) {
            start = parent->effective_start();
            if (start) break;
        }
    }
    if (start && scope.find(*start)) {
        Nullability nb = compute_nullability(scope);

        // Productions reachable from the start through any reference.
        std::set<std::string> reachable;
        std::vector<std::string> work;
        auto enqueue = [&](const std::string& name) {
            for (const ScopeProd* c : dispatch_candidates(scope, name)) {
                if (reachable.insert(c->rule->name).second) work.push_back(c->rule->name);
            }
            if (const ScopeProd* sp = scope.find(name))
                if (reachable.insert(sp->rule->name).second) work.push_back(sp->rule->name);
        };
        enqueue(*start);
        while (!work.empty()) {
            std::string cur = work.back();
            work.pop_back();
            const ScopeProd* sp = scope.find(cur);
            if (!sp || !sp->rule->rhs) continue;
            std::vector<const RhsExpr*> refs;
            collect_refs(*sp->rule->rhs, refs);
            for (const RhsExpr* r : refs)
                if (!scope.token_names.count(r->text) && scope.find(r->text)) enqueue(r->text);
        }

        // Left-edge graph: P -> Q when parsing P may enter Q at the same
        // input position.
        std::map<std::string, std::set<std::string>> edges;
        for (const std::string& name : reachable) {
            const ScopeProd* sp = scope.find(name);
            if (!sp || !sp->rule->rhs) continue;
            std::set<std::string> firsts;
            first_refs(scope, nb, *sp->rule->rhs, firsts);
            for (const std::string& f : firsts) {
                for (const ScopeProd* c : dispatch_candidates(scope, f)) edges[name].insert(c->rule->name);
                if (const ScopeProd* t = scope.find(f))
                    if (t->rule->rhs) edges[name].insert(t->rule->name);
            }
        }

        // Cycle detection, deterministic order.
        std::map<std::string, int> state; // 0 unvisited, 1 on stack, 2 done
        std::vector<std::string> stack;
        std::set<std::string> reported;
        std::function<void(const std::string&)> dfs = [&](const std::string& n) {
            state[n] = 1;
            stack.push_back(n);
            for (const std::string& next : edges[n]) {
                if (!reachable.count(next)) continue;
                if (state[next] == 1) {
                    auto it = std::find(stack.begin(), stack.end(), next);
                    std::string cycle;
                    for (; it != stack.end(); ++it) cycle += *it + " -> ";
                    cycle += next;
                    if (reported.insert(next).second) {
                        const ScopeProd* sp = scope.find(next);
                        findings.push_back(error_at("LeftRecursion",
                                                    "left-recursive cycle: " + cycle,
                                                    sp ? sp->rule->pos : SourcePos{}));
                    }
                } else if (state[next] == 0) {
                    dfs(next);
                }
            }
            stack.pop_back();
            state[n] = 2;
        };
        for (const std::string& n : reachable)
            if (state[n] == 0) dfs(n);
    }

    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.pos.path, a.pos.line, a.pos.col, a.code) <
               std::tie(b.pos.path, b.pos.line, b.pos.col, b.code);
    });
    return findings;
}

} // namespace lw
