#include "lw/engine.hpp"

namespace lw {

namespace {

bool is_single_nt_repetition(const RhsExpr& rep) {
    return rep.children.size() == 1 && rep.children[0]->kind == RhsExpr::Kind::NonterminalRef;
}

// Re-derives the token stream of a node by walking its production's RHS with
// a cursor over the node's attributes, mirroring the parser's attribute
// layout. Choices and repetitions backtrack over the cursor.
class Printer {
public:
    explicit Printer(const BoundLanguage& lang) : lang_(lang) {}

    Result<std::string> print(const AstNode& root) {
        if (!print_node(root)) {
            return Result<std::string>::failure(error_at(
                "InconsistentNode",
                "attributes of node '" + root.production_name + "' do not match production '" +
                    failed_at_ + "'",
                root.span_start));
        }
        std::string out;
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            if (i) out += (toks_[i - 1] == ";" || toks_[i - 1] == "}") ? '\n' : ' ';
            out += toks_[i];
        }
        if (!toks_.empty()) out += '\n';
        return Result<std::string>::success(std::move(out));
    }

private:
    const BoundLanguage& lang_;
    std::vector<std::string> toks_;
    std::string failed_at_;

    struct Frame {
        const AstNode* node;
        const ComposedGrammar* grammar;
        std::size_t attr = 0;
    };

    struct Mark {
        std::size_t attr;
        std::size_t toks;
    };

    Mark save(const Frame& f) const { return Mark{f.attr, toks_.size()}; }
    void restore(Frame& f, const Mark& m) {
        f.attr = m.attr;
        toks_.resize(m.toks);
    }

    const ComposedGrammar* grammar_defining(const AstNode& n, const ProdEntry** entry_out) {
        const std::string key = n.origin_grammar.qualified() + "." + n.production_name;
        for (const auto& g : lang_.grammars) {
            auto it = g->production_table.find(key);
            if (it != g->production_table.end()) {
                *entry_out = &it->second;
                return g.get();
            }
        }
        return nullptr;
    }

    bool print_node(const AstNode& n) {
        const ProdEntry* entry = nullptr;
        const ComposedGrammar* g = grammar_defining(n, &entry);
        if (!g || !entry->rule.rhs) {
            failed_at_ = n.production_name;
            return false;
        }
        Frame f{&n, g, 0};
        if (!walk_expr(*entry->rule.rhs, f) || f.attr != n.attributes.size()) {
            failed_at_ = n.production_name;
            return false;
        }
        return true;
    }

    const AstAttribute* current(const Frame& f) const {
        return f.attr < f.node->attributes.size() ? &f.node->attributes[f.attr] : nullptr;
    }

    bool walk_expr(const RhsExpr& e, Frame& f) {
        switch (e.kind) {
            case RhsExpr::Kind::Terminal:
                toks_.push_back(e.text);
                return true;

            case RhsExpr::Kind::TokenRef: {
                const AstAttribute* a = current(f);
                if (!a || a->label != e.label() || a->value.kind != AstValue::Kind::Token)
                    return false;
                toks_.push_back(a->value.token.text);
                ++f.attr;
                return true;
            }

            case RhsExpr::Kind::NonterminalRef: {
                if (f.grammar->find_token(e.text)) {
                    const AstAttribute* a = current(f);
                    if (!a || a->label != e.label() || a->value.kind != AstValue::Kind::Token)
                        return false;
                    toks_.push_back(a->value.token.text);
                    ++f.attr;
                    return true;
                }
                const AstAttribute* a = current(f);
                if (!a || a->label != e.label() || a->value.kind != AstValue::Kind::Child)
                    return false;
                if (!print_node(*a->value.child)) return false;
                ++f.attr;
                return true;
            }

            case RhsExpr::Kind::Sequence: {
                Mark m = save(f);
                for (const auto& c : e.children) {
                    if (!walk_expr(*c, f)) {
                        restore(f, m);
                        return false;
                    }
                }
                return true;
            }

            case RhsExpr::Kind::OrderedChoice: {
                Mark m = save(f);
                for (const auto& alt : e.children) {
                    if (walk_expr(*alt, f)) return true;
                    restore(f, m);
                }
                return false;
            }

            case RhsExpr::Kind::Optional: {
                Mark m = save(f);
                if (!walk_expr(*e.children[0], f)) restore(f, m);
                return true;
            }

            case RhsExpr::Kind::Repetition: {
                if (is_single_nt_repetition(e)) {
                    const RhsExpr& ref = *e.children[0];
                    if (f.grammar->find_token(ref.text)) {
                        // per-iteration token attributes
                        int count = 0;
                        while (const AstAttribute* a = current(f)) {
                            if (a->label != ref.label() || a->value.kind != AstValue::Kind::Token)
                                break;
                            toks_.push_back(a->value.token.text);
                            ++f.attr;
                            ++count;
                        }
                        return count >= e.rep_min;
                    }
                    const AstAttribute* a = current(f);
                    if (!a || a->label != ref.label() || a->value.kind != AstValue::Kind::ChildList)
                        return false;
                    if (static_cast<int>(a->value.children.size()) < e.rep_min) return false;
                    for (const auto& c : a->value.children)
                        if (!print_node(*c)) return false;
                    ++f.attr;
                    return true;
                }
                int count = 0;
                while (true) {
                    Mark m = save(f);
                    if (!walk_expr(*e.children[0], f)) {
                        restore(f, m);
                        break;
                    }
                    if (f.attr == m.attr) { // no attribute progress; cannot recover a count
                        restore(f, m);
                        break;
                    }
                    ++count;
                }
                return count >= e.rep_min;
            }
        }
        return false;
    }
};

} // namespace

Result<std::string> pretty_print(const AstNode& node, const BoundLanguage& lang) {
    return Printer(lang).print(node);
}

} // namespace lw
