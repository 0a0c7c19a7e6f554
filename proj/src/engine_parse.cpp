#include <algorithm>
#include <cctype>
#include <set>

#include "lw/engine.hpp"
#include "lw/scan.hpp"

namespace lw {

const AstAttribute* AstNode::attr(const std::string& label) const {
    for (const auto& a : attributes)
        if (a.label == label) return &a;
    return nullptr;
}

const TokenValue* AstNode::token_attr(const std::string& label) const {
    const AstAttribute* a = attr(label);
    return a && a->value.kind == AstValue::Kind::Token ? &a->value.token : nullptr;
}

void walk(const AstNode& root, const std::function<void(const AstNode&)>& pre,
          const std::function<void(const AstNode&)>& post) {
    if (pre) pre(root);
    for (const auto& a : root.attributes) {
        switch (a.value.kind) {
            case AstValue::Kind::Token: break;
            case AstValue::Kind::Child: walk(*a.value.child, pre, post); break;
            case AstValue::Kind::ChildList:
                for (const auto& c : a.value.children) walk(*c, pre, post);
                break;
        }
    }
    if (post) post(root);
}

bool ast_equal_ignoring_spans(const AstNode& a, const AstNode& b) {
    if (a.production_name != b.production_name || a.origin_grammar != b.origin_grammar ||
        a.attributes.size() != b.attributes.size())
        return false;
    for (std::size_t i = 0; i < a.attributes.size(); ++i) {
        const AstAttribute& x = a.attributes[i];
        const AstAttribute& y = b.attributes[i];
        if (x.label != y.label || x.value.kind != y.value.kind) return false;
        switch (x.value.kind) {
            case AstValue::Kind::Token:
                if (x.value.token.text != y.value.token.text) return false;
                break;
            case AstValue::Kind::Child:
                if (!ast_equal_ignoring_spans(*x.value.child, *y.value.child)) return false;
                break;
            case AstValue::Kind::ChildList:
                if (x.value.children.size() != y.value.children.size()) return false;
                for (std::size_t j = 0; j < x.value.children.size(); ++j)
                    if (!ast_equal_ignoring_spans(*x.value.children[j], *y.value.children[j]))
                        return false;
                break;
        }
    }
    return true;
}

bool ast_equal(const AstNode& a, const AstNode& b) {
    if (!(a.span_start == b.span_start) || !(a.span_end == b.span_end)) return false;
    if (!ast_equal_ignoring_spans(a, b)) return false;
    // span check of nested nodes
    bool ok = true;
    auto it_a = a.attributes.begin();
    for (; it_a != a.attributes.end(); ++it_a) {
        const auto& y = b.attributes[static_cast<std::size_t>(it_a - a.attributes.begin())];
        if (it_a->value.kind == AstValue::Kind::Token &&
            !(it_a->value.token.pos == y.value.token.pos))
            ok = false;
        if (it_a->value.kind == AstValue::Kind::Child && !ast_equal(*it_a->value.child, *y.value.child))
            ok = false;
        if (it_a->value.kind == AstValue::Kind::ChildList)
            for (std::size_t j = 0; j < it_a->value.children.size(); ++j)
                if (!ast_equal(*it_a->value.children[j], *y.value.children[j])) ok = false;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// parse_model: backtracking recursive descent with ordered choice.
// ---------------------------------------------------------------------------

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Repetitions over exactly one nonterminal reference aggregate into a single
/// ChildList attribute; everything else appends per iteration.
bool is_single_nt_repetition(const RhsExpr& rep) {
    return rep.children.size() == 1 && rep.children[0]->kind == RhsExpr::Kind::NonterminalRef;
}

class ModelParser {
public:
    ModelParser(const BoundLanguage& lang, const std::string& text, std::string path,
                const ParseOptions& opts)
        : lang_(lang),
          text_(text),
          path_(std::move(path)),
          opts_(opts),
          line_starts_(index_line_starts(text)) {}

    Result<AstNodePtr> run() {
        const ComposedGrammar& host = *lang_.host;
        std::string start = opts_.start_production.empty() ? host.start_production
                                                           : opts_.start_production;
        if (start.empty()) {
            return Result<AstNodePtr>::failure(error_at(
                "NoStartProduction",
                "language '" + host.root_name.qualified() + "' has no start production", pos_at(0)));
        }
        grammar_ = &host;
        std::shared_ptr<AstNode> root;
        if (!host.find(start)) {
            return Result<AstNodePtr>::failure(error_at(
                "NoStartProduction",
                "start production '" + start + "' does not exist in '" +
                    host.root_name.qualified() + "'",
                pos_at(0)));
        }

        AstNode scratch; // collects the root reference's attribute
        bool ok = parse_ref_into(start, start, scratch, 0);
        if (abort_) return Result<AstNodePtr>::failure(std::move(*abort_));
        if (!ok) return Result<AstNodePtr>::failure(farthest_finding());

        skip();
        if (pos_ != text_.size()) {
            Finding f = error_at("InputNotConsumed", leftover_message(), pos_at(pos_));
            return Result<AstNodePtr>::failure(std::move(f));
        }
        const AstAttribute& a = scratch.attributes.front();
        if (a.value.kind != AstValue::Kind::Child) {
            return Result<AstNodePtr>::failure(error_at(
                "NoStartProduction", "start symbol '" + start + "' names a token, not a production",
                pos_at(0)));
        }
        return Result<AstNodePtr>::success(a.value.child);
    }

private:
    const BoundLanguage& lang_;
    const std::string& text_;
    std::string path_;
    ParseOptions opts_;
    std::vector<std::size_t> line_starts_;

    std::size_t pos_ = 0;
    const ComposedGrammar* grammar_ = nullptr; // current token-set context
    std::optional<Finding> abort_;

    std::size_t farthest_ = 0;
    std::set<std::string> expected_;

    SourcePos pos_at(std::size_t off) const {
        return source_pos_at(text_, line_starts_, off, path_);
    }

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                pos_ += 2;
                while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/'))
                    ++pos_;
                pos_ = pos_ + 1 < text_.size() ? pos_ + 2 : text_.size();
            } else {
                break;
            }
        }
    }

    void note_failure(std::size_t at, const std::string& what) {
        if (at > farthest_) {
            farthest_ = at;
            expected_.clear();
        }
        if (at == farthest_) expected_.insert(what);
    }

    Finding farthest_finding() {
        std::string msg = "expected ";
        bool first = true;
        for (const auto& e : expected_) {
            if (!first) msg += ", ";
            msg += e;
            first = false;
        }
        if (first) msg = "syntax error";
        return error_at("SyntaxError", msg, pos_at(farthest_));
    }

    std::string leftover_message() {
        std::string msg = "input not fully consumed";
        if (farthest_ >= pos_ && !expected_.empty()) {
            msg += " (";
            msg += farthest_finding().message;
            msg += " at " + std::to_string(pos_at(farthest_).line) + ":" +
                   std::to_string(pos_at(farthest_).col) + ")";
        }
        return msg;
    }

    void set_abort(Finding f) {
        if (!abort_) abort_ = std::move(f);
    }

    bool match_terminal(const std::string& lit) {
        skip();
        if (text_.compare(pos_, lit.size(), lit) != 0) {
            note_failure(pos_, "'" + lit + "'");
            return false;
        }
        // Word-like terminals must not continue into a longer word.
        if (!lit.empty() && word_char(lit.back())) {
            std::size_t next = pos_ + lit.size();
            if (next < text_.size() && word_char(text_[next])) {
                note_failure(pos_, "'" + lit + "'");
                return false;
            }
        }
        pos_ += lit.size();
        return true;
    }

    std::optional<TokenValue> match_token(const CompiledToken& tok) {
        skip();
        std::cmatch m;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        if (!std::regex_search(begin, end, m, tok.re, std::regex_constants::match_continuous) ||
            m.length(0) == 0) {
            note_failure(pos_, tok.rule.name);
            return std::nullopt;
        }
        TokenValue v{m.str(0), pos_at(pos_)};
        pos_ += static_cast<std::size_t>(m.length(0));
        return v;
    }

    std::shared_ptr<AstNode> parse_production(const ProdEntry& prod, int depth) {
        if (depth > opts_.max_depth) {
            set_abort(error_at("RecursionLimit", "parse nesting exceeds limit", pos_at(pos_)));
            return nullptr;
        }
        skip();
        auto node = std::make_shared<AstNode>();
        node->production_name = prod.rule.name;
        node->origin_grammar = prod.origin;
        node->span_start = pos_at(pos_);
        std::size_t start = pos_;
        if (!parse_expr(*prod.rule.rhs, *node, depth)) {
            pos_ = start;
            return nullptr;
        }
        node->span_end = pos_at(pos_);
        return node;
    }

    bool parse_expr(const RhsExpr& e, AstNode& out, int depth) {
        if (abort_) return false;
        switch (e.kind) {
            case RhsExpr::Kind::Terminal:
                return match_terminal(e.text);

            case RhsExpr::Kind::TokenRef: {
                const CompiledToken* tok = grammar_->find_token(e.text);
                if (!tok) {
                    set_abort(error_at("UndefinedNonterminal",
                                       "token '" + e.text + "' is not defined in grammar '" +
                                           grammar_->root_name.qualified() + "'",
                                       pos_at(pos_)));
                    return false;
                }
                auto v = match_token(*tok);
                if (!v) return false;
                out.attributes.push_back({e.label(), AstValue{AstValue::Kind::Token, *v, nullptr, {}}});
                return true;
            }

            case RhsExpr::Kind::NonterminalRef:
                return parse_ref_into(e.text, e.label(), out, depth);

            case RhsExpr::Kind::Sequence: {
                std::size_t save_pos = pos_;
                std::size_t save_attrs = out.attributes.size();
                for (const auto& c : e.children) {
                    if (!parse_expr(*c, out, depth)) {
                        pos_ = save_pos;
                        out.attributes.resize(save_attrs);
                        return false;
                    }
                }
                return true;
            }

            case RhsExpr::Kind::OrderedChoice: {
                std::size_t save_pos = pos_;
                std::size_t save_attrs = out.attributes.size();
                for (const auto& alt : e.children) {
                    if (parse_expr(*alt, out, depth)) return true;
                    if (abort_) return false;
                    pos_ = save_pos;
                    out.attributes.resize(save_attrs);
                }
                return false;
            }

            case RhsExpr::Kind::Optional: {
                std::size_t save_pos = pos_;
                std::size_t save_attrs = out.attributes.size();
                if (!parse_expr(*e.children[0], out, depth)) {
                    if (abort_) return false;
                    pos_ = save_pos;
                    out.attributes.resize(save_attrs);
                }
                return true;
            }

            case RhsExpr::Kind::Repetition: {
                if (is_single_nt_repetition(e)) return parse_list_repetition(e, out, depth);
                int count = 0;
                while (true) {
                    std::size_t save_pos = pos_;
                    std::size_t save_attrs = out.attributes.size();
                    if (!parse_expr(*e.children[0], out, depth)) {
                        if (abort_) return false;
                        pos_ = save_pos;
                        out.attributes.resize(save_attrs);
                        break;
                    }
                    if (pos_ == save_pos && out.attributes.size() == save_attrs) break; // no progress
                    ++count;
                }
                return count >= e.rep_min;
            }
        }
        return false;
    }

    // A repetition over one nonterminal reference always contributes exactly
    // one ChildList attribute, even when empty. References that resolve to a
    // token rule append one token attribute per iteration instead.
    bool parse_list_repetition(const RhsExpr& rep, AstNode& out, int depth) {
        const RhsExpr& ref = *rep.children[0];
        if (const CompiledToken* tok = grammar_->find_token(ref.text)) {
            int count = 0;
            while (true) {
                auto v = match_token(*tok);
                if (!v) break;
                out.attributes.push_back(
                    {ref.label(), AstValue{AstValue::Kind::Token, *v, nullptr, {}}});
                ++count;
            }
            return count >= rep.rep_min;
        }
        out.attributes.push_back({ref.label(), AstValue{AstValue::Kind::ChildList, {}, nullptr, {}}});
        AstValue& list = out.attributes.back().value;
        while (true) {
            std::size_t save_pos = pos_;
            AstNode scratch;
            if (!parse_ref_into(ref.text, ref.label(), scratch, depth)) {
                if (abort_) return false;
                pos_ = save_pos;
                break;
            }
            if (scratch.attributes.empty()) break;
            if (pos_ == save_pos) break; // empty match; stop instead of looping
            const AstValue& v = scratch.attributes.front().value;
            list.children.push_back(v.child);
        }
        if (static_cast<int>(list.children.size()) < rep.rep_min) {
            // Make failure visible to the enclosing sequence.
            return false;
        }
        return true;
    }

    // Resolves a reference: token, dispatched production, or bound external.
    bool parse_ref_into(const std::string& target, const std::string& label, AstNode& out,
                        int depth) {
        if (abort_) return false;
        if (const CompiledToken* tok = grammar_->find_token(target)) {
            auto v = match_token(*tok);
            if (!v) return false;
            out.attributes.push_back({label, AstValue{AstValue::Kind::Token, *v, nullptr, {}}});
            return true;
        }

        const ProdEntry* entry = grammar_->find(target);
        if (!entry) {
            set_abort(error_at("UndefinedNonterminal",
                               "reference to undefined nonterminal '" + target + "' in grammar '" +
                                   grammar_->root_name.qualified() + "'",
                               pos_at(pos_)));
            return false;
        }

        if (entry->rule.flavor == Flavor::External) return parse_external(*entry, label, out, depth);

        std::vector<const ProdEntry*> candidates = grammar_->dispatch_for(target);
        if (candidates.empty()) {
            skip();
            note_failure(pos_, entry->rule.name);
            return false;
        }
        for (const ProdEntry* cand : candidates) {
            std::shared_ptr<AstNode> node = parse_production(*cand, depth + 1);
            if (abort_) return false;
            if (node) {
                out.attributes.push_back(
                    {label, AstValue{AstValue::Kind::Child, {}, std::move(node), {}}});
                return true;
            }
        }
        return false;
    }

    bool parse_external(const ProdEntry& ext, const std::string& label, AstNode& out, int depth) {
        auto it = lang_.external_delegates.find(ext.rule.name);
        if (it == lang_.external_delegates.end() || it->second.empty()) {
            skip();
            set_abort(error_at("UnboundExternalReached",
                               "external production '" + ext.rule.name +
                                   "' was reached but is not bound to any guest production",
                               pos_at(pos_)));
            return false;
        }
        for (const BoundLanguage::Delegate& d : it->second) {
            const ComposedGrammar* saved = grammar_;
            grammar_ = d.grammar.get(); // lexical handoff: guest token set
            AstNode scratch;
            bool ok = parse_ref_into(d.production, label, scratch, depth);
            grammar_ = saved;
            if (abort_) return false;
            if (ok) {
                out.attributes.push_back(std::move(scratch.attributes.front()));
                return true;
            }
        }
        return false;
    }
};

} // namespace

Result<AstNodePtr> parse_model(const BoundLanguage& lang, const std::string& text,
                               const std::string& artifact_path, const ParseOptions& opts) {
    return ModelParser(lang, text, artifact_path, opts).run();
}

} // namespace lw
