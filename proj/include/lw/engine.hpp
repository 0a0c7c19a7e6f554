#ifndef LW_ENGINE_HPP
#define LW_ENGINE_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lw/compose.hpp"

namespace lw {

struct AstNode;
using AstNodePtr = std::shared_ptr<const AstNode>;

struct TokenValue {
    std::string text;
    SourcePos pos;
};

/// Attribute value: a matched token, one child node, or a child list
/// (repetitions over a single nonterminal reference).
struct AstValue {
    enum class Kind { Token, Child, ChildList };
    Kind kind = Kind::Token;
    TokenValue token;
    AstNodePtr child;
    std::vector<AstNodePtr> children;
};

struct AstAttribute {
    std::string label;
    AstValue value;
};

/// One node per matched production. Attribute order mirrors the match order
/// of the production's references; terminals do not appear.
struct AstNode {
    std::string production_name;
    GrammarName origin_grammar;
    std::vector<AstAttribute> attributes;
    SourcePos span_start;
    SourcePos span_end;

    const AstAttribute* attr(const std::string& label) const;
    /// Token text of the named attribute, or nullptr.
    const TokenValue* token_attr(const std::string& label) const;
};

struct ParseOptions {
    /// Overrides the composed grammar's start production (simple name).
    std::string start_production;
    /// Backtracking recursion guard.
    int max_depth = 4096;
};

Result<AstNodePtr> parse_model(const BoundLanguage& lang, const std::string& text,
                               const std::string& artifact_path, const ParseOptions& opts = {});

/// Emits token texts and production terminals in RHS order, single-space
/// separated, newline after ';' and '}'.
Result<std::string> pretty_print(const AstNode& node, const BoundLanguage& lang);

/// Depth-first pre-order traversal; `pre` runs before a node's children,
/// `post` (optional) after.
void walk(const AstNode& root, const std::function<void(const AstNode&)>& pre,
          const std::function<void(const AstNode&)>& post = nullptr);

/// Structural tree equality ignoring spans and token positions.
bool ast_equal_ignoring_spans(const AstNode& a, const AstNode& b);

/// Exact equality including spans.
bool ast_equal(const AstNode& a, const AstNode& b);

} // namespace lw

#endif
