#ifndef LW_GRAMMAR_HPP
#define LW_GRAMMAR_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lw/diagnostics.hpp"
#include "lw/names.hpp"

namespace lw {

// ---------------------------------------------------------------------------
// Grammar model
//
// Artifact syntax (.mcg):
//
//   package a.b ;                       // optional; or embed in the name
//   grammar a.b.Name extends c.Parent {
//     start Component ;                 // points at a (possibly inherited) rule
//     token QN = "[A-Za-z_][A-Za-z0-9_]*(\\.[A-Za-z_][A-Za-z0-9_]*)*" ;
//     external Body ;
//     interface Element ;
//     abstract Base = ... ;
//     start Root = ... ;                // start marker on a production
//     Port implements Element = "port" direction:DIR Type:QN Name:ID ";" ;
//   }
//
// RHS notation: "lit" terminals, `Name` references, `label:Name` labeled
// references, ( ) grouping, | ordered choice, postfix * + ?.
// ID, INT and STRING are predeclared tokens in every grammar.
// ---------------------------------------------------------------------------

enum class Flavor { Normal, Abstract, Interface, External };

std::string flavor_name(Flavor f);

struct RhsExpr;
using RhsPtr = std::shared_ptr<const RhsExpr>;

struct RhsExpr {
    enum class Kind { Terminal, NonterminalRef, TokenRef, Sequence, OrderedChoice, Repetition, Optional };

    Kind kind;
    // Terminal: the literal text. NonterminalRef/TokenRef: the target name
    // (may be dotted for qualified production references).
    std::string text;
    std::optional<std::string> attr_label; // refs only; defaults to target
    std::vector<RhsPtr> children;          // sequence/choice members, or the single inner
    int rep_min = 0;                       // Repetition: 0 (*) or 1 (+)
    SourcePos pos;

    /// Effective attribute label: explicit label or the target name.
    const std::string& label() const { return attr_label ? *attr_label : text; }
};

RhsPtr make_terminal(std::string lit, SourcePos pos);
RhsPtr make_nonterminal(std::string target, std::optional<std::string> label, SourcePos pos);
RhsPtr make_token_ref(std::string token, std::optional<std::string> label, SourcePos pos);
RhsPtr make_sequence(std::vector<RhsPtr> elems, SourcePos pos);
RhsPtr make_choice(std::vector<RhsPtr> alts, SourcePos pos);
RhsPtr make_repetition(RhsPtr inner, int min, SourcePos pos);
RhsPtr make_optional(RhsPtr inner, SourcePos pos);

struct TokenRule {
    std::string name;
    std::string pattern; // ECMAScript regular expression
    SourcePos pos;
};

struct ProductionRule {
    std::string name;
    Flavor flavor = Flavor::Normal;
    std::optional<std::string> extends_production;
    std::vector<std::string> implements_list;
    RhsPtr rhs; // absent for Interface and External
    SourcePos pos;
};

struct GrammarModel {
    GrammarName name;
    std::optional<GrammarName> extends_grammar;
    std::optional<std::string> start_production;
    std::vector<ProductionRule> productions;
    std::vector<TokenRule> tokens;

    const ProductionRule* find_production(const std::string& name) const;
    const TokenRule* find_token(const std::string& name) const;
    /// Explicit start, else the first Normal production, else nullopt.
    std::optional<std::string> effective_start() const;
};

/// ID, INT and STRING, predeclared in every grammar.
const std::vector<TokenRule>& builtin_tokens();
bool is_builtin_token(const std::string& name);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Result<GrammarModel> parse_grammar(const std::string& text, const std::string& artifact_path);

/// Well-formedness checks over g given its resolved transitive parents
/// (nearest parent first). Violations are returned, never thrown.
std::vector<Finding> validate_grammar(const GrammarModel& g,
                                      const std::vector<const GrammarModel*>& resolved_parents);

/// Canonical text form; parse_grammar(print_grammar(g)) is structurally
/// equal to g.
std::string print_grammar(const GrammarModel& g);
std::string print_rhs(const RhsExpr& e);

bool structurally_equal(const RhsExpr& a, const RhsExpr& b);
bool structurally_equal(const ProductionRule& a, const ProductionRule& b);
bool structurally_equal(const GrammarModel& a, const GrammarModel& b);

// ---------------------------------------------------------------------------
// Grammar lookup
// ---------------------------------------------------------------------------

using GrammarModelPtr = std::shared_ptr<const GrammarModel>;
using GrammarLoader = std::function<Result<GrammarModelPtr>(const GrammarName&)>;

/// Loads grammars from `<root>/<package dirs>/<SimpleName>.mcg` over a list
/// of search roots, caching parsed models. Parse findings surface through
/// the returned Result.
class GrammarRepository {
public:
    explicit GrammarRepository(std::vector<std::string> search_roots);

    Result<GrammarModelPtr> load(const GrammarName& name);
    /// Registers an in-memory grammar (used by tests).
    void add(GrammarModel g);

    GrammarLoader loader();

private:
    std::vector<std::string> roots_;
    std::map<std::string, GrammarModelPtr> cache_;
};

} // namespace lw

#endif
