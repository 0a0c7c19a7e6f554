#ifndef LW_COMPOSE_HPP
#define LW_COMPOSE_HPP

#include <map>
#include <memory>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "lw/grammar.hpp"

namespace lw {

/// Token rule with its compiled pattern and the grammar that declared it.
struct CompiledToken {
    TokenRule rule;
    GrammarName origin;
    std::regex re;
};

/// One production in a flattened grammar along with its provenance.
struct ProdEntry {
    ProductionRule rule;
    GrammarName origin;       // grammar that declared the retained rule
    int depth = 0;            // 0 = most derived grammar in the chain
    int decl_index = 0;       // declaration order within its grammar
    std::string qualified_key; // "<origin qualified>.<name>"
};

/// Result of flattening an extends chain. Production overriding is total:
/// a name defined by both child and parent keeps only the child's rule.
struct ComposedGrammar {
    GrammarName root_name;
    std::map<std::string, ProdEntry> production_table;          // by qualified key
    std::map<std::string, std::string> name_index;              // simple name -> qualified key
    // For each referencable name: the normal productions usable there, most
    // derived grammar first, in declaration order, the named rule itself after
    // extenders of its own grammar.
    std::map<std::string, std::vector<std::string>> dispatch_table; // simple name -> qualified keys
    std::map<std::string, CompiledToken> tokens;                 // effective set incl. built-ins
    std::set<std::string> unbound_externals;                     // external production simple names
    std::string start_production;                                // simple name; empty if none

    const ProdEntry* find(const std::string& simple_or_qualified) const;
    std::vector<const ProdEntry*> dispatch_for(const std::string& name) const;
    const CompiledToken* find_token(const std::string& name) const;
};

using ComposedGrammarPtr = std::shared_ptr<const ComposedGrammar>;

Result<ComposedGrammar> flatten_inheritance(const GrammarModel& g, const GrammarLoader& loader);

// ---------------------------------------------------------------------------
// Language configuration (.lcfg) and embedding
// ---------------------------------------------------------------------------

struct EmbeddingBinding {
    std::string host_external;  // External production name in the composed host
    GrammarName guest_grammar;
    std::string guest_production;
    SourcePos pos;
};

struct LanguageConfiguration {
    std::string language_name;
    std::string file_extension; // begins with "."
    GrammarName host_grammar;
    std::vector<EmbeddingBinding> bindings; // order = alternative order at parse time
};

Result<LanguageConfiguration> parse_language_configuration(const std::string& text,
                                                           const std::string& artifact_path);

/// A composed host grammar with its external productions bound to guest
/// productions. Unbound externals are permitted; reaching one at parse time
/// is an error.
struct BoundLanguage {
    ComposedGrammarPtr host;

    struct Delegate {
        ComposedGrammarPtr grammar;
        std::string production; // simple name within the guest
    };
    // external name -> delegates in binding order; shared across host and
    // transitively embedded guests
    std::map<std::string, std::vector<Delegate>> external_delegates;

    /// All grammars of the language: host first, then guests in first-use order.
    std::vector<ComposedGrammarPtr> grammars;

    std::set<std::string> unbound_externals;

    const ComposedGrammar* grammar_named(const std::string& qualified) const;
    /// Token rules per grammar (the engine switches sets at embedding
    /// boundaries).
    std::map<std::string, const std::map<std::string, CompiledToken>*> token_set_per_grammar() const;
};

Result<BoundLanguage> bind_embeddings(ComposedGrammarPtr host, const LanguageConfiguration& cfg,
                                      const GrammarLoader& loader);

} // namespace lw

#endif
