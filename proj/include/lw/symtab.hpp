#ifndef LW_SYMTAB_HPP
#define LW_SYMTAB_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lw/engine.hpp"

namespace lw {

/// Entry kind, rendered "<languageId>.<kindName>", e.g. cd.Type.
struct Kind {
    std::string language_id;
    std::string kind_name;

    std::string render() const { return language_id + "." + kind_name; }
    auto operator<=>(const Kind&) const = default;
    bool operator==(const Kind&) const = default;
};

Kind kind_from(const std::string& rendered);

/// Unresolved reference to another entry by name.
struct NameRef {
    std::string name;
    auto operator<=>(const NameRef&) const = default;
};

using AttrValue = std::variant<std::string, std::int64_t, bool, NameRef>;

enum class EntryState : std::uint8_t { Unqualified = 0, Qualified = 1, Full = 2 };

std::string entry_state_name(EntryState s);

class SymbolEntry;
using EntryPtr = std::shared_ptr<SymbolEntry>;

/// Declarative symbol adapter: presents entries of from_kind as entries of
/// to_kind. Attribute reads map to-side names to from-side names through
/// attribute_map (identity when absent). Children adapt lazily through
/// child_kind_map.
struct AdapterSpec {
    Kind from_kind;
    Kind to_kind;
    std::map<std::string, std::string> attribute_map;
    std::map<Kind, Kind> child_kind_map;
};

using AdapterSpecPtr = std::shared_ptr<const AdapterSpec>;

class AdapterRegistry {
public:
    /// Rejects a second spec for the same (from, to) pair.
    std::optional<Finding> add(AdapterSpec spec);
    const AdapterSpecPtr* find(const Kind& from, const Kind& to) const;
    /// Specs targeting `to`, in registration order. Adapters never chain.
    std::vector<AdapterSpecPtr> sources_for(const Kind& to) const;
    bool empty() const { return specs_.empty(); }

private:
    std::vector<AdapterSpecPtr> specs_;
};

/// A named model element. Entries move forward through the states
/// Unqualified -> Qualified -> Full and never back. An entry created by
/// adapt_entry delegates every read to its adaptee.
class SymbolEntry : public std::enable_shared_from_this<SymbolEntry> {
public:
    static EntryPtr make(Kind kind, std::string simple_name);

    const Kind& kind() const { return kind_; }
    const std::string& simple_name() const;
    std::optional<std::string> qualified_name() const;
    EntryState state() const;

    /// Advances Unqualified -> Qualified. The qualified name must end with
    /// the simple name; once set it never changes.
    void set_qualified_name(const std::string& qualified);
    /// Advances to Full.
    void mark_full();

    std::optional<AttrValue> attribute(const std::string& name) const;
    std::map<std::string, AttrValue> attributes() const;
    void set_attribute(const std::string& name, AttrValue v);

    std::vector<EntryPtr> children(std::vector<Finding>* findings = nullptr) const;
    void add_child(EntryPtr child);

    const EntryPtr& adapted_from() const { return adaptee_; }
    bool is_adapter() const { return adaptee_ != nullptr; }

    struct Origin {
        std::string model_id;
        std::optional<SourcePos> pos;
    };
    const Origin& origin() const;
    void set_origin(Origin o) { origin_ = std::move(o); }

private:
    friend EntryPtr adapt_entry(const EntryPtr&, const Kind&, const AdapterSpecPtr&);

    SymbolEntry(Kind kind, std::string simple_name);

    Kind kind_;
    std::string simple_name_;
    std::string qualified_name_; // empty until Qualified
    std::atomic<std::uint8_t> state_{0};
    std::map<std::string, AttrValue> attributes_;
    std::vector<EntryPtr> children_;
    Origin origin_;

    EntryPtr adaptee_;
    AdapterSpecPtr spec_;
};

bool entries_structurally_equal(const SymbolEntry& a, const SymbolEntry& b);

/// Wraps `entry` as an entry of target_kind delegating all reads.
/// Precondition: spec->from_kind == entry->kind() and spec->to_kind ==
/// target_kind.
EntryPtr adapt_entry(const EntryPtr& entry, const Kind& target_kind, const AdapterSpecPtr& spec);

// ---------------------------------------------------------------------------
// Namespaces
// ---------------------------------------------------------------------------

struct TableKey {
    std::string name;
    Kind kind;
    auto operator<=>(const TableKey&) const = default;
};

class NamespaceNode {
public:
    std::string name; // segment; the root may carry a dotted package name
    NamespaceNode* parent = nullptr;
    std::vector<std::unique_ptr<NamespaceNode>> children;
    std::vector<std::string> imports;
    std::map<TableKey, std::vector<EntryPtr>> table;
    std::set<TableKey> hidden_imports;

    NamespaceNode& add_child(std::string child_name);
    void add_entry(const EntryPtr& e);
    std::string qualified_name() const;
    const NamespaceNode& root() const;

    const std::vector<EntryPtr>* lookup(const TableKey& key) const;
    /// All namespaces in this subtree with the given qualified name.
    void find_by_qualified(const std::string& qualified, std::vector<const NamespaceNode*>& out) const;
};

using NamespacePtr = std::unique_ptr<NamespaceNode>;

// ---------------------------------------------------------------------------
// Entry creation
// ---------------------------------------------------------------------------

/// Declarative rule: when a node of the given production is visited, create
/// an entry named by one of its token attributes. Child rules apply within
/// the node's subtree and attach their entries as children.
struct EntryCreationRule {
    GrammarName grammar;
    std::string production;
    Kind creates_kind;
    std::string name_from_attribute;
    bool opens_namespace = false;
    std::vector<EntryCreationRule> child_rules;
};

class BuildContext {
public:
    NamespaceNode& root();
    NamespaceNode& current();
    void set_root_namespace_name(const std::string& dotted);
    void add_import(const std::string& dotted);
    const std::string& model_id() const;
    void report(Finding f);

private:
    friend struct NamespaceBuilder;
    BuildContext(NamespaceNode& root, NamespaceNode*& current, std::string model_id,
                 std::vector<Finding>& findings);
    NamespaceNode& root_;
    NamespaceNode*& current_;
    std::string model_id_;
    std::vector<Finding>& findings_;
};

/// Programmatic escape hatch for what the declarative rules cannot express.
/// Keyed by "<grammar qualified>.<Production>"; runs before rule matching.
struct BuildHooks {
    std::map<std::string, std::function<void(const AstNode&, BuildContext&)>> node_hooks;
};

/// Hook that reads a model's package and import declarations off the root
/// node ("Package" / "Import" token attributes by default).
std::function<void(const AstNode&, BuildContext&)> model_header_hook(
    std::string package_attr = "Package", std::string import_attr = "Import");

struct BuildResult {
    NamespacePtr root;
    std::vector<Finding> findings;
};

BuildResult build_namespaces(const AstNode& ast, const std::vector<EntryCreationRule>& rules,
                             const std::string& model_id, const BuildHooks* hooks = nullptr);

/// Marks imported entries hidden by same-key local definitions, recursively.
void compute_shadowing(NamespaceNode& ns);

// ---------------------------------------------------------------------------
// Qualification and resolution
// ---------------------------------------------------------------------------

class FamilyIndex; // symfile.hpp
class ModelRepository;

/// Advances an entry to at least Qualified. Idempotent on Qualified/Full
/// entries. Candidates come from the enclosing namespace chain and import
/// prefixes, filtered against locally known entries and the family index.
Result<EntryPtr> qualify(const EntryPtr& entry, const NamespaceNode& ns, const FamilyIndex& index);

/// Name resolution: local table (native kind first, then adaptable kinds),
/// non-hidden imports, parent namespaces, then symbol files located through
/// the repository. Returns a Full entry.
Result<EntryPtr> resolve(const std::string& name, const Kind& kind, const NamespaceNode& from,
                         ModelRepository* repo, const AdapterRegistry& adapters,
                         const SourcePos& at = {});

} // namespace lw

#endif
