#ifndef LW_SYMFILE_HPP
#define LW_SYMFILE_HPP

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lw/symtab.hpp"

namespace lw {

/// Deserialized symbol file. Every contained entry is at state Full.
struct SymbolFile {
    std::string model_id;
    std::string language_id;
    std::string root_namespace_name;
    std::vector<EntryPtr> entries;

    EntryPtr find_entry(const std::string& qualified_name) const;
};

/// Serializes the exported entries of a namespace tree (JSON, stable key
/// order: kind, name, qualifiedName, attributes, children). Entries whose
/// kind is not exported are skipped along with their subtrees; Unqualified
/// entries are skipped with a warning.
Result<std::string> serialize_symbols(const NamespaceNode& root, const std::string& model_id,
                                      const std::string& language_id,
                                      const std::vector<Kind>& exported_kinds);

/// Canonical re-emission of a deserialized file; deserialize-then-serialize
/// is byte-identical.
std::string serialize_symbol_file(const SymbolFile& file);

Result<SymbolFile> deserialize_symbols(const std::string& bytes);

// ---------------------------------------------------------------------------
// Family index and repository
// ---------------------------------------------------------------------------

/// Maps "<qualifiedName>#<kind>" to the relative path of the exporting
/// symbol file (family.symindex).
class FamilyIndex {
public:
    /// Returns false when the key was already present.
    bool add(const std::string& qualified_name, const Kind& kind, const std::string& rel_path);
    std::optional<std::string> lookup(const std::string& qualified_name, const Kind& kind) const;

    struct Key {
        std::string qualified_name;
        std::string simple_name;
        Kind kind;
    };
    std::vector<Key> keys() const;

    bool empty() const { return entries_.empty(); }
    std::string serialize() const;
    static Result<FamilyIndex> deserialize(const std::string& bytes);

private:
    std::map<std::string, std::string> entries_;
};

/// Loads symbol files named by the family index, caching by path. Loads of
/// the same file are serialized; loaded files are immutable and may be read
/// concurrently. Counters support the level-isolation checks.
class ModelRepository {
public:
    ModelRepository(FamilyIndex index, std::string base_dir);

    /// Index lookup (counted) for one qualified name and kind.
    std::optional<std::string> index_lookup(const std::string& qualified_name, const Kind& kind);
    /// Loads (or returns the cached) symbol file at base_dir/rel_path.
    Result<std::shared_ptr<const SymbolFile>> load(const std::string& rel_path);

    const FamilyIndex& index() const { return index_; }
    int load_count() const { return load_count_; }
    int file_read_count() const { return file_read_count_; }
    int index_lookup_count() const { return index_lookup_count_; }

private:
    FamilyIndex index_;
    std::string base_dir_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const SymbolFile>> cache_;
    std::atomic<int> load_count_{0};
    std::atomic<int> file_read_count_{0};
    std::atomic<int> index_lookup_count_{0};
};

} // namespace lw

#endif
