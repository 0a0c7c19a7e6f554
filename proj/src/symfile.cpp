#include <filesystem>
#include <fstream>
#include <sstream>

#include "lw/symfile.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace lw {

namespace {

ordered_json attr_to_json(const AttrValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    const NameRef& r = std::get<NameRef>(v);
    ordered_json j;
    j["$ref"] = r.name;
    return j;
}

std::optional<AttrValue> attr_from_json(const ordered_json& j) {
    if (j.is_string()) return AttrValue{j.get<std::string>()};
    if (j.is_number_integer()) return AttrValue{j.get<std::int64_t>()};
    if (j.is_boolean()) return AttrValue{j.get<bool>()};
    if (j.is_object() && j.contains("$ref") && j["$ref"].is_string())
        return AttrValue{NameRef{j["$ref"].get<std::string>()}};
    return std::nullopt;
}

bool exported(const Kind& k, const std::vector<Kind>& exported_kinds) {
    for (const auto& e : exported_kinds)
        if (e == k) return true;
    return false;
}

ordered_json entry_to_json(const SymbolEntry& e, const std::vector<Kind>* exported_kinds,
                           std::vector<Finding>& findings, bool& skipped) {
    if (e.state() < EntryState::Qualified) {
        findings.push_back(warning_at("UnqualifiedEntrySkipped",
                                      "entry '" + e.simple_name() + "' of kind " +
                                          e.kind().render() +
                                          " is unqualified and was not serialized",
                                      e.origin().pos.value_or(SourcePos{})));
        skipped = true;
        return {};
    }
    ordered_json j;
    j["kind"] = e.kind().render();
    j["name"] = e.simple_name();
    j["qualifiedName"] = e.qualified_name().value_or(e.simple_name());
    ordered_json attrs = ordered_json::object();
    for (const auto& [name, value] : e.attributes()) attrs[name] = attr_to_json(value);
    j["attributes"] = std::move(attrs);
    ordered_json children = ordered_json::array();
    for (const EntryPtr& c : e.children()) {
        if (exported_kinds && !exported(c->kind(), *exported_kinds)) continue;
        bool child_skipped = false;
        ordered_json cj = entry_to_json(*c, exported_kinds, findings, child_skipped);
        if (!child_skipped) children.push_back(std::move(cj));
    }
    j["children"] = std::move(children);
    skipped = false;
    return j;
}

Result<EntryPtr> entry_from_json(const ordered_json& j) {
    auto malformed = [](const std::string& what) {
        return Result<EntryPtr>::failure(
            error_at("MalformedSymbolFile", "entry record: " + what, SourcePos{}));
    };
    if (!j.is_object()) return malformed("not an object");
    if (!j.contains("kind") || !j["kind"].is_string()) return malformed("missing kind");
    if (!j.contains("name") || !j["name"].is_string()) return malformed("missing name");
    if (!j.contains("qualifiedName") || !j["qualifiedName"].is_string())
        return malformed("missing qualifiedName");

    EntryPtr e = SymbolEntry::make(kind_from(j["kind"].get<std::string>()),
                                   j["name"].get<std::string>());
    const std::string qualified = j["qualifiedName"].get<std::string>();
    const std::string& simple = e->simple_name();
    if (qualified.size() < simple.size() ||
        qualified.compare(qualified.size() - simple.size(), simple.size(), simple) != 0)
        return malformed("qualifiedName does not end with name");
    e->set_qualified_name(qualified);

    if (j.contains("attributes")) {
        if (!j["attributes"].is_object()) return malformed("attributes is not an object");
        for (const auto& [name, value] : j["attributes"].items()) {
            auto v = attr_from_json(value);
            if (!v) return malformed("unsupported attribute value for '" + name + "'");
            e->set_attribute(name, std::move(*v));
        }
    }
    if (j.contains("children")) {
        if (!j["children"].is_array()) return malformed("children is not an array");
        for (const auto& cj : j["children"]) {
            Result<EntryPtr> c = entry_from_json(cj);
            if (!c.ok()) return c;
            e->add_child(*c.value);
        }
    }
    e->mark_full();
    return Result<EntryPtr>::success(std::move(e));
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace

EntryPtr SymbolFile::find_entry(const std::string& qualified_name) const {
    std::function<EntryPtr(const EntryPtr&)> search = [&](const EntryPtr& e) -> EntryPtr {
        if (e->qualified_name() == qualified_name) return e;
        for (const EntryPtr& c : e->children())
            if (EntryPtr hit = search(c)) return hit;
        return nullptr;
    };
    for (const EntryPtr& e : entries)
        if (EntryPtr hit = search(e)) return hit;
    return nullptr;
}

Result<std::string> serialize_symbols(const NamespaceNode& root, const std::string& model_id,
                                      const std::string& language_id,
                                      const std::vector<Kind>& exported_kinds) {
    std::vector<Finding> findings;
    ordered_json j;
    j["modelId"] = model_id;
    j["languageId"] = language_id;
    j["rootNamespace"] = root.name;
    ordered_json entries = ordered_json::array();
    for (const auto& [key, list] : root.table) {
        if (!exported(key.kind, exported_kinds)) continue;
        for (const EntryPtr& e : list) {
            bool skipped = false;
            ordered_json ej = entry_to_json(*e, &exported_kinds, findings, skipped);
            if (!skipped) entries.push_back(std::move(ej));
        }
    }
    j["entries"] = std::move(entries);
    Result<std::string> r = Result<std::string>::success(dump(j));
    r.findings = std::move(findings);
    return r;
}

std::string serialize_symbol_file(const SymbolFile& file) {
    std::vector<Finding> findings;
    ordered_json j;
    j["modelId"] = file.model_id;
    j["languageId"] = file.language_id;
    j["rootNamespace"] = file.root_namespace_name;
    ordered_json entries = ordered_json::array();
    for (const EntryPtr& e : file.entries) {
        bool skipped = false;
        ordered_json ej = entry_to_json(*e, nullptr, findings, skipped);
        if (!skipped) entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    return dump(j);
}

Result<SymbolFile> deserialize_symbols(const std::string& bytes) {
    ordered_json j = ordered_json::parse(bytes, nullptr, false);
    auto malformed = [](const std::string& what) {
        return Result<SymbolFile>::failure(
            error_at("MalformedSymbolFile", what, SourcePos{}));
    };
    if (j.is_discarded()) return malformed("not valid JSON");
    if (!j.is_object()) return malformed("top level is not an object");
    for (const char* key : {"modelId", "languageId", "rootNamespace"})
        if (!j.contains(key) || !j[key].is_string())
            return malformed(std::string("missing string field '") + key + "'");
    if (!j.contains("entries") || !j["entries"].is_array())
        return malformed("missing entries array");

    SymbolFile file;
    file.model_id = j["modelId"].get<std::string>();
    file.language_id = j["languageId"].get<std::string>();
    file.root_namespace_name = j["rootNamespace"].get<std::string>();
    for (const auto& ej : j["entries"]) {
        Result<EntryPtr> e = entry_from_json(ej);
        if (!e.ok()) return Result<SymbolFile>::failure(std::move(e.findings));
        file.entries.push_back(*e.value);
    }
    return Result<SymbolFile>::success(std::move(file));
}

// ---------------------------------------------------------------------------
// FamilyIndex
// ---------------------------------------------------------------------------

bool FamilyIndex::add(const std::string& qualified_name, const Kind& kind,
                      const std::string& rel_path) {
    return entries_.emplace(qualified_name + "#" + kind.render(), rel_path).second;
}

std::optional<std::string> FamilyIndex::lookup(const std::string& qualified_name,
                                               const Kind& kind) const {
    auto it = entries_.find(qualified_name + "#" + kind.render());
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<FamilyIndex::Key> FamilyIndex::keys() const {
    std::vector<Key> out;
    for (const auto& [key, path] : entries_) {
        auto hash = key.rfind('#');
        Key k;
        k.qualified_name = key.substr(0, hash);
        k.kind = kind_from(key.substr(hash + 1));
        k.simple_name = split_dotted(k.qualified_name).back();
        out.push_back(std::move(k));
    }
    return out;
}

std::string FamilyIndex::serialize() const {
    ordered_json j = ordered_json::object();
    for (const auto& [key, path] : entries_) j[key] = path;
    return dump(j);
}

Result<FamilyIndex> FamilyIndex::deserialize(const std::string& bytes) {
    ordered_json j = ordered_json::parse(bytes, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return Result<FamilyIndex>::failure(
            error_at("MalformedSymbolFile", "family index is not a JSON object", SourcePos{}));
    FamilyIndex idx;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string())
            return Result<FamilyIndex>::failure(
                error_at("MalformedSymbolFile", "family index value for '" + key + "' is not a path",
                         SourcePos{}));
        idx.entries_[key] = value.get<std::string>();
    }
    return Result<FamilyIndex>::success(std::move(idx));
}

// ---------------------------------------------------------------------------
// ModelRepository
// ---------------------------------------------------------------------------

ModelRepository::ModelRepository(FamilyIndex index, std::string base_dir)
    : index_(std::move(index)), base_dir_(std::move(base_dir)) {}

std::optional<std::string> ModelRepository::index_lookup(const std::string& qualified_name,
                                                         const Kind& kind) {
    index_lookup_count_.fetch_add(1, std::memory_order_relaxed);
    return index_.lookup(qualified_name, kind);
}

Result<std::shared_ptr<const SymbolFile>> ModelRepository::load(const std::string& rel_path) {
    std::lock_guard<std::mutex> lock(mutex_); // single-flight per file
    load_count_.fetch_add(1, std::memory_order_relaxed);
    if (auto it = cache_.find(rel_path); it != cache_.end())
        return Result<std::shared_ptr<const SymbolFile>>::success(it->second);

    file_read_count_.fetch_add(1, std::memory_order_relaxed);
    fs::path full = fs::path(base_dir_) / rel_path;
    std::ifstream in(full, std::ios::binary);
    if (!in) {
        return Result<std::shared_ptr<const SymbolFile>>::failure(
            error_at("SymbolFileMissing", "cannot open symbol file " + full.generic_string(),
                     SourcePos{}));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    Result<SymbolFile> file = deserialize_symbols(buf.str());
    if (!file.ok())
        return Result<std::shared_ptr<const SymbolFile>>::failure(std::move(file.findings));
    auto ptr = std::make_shared<const SymbolFile>(std::move(*file.value));
    cache_[rel_path] = ptr;
    return Result<std::shared_ptr<const SymbolFile>>::success(ptr);
}

} // namespace lw
