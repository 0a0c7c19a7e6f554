#include <sstream>

#include "lw/render.hpp"

#include <json.hpp>

using ordered_json = nlohmann::ordered_json;

namespace lw {

namespace {

ordered_json pos_json(const SourcePos& p) {
    ordered_json j;
    j["line"] = p.line;
    j["col"] = p.col;
    return j;
}

ordered_json node_json(const AstNode& n) {
    ordered_json j;
    j["production"] = n.production_name;
    j["grammar"] = n.origin_grammar.qualified();
    ordered_json attrs = ordered_json::array();
    for (const auto& a : n.attributes) {
        ordered_json aj;
        aj["label"] = a.label;
        switch (a.value.kind) {
            case AstValue::Kind::Token:
                aj["token"] = a.value.token.text;
                aj["pos"] = pos_json(a.value.token.pos);
                break;
            case AstValue::Kind::Child:
                aj["child"] = node_json(*a.value.child);
                break;
            case AstValue::Kind::ChildList: {
                ordered_json list = ordered_json::array();
                for (const auto& c : a.value.children) list.push_back(node_json(*c));
                aj["children"] = std::move(list);
                break;
            }
        }
        attrs.push_back(std::move(aj));
    }
    j["attributes"] = std::move(attrs);
    ordered_json span;
    span["start"] = pos_json(n.span_start);
    span["end"] = pos_json(n.span_end);
    j["span"] = std::move(span);
    return j;
}

ordered_json finding_json(const Finding& f) {
    ordered_json j;
    j["severity"] = severity_name(f.severity);
    j["code"] = f.code;
    j["message"] = f.message;
    j["path"] = f.pos.path;
    j["line"] = f.pos.line;
    j["col"] = f.pos.col;
    return j;
}

} // namespace

std::string ast_to_json(const AstNode& root) { return node_json(root).dump(2) + "\n"; }

std::string report_to_json(const FamilyReport& report) {
    ordered_json j;
    ordered_json models = ordered_json::array();
    for (const auto& m : report.per_model) {
        ordered_json mj;
        mj["path"] = m.path;
        mj["parseOk"] = m.parse_ok;
        ordered_json fs = ordered_json::array();
        for (const auto& f : m.findings) fs.push_back(finding_json(f));
        mj["findings"] = std::move(fs);
        models.push_back(std::move(mj));
    }
    j["models"] = std::move(models);
    ordered_json cross = ordered_json::array();
    for (const auto& f : report.cross_findings) cross.push_back(finding_json(f));
    j["findings"] = std::move(cross);
    ordered_json files = ordered_json::array();
    for (const auto& p : report.symbol_files_written) files.push_back(p);
    j["symbolFiles"] = std::move(files);
    j["status"] = report.has_error ? "error" : "ok";
    return j.dump(2) + "\n";
}

namespace {

// Children are listed by the namespace that holds them, not under the entry.
void list_entry(const SymbolEntry& e, int indent, std::ostringstream& os) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "entry " << e.kind().render()
       << " " << e.simple_name();
    if (auto q = e.qualified_name()) os << " [" << *q << "]";
    os << " (" << entry_state_name(e.state()) << ")\n";
}

void list_namespace(const NamespaceNode& ns, int indent, std::ostringstream& os) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "namespace "
       << (ns.name.empty() ? "<root>" : ns.name);
    if (!ns.imports.empty()) {
        os << " imports";
        for (const auto& i : ns.imports) os << " " << i;
    }
    os << "\n";
    for (const auto& [key, entries] : ns.table)
        for (const auto& e : entries) list_entry(*e, indent + 1, os);
    for (const auto& c : ns.children) list_namespace(*c, indent + 1, os);
}

} // namespace

std::string namespace_listing(const NamespaceNode& root) {
    std::ostringstream os;
    list_namespace(root, 0, os);
    return os.str();
}

} // namespace lw
