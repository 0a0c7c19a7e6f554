#include <algorithm>
#include <cassert>

#include "lw/symtab.hpp"

namespace lw {

Kind kind_from(const std::string& rendered) {
    auto dot = rendered.find('.');
    if (dot == std::string::npos) return Kind{"", rendered};
    return Kind{rendered.substr(0, dot), rendered.substr(dot + 1)};
}

std::string entry_state_name(EntryState s) {
    switch (s) {
        case EntryState::Unqualified: return "unqualified";
        case EntryState::Qualified: return "qualified";
        case EntryState::Full: return "full";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// AdapterRegistry
// ---------------------------------------------------------------------------

std::optional<Finding> AdapterRegistry::add(AdapterSpec spec) {
    if (find(spec.from_kind, spec.to_kind)) {
        return error_at("DuplicateAdapter",
                        "adapter " + spec.from_kind.render() + " -> " + spec.to_kind.render() +
                            " is already registered",
                        SourcePos{});
    }
    specs_.push_back(std::make_shared<const AdapterSpec>(std::move(spec)));
    return std::nullopt;
}

const AdapterSpecPtr* AdapterRegistry::find(const Kind& from, const Kind& to) const {
    for (const auto& s : specs_)
        if (s->from_kind == from && s->to_kind == to) return &s;
    return nullptr;
}

std::vector<AdapterSpecPtr> AdapterRegistry::sources_for(const Kind& to) const {
    std::vector<AdapterSpecPtr> out;
    for (const auto& s : specs_)
        if (s->to_kind == to) out.push_back(s);
    return out;
}

// ---------------------------------------------------------------------------
// SymbolEntry
// ---------------------------------------------------------------------------

SymbolEntry::SymbolEntry(Kind kind, std::string simple_name)
    : kind_(std::move(kind)), simple_name_(std::move(simple_name)) {}

EntryPtr SymbolEntry::make(Kind kind, std::string simple_name) {
    return EntryPtr(new SymbolEntry(std::move(kind), std::move(simple_name)));
}

const std::string& SymbolEntry::simple_name() const {
    return adaptee_ ? adaptee_->simple_name() : simple_name_;
}

std::optional<std::string> SymbolEntry::qualified_name() const {
    if (adaptee_) return adaptee_->qualified_name();
    if (qualified_name_.empty()) return std::nullopt;
    return qualified_name_;
}

EntryState SymbolEntry::state() const {
    if (adaptee_) return adaptee_->state();
    return static_cast<EntryState>(state_.load(std::memory_order_acquire));
}

namespace {
// Forward-only state advance; demotion attempts are ignored.
void advance_state(std::atomic<std::uint8_t>& state, EntryState target) {
    std::uint8_t want = static_cast<std::uint8_t>(target);
    std::uint8_t cur = state.load(std::memory_order_relaxed);
    while (cur < want && !state.compare_exchange_weak(cur, want, std::memory_order_release)) {
    }
}
} // namespace

void SymbolEntry::set_qualified_name(const std::string& qualified) {
    if (adaptee_) {
        adaptee_->set_qualified_name(qualified);
        return;
    }
    if (!qualified_name_.empty()) return; // first qualification wins
    assert(qualified.size() >= simple_name_.size() &&
           qualified.compare(qualified.size() - simple_name_.size(), simple_name_.size(),
                             simple_name_) == 0);
    qualified_name_ = qualified;
    advance_state(state_, EntryState::Qualified);
}

void SymbolEntry::mark_full() {
    if (adaptee_) {
        adaptee_->mark_full();
        return;
    }
    advance_state(state_, EntryState::Full);
}

std::optional<AttrValue> SymbolEntry::attribute(const std::string& name) const {
    if (adaptee_) {
        auto it = spec_->attribute_map.find(name);
        return adaptee_->attribute(it == spec_->attribute_map.end() ? name : it->second);
    }
    auto it = attributes_.find(name);
    if (it == attributes_.end()) return std::nullopt;
    return it->second;
}

std::map<std::string, AttrValue> SymbolEntry::attributes() const {
    if (!adaptee_) return attributes_;
    // Present the adaptee's attributes under to-side names.
    std::map<std::string, std::string> reverse; // from-side -> to-side
    for (const auto& [to_name, from_name] : spec_->attribute_map) reverse[from_name] = to_name;
    std::map<std::string, AttrValue> out;
    for (const auto& [name, value] : adaptee_->attributes()) {
        auto it = reverse.find(name);
        out[it == reverse.end() ? name : it->second] = value;
    }
    return out;
}

void SymbolEntry::set_attribute(const std::string& name, AttrValue v) {
    if (adaptee_) {
        adaptee_->set_attribute(name, std::move(v));
        return;
    }
    attributes_[name] = std::move(v);
}

std::vector<EntryPtr> SymbolEntry::children(std::vector<Finding>* findings) const {
    if (!adaptee_) return children_;
    std::vector<EntryPtr> out;
    for (const EntryPtr& child : adaptee_->children(findings)) {
        auto it = spec_->child_kind_map.find(child->kind());
        if (it == spec_->child_kind_map.end()) {
            if (findings)
                findings->push_back(error_at(
                    "NoChildKindMapping",
                    "adapter " + spec_->from_kind.render() + " -> " + spec_->to_kind.render() +
                        " has no child mapping for kind " + child->kind().render(),
                    SourcePos{}));
            continue;
        }
        auto child_spec = std::make_shared<const AdapterSpec>(
            AdapterSpec{child->kind(), it->second, {}, spec_->child_kind_map});
        out.push_back(adapt_entry(child, it->second, child_spec));
    }
    return out;
}

void SymbolEntry::add_child(EntryPtr child) {
    if (adaptee_) {
        adaptee_->add_child(std::move(child));
        return;
    }
    children_.push_back(std::move(child));
}

const SymbolEntry::Origin& SymbolEntry::origin() const {
    return adaptee_ ? adaptee_->origin() : origin_;
}

EntryPtr adapt_entry(const EntryPtr& entry, const Kind& target_kind, const AdapterSpecPtr& spec) {
    assert(entry);
    assert(spec->from_kind == entry->kind());
    assert(spec->to_kind == target_kind);
    EntryPtr adapter(new SymbolEntry(target_kind, entry->simple_name()));
    adapter->adaptee_ = entry;
    adapter->spec_ = spec;
    return adapter;
}

bool entries_structurally_equal(const SymbolEntry& a, const SymbolEntry& b) {
    if (a.kind() != b.kind() || a.simple_name() != b.simple_name() ||
        a.qualified_name() != b.qualified_name() || a.attributes() != b.attributes())
        return false;
    auto ca = a.children();
    auto cb = b.children();
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (!entries_structurally_equal(*ca[i], *cb[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// NamespaceNode
// ---------------------------------------------------------------------------

NamespaceNode& NamespaceNode::add_child(std::string child_name) {
    auto child = std::make_unique<NamespaceNode>();
    child->name = std::move(child_name);
    child->parent = this;
    children.push_back(std::move(child));
    return *children.back();
}

void NamespaceNode::add_entry(const EntryPtr& e) {
    table[TableKey{e->simple_name(), e->kind()}].push_back(e);
}

std::string NamespaceNode::qualified_name() const {
    if (!parent) return name;
    std::string prefix = parent->qualified_name();
    if (prefix.empty()) return name;
    if (name.empty()) return prefix;
    return prefix + "." + name;
}

const NamespaceNode& NamespaceNode::root() const {
    const NamespaceNode* n = this;
    while (n->parent) n = n->parent;
    return *n;
}

const std::vector<EntryPtr>* NamespaceNode::lookup(const TableKey& key) const {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
}

void NamespaceNode::find_by_qualified(const std::string& qualified,
                                      std::vector<const NamespaceNode*>& out) const {
    if (qualified_name() == qualified) out.push_back(this);
    for (const auto& c : children) c->find_by_qualified(qualified, out);
}

// ---------------------------------------------------------------------------
// build_namespaces
// ---------------------------------------------------------------------------

BuildContext::BuildContext(NamespaceNode& root, NamespaceNode*& current, std::string model_id,
                           std::vector<Finding>& findings)
    : root_(root), current_(current), model_id_(std::move(model_id)), findings_(findings) {}

NamespaceNode& BuildContext::root() { return root_; }
NamespaceNode& BuildContext::current() { return *current_; }
void BuildContext::set_root_namespace_name(const std::string& dotted) { root_.name = dotted; }
void BuildContext::add_import(const std::string& dotted) { root_.imports.push_back(dotted); }
const std::string& BuildContext::model_id() const { return model_id_; }
void BuildContext::report(Finding f) { findings_.push_back(std::move(f)); }

std::function<void(const AstNode&, BuildContext&)> model_header_hook(std::string package_attr,
                                                                     std::string import_attr) {
    return [package_attr = std::move(package_attr),
            import_attr = std::move(import_attr)](const AstNode& node, BuildContext& ctx) {
        for (const auto& a : node.attributes) {
            if (a.value.kind != AstValue::Kind::Token) continue;
            if (a.label == package_attr) ctx.set_root_namespace_name(a.value.token.text);
            if (a.label == import_attr) ctx.add_import(a.value.token.text);
        }
    };
}

struct NamespaceBuilder {
    const std::vector<EntryCreationRule>& top_rules;
    const BuildHooks* hooks;
    std::string model_id;
    std::vector<Finding> findings;
    NamespaceNode* root = nullptr;
    NamespaceNode* current = nullptr;

    const EntryCreationRule* match(const std::vector<EntryCreationRule>& rules,
                                   const AstNode& node) const {
        for (const auto& r : rules)
            if (r.production == node.production_name &&
                r.grammar.qualified() == node.origin_grammar.qualified())
                return &r;
        return nullptr;
    }

    void visit(const AstNode& node, const std::vector<EntryCreationRule>& active,
               SymbolEntry* owner) {
        if (hooks) {
            auto it = hooks->node_hooks.find(node.origin_grammar.qualified() + "." +
                                             node.production_name);
            if (it != hooks->node_hooks.end()) {
                BuildContext ctx(*root, current, model_id, findings);
                it->second(node, ctx);
            }
        }

        // Scoped child rules first, then the member-wide rule set, so that
        // rules of embedded or extending languages fire inside host subtrees.
        const EntryCreationRule* rule = match(active, node);
        if (!rule && &active != &top_rules) rule = match(top_rules, node);
        if (!rule) {
            for (const auto& a : node.attributes) visit_value(a.value, active, owner);
            return;
        }

        const TokenValue* name_tok = node.token_attr(rule->name_from_attribute);
        if (!name_tok) {
            findings.push_back(error_at("MissingNameAttribute",
                                        "node '" + node.production_name +
                                            "' has no token attribute '" +
                                            rule->name_from_attribute + "' to name its entry",
                                        node.span_start));
            for (const auto& a : node.attributes) visit_value(a.value, active, owner);
            return;
        }

        EntryPtr entry = SymbolEntry::make(rule->creates_kind, name_tok->text);
        entry->set_origin({model_id, name_tok->pos});
        for (const auto& a : node.attributes)
            if (a.value.kind == AstValue::Kind::Token)
                entry->set_attribute(a.label, a.value.token.text);
        // A known package prefix qualifies entries on creation.
        std::string prefix = current->qualified_name();
        if (!root->name.empty())
            entry->set_qualified_name(prefix.empty() ? entry->simple_name()
                                                     : prefix + "." + entry->simple_name());

        current->add_entry(entry);
        if (owner) owner->add_child(entry);

        NamespaceNode* saved = current;
        if (rule->opens_namespace) current = &current->add_child(entry->simple_name());
        for (const auto& a : node.attributes) visit_value(a.value, rule->child_rules, entry.get());
        current = saved;
    }

    void visit_value(const AstValue& v, const std::vector<EntryCreationRule>& active,
                     SymbolEntry* owner) {
        switch (v.kind) {
            case AstValue::Kind::Token: return;
            case AstValue::Kind::Child: visit(*v.child, active, owner); return;
            case AstValue::Kind::ChildList:
                for (const auto& c : v.children) visit(*c, active, owner);
                return;
        }
    }
};

BuildResult build_namespaces(const AstNode& ast, const std::vector<EntryCreationRule>& rules,
                             const std::string& model_id, const BuildHooks* hooks) {
    BuildResult result;
    result.root = std::make_unique<NamespaceNode>();
    NamespaceBuilder builder{rules, hooks, model_id, {}, result.root.get(), result.root.get()};
    builder.visit(ast, rules, nullptr);
    result.findings = std::move(builder.findings);
    return result;
}

// ---------------------------------------------------------------------------
// compute_shadowing
// ---------------------------------------------------------------------------

namespace {

void collect_namespaces(const NamespaceNode& ns,
                        std::map<std::string, std::vector<const NamespaceNode*>>& by_qualified) {
    by_qualified[ns.qualified_name()].push_back(&ns);
    for (const auto& c : ns.children) collect_namespaces(*c, by_qualified);
}

void shadow_walk(NamespaceNode& ns,
                 const std::map<std::string, std::vector<const NamespaceNode*>>& by_qualified) {
    ns.hidden_imports.clear();
    for (const auto& import : ns.imports) {
        auto it = by_qualified.find(import);
        if (it == by_qualified.end()) continue;
        for (const NamespaceNode* source : it->second) {
            if (source == &ns) continue;
            for (const auto& [key, entries] : source->table)
                if (ns.table.count(key)) ns.hidden_imports.insert(key);
        }
    }
    for (auto& c : ns.children) shadow_walk(*c, by_qualified);
}

} // namespace

void compute_shadowing(NamespaceNode& ns) {
    std::map<std::string, std::vector<const NamespaceNode*>> by_qualified;
    collect_namespaces(ns, by_qualified);
    shadow_walk(ns, by_qualified);
}

} // namespace lw
