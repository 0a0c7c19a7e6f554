#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lw/family.hpp"

namespace fs = std::filesystem;

namespace lw {

namespace {

void notify_begin(const ProcessOptions& opts, PipelineStep step) {
    if (opts.observer && opts.observer->on_step_begin) opts.observer->on_step_begin(step);
}
void notify_end(const ProcessOptions& opts, PipelineStep step) {
    if (opts.observer && opts.observer->on_step_end) opts.observer->on_step_end(step);
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Collects every exported entry of a symbol file into the index.
void index_symbol_file(const SymbolFile& file, const std::string& rel_path, FamilyIndex& index,
                       std::vector<Finding>& findings) {
    std::function<void(const EntryPtr&)> add = [&](const EntryPtr& e) {
        if (auto q = e->qualified_name()) {
            if (!index.add(*q, e->kind(), rel_path))
                findings.push_back(warning_at("DuplicateExport",
                                              "'" + *q + "' of kind " + e->kind().render() +
                                                  " is exported by more than one model",
                                              e->origin().pos.value_or(SourcePos{})));
        }
        for (const EntryPtr& c : e->children()) add(c);
    };
    for (const EntryPtr& e : file.entries) add(e);
}

void qualify_tree(NamespaceNode& ns, const FamilyIndex& index, std::vector<Finding>& findings) {
    for (auto& [key, entries] : ns.table) {
        for (const EntryPtr& e : entries) {
            if (e->state() != EntryState::Unqualified) continue;
            Result<EntryPtr> q = qualify(e, ns, index);
            findings.insert(findings.end(), q.findings.begin(), q.findings.end());
        }
    }
    for (auto& c : ns.children) qualify_tree(*c, index, findings);
}

} // namespace

FamilyReport process_family(const LanguageFamilyDef& family,
                            const std::vector<std::string>& model_paths,
                            const ProcessOptions& opts) {
    FamilyReport report;
    std::vector<ModelArtifact> models;

    // Canonical processing order: sorted by path.
    std::vector<std::string> paths = model_paths;
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    // (1) parse each model individually
    notify_begin(opts, PipelineStep::Parse);
    for (const std::string& path : paths) {
        ModelArtifact m;
        m.path = path;
        std::string ext = fs::path(path).extension().generic_string();
        m.member = family.member_for_extension(ext);
        if (!m.member) {
            m.findings.push_back(error_at("UnmatchedModelExtension",
                                          "no family member handles extension '" + ext + "'",
                                          SourcePos{path, 1, 1}));
            models.push_back(std::move(m));
            continue;
        }
        std::optional<std::string> text = read_file(path);
        if (!text) {
            m.findings.push_back(error_at("ModelFileUnreadable", "cannot read model file",
                                          SourcePos{path, 1, 1}));
            models.push_back(std::move(m));
            continue;
        }
        Result<AstNodePtr> ast = parse_model(m.member->bound, *text, path);
        m.findings.insert(m.findings.end(), ast.findings.begin(), ast.findings.end());
        if (ast.ok()) {
            m.ast = *ast.value;
            m.parse_ok = true;
        }
        models.push_back(std::move(m));
    }
    notify_end(opts, PipelineStep::Parse);

    // (2) namespaces and entries
    notify_begin(opts, PipelineStep::BuildSymbols);
    for (auto& m : models) {
        if (!m.parse_ok) continue;
        BuildHooks hooks = m.member->merged_hooks();
        BuildResult built = build_namespaces(*m.ast, m.member->entry_rules(), m.path, &hooks);
        m.ns_root = std::move(built.root);
        m.findings.insert(m.findings.end(), built.findings.begin(), built.findings.end());
    }
    notify_end(opts, PipelineStep::BuildSymbols);

    // (3) shadowing
    notify_begin(opts, PipelineStep::Shadowing);
    for (auto& m : models)
        if (m.ns_root) compute_shadowing(*m.ns_root);
    notify_end(opts, PipelineStep::Shadowing);

    // (4) qualify entries; declarations qualify against their own tree, so an
    // empty index suffices here
    notify_begin(opts, PipelineStep::Qualify);
    FamilyIndex empty_index;
    for (auto& m : models)
        if (m.ns_root) qualify_tree(*m.ns_root, empty_index, m.findings);
    notify_end(opts, PipelineStep::Qualify);

    // (5) serialize symbol files and the family index
    notify_begin(opts, PipelineStep::Serialize);
    FamilyIndex index;
    std::vector<Finding> index_findings;
    for (auto& m : models) {
        if (!m.ns_root) continue;
        Result<std::string> bytes =
            serialize_symbols(*m.ns_root, m.path, m.member->name, m.member->exported_kinds());
        m.findings.insert(m.findings.end(), bytes.findings.begin(), bytes.findings.end());
        if (!bytes.ok()) continue;
        std::string sym_path = m.path + ".sym";
        std::ofstream out(sym_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            m.findings.push_back(error_at("ModelFileUnreadable",
                                          "cannot write symbol file " + sym_path,
                                          SourcePos{m.path, 1, 1}));
            continue;
        }
        out << *bytes.value;
        out.close();
        m.sym_path = sym_path;
        report.symbol_files_written.push_back(sym_path);

        Result<SymbolFile> reread = deserialize_symbols(*bytes.value);
        if (reread.ok()) {
            std::string rel = fs::relative(sym_path, family.base_dir).generic_string();
            if (rel.empty()) rel = sym_path;
            index_symbol_file(*reread.value, rel, index, index_findings);
        } else {
            m.findings.insert(m.findings.end(), reread.findings.begin(), reread.findings.end());
        }
    }
    {
        fs::path index_path = fs::path(family.base_dir) / "family.symindex";
        std::ofstream out(index_path, std::ios::binary | std::ios::trunc);
        if (out) {
            out << index.serialize();
            report.symbol_files_written.push_back(index_path.generic_string());
        } else {
            index_findings.push_back(error_at("ModelFileUnreadable",
                                              "cannot write family index " +
                                                  index_path.generic_string(),
                                              SourcePos{family.base_dir, 1, 1}));
        }
    }
    notify_end(opts, PipelineStep::Serialize);

    ModelRepository repo(index, family.base_dir);
    if (opts.observer && opts.observer->on_repository) opts.observer->on_repository(repo);

    auto conditions_at = [&](ConditionLevel level) {
        std::vector<const ContextConditionSpec*> out;
        for (const auto& spec : family.conditions)
            if (spec.level == level) out.push_back(&spec);
        return out;
    };

    // (6) component-level conditions per model
    notify_begin(opts, PipelineStep::ComponentConditions);
    for (auto& m : models) {
        if (!m.parse_ok) continue;
        ConditionContext ctx;
        ctx.level = ConditionLevel::Component;
        ctx.model = &m;
        ctx.family = &family;
        for (const ContextConditionSpec* spec : conditions_at(ConditionLevel::Component)) {
            auto fs_ = run_context_condition(*spec, ctx, family.bound_predicates);
            m.findings.insert(m.findings.end(), fs_.begin(), fs_.end());
        }
        for (const auto& spec : m.member->component_conditions()) {
            if (spec.level != ConditionLevel::Component) continue;
            auto fs_ = run_context_condition(spec, ctx, family.bound_predicates);
            m.findings.insert(m.findings.end(), fs_.begin(), fs_.end());
        }
    }
    notify_end(opts, PipelineStep::ComponentConditions);

    // (7) composite-level conditions per model (mixed-language trees)
    notify_begin(opts, PipelineStep::CompositeConditions);
    AdapterRegistry no_adapters;
    for (auto& m : models) {
        if (!m.parse_ok) continue;
        ConditionContext ctx;
        ctx.level = ConditionLevel::Composite;
        ctx.model = &m;
        ctx.family = &family;
        ctx.adapters = m.member->composite_adapters() ? m.member->composite_adapters() : &no_adapters;
        for (const ContextConditionSpec* spec : conditions_at(ConditionLevel::Composite)) {
            auto fs_ = run_context_condition(*spec, ctx, family.bound_predicates);
            m.findings.insert(m.findings.end(), fs_.begin(), fs_.end());
        }
        for (const auto& spec : m.member->composite_conditions()) {
            auto fs_ = run_context_condition(spec, ctx, family.bound_predicates);
            m.findings.insert(m.findings.end(), fs_.begin(), fs_.end());
        }
    }
    notify_end(opts, PipelineStep::CompositeConditions);

    // (8) family-level conditions with cross-model resolution
    notify_begin(opts, PipelineStep::FamilyConditions);
    {
        ConditionContext ctx;
        ctx.level = ConditionLevel::Family;
        ctx.all_models = &models;
        ctx.repo = &repo;
        ctx.adapters = &family.adapters;
        ctx.family = &family;
        for (const ContextConditionSpec* spec : conditions_at(ConditionLevel::Family)) {
            auto fs_ = run_context_condition(*spec, ctx, family.bound_predicates);
            report.cross_findings.insert(report.cross_findings.end(), fs_.begin(), fs_.end());
        }
    }
    notify_end(opts, PipelineStep::FamilyConditions);

    report.cross_findings.insert(report.cross_findings.end(), index_findings.begin(),
                                 index_findings.end());
    canonicalize_findings(report.cross_findings);
    std::sort(report.symbol_files_written.begin(), report.symbol_files_written.end());

    for (auto& m : models) {
        canonicalize_findings(m.findings);
        FamilyReport::PerModel pm;
        pm.path = m.path;
        pm.parse_ok = m.parse_ok;
        pm.findings = m.findings;
        report.per_model.push_back(std::move(pm));
    }
    std::sort(report.per_model.begin(), report.per_model.end(),
              [](const auto& a, const auto& b) { return a.path < b.path; });

    for (const Finding& f : report.all_findings()) {
        if (f.severity == Severity::Error) report.has_error = true;
        if (f.severity == Severity::Warning) report.has_warning = true;
    }
    return report;
}

} // namespace lw
