#ifndef LW_FAMILY_HPP
#define LW_FAMILY_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lw/symfile.hpp"
#include "lw/symtab.hpp"

namespace lw {

enum class ConditionLevel { Component, Composite, Family };

std::string condition_level_name(ConditionLevel l);

/// A registered well-formedness check. Component conditions see one model,
/// composite conditions one model plus the composite's adapters, family
/// conditions every model plus the repository.
struct ContextConditionSpec {
    std::string id; // e.g. "CC-ARC-001"; stamped onto returned findings
    ConditionLevel level = ConditionLevel::Component;
    std::string predicate_id;
    Severity severity = Severity::Error;
};

/// Symbol-table configuration of one single language: how entries are
/// created, which kinds are exported, and its intra-language conditions.
struct LanguageComponent {
    std::string language_id;
    GrammarName grammar;
    std::vector<EntryCreationRule> entry_rules;
    std::vector<Kind> exported_kinds;
    std::vector<ContextConditionSpec> context_conditions;
    BuildHooks hooks;
};

/// Glue for languages embedded into one model: the participating components
/// plus the adapters and cross-language intra-model conditions. Nested
/// composites collapse into the child list on assembly.
struct CompositeLanguageDef {
    std::string name;
    std::vector<LanguageComponent> children;
    AdapterRegistry adapters;
    std::vector<ContextConditionSpec> context_conditions;
};

/// A black-box processable language: file extension, bound grammar, and the
/// component or composite carrying its symbol infrastructure.
struct ModelingLanguageDef {
    std::string name;
    std::string file_extension;
    std::optional<CompositeLanguageDef> composite; // set when embedding composes languages
    std::vector<LanguageComponent> components;     // host chain first, then guests
    BoundLanguage bound;

    std::vector<EntryCreationRule> entry_rules() const;
    std::vector<Kind> exported_kinds() const;
    BuildHooks merged_hooks() const;
    std::vector<ContextConditionSpec> component_conditions() const;
    const AdapterRegistry* composite_adapters() const;
    std::vector<ContextConditionSpec> composite_conditions() const;
};

using Predicate = std::function<std::vector<Finding>(const struct ConditionContext&)>;

class PredicateRegistry {
public:
    void add(const std::string& id, Predicate p) { predicates_[id] = std::move(p); }
    const Predicate* find(const std::string& id) const {
        auto it = predicates_.find(id);
        return it == predicates_.end() ? nullptr : &it->second;
    }

private:
    std::map<std::string, Predicate> predicates_;
};

/// Independent modeling languages gathered with the inter-language
/// infrastructure: adapters, conditions, and the predicate bindings.
struct LanguageFamilyDef {
    std::string name;
    std::string base_dir; // directory of the .family artifact
    std::vector<ModelingLanguageDef> members;
    AdapterRegistry adapters;                      // inter-language
    std::vector<ContextConditionSpec> conditions;  // all declared levels
    std::map<std::string, Predicate> bound_predicates;

    const ModelingLanguageDef* member_for_extension(const std::string& ext) const;
};

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// Code-side registrations the artifacts cannot express: per-grammar
/// components, per-language composite extras, and condition predicates.
struct Registries {
    std::map<std::string, LanguageComponent> components; // by grammar qualified name

    struct CompositeExtras {
        std::vector<AdapterSpec> adapters;
        std::vector<ContextConditionSpec> conditions;
    };
    std::map<std::string, CompositeExtras> composites; // by member language name

    PredicateRegistry predicates;
};

/// Builds one member from a language configuration artifact.
Result<ModelingLanguageDef> assemble_member(const LanguageConfiguration& cfg,
                                            const GrammarLoader& loader,
                                            const Registries& registries);

/// Parses a .family artifact and links members, adapters, and conditions.
/// `family_path` anchors relative member paths and the symbol index.
Result<LanguageFamilyDef> assemble_family(const std::string& cfg_text,
                                          const std::string& family_path,
                                          const GrammarLoader& loader,
                                          const Registries& registries);

// ---------------------------------------------------------------------------
// Processing pipeline
// ---------------------------------------------------------------------------

struct ModelArtifact {
    std::string path; // as given; doubles as the model id
    const ModelingLanguageDef* member = nullptr;
    AstNodePtr ast;
    NamespacePtr ns_root;
    bool parse_ok = false;
    std::vector<Finding> findings;
    std::string sym_path; // written symbol file, empty if none
};

struct ConditionContext {
    ConditionLevel level = ConditionLevel::Component;
    const ModelArtifact* model = nullptr;             // component and composite
    const std::vector<ModelArtifact>* all_models = nullptr; // family
    ModelRepository* repo = nullptr;                  // family
    const AdapterRegistry* adapters = nullptr;        // composite or family registry
    const LanguageFamilyDef* family = nullptr;
};

/// Runs one condition; findings carry spec.id as their code. A throwing
/// predicate is converted into a CC-INTERNAL error finding.
std::vector<Finding> run_context_condition(const ContextConditionSpec& spec,
                                           const ConditionContext& ctx,
                                           const std::map<std::string, Predicate>& predicates);

struct FamilyReport {
    struct PerModel {
        std::string path;
        bool parse_ok = false;
        std::vector<Finding> findings;
    };
    std::vector<PerModel> per_model;            // sorted by path
    std::vector<Finding> cross_findings;        // family-level
    std::vector<std::string> symbol_files_written; // sorted
    bool has_error = false;
    bool has_warning = false;

    std::vector<Finding> all_findings() const;
};

enum class PipelineStep {
    Parse,
    BuildSymbols,
    Shadowing,
    Qualify,
    Serialize,
    ComponentConditions,
    CompositeConditions,
    FamilyConditions
};

struct PipelineObserver {
    std::function<void(PipelineStep)> on_step_begin;
    std::function<void(PipelineStep)> on_step_end;
    std::function<void(ModelRepository&)> on_repository;
};

struct ProcessOptions {
    const PipelineObserver* observer = nullptr;
};

/// Parses, builds symbols, shadows, qualifies, serializes symbol files and
/// the family index, then runs conditions level by level. A failing model
/// never aborts the others.
FamilyReport process_family(const LanguageFamilyDef& family,
                            const std::vector<std::string>& model_paths,
                            const ProcessOptions& opts = {});

} // namespace lw

#endif
