// lw: language-workbench driver. Subcommands: grammar-check, parse, symbols,
// check, print-ast. Diagnostics go to stderr; requested data to stdout; exit
// code 0 iff no error findings.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lw/demo.hpp"
#include "lw/render.hpp"

namespace fs = std::filesystem;
using namespace lw;

namespace {

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::vector<Finding>& findings) {
    for (const auto& f : findings) std::cerr << render_finding(f) << "\n";
}

int exit_code(const std::vector<Finding>& findings, bool fail_on_warning = false) {
    for (const auto& f : findings) {
        if (f.severity == Severity::Error) return 1;
        if (fail_on_warning && f.severity == Severity::Warning) return 1;
    }
    return 0;
}

std::vector<std::string> grammar_roots(const std::vector<std::string>& flags,
                                       const std::string& artifact_dir) {
    std::vector<std::string> roots = flags;
    if (const char* env = std::getenv("LANGWEAVE_GRAMMAR_PATH")) {
        std::string s = env;
        std::size_t start = 0;
        while (start <= s.size()) {
            std::size_t colon = s.find(':', start);
            std::string part = s.substr(start, colon == std::string::npos ? colon : colon - start);
            if (!part.empty()) roots.push_back(part);
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
    }
    if (roots.empty() && !artifact_dir.empty()) roots.push_back(artifact_dir);
    return roots;
}

struct MemberSetup {
    Registries registries;
    std::optional<ModelingLanguageDef> member;
    std::vector<Finding> findings;
};

MemberSetup load_member(const std::string& lcfg_path, const std::vector<std::string>& roots_flag) {
    MemberSetup setup;
    demo::register_demo_languages(setup.registries);
    auto text = read_file(lcfg_path);
    if (!text) {
        setup.findings.push_back(error_at("ModelFileUnreadable",
                                          "cannot read language configuration",
                                          SourcePos{lcfg_path, 1, 1}));
        return setup;
    }
    Result<LanguageConfiguration> cfg = parse_language_configuration(*text, lcfg_path);
    setup.findings.insert(setup.findings.end(), cfg.findings.begin(), cfg.findings.end());
    if (!cfg.ok()) return setup;

    std::string dir = fs::path(lcfg_path).parent_path().generic_string();
    GrammarRepository repo(grammar_roots(roots_flag, dir.empty() ? "." : dir));
    Result<ModelingLanguageDef> member = assemble_member(*cfg.value, repo.loader(), setup.registries);
    setup.findings.insert(setup.findings.end(), member.findings.begin(), member.findings.end());
    if (member.ok()) setup.member = std::move(*member.value);
    return setup;
}

void print_ast_text(const AstNode& n, int indent, std::ostream& os) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << n.production_name << " <"
       << n.origin_grammar.qualified() << ">\n";
    for (const auto& a : n.attributes) {
        std::string pad(static_cast<std::size_t>(indent + 1) * 2, ' ');
        switch (a.value.kind) {
            case AstValue::Kind::Token:
                os << pad << a.label << " = \"" << a.value.token.text << "\"\n";
                break;
            case AstValue::Kind::Child:
                os << pad << a.label << ":\n";
                print_ast_text(*a.value.child, indent + 2, os);
                break;
            case AstValue::Kind::ChildList:
                os << pad << a.label << " [" << a.value.children.size() << "]:\n";
                for (const auto& c : a.value.children) print_ast_text(*c, indent + 2, os);
                break;
        }
    }
}

int cmd_grammar_check(const std::vector<std::string>& paths,
                      const std::vector<std::string>& roots_flag) {
    std::vector<Finding> all;
    for (const auto& path : paths) {
        auto text = read_file(path);
        if (!text) {
            all.push_back(error_at("ModelFileUnreadable", "cannot read grammar file",
                                   SourcePos{path, 1, 1}));
            continue;
        }
        Result<GrammarModel> g = parse_grammar(*text, path);
        all.insert(all.end(), g.findings.begin(), g.findings.end());
        if (!g.ok()) continue;

        std::string dir = fs::path(path).parent_path().parent_path().generic_string();
        GrammarRepository repo(grammar_roots(roots_flag, dir.empty() ? "." : dir));
        std::vector<GrammarModelPtr> parents_owned;
        std::vector<const GrammarModel*> parents;
        const GrammarModel* cur = &*g.value;
        std::set<std::string> seen{cur->name.qualified()};
        bool chain_ok = true;
        while (cur->extends_grammar) {
            if (!seen.insert(cur->extends_grammar->qualified()).second) {
                all.push_back(error_at("CyclicInheritance",
                                       "inheritance cycle through '" +
                                           cur->extends_grammar->qualified() + "'",
                                       SourcePos{path, 1, 1}));
                chain_ok = false;
                break;
            }
            Result<GrammarModelPtr> parent = repo.load(*cur->extends_grammar);
            if (!parent.ok()) {
                all.push_back(error_at("MissingParentGrammar",
                                       "cannot load parent grammar '" +
                                           cur->extends_grammar->qualified() + "'",
                                       SourcePos{path, 1, 1}));
                all.insert(all.end(), parent.findings.begin(), parent.findings.end());
                chain_ok = false;
                break;
            }
            parents_owned.push_back(*parent.value);
            parents.push_back(parents_owned.back().get());
            cur = parents_owned.back().get();
        }
        if (!chain_ok) continue;
        std::vector<Finding> vf = validate_grammar(*g.value, parents);
        all.insert(all.end(), vf.begin(), vf.end());
    }
    emit(all);
    return exit_code(all);
}

int cmd_parse(const std::string& model_path, const std::string& lcfg_path, bool json,
              const std::vector<std::string>& roots_flag, bool ast_text) {
    MemberSetup setup = load_member(lcfg_path, roots_flag);
    if (!setup.member) {
        emit(setup.findings);
        return 1;
    }
    auto text = read_file(model_path);
    if (!text) {
        setup.findings.push_back(
            error_at("ModelFileUnreadable", "cannot read model file", SourcePos{model_path, 1, 1}));
        emit(setup.findings);
        return 1;
    }
    Result<AstNodePtr> ast = parse_model(setup.member->bound, *text, model_path);
    setup.findings.insert(setup.findings.end(), ast.findings.begin(), ast.findings.end());
    emit(setup.findings);
    if (!ast.ok()) return 1;
    if (json) std::cout << ast_to_json(**ast.value);
    if (ast_text) print_ast_text(**ast.value, 0, std::cout);
    return exit_code(setup.findings);
}

int cmd_symbols(const std::string& model_path, const std::string& lcfg_path, bool emit_sym,
                const std::vector<std::string>& roots_flag) {
    MemberSetup setup = load_member(lcfg_path, roots_flag);
    if (!setup.member) {
        emit(setup.findings);
        return 1;
    }
    auto text = read_file(model_path);
    if (!text) {
        setup.findings.push_back(
            error_at("ModelFileUnreadable", "cannot read model file", SourcePos{model_path, 1, 1}));
        emit(setup.findings);
        return 1;
    }
    Result<AstNodePtr> ast = parse_model(setup.member->bound, *text, model_path);
    setup.findings.insert(setup.findings.end(), ast.findings.begin(), ast.findings.end());
    if (!ast.ok()) {
        emit(setup.findings);
        return 1;
    }
    BuildHooks hooks = setup.member->merged_hooks();
    BuildResult built = build_namespaces(**ast.value, setup.member->entry_rules(), model_path, &hooks);
    setup.findings.insert(setup.findings.end(), built.findings.begin(), built.findings.end());
    compute_shadowing(*built.root);
    FamilyIndex empty;
    std::function<void(NamespaceNode&)> qualify_all = [&](NamespaceNode& ns) {
        for (auto& [key, entries] : ns.table)
            for (const EntryPtr& e : entries) {
                if (e->state() != EntryState::Unqualified) continue;
                Result<EntryPtr> q = qualify(e, ns, empty);
                setup.findings.insert(setup.findings.end(), q.findings.begin(), q.findings.end());
            }
        for (auto& c : ns.children) qualify_all(*c);
    };
    qualify_all(*built.root);

    std::cout << namespace_listing(*built.root);
    if (emit_sym) {
        Result<std::string> bytes = serialize_symbols(*built.root, model_path, setup.member->name,
                                                      setup.member->exported_kinds());
        setup.findings.insert(setup.findings.end(), bytes.findings.begin(), bytes.findings.end());
        if (bytes.ok()) {
            std::ofstream out(model_path + ".sym", std::ios::binary | std::ios::trunc);
            if (out)
                out << *bytes.value;
            else
                setup.findings.push_back(error_at("ModelFileUnreadable",
                                                  "cannot write symbol file",
                                                  SourcePos{model_path + ".sym", 1, 1}));
        }
    }
    emit(setup.findings);
    return exit_code(setup.findings);
}

int cmd_check(const std::string& family_path, const std::vector<std::string>& models, bool json,
              bool fail_on_warning, const std::vector<std::string>& roots_flag) {
    Registries registries;
    demo::register_demo_languages(registries);
    auto text = read_file(family_path);
    if (!text) {
        std::vector<Finding> fs{error_at("ModelFileUnreadable", "cannot read family configuration",
                                         SourcePos{family_path, 1, 1})};
        emit(fs);
        return 1;
    }
    std::string dir = fs::path(family_path).parent_path().generic_string();
    GrammarRepository repo(grammar_roots(roots_flag, dir.empty() ? "." : dir));
    Result<LanguageFamilyDef> family =
        assemble_family(*text, family_path, repo.loader(), registries);
    emit(family.findings);
    if (!family.ok()) return 1;

    FamilyReport report = process_family(*family.value, models);
    std::vector<Finding> findings = report.all_findings();
    emit(findings);
    if (json) std::cout << report_to_json(report);
    int code = exit_code(family.findings, fail_on_warning);
    if (code == 0) code = exit_code(findings, fail_on_warning);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"langweave: composable language workbench"};
    app.require_subcommand(1);

    std::vector<std::string> grammar_path;
    std::vector<std::string> paths;
    std::string model_path, lcfg_path, family_path;
    std::vector<std::string> models;
    bool json = false, emit_sym = false, fail_on_warning = false;

    CLI::App* gc = app.add_subcommand("grammar-check", "parse and validate grammar artifacts");
    gc->add_option("paths", paths, "grammar files (.mcg)")->required()->expected(-1);
    gc->add_option("--grammar-path", grammar_path, "grammar search root(s)");

    CLI::App* parse = app.add_subcommand("parse", "parse one model");
    parse->add_option("model", model_path, "model file")->required();
    parse->add_option("--language", lcfg_path, "language configuration (.lcfg)")->required();
    parse->add_flag("--json", json, "emit the AST as JSON on stdout");
    parse->add_option("--grammar-path", grammar_path, "grammar search root(s)");

    CLI::App* print_ast = app.add_subcommand("print-ast", "parse one model and print its tree");
    print_ast->add_option("model", model_path, "model file")->required();
    print_ast->add_option("--language", lcfg_path, "language configuration (.lcfg)")->required();
    print_ast->add_option("--grammar-path", grammar_path, "grammar search root(s)");

    CLI::App* symbols = app.add_subcommand("symbols", "build and list a model's symbols");
    symbols->add_option("model", model_path, "model file")->required();
    symbols->add_option("--language", lcfg_path, "language configuration (.lcfg)")->required();
    symbols->add_flag("--emit-sym", emit_sym, "write <model>.sym");
    symbols->add_option("--grammar-path", grammar_path, "grammar search root(s)");

    CLI::App* check = app.add_subcommand("check", "process a model set against a family");
    check->add_option("family", family_path, "family configuration (.family)")->required();
    check->add_option("models", models, "model files")->expected(-1);
    check->add_flag("--json", json, "emit the report as JSON on stdout");
    check->add_flag("--fail-on-warning", fail_on_warning, "exit nonzero on warnings too");
    check->add_option("--grammar-path", grammar_path, "grammar search root(s)");

    CLI11_PARSE(app, argc, argv);

    if (gc->parsed()) return cmd_grammar_check(paths, grammar_path);
    if (parse->parsed()) return cmd_parse(model_path, lcfg_path, json, grammar_path, false);
    if (print_ast->parsed()) return cmd_parse(model_path, lcfg_path, false, grammar_path, true);
    if (symbols->parsed()) return cmd_symbols(model_path, lcfg_path, emit_sym, grammar_path);
    if (check->parsed()) return cmd_check(family_path, models, json, fail_on_warning, grammar_path);
    return 1;
}
