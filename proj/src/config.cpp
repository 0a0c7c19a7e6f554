#include "lw/compose.hpp"
#include "lw/scan.hpp"

namespace lw {

// language <Name> {
//   file-extension ".<ext>" ;
//   grammar <qualified.GrammarName> ;
//   embed <qualified.GrammarName>.<Production> into <ExternalName> ;  // 0..n
// }
Result<LanguageConfiguration> parse_language_configuration(const std::string& text,
                                                           const std::string& artifact_path) {
    TextScanner scan(text, artifact_path);
    std::vector<Finding> findings;
    LanguageConfiguration cfg;

    auto fail = [&](const std::string& expected) {
        findings.push_back(scan.syntax_error(expected));
        return Result<LanguageConfiguration>::failure(std::move(findings));
    };

    if (!scan.accept("language")) return fail("'language'");
    auto name = scan.accept_identifier();
    if (!name) return fail("language name");
    cfg.language_name = *name;
    if (!scan.accept("{")) return fail("'{'");

    bool have_ext = false, have_grammar = false;
    while (!scan.peek("}")) {
        if (scan.at_end()) return fail("'}'");
        if (scan.accept("file-extension")) {
            auto ext = scan.accept_string(findings);
            if (!ext || !scan.accept(";")) return fail("extension string followed by ';'");
            if (ext->empty() || (*ext)[0] != '.') {
                findings.push_back(
                    error_at("SyntaxError", "file extension must begin with '.'", scan.here()));
                return Result<LanguageConfiguration>::failure(std::move(findings));
            }
            cfg.file_extension = *ext;
            have_ext = true;
        } else if (scan.accept("grammar")) {
            auto g = scan.accept_dotted_name();
            if (!g || !scan.accept(";")) return fail("grammar name followed by ';'");
            cfg.host_grammar = grammar_name_from(*g);
            have_grammar = true;
        } else if (scan.peek("embed")) {
            SourcePos pos = scan.here();
            scan.accept("embed");
            auto target = scan.accept_dotted_name();
            if (!target || target->find('.') == std::string::npos)
                return fail("qualified guest production after 'embed'");
            if (!scan.accept("into")) return fail("'into'");
            auto ext_name = scan.accept_identifier();
            if (!ext_name || !scan.accept(";")) return fail("external name followed by ';'");

            auto parts = split_dotted(*target);
            EmbeddingBinding b;
            b.guest_production = parts.back();
            parts.pop_back();
            b.guest_grammar = grammar_name_from(join_dotted(parts));
            b.host_external = *ext_name;
            b.pos = pos;
            cfg.bindings.push_back(std::move(b));
        } else {
            return fail("'file-extension', 'grammar', 'embed', or '}'");
        }
    }
    scan.accept("}");

    if (!have_grammar) return fail("a 'grammar' entry");
    if (!have_ext) return fail("a 'file-extension' entry");

    Result<LanguageConfiguration> r;
    r.value = std::move(cfg);
    r.findings = std::move(findings);
    return r;
}

} // namespace lw
