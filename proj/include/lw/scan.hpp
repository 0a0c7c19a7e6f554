#ifndef LW_SCAN_HPP
#define LW_SCAN_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lw/diagnostics.hpp"

namespace lw {

/// Character cursor over artifact text shared by the grammar, language
/// configuration, and family configuration parsers. Skips whitespace and
/// // or /* */ comments between lexemes and tracks 1-based positions.
class TextScanner {
public:
    TextScanner(std::string_view text, std::string path);

    bool at_end();
    std::size_t offset() const { return pos_; }
    SourcePos here();
    SourcePos pos_at(std::size_t offset) const;
    const std::string& path() const { return path_; }

    void skip_trivia();

    /// Consumes `punct` if it is next (after trivia). Word-like lexemes
    /// additionally require a non-word character to follow.
    bool accept(std::string_view lexeme);
    bool peek(std::string_view lexeme);

    std::optional<std::string> accept_identifier();
    /// identifier ("." identifier)*
    std::optional<std::string> accept_dotted_name();
    /// Word of identifier characters plus the given extras (e.g. "-" for
    /// condition ids like CC-FAM-001).
    std::optional<std::string> accept_word_with(std::string_view extra_chars);
    /// Double-quoted string with \" \\ \n \t \r escapes; returns the
    /// unescaped value. Reports findings for malformed literals.
    std::optional<std::string> accept_string(std::vector<Finding>& findings);

    /// Error helper: finding at the current position.
    Finding syntax_error(const std::string& expected);

private:
    std::string_view text_;
    std::string path_;
    std::size_t pos_ = 0;
    std::vector<std::size_t> line_starts_;
};

/// Builds the offsets of line starts for pos_at-style lookups.
std::vector<std::size_t> index_line_starts(std::string_view text);
SourcePos source_pos_at(std::string_view text, const std::vector<std::size_t>& line_starts,
                        std::size_t offset, const std::string& path);

} // namespace lw

#endif
