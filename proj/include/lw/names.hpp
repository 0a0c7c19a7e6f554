#ifndef LW_NAMES_HPP
#define LW_NAMES_HPP

#include <compare>
#include <string>
#include <vector>

namespace lw {

bool is_identifier(const std::string& s);

/// Package-qualified grammar name, e.g. montiarc.MontiArc.
struct GrammarName {
    std::vector<std::string> package_path;
    std::string simple_name;

    std::string qualified() const;

    auto operator<=>(const GrammarName&) const = default;
    bool operator==(const GrammarName&) const = default;
};

/// Parses "a.b.Name" into a GrammarName. Empty string yields an unnamed value.
GrammarName grammar_name_from(const std::string& dotted);

std::vector<std::string> split_dotted(const std::string& dotted);
std::string join_dotted(const std::vector<std::string>& parts);

/// Levenshtein distance, used for did-you-mean suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

} // namespace lw

#endif
