#include "lw/names.hpp"

#include <algorithm>
#include <cctype>

namespace lw {

namespace {
bool is_word_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
} // namespace

bool is_identifier(const std::string& s) {
    if (s.empty() || !is_word_start(s[0])) return false;
    return std::all_of(s.begin(), s.end(), is_word_char);
}

std::string GrammarName::qualified() const {
    std::string out;
    for (const auto& p : package_path) {
        out += p;
        out += '.';
    }
    out += simple_name;
    return out;
}

std::vector<std::string> split_dotted(const std::string& dotted) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : dotted) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string join_dotted(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '.';
        out += parts[i];
    }
    return out;
}

GrammarName grammar_name_from(const std::string& dotted) {
    GrammarName n;
    if (dotted.empty()) return n;
    auto parts = split_dotted(dotted);
    n.simple_name = parts.back();
    parts.pop_back();
    n.package_path = std::move(parts);
    return n;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t cur = row[j];
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + cost});
            prev = cur;
        }
    }
    return row[m];
}

} // namespace lw
