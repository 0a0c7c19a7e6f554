#include "lw/scan.hpp"

#include <algorithm>
#include <cctype>

namespace lw {

namespace {
bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
} // namespace

std::vector<std::size_t> index_line_starts(std::string_view text) {
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') starts.push_back(i + 1);
    return starts;
}

SourcePos source_pos_at(std::string_view, const std::vector<std::size_t>& line_starts,
                        std::size_t offset, const std::string& path) {
    auto it = std::upper_bound(line_starts.begin(), line_starts.end(), offset);
    std::size_t line = static_cast<std::size_t>(it - line_starts.begin()); // 1-based
    std::size_t col = offset - line_starts[line - 1] + 1;
    return SourcePos{path, static_cast<int>(line), static_cast<int>(col)};
}

TextScanner::TextScanner(std::string_view text, std::string path)
    : text_(text), path_(std::move(path)), line_starts_(index_line_starts(text)) {}

SourcePos TextScanner::pos_at(std::size_t offset) const {
    return source_pos_at(text_, line_starts_, offset, path_);
}

void TextScanner::skip_trivia() {
    while (pos_ < text_.size()) {
        char c = text_[pos_];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos_;
        } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
            while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
            pos_ += 2;
            while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) ++pos_;
            pos_ = pos_ + 1 < text_.size() ? pos_ + 2 : text_.size();
        } else {
            break;
        }
    }
}

bool TextScanner::at_end() {
    skip_trivia();
    return pos_ >= text_.size();
}

SourcePos TextScanner::here() {
    skip_trivia();
    return pos_at(pos_);
}

bool TextScanner::peek(std::string_view lexeme) {
    skip_trivia();
    if (text_.substr(pos_, lexeme.size()) != lexeme) return false;
    // Keyword-like lexemes must not run into a longer word.
    if (!lexeme.empty() && word_char(lexeme.back())) {
        std::size_t next = pos_ + lexeme.size();
        if (next < text_.size() && word_char(text_[next])) return false;
    }
    return true;
}

bool TextScanner::accept(std::string_view lexeme) {
    if (!peek(lexeme)) return false;
    pos_ += lexeme.size();
    return true;
}

std::optional<std::string> TextScanner::accept_identifier() {
    skip_trivia();
    if (pos_ >= text_.size()) return std::nullopt;
    char c = text_[pos_];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;
    std::size_t start = pos_;
    while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
}

std::optional<std::string> TextScanner::accept_word_with(std::string_view extra_chars) {
    skip_trivia();
    if (pos_ >= text_.size()) return std::nullopt;
    auto ok = [&](char c) { return word_char(c) || extra_chars.find(c) != std::string_view::npos; };
    if (!ok(text_[pos_])) return std::nullopt;
    std::size_t start = pos_;
    while (pos_ < text_.size() && ok(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
}

std::optional<std::string> TextScanner::accept_dotted_name() {
    auto first = accept_identifier();
    if (!first) return std::nullopt;
    std::string out = *first;
    // A dot binds only when immediately followed by an identifier.
    while (pos_ < text_.size() && text_[pos_] == '.') {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < text_.size() &&
            (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
            out += '.';
            out += text_.substr(start, pos_ - start);
        } else {
            pos_ = save;
            break;
        }
    }
    return out;
}

std::optional<std::string> TextScanner::accept_string(std::vector<Finding>& findings) {
    skip_trivia();
    if (pos_ >= text_.size() || text_[pos_] != '"') return std::nullopt;
    std::size_t start = pos_;
    ++pos_;
    std::string value;
    while (pos_ < text_.size()) {
        char c = text_[pos_];
        if (c == '"') {
            ++pos_;
            return value;
        }
        if (c == '\\') {
            if (pos_ + 1 >= text_.size()) break;
            char e = text_[pos_ + 1];
            switch (e) {
                case '"': value += '"'; break;
                case '\\': value += '\\'; break;
                case 'n': value += '\n'; break;
                case 't': value += '\t'; break;
                case 'r': value += '\r'; break;
                default:
                    findings.push_back(error_at(
                        "SyntaxError", std::string("unknown escape '\\") + e + "' in string literal",
                        pos_at(pos_)));
                    value += e;
                    break;
            }
            pos_ += 2;
        } else if (c == '\n') {
            break; // unterminated on this line
        } else {
            value += c;
            ++pos_;
        }
    }
    findings.push_back(error_at("SyntaxError", "unterminated string literal", pos_at(start)));
    return std::nullopt;
}

Finding TextScanner::syntax_error(const std::string& expected) {
    return error_at("SyntaxError", "expected " + expected, here());
}

} // namespace lw
