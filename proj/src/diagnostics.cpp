#include "lw/diagnostics.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace lw {

std::string severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

std::string render_finding(const Finding& f) {
    std::ostringstream os;
    os << f.pos.path << ':' << f.pos.line << ':' << f.pos.col << ": " << severity_name(f.severity)
       << " [" << f.code << "] " << f.message;
    return os.str();
}

void canonicalize_findings(std::vector<Finding>& fs) {
    std::stable_sort(fs.begin(), fs.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.pos.path, a.pos.line, a.pos.col, a.code, a.message) <
               std::tie(b.pos.path, b.pos.line, b.pos.col, b.code, b.message);
    });
}

} // namespace lw
