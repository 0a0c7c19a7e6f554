#ifndef LW_RENDER_HPP
#define LW_RENDER_HPP

#include <string>

#include "lw/family.hpp"

namespace lw {

/// AST as a JSON document (keys: production, grammar, attributes, span).
std::string ast_to_json(const AstNode& root);

/// Family report as a single JSON document (models[], findings[],
/// symbolFiles[], status).
std::string report_to_json(const FamilyReport& report);

/// Indented namespace/entry listing for the symbols command.
std::string namespace_listing(const NamespaceNode& root);

} // namespace lw

#endif
