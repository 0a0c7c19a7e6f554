#ifndef LW_DEMO_HPP
#define LW_DEMO_HPP

#include "lw/family.hpp"

namespace lw::demo {

/// Registers the demonstration languages: class diagrams (cd), queries
/// (hql), placeholder expressions (expr), architectures (montiarc), and the
/// cloud architecture extension (clarc), together with the condition
/// predicate catalog:
///
///   cd.unique-types             type names unique per class diagram
///   arc.connector-endpoints     connector endpoints name declared ports and
///                               subcomponents
///   cdhql.hql-entities-resolve  query entities resolve to surrounding
///                               classes (adapter cd.Type -> hql.Type)
///   family.port-types-resolve   port types resolve to exported class types
///                               (adapter cd.Type -> arc.Type)
///   family.service-models-exist service ports reference a class-diagram
///                               model of the family
void register_demo_languages(Registries& registries);

} // namespace lw::demo

#endif
