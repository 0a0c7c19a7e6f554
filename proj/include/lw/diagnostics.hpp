#ifndef LW_DIAGNOSTICS_HPP
#define LW_DIAGNOSTICS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lw {

enum class Severity { Error, Warning };

/// Position inside a source artifact. Lines and columns are 1-based.
struct SourcePos {
    std::string path;
    int line = 1;
    int col = 1;

    bool operator==(const SourcePos&) const = default;
};

/// A single diagnostic. `code` is a short identifier from the catalog below.
struct Finding {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourcePos pos;

    bool operator==(const Finding&) const = default;
};

// Diagnostic code catalog.
//
// Grammar artifacts:
//   SyntaxError            malformed artifact text
//   DuplicateProduction    two productions share a name in one grammar
//   DuplicateToken         two token rules share a name in one grammar
//   BuiltinTokenRedefined  token rule shadows ID / INT / STRING
//   BadTokenPattern        token regex does not compile or accepts ""
//   MultipleStart          more than one start marker
//   SelfExtends            grammar extends itself
//   PackageConflict        package header and packaged grammar name both given
//   ExternalWithBody       external production with a body or heritage
//   InterfaceWithBody      interface production with a body
//   MissingBody            normal/abstract production without a body
//   UndefinedNonterminal   RHS reference to an unknown name
//   AbstractWithoutExtender abstract production with no normal extender
//   BadExtendsTarget       extends names a missing or non-Normal/Abstract rule
//   BadImplementsTarget    implements names a missing or non-Interface rule
//   LeftRecursion          left-recursive cycle reachable from the start
//   UnknownStartProduction start directive names no known production
//
// Composition:
//   CyclicInheritance, MissingParentGrammar, IncompatibleOverride,
//   ProductionExtendsCycle, UnknownExternal, UnknownGuestProduction
//
// Model parsing:
//   SyntaxError, InputNotConsumed, UnboundExternalReached, NoStartProduction,
//   RecursionLimit, InconsistentNode
//
// Symbols:
//   MissingNameAttribute, UnresolvableName, AmbiguousName, NotFound,
//   Ambiguous, SymbolFileMissing, NoChildKindMapping, MalformedSymbolFile,
//   UnqualifiedEntrySkipped, DuplicateExport
//
// Family assembly and checks:
//   UnknownPredicate, DuplicateAdapter, DuplicateExtension,
//   UnknownLanguageComponent, MemberNameMismatch, UnmatchedModelExtension,
//   ModelFileUnreadable, CC-INTERNAL, plus the registered CC-* condition ids.

std::string severity_name(Severity s);

/// Renders "<path>:<line>:<col>: <severity> [<code>] <message>".
std::string render_finding(const Finding& f);

inline Finding error_at(std::string code, std::string message, SourcePos pos) {
    return Finding{Severity::Error, std::move(code), std::move(message), std::move(pos)};
}

inline Finding warning_at(std::string code, std::string message, SourcePos pos) {
    return Finding{Severity::Warning, std::move(code), std::move(message), std::move(pos)};
}

inline bool has_error(const std::vector<Finding>& fs) {
    for (const auto& f : fs)
        if (f.severity == Severity::Error) return true;
    return false;
}

/// Value-or-findings result. Operations that can fail return one of these;
/// a present value may still be accompanied by warnings.
template <typename T>
struct Result {
    std::optional<T> value;
    std::vector<Finding> findings;

    bool ok() const { return value.has_value(); }

    T& operator*() { return *value; }
    const T& operator*() const { return *value; }
    T* operator->() { return &*value; }
    const T* operator->() const { return &*value; }

    static Result success(T v) { return Result{std::move(v), {}}; }

    static Result failure(std::vector<Finding> fs) { return Result{std::nullopt, std::move(fs)}; }

    static Result failure(Finding f) {
        Result r;
        r.findings.push_back(std::move(f));
        return r;
    }
};

/// Stable sort used wherever finding lists must be order-independent:
/// path, then line, column, code, message.
void canonicalize_findings(std::vector<Finding>& fs);

} // namespace lw

#endif
