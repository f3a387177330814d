#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stt/diagnostic.hpp"
#include "stt/syntax.hpp"
#include "stt/term.hpp"

namespace stt {

/// A name-resolved declaration. Parameters are folded into the type (as Π or
/// extension types) and the body (as λ). Terms are raw: they still need
/// elaboration by the checker.
struct Declaration {
    std::string name;
    Span name_span;
    Span span;
    bool postulate = false;
    Term type;
    Term body;  // null for a postulate
};

enum class NameStatus { Unknown, Checked, Failed };
using NameLookup = std::function<NameStatus(const std::string&)>;

struct ResolveResult {
    std::optional<Declaration> decl;
    std::vector<Diagnostic> diagnostics;
};

ResolveResult resolve(const syntax::SurfaceDecl& d, const NameLookup& globals);

}  // namespace stt
