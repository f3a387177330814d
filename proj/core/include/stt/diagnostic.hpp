#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stt/syntax.hpp"

namespace stt {

enum class Severity { Error, Warning };

/// Stable diagnostic codes.
namespace code {
inline constexpr const char* kTypeMismatch = "E-TYPE-MISMATCH";
inline constexpr const char* kTopeFalse = "E-TOPE-FALSE";
inline constexpr const char* kBoundary = "E-BOUNDARY";
inline constexpr const char* kCannotInfer = "E-CANNOT-INFER";
inline constexpr const char* kNotAFunction = "E-NOT-A-FUNCTION";
inline constexpr const char* kNotAPair = "E-NOT-A-PAIR";
inline constexpr const char* kDependsOnFailed = "E-DEPENDS-ON-FAILED";
inline constexpr const char* kUnbound = "E-UNBOUND";
inline constexpr const char* kDuplicate = "E-DUPLICATE";
inline constexpr const char* kUnfoldDepth = "E-UNFOLD-DEPTH";
inline constexpr const char* kParse = "E-PARSE";
inline constexpr const char* kIo = "E-IO";
}  // namespace code

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::string file;
    std::string decl;  // enclosing declaration, if any
    Span span;
    std::optional<std::string> expected;
    std::optional<std::string> actual;
    /// Atom name and its position ("0", "1", "mid", ...) in a falsifying model.
    std::vector<std::pair<std::string, std::string>> countermodel;
};

}  // namespace stt
