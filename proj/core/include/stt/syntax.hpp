#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stt {

/// Byte range plus 1-based line/column (columns count code points) of both ends.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;

    bool contains(const Span& inner) const {
        return begin <= inner.begin && inner.end <= end;
    }
    static Span cover(const Span& a, const Span& b) {
        return {a.begin, b.end, a.line, a.col, b.end_line, b.end_col};
    }
};

enum class TokenKind { Identifier, Keyword, Symbol, Natural, String, Layout };

struct Token {
    TokenKind kind;
    std::string text;    // canonical spelling: ASCII aliases map to the Unicode form
    std::string lexeme;  // exactly as written
    Span span;
};

std::string_view to_string(TokenKind k);

}  // namespace stt

namespace stt::syntax {

struct LexError {
    enum class Kind { InvalidCharacter, UnterminatedComment, UnterminatedString } kind;
    Span span;
    std::string message;
};

struct LexResult {
    std::vector<Token> tokens;
    std::vector<LexError> errors;  // at most one: lexing stops at the first bad character
};

/// Tokenizes a UTF-8 source. Whitespace and comments are dropped; `#section`
/// lines become Layout tokens that the parser skips.
LexResult tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// Surface syntax

struct Pattern {
    std::string name;             // empty for a tuple pattern
    std::vector<Pattern> parts;   // two parts for (p, q)
    Span span;

    bool is_tuple() const { return !parts.empty(); }
    static Pattern var(std::string n, Span s = {}) { return {std::move(n), {}, s}; }
};

enum class SKind {
    Name,        // text
    Nat,         // text: "0" "1" "2"
    Universe,    // level
    Pi,          // patterns: bound names; kids: domain, body
    Arrow,       // kids: domain, codomain
    Sigma,       // patterns: one name; kids: first, second
    Product,     // kids: left, right (types or cubes)
    Lambda,      // patterns; kids: body
    App,         // kids: fn, arg
    Pair,        // kids: a, b
    Fst,         // kids: a
    Snd,         // kids: a
    Id,          // kids: type, lhs, rhs
    PathEq,      // kids: lhs, rhs  (a ∼ b, type inferred from lhs)
    Refl,
    IndPath,     // kids: motive, base, target
    Ext,         // patterns: shape binder; kids: cube, shape tope, codomain [, boundary tope, boundary term]
    Cases,       // kids: tope, term, tope, term, ...
    RecBot,
    Top,
    Bot,
    Leq,         // kids: lhs, rhs
    TopeEq,      // kids: lhs, rhs
    And,         // kids: lhs, rhs
    Or,          // kids: lhs, rhs
    Annot,       // kids: term, type
};

struct SExpr {
    SKind kind = SKind::Name;
    std::string text;
    int level = 0;
    std::vector<Pattern> patterns;
    std::vector<SExpr> kids;
    Span span;
};

enum class Layer { Term, Cube, Tope };

struct Param {
    std::vector<std::string> names;  // empty for a tope parameter
    SExpr type;                      // the tope itself for Layer::Tope
    Layer layer = Layer::Term;
    Span span;
};

struct SurfaceDecl {
    bool postulate = false;
    std::string name;
    Span name_span;
    std::vector<Param> params;
    SExpr type;
    SExpr body;  // unused for postulates
    Span span;   // keyword through terminating ';'
};

struct Import {
    std::string path;
    Span span;
};

struct ParseDiagnostic {
    Span span;
    std::string message;
    std::vector<std::string> expected;
};

struct SurfaceModule {
    std::vector<Import> imports;
    std::vector<SurfaceDecl> decls;
    std::vector<ParseDiagnostic> diagnostics;  // lexing and parsing problems
};

SurfaceModule parse_module(std::string_view source);

/// True when `e` is syntactically a cube: 1, 2, Δ¹ or a product of cubes.
bool is_cube_syntax(const SExpr& e);

bool same_structure(const SExpr& a, const SExpr& b);
bool same_structure(const SurfaceDecl& a, const SurfaceDecl& b);

std::string print_expr(const SExpr& e);
std::string pretty_print(const SurfaceDecl& d);
std::string pretty_print(const SurfaceModule& m);

}  // namespace stt::syntax
