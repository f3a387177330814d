#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "stt/syntax.hpp"

// Nameless core syntax shared by every layer: types, terms, cube points and
// topes all live in one tree. Variables are de Bruijn indices into a single
// context; whether a variable ranges over a cube or a type is recorded in the
// context entry, not in the variable.
namespace stt {

enum class Kind {
    // terms and types
    Var,        // index
    Const,      // name
    Universe,   // level 0 or 1
    Pi,         // [domain, codomain^1]
    Lambda,     // [body^1]
    App,        // [fn, arg]
    Sigma,      // [first, second^1]
    Pair,       // [a, b]     also cube points of product cubes
    Fst,        // [p]        also cube point projections
    Snd,        // [p]
    Id,         // [type, lhs, rhs]
    Refl,       // [point] once elaborated; no children in raw syntax
    IndPath,    // [motive^3, base^1, target]
    ExtType,    // [cube, shape^1, codomain^1] or with [boundary^1, term^1]
    ExtLambda,  // [body^1]
    ExtApp,     // [fn, point]
    Annot,      // [term, type]
    Cases,      // [tope, term, tope, term, ...]
    RecBot,
    PathEq,     // raw only: [lhs, rhs], elaborated into Id
    // cubes
    Cube2,
    CubeUnit,
    CubeProduct,  // [left, right]
    // interval points
    Zero,
    One,
    // topes
    Top,
    Bottom,
    Leq,      // [lhs, rhs]
    PointEq,  // [lhs, rhs]
    And,      // [lhs, rhs]
    Or,       // [lhs, rhs]
};

std::string_view kind_name(Kind k);

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Var;
    int index = 0;                   // Var index, Universe level
    std::string name;                // Const name
    std::vector<std::string> hints;  // binder names for printing
    std::vector<Term> kids;
    Span span;
    int free_bound = 0;  // every free index is < free_bound
};

/// Number of variables bound around child `i` of a node of kind `k`.
int binders_of(Kind k, std::size_t child);

namespace mk {
Term var(int i, Span s = {});
Term constant(std::string name, Span s = {});
Term universe(int level, Span s = {});
Term pi(Term dom, Term cod, std::string hint = "_", Span s = {});
Term lambda(Term body, std::string hint = "_", Span s = {});
Term app(Term fn, Term arg, Span s = {});
Term sigma(Term fst, Term snd, std::string hint = "_", Span s = {});
Term pair(Term a, Term b, Span s = {});
Term fst(Term p, Span s = {});
Term snd(Term p, Span s = {});
Term id(Term type, Term lhs, Term rhs, Span s = {});
Term refl(Term point, Span s = {});
Term refl_raw(Span s = {});
Term ind_path(Term motive, Term base, Term target, std::vector<std::string> hints = {"x", "y", "p", "x"},
              Span s = {});
Term ext_type(Term cube, Term shape, Term codomain, Term boundary = nullptr, Term boundary_term = nullptr,
              std::string hint = "t", Span s = {});
Term ext_lambda(Term body, std::string hint = "t", Span s = {});
Term ext_app(Term fn, Term point, Span s = {});
Term annot(Term term, Term type, Span s = {});
Term cases(std::vector<Term> alternating, Span s = {});
Term rec_bot(Span s = {});
Term path_eq(Term lhs, Term rhs, Span s = {});
Term cube2(Span s = {});
Term cube_unit(Span s = {});
Term cube_product(Term l, Term r, Span s = {});
Term zero(Span s = {});
Term one(Span s = {});
Term top(Span s = {});
Term bottom(Span s = {});
Term leq(Term a, Term b, Span s = {});
Term point_eq(Term a, Term b, Span s = {});
Term conj(Term a, Term b, Span s = {});
Term disj(Term a, Term b, Span s = {});
/// Same node with new children (kind, payload, hints and span are kept).
Term rebuild(const Node& n, std::vector<Term> kids);
}  // namespace mk

/// Shifts every variable with index >= `from` up by `by`.
Term weaken(const Term& t, int by, int from = 0);

/// Replaces variable `level` with `value` and closes the gap: indices above
/// `level` drop by one. `value` lives in the resulting context.
Term substitute(const Term& body, int level, const Term& value);

/// Instantiates a single binder: body^1[value].
inline Term instantiate(const Term& body, const Term& value) { return substitute(body, 0, value); }

/// Instantiates `values.size()` binders; values[0] is the outermost binder.
Term instantiate_many(const Term& body, const std::vector<Term>& values);

/// Structural equality ignoring spans and binder hints.
bool alpha_equal(const Term& a, const Term& b);

/// True when no variable index escapes `depth` enclosing binders.
bool well_scoped(const Term& t, int depth);

/// True when variable `index` occurs free.
bool occurs(const Term& t, int index);

/// Distinct constant names mentioned anywhere in `t`, in first-occurrence order.
void collect_constants(const Term& t, std::vector<std::string>& out);

std::size_t term_size(const Term& t);

/// Human-readable rendering in surface notation. `names` are the context
/// names, innermost last.
std::string show(const Term& t, std::vector<std::string> names = {});

}  // namespace stt
