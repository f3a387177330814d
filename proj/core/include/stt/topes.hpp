#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

// Decision procedure for the tope logic of the strict interval: the coherent
// theory of a bounded total order with distinct endpoints 0 < 1.
//
// Formulas here are already flattened: every interval coordinate of the cube
// context is an atom numbered 0..n-1. The checker translates core terms into
// this representation (see checker.cpp, `TopeTranslator`).
namespace stt::topes {

struct Point {
    enum class Kind { Zero, One, Atom };
    Kind kind = Kind::Zero;
    int atom = -1;

    static Point zero() { return {Kind::Zero, -1}; }
    static Point one() { return {Kind::One, -1}; }
    static Point var(int a) { return {Kind::Atom, a}; }

    friend bool operator==(const Point&, const Point&) = default;
};

enum class FormulaKind { Top, Bottom, Leq, Eq, And, Or };

struct Formula {
    FormulaKind kind = FormulaKind::Top;
    Point lhs, rhs;              // Leq, Eq
    std::vector<Formula> parts;  // And, Or: exactly two

    static Formula top() { return {}; }
    static Formula bottom() { return {FormulaKind::Bottom, {}, {}, {}}; }
    static Formula leq(Point a, Point b) { return {FormulaKind::Leq, a, b, {}}; }
    static Formula eq(Point a, Point b) { return {FormulaKind::Eq, a, b, {}}; }
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);

    friend bool operator==(const Formula&, const Formula&) = default;

    /// Number of nodes; finite by construction.
    std::size_t size() const;
    /// Largest atom index mentioned, or -1.
    int max_atom() const;
};

std::string to_string(const Formula& f);

/// A finite model: every atom is placed on a chain 0 = c_0 < c_1 < ... < c_top = 1.
/// rank[a] is the chain position of atom a; positions 1..top-1 are all used.
struct WeakOrderModel {
    std::vector<int> rank;
    int top = 1;

    int value(Point p) const;
    friend bool operator==(const WeakOrderModel&, const WeakOrderModel&) = default;
};

bool evaluate(const Formula& f, const WeakOrderModel& m);

/// All weak orderings of {0} + atoms + {1} with fixed endpoints that satisfy
/// every hypothesis. Deterministic order.
std::vector<WeakOrderModel> enumerate_models(std::size_t atom_count,
                                             const std::vector<Formula>& hypotheses);

/// Entailment by model enumeration. Slow but obviously correct; this is the
/// reference the fast path is tested against.
bool entails_by_enumeration(std::size_t atom_count, const std::vector<Formula>& hypotheses,
                            const Formula& goal);

/// Production entailment: case splitting on disjunctions plus strict-cycle
/// detection on the order graph, memoized on a canonical key.
bool tope_entails(std::size_t atom_count, const std::vector<Formula>& hypotheses,
                  const Formula& goal);

/// Same decision procedure without consulting or filling the memo table.
bool tope_entails_uncached(std::size_t atom_count, const std::vector<Formula>& hypotheses,
                           const Formula& goal);

bool tope_consistent(std::size_t atom_count, const std::vector<Formula>& hypotheses);

/// First model of the hypotheses in which the goal fails, if any.
std::optional<WeakOrderModel> countermodel(std::size_t atom_count,
                                           const std::vector<Formula>& hypotheses,
                                           const Formula& goal);

/// "0", "1", "mid" (single interior level) or "mid1", "mid2", ... per atom.
std::vector<std::string> describe(const WeakOrderModel& m);

/// Canonical memo key: hypotheses sorted, atoms renamed by first occurrence.
std::string canonical_key(const std::vector<Formula>& hypotheses, const Formula& goal);

struct MemoStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
};
MemoStats memo_stats();
void clear_memo();

}  // namespace stt::topes
