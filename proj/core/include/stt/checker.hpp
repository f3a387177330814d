#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stt/diagnostic.hpp"
#include "stt/resolve.hpp"
#include "stt/term.hpp"
#include "stt/topes.hpp"

namespace stt {

/// A checked (or failed) top-level declaration. Terms are elaborated.
struct GlobalEntry {
    std::string name;
    std::string file;
    Span span;
    bool postulate = false;
    bool failed = false;
    Term type;
    Term body;                         // null for postulates and failures
    std::vector<std::string> axioms;   // transitive postulates used, sorted
};
using GlobalPtr = std::shared_ptr<const GlobalEntry>;

struct CheckSettings {
    int max_unfold = 10000;
};

struct CheckEnv {
    std::unordered_map<std::string, GlobalPtr> globals;
    CheckSettings settings;

    const GlobalEntry* find(const std::string& name) const {
        auto it = globals.find(name);
        return it == globals.end() ? nullptr : it->second.get();
    }
};

/// Typing context: cube variables and term variables share one index space;
/// tope hypotheses are kept alongside.
class Context {
public:
    struct Entry {
        bool cube = false;
        Term type;  // the cube sort for cube variables
        std::string name;
    };

    Context();

    int depth() const { return static_cast<int>(entries_.size()); }
    const Entry& entry(int index) const { return entries_[entries_.size() - 1 - static_cast<std::size_t>(index)]; }
    bool is_cube(int index) const { return entry(index).cube; }
    /// Type of variable `index`, weakened into the current context.
    Term type_of_var(int index) const;

    Context with_term(Term type, std::string name) const;
    Context with_cube(Term cube, std::string name) const;
    /// Adds a hypothesis; conjunctions are split into separate hypotheses.
    Context with_tope(const Term& tope) const;

    std::vector<std::string> names() const;
    std::size_t tope_count() const { return topes_.size(); }
    /// Hypothesis `i`, weakened into the current context.
    Term tope(std::size_t i) const;
    Context with_tope_replaced(std::size_t i, const Term& tope) const;

    struct Zone;
    const Zone& zone() const;

private:
    std::vector<Entry> entries_;
    std::vector<std::pair<Term, int>> topes_;  // hypothesis and the depth it was added at
    mutable std::shared_ptr<Zone> zone_;
};

struct CheckError {
    Diagnostic diag;
};

struct UnfoldDepthExceeded {};

/// Counters for reductions performed anywhere in the process.
struct ReductionStats {
    std::size_t j_steps = 0;
    std::size_t boundary_steps = 0;
    std::size_t unfolds = 0;
};
ReductionStats reduction_stats();
void reset_reduction_stats();

class Checker {
public:
    explicit Checker(const CheckEnv& env) : env_(env) {}

    Term whnf(const Context& ctx, const Term& t, bool unfold = true);
    bool def_equal(const Context& ctx, const Term& a, const Term& b, const Term& type);
    bool types_equal(const Context& ctx, const Term& a, const Term& b);

    /// Elaborates `t` and synthesizes its type.
    std::pair<Term, Term> infer(const Context& ctx, const Term& t);
    /// Elaborates `t` against `type`.
    Term check(const Context& ctx, const Term& t, const Term& type);
    /// Elaborates a type; the second component is the universe it lives in
    /// (0 for U, 1 for U₁, 2 for types too large for either).
    std::pair<Term, int> check_type(const Context& ctx, const Term& t);
    Term check_tope(const Context& ctx, const Term& t);
    std::pair<Term, Term> infer_point(const Context& ctx, const Term& t);

    /// Type of an elaborated neutral term; no checking is performed.
    Term type_of(const Context& ctx, const Term& t);
    int type_level(const Context& ctx, const Term& type);

    bool entails(const Context& ctx, const Term& tope);
    bool consistent(const Context& ctx);
    /// Atom assignment of a model of the context's hypotheses falsifying `goal`.
    std::vector<std::pair<std::string, std::string>> countermodel(const Context& ctx, const Term& goal);

    bool hit_unfold_limit() const { return unfold_hit_; }

private:
    Term whnf_(const Context& ctx, const Term& t, bool unfold, int& budget);
    bool conv(const Context& ctx, const Term& a, const Term& b, const Term& type);
    bool structural(const Context& ctx, const Term& a, const Term& b, const Term& type);
    bool rigid(const Context& ctx, const Term& a, const Term& b, const Term& type);
    std::optional<Term> neutral(const Context& ctx, const Term& a, const Term& b);
    bool split(const Context& ctx, const Term& a, const Term& b, const Term& type);
    Term check_point(const Context& ctx, const Term& t, const Term& cube);
    Term check_cube(const Term& t);

    [[noreturn]] void fail(const char* code, const Span& span, std::string message) const;
    [[noreturn]] void mismatch(const Context& ctx, const Span& span, std::string message, const Term& expected,
                               const Term& actual) const;

    const CheckEnv& env_;
    bool unfold_hit_ = false;
};

struct DeclResult {
    GlobalPtr entry;
    std::vector<Diagnostic> diagnostics;
};

/// Elaborates and checks one resolved declaration against `env`.
DeclResult check_declaration(const CheckEnv& env, const Declaration& d, const std::string& file = {});

/// Names of every postulate a term depends on, through definitions in `env`.
std::vector<std::string> axiom_usage(const CheckEnv& env, const Term& type, const Term& body);

struct ModuleResult {
    std::vector<GlobalPtr> entries;  // source order, failed ones included
    std::vector<Diagnostic> diagnostics;
};

/// Resolves and checks declarations in order; `env` grows by every entry.
ModuleResult check_module(CheckEnv& env, const std::vector<syntax::SurfaceDecl>& decls, const std::string& file = {});

}  // namespace stt
