#include "stt/topes.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace stt::topes {

Formula Formula::conj(Formula a, Formula b) {
    Formula f;
    f.kind = FormulaKind::And;
    f.parts = {std::move(a), std::move(b)};
    return f;
}

Formula Formula::disj(Formula a, Formula b) {
    Formula f;
    f.kind = FormulaKind::Or;
    f.parts = {std::move(a), std::move(b)};
    return f;
}

std::size_t Formula::size() const {
    std::size_t n = 1;
    for (const auto& p : parts) n += p.size();
    return n;
}

int Formula::max_atom() const {
    int m = -1;
    if (kind == FormulaKind::Leq || kind == FormulaKind::Eq) {
        m = std::max({m, lhs.atom, rhs.atom});
    }
    for (const auto& p : parts) m = std::max(m, p.max_atom());
    return m;
}

namespace {

void print_point(std::ostream& os, Point p) {
    switch (p.kind) {
        case Point::Kind::Zero: os << '0'; break;
        case Point::Kind::One: os << '1'; break;
        case Point::Kind::Atom: os << 'a' << p.atom; break;
    }
}

void print(std::ostream& os, const Formula& f) {
    switch (f.kind) {
        case FormulaKind::Top: os << "T"; break;
        case FormulaKind::Bottom: os << "F"; break;
        case FormulaKind::Leq:
            print_point(os, f.lhs);
            os << "<=";
            print_point(os, f.rhs);
            break;
        case FormulaKind::Eq:
            print_point(os, f.lhs);
            os << "==";
            print_point(os, f.rhs);
            break;
        case FormulaKind::And:
        case FormulaKind::Or:
            os << (f.kind == FormulaKind::And ? "&(" : "|(");
            print(os, f.parts[0]);
            os << ',';
            print(os, f.parts[1]);
            os << ')';
            break;
    }
}

}  // namespace

std::string to_string(const Formula& f) {
    std::ostringstream os;
    print(os, f);
    return os.str();
}

int WeakOrderModel::value(Point p) const {
    switch (p.kind) {
        case Point::Kind::Zero: return 0;
        case Point::Kind::One: return top;
        case Point::Kind::Atom: return rank.at(static_cast<std::size_t>(p.atom));
    }
    return 0;
}

bool evaluate(const Formula& f, const WeakOrderModel& m) {
    switch (f.kind) {
        case FormulaKind::Top: return true;
        case FormulaKind::Bottom: return false;
        case FormulaKind::Leq: return m.value(f.lhs) <= m.value(f.rhs);
        case FormulaKind::Eq: return m.value(f.lhs) == m.value(f.rhs);
        case FormulaKind::And: return evaluate(f.parts[0], m) && evaluate(f.parts[1], m);
        case FormulaKind::Or: return evaluate(f.parts[0], m) || evaluate(f.parts[1], m);
    }
    return false;
}

std::vector<WeakOrderModel> enumerate_models(std::size_t atom_count,
                                             const std::vector<Formula>& hypotheses) {
    std::vector<WeakOrderModel> out;
    // For each number of interior levels, enumerate assignments onto
    // {0, 1..levels, levels+1} that use every interior level.
    for (std::size_t levels = 0; levels <= atom_count; ++levels) {
        const int top = static_cast<int>(levels) + 1;
        WeakOrderModel m;
        m.top = top;
        m.rank.assign(atom_count, 0);
        while (true) {
            std::vector<bool> used(levels + 2, false);
            for (int r : m.rank) used[static_cast<std::size_t>(r)] = true;
            bool surjective = true;
            for (std::size_t l = 1; l <= levels; ++l) surjective = surjective && used[l];
            if (surjective) {
                bool ok = true;
                for (const auto& h : hypotheses) {
                    if (!evaluate(h, m)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) out.push_back(m);
            }
            // odometer increment
            std::size_t i = 0;
            while (i < atom_count && m.rank[i] == top) m.rank[i++] = 0;
            if (i == atom_count) break;
            ++m.rank[i];
        }
    }
    return out;
}

bool entails_by_enumeration(std::size_t atom_count, const std::vector<Formula>& hypotheses,
                            const Formula& goal) {
    for (const auto& m : enumerate_models(atom_count, hypotheses)) {
        if (!evaluate(goal, m)) return false;
    }
    return true;
}

namespace {

// Negation normal form literals over points. Eq is kept as two Le literals.
struct Literal {
    Point lo, hi;
    bool strict = false;
};

struct Nnf {
    enum class Kind { True, False, Lit, And, Or } kind = Kind::True;
    Literal lit;
    std::vector<Nnf> parts;
};

Nnf lit(Point a, Point b, bool strict) {
    Nnf n;
    n.kind = Nnf::Kind::Lit;
    n.lit = {a, b, strict};
    return n;
}

Nnf binary(Nnf::Kind k, Nnf a, Nnf b) {
    Nnf n;
    n.kind = k;
    n.parts = {std::move(a), std::move(b)};
    return n;
}

Nnf to_nnf(const Formula& f, bool negate) {
    switch (f.kind) {
        case FormulaKind::Top: return Nnf{negate ? Nnf::Kind::False : Nnf::Kind::True, {}, {}};
        case FormulaKind::Bottom: return Nnf{negate ? Nnf::Kind::True : Nnf::Kind::False, {}, {}};
        case FormulaKind::Leq:
            // not (a <= b)  iff  b < a, by totality
            return negate ? lit(f.rhs, f.lhs, true) : lit(f.lhs, f.rhs, false);
        case FormulaKind::Eq:
            if (negate) {
                return binary(Nnf::Kind::Or, lit(f.lhs, f.rhs, true), lit(f.rhs, f.lhs, true));
            }
            return binary(Nnf::Kind::And, lit(f.lhs, f.rhs, false), lit(f.rhs, f.lhs, false));
        case FormulaKind::And:
        case FormulaKind::Or: {
            const bool is_and = (f.kind == FormulaKind::And) != negate;
            return binary(is_and ? Nnf::Kind::And : Nnf::Kind::Or, to_nnf(f.parts[0], negate),
                          to_nnf(f.parts[1], negate));
        }
    }
    return {};
}

// Satisfiability of a conjunction of order literals in a bounded total order:
// unsatisfiable exactly when the order graph has a cycle through a strict edge.
class OrderGraph {
public:
    explicit OrderGraph(std::size_t atoms) : n_(atoms + 2), reach_(n_ * n_, -1) {
        for (std::size_t i = 0; i < n_; ++i) at(i, i) = 0;
        const std::size_t zero = atoms, one = atoms + 1;
        for (std::size_t a = 0; a < atoms; ++a) {
            at(zero, a) = 0;
            at(a, one) = 0;
        }
        at(zero, one) = 1;
    }

    void add(const Literal& l) {
        auto& r = at(node(l.lo), node(l.hi));
        r = std::max(r, l.strict ? 1 : 0);
    }

    bool consistent() {
        for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t i = 0; i < n_; ++i) {
                if (at(i, k) < 0) continue;
                for (std::size_t j = 0; j < n_; ++j) {
                    if (at(k, j) < 0) continue;
                    at(i, j) = std::max(at(i, j), std::max(at(i, k), at(k, j)));
                }
            }
        for (std::size_t i = 0; i < n_; ++i)
            if (at(i, i) > 0) return false;
        return true;
    }

private:
    std::size_t node(Point p) const {
        switch (p.kind) {
            case Point::Kind::Zero: return n_ - 2;
            case Point::Kind::One: return n_ - 1;
            case Point::Kind::Atom: return static_cast<std::size_t>(p.atom);
        }
        return 0;
    }
    int& at(std::size_t i, std::size_t j) { return reach_[i * n_ + j]; }

    std::size_t n_;
    std::vector<int> reach_;
};

bool satisfiable(std::size_t atoms, std::vector<const Nnf*> pending, std::vector<Literal> lits) {
    while (!pending.empty()) {
        const Nnf* f = pending.back();
        pending.pop_back();
        switch (f->kind) {
            case Nnf::Kind::True: break;
            case Nnf::Kind::False: return false;
            case Nnf::Kind::Lit: lits.push_back(f->lit); break;
            case Nnf::Kind::And:
                pending.push_back(&f->parts[0]);
                pending.push_back(&f->parts[1]);
                break;
            case Nnf::Kind::Or: {
                auto left = pending;
                left.push_back(&f->parts[0]);
                if (satisfiable(atoms, std::move(left), lits)) return true;
                pending.push_back(&f->parts[1]);
                break;
            }
        }
    }
    OrderGraph g(atoms);
    for (const auto& l : lits) g.add(l);
    return g.consistent();
}

std::size_t atoms_needed(std::size_t atom_count, const std::vector<Formula>& hyps,
                         const Formula* goal) {
    int m = static_cast<int>(atom_count) - 1;
    for (const auto& h : hyps) m = std::max(m, h.max_atom());
    if (goal) m = std::max(m, goal->max_atom());
    return static_cast<std::size_t>(m + 1);
}

// Renames atoms by first occurrence in a fixed traversal order.
struct Renamer {
    std::unordered_map<int, int> map;
    Point apply(Point p) {
        if (p.kind != Point::Kind::Atom) return p;
        auto [it, inserted] = map.try_emplace(p.atom, static_cast<int>(map.size()));
        return Point::var(it->second);
    }
    Formula apply(const Formula& f) {
        Formula r = f;
        r.lhs = apply(f.lhs);
        r.rhs = apply(f.rhs);
        for (auto& p : r.parts) p = apply(p);
        return r;
    }
};

// Shape of a formula with atoms erased; used to order hypotheses before renaming.
std::string erased(const Formula& f) {
    Formula g = f;
    std::vector<Formula*> stack{&g};
    while (!stack.empty()) {
        Formula* x = stack.back();
        stack.pop_back();
        if (x->lhs.kind == Point::Kind::Atom) x->lhs.atom = 0;
        if (x->rhs.kind == Point::Kind::Atom) x->rhs.atom = 0;
        for (auto& p : x->parts) stack.push_back(&p);
    }
    return to_string(g);
}

struct Memo {
    std::shared_mutex mutex;
    std::unordered_map<std::string, bool> table;
    std::atomic<std::size_t> hits{0}, misses{0};
};

Memo& memo() {
    static Memo m;
    return m;
}

}  // namespace

std::string canonical_key(const std::vector<Formula>& hypotheses, const Formula& goal) {
    std::vector<std::pair<std::string, std::string>> keyed;
    keyed.reserve(hypotheses.size());
    for (const auto& h : hypotheses) keyed.emplace_back(erased(h), to_string(h));
    std::vector<std::size_t> order(hypotheses.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keyed[a] < keyed[b]; });
    Renamer r;
    std::string key;
    for (std::size_t i : order) {
        key += to_string(r.apply(hypotheses[i]));
        key += ';';
    }
    key += "|-";
    key += to_string(r.apply(goal));
    return key;
}

bool tope_entails_uncached(std::size_t atom_count, const std::vector<Formula>& hypotheses,
                           const Formula& goal) {
    std::vector<Nnf> owned;
    owned.reserve(hypotheses.size() + 1);
    for (const auto& h : hypotheses) owned.push_back(to_nnf(h, false));
    owned.push_back(to_nnf(goal, true));
    std::vector<const Nnf*> pending;
    for (const auto& n : owned) pending.push_back(&n);
    return !satisfiable(atoms_needed(atom_count, hypotheses, &goal), std::move(pending), {});
}

bool tope_entails(std::size_t atom_count, const std::vector<Formula>& hypotheses,
                  const Formula& goal) {
    auto& m = memo();
    std::string key = canonical_key(hypotheses, goal);
    {
        std::shared_lock lock(m.mutex);
        auto it = m.table.find(key);
        if (it != m.table.end()) {
            ++m.hits;
            return it->second;
        }
    }
    ++m.misses;
    bool result = tope_entails_uncached(atom_count, hypotheses, goal);
    std::unique_lock lock(m.mutex);
    m.table.emplace(std::move(key), result);
    return result;
}

bool tope_consistent(std::size_t atom_count, const std::vector<Formula>& hypotheses) {
    return !tope_entails(atom_count, hypotheses, Formula::bottom());
}

std::optional<WeakOrderModel> countermodel(std::size_t atom_count,
                                           const std::vector<Formula>& hypotheses,
                                           const Formula& goal) {
    for (auto& m : enumerate_models(atoms_needed(atom_count, hypotheses, &goal), hypotheses)) {
        if (!evaluate(goal, m)) return m;
    }
    return std::nullopt;
}

std::vector<std::string> describe(const WeakOrderModel& m) {
    std::vector<std::string> out;
    out.reserve(m.rank.size());
    for (int r : m.rank) {
        if (r == 0)
            out.emplace_back("0");
        else if (r == m.top)
            out.emplace_back("1");
        else if (m.top == 2)
            out.emplace_back("mid");
        else
            out.push_back("mid" + std::to_string(r));
    }
    return out;
}

MemoStats memo_stats() {
    return {memo().hits.load(), memo().misses.load()};
}

void clear_memo() {
    auto& m = memo();
    std::unique_lock lock(m.mutex);
    m.table.clear();
    m.hits = 0;
    m.misses = 0;
}

}  // namespace stt::topes
