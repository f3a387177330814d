#include "stt/term.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <optional>
#include <sstream>

namespace stt {

std::string_view kind_name(Kind k) {
    switch (k) {
        case Kind::Var: return "Var";
        case Kind::Const: return "Const";
        case Kind::Universe: return "Universe";
        case Kind::Pi: return "Pi";
        case Kind::Lambda: return "Lambda";
        case Kind::App: return "App";
        case Kind::Sigma: return "Sigma";
        case Kind::Pair: return "Pair";
        case Kind::Fst: return "Fst";
        case Kind::Snd: return "Snd";
        case Kind::Id: return "Id";
        case Kind::Refl: return "Refl";
        case Kind::IndPath: return "IndPath";
        case Kind::ExtType: return "ExtType";
        case Kind::ExtLambda: return "ExtLambda";
        case Kind::ExtApp: return "ExtApp";
        case Kind::Annot: return "Annot";
        case Kind::Cases: return "Cases";
        case Kind::RecBot: return "RecBot";
        case Kind::PathEq: return "PathEq";
        case Kind::Cube2: return "Cube2";
        case Kind::CubeUnit: return "CubeUnit";
        case Kind::CubeProduct: return "CubeProduct";
        case Kind::Zero: return "Zero";
        case Kind::One: return "One";
        case Kind::Top: return "Top";
        case Kind::Bottom: return "Bottom";
        case Kind::Leq: return "Leq";
        case Kind::PointEq: return "PointEq";
        case Kind::And: return "And";
        case Kind::Or: return "Or";
    }
    return "?";
}

int binders_of(Kind k, std::size_t child) {
    switch (k) {
        case Kind::Pi:
        case Kind::Sigma:
            return child == 1 ? 1 : 0;
        case Kind::Lambda:
        case Kind::ExtLambda:
            return 1;
        case Kind::IndPath:
            return child == 0 ? 3 : child == 1 ? 1 : 0;
        case Kind::ExtType:
            return child == 0 ? 0 : 1;
        default:
            return 0;
    }
}

namespace mk {
namespace {

Term make(Node n) {
    int bound = n.kind == Kind::Var ? n.index + 1 : 0;
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        assert(n.kids[i]);
        bound = std::max(bound, n.kids[i]->free_bound - binders_of(n.kind, i));
    }
    n.free_bound = bound;
    return std::make_shared<const Node>(std::move(n));
}

Term leaf(Kind k, Span s) {
    Node n;
    n.kind = k;
    n.span = s;
    return make(std::move(n));
}

Term with(Kind k, std::vector<Term> kids, Span s, std::vector<std::string> hints = {}) {
    Node n;
    n.kind = k;
    n.kids = std::move(kids);
    n.hints = std::move(hints);
    n.span = s;
    return make(std::move(n));
}

}  // namespace

Term var(int i, Span s) {
    Node n;
    n.kind = Kind::Var;
    n.index = i;
    n.span = s;
    return make(std::move(n));
}
Term constant(std::string name, Span s) {
    Node n;
    n.kind = Kind::Const;
    n.name = std::move(name);
    n.span = s;
    return make(std::move(n));
}
Term universe(int level, Span s) {
    Node n;
    n.kind = Kind::Universe;
    n.index = level;
    n.span = s;
    return make(std::move(n));
}
Term pi(Term dom, Term cod, std::string hint, Span s) {
    return with(Kind::Pi, {std::move(dom), std::move(cod)}, s, {std::move(hint)});
}
Term lambda(Term body, std::string hint, Span s) { return with(Kind::Lambda, {std::move(body)}, s, {std::move(hint)}); }
Term app(Term fn, Term arg, Span s) { return with(Kind::App, {std::move(fn), std::move(arg)}, s); }
Term sigma(Term a, Term b, std::string hint, Span s) {
    return with(Kind::Sigma, {std::move(a), std::move(b)}, s, {std::move(hint)});
}
Term pair(Term a, Term b, Span s) { return with(Kind::Pair, {std::move(a), std::move(b)}, s); }
Term fst(Term p, Span s) { return with(Kind::Fst, {std::move(p)}, s); }
Term snd(Term p, Span s) { return with(Kind::Snd, {std::move(p)}, s); }
Term id(Term type, Term lhs, Term rhs, Span s) {
    return with(Kind::Id, {std::move(type), std::move(lhs), std::move(rhs)}, s);
}
Term refl(Term point, Span s) { return with(Kind::Refl, {std::move(point)}, s); }
Term refl_raw(Span s) { return leaf(Kind::Refl, s); }
Term ind_path(Term motive, Term base, Term target, std::vector<std::string> hints, Span s) {
    return with(Kind::IndPath, {std::move(motive), std::move(base), std::move(target)}, s, std::move(hints));
}
Term ext_type(Term cube, Term shape, Term codomain, Term boundary, Term boundary_term, std::string hint, Span s) {
    std::vector<Term> kids{std::move(cube), std::move(shape), std::move(codomain)};
    if (boundary) {
        kids.push_back(std::move(boundary));
        kids.push_back(std::move(boundary_term));
    }
    return with(Kind::ExtType, std::move(kids), s, {std::move(hint)});
}
Term ext_lambda(Term body, std::string hint, Span s) {
    return with(Kind::ExtLambda, {std::move(body)}, s, {std::move(hint)});
}
Term ext_app(Term fn, Term point, Span s) { return with(Kind::ExtApp, {std::move(fn), std::move(point)}, s); }
Term annot(Term term, Term type, Span s) { return with(Kind::Annot, {std::move(term), std::move(type)}, s); }
Term cases(std::vector<Term> alternating, Span s) { return with(Kind::Cases, std::move(alternating), s); }
Term rec_bot(Span s) { return leaf(Kind::RecBot, s); }
Term path_eq(Term lhs, Term rhs, Span s) { return with(Kind::PathEq, {std::move(lhs), std::move(rhs)}, s); }
Term cube2(Span s) { return leaf(Kind::Cube2, s); }
Term cube_unit(Span s) { return leaf(Kind::CubeUnit, s); }
Term cube_product(Term l, Term r, Span s) { return with(Kind::CubeProduct, {std::move(l), std::move(r)}, s); }
Term zero(Span s) { return leaf(Kind::Zero, s); }
Term one(Span s) { return leaf(Kind::One, s); }
Term top(Span s) { return leaf(Kind::Top, s); }
Term bottom(Span s) { return leaf(Kind::Bottom, s); }
Term leq(Term a, Term b, Span s) { return with(Kind::Leq, {std::move(a), std::move(b)}, s); }
Term point_eq(Term a, Term b, Span s) { return with(Kind::PointEq, {std::move(a), std::move(b)}, s); }
Term conj(Term a, Term b, Span s) { return with(Kind::And, {std::move(a), std::move(b)}, s); }
Term disj(Term a, Term b, Span s) { return with(Kind::Or, {std::move(a), std::move(b)}, s); }

Term rebuild(const Node& n, std::vector<Term> kids) {
    Node copy;
    copy.kind = n.kind;
    copy.index = n.index;
    copy.name = n.name;
    copy.hints = n.hints;
    copy.span = n.span;
    copy.kids = std::move(kids);
    return make(std::move(copy));
}

}  // namespace mk

namespace {

// Generic traversal: `leaf` is called on every variable with the number of
// binders crossed so far; subtrees whose free variables all lie below the
// cutoff are shared rather than copied.
template <typename OnVar>
Term map_vars(const Term& t, int depth, int cutoff, const OnVar& on_var) {
    if (t->free_bound <= cutoff + depth) return t;
    if (t->kind == Kind::Var) return on_var(*t, depth);
    std::vector<Term> kids;
    kids.reserve(t->kids.size());
    bool changed = false;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        kids.push_back(map_vars(t->kids[i], depth + binders_of(t->kind, i), cutoff, on_var));
        changed = changed || kids.back() != t->kids[i];
    }
    return changed ? mk::rebuild(*t, std::move(kids)) : t;
}

}  // namespace

Term weaken(const Term& t, int by, int from) {
    if (by == 0) return t;
    return map_vars(t, 0, from, [&](const Node& v, int) {
        return mk::var(v.index + by, v.span);
    });
}

Term substitute(const Term& body, int level, const Term& value) {
    return map_vars(body, 0, level, [&](const Node& v, int depth) -> Term {
        int target = level + depth;
        if (v.index == target) return weaken(value, depth, 0);
        return mk::var(v.index - 1, v.span);
    });
}

Term instantiate_many(const Term& body, const std::vector<Term>& values) {
    const int n = static_cast<int>(values.size());
    return map_vars(body, 0, 0, [&](const Node& v, int depth) -> Term {
        int rel = v.index - depth;
        if (rel < n) return weaken(values[static_cast<std::size_t>(n - 1 - rel)], depth, 0);
        return mk::var(v.index - n, v.span);
    });
}

bool alpha_equal(const Term& a, const Term& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->index != b->index || a->name != b->name ||
        a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

bool well_scoped(const Term& t, int depth) { return t->free_bound <= depth; }

bool occurs(const Term& t, int index) {
    if (t->free_bound <= index) return false;
    if (t->kind == Kind::Var) return t->index == index;
    for (std::size_t i = 0; i < t->kids.size(); ++i)
        if (occurs(t->kids[i], index + binders_of(t->kind, i))) return true;
    return false;
}

void collect_constants(const Term& t, std::vector<std::string>& out) {
    if (t->kind == Kind::Const) {
        if (std::find(out.begin(), out.end(), t->name) == out.end()) out.push_back(t->name);
        return;
    }
    for (const auto& k : t->kids) collect_constants(k, out);
}

std::size_t term_size(const Term& t) {
    std::size_t n = 1;
    for (const auto& k : t->kids) n += term_size(k);
    return n;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Prec : int { kOpen = 0, kProduct = 1, kOr = 2, kAnd = 3, kCmp = 4, kApp = 5, kAtom = 6 };

class Shower {
public:
    explicit Shower(std::vector<std::string> names) : names_(std::move(names)) {}

    void print(std::ostream& os, const Term& t, int slot) {
        int own = precedence(*t);
        if (own < slot) os << '(';
        body(os, t);
        if (own < slot) os << ')';
    }

private:
    int precedence(const Node& n) const {
        switch (n.kind) {
            case Kind::Pi:
            case Kind::Lambda:
            case Kind::Sigma:
            case Kind::ExtLambda:
                return kOpen;
            case Kind::CubeProduct: return kProduct;
            case Kind::Or: return kOr;
            case Kind::And: return kAnd;
            case Kind::Leq:
            case Kind::PointEq:
            case Kind::PathEq:
                return kCmp;
            case Kind::Fst:
            case Kind::Snd:
                return component(n.kids[0], n.kind == Kind::Fst) ? kAtom : kApp;
            case Kind::App:
            case Kind::ExtApp:
            case Kind::Id:
            case Kind::IndPath:
                return kApp;
            case Kind::Refl:
                return n.kids.empty() ? kAtom : kApp;
            default:
                return kAtom;
        }
    }

    std::string fresh(const std::string& hint) {
        std::string base = hint.empty() || hint == "_" ? "x" : hint;
        std::string name = base;
        while (std::find(names_.begin(), names_.end(), name) != names_.end()) name += "'";
        return name;
    }

    void under(std::ostream& os, const std::vector<std::string>& bound, const Term& t, int slot) {
        for (const auto& n : bound) names_.push_back(n);
        print(os, t, slot);
        names_.resize(names_.size() - bound.size());
    }

    // "s" for π₁ of a variable bound by the pattern (s,t).
    std::optional<std::string> component(const Term& t, bool first) const {
        if (t->kind != Kind::Var) return std::nullopt;
        int pos = static_cast<int>(names_.size()) - 1 - t->index;
        if (pos < 0) return std::nullopt;
        const std::string& name = names_[static_cast<std::size_t>(pos)];
        if (name.size() < 5 || name.front() != '(' || name.back() != ')') return std::nullopt;
        int depth = 0;
        for (std::size_t i = 1; i + 1 < name.size(); ++i) {
            if (name[i] == '(') ++depth;
            if (name[i] == ')') --depth;
            if (name[i] == ',' && depth == 0)
                return first ? name.substr(1, i - 1) : name.substr(i + 1, name.size() - i - 2);
        }
        return std::nullopt;
    }

    std::string hint(const Node& n, std::size_t i = 0) const {
        return i < n.hints.size() ? n.hints[i] : "x";
    }

    void body(std::ostream& os, const Term& t) {
        const Node& n = *t;
        switch (n.kind) {
            case Kind::Var: {
                int pos = static_cast<int>(names_.size()) - 1 - n.index;
                if (pos >= 0)
                    os << names_[static_cast<std::size_t>(pos)];
                else
                    os << "#" << n.index;
                break;
            }
            case Kind::Const: os << n.name; break;
            case Kind::Universe: os << (n.index == 0 ? "U" : "U₁"); break;
            case Kind::Pi: {
                if (!occurs(n.kids[1], 0)) {
                    print(os, n.kids[0], kProduct);
                    os << " → ";
                    under(os, {"_"}, n.kids[1], kOpen);
                } else {
                    std::string x = fresh(hint(n));
                    os << '(' << x << " : ";
                    print(os, n.kids[0], kOpen);
                    os << ") → ";
                    under(os, {x}, n.kids[1], kOpen);
                }
                break;
            }
            case Kind::Sigma: {
                std::string x = fresh(hint(n));
                os << "Σ (" << x << " : ";
                print(os, n.kids[0], kOpen);
                os << "), ";
                under(os, {x}, n.kids[1], kOpen);
                break;
            }
            case Kind::Lambda:
            case Kind::ExtLambda: {
                std::string x = fresh(hint(n));
                os << "λ " << x << " ↦ ";
                under(os, {x}, n.kids[0], kOpen);
                break;
            }
            case Kind::App:
            case Kind::ExtApp:
                print(os, n.kids[0], kApp);
                os << ' ';
                print(os, n.kids[1], kAtom);
                break;
            case Kind::Pair:
                os << '(';
                print(os, n.kids[0], kOpen);
                os << ", ";
                print(os, n.kids[1], kOpen);
                os << ')';
                break;
            case Kind::Fst:
            case Kind::Snd:
                if (auto part = component(n.kids[0], n.kind == Kind::Fst)) {
                    os << *part;
                    break;
                }
                os << (n.kind == Kind::Fst ? "π₁ " : "π₂ ");
                print(os, n.kids[0], kAtom);
                break;
            case Kind::Id:
                os << "Id";
                for (const auto& k : n.kids) {
                    os << ' ';
                    print(os, k, kAtom);
                }
                break;
            case Kind::Refl:
                os << "refl";
                if (!n.kids.empty()) {
                    os << ' ';
                    print(os, n.kids[0], kAtom);
                }
                break;
            case Kind::IndPath: {
                std::string x = fresh(hint(n, 0));
                names_.push_back(x);
                std::string y = fresh(hint(n, 1));
                names_.push_back(y);
                std::string p = fresh(hint(n, 2));
                names_.resize(names_.size() - 2);
                os << "ind-path (λ " << x << ' ' << y << ' ' << p << " ↦ ";
                under(os, {x, y, p}, n.kids[0], kOpen);
                std::string z = fresh(hint(n, 3));
                os << ") (λ " << z << " ↦ ";
                under(os, {z}, n.kids[1], kOpen);
                os << ") ";
                print(os, n.kids[2], kAtom);
                break;
            }
            case Kind::ExtType: {
                std::string x = fresh(hint(n));
                os << "⟨{" << x << " : ";
                print(os, n.kids[0], kProduct);
                os << " | ";
                under(os, {x}, n.kids[1], kOr);
                os << "} → ";
                under(os, {x}, n.kids[2], kOpen);
                if (n.kids.size() == 5) {
                    os << " | ";
                    under(os, {x}, n.kids[3], kOr);
                    os << " ↦ ";
                    under(os, {x}, n.kids[4], kOpen);
                }
                os << "⟩";
                break;
            }
            case Kind::Annot:
                os << '(';
                print(os, n.kids[0], kOpen);
                os << " : ";
                print(os, n.kids[1], kOpen);
                os << ')';
                break;
            case Kind::Cases:
                os << "rec∨(";
                for (std::size_t i = 0; i + 1 < n.kids.size(); i += 2) {
                    if (i) os << ", ";
                    print(os, n.kids[i], kOr);
                    os << " ↦ ";
                    print(os, n.kids[i + 1], kOpen);
                }
                os << ')';
                break;
            case Kind::RecBot: os << "rec⊥"; break;
            case Kind::PathEq:
                print(os, n.kids[0], kApp);
                os << " ∼ ";
                print(os, n.kids[1], kApp);
                break;
            case Kind::Cube2: os << "2"; break;
            case Kind::CubeUnit: os << "1"; break;
            case Kind::CubeProduct:
                print(os, n.kids[0], kOr);
                os << " × ";
                print(os, n.kids[1], kProduct);
                break;
            case Kind::Zero: os << "0"; break;
            case Kind::One: os << "1"; break;
            case Kind::Top: os << "⊤"; break;
            case Kind::Bottom: os << "⊥"; break;
            case Kind::Leq:
            case Kind::PointEq:
                print(os, n.kids[0], kApp);
                os << (n.kind == Kind::Leq ? " ≤ " : " ≡ ");
                print(os, n.kids[1], kApp);
                break;
            case Kind::And:
                print(os, n.kids[0], kAnd);
                os << " ∧ ";
                print(os, n.kids[1], kCmp);
                break;
            case Kind::Or:
                print(os, n.kids[0], kOr);
                os << " ∨ ";
                print(os, n.kids[1], kAnd);
                break;
        }
    }

    std::vector<std::string> names_;
};

}  // namespace

std::string show(const Term& t, std::vector<std::string> names) {
    std::ostringstream os;
    Shower(std::move(names)).print(os, t, kOpen);
    return os.str();
}

}  // namespace stt
