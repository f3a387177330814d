#include "oracles.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

using stt::Kind;
using stt::Term;
using stt::topes::Formula;
using stt::topes::FormulaKind;
using stt::topes::Point;

namespace oracle {

int binder_count(Kind k, std::size_t child) {
    switch (k) {
        case Kind::Pi:
        case Kind::Sigma: return child == 1;
        case Kind::Lambda:
        case Kind::ExtLambda: return 1;
        case Kind::IndPath: return child == 0 ? 3 : child == 1 ? 1 : 0;
        case Kind::ExtType: return child >= 1;
        default: return 0;
    }
}

std::string free_name(int i) { return "v" + std::to_string(i); }

namespace {

// Free indices of a nameless term, relative to its root.
void free_indices(const Term& t, int depth, std::set<int>& out) {
    if (t->kind == Kind::Var) {
        if (t->index >= depth) out.insert(t->index - depth);
        return;
    }
    for (std::size_t i = 0; i < t->kids.size(); ++i) free_indices(t->kids[i], depth + binder_count(t->kind, i), out);
}

// Preferred binder names overlap the free-variable names on purpose, so that
// substitution has captures to avoid.
const std::vector<std::string> kPool{"a", "b", "v0", "v1", "v2", "c", "v3"};

std::string pick(const std::set<std::string>& avoid, std::size_t start) {
    for (std::size_t i = 0; i < kPool.size(); ++i) {
        const std::string& n = kPool[(start + i) % kPool.size()];
        if (!avoid.count(n)) return n;
    }
    for (int i = 0;; ++i) {
        std::string n = "w" + std::to_string(i);
        if (!avoid.count(n)) return n;
    }
}

Named named(const Term& t, std::vector<std::string>& env, const std::vector<std::string>& free_names) {
    Named n;
    n.kind = t->kind;
    if (t->kind == Kind::Var) {
        int i = t->index;
        int e = static_cast<int>(env.size());
        n.name = i < e ? env[static_cast<std::size_t>(e - 1 - i)] : free_names.at(static_cast<std::size_t>(i - e));
        return n;
    }
    n.level = t->index;
    n.name = t->name;
    for (std::size_t c = 0; c < t->kids.size(); ++c) {
        int nb = binder_count(t->kind, c);
        std::vector<std::string> bs;
        if (nb > 0) {
            // Names of the outer variables the child refers to must stay visible.
            std::set<int> escaping;
            free_indices(t->kids[c], nb, escaping);
            std::set<std::string> avoid;
            int e = static_cast<int>(env.size());
            for (int i : escaping)
                avoid.insert(i < e ? env[static_cast<std::size_t>(e - 1 - i)] : free_names.at(static_cast<std::size_t>(i - e)));
            for (int b = 0; b < nb; ++b) {
                std::string name = pick(avoid, env.size() + c + static_cast<std::size_t>(b));
                avoid.insert(name);
                bs.push_back(name);
            }
        }
        for (const auto& b : bs) env.push_back(b);
        n.kids.push_back(named(t->kids[c], env, free_names));
        env.resize(env.size() - bs.size());
        n.binders.push_back(bs);
    }
    return n;
}

void collect_free(const Named& t, std::vector<std::string>& bound, std::set<std::string>& out) {
    if (t.kind == Kind::Var) {
        if (std::find(bound.begin(), bound.end(), t.name) == bound.end()) out.insert(t.name);
        return;
    }
    for (std::size_t c = 0; c < t.kids.size(); ++c) {
        for (const auto& b : t.binders[c]) bound.push_back(b);
        collect_free(t.kids[c], bound, out);
        bound.resize(bound.size() - t.binders[c].size());
    }
}

std::set<std::string> fv(const Named& t) {
    std::vector<std::string> bound;
    std::set<std::string> out;
    collect_free(t, bound, out);
    return out;
}

Term build(const Named& n, std::vector<std::string>& env, const std::map<std::string, int>& index_of) {
    if (n.kind == Kind::Var) {
        for (std::size_t i = env.size(); i-- > 0;)
            if (env[i] == n.name) return stt::mk::var(static_cast<int>(env.size() - 1 - i));
        auto it = index_of.find(n.name);
        if (it == index_of.end()) throw std::logic_error("oracle: unscoped name " + n.name);
        return stt::mk::var(it->second + static_cast<int>(env.size()));
    }
    std::vector<Term> kids;
    for (std::size_t c = 0; c < n.kids.size(); ++c) {
        for (const auto& b : n.binders[c]) env.push_back(b);
        kids.push_back(build(n.kids[c], env, index_of));
        env.resize(env.size() - n.binders[c].size());
    }
    stt::Node shell;
    shell.kind = n.kind;
    shell.index = n.level;
    shell.name = n.name;
    return stt::mk::rebuild(shell, std::move(kids));
}

}  // namespace

Named to_named(const Term& t, const std::vector<std::string>& free_names) {
    std::vector<std::string> env;
    return named(t, env, free_names);
}

Term from_named(const Named& n, const std::map<std::string, int>& index_of) {
    std::vector<std::string> env;
    return build(n, env, index_of);
}

std::vector<std::string> free_vars(const Named& t) {
    auto s = fv(t);
    return {s.begin(), s.end()};
}

Named substitute(const Named& t, const std::map<std::string, Named>& sigma) {
    if (t.kind == Kind::Var) {
        auto it = sigma.find(t.name);
        return it == sigma.end() ? t : it->second;
    }
    Named out = t;
    for (std::size_t c = 0; c < t.kids.size(); ++c) {
        std::vector<std::string> bs = t.binders[c];
        Named kid = t.kids[c];
        std::map<std::string, Named> inner = sigma;
        for (const auto& b : bs) inner.erase(b);
        // Only entries that actually reach the child matter for capture.
        std::set<std::string> kid_free = fv(kid);
        std::set<std::string> incoming;
        for (const auto& [x, v] : inner)
            if (kid_free.count(x))
                for (const auto& y : fv(v)) incoming.insert(y);
        for (auto& b : bs) {
            if (!incoming.count(b)) continue;
            std::set<std::string> avoid = incoming;
            for (const auto& y : kid_free) avoid.insert(y);
            for (const auto& other : bs) avoid.insert(other);
            for (const auto& [x, v] : inner) avoid.insert(x);
            std::string fresh;
            for (int i = 0;; ++i) {
                fresh = b + "_" + std::to_string(i);
                if (!avoid.count(fresh)) break;
            }
            Named var;
            var.kind = Kind::Var;
            var.name = fresh;
            kid = substitute(kid, {{b, var}});
            b = fresh;
        }
        out.kids[c] = substitute(kid, inner);
        out.binders[c] = bs;
    }
    return out;
}

namespace {

Term leaf_point(std::mt19937& rng, int scope) {
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: return stt::mk::zero();
        case 1: return stt::mk::one();
        default:
            return scope > 0 ? stt::mk::var(std::uniform_int_distribution<int>(0, scope - 1)(rng)) : stt::mk::zero();
    }
}

Term gen(std::mt19937& rng, int scope, int depth) {
    auto pick_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    if (depth <= 0 || pick_int(0, 9) < 2) {
        int r = pick_int(0, 9);
        if (scope > 0 && r < 6) return stt::mk::var(pick_int(0, scope - 1));
        if (r < 8) return stt::mk::constant(std::string(1, static_cast<char>('c' + pick_int(0, 3))));
        return stt::mk::universe(pick_int(0, 1));
    }
    int d = depth - 1;
    switch (pick_int(0, 13)) {
        case 0: return stt::mk::pi(gen(rng, scope, d), gen(rng, scope + 1, d));
        case 1: return stt::mk::lambda(gen(rng, scope + 1, d));
        case 2: return stt::mk::app(gen(rng, scope, d), gen(rng, scope, d));
        case 3: return stt::mk::sigma(gen(rng, scope, d), gen(rng, scope + 1, d));
        case 4: return stt::mk::pair(gen(rng, scope, d), gen(rng, scope, d));
        case 5: return pick_int(0, 1) ? stt::mk::fst(gen(rng, scope, d)) : stt::mk::snd(gen(rng, scope, d));
        case 6: return stt::mk::id(gen(rng, scope, d), gen(rng, scope, d), gen(rng, scope, d));
        case 7: return stt::mk::refl(gen(rng, scope, d));
        case 8: return stt::mk::ind_path(gen(rng, scope + 3, d), gen(rng, scope + 1, d), gen(rng, scope, d));
        case 9:
            return stt::mk::ext_type(stt::mk::cube2(),
                                     stt::mk::leq(leaf_point(rng, scope + 1), leaf_point(rng, scope + 1)),
                                     gen(rng, scope + 1, d),
                                     stt::mk::disj(stt::mk::point_eq(stt::mk::var(0), stt::mk::zero()),
                                                   stt::mk::point_eq(leaf_point(rng, scope + 1), stt::mk::one())),
                                     gen(rng, scope + 1, d));
        case 10: return stt::mk::ext_lambda(gen(rng, scope + 1, d));
        case 11: return stt::mk::ext_app(gen(rng, scope, d), leaf_point(rng, scope));
        case 12:
            return stt::mk::cases({stt::mk::leq(leaf_point(rng, scope), leaf_point(rng, scope)), gen(rng, scope, d),
                                   stt::mk::top(), gen(rng, scope, d)});
        default: return stt::mk::annot(gen(rng, scope, d), gen(rng, scope, d));
    }
}

std::vector<std::string> names_upto(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(free_name(i));
    return out;
}

}  // namespace

Term random_term(std::mt19937& rng, int free, int depth) { return gen(rng, free, depth); }

Term ref_weaken(const Term& t, int by, int from, int free) {
    Named n = to_named(t, names_upto(free));
    std::map<std::string, int> index_of;
    for (int k = 0; k < free; ++k) index_of[free_name(k)] = k < from ? k : k + by;
    return from_named(n, index_of);
}

Term ref_substitute(const Term& body, int level, const Term& value, int free) {
    Named b = to_named(body, names_upto(free));
    std::vector<std::string> value_names;
    for (int j = 0; j + 1 < free; ++j) value_names.push_back(free_name(j < level ? j : j + 1));
    Named v = to_named(value, value_names);
    Named r = substitute(b, {{free_name(level), v}});
    std::map<std::string, int> index_of;
    for (int k = 0; k < free; ++k)
        if (k != level) index_of[free_name(k)] = k < level ? k : k - 1;
    return from_named(r, index_of);
}

Term ref_instantiate_many(const Term& body, const std::vector<Term>& values, int free) {
    int n = static_cast<int>(values.size());
    Named b = to_named(body, names_upto(free));
    std::vector<std::string> value_names;
    for (int j = 0; j + n < free; ++j) value_names.push_back(free_name(j + n));
    std::map<std::string, Named> sigma;
    for (int i = 0; i < n; ++i)
        sigma[free_name(i)] = to_named(values[static_cast<std::size_t>(n - 1 - i)], value_names);
    Named r = substitute(b, sigma);
    std::map<std::string, int> index_of;
    for (int k = n; k < free; ++k) index_of[free_name(k)] = k - n;
    return from_named(r, index_of);
}

// ---------------------------------------------------------------------------

namespace {

int value_of(const Point& p, const std::vector<int>& values, int top) {
    switch (p.kind) {
        case Point::Kind::Zero: return 0;
        case Point::Kind::One: return top;
        case Point::Kind::Atom: return values.at(static_cast<std::size_t>(p.atom));
    }
    return 0;
}

// Calls `visit` on every assignment of {0..n+1} to n atoms.
template <typename Visit>
void each_assignment(std::size_t atoms, Visit visit) {
    int top = static_cast<int>(atoms) + 1;
    std::vector<int> values(atoms, 0);
    while (true) {
        visit(values, top);
        std::size_t i = 0;
        while (i < atoms && values[i] == top) values[i++] = 0;
        if (i == atoms) return;
        ++values[i];
    }
}

}  // namespace

bool holds(const Formula& f, const std::vector<int>& values, int top) {
    switch (f.kind) {
        case FormulaKind::Top: return true;
        case FormulaKind::Bottom: return false;
        case FormulaKind::Leq: return value_of(f.lhs, values, top) <= value_of(f.rhs, values, top);
        case FormulaKind::Eq: return value_of(f.lhs, values, top) == value_of(f.rhs, values, top);
        case FormulaKind::And: return holds(f.parts[0], values, top) && holds(f.parts[1], values, top);
        case FormulaKind::Or: return holds(f.parts[0], values, top) || holds(f.parts[1], values, top);
    }
    return false;
}

bool entails(std::size_t atoms, const std::vector<Formula>& hyps, const Formula& goal) {
    bool ok = true;
    each_assignment(atoms, [&](const std::vector<int>& v, int top) {
        if (!ok) return;
        for (const auto& h : hyps)
            if (!holds(h, v, top)) return;
        if (!holds(goal, v, top)) ok = false;
    });
    return ok;
}

std::size_t count_order_types(std::size_t atoms, const std::vector<Formula>& hyps) {
    std::set<std::vector<int>> types;
    each_assignment(atoms, [&](const std::vector<int>& v, int top) {
        for (const auto& h : hyps)
            if (!holds(h, v, top)) return;
        std::vector<int> levels(v.begin(), v.end());
        levels.push_back(0);
        levels.push_back(top);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        std::vector<int> type;
        for (int x : v)
            type.push_back(static_cast<int>(std::lower_bound(levels.begin(), levels.end(), x) - levels.begin()));
        type.push_back(static_cast<int>(levels.size()));
        types.insert(type);
    });
    return types.size();
}

std::vector<Formula> atomic_formulas(std::size_t atoms) {
    std::vector<Point> points{Point::zero(), Point::one()};
    for (std::size_t a = 0; a < atoms; ++a) points.push_back(Point::var(static_cast<int>(a)));
    std::vector<Formula> out;
    for (const auto& p : points)
        for (const auto& q : points) {
            out.push_back(Formula::leq(p, q));
            out.push_back(Formula::eq(p, q));
        }
    return out;
}

Formula random_formula(std::mt19937& rng, std::size_t atoms, int depth) {
    auto pick_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto point = [&]() {
        int r = pick_int(0, static_cast<int>(atoms) + 1);
        if (r == 0) return Point::zero();
        if (r == 1) return Point::one();
        return Point::var(r - 2);
    };
    int r = pick_int(0, 9);
    if (depth <= 0 || r < 5) {
        if (r == 9) return pick_int(0, 1) ? Formula::top() : Formula::bottom();
        return pick_int(0, 2) ? Formula::leq(point(), point()) : Formula::eq(point(), point());
    }
    Formula a = random_formula(rng, atoms, depth - 1);
    Formula b = random_formula(rng, atoms, depth - 1);
    return r < 7 ? Formula::conj(a, b) : Formula::disj(a, b);
}

}  // namespace oracle
