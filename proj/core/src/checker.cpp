#include "stt/checker.hpp"

#include <algorithm>
#include <atomic>
#include <set>

namespace stt {

namespace {

std::atomic<std::size_t> g_j_steps{0};
std::atomic<std::size_t> g_boundary_steps{0};
std::atomic<std::size_t> g_unfolds{0};

}  // namespace

ReductionStats reduction_stats() {
    return {g_j_steps.load(), g_boundary_steps.load(), g_unfolds.load()};
}

void reset_reduction_stats() {
    g_j_steps = 0;
    g_boundary_steps = 0;
    g_unfolds = 0;
}

// ---------------------------------------------------------------------------
// Tope zone: cube variables flattened into interval atoms.

struct PointValue {
    enum class Kind { Atom, Zero, One, Unit, Pair } kind = Kind::Zero;
    int atom = -1;
    std::shared_ptr<const PointValue> left, right;
};
using PV = std::shared_ptr<const PointValue>;

struct Context::Zone {
    std::vector<PV> by_level;  // null for term variables
    std::vector<std::string> atom_names;
    std::vector<topes::Formula> hyps;
    std::optional<bool> consistent;
    bool built = false;
};

namespace {

PV make_pv(PointValue::Kind k, int atom = -1, PV l = nullptr, PV r = nullptr) {
    return std::make_shared<const PointValue>(PointValue{k, atom, std::move(l), std::move(r)});
}

// Splits "(a,b)" at its top-level comma.
bool split_tuple_hint(const std::string& h, std::string& a, std::string& b) {
    if (h.size() < 5 || h.front() != '(' || h.back() != ')') return false;
    int depth = 0;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) {
        if (h[i] == '(') ++depth;
        if (h[i] == ')') --depth;
        if (h[i] == ',' && depth == 0) {
            a = h.substr(1, i - 1);
            b = h.substr(i + 1, h.size() - i - 2);
            return true;
        }
    }
    return false;
}

PV flatten_cube(const Term& cube, const std::string& name, std::vector<std::string>& atom_names) {
    switch (cube->kind) {
        case Kind::Cube2:
            atom_names.push_back(name);
            return make_pv(PointValue::Kind::Atom, static_cast<int>(atom_names.size()) - 1);
        case Kind::CubeProduct: {
            std::string a, b;
            if (!split_tuple_hint(name, a, b)) {
                a = "π₁ " + name;
                b = "π₂ " + name;
            }
            PV l = flatten_cube(cube->kids[0], a, atom_names);
            PV r = flatten_cube(cube->kids[1], b, atom_names);
            return make_pv(PointValue::Kind::Pair, -1, l, r);
        }
        default:
            return make_pv(PointValue::Kind::Unit);
    }
}

struct Untranslatable {};

PV translate_point(const Context::Zone& z, const Term& t, int depth) {
    switch (t->kind) {
        case Kind::Var: {
            int level = depth - 1 - t->index;
            if (level < 0 || level >= static_cast<int>(z.by_level.size()) || !z.by_level[level])
                throw Untranslatable{};
            return z.by_level[level];
        }
        case Kind::Zero: return make_pv(PointValue::Kind::Zero);
        case Kind::One: return make_pv(PointValue::Kind::One);
        case Kind::Pair:
            return make_pv(PointValue::Kind::Pair, -1, translate_point(z, t->kids[0], depth),
                           translate_point(z, t->kids[1], depth));
        case Kind::Fst:
        case Kind::Snd: {
            PV p = translate_point(z, t->kids[0], depth);
            if (p->kind != PointValue::Kind::Pair) throw Untranslatable{};
            return t->kind == Kind::Fst ? p->left : p->right;
        }
        default:
            throw Untranslatable{};
    }
}

topes::Point scalar(const PV& p) {
    switch (p->kind) {
        case PointValue::Kind::Atom: return topes::Point::var(p->atom);
        case PointValue::Kind::Zero: return topes::Point::zero();
        case PointValue::Kind::One: return topes::Point::one();
        default: throw Untranslatable{};
    }
}

topes::Formula point_equality(const PV& a, const PV& b) {
    if (a->kind == PointValue::Kind::Pair && b->kind == PointValue::Kind::Pair)
        return topes::Formula::conj(point_equality(a->left, b->left), point_equality(a->right, b->right));
    if (a->kind == PointValue::Kind::Unit && b->kind == PointValue::Kind::Unit) return topes::Formula::top();
    return topes::Formula::eq(scalar(a), scalar(b));
}

topes::Formula translate_tope(const Context::Zone& z, const Term& t, int depth) {
    switch (t->kind) {
        case Kind::Top: return topes::Formula::top();
        case Kind::Bottom: return topes::Formula::bottom();
        case Kind::Leq:
            return topes::Formula::leq(scalar(translate_point(z, t->kids[0], depth)),
                                       scalar(translate_point(z, t->kids[1], depth)));
        case Kind::PointEq:
            return point_equality(translate_point(z, t->kids[0], depth), translate_point(z, t->kids[1], depth));
        case Kind::And:
            return topes::Formula::conj(translate_tope(z, t->kids[0], depth), translate_tope(z, t->kids[1], depth));
        case Kind::Or:
            return topes::Formula::disj(translate_tope(z, t->kids[0], depth), translate_tope(z, t->kids[1], depth));
        default:
            throw Untranslatable{};
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Context

Context::Context() : zone_(std::make_shared<Zone>()) {}

Term Context::type_of_var(int index) const { return weaken(entry(index).type, index + 1); }

Context Context::with_term(Term type, std::string name) const {
    Context c = *this;
    c.entries_.push_back({false, std::move(type), std::move(name)});
    return c;  // the tope zone is unchanged, so the cache is shared
}

Context Context::with_cube(Term cube, std::string name) const {
    Context c = *this;
    c.entries_.push_back({true, std::move(cube), std::move(name)});
    c.zone_ = std::make_shared<Zone>();
    return c;
}

Context Context::with_tope(const Term& tope) const {
    if (tope->kind == Kind::And) return with_tope(tope->kids[0]).with_tope(tope->kids[1]);
    Context c = *this;
    if (tope->kind == Kind::Top) return c;
    c.topes_.emplace_back(tope, depth());
    c.zone_ = std::make_shared<Zone>();
    return c;
}

Term Context::tope(std::size_t i) const { return weaken(topes_[i].first, depth() - topes_[i].second); }

Context Context::with_tope_replaced(std::size_t i, const Term& tope) const {
    Context c = *this;
    c.topes_.erase(c.topes_.begin() + static_cast<std::ptrdiff_t>(i));
    c.zone_ = std::make_shared<Zone>();
    return c.with_tope(tope);
}

std::vector<std::string> Context::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

const Context::Zone& Context::zone() const {
    if (zone_->built) return *zone_;
    auto z = std::make_shared<Zone>();
    for (const auto& e : entries_)
        z->by_level.push_back(e.cube ? flatten_cube(e.type, e.name, z->atom_names) : nullptr);
    for (const auto& [t, d] : topes_) {
        try {
            z->hyps.push_back(translate_tope(*z, t, d));
        } catch (const Untranslatable&) {
            z->hyps.push_back(topes::Formula::top());
        }
    }
    z->built = true;
    *zone_ = std::move(*z);
    return *zone_;
}

// ---------------------------------------------------------------------------
// Diagnostics helpers

void Checker::fail(const char* code, const Span& span, std::string message) const {
    Diagnostic d;
    d.code = code;
    d.span = span;
    d.message = std::move(message);
    throw CheckError{std::move(d)};
}

void Checker::mismatch(const Context& ctx, const Span& span, std::string message, const Term& expected,
                       const Term& actual) const {
    Diagnostic d;
    d.code = unfold_hit_ ? code::kUnfoldDepth : code::kTypeMismatch;
    if (unfold_hit_) message += " (definition unfolding limit reached)";
    d.span = span;
    d.message = std::move(message);
    auto names = ctx.names();
    if (expected) d.expected = show(expected, names);
    if (actual) d.actual = show(actual, names);
    throw CheckError{std::move(d)};
}

// ---------------------------------------------------------------------------
// Topes

bool Checker::entails(const Context& ctx, const Term& tope) {
    if (tope->kind == Kind::Top) return true;
    const Context::Zone& z = ctx.zone();
    topes::Formula goal;
    try {
        goal = translate_tope(z, tope, ctx.depth());
    } catch (const Untranslatable&) {
        return false;
    }
    return topes::tope_entails(z.atom_names.size(), z.hyps, goal);
}

bool Checker::consistent(const Context& ctx) {
    if (ctx.tope_count() == 0) return true;
    const Context::Zone& z = ctx.zone();
    if (!z.consistent) const_cast<Context::Zone&>(z).consistent = topes::tope_consistent(z.atom_names.size(), z.hyps);
    return *z.consistent;
}

std::vector<std::pair<std::string, std::string>> Checker::countermodel(const Context& ctx, const Term& goal) {
    const Context::Zone& z = ctx.zone();
    topes::Formula g = topes::Formula::bottom();
    try {
        g = translate_tope(z, goal, ctx.depth());
    } catch (const Untranslatable&) {
    }
    std::vector<std::pair<std::string, std::string>> out;
    auto m = topes::countermodel(z.atom_names.size(), z.hyps, g);
    if (!m) return out;
    auto values = topes::describe(*m);
    for (std::size_t i = 0; i < z.atom_names.size(); ++i) out.emplace_back(z.atom_names[i], values[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Term Checker::whnf(const Context& ctx, const Term& t, bool unfold) {
    int budget = env_.settings.max_unfold;
    return whnf_(ctx, t, unfold, budget);
}

Term Checker::whnf_(const Context& ctx, const Term& t, bool unfold, int& budget) {
    switch (t->kind) {
        case Kind::Annot: return whnf_(ctx, t->kids[0], unfold, budget);
        case Kind::Const: {
            if (!unfold) return t;
            const GlobalEntry* g = env_.find(t->name);
            if (!g || !g->body) return t;
            if (--budget < 0) throw UnfoldDepthExceeded{};
            ++g_unfolds;
            return whnf_(ctx, g->body, unfold, budget);
        }
        case Kind::App: {
            Term f = whnf_(ctx, t->kids[0], unfold, budget);
            if (f->kind == Kind::Lambda || f->kind == Kind::ExtLambda)
                return whnf_(ctx, instantiate(f->kids[0], t->kids[1]), unfold, budget);
            return f == t->kids[0] ? t : mk::rebuild(*t, {f, t->kids[1]});
        }
        case Kind::ExtApp: {
            Term f = whnf_(ctx, t->kids[0], unfold, budget);
            const Term& p = t->kids[1];
            if (f->kind == Kind::ExtLambda || f->kind == Kind::Lambda)
                return whnf_(ctx, instantiate(f->kids[0], p), unfold, budget);
            Term fty;
            try {
                fty = whnf_(ctx, type_of(ctx, f), true, budget);
            } catch (const CheckError&) {
                fty = nullptr;
            }
            if (fty && fty->kind == Kind::ExtType && fty->kids.size() == 5 &&
                entails(ctx, instantiate(fty->kids[3], p))) {
                ++g_boundary_steps;
                return whnf_(ctx, instantiate(fty->kids[4], p), unfold, budget);
            }
            return f == t->kids[0] ? t : mk::rebuild(*t, {f, p});
        }
        case Kind::Fst:
        case Kind::Snd: {
            Term p = whnf_(ctx, t->kids[0], unfold, budget);
            if (p->kind == Kind::Pair) return whnf_(ctx, p->kids[t->kind == Kind::Fst ? 0 : 1], unfold, budget);
            return p == t->kids[0] ? t : mk::rebuild(*t, {p});
        }
        case Kind::IndPath: {
            Term p = whnf_(ctx, t->kids[2], unfold, budget);
            if (p->kind == Kind::Refl && !p->kids.empty()) {
                ++g_j_steps;
                return whnf_(ctx, instantiate(t->kids[1], p->kids[0]), unfold, budget);
            }
            return p == t->kids[2] ? t : mk::rebuild(*t, {t->kids[0], t->kids[1], p});
        }
        case Kind::Cases: {
            for (std::size_t i = 0; i + 1 < t->kids.size(); i += 2)
                if (entails(ctx, t->kids[i])) return whnf_(ctx, t->kids[i + 1], unfold, budget);
            return t;
        }
        default:
            return t;
    }
}

Term Checker::type_of(const Context& ctx, const Term& t) {
    switch (t->kind) {
        case Kind::Var: return ctx.type_of_var(t->index);
        case Kind::Const: {
            const GlobalEntry* g = env_.find(t->name);
            if (!g || g->failed) fail(code::kUnbound, t->span, "unknown constant '" + t->name + "'");
            return g->type;
        }
        case Kind::Universe:
            if (t->index == 0) return mk::universe(1);
            break;
        case Kind::App: {
            Term f = whnf(ctx, type_of(ctx, t->kids[0]));
            if (f->kind == Kind::Pi) return instantiate(f->kids[1], t->kids[1]);
            break;
        }
        case Kind::ExtApp: {
            Term f = whnf(ctx, type_of(ctx, t->kids[0]));
            if (f->kind == Kind::ExtType) return instantiate(f->kids[2], t->kids[1]);
            break;
        }
        case Kind::Fst:
        case Kind::Snd: {
            Term s = whnf(ctx, type_of(ctx, t->kids[0]));
            if (s->kind != Kind::Sigma) break;
            if (t->kind == Kind::Fst) return s->kids[0];
            return instantiate(s->kids[1], mk::fst(t->kids[0]));
        }
        case Kind::IndPath: {
            Term p = whnf(ctx, type_of(ctx, t->kids[2]));
            if (p->kind == Kind::Id) return instantiate_many(t->kids[0], {p->kids[1], p->kids[2], t->kids[2]});
            break;
        }
        case Kind::Cases:
        case Kind::RecBot:
            if (t->kids.size() % 2 == 1) return t->kids.back();
            break;
        case Kind::Annot: return t->kids[1];
        case Kind::Refl:
            if (!t->kids.empty()) return mk::id(type_of(ctx, t->kids[0]), t->kids[0], t->kids[0]);
            break;
        case Kind::Pi:
        case Kind::Sigma:
        case Kind::Id:
        case Kind::ExtType:
            return mk::universe(std::min(type_level(ctx, t), 1));
        default:
            break;
    }
    fail(code::kCannotInfer, t->span, "cannot determine the type of " + show(t, ctx.names()));
}

int Checker::type_level(const Context& ctx, const Term& type) {
    Term w = whnf(ctx, type);
    switch (w->kind) {
        case Kind::Universe: return w->index + 1;
        case Kind::Pi:
        case Kind::Sigma:
            return std::max(type_level(ctx, w->kids[0]),
                            type_level(ctx.with_term(w->kids[0], w->hints.empty() ? "_" : w->hints[0]), w->kids[1]));
        case Kind::Id: return type_level(ctx, w->kids[0]);
        case Kind::ExtType:
            return type_level(ctx.with_cube(w->kids[0], w->hints[0]).with_tope(w->kids[1]), w->kids[2]);
        default: {
            Term s = whnf(ctx, type_of(ctx, w));
            return s->kind == Kind::Universe ? s->index : 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Definitional equality

bool Checker::def_equal(const Context& ctx, const Term& a, const Term& b, const Term& type) {
    try {
        return conv(ctx, a, b, type);
    } catch (const UnfoldDepthExceeded&) {
        unfold_hit_ = true;
        return false;
    }
}

bool Checker::types_equal(const Context& ctx, const Term& a, const Term& b) {
    return def_equal(ctx, a, b, mk::universe(1));
}

namespace {
const std::string& hint0(const Term& t) {
    static const std::string kAnon = "_";
    return t->hints.empty() ? kAnon : t->hints[0];
}
}  // namespace

bool Checker::conv(const Context& ctx, const Term& a, const Term& b, const Term& type) {
    if (a == b || alpha_equal(a, b)) return true;
    if (!consistent(ctx)) return true;
    Term ty = whnf(ctx, type);
    switch (ty->kind) {
        case Kind::Pi: {
            Context inner = ctx.with_term(ty->kids[0], hint0(ty));
            Term x = mk::var(0);
            return conv(inner, mk::app(weaken(a, 1), x), mk::app(weaken(b, 1), x), ty->kids[1]);
        }
        case Kind::Sigma: {
            Term fa = mk::fst(a);
            return conv(ctx, fa, mk::fst(b), ty->kids[0]) &&
                   conv(ctx, mk::snd(a), mk::snd(b), instantiate(ty->kids[1], fa));
        }
        case Kind::ExtType: {
            Context inner = ctx.with_cube(ty->kids[0], hint0(ty)).with_tope(ty->kids[1]);
            Term t = mk::var(0);
            return conv(inner, mk::ext_app(weaken(a, 1), t), mk::ext_app(weaken(b, 1), t), ty->kids[2]);
        }
        default:
            return structural(ctx, a, b, ty);
    }
}

namespace {

const Node* spine_head(const Term& t) {
    const Node* n = t.get();
    while (n->kind == Kind::App || n->kind == Kind::ExtApp || n->kind == Kind::Fst || n->kind == Kind::Snd)
        n = n->kids[0].get();
    return n;
}

// The stuck case split at the head of a neutral term, if any.
const Node* stuck_cases(const Term& t) {
    const Node* n = t.get();
    while (true) {
        switch (n->kind) {
            case Kind::App:
            case Kind::ExtApp:
            case Kind::Fst:
            case Kind::Snd:
                n = n->kids[0].get();
                continue;
            case Kind::IndPath:
                n = n->kids[2].get();
                continue;
            case Kind::Cases:
                return n;
            default:
                return nullptr;
        }
    }
}

}  // namespace

bool Checker::structural(const Context& ctx, const Term& a, const Term& b, const Term& type) {
    Term la = whnf(ctx, a, false);
    Term lb = whnf(ctx, b, false);
    if (alpha_equal(la, lb)) return true;
    const Node* ha = spine_head(la);
    const Node* hb = spine_head(lb);
    if (ha->kind == Kind::Const && hb->kind == Kind::Const && ha->name == hb->name && neutral(ctx, la, lb))
        return true;
    Term fa = whnf(ctx, la);
    Term fb = whnf(ctx, lb);
    if (alpha_equal(fa, fb) || rigid(ctx, fa, fb, type)) return true;
    return split(ctx, fa, fb, type);
}

bool Checker::split(const Context& ctx, const Term& a, const Term& b, const Term& type) {
    const Node* c = stuck_cases(a);
    if (!c) c = stuck_cases(b);
    if (c) {
        for (std::size_t i = 0; i + 1 < c->kids.size(); i += 2) {
            Context branch = ctx.with_tope(c->kids[i]);
            if (!conv(branch, a, b, type)) return false;
        }
        return true;
    }
    for (std::size_t i = 0; i < ctx.tope_count(); ++i) {
        Term h = ctx.tope(i);
        if (h->kind != Kind::Or) continue;
        return conv(ctx.with_tope_replaced(i, h->kids[0]), a, b, type) &&
               conv(ctx.with_tope_replaced(i, h->kids[1]), a, b, type);
    }
    return false;
}

bool Checker::rigid(const Context& ctx, const Term& a, const Term& b, const Term& type) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Universe: return a->index == b->index;
        case Kind::Pi:
        case Kind::Sigma: {
            if (!conv(ctx, a->kids[0], b->kids[0], mk::universe(1))) return false;
            return conv(ctx.with_term(a->kids[0], hint0(a)), a->kids[1], b->kids[1], mk::universe(1));
        }
        case Kind::Id:
            return conv(ctx, a->kids[0], b->kids[0], mk::universe(1)) &&
                   conv(ctx, a->kids[1], b->kids[1], a->kids[0]) && conv(ctx, a->kids[2], b->kids[2], a->kids[0]);
        case Kind::ExtType: {
            if (!alpha_equal(a->kids[0], b->kids[0])) return false;
            if (a->kids.size() != b->kids.size()) return false;
            Context cube = ctx.with_cube(a->kids[0], hint0(a));
            if (!entails(cube.with_tope(a->kids[1]), b->kids[1]) || !entails(cube.with_tope(b->kids[1]), a->kids[1]))
                return false;
            Context shape = cube.with_tope(a->kids[1]);
            if (!conv(shape, a->kids[2], b->kids[2], mk::universe(1))) return false;
            if (a->kids.size() == 3) return true;
            if (!entails(shape.with_tope(a->kids[3]), b->kids[3]) || !entails(shape.with_tope(b->kids[3]), a->kids[3]))
                return false;
            return conv(shape.with_tope(a->kids[3]), a->kids[4], b->kids[4], a->kids[2]);
        }
        case Kind::Refl: {
            if (a->kids.empty() || b->kids.empty()) return false;
            Term ty = whnf(ctx, type);
            if (ty->kind != Kind::Id) return false;
            return conv(ctx, a->kids[0], b->kids[0], ty->kids[0]);
        }
        case Kind::Cube2:
        case Kind::CubeUnit:
        case Kind::CubeProduct:
        case Kind::Zero:
        case Kind::One:
        case Kind::Top:
        case Kind::Bottom:
            return alpha_equal(a, b);
        case Kind::Var:
        case Kind::Const:
        case Kind::App:
        case Kind::ExtApp:
        case Kind::Fst:
        case Kind::Snd:
        case Kind::IndPath:
            return neutral(ctx, a, b).has_value();
        default:
            return false;
    }
}

std::optional<Term> Checker::neutral(const Context& ctx, const Term& a, const Term& b) {
    if (a->kind != b->kind) return std::nullopt;
    switch (a->kind) {
        case Kind::Var:
            if (a->index != b->index) return std::nullopt;
            return ctx.type_of_var(a->index);
        case Kind::Const: {
            if (a->name != b->name) return std::nullopt;
            const GlobalEntry* g = env_.find(a->name);
            if (!g) return std::nullopt;
            return g->type;
        }
        case Kind::App: {
            auto f = neutral(ctx, a->kids[0], b->kids[0]);
            if (!f) return std::nullopt;
            Term pi = whnf(ctx, *f);
            if (pi->kind != Kind::Pi || !conv(ctx, a->kids[1], b->kids[1], pi->kids[0])) return std::nullopt;
            return instantiate(pi->kids[1], a->kids[1]);
        }
        case Kind::ExtApp: {
            auto f = neutral(ctx, a->kids[0], b->kids[0]);
            if (!f) return std::nullopt;
            Term ext = whnf(ctx, *f);
            if (ext->kind != Kind::ExtType || !entails(ctx, mk::point_eq(a->kids[1], b->kids[1])))
                return std::nullopt;
            return instantiate(ext->kids[2], a->kids[1]);
        }
        case Kind::Fst:
        case Kind::Snd: {
            auto p = neutral(ctx, a->kids[0], b->kids[0]);
            if (!p) return std::nullopt;
            Term s = whnf(ctx, *p);
            if (s->kind != Kind::Sigma) return std::nullopt;
            if (a->kind == Kind::Fst) return s->kids[0];
            return instantiate(s->kids[1], mk::fst(a->kids[0]));
        }
        case Kind::IndPath: {
            auto p = neutral(ctx, a->kids[2], b->kids[2]);
            if (!p) return std::nullopt;
            Term id = whnf(ctx, *p);
            if (id->kind != Kind::Id) return std::nullopt;
            const Term& A = id->kids[0];
            Context x = ctx.with_term(A, "x");
            Context xyq = x.with_term(weaken(A, 1), "y").with_term(mk::id(weaken(A, 2), mk::var(1), mk::var(0)), "p");
            if (!conv(xyq, a->kids[0], b->kids[0], mk::universe(1))) return std::nullopt;
            Term base_type = instantiate_many(weaken(a->kids[0], 1, 3), {mk::var(0), mk::var(0), mk::refl(mk::var(0))});
            if (!conv(x, a->kids[1], b->kids[1], base_type)) return std::nullopt;
            return instantiate_many(a->kids[0], {id->kids[1], id->kids[2], a->kids[2]});
        }
        default:
            return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Elaboration

Term Checker::check_cube(const Term& t) {
    switch (t->kind) {
        case Kind::Cube2:
        case Kind::CubeUnit:
            return t;
        case Kind::CubeProduct:
            return mk::rebuild(*t, {check_cube(t->kids[0]), check_cube(t->kids[1])});
        default:
            fail(code::kTypeMismatch, t->span, "expected a cube (2, 1 or a product of cubes)");
    }
}

std::pair<Term, Term> Checker::infer_point(const Context& ctx, const Term& t) {
    switch (t->kind) {
        case Kind::Var:
            if (!ctx.is_cube(t->index)) break;
            return {t, ctx.entry(t->index).type};
        case Kind::Zero:
        case Kind::One:
            return {t, mk::cube2()};
        case Kind::Pair: {
            auto [a, ca] = infer_point(ctx, t->kids[0]);
            auto [b, cb] = infer_point(ctx, t->kids[1]);
            return {mk::rebuild(*t, {a, b}), mk::cube_product(ca, cb)};
        }
        case Kind::Fst:
        case Kind::Snd: {
            auto [p, c] = infer_point(ctx, t->kids[0]);
            if (c->kind != Kind::CubeProduct)
                fail(code::kTypeMismatch, t->span, "projection from a point of a non-product cube");
            return {mk::rebuild(*t, {p}), c->kids[t->kind == Kind::Fst ? 0 : 1]};
        }
        default:
            break;
    }
    fail(code::kTypeMismatch, t->span, "expected a cube point, found " + show(t, ctx.names()));
}

Term Checker::check_point(const Context& ctx, const Term& t, const Term& cube) {
    auto [p, c] = infer_point(ctx, t);
    if (!alpha_equal(c, cube))
        mismatch(ctx, t->span, "cube point has the wrong sort", cube, c);
    return p;
}

Term Checker::check_tope(const Context& ctx, const Term& t) {
    switch (t->kind) {
        case Kind::Top:
        case Kind::Bottom:
            return t;
        case Kind::Leq:
            return mk::rebuild(*t, {check_point(ctx, t->kids[0], mk::cube2()), check_point(ctx, t->kids[1], mk::cube2())});
        case Kind::PointEq: {
            auto [a, c] = infer_point(ctx, t->kids[0]);
            return mk::rebuild(*t, {a, check_point(ctx, t->kids[1], c)});
        }
        case Kind::And:
        case Kind::Or:
            return mk::rebuild(*t, {check_tope(ctx, t->kids[0]), check_tope(ctx, t->kids[1])});
        default:
            fail(code::kTypeMismatch, t->span, "expected a tope, found " + show(t, ctx.names()));
    }
}

namespace {

bool is_cube_or_tope(Kind k) {
    switch (k) {
        case Kind::Cube2:
        case Kind::CubeUnit:
        case Kind::CubeProduct:
        case Kind::Zero:
        case Kind::One:
        case Kind::Top:
        case Kind::Bottom:
        case Kind::Leq:
        case Kind::PointEq:
        case Kind::And:
        case Kind::Or:
            return true;
        default:
            return false;
    }
}

void disjuncts(const Term& t, std::vector<Term>& out) {
    if (t->kind == Kind::Or) {
        disjuncts(t->kids[0], out);
        disjuncts(t->kids[1], out);
    } else {
        out.push_back(t);
    }
}

}  // namespace

std::pair<Term, int> Checker::check_type(const Context& ctx, const Term& t) {
    switch (t->kind) {
        case Kind::Universe: return {t, t->index + 1};
        case Kind::Pi:
        case Kind::Sigma: {
            auto [a, la] = check_type(ctx, t->kids[0]);
            auto [b, lb] = check_type(ctx.with_term(a, hint0(t)), t->kids[1]);
            return {mk::rebuild(*t, {a, b}), std::max(la, lb)};
        }
        case Kind::Id: {
            auto [A, l] = check_type(ctx, t->kids[0]);
            Term x = check(ctx, t->kids[1], A);
            Term y = check(ctx, t->kids[2], A);
            return {mk::rebuild(*t, {A, x, y}), l};
        }
        case Kind::PathEq: {
            auto [x, A] = infer(ctx, t->kids[0]);
            Term y = check(ctx, t->kids[1], A);
            return {mk::id(A, x, y, t->span), type_level(ctx, A)};
        }
        case Kind::ExtType: {
            Term cube = check_cube(t->kids[0]);
            Context inner = ctx.with_cube(cube, hint0(t));
            Term shape = check_tope(inner, t->kids[1]);
            Context in_shape = inner.with_tope(shape);
            auto [cod, l] = check_type(in_shape, t->kids[2]);
            if (t->kids.size() == 3) return {mk::rebuild(*t, {cube, shape, cod}), l};
            Term boundary = check_tope(inner, t->kids[3]);
            if (!entails(inner.with_tope(boundary), shape)) {
                Diagnostic d;
                d.code = code::kTopeFalse;
                d.span = t->kids[3]->span;
                d.message = "boundary tope is not contained in the shape";
                d.countermodel = countermodel(inner.with_tope(boundary), shape);
                throw CheckError{std::move(d)};
            }
            Term bterm = check(in_shape.with_tope(boundary), t->kids[4], cod);
            return {mk::rebuild(*t, {cube, shape, cod, boundary, bterm}), l};
        }
        default:
            break;
    }
    if (is_cube_or_tope(t->kind)) fail(code::kTypeMismatch, t->span, "expected a type, found a cube or tope");
    auto [e, s] = infer(ctx, t);
    Term u = whnf(ctx, s);
    if (u->kind != Kind::Universe) mismatch(ctx, t->span, "expected a type", mk::universe(0), s);
    return {e, u->index};
}

std::pair<Term, Term> Checker::infer(const Context& ctx, const Term& t) {
    switch (t->kind) {
        case Kind::Var:
            if (ctx.is_cube(t->index))
                fail(code::kTypeMismatch, t->span, "cube variable used where a term is expected");
            return {t, ctx.type_of_var(t->index)};
        case Kind::Const: {
            const GlobalEntry* g = env_.find(t->name);
            if (!g) fail(code::kUnbound, t->span, "unbound name '" + t->name + "'");
            if (g->failed)
                fail(code::kDependsOnFailed, t->span, "'" + t->name + "' depends on a declaration that failed to check");
            return {t, g->type};
        }
        case Kind::Universe:
            if (t->index == 0) return {t, mk::universe(1)};
            fail(code::kCannotInfer, t->span, "U₁ has no type");
        case Kind::App: {
            auto [f, fty] = infer(ctx, t->kids[0]);
            Term w = whnf(ctx, fty);
            if (w->kind == Kind::Pi) {
                Term a = check(ctx, t->kids[1], w->kids[0]);
                return {mk::app(f, a, t->span), instantiate(w->kids[1], a)};
            }
            if (w->kind == Kind::ExtType) {
                Term p = check_point(ctx, t->kids[1], w->kids[0]);
                Term shape = instantiate(w->kids[1], p);
                if (!entails(ctx, shape)) {
                    Diagnostic d;
                    d.code = code::kTopeFalse;
                    d.span = t->kids[1]->span;
                    d.message = "point is not in the shape: " + show(shape, ctx.names()) + " does not hold";
                    d.countermodel = countermodel(ctx, shape);
                    throw CheckError{std::move(d)};
                }
                return {mk::ext_app(f, p, t->span), instantiate(w->kids[2], p)};
            }
            Diagnostic d;
            d.code = code::kNotAFunction;
            d.span = t->kids[0]->span;
            d.message = "applied term is not a function";
            d.actual = show(fty, ctx.names());
            throw CheckError{std::move(d)};
        }
        case Kind::Fst:
        case Kind::Snd: {
            auto [p, pty] = infer(ctx, t->kids[0]);
            Term s = whnf(ctx, pty);
            if (s->kind != Kind::Sigma) {
                Diagnostic d;
                d.code = code::kNotAPair;
                d.span = t->kids[0]->span;
                d.message = "projection from a term that is not a pair";
                d.actual = show(pty, ctx.names());
                throw CheckError{std::move(d)};
            }
            if (t->kind == Kind::Fst) return {mk::fst(p, t->span), s->kids[0]};
            return {mk::snd(p, t->span), instantiate(s->kids[1], mk::fst(p))};
        }
        case Kind::Annot: {
            auto [A, l] = check_type(ctx, t->kids[1]);
            (void)l;
            return {check(ctx, t->kids[0], A), A};
        }
        case Kind::IndPath: {
            auto [p, pty] = infer(ctx, t->kids[2]);
            Term id = whnf(ctx, pty);
            if (id->kind != Kind::Id) mismatch(ctx, t->kids[2]->span, "ind-path target is not a path", nullptr, pty);
            const Term& A = id->kids[0];
            auto hint = [&](std::size_t i) { return i < t->hints.size() ? t->hints[i] : std::string("_"); };
            Context x = ctx.with_term(A, hint(0));
            Context xyq = x.with_term(weaken(A, 1), hint(1))
                              .with_term(mk::id(weaken(A, 2), mk::var(1), mk::var(0)), hint(2));
            Term motive = check_type(xyq, t->kids[0]).first;
            Context d = ctx.with_term(A, hint(3));
            Term base_type =
                instantiate_many(weaken(motive, 1, 3), {mk::var(0), mk::var(0), mk::refl(mk::var(0))});
            Term base = check(d, t->kids[1], base_type);
            return {mk::ind_path(motive, base, p, t->hints, t->span),
                    instantiate_many(motive, {id->kids[1], id->kids[2], p})};
        }
        case Kind::Pi:
        case Kind::Sigma:
        case Kind::Id:
        case Kind::PathEq:
        case Kind::ExtType: {
            auto [T, l] = check_type(ctx, t);
            if (l > 1) fail(code::kCannotInfer, t->span, "type is too large to belong to a universe");
            return {T, mk::universe(l)};
        }
        case Kind::Lambda:
            fail(code::kCannotInfer, t->span, "cannot infer the type of a λ-abstraction; add an annotation");
        case Kind::Pair:
            fail(code::kCannotInfer, t->span, "cannot infer the type of a pair; add an annotation");
        case Kind::Refl:
            fail(code::kCannotInfer, t->span, "cannot infer the type of refl; add an annotation");
        case Kind::Cases:
        case Kind::RecBot:
            fail(code::kCannotInfer, t->span, "cannot infer the type of a case split; add an annotation");
        default:
            break;
    }
    fail(code::kTypeMismatch, t->span, "expected a term, found a cube or tope");
}

Term Checker::check(const Context& ctx, const Term& t, const Term& type) {
    if (!consistent(ctx)) return mk::rebuild(*mk::rec_bot(t->span), {type});
    switch (t->kind) {
        case Kind::Lambda: {
            Term ty = whnf(ctx, type);
            const std::string& name = hint0(t);
            if (ty->kind == Kind::Pi) {
                Term body = check(ctx.with_term(ty->kids[0], name), t->kids[0], ty->kids[1]);
                return mk::lambda(body, name, t->span);
            }
            if (ty->kind == Kind::ExtType) {
                Context inner = ctx.with_cube(ty->kids[0], name).with_tope(ty->kids[1]);
                Term body = check(inner, t->kids[0], ty->kids[2]);
                if (ty->kids.size() == 5) {
                    std::vector<Term> cases;
                    disjuncts(ty->kids[3], cases);
                    for (const auto& c : cases) {
                        Context on = inner.with_tope(c);
                        if (!consistent(on)) continue;
                        if (def_equal(on, body, ty->kids[4], ty->kids[2])) continue;
                        Diagnostic d;
                        d.code = unfold_hit_ ? code::kUnfoldDepth : code::kBoundary;
                        d.span = t->span;
                        d.message = "body does not agree with the boundary where " + show(c, inner.names());
                        auto names = inner.names();
                        d.expected = show(whnf(on, ty->kids[4]), names);
                        d.actual = show(whnf(on, body), names);
                        d.countermodel = countermodel(on, mk::bottom());
                        throw CheckError{std::move(d)};
                    }
                }
                return mk::ext_lambda(body, name, t->span);
            }
            mismatch(ctx, t->span, "λ-abstraction checked against a non-function type", type, nullptr);
        }
        case Kind::Pair: {
            Term ty = whnf(ctx, type);
            if (ty->kind != Kind::Sigma) mismatch(ctx, t->span, "pair checked against a non-Σ type", type, nullptr);
            Term a = check(ctx, t->kids[0], ty->kids[0]);
            Term b = check(ctx, t->kids[1], instantiate(ty->kids[1], a));
            return mk::pair(a, b, t->span);
        }
        case Kind::Refl: {
            if (!t->kids.empty()) break;
            Term ty = whnf(ctx, type);
            if (ty->kind != Kind::Id) mismatch(ctx, t->span, "refl checked against a non-path type", type, nullptr);
            if (!def_equal(ctx, ty->kids[1], ty->kids[2], ty->kids[0]))
                mismatch(ctx, t->span, "refl requires the endpoints to be definitionally equal", ty->kids[1],
                         ty->kids[2]);
            return mk::refl(ty->kids[1], t->span);
        }
        case Kind::Cases: {
            if (t->kids.size() % 2 == 1) break;
            std::vector<Term> kids;
            Term cover;
            for (std::size_t i = 0; i < t->kids.size(); i += 2) {
                Term phi = check_tope(ctx, t->kids[i]);
                kids.push_back(phi);
                kids.push_back(check(ctx.with_tope(phi), t->kids[i + 1], type));
                cover = cover ? mk::disj(cover, phi) : phi;
            }
            if (!entails(ctx, cover)) {
                Diagnostic d;
                d.code = code::kTopeFalse;
                d.span = t->span;
                d.message = "case split does not cover the context: " + show(cover, ctx.names()) + " may fail";
                d.countermodel = countermodel(ctx, cover);
                throw CheckError{std::move(d)};
            }
            for (std::size_t i = 0; i < kids.size(); i += 2) {
                for (std::size_t j = i + 2; j < kids.size(); j += 2) {
                    Context both = ctx.with_tope(kids[i]).with_tope(kids[j]);
                    if (!consistent(both) || def_equal(both, kids[i + 1], kids[j + 1], type)) continue;
                    Diagnostic d;
                    d.code = code::kBoundary;
                    d.span = t->kids[j + 1]->span;
                    d.message = "branches disagree where " + show(mk::conj(kids[i], kids[j]), ctx.names());
                    d.expected = show(kids[i + 1], ctx.names());
                    d.actual = show(kids[j + 1], ctx.names());
                    d.countermodel = countermodel(both, mk::bottom());
                    throw CheckError{std::move(d)};
                }
            }
            kids.push_back(type);
            return mk::cases(std::move(kids), t->span);
        }
        case Kind::RecBot: {
            if (!t->kids.empty()) break;
            Diagnostic d;
            d.code = code::kTopeFalse;
            d.span = t->span;
            d.message = "rec⊥ used in a consistent tope context";
            d.countermodel = countermodel(ctx, mk::bottom());
            throw CheckError{std::move(d)};
        }
        default:
            break;
    }
    Term ty = whnf(ctx, type);
    if (ty->kind == Kind::Universe) {
        auto [T, l] = check_type(ctx, t);
        if (l > ty->index) mismatch(ctx, t->span, "type lives in a larger universe", type, mk::universe(l));
        return T;
    }
    auto [e, actual] = infer(ctx, t);
    if (!types_equal(ctx, actual, type)) mismatch(ctx, t->span, "type mismatch", type, actual);
    return e;
}

// ---------------------------------------------------------------------------
// Declarations

std::vector<std::string> axiom_usage(const CheckEnv& env, const Term& type, const Term& body) {
    std::vector<std::string> names;
    collect_constants(type, names);
    if (body) collect_constants(body, names);
    std::set<std::string> out;
    for (const auto& n : names) {
        const GlobalEntry* g = env.find(n);
        if (!g) continue;
        out.insert(g->axioms.begin(), g->axioms.end());
    }
    return {out.begin(), out.end()};
}

DeclResult check_declaration(const CheckEnv& env, const Declaration& d, const std::string& file) {
    DeclResult r;
    auto entry = std::make_shared<GlobalEntry>();
    entry->name = d.name;
    entry->file = file;
    entry->span = d.span;
    entry->postulate = d.postulate;
    Checker c(env);
    try {
        Context empty;
        entry->type = c.check_type(empty, d.type).first;
        if (!d.postulate) entry->body = c.check(empty, d.body, entry->type);
    } catch (const CheckError& e) {
        r.diagnostics.push_back(e.diag);
    } catch (const UnfoldDepthExceeded&) {
        Diagnostic diag;
        diag.code = code::kUnfoldDepth;
        diag.span = d.span;
        diag.message = "definition unfolding limit exceeded";
        r.diagnostics.push_back(std::move(diag));
    }
    for (auto& diag : r.diagnostics) {
        diag.file = file;
        diag.decl = d.name;
        if (!d.span.contains(diag.span)) diag.span = d.name_span;
    }
    if (!r.diagnostics.empty()) {
        entry->failed = true;
        entry->type = nullptr;
        entry->body = nullptr;
    } else if (d.postulate) {
        entry->axioms = {d.name};
        auto more = axiom_usage(env, entry->type, nullptr);
        entry->axioms.insert(entry->axioms.end(), more.begin(), more.end());
        std::sort(entry->axioms.begin(), entry->axioms.end());
        entry->axioms.erase(std::unique(entry->axioms.begin(), entry->axioms.end()), entry->axioms.end());
    } else {
        entry->axioms = axiom_usage(env, entry->type, entry->body);
    }
    r.entry = entry;
    return r;
}

ModuleResult check_module(CheckEnv& env, const std::vector<syntax::SurfaceDecl>& decls, const std::string& file) {
    ModuleResult out;
    NameLookup lookup = [&](const std::string& n) {
        const GlobalEntry* g = env.find(n);
        if (!g) return NameStatus::Unknown;
        return g->failed ? NameStatus::Failed : NameStatus::Checked;
    };
    for (const auto& sd : decls) {
        ResolveResult rr = resolve(sd, lookup);
        if (!rr.decl) {
            bool duplicate = std::any_of(rr.diagnostics.begin(), rr.diagnostics.end(), [](const Diagnostic& x) {
                return x.code == code::kDuplicate;
            });
            bool reported_dependency = false;
            for (auto& diag : rr.diagnostics) {
                if (diag.code == code::kDependsOnFailed) {
                    if (reported_dependency) continue;
                    reported_dependency = true;
                }
                diag.file = file;
                diag.decl = sd.name;
                out.diagnostics.push_back(std::move(diag));
            }
            if (!env.find(sd.name) || !duplicate) {
                auto failed = std::make_shared<GlobalEntry>();
                failed->name = sd.name;
                failed->file = file;
                failed->span = sd.span;
                failed->postulate = sd.postulate;
                failed->failed = true;
                if (!env.find(sd.name)) env.globals[sd.name] = failed;
                out.entries.push_back(failed);
            }
            continue;
        }
        DeclResult dr = check_declaration(env, *rr.decl, file);
        for (auto& diag : dr.diagnostics) out.diagnostics.push_back(std::move(diag));
        env.globals[sd.name] = dr.entry;
        out.entries.push_back(dr.entry);
    }
    return out;
}

}  // namespace stt
