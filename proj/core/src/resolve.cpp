#include "stt/resolve.hpp"

#include <algorithm>

namespace stt {
namespace {

using syntax::Pattern;
using syntax::SExpr;
using syntax::SKind;

std::string pattern_text(const Pattern& p) {
    if (!p.is_tuple()) return p.name;
    return "(" + pattern_text(p.parts[0]) + "," + pattern_text(p.parts[1]) + ")";
}

class Resolver {
public:
    Resolver(const NameLookup& globals, std::vector<Diagnostic>& diags) : globals_(globals), diags_(diags) {}

    struct Binding {
        std::string name;
        int level;
        std::vector<bool> path;  // false = first projection, true = second; applied in order
    };

    void bind(const Pattern& p) {
        bind_parts(p, depth_, {});
        ++depth_;
    }
    void bind_name(const std::string& n) {
        bindings_.push_back({n, depth_, {}});
        ++depth_;
    }
    void unbind(std::size_t bindings_before, int depth_before) {
        bindings_.resize(bindings_before);
        depth_ = depth_before;
    }

    Term expr(const SExpr& e) {
        switch (e.kind) {
            case SKind::Name: return name(e);
            case SKind::Nat:
                if (e.text == "0") return mk::zero(e.span);
                if (e.text == "1") return mk::one(e.span);
                return mk::cube2(e.span);
            case SKind::Universe: return mk::universe(e.level, e.span);
            case SKind::Pi: return pi(e);
            case SKind::Arrow: {
                Term dom = syntax::is_cube_syntax(e.kids[0]) ? cube(e.kids[0]) : expr(e.kids[0]);
                auto mark = save();
                bind_name("_");
                Term cod = expr(e.kids[1]);
                restore(mark);
                if (syntax::is_cube_syntax(e.kids[0]))
                    return mk::ext_type(dom, mk::top(), cod, nullptr, nullptr, "_", e.span);
                return mk::pi(dom, cod, "_", e.span);
            }
            case SKind::Sigma: {
                Term a = expr(e.kids[0]);
                auto mark = save();
                bind(e.patterns[0]);
                Term b = expr(e.kids[1]);
                restore(mark);
                return mk::sigma(a, b, e.patterns[0].name, e.span);
            }
            case SKind::Product: {
                if (syntax::is_cube_syntax(e)) return cube(e);
                Term a = expr(e.kids[0]);
                auto mark = save();
                bind_name("_");
                Term b = expr(e.kids[1]);
                restore(mark);
                return mk::sigma(a, b, "_", e.span);
            }
            case SKind::Lambda: return lambda(e.patterns, 0, e.kids[0], e.span);
            case SKind::App: return mk::app(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::Pair: return mk::pair(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::Fst: return mk::fst(expr(e.kids[0]), e.span);
            case SKind::Snd: return mk::snd(expr(e.kids[0]), e.span);
            case SKind::Id: return mk::id(expr(e.kids[0]), expr(e.kids[1]), expr(e.kids[2]), e.span);
            case SKind::PathEq: return mk::path_eq(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::Refl: return mk::refl_raw(e.span);
            case SKind::IndPath: return ind_path(e);
            case SKind::Ext: return extension(e);
            case SKind::Cases: {
                std::vector<Term> kids;
                for (const auto& k : e.kids) kids.push_back(expr(k));
                return mk::cases(std::move(kids), e.span);
            }
            case SKind::RecBot: return mk::rec_bot(e.span);
            case SKind::Top: return mk::top(e.span);
            case SKind::Bot: return mk::bottom(e.span);
            case SKind::Leq: return mk::leq(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::TopeEq: return mk::point_eq(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::And: return mk::conj(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::Or: return mk::disj(expr(e.kids[0]), expr(e.kids[1]), e.span);
            case SKind::Annot: return mk::annot(expr(e.kids[0]), expr(e.kids[1]), e.span);
        }
        return mk::rec_bot(e.span);
    }

    Term cube(const SExpr& e) {
        if (e.kind == SKind::Nat) return e.text == "1" ? mk::cube_unit(e.span) : mk::cube2(e.span);
        if (e.kind == SKind::Product) return mk::cube_product(cube(e.kids[0]), cube(e.kids[1]), e.span);
        return expr(e);
    }

    struct Mark {
        std::size_t bindings;
        int depth;
    };
    Mark save() const { return {bindings_.size(), depth_}; }
    void restore(Mark m) { unbind(m.bindings, m.depth); }

    bool visible(const std::string& n) const {
        return std::any_of(bindings_.begin(), bindings_.end(), [&](const Binding& b) { return b.name == n; });
    }

    void error(const char* code, Span span, std::string message) {
        Diagnostic d;
        d.code = code;
        d.span = span;
        d.message = std::move(message);
        diags_.push_back(std::move(d));
    }

private:
    void bind_parts(const Pattern& p, int level, std::vector<bool> path) {
        if (!p.is_tuple()) {
            bindings_.push_back({p.name, level, std::move(path)});
            return;
        }
        auto left = path;
        left.push_back(false);
        bind_parts(p.parts[0], level, std::move(left));
        path.push_back(true);
        bind_parts(p.parts[1], level, std::move(path));
    }

    Term name(const SExpr& e) {
        for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
            if (it->name != e.text) continue;
            Term t = mk::var(depth_ - 1 - it->level, e.span);
            for (bool second : it->path) t = second ? mk::snd(t, e.span) : mk::fst(t, e.span);
            return t;
        }
        switch (globals_(e.text)) {
            case NameStatus::Checked: break;
            case NameStatus::Failed:
                error(code::kDependsOnFailed, e.span, "'" + e.text + "' depends on a declaration that failed to check");
                break;
            case NameStatus::Unknown:
                error(code::kUnbound, e.span, "unbound name '" + e.text + "'");
                break;
        }
        return mk::constant(e.text, e.span);
    }

    Term pi(const SExpr& e) {
        bool is_cube = syntax::is_cube_syntax(e.kids[0]);
        Term dom = is_cube ? cube(e.kids[0]) : expr(e.kids[0]);
        return pi_from(e, 0, dom, is_cube);
    }

    // `dom` is scoped outside all of this node's binders.
    Term pi_from(const SExpr& e, std::size_t i, const Term& dom, bool is_cube) {
        Mark mark = save();
        bind(e.patterns[i]);
        Term cod = i + 1 < e.patterns.size() ? pi_from(e, i + 1, dom, is_cube) : expr(e.kids[1]);
        restore(mark);
        Term here = weaken(dom, static_cast<int>(i));
        const std::string& hint = e.patterns[i].name;
        if (is_cube) return mk::ext_type(here, mk::top(), cod, nullptr, nullptr, hint, e.span);
        return mk::pi(here, cod, hint, e.span);
    }

    Term lambda(const std::vector<Pattern>& pats, std::size_t i, const SExpr& body, Span span) {
        if (i == pats.size()) return expr(body);
        Mark mark = save();
        bind(pats[i]);
        Term inner = lambda(pats, i + 1, body, span);
        restore(mark);
        return mk::lambda(inner, pattern_text(pats[i]), span);
    }

    // Strips `n` leading λ binders, η-expanding when the term is not a λ.
    static Term open_binders(const Term& t, int n, std::vector<std::string>& hints) {
        if (n == 0) return t;
        if (t->kind == Kind::Lambda) {
            hints.push_back(t->hints.empty() ? "_" : t->hints[0]);
            return open_binders(t->kids[0], n - 1, hints);
        }
        Term body = weaken(t, n);
        for (int k = n - 1; k >= 0; --k) {
            body = mk::app(body, mk::var(k), t->span);
            hints.push_back("_");
        }
        return body;
    }

    Term ind_path(const SExpr& e) {
        std::vector<std::string> hints;
        Term motive = open_binders(expr(e.kids[0]), 3, hints);
        std::vector<std::string> base_hints;
        Term base = open_binders(expr(e.kids[1]), 1, base_hints);
        hints.resize(3, "_");
        hints.push_back(base_hints.empty() ? "_" : base_hints[0]);
        return mk::ind_path(motive, base, expr(e.kids[2]), hints, e.span);
    }

    Term extension(const SExpr& e) {
        Term c = cube(e.kids[0]);
        Mark mark = save();
        bind(e.patterns[0]);
        Term shape = expr(e.kids[1]);
        Term cod = expr(e.kids[2]);
        Term boundary, bterm;
        if (e.kids.size() == 5) {
            boundary = expr(e.kids[3]);
            bterm = expr(e.kids[4]);
        }
        restore(mark);
        return mk::ext_type(c, shape, cod, boundary, bterm, pattern_text(e.patterns[0]), e.span);
    }

    const NameLookup& globals_;
    std::vector<Diagnostic>& diags_;
    std::vector<Binding> bindings_;
    int depth_ = 0;
};

struct Binder {
    bool cube = false;
    Term domain;
    std::string hint;
    std::vector<Term> topes;
    Span span;
};

}  // namespace

ResolveResult resolve(const syntax::SurfaceDecl& d, const NameLookup& globals) {
    ResolveResult out;
    Resolver r(globals, out.diagnostics);

    if (globals(d.name) != NameStatus::Unknown)
        r.error(code::kDuplicate, d.name_span, "'" + d.name + "' is already defined");

    std::vector<Binder> binders;
    std::vector<std::string> seen;
    for (const auto& p : d.params) {
        if (p.layer == syntax::Layer::Tope) {
            if (binders.empty() || !binders.back().cube) {
                r.error(code::kTypeMismatch, p.span, "a tope parameter must follow a cube parameter");
                continue;
            }
            binders.back().topes.push_back(r.expr(p.type));
            continue;
        }
        bool is_cube = p.layer == syntax::Layer::Cube;
        Term dom = is_cube ? r.cube(p.type) : r.expr(p.type);
        for (std::size_t k = 0; k < p.names.size(); ++k) {
            const std::string& n = p.names[k];
            if (std::find(seen.begin(), seen.end(), n) != seen.end())
                r.error(code::kDuplicate, p.span, "parameter '" + n + "' is bound twice");
            seen.push_back(n);
            binders.push_back({is_cube, weaken(dom, static_cast<int>(k)), n, {}, p.span});
            r.bind_name(n);
        }
    }

    Term type = r.expr(d.type);
    Term body = d.postulate ? nullptr : r.expr(d.body);

    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
        if (it->cube) {
            Term shape = mk::top();
            for (std::size_t k = 0; k < it->topes.size(); ++k)
                shape = k == 0 ? it->topes[k] : mk::conj(shape, it->topes[k]);
            type = mk::ext_type(it->domain, shape, type, nullptr, nullptr, it->hint, it->span);
        } else {
            type = mk::pi(it->domain, type, it->hint, it->span);
        }
        if (body) body = mk::lambda(body, it->hint, it->span);
    }

    if (!out.diagnostics.empty()) return out;
    out.decl = Declaration{d.name, d.name_span, d.span, d.postulate, type, body};
    return out;
}

}  // namespace stt
