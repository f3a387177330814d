#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "stt/resolve.hpp"
#include "stt/syntax.hpp"
#include "stt/term.hpp"
#include "test_support.hpp"

using namespace stt;

namespace {

NameLookup known(std::vector<std::string> names) {
    return [names](const std::string& n) {
        return std::find(names.begin(), names.end(), n) != names.end() ? NameStatus::Checked : NameStatus::Unknown;
    };
}

// Reference resolver for λ/application/name terms with variable and
// pair patterns: a plain environment of names, innermost last. Each entry
// remembers the depth it was bound at.
struct Binding {
    std::string name;
    Term term;
    int depth;
};

Term reference(const syntax::SExpr& e, std::vector<Binding>& env, int depth) {
    using syntax::SKind;
    switch (e.kind) {
        case SKind::Name:
            for (std::size_t i = env.size(); i-- > 0;)
                if (env[i].name == e.text) return weaken(env[i].term, depth - env[i].depth);
            return mk::constant(e.text);
        case SKind::App: return mk::app(reference(e.kids[0], env, depth), reference(e.kids[1], env, depth));
        case SKind::Lambda: {
            std::size_t mark = env.size();
            int d = depth;
            for (const auto& p : e.patterns) {
                ++d;
                if (p.is_tuple()) {
                    env.push_back({p.parts[0].name, mk::fst(mk::var(0)), d});
                    env.push_back({p.parts[1].name, mk::snd(mk::var(0)), d});
                } else {
                    env.push_back({p.name, mk::var(0), d});
                }
            }
            Term body = reference(e.kids[0], env, d);
            env.resize(mark);
            for (std::size_t i = 0; i < e.patterns.size(); ++i) body = mk::lambda(body);
            return body;
        }
        default: FAIL("unexpected form"); return nullptr;
    }
}

}  // namespace

TEST_CASE("substitute and weaken: small cases") {
    Term c = mk::constant("c");
    CHECK(alpha_equal(substitute(mk::var(0), 0, c), c));
    CHECK(alpha_equal(substitute(mk::var(1), 0, c), mk::var(0)));
    CHECK(alpha_equal(weaken(mk::var(0), 1, 0), mk::var(1)));
    CHECK(weaken(c, 5, 0) == c);
    CHECK(alpha_equal(instantiate(mk::lambda(mk::app(mk::var(0), mk::var(1))), c), mk::lambda(mk::app(mk::var(0), c))));
    CHECK(alpha_equal(instantiate(mk::app(mk::var(0), mk::lambda(mk::var(1))), c), mk::app(c, mk::lambda(weaken(c, 1)))));
}

TEST_CASE("substitution agrees with the named oracle") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        int free = 4;
        Term t = oracle::random_term(rng, free, 5);
        Term v = oracle::random_term(rng, free - 1, 3);
        int level = std::uniform_int_distribution<int>(0, free - 1)(rng);
        CAPTURE(show(t));
        CHECK(alpha_equal(substitute(t, level, v), oracle::ref_substitute(t, level, v, free)));
        int by = std::uniform_int_distribution<int>(0, 3)(rng);
        int from = std::uniform_int_distribution<int>(0, free)(rng);
        CHECK(alpha_equal(weaken(t, by, from), oracle::ref_weaken(t, by, from, free)));
        std::vector<Term> values{oracle::random_term(rng, free - 2, 2), oracle::random_term(rng, free - 2, 2)};
        CHECK(alpha_equal(instantiate_many(t, values), oracle::ref_instantiate_many(t, values, free)));
    }
}

TEST_CASE("substitution laws") {
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        Term t = oracle::random_term(rng, 3, 5);
        Term u = oracle::random_term(rng, 2, 3);
        Term v = oracle::random_term(rng, 1, 3);
        CHECK(alpha_equal(substitute(weaken(t, 1, 0), 0, v), t));
        CHECK(alpha_equal(weaken(weaken(t, 1, 2), 2, 2), weaken(t, 3, 2)));
        CHECK(alpha_equal(substitute(substitute(t, 0, u), 0, v),
                          substitute(substitute(t, 1, weaken(v, 1, 0)), 0, substitute(u, 0, v))));
    }
}

TEST_CASE("free_bound bounds the free variables") {
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
        Term t = oracle::random_term(rng, 3, 5);
        CHECK(well_scoped(t, 3));
        CHECK(well_scoped(t, t->free_bound));
        if (t->free_bound > 0) CHECK_FALSE(well_scoped(t, t->free_bound - 1));
    }
}

TEST_CASE("resolve: identity, constants, shadowing") {
    const std::vector<std::string> cases{
        "λ a ↦ a",
        "λ a ↦ λ a ↦ a",
        "λ a ↦ λ b ↦ a",
        "λ a b ↦ a b",
        "λ a b ↦ b a",
        "λ a ↦ λ b ↦ λ a ↦ b a",
        "λ a ↦ (λ a ↦ a) a",
        "λ f ↦ λ x ↦ f (f x)",
        "λ a ↦ c a",
        "c (λ c ↦ c)",
        "λ x y z ↦ x z (y z)",
        "λ x ↦ λ y ↦ λ x ↦ λ y ↦ x y",
        "λ a ↦ λ b ↦ (λ b ↦ a b) b",
        "λ (s, t) ↦ s",
        "λ (s, t) ↦ t s",
        "λ (s, t) ↦ λ s ↦ s t",
        "λ a ↦ λ (a, b) ↦ a",
        "λ p ↦ λ (s, t) ↦ p s t",
        "d (λ d ↦ λ c ↦ d c) c",
        "λ u ↦ λ v ↦ λ w ↦ λ u ↦ w v u",
    };
    for (const auto& src : cases) {
        CAPTURE(src);
        auto m = syntax::parse_module("def t : U := " + src + ";");
        REQUIRE(m.diagnostics.empty());
        REQUIRE(m.decls.size() == 1);
        auto r = resolve(m.decls[0], known({"c", "d"}));
        REQUIRE(r.decl);
        CHECK(r.diagnostics.empty());
        std::vector<Binding> env;
        Term expected = reference(m.decls[0].body, env, 0);
        CHECK(alpha_equal(r.decl->body, expected));
        CHECK(well_scoped(r.decl->body, 0));
    }
}

TEST_CASE("resolve: unknown names and duplicates") {
    auto m = syntax::parse_module("def t (a : U) (a : U) : U := q;");
    REQUIRE(m.decls.size() == 1);
    auto r = resolve(m.decls[0], known({}));
    CHECK_FALSE(r.decl);
    std::vector<std::string> codes;
    for (const auto& d : r.diagnostics) codes.push_back(d.code);
    CHECK(std::count(codes.begin(), codes.end(), std::string(code::kDuplicate)) == 1);
    CHECK(std::count(codes.begin(), codes.end(), std::string(code::kUnbound)) == 1);
}

TEST_CASE("resolve: every corpus declaration is well scoped") {
    for (const auto& file : testing::corpus_files()) {
        auto m = syntax::parse_module(testing::read_file(testing::stdlib_path(file)));
        for (const auto& d : m.decls) {
            CAPTURE(d.name);
            auto r = resolve(d, [&](const std::string& n) { return n == d.name ? NameStatus::Unknown : NameStatus::Checked; });
            REQUIRE(r.decl);
            CHECK(well_scoped(r.decl->type, 0));
            if (r.decl->body) CHECK(well_scoped(r.decl->body, 0));
        }
    }
}

TEST_CASE("canonical shapes mention only their own coordinates") {
    // Δ¹, Δ², Λ²₁, ∂Δ¹, Δ¹×Δ¹ as shape topes over their bound point.
    Term t = mk::var(0);
    Term s1 = mk::fst(t), s2 = mk::snd(t);
    const std::vector<Term> shapes{
        mk::top(),
        mk::leq(s2, s1),
        mk::disj(mk::point_eq(s2, mk::zero()), mk::point_eq(s1, mk::one())),
        mk::disj(mk::point_eq(t, mk::zero()), mk::point_eq(t, mk::one())),
        mk::top(),
    };
    for (const auto& shape : shapes) {
        CHECK(well_scoped(shape, 1));
        Term ext = mk::ext_type(mk::cube2(), shape, mk::constant("C"));
        CHECK(well_scoped(ext, 0));
    }
}
