#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stt/topes.hpp"

using namespace stt::topes;

namespace {

const Point x = Point::var(0), y = Point::var(1), z = Point::var(2);
const Point zero = Point::zero(), one = Point::one();

}  // namespace

TEST_CASE("model counts") {
    CHECK(enumerate_models(0, {}).size() == 1);
    CHECK(enumerate_models(1, {}).size() == 3);
    // Frozen from the independent order-type count in the oracle.
    CHECK(oracle::count_order_types(1) == 3);
    CHECK(oracle::count_order_types(2) == 11);
    CHECK(enumerate_models(2, {}).size() == oracle::count_order_types(2));
    CHECK(enumerate_models(3, {}).size() == oracle::count_order_types(3));
    CHECK(enumerate_models(1, {Formula::conj(Formula::eq(x, zero), Formula::eq(x, one))}).empty());
}

TEST_CASE("model counts under hypotheses match the oracle") {
    for (const auto& h : oracle::atomic_formulas(2)) {
        CAPTURE(to_string(h));
        CHECK(enumerate_models(2, {h}).size() == oracle::count_order_types(2, {h}));
    }
}

TEST_CASE("axiom schemes") {
    CHECK(tope_entails(2, {Formula::leq(x, y), Formula::leq(y, x)}, Formula::eq(x, y)));
    CHECK(tope_entails(1, {}, Formula::leq(x, x)));
    CHECK(tope_entails(2, {}, Formula::disj(Formula::leq(x, y), Formula::leq(y, x))));
    CHECK_FALSE(tope_entails(2, {Formula::leq(x, y)}, Formula::leq(y, x)));
    CHECK(tope_entails(3, {Formula::leq(x, y), Formula::leq(y, z)}, Formula::leq(x, z)));
    CHECK(tope_entails(0, {Formula::eq(zero, one)}, Formula::bottom()));
    CHECK_FALSE(tope_entails(0, {}, Formula::eq(zero, one)));
}

TEST_CASE("countermodel for x ≤ y ⊬ y ≤ x") {
    auto m = countermodel(2, {Formula::leq(x, y)}, Formula::leq(y, x));
    REQUIRE(m);
    CHECK(evaluate(Formula::leq(x, y), *m));
    CHECK_FALSE(evaluate(Formula::leq(y, x), *m));
    CHECK_FALSE(countermodel(2, {Formula::leq(x, y), Formula::leq(y, x)}, Formula::eq(x, y)));
}

TEST_CASE("consistency") {
    CHECK(tope_consistent(1, {}));
    CHECK_FALSE(tope_consistent(0, {Formula::eq(zero, one)}));
    CHECK_FALSE(tope_consistent(1, {Formula::leq(x, zero), Formula::leq(one, x)}));
}

TEST_CASE("shape inclusions") {
    // atoms: s = 0, t = 1
    Point s = Point::var(0), t = Point::var(1);
    Formula horn = Formula::disj(Formula::eq(t, zero), Formula::eq(s, one));
    Formula simplex = Formula::leq(t, s);
    CHECK(tope_entails(2, {horn}, simplex));
    CHECK(tope_entails(2, {simplex}, Formula::top()));
    CHECK_FALSE(tope_entails(2, {simplex}, horn));
    auto m = countermodel(2, {simplex}, horn);
    REQUIRE(m);
    auto d = describe(*m);
    CHECK(d[0] != "0");
    CHECK(d[0] != "1");
    CHECK(d[1] != "0");
    CHECK(d[1] != "1");
}

TEST_CASE("exhaustive agreement over two atoms") {
    auto atoms = oracle::atomic_formulas(2);
    std::vector<Formula> goals = atoms;
    goals.push_back(Formula::top());
    goals.push_back(Formula::bottom());
    for (std::size_t i = 0; i < atoms.size(); i += 3)
        for (std::size_t j = 0; j < atoms.size(); j += 5) goals.push_back(Formula::disj(atoms[i], atoms[j]));
    std::size_t checked = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i; j < atoms.size(); ++j)
            for (const auto& g : goals) {
                std::vector<Formula> hyps{atoms[i], atoms[j]};
                bool expected = oracle::entails(2, hyps, g);
                if (tope_entails(2, hyps, g) != expected || entails_by_enumeration(2, hyps, g) != expected) {
                    FAIL_CHECK(to_string(atoms[i]) << ", " << to_string(atoms[j]) << " ⊢ " << to_string(g));
                }
                ++checked;
            }
    CHECK(checked > 10000);
}

TEST_CASE("random three-atom agreement") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 300; ++i) {
        std::vector<Formula> hyps;
        int n = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int k = 0; k < n; ++k) hyps.push_back(oracle::random_formula(rng, 3, 2));
        Formula goal = oracle::random_formula(rng, 3, 2);
        CHECK(tope_entails(3, hyps, goal) == oracle::entails(3, hyps, goal));
    }
}

TEST_CASE("monotonicity and deduction") {
    std::mt19937 rng(99);
    for (int i = 0; i < 300; ++i) {
        std::vector<Formula> hyps{oracle::random_formula(rng, 3, 1)};
        Formula extra = oracle::random_formula(rng, 3, 1);
        Formula goal = oracle::random_formula(rng, 3, 2);
        std::vector<Formula> more = hyps;
        more.push_back(extra);
        if (tope_entails(3, hyps, goal)) CHECK(tope_entails(3, more, goal));
        // Φ, ψ ⊢ φ iff every model of Φ satisfying ψ satisfies φ
        bool every = true;
        for (const auto& m : enumerate_models(3, hyps))
            if (evaluate(extra, m) && !evaluate(goal, m)) every = false;
        CHECK(tope_entails(3, more, goal) == every);
    }
}

TEST_CASE("memo table is transparent and order-insensitive") {
    clear_memo();
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        std::vector<Formula> hyps{oracle::random_formula(rng, 3, 1), oracle::random_formula(rng, 3, 1)};
        Formula goal = oracle::random_formula(rng, 3, 1);
        bool cached = tope_entails(3, hyps, goal);
        CHECK(cached == tope_entails_uncached(3, hyps, goal));
        CHECK(cached == tope_entails(3, hyps, goal));
        std::vector<Formula> swapped{hyps[1], hyps[0]};
        CHECK(canonical_key(hyps, goal) == canonical_key(swapped, goal));
    }
    CHECK(memo_stats().hits > 0);
}

TEST_CASE("models respect the endpoint invariants") {
    for (const auto& m : enumerate_models(3, {})) {
        CHECK(m.value(zero) == 0);
        CHECK(m.value(one) == m.top);
        CHECK(m.top >= 1);
        for (int r : m.rank) {
            CHECK(r >= 0);
            CHECK(r <= m.top);
        }
    }
}
