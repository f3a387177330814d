// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if any
// criterion fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "stt/checker.hpp"
#include "stt/corpus.hpp"
#include "stt/driver.hpp"
#include "stt/resolve.hpp"
#include "stt/syntax.hpp"
#include "stt/topes.hpp"
#include "test_support.hpp"

#ifndef STT_BINARY
#error "STT_BINARY must be defined"
#endif

using namespace stt;
using topes::Formula;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTopeSeconds = 10.0;
constexpr double kCorpusSeconds = 60.0;
constexpr int kRandomSequents = 1000;
constexpr int kSubstitutionCases = 500;
constexpr std::size_t kMinMutants = 20;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << what << "  (" << detail << ")\n";
}

// ---------------------------------------------------------------------------

void tope_solver() {
    auto start = Clock::now();
    std::size_t total = 0, disagree = 0;
    auto query = [&](std::size_t atoms, const std::vector<Formula>& hyps, const Formula& goal) {
        bool expected = oracle::entails(atoms, hyps, goal);
        bool by_models = topes::entails_by_enumeration(atoms, hyps, goal);
        bool fast = topes::tope_entails(atoms, hyps, goal);
        ++total;
        if (fast != expected || by_models != expected) ++disagree;
    };
    for (std::size_t atoms = 0; atoms <= 2; ++atoms) {
        auto atomic = oracle::atomic_formulas(atoms);
        std::vector<Formula> goals = atomic;
        goals.push_back(Formula::top());
        goals.push_back(Formula::bottom());
        for (std::size_t i = 0; i < atomic.size(); ++i)
            for (std::size_t j = i + 1; j < atomic.size(); ++j) goals.push_back(Formula::disj(atomic[i], atomic[j]));
        std::vector<std::vector<Formula>> hyp_sets{{}};
        for (std::size_t i = 0; i < atomic.size(); ++i) {
            hyp_sets.push_back({atomic[i]});
            for (std::size_t j = i; j < atomic.size(); ++j) hyp_sets.push_back({atomic[i], atomic[j]});
        }
        for (const auto& h : hyp_sets)
            for (const auto& g : goals) query(atoms, h, g);
    }
    std::size_t exhaustive = total;
    std::mt19937 rng(20240601);
    for (int i = 0; i < kRandomSequents; ++i) {
        std::vector<Formula> hyps;
        int n = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int k = 0; k < n; ++k) hyps.push_back(oracle::random_formula(rng, 3, 2));
        query(3, hyps, oracle::random_formula(rng, 3, 2));
    }
    double secs = since(start);
    std::ostringstream os;
    os << exhaustive << " exhaustive + " << (total - exhaustive) << " random sequents, " << disagree
       << " disagreements, " << secs << " s";
    report(1, disagree == 0 && secs < kTopeSeconds, "tope solver agrees with the model oracle", os.str());
}

void named_entailments() {
    const auto x = topes::Point::var(0), y = topes::Point::var(1), z = topes::Point::var(2);
    const auto zero = topes::Point::zero(), one = topes::Point::one();
    const auto s = topes::Point::var(0), t = topes::Point::var(1);
    struct Case {
        const char* name;
        bool value;
        bool expected;
    };
    std::vector<Case> cases{
        {"reflexivity", topes::tope_entails(1, {}, Formula::leq(x, x)), true},
        {"antisymmetry", topes::tope_entails(2, {Formula::leq(x, y), Formula::leq(y, x)}, Formula::eq(x, y)), true},
        {"transitivity", topes::tope_entails(3, {Formula::leq(x, y), Formula::leq(y, z)}, Formula::leq(x, z)), true},
        {"totality", topes::tope_entails(2, {}, Formula::disj(Formula::leq(x, y), Formula::leq(y, x))), true},
        {"0 ≢ 1", topes::tope_consistent(0, {Formula::eq(zero, one)}), false},
        {"x ≤ y ⊬ y ≤ x", topes::tope_entails(2, {Formula::leq(x, y)}, Formula::leq(y, x)), false},
        {"Λ ⊆ Δ²",
         topes::tope_entails(2, {Formula::disj(Formula::eq(t, zero), Formula::eq(s, one))}, Formula::leq(t, s)), true},
        {"Δ² ⊄ Λ",
         topes::tope_entails(2, {Formula::leq(t, s)}, Formula::disj(Formula::eq(t, zero), Formula::eq(s, one))),
         false},
    };
    std::string wrong;
    for (const auto& c : cases)
        if (c.value != c.expected) wrong += std::string(wrong.empty() ? "" : ", ") + c.name;
    report(2, wrong.empty(), "axiom schemes and horn inclusion",
           wrong.empty() ? std::to_string(cases.size()) + " checks exact" : "wrong: " + wrong);
}

// ---------------------------------------------------------------------------

const RunReport& corpus_run(double* seconds = nullptr) {
    static double secs = 0;
    static const RunReport r = [] {
        auto start = Clock::now();
        std::vector<std::string> files;
        for (const auto& f : testing::corpus_files()) files.push_back(testing::stdlib_path(f));
        RunOptions o;
        o.jobs = 4;
        RunReport out = check_files(files, o);
        secs = since(start);
        return out;
    }();
    if (seconds) *seconds = secs;
    return r;
}

void collect_j_redexes(const Term& t, std::vector<Term>& out) {
    if (!t) return;
    if (t->kind == Kind::IndPath && t->kids[2]->kind == Kind::Refl) out.push_back(t);
    for (const auto& k : t->kids) collect_j_redexes(k, out);
}

void j_computation() {
    reset_reduction_stats();
    const RunReport& r = corpus_run();
    std::size_t sweep = reduction_stats().j_steps;
    CheckEnv env = testing::environment_of(r);
    Checker c(env);

    // Every literal J-on-refl in the elaborated corpus is a redex for whnf.
    std::vector<Term> redexes;
    for (const auto& f : r.files)
        for (const auto& e : f.entries) {
            collect_j_redexes(e->type, redexes);
            collect_j_redexes(e->body, redexes);
        }
    std::size_t reduced = 0;
    for (const auto& t : redexes) {
        Context ctx;
        for (int i = 0; i < t->free_bound; ++i) ctx = ctx.with_term(mk::universe(0), "v");
        Term w = c.whnf(ctx, t);
        if (!(w->kind == Kind::IndPath && alpha_equal(w, t))) ++reduced;
    }

    Context ctx = Context().with_term(mk::universe(0), "A").with_term(mk::var(0), "x");
    Term A = mk::var(1), x = mk::var(0);
    Term rx = mk::refl(x);
    Term path = mk::id(A, x, x);
    auto apply = [](Term f, std::vector<Term> args) {
        for (auto& a : args) f = mk::app(f, a);
        return f;
    };
    bool concat = c.def_equal(ctx, apply(mk::constant("concat"), {A, x, x, x, rx, rx}), rx, path);
    bool inverse = c.def_equal(ctx, apply(mk::constant("path-inv"), {A, x, x, rx}), rx, path);
    bool ok = r.exit_code() == 0 && sweep > 0 && reduced == redexes.size() && concat && inverse;
    std::ostringstream os;
    os << "J steps during corpus check " << sweep << ", literal redexes reduced " << reduced << "/" << redexes.size()
       << ", refl∗refl ≡ refl " << (concat ? "yes" : "no") << ", refl⁻¹ ≡ refl " << (inverse ? "yes" : "no");
    report(3, ok, "J computes on refl", os.str());
}

void corpus_acceptance() {
    double secs = 0;
    const RunReport& r = corpus_run(&secs);
    const std::vector<std::string> tier1{
        "path-inv", "concat",     "transport",  "concat-refl-unit", "inv-refl",       "isContr",   "isProp",
        "singleton-contr", "fib", "isEquiv",    "Equiv",            "id-isEquiv",     "hom",       "id-arrow",
        "isSegal",  "comp",       "comp-id",    "id-comp",          "isIso",          "Iso",       "isRezk",
        "isGroupoidal", "isCovariant", "cov-transport", "yoneda-dependent", "yoneda"};
    std::vector<std::string> problems;
    for (const auto& n : tier1) {
        const GlobalEntry* g = r.find(n);
        if (!g || g->failed || g->postulate) {
            problems.push_back(n + " missing or rejected");
        } else if (!g->axioms.empty()) {
            std::string ax;
            for (const auto& a : g->axioms) ax += (ax.empty() ? "" : ",") + a;
            problems.push_back(n + " uses {" + ax + "}");
        }
    }
    // Tier 2: path-to-eq and the PROVED consequences of ua listed in the manifest.
    std::vector<std::string> tier2{"path-to-eq"};
    if (auto m = load_manifest(testing::stdlib_path("manifest.txt")))
        for (const auto& e : m->entries)
            if (e.tier == Tier::Proved && e.axioms == std::vector<std::string>{"ua"} && e.name != "path-to-eq")
                tier2.push_back(e.name);
    for (const auto& n : tier2) {
        const GlobalEntry* g = r.find(n);
        if (!g || g->failed) {
            problems.push_back(n + " missing or rejected");
        } else if (g->axioms != std::vector<std::string>{"ua"}) {
            std::string ax;
            for (const auto& a : g->axioms) ax += (ax.empty() ? "" : ",") + a;
            problems.push_back(n + " uses {" + ax + "}");
        }
    }
    std::ostringstream os;
    os << r.error_count() << " diagnostics, " << tier1.size() << " tier-1 and " << tier2.size() << " tier-2 entries, "
       << secs << " s";
    for (const auto& p : problems) os << "; " << p;
    report(4, r.error_count() == 0 && problems.empty() && secs < kCorpusSeconds, "corpus acceptance and axiom hygiene",
           os.str());
}

void mutation_suite() {
    std::string list = testing::stdlib_path("mutants.txt");
    std::vector<std::string> errors;
    auto mutants = parse_mutants(testing::read_file(list), &errors);
    std::size_t killed = 0;
    std::string survivors;
    for (const auto& m : mutants) {
        auto r = run_mutant(m, testing::source_dir() + "/stdlib");
        if (r.applied && r.killed)
            ++killed;
        else
            survivors += std::string(survivors.empty() ? "" : ", ") + m.name + (r.applied ? "" : " (not applied)");
    }
    std::ostringstream os;
    os << killed << "/" << mutants.size() << " killed";
    if (!survivors.empty()) os << "; survivors: " << survivors;
    report(5, errors.empty() && mutants.size() >= kMinMutants && killed == mutants.size(), "mutation suite", os.str());
}

// ---------------------------------------------------------------------------

void round_trip() {
    std::size_t files = 0, decls = 0, bad = 0;
    for (const auto& file : testing::corpus_files()) {
        ++files;
        auto first = syntax::parse_module(testing::read_file(testing::stdlib_path(file)));
        std::string printed = syntax::pretty_print(first);
        auto second = syntax::parse_module(printed);
        bool ok = first.diagnostics.empty() && second.diagnostics.empty() &&
                  first.decls.size() == second.decls.size() && syntax::pretty_print(second) == printed;
        for (std::size_t i = 0; ok && i < first.decls.size(); ++i) {
            ++decls;
            const std::string& self = first.decls[i].name;
            NameLookup others = [&](const std::string& n) {
                return n == self ? NameStatus::Unknown : NameStatus::Checked;
            };
            auto a = resolve(first.decls[i], others), b = resolve(second.decls[i], others);
            if (!a.decl || !b.decl || a.decl->name != b.decl->name || !alpha_equal(a.decl->type, b.decl->type) ||
                (a.decl->body && !alpha_equal(a.decl->body, b.decl->body)))
                ok = false;
        }
        if (!ok) ++bad;
    }
    std::ostringstream os;
    os << files - bad << "/" << files << " files, " << decls << " declarations";
    report(6, bad == 0, "parse ∘ print ∘ parse fixpoint", os.str());
}

std::string run_json(int jobs) {
    std::string cmd = "cd '" + testing::source_dir() + "' && '" STT_BINARY "' check --json --jobs " +
                      std::to_string(jobs) + " stdlib 2>/dev/null";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    pclose(p);
    try {
        auto j = nlohmann::ordered_json::parse(out);
        j.erase("timing");
        return j.dump(2);
    } catch (const std::exception&) {
        return "unparsable: " + out;
    }
}

void determinism() {
    std::string a = run_json(1), b = run_json(1), c = run_json(8), d = run_json(8);
    bool ok = !a.empty() && a.rfind("unparsable", 0) != 0 && a == b && c == d && a == c;
    report(7, ok, "JSON output is deterministic", ok ? "jobs 1 ×2 and jobs 8 ×2 byte-identical" : "outputs differ");
}

void substitution() {
    std::mt19937 rng(500);
    int bad = 0;
    for (int i = 0; i < kSubstitutionCases; ++i) {
        const int free = 4;
        Term t = oracle::random_term(rng, free, 5);
        Term v = oracle::random_term(rng, free - 1, 3);
        int level = std::uniform_int_distribution<int>(0, free - 1)(rng);
        int by = std::uniform_int_distribution<int>(0, 3)(rng);
        int from = std::uniform_int_distribution<int>(0, free)(rng);
        std::vector<Term> values{oracle::random_term(rng, free - 2, 2), oracle::random_term(rng, free - 2, 2)};
        bool ok = alpha_equal(substitute(t, level, v), oracle::ref_substitute(t, level, v, free)) &&
                  alpha_equal(weaken(t, by, from), oracle::ref_weaken(t, by, from, free)) &&
                  alpha_equal(instantiate_many(t, values), oracle::ref_instantiate_many(t, values, free));
        if (!ok) ++bad;
    }
    report(8, bad == 0, "substitution agrees with the named oracle",
           std::to_string(kSubstitutionCases) + " cases, " + std::to_string(bad) + " discrepancies");
}

}  // namespace

int main() {
    tope_solver();
    named_entailments();
    j_computation();
    corpus_acceptance();
    mutation_suite();
    round_trip();
    determinism();
    substitution();
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criterion(s) failed") << '\n';
    return failures == 0 ? 0 : 1;
}
