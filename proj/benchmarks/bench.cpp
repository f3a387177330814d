#include <benchmark/benchmark.h>

#include <random>

#include "stt/driver.hpp"
#include "stt/syntax.hpp"
#include "stt/topes.hpp"

#include <fstream>
#include <sstream>

using namespace stt;
using topes::Formula;
using topes::Point;

namespace {

std::string stdlib(const std::string& f) { return std::string(STT_SOURCE_DIR) + "/stdlib/" + f; }

const std::vector<std::string> kFiles{"paths.stt", "equivalences.stt", "funext.stt", "univalence.stt",
                                      "segal.stt", "covariant.stt",    "directed.stt"};

Formula random_atomic(std::mt19937& rng, int atoms) {
    std::uniform_int_distribution<int> pick(-2, atoms - 1);
    auto point = [&] {
        int v = pick(rng);
        return v == -2 ? Point::zero() : v == -1 ? Point::one() : Point::var(v);
    };
    Point a = point(), b = point();
    return rng() % 2 ? Formula::leq(a, b) : Formula::eq(a, b);
}

std::vector<std::pair<std::vector<Formula>, Formula>> sequents(int atoms, int count) {
    std::mt19937 rng(42);
    std::vector<std::pair<std::vector<Formula>, Formula>> out;
    for (int i = 0; i < count; ++i) {
        std::vector<Formula> hyps{Formula::disj(random_atomic(rng, atoms), random_atomic(rng, atoms)),
                                  random_atomic(rng, atoms)};
        out.push_back({hyps, Formula::disj(random_atomic(rng, atoms), random_atomic(rng, atoms))});
    }
    return out;
}

void BM_EntailsUncached(benchmark::State& state) {
    int atoms = static_cast<int>(state.range(0));
    auto qs = sequents(atoms, 256);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& q = qs[i++ % qs.size()];
        benchmark::DoNotOptimize(topes::tope_entails_uncached(atoms, q.first, q.second));
    }
}
BENCHMARK(BM_EntailsUncached)->DenseRange(1, 4);

void BM_EntailsByEnumeration(benchmark::State& state) {
    int atoms = static_cast<int>(state.range(0));
    auto qs = sequents(atoms, 256);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& q = qs[i++ % qs.size()];
        benchmark::DoNotOptimize(topes::entails_by_enumeration(atoms, q.first, q.second));
    }
}
BENCHMARK(BM_EntailsByEnumeration)->DenseRange(1, 4);

void BM_ParseCorpus(benchmark::State& state) {
    std::vector<std::string> texts;
    for (const auto& f : kFiles) {
        std::ifstream in(stdlib(f));
        std::ostringstream ss;
        ss << in.rdbuf();
        texts.push_back(ss.str());
    }
    for (auto _ : state)
        for (const auto& t : texts) benchmark::DoNotOptimize(syntax::parse_module(t));
}
BENCHMARK(BM_ParseCorpus);

void BM_CheckCorpus(benchmark::State& state) {
    std::vector<std::string> files;
    for (const auto& f : kFiles) files.push_back(stdlib(f));
    RunOptions o;
    o.jobs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        topes::clear_memo();
        benchmark::DoNotOptimize(check_files(files, o));
    }
}
BENCHMARK(BM_CheckCorpus)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
