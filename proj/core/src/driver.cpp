#include "stt/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace stt {

std::string normalize_path(const std::string& path) {
    std::error_code ec;
    fs::path p = fs::absolute(fs::path(path), ec);
    return p.lexically_normal().string();
}

namespace {

struct Unit {
    std::string id;  // normalized absolute path
    std::string display;
    std::string text;
    bool io_failed = false;
    syntax::SurfaceModule module;
    std::vector<std::size_t> imports;
    int level = -1;
    CheckEnv env;  // everything visible after checking this file
    FileReport report;
};

std::string display_path(const std::string& id) {
    std::error_code ec;
    fs::path rel = fs::relative(fs::path(id), fs::current_path(ec), ec);
    if (ec || rel.empty() || rel.string().rfind("..", 0) == 0) return id;
    return rel.string();
}

bool read_file(const std::string& id, const RunOptions& options, std::string& out) {
    auto it = options.overlays.find(id);
    if (it != options.overlays.end()) {
        out = it->second;
        return true;
    }
    std::ifstream in(id, std::ios::binary);
    if (!in || fs::is_directory(id)) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

Diagnostic make_diag(const char* code, const std::string& file, Span span, std::string message) {
    Diagnostic d;
    d.code = code;
    d.file = file;
    d.span = span;
    d.message = std::move(message);
    return d;
}

class Loader {
public:
    explicit Loader(const RunOptions& options) : options_(options) {}

    std::size_t load(const std::string& id) {
        for (std::size_t i = 0; i < units_.size(); ++i)
            if (units_[i].id == id) return i;
        std::size_t idx = units_.size();
        units_.emplace_back();
        units_[idx].id = id;
        units_[idx].display = display_path(id);
        std::string text;
        if (!read_file(id, options_, text)) {
            units_[idx].io_failed = true;
            return idx;
        }
        units_[idx].text = std::move(text);
        units_[idx].module = syntax::parse_module(units_[idx].text);
        auto imports = units_[idx].module.imports;
        fs::path dir = fs::path(id).parent_path();
        for (const auto& imp : imports) {
            std::string target = (dir / imp.path).lexically_normal().string();
            std::size_t j = load(target);
            units_[idx].imports.push_back(j);
        }
        return idx;
    }

    std::vector<Unit>& units() { return units_; }

private:
    const RunOptions& options_;
    std::vector<Unit> units_;
};

// Longest import chain below each unit; -2 marks a unit on a cycle.
int assign_level(std::vector<Unit>& units, std::size_t i, std::vector<int>& state) {
    if (state[i] == 2) return units[i].level;
    if (state[i] == 1) return -2;
    state[i] = 1;
    int level = 0;
    for (std::size_t j : units[i].imports) {
        int l = assign_level(units, j, state);
        if (l == -2) {
            state[i] = 2;
            units[i].level = -2;
            return -2;
        }
        level = std::max(level, l + 1);
    }
    state[i] = 2;
    units[i].level = level;
    return level;
}

void check_unit(std::vector<Unit>& units, std::size_t i, const RunOptions& options) {
    Unit& u = units[i];
    auto start = std::chrono::steady_clock::now();
    u.report.path = u.display;
    if (u.io_failed) {
        u.report.io_failed = true;
        u.report.diagnostics.push_back(make_diag(code::kIo, u.display, {}, "cannot read file '" + u.display + "'"));
        return;
    }
    for (const auto& pd : u.module.diagnostics) {
        Diagnostic d = make_diag(code::kParse, u.display, pd.span, pd.message);
        u.report.diagnostics.push_back(std::move(d));
        u.report.parse_failed = true;
    }
    u.env.settings = options.settings;
    for (std::size_t k = 0; k < u.imports.size(); ++k) {
        const Unit& dep = units[u.imports[k]];
        if (dep.io_failed) {
            u.report.diagnostics.push_back(make_diag(code::kIo, u.display, u.module.imports[k].span,
                                                     "cannot read imported file '" + dep.display + "'"));
            u.report.io_failed = true;
            continue;
        }
        for (const auto& [name, entry] : dep.env.globals) {
            auto [it, inserted] = u.env.globals.emplace(name, entry);
            if (!inserted && it->second != entry)
                u.report.diagnostics.push_back(make_diag(code::kDuplicate, u.display, u.module.imports[k].span,
                                                         "'" + name + "' is defined by two imported files"));
        }
    }
    if (u.level == -2) {
        u.report.diagnostics.push_back(make_diag(code::kParse, u.display, {}, "import cycle through this file"));
        u.report.parse_failed = true;
        return;
    }
    ModuleResult r = check_module(u.env, u.module.decls, u.display);
    u.report.entries = std::move(r.entries);
    for (auto& d : r.diagnostics) u.report.diagnostics.push_back(std::move(d));
    std::stable_sort(u.report.diagnostics.begin(), u.report.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span.begin < b.span.begin; });
    u.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::size_t RunReport::error_count() const {
    std::size_t n = 0;
    for (const auto& f : files)
        for (const auto& d : f.diagnostics) n += d.severity == Severity::Error;
    return n;
}

std::size_t RunReport::warning_count() const {
    std::size_t n = 0;
    for (const auto& f : files)
        for (const auto& d : f.diagnostics) n += d.severity == Severity::Warning;
    return n;
}

std::size_t RunReport::declaration_count() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.entries.size();
    return n;
}

int RunReport::exit_code() const {
    bool errors = false;
    for (const auto& f : files) {
        if (f.io_failed || f.parse_failed) return 2;
        for (const auto& d : f.diagnostics) errors = errors || d.severity == Severity::Error;
    }
    return errors ? 1 : 0;
}

std::vector<Diagnostic> RunReport::diagnostics() const {
    std::vector<Diagnostic> out;
    for (const auto& f : files) out.insert(out.end(), f.diagnostics.begin(), f.diagnostics.end());
    return out;
}

const GlobalEntry* RunReport::find(const std::string& name) const {
    for (const auto& f : files)
        for (const auto& e : f.entries)
            if (e->name == name) return e.get();
    return nullptr;
}

RunReport check_files(const std::vector<std::string>& paths, const RunOptions& options) {
    auto start = std::chrono::steady_clock::now();
    Loader loader(options);
    for (const auto& p : paths) loader.load(normalize_path(p));
    auto& units = loader.units();

    std::vector<int> state(units.size(), 0);
    int max_level = 0;
    for (std::size_t i = 0; i < units.size(); ++i) max_level = std::max(max_level, assign_level(units, i, state));

    std::vector<std::vector<std::size_t>> levels(static_cast<std::size_t>(max_level) + 2);
    for (std::size_t i = 0; i < units.size(); ++i)
        levels[units[i].level < 0 ? levels.size() - 1 : static_cast<std::size_t>(units[i].level)].push_back(i);

    int jobs = std::max(1, options.jobs);
    for (const auto& batch : levels) {
        if (batch.empty()) continue;
        if (jobs == 1 || batch.size() == 1) {
            for (std::size_t i : batch) check_unit(units, i, options);
            continue;
        }
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t k = next++; k < batch.size(); k = next++) check_unit(units, batch[k], options);
        };
        std::vector<std::thread> pool;
        std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(jobs), batch.size());
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunReport report;
    for (auto& u : units) report.files.push_back(std::move(u.report));
    std::sort(report.files.begin(), report.files.end(),
              [](const FileReport& a, const FileReport& b) { return a.path < b.path; });
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace stt
