#include "stt/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace stt {
namespace {

std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '|') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Unescapes \n, \t, \| and \\ in a mutant field.
std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            char n = s[++i];
            out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
        } else {
            out += s[i];
        }
    }
    return out;
}

// Splits on '|' not preceded by a backslash.
std::vector<std::string> split_escaped(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && i + 1 < line.size()) {
            cur += line[i];
            cur += line[++i];
        } else if (line[i] == '|') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += line[i];
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

std::vector<std::string> Manifest::files() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        std::string p = normalize_path((fs::path(dir) / e.file).string());
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

Manifest parse_manifest(const std::string& text, const std::string& path) {
    Manifest m;
    m.path = path;
    m.dir = fs::path(path).parent_path().string();
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto f = split_fields(t);
        if (f.size() != 5 || (f[4] != "PROVED" && f[4] != "STATED")) {
            m.errors.push_back("line " + std::to_string(n) + ": expected 'file | name | anchor | axioms | PROVED|STATED'");
            continue;
        }
        ManifestEntry e;
        e.file = f[0];
        e.name = f[1];
        e.anchor = f[2];
        if (f[3] != "-") {
            std::string cur;
            for (char c : f[3] + ",") {
                if (c == ',') {
                    if (!trim(cur).empty()) e.axioms.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
        }
        std::sort(e.axioms.begin(), e.axioms.end());
        e.tier = f[4] == "PROVED" ? Tier::Proved : Tier::Stated;
        e.line = n;
        m.entries.push_back(std::move(e));
    }
    return m;
}

std::optional<Manifest> load_manifest(const std::string& path) {
    auto text = slurp(path);
    if (!text) return std::nullopt;
    return parse_manifest(*text, path);
}

bool CorpusReport::ok() const {
    if (!problems.empty() || run.exit_code() != 0) return false;
    return std::all_of(entries.begin(), entries.end(), [](const EntryStatus& s) { return s.ok; });
}

CorpusReport corpus_check(const Manifest& m, const RunOptions& options) {
    CorpusReport r;
    r.problems = m.errors;
    r.run = check_files(m.files(), options);

    std::set<std::string> anchors;
    bool have_anchors = false;
    if (auto text = slurp((fs::path(m.dir) / "anchors.txt").string())) {
        have_anchors = true;
        std::istringstream in(*text);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (!line.empty() && line[0] != '#') anchors.insert(line);
        }
    }

    for (const auto& e : m.entries) {
        EntryStatus s;
        s.entry = &e;
        const GlobalEntry* g = nullptr;
        std::string want = normalize_path((fs::path(m.dir) / e.file).string());
        for (const auto& f : r.run.files) {
            if (normalize_path(f.path) != want) continue;
            for (const auto& x : f.entries)
                if (x->name == e.name) g = x.get();
        }
        if (!g) {
            s.problem = "declaration not found";
        } else if (g->failed) {
            s.problem = "declaration was rejected";
        } else {
            s.axioms = g->axioms;
            bool within = std::includes(e.axioms.begin(), e.axioms.end(), g->axioms.begin(), g->axioms.end());
            if (e.tier == Tier::Proved && g->postulate)
                s.problem = "listed as PROVED but is a postulate";
            else if (e.tier == Tier::Stated && !g->postulate)
                s.problem = "listed as STATED but has a body";
            else if (e.tier == Tier::Proved && !within)
                s.problem = "uses axioms outside its budget";
            else if (have_anchors && !anchors.count(e.anchor))
                s.problem = "unknown anchor '" + e.anchor + "'";
            else
                s.ok = true;
        }
        r.entries.push_back(std::move(s));
    }
    return r;
}

std::vector<Mutant> parse_mutants(const std::string& text, std::vector<std::string>* errors) {
    std::vector<Mutant> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto f = split_escaped(t);
        if (f.size() != 5) {
            if (errors) errors->push_back("line " + std::to_string(n) + ": expected 'name | file | decl | find | replace'");
            continue;
        }
        out.push_back({f[0], f[1], f[2], unescape(f[3]), unescape(f[4]), n});
    }
    return out;
}

MutantResult run_mutant(const Mutant& m, const std::string& base_dir, const RunOptions& options) {
    MutantResult r;
    r.mutant = &m;
    std::string path = normalize_path((fs::path(base_dir) / m.file).string());
    auto text = slurp(path);
    if (!text) return r;
    syntax::SurfaceModule mod = syntax::parse_module(*text);
    const syntax::SurfaceDecl* target = nullptr;
    for (const auto& d : mod.decls)
        if (d.name == m.decl) target = &d;
    if (!target) return r;
    std::size_t begin = target->span.begin, end = target->span.end;
    std::size_t at = text->find(m.find, begin);
    if (at == std::string::npos || at + m.find.size() > end) return r;
    r.applied = true;
    std::string mutated = text->substr(0, at) + m.replace + text->substr(at + m.find.size());
    std::size_t new_end = end + m.replace.size() - m.find.size();

    RunOptions opts = options;
    opts.overlays[path] = mutated;
    RunReport run = check_files({path}, opts);
    for (const auto& f : run.files) {
        if (normalize_path(f.path) != path) continue;
        for (const auto& d : f.diagnostics) {
            r.diagnostics.push_back(d);
            if (d.severity == Severity::Error && d.span.begin >= begin && d.span.end <= new_end) r.killed = true;
        }
    }
    return r;
}

}  // namespace stt
