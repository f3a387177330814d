#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stt/corpus.hpp"
#include "stt/driver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string severity_name(stt::Severity s) { return s == stt::Severity::Error ? "error" : "warning"; }

json diagnostic_json(const stt::Diagnostic& d) {
    json j;
    j["code"] = d.code;
    j["severity"] = severity_name(d.severity);
    j["file"] = d.file;
    if (!d.decl.empty()) j["declaration"] = d.decl;
    j["start"] = {{"line", d.span.line}, {"col", d.span.col}};
    j["end"] = {{"line", d.span.end_line}, {"col", d.span.end_col}};
    j["message"] = d.message;
    if (d.expected) j["expected"] = *d.expected;
    if (d.actual) j["actual"] = *d.actual;
    if (!d.countermodel.empty()) {
        json cm = json::object();
        for (const auto& [atom, value] : d.countermodel) cm[atom] = value;
        j["countermodel"] = cm;
    }
    return j;
}

json report_json(const stt::RunReport& r) {
    json out;
    json diags = json::array();
    for (const auto& d : r.diagnostics()) diags.push_back(diagnostic_json(d));
    out["diagnostics"] = diags;
    out["summary"] = {{"files", r.files.size()},
                      {"declarations", r.declaration_count()},
                      {"errors", r.error_count()},
                      {"warnings", r.warning_count()},
                      {"exit_code", r.exit_code()}};
    json files = json::object();
    for (const auto& f : r.files) files[f.path] = f.seconds;
    out["timing"] = {{"wall_seconds", r.wall_seconds}, {"files", files}};
    return out;
}

// Reads the line of `file` containing the span start, for the caret excerpt.
std::string source_line(const std::string& file, int line) {
    std::ifstream in(file);
    std::string s;
    for (int i = 1; std::getline(in, s); ++i)
        if (i == line) return s;
    return {};
}

std::size_t codepoints(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

// "0 < s = t < 1" style rendering of a countermodel.
std::string chain(const std::vector<std::pair<std::string, std::string>>& model) {
    constexpr int kOne = 1 << 20;
    auto rank = [](const std::string& v) {
        if (v == "0") return 0;
        if (v == "1") return kOne;
        if (v == "mid") return 1;
        return std::stoi(v.substr(3));
    };
    std::map<int, std::vector<std::string>> by_rank;
    for (const auto& [atom, value] : model) by_rank[rank(value)].push_back(atom);
    std::ostringstream os;
    os << "0";
    for (const auto& a : by_rank[0]) os << " = " << a;
    for (const auto& [r, atoms] : by_rank) {
        if (r == 0 || r == kOne) continue;
        os << " <";
        for (std::size_t i = 0; i < atoms.size(); ++i) os << (i ? " = " : " ") << atoms[i];
    }
    os << " <";
    for (const auto& a : by_rank[kOne]) os << ' ' << a << " =";
    os << " 1";
    return os.str();
}

void print_human(const stt::RunReport& r, bool explain) {
    for (const auto& d : r.diagnostics()) {
        std::cerr << d.file << ':' << d.span.line << ':' << d.span.col << ": " << severity_name(d.severity) << '['
                  << d.code << "] " << d.message;
        if (!d.decl.empty()) std::cerr << " (in " << d.decl << ')';
        std::cerr << '\n';
        if (d.span.line > 0) {
            std::string text = source_line(d.file, d.span.line);
            if (!text.empty()) {
                std::cerr << "  " << text << "\n  ";
                std::size_t col = static_cast<std::size_t>(std::max(1, d.span.col));
                std::size_t width = d.span.end_line == d.span.line && d.span.end_col > d.span.col
                                        ? static_cast<std::size_t>(d.span.end_col - d.span.col)
                                        : 1;
                width = std::min(width, codepoints(text) + 1 - std::min(col, codepoints(text)));
                std::cerr << std::string(col - 1, ' ') << std::string(std::max<std::size_t>(width, 1), '^') << '\n';
            }
        }
        if (d.expected) std::cerr << "  expected: " << *d.expected << '\n';
        if (d.actual) std::cerr << "  actual:   " << *d.actual << '\n';
        if (!d.countermodel.empty()) {
            std::cerr << "  countermodel:";
            for (const auto& [atom, value] : d.countermodel) std::cerr << ' ' << atom << '=' << value;
            std::cerr << '\n';
            if (explain) std::cerr << "  ordering:     " << chain(d.countermodel) << '\n';
        }
    }
    std::cerr << r.files.size() << " file(s), " << r.declaration_count() << " declaration(s), " << r.error_count()
              << " error(s)\n";
}

std::vector<std::string> expand(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const auto& p : inputs) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<std::string> found;
            for (const auto& e : fs::recursive_directory_iterator(p, ec))
                if (e.is_regular_file() && e.path().extension() == ".stt") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch checker for simplicial type theory"};
    app.require_subcommand(1);

    std::vector<std::string> paths;
    bool as_json = false;
    bool explain = false;
    int jobs = 1;
    int max_unfold = 10000;
    std::string manifest = "stdlib/manifest.txt";

    auto* check = app.add_subcommand("check", "Type-check files and their imports");
    check->add_option("paths", paths, "Files or directories")->required();
    check->add_flag("--json", as_json, "Emit JSON");
    check->add_option("--jobs", jobs, "Files checked concurrently")->check(CLI::PositiveNumber);
    check->add_option("--max-unfold", max_unfold, "Definition unfolding limit")->check(CLI::PositiveNumber);
    check->add_flag("--explain-tope", explain, "Show the ordering of tope countermodels");

    auto* axioms = app.add_subcommand("axioms", "Report the postulates each declaration depends on");
    axioms->add_option("paths", paths, "Files or directories")->required();
    axioms->add_flag("--json", as_json, "Emit JSON");

    auto* corpus = app.add_subcommand("corpus", "Check the corpus against its manifest");
    corpus->add_option("--manifest", manifest, "Manifest file");
    corpus->add_flag("--json", as_json, "Emit JSON");

    CLI11_PARSE(app, argc, argv);

    stt::RunOptions options;
    options.jobs = jobs;
    options.settings.max_unfold = max_unfold;

    if (check->parsed()) {
        stt::RunReport r = stt::check_files(expand(paths), options);
        if (as_json)
            std::cout << report_json(r).dump(2) << '\n';
        else
            print_human(r, explain);
        return r.exit_code();
    }

    if (axioms->parsed()) {
        auto files = expand(paths);
        stt::RunReport r = stt::check_files(files, options);
        if (r.exit_code() != 0) {
            print_human(r, false);
            return r.exit_code();
        }
        std::vector<std::string> wanted;
        for (const auto& f : files) wanted.push_back(stt::normalize_path(f));
        json records = json::array();
        for (const auto& f : r.files) {
            if (std::find(wanted.begin(), wanted.end(), stt::normalize_path(f.path)) == wanted.end()) continue;
            for (const auto& e : f.entries) {
                if (as_json) {
                    records.push_back({{"file", f.path},
                                       {"name", e->name},
                                       {"postulate", e->postulate},
                                       {"axioms", e->axioms}});
                    continue;
                }
                std::cout << f.path << " | " << e->name << " | ";
                if (e->axioms.empty()) std::cout << '-';
                for (std::size_t i = 0; i < e->axioms.size(); ++i) std::cout << (i ? ", " : "") << e->axioms[i];
                std::cout << '\n';
            }
        }
        if (as_json) std::cout << records.dump(2) << '\n';
        return 0;
    }

    auto m = stt::load_manifest(manifest);
    if (!m) {
        std::cerr << "cannot read manifest '" << manifest << "'\n";
        return 2;
    }
    stt::CorpusReport r = stt::corpus_check(*m, options);
    if (as_json) {
        json entries = json::array();
        for (const auto& s : r.entries)
            entries.push_back({{"file", s.entry->file},
                               {"name", s.entry->name},
                               {"tier", s.entry->tier == stt::Tier::Proved ? "PROVED" : "STATED"},
                               {"ok", s.ok},
                               {"axioms", s.axioms},
                               {"problem", s.problem}});
        std::cout << json{{"entries", entries}, {"problems", r.problems}, {"ok", r.ok()}}.dump(2) << '\n';
    } else {
        if (r.run.exit_code() != 0) print_human(r.run, false);
        for (const auto& p : r.problems) std::cout << "manifest: " << p << '\n';
        for (const auto& s : r.entries) {
            std::cout << (s.ok ? "ok   " : "FAIL ") << s.entry->file << " | " << s.entry->name << " | "
                      << (s.entry->tier == stt::Tier::Proved ? "PROVED" : "STATED") << " | ";
            if (s.axioms.empty()) std::cout << '-';
            for (std::size_t i = 0; i < s.axioms.size(); ++i) std::cout << (i ? ", " : "") << s.axioms[i];
            if (!s.ok) std::cout << "  (" << s.problem << ')';
            std::cout << '\n';
        }
        std::cout << (r.ok() ? "corpus ok" : "corpus FAILED") << " (" << r.entries.size() << " entries, "
                  << r.run.wall_seconds << " s)\n";
    }
    if (!r.ok()) return r.run.exit_code() == 2 ? 2 : 1;
    return 0;
}
