#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stt/driver.hpp"

namespace stt {

enum class Tier { Proved, Stated };

struct ManifestEntry {
    std::string file;  // relative to the manifest
    std::string name;
    std::string anchor;
    std::vector<std::string> axioms;  // permitted postulates, sorted
    Tier tier = Tier::Proved;
    int line = 0;
};

struct Manifest {
    std::string path;
    std::string dir;
    std::vector<ManifestEntry> entries;
    std::vector<std::string> errors;  // malformed lines

    /// Files in first-mention order, as absolute paths.
    std::vector<std::string> files() const;
};

Manifest parse_manifest(const std::string& text, const std::string& path = "manifest.txt");
std::optional<Manifest> load_manifest(const std::string& path);

struct EntryStatus {
    const ManifestEntry* entry = nullptr;
    bool ok = false;
    std::vector<std::string> axioms;  // observed
    std::string problem;
};

struct CorpusReport {
    RunReport run;
    std::vector<EntryStatus> entries;
    std::vector<std::string> problems;  // manifest-level issues

    bool ok() const;
};

/// Checks every manifest file and compares each entry with what was checked.
/// Anchors are validated against `anchors.txt` next to the manifest, if present.
CorpusReport corpus_check(const Manifest& m, const RunOptions& options = {});

struct Mutant {
    std::string name;
    std::string file;  // relative to the mutant list
    std::string decl;
    std::string find;
    std::string replace;
    int line = 0;
};

std::vector<Mutant> parse_mutants(const std::string& text, std::vector<std::string>* errors = nullptr);

struct MutantResult {
    const Mutant* mutant = nullptr;
    bool applied = false;  // the find text occurs inside the declaration
    bool killed = false;   // rejected with an error inside the declaration
    std::vector<Diagnostic> diagnostics;
};

/// Applies the mutation in memory and checks the mutated file.
MutantResult run_mutant(const Mutant& m, const std::string& base_dir, const RunOptions& options = {});

}  // namespace stt
