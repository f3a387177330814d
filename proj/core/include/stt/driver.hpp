#pragma once

#include <map>
#include <string>
#include <vector>

#include "stt/checker.hpp"

namespace stt {

struct FileReport {
    std::string path;  // as displayed: relative to the working directory when possible
    std::vector<Diagnostic> diagnostics;
    std::vector<GlobalPtr> entries;
    bool io_failed = false;
    bool parse_failed = false;
    double seconds = 0;
};

struct RunOptions {
    int jobs = 1;
    CheckSettings settings;
    /// In-memory file contents that take precedence over the disk, keyed by
    /// normalized absolute path.
    std::map<std::string, std::string> overlays;
};

struct RunReport {
    std::vector<FileReport> files;  // sorted by path
    double wall_seconds = 0;

    std::size_t error_count() const;
    std::size_t warning_count() const;
    std::size_t declaration_count() const;
    /// 0 when clean, 1 on type errors, 2 on I/O or parse failures.
    int exit_code() const;
    /// Every diagnostic in (file, position) order.
    std::vector<Diagnostic> diagnostics() const;
    const GlobalEntry* find(const std::string& name) const;
};

/// Normalized absolute form of a path, used as the identity of a file.
std::string normalize_path(const std::string& path);

/// Checks the given files and, transitively, everything they import. Files
/// whose imports are done are checked concurrently, up to `jobs` at a time.
RunReport check_files(const std::vector<std::string>& paths, const RunOptions& options = {});

}  // namespace stt
