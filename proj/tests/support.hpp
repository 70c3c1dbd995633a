#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "flower/identifier.hpp"

#ifndef FLOWER_FIXTURE_DIR
#error "FLOWER_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(FLOWER_FIXTURE_DIR) / name; }

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "flower") {
        std::string pattern = (std::filesystem::temp_directory_path() / (tag + "_XXXXXX")).string();
        std::vector<char> buf(pattern.begin(), pattern.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Column references compared by matching key, as the catalog does.
using Pair = std::pair<flower::ColumnRef, flower::ColumnRef>;

inline Pair pair_of(const std::string& from, const std::string& to) {
    return {flower::parse_column_ref(from), flower::parse_column_ref(to)};
}

/// Runs a shell command and returns its exit status.
inline int run_status(const std::string& command) {
    int raw = std::system(command.c_str());
    if (raw == -1) return -1;
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace testing
