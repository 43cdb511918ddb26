#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

// Shared helpers for the test suites. Test randomness uses std::mt19937
// with fixed seeds; it never needs the cross-platform guarantees of the
// library's own generator.

inline std::filesystem::path test_tmp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("densim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    return path.string();
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
