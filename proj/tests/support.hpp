#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "frameforge/corpus.hpp"
#include "frameforge/matrix.hpp"

namespace testing_support {

inline frameforge::Instance instance(const std::string& id, const std::string& verb,
                                     const std::string& frame) {
    return {id, verb, {"they", verb, "it"}, 1, frame, frameforge::make_gold_lu(verb, frame)};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() /
                (name + "-" + std::to_string(std::random_device{}()))) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline frameforge::MatrixD random_rows(std::mt19937_64& gen, std::size_t n, std::size_t d,
                                       double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    frameforge::MatrixD m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            m(i, k) = normal(gen);
        }
    }
    return m;
}

} // namespace testing_support
