#pragma once

// Reference implementations used as test oracles. Each one is written
// from the definitions with plain loops and shares no kernel with the
// library under test.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dmh/model.hpp"
#include "dmh/random.hpp"

namespace oracle {

using dmh::CodeMatrix;
using dmh::Matrix;
using dmh::ViewMatrix;
using dmh::ViewParams;

double sigmoid(double z);

/// Objective by explicit summation over every entry.
double objective(const CodeMatrix& B, const std::vector<ViewMatrix>& views,
                 const std::vector<ViewParams>& params);

struct NumericGradient {
    dmh::Vector bias;
    Matrix weights;
};

/// Central differences of oracle::objective with respect to view `which`.
NumericGradient finite_difference(const CodeMatrix& B,
                                  const std::vector<ViewMatrix>& views,
                                  std::vector<ViewParams> params,
                                  std::size_t which, double step = 1e-5);

/// Per-bit comparison on unpacked rows.
std::size_t hamming(const CodeMatrix& a, Eigen::Index ra, const CodeMatrix& b,
                    Eigen::Index rb);

/// Database indices sorted by (distance, index).
std::vector<std::size_t> ranking(const CodeMatrix& queries, Eigen::Index q,
                                 const CodeMatrix& db);

/// AP straight from the formula over the top-R ranked items.
double average_precision(const CodeMatrix& queries, Eigen::Index q,
                         const CodeMatrix& db,
                         const std::vector<std::size_t>& relevant,
                         std::size_t cutoff);

/// AP of an explicit relevance pattern.
double average_precision(const std::vector<bool>& pattern);

double mean_average_precision(const CodeMatrix& queries, const CodeMatrix& db,
                              const std::vector<std::vector<std::size_t>>& relevant,
                              std::size_t cutoff);

struct Lookup {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Lookup lookup(const CodeMatrix& queries, const CodeMatrix& db,
              const std::vector<std::vector<std::size_t>>& relevant,
              std::size_t radius);

/// Training accuracy of a least-squares one-vs-rest linear classifier.
double least_squares_accuracy(const Matrix& X, const std::vector<int>& classes);

CodeMatrix random_codes(dmh::Rng& rng, Eigen::Index n, Eigen::Index c);
Matrix random_gaussian(dmh::Rng& rng, Eigen::Index rows, Eigen::Index cols,
                       double scale = 1.0);

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const {
        return path_ / name;
    }

private:
    std::filesystem::path path_;
};

std::vector<std::uint8_t> file_bytes(const std::filesystem::path& path);
std::string file_text(const std::filesystem::path& path);

}  // namespace oracle
