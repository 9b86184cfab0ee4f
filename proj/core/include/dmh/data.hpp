#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dmh/model.hpp"

namespace dmh {

/// Row partition of a dataset. Both lists are sorted ascending.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Feature views plus (optionally) the label matrix as a trailing view.
///
/// `labels` always holds the raw binary label matrix; the label view, when
/// present, is a copy that participates in training and may be rescaled.
struct MultimodalDataset {
    std::vector<ViewMatrix> views;
    Matrix labels;  // n x L, entries 0/1
    Split split;

    std::size_t rows() const { return static_cast<std::size_t>(labels.rows()); }

    /// Indices of the views that are not the label view.
    std::vector<std::size_t> feature_views() const;

    /// Copy of every view restricted to the given rows (labels too).
    MultimodalDataset subset(std::span<const std::size_t> rows) const;

    /// Checks row alignment, label binarity and the split partition.
    void validate() const;
};

/// For each test query, the sorted positions within split.train of the
/// training rows that share at least one label with it.
struct GroundTruth {
    std::vector<std::vector<std::size_t>> relevant;
    std::size_t database_size = 0;
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;  // rows without any positive label
};

struct LoadedDataset {
    MultimodalDataset dataset;
    LoadReport report;
};

/// Reads feature views and labels from matrix files. Rows without a
/// positive label are dropped from every view. The label matrix is appended
/// as a view when `label_view` is set. The split is left empty.
LoadedDataset load_dataset(std::span<const std::filesystem::path> view_paths,
                           const std::filesystem::path& labels_path,
                           bool label_view = true);

/// Writes view_<i>.dmh for each feature view and labels.dmh into dir.
/// Returns the view paths in order.
std::vector<std::filesystem::path> save_dataset(
    const MultimodalDataset& dataset, const std::filesystem::path& dir);

/// Multiplies view i by betas[i]. The raw labels are left untouched.
MultimodalDataset rescale_views(const MultimodalDataset& dataset,
                                std::span<const double> betas);

/// 255 / max|X|, the factor that maps the view into [-255, 255]; 1 for an
/// all-zero view.
double auto_beta(const ViewMatrix& view);

/// Seeded uniform split; round(n * test_fraction) rows (at least one, at
/// most n - 1) go to the test side.
MultimodalDataset split_dataset(const MultimodalDataset& dataset,
                                double test_fraction, std::uint64_t seed);

/// Label-sharing relation between two raw label rows.
bool shares_label(const Matrix& labels, std::size_t a, std::size_t b);

GroundTruth ground_truth_from_labels(const MultimodalDataset& dataset);

struct SyntheticSpec {
    int n_per_class = 50;
    int n_classes = 4;
    std::vector<int> dims{10, 12};
    double noise_sigma = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Gaussian class clusters per view; one-hot labels; rows grouped by class.
/// Centroids are standard normal per view and coordinate, drawn
/// independently for each view, and each sample adds N(0, noise_sigma^2)
/// noise. Includes the label view.
MultimodalDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace dmh
