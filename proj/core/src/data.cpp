#include "dmh/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dmh/errors.hpp"
#include "dmh/io.hpp"
#include "dmh/random.hpp"

namespace dmh {

namespace {

constexpr const char* kLabelViewId = "labels";

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) =
            m.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

}  // namespace

std::vector<std::size_t> MultimodalDataset::feature_views() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (!views[i].is_label_view) out.push_back(i);
    }
    return out;
}

MultimodalDataset MultimodalDataset::subset(
    std::span<const std::size_t> rows) const {
    for (std::size_t r : rows) {
        if (r >= this->rows()) throw ContractViolation("row index out of range");
    }
    MultimodalDataset out;
    out.views.reserve(views.size());
    for (const auto& view : views) {
        out.views.push_back({take_rows(view.data, rows), view.view_id,
                             view.is_label_view});
    }
    out.labels = take_rows(labels, rows);
    return out;
}

void MultimodalDataset::validate() const {
    const auto n = labels.rows();
    if (n < 1) throw DataError("dataset has no rows");
    for (const auto& view : views) {
        view.validate();
        if (view.rows() != n) {
            throw DataError("view '" + view.view_id + "' has " +
                            std::to_string(view.rows()) + " rows, labels have " +
                            std::to_string(n));
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < labels.cols(); ++c) {
            const double x = labels(r, c);
            if (x != 0.0 && x != 1.0) {
                throw DataError("label matrix must be binary");
            }
        }
    }
    if (!split.train.empty() || !split.test.empty()) {
        std::vector<std::size_t> all(split.train);
        all.insert(all.end(), split.test.begin(), split.test.end());
        std::sort(all.begin(), all.end());
        if (all.size() != static_cast<std::size_t>(n) ||
            std::adjacent_find(all.begin(), all.end()) != all.end() ||
            all.back() >= static_cast<std::size_t>(n)) {
            throw DataError("split is not a partition of the rows");
        }
    }
}

LoadedDataset load_dataset(std::span<const std::filesystem::path> view_paths,
                           const std::filesystem::path& labels_path,
                           bool label_view) {
    if (view_paths.empty()) throw DataError("no view files given");
    const Matrix labels = io::read_matrix(labels_path);
    std::vector<Matrix> raw;
    raw.reserve(view_paths.size());
    for (const auto& path : view_paths) {
        raw.push_back(io::read_matrix(path));
        if (raw.back().rows() != labels.rows()) {
            throw DataError("row-count mismatch: '" + path.string() + "' has " +
                            std::to_string(raw.back().rows()) +
                            " rows, labels have " +
                            std::to_string(labels.rows()));
        }
    }

    std::vector<std::size_t> keep;
    for (Eigen::Index r = 0; r < labels.rows(); ++r) {
        if ((labels.row(r).array() != 0.0).any()) {
            keep.push_back(static_cast<std::size_t>(r));
        }
    }
    if (keep.empty()) throw DataError("no row has a positive label");

    LoadedDataset loaded;
    loaded.report.rows_read = static_cast<std::size_t>(labels.rows());
    loaded.report.rows_dropped = loaded.report.rows_read - keep.size();

    auto& ds = loaded.dataset;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        ds.views.push_back({take_rows(raw[i], keep),
                            view_paths[i].stem().string(), false});
    }
    ds.labels = take_rows(labels, keep);
    if (label_view) ds.views.push_back({ds.labels, kLabelViewId, true});
    ds.validate();
    return loaded;
}

std::vector<std::filesystem::path> save_dataset(
    const MultimodalDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (std::size_t i : dataset.feature_views()) {
        auto path = dir / ("view_" + std::to_string(paths.size()) + ".dmh");
        io::write_matrix(path, dataset.views[i].data);
        paths.push_back(std::move(path));
    }
    io::write_matrix(dir / "labels.dmh", dataset.labels);
    return paths;
}

MultimodalDataset rescale_views(const MultimodalDataset& dataset,
                                std::span<const double> betas) {
    if (betas.size() != dataset.views.size()) {
        throw ConfigError("expected " + std::to_string(dataset.views.size()) +
                          " beta values, got " + std::to_string(betas.size()));
    }
    MultimodalDataset out = dataset;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0) || !std::isfinite(betas[i])) {
            throw ConfigError("beta must be positive and finite");
        }
        out.views[i].data *= betas[i];
    }
    return out;
}

double auto_beta(const ViewMatrix& view) {
    const double peak = view.data.cwiseAbs().maxCoeff();
    return peak > 0.0 ? 255.0 / peak : 1.0;
}

MultimodalDataset split_dataset(const MultimodalDataset& dataset,
                                double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test fraction must lie in (0, 1)");
    }
    const std::size_t n = dataset.rows();
    if (n < 2) throw DataError("need at least two rows to split");
    auto test_count = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    test_count = std::clamp<std::size_t>(test_count, 1, n - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    // Partial Fisher-Yates: the first test_count slots are the test rows.
    for (std::size_t i = 0; i < test_count; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(order[i], order[j]);
    }

    MultimodalDataset out = dataset;
    out.split.test.assign(order.begin(),
                          order.begin() + static_cast<std::ptrdiff_t>(test_count));
    out.split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_count),
                           order.end());
    std::sort(out.split.test.begin(), out.split.test.end());
    std::sort(out.split.train.begin(), out.split.train.end());
    return out;
}

bool shares_label(const Matrix& labels, std::size_t a, std::size_t b) {
    const auto ra = labels.row(static_cast<Eigen::Index>(a));
    const auto rb = labels.row(static_cast<Eigen::Index>(b));
    return ra.dot(rb) > 0.0;
}

GroundTruth ground_truth_from_labels(const MultimodalDataset& dataset) {
    if (dataset.labels.size() == 0) throw DataError("dataset has no labels");
    const auto& split = dataset.split;
    GroundTruth truth;
    truth.database_size = split.train.size();
    truth.relevant.resize(split.test.size());
    for (std::size_t q = 0; q < split.test.size(); ++q) {
        for (std::size_t m = 0; m < split.train.size(); ++m) {
            if (shares_label(dataset.labels, split.test[q], split.train[m])) {
                truth.relevant[q].push_back(m);
            }
        }
    }
    return truth;
}

void SyntheticSpec::validate() const {
    if (n_per_class < 1 || n_classes < 1) {
        throw ConfigError("class counts must be positive");
    }
    if (dims.empty()) throw ConfigError("synthetic data needs a view");
    for (int d : dims) {
        if (d < 1) throw ConfigError("view dimensions must be positive");
    }
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
}

MultimodalDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const Eigen::Index n =
        static_cast<Eigen::Index>(spec.n_per_class) * spec.n_classes;

    MultimodalDataset ds;
    ds.labels = Matrix::Zero(n, spec.n_classes);
    for (Eigen::Index r = 0; r < n; ++r) {
        ds.labels(r, r / spec.n_per_class) = 1.0;
    }

    for (std::size_t v = 0; v < spec.dims.size(); ++v) {
        const int d = spec.dims[v];
        Matrix centroids(spec.n_classes, d);
        for (int k = 0; k < spec.n_classes; ++k) {
            for (int j = 0; j < d; ++j) centroids(k, j) = rng.normal();
        }
        Matrix features(n, d);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Eigen::Index k = r / spec.n_per_class;
            for (int j = 0; j < d; ++j) {
                features(r, j) = centroids(k, j) + spec.noise_sigma * rng.normal();
            }
        }
        ds.views.push_back({std::move(features), "view" + std::to_string(v),
                            false});
    }
    ds.views.push_back({ds.labels, kLabelViewId, true});
    return ds;
}

}  // namespace dmh
