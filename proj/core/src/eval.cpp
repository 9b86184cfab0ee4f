#include "dmh/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "dmh/errors.hpp"

namespace dmh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<bool> relevance_mask(std::span<const std::size_t> relevant,
                                 std::size_t db_size) {
    std::vector<bool> mask(db_size, false);
    for (std::size_t idx : relevant) {
        if (idx >= db_size) {
            throw ContractViolation("relevant index " + std::to_string(idx) +
                                    " outside database of size " +
                                    std::to_string(db_size));
        }
        mask[idx] = true;
    }
    return mask;
}

void check_truth(const PackedCodes& queries, const PackedCodes& db,
                 const GroundTruth& truth) {
    if (truth.relevant.size() != queries.size()) {
        throw ContractViolation("ground truth covers " +
                                std::to_string(truth.relevant.size()) +
                                " queries, got " + std::to_string(queries.size()));
    }
    if (truth.database_size != db.size()) {
        throw ContractViolation("ground truth database size differs from db");
    }
}

}  // namespace

std::vector<std::size_t> rank_by_hamming(CodeView query, const PackedCodes& db) {
    const auto distances = distances_to_all(query, db);
    // Counting sort over distances 0..c is stable, so ties stay in index order.
    std::vector<std::size_t> counts(query.bits + 2, 0);
    for (auto d : distances) ++counts[d + 1];
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    std::vector<std::size_t> order(distances.size());
    for (std::size_t m = 0; m < distances.size(); ++m) {
        order[counts[distances[m]]++] = m;
    }
    return order;
}

double average_precision_of_ranking(std::span<const bool> ranked_relevance) {
    // Extended precision so the final rounding is the only one that shows:
    // the pattern (1,0,1) gives 5/6 to the last bit.
    long double sum = 0.0L;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ranked_relevance.size(); ++r) {
        if (ranked_relevance[r]) {
            ++hits;
            sum += static_cast<long double>(hits) / static_cast<long double>(r + 1);
        }
    }
    return hits == 0 ? 0.0 : static_cast<double>(sum / static_cast<long double>(hits));
}

double average_precision(CodeView query, const PackedCodes& db,
                         std::span<const std::size_t> relevant,
                         std::size_t cutoff) {
    if (relevant.empty()) {
        throw EvaluationError("average precision undefined: no relevant item");
    }
    if (cutoff > db.size()) {
        throw ContractViolation("cutoff exceeds database size");
    }
    const std::size_t depth = cutoff == 0 ? db.size() : cutoff;
    const auto mask = relevance_mask(relevant, db.size());
    const auto order = rank_by_hamming(query, db);
    auto ranked = std::make_unique<bool[]>(depth);
    for (std::size_t r = 0; r < depth; ++r) ranked[r] = mask[order[r]];
    return average_precision_of_ranking({ranked.get(), depth});
}

RankingResult mean_average_precision(const PackedCodes& queries,
                                     const PackedCodes& db,
                                     const GroundTruth& truth,
                                     std::size_t cutoff) {
    check_truth(queries, db, truth);
    RankingResult result;
    result.per_query_ap.assign(queries.size(), kNaN);
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        if (truth.relevant[q].empty()) {
            ++result.excluded_queries;
            continue;
        }
        const double ap =
            average_precision(queries.row(q), db, truth.relevant[q], cutoff);
        result.per_query_ap[q] = ap;
        sum += ap;
        ++counted;
    }
    if (counted == 0) {
        throw EvaluationError("no query has a relevant database item");
    }
    result.map = sum / static_cast<double>(counted);
    return result;
}

LookupResult lookup_f1(const PackedCodes& queries, const PackedCodes& db,
                       const GroundTruth& truth, std::size_t radius) {
    check_truth(queries, db, truth);
    LookupResult result;
    result.per_query_f1.assign(queries.size(), kNaN);
    double p_sum = 0.0;
    double r_sum = 0.0;
    double f_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto& relevant = truth.relevant[q];
        if (relevant.empty()) {
            ++result.excluded_queries;
            continue;
        }
        const auto mask = relevance_mask(relevant, db.size());
        const auto distances = distances_to_all(queries.row(q), db);
        std::size_t retrieved = 0;
        std::size_t hits = 0;
        for (std::size_t m = 0; m < distances.size(); ++m) {
            if (distances[m] <= radius) {
                ++retrieved;
                if (mask[m]) ++hits;
            }
        }
        double precision = 0.0;
        double recall = 0.0;
        double f1 = 0.0;
        if (retrieved > 0) {
            precision = static_cast<double>(hits) / static_cast<double>(retrieved);
            recall = static_cast<double>(hits) /
                     static_cast<double>(relevant.size());
            if (precision + recall > 0.0) {
                f1 = 2.0 * precision * recall / (precision + recall);
            }
        }
        result.per_query_f1[q] = f1;
        p_sum += precision;
        r_sum += recall;
        f_sum += f1;
        ++counted;
    }
    if (counted > 0) {
        const double denom = static_cast<double>(counted);
        result.precision = p_sum / denom;
        result.recall = r_sum / denom;
        result.f1 = f_sum / denom;
    }
    return result;
}

CrossModalCodes cross_modal_codes(const HashModel& model,
                                  const MultimodalDataset& dataset,
                                  Direction direction) {
    if (direction.query_view >= model.views.size() ||
        direction.database_view >= model.views.size() ||
        direction.query_view >= dataset.views.size() ||
        direction.database_view >= dataset.views.size()) {
        throw ContractViolation("direction refers to a missing view");
    }
    if (dataset.split.test.empty() || dataset.split.train.empty()) {
        throw ContractViolation("dataset must be split before evaluation");
    }
    const auto query_rows = dataset.subset(dataset.split.test);
    const auto db_rows = dataset.subset(dataset.split.train);
    return {encode_view(query_rows.views[direction.query_view],
                        model.views[direction.query_view].params),
            encode_view(db_rows.views[direction.database_view],
                        model.views[direction.database_view].params)};
}

EvalReport evaluate_cross_modal(const HashModel& model,
                                const MultimodalDataset& dataset,
                                Direction direction, std::size_t cutoff,
                                std::size_t radius) {
    const auto codes = cross_modal_codes(model, dataset, direction);
    const auto truth = ground_truth_from_labels(dataset);
    const auto ranking =
        mean_average_precision(codes.queries, codes.database, truth, cutoff);
    const auto lookup = lookup_f1(codes.queries, codes.database, truth, radius);

    EvalReport report;
    report.task = model.views[direction.query_view].id + "->" +
                  model.views[direction.database_view].id;
    report.code_length = model.code_length;
    report.map = ranking.map;
    report.per_query_ap = ranking.per_query_ap;
    report.f1 = lookup.f1;
    report.precision = lookup.precision;
    report.recall = lookup.recall;
    report.per_query_f1 = lookup.per_query_f1;
    report.radius = radius;
    report.cutoff = cutoff == 0 ? codes.database.size() : cutoff;
    report.queries = codes.queries.size();
    report.excluded_queries = ranking.excluded_queries;
    return report;
}

double mean_abs_column_correlation(const CodeMatrix& codes) {
    const Eigen::Index c = codes.cols();
    if (c < 2 || codes.rows() < 1) return 0.0;
    Matrix x = codes.bits.cast<double>();
    x.rowwise() -= x.colwise().mean();
    const Vector norms = x.colwise().norm().transpose();
    const Matrix cov = x.transpose() * x;
    double sum = 0.0;
    for (Eigen::Index p = 0; p < c; ++p) {
        for (Eigen::Index q = p + 1; q < c; ++q) {
            if (norms(p) == 0.0 || norms(q) == 0.0) {
                sum += 1.0;
            } else {
                sum += std::min(1.0, std::abs(cov(p, q)) / (norms(p) * norms(q)));
            }
        }
    }
    return sum / (static_cast<double>(c) * static_cast<double>(c - 1) / 2.0);
}

}  // namespace dmh
