#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dmh/artifact.hpp"
#include "dmh/codes.hpp"
#include "dmh/data.hpp"

namespace dmh {

/// Database indices ordered by Hamming distance to the query; equal
/// distances keep ascending database index.
std::vector<std::size_t> rank_by_hamming(CodeView query, const PackedCodes& db);

/// AP = (1/N) sum_{r<=R} P(r) delta(r) over a ranked relevance pattern of
/// length R, with N the number of relevant items in it. Zero when N = 0.
double average_precision_of_ranking(std::span<const bool> ranked_relevance);

/// AP of one query against db with cutoff R (R = 0 means the whole db).
/// `relevant` holds database indices; an empty set throws EvaluationError.
double average_precision(CodeView query, const PackedCodes& db,
                         std::span<const std::size_t> relevant,
                         std::size_t cutoff = 0);

struct RankingResult {
    double map = 0.0;
    std::vector<double> per_query_ap;  // NaN for excluded queries
    std::size_t excluded_queries = 0;
};

/// Mean AP over queries with a non-empty relevant set.
RankingResult mean_average_precision(const PackedCodes& queries,
                                     const PackedCodes& db,
                                     const GroundTruth& truth,
                                     std::size_t cutoff = 0);

struct LookupResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<double> per_query_f1;  // NaN for excluded queries
    std::size_t excluded_queries = 0;
};

/// Hash lookup within a Hamming radius. An empty retrieved set scores
/// precision = recall = F1 = 0 for that query; queries with no relevant
/// item are excluded from the averages.
LookupResult lookup_f1(const PackedCodes& queries, const PackedCodes& db,
                       const GroundTruth& truth, std::size_t radius);

/// Which trained view encodes the queries and which encodes the database.
struct Direction {
    std::size_t query_view = 0;
    std::size_t database_view = 1;

    Direction swapped() const { return {database_view, query_view}; }
};

struct EvalReport {
    std::string task;
    int code_length = 0;
    double map = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::vector<double> per_query_ap;
    std::vector<double> per_query_f1;
    std::size_t radius = 2;
    std::size_t cutoff = 0;
    std::size_t queries = 0;
    std::size_t excluded_queries = 0;
};

struct CrossModalCodes {
    PackedCodes queries;   // test rows encoded with the query view
    PackedCodes database;  // training rows encoded with the database view
};

/// The dataset must be split and already rescaled the same way the model
/// was trained. View indices refer to both model.views and dataset.views.
CrossModalCodes cross_modal_codes(const HashModel& model,
                                  const MultimodalDataset& dataset,
                                  Direction direction);

EvalReport evaluate_cross_modal(const HashModel& model,
                                const MultimodalDataset& dataset,
                                Direction direction, std::size_t cutoff = 0,
                                std::size_t radius = 2);

/// Mean absolute Pearson correlation over distinct column pairs of a code
/// matrix. A pair involving a constant column counts as fully correlated
/// (|r| = 1): such a bit carries no information independent of the rest.
double mean_abs_column_correlation(const CodeMatrix& codes);

}  // namespace dmh
