#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dmh/model.hpp"
#include "dmh/optimizer.hpp"

namespace dmh {

/// A trained model: one ViewParams per training view (label view included)
/// and the configuration that produced it.
struct HashModel {
    struct View {
        std::string id;
        bool is_label_view = false;
        ViewParams params;
    };

    int code_length = 0;
    std::string variant;  // "dmh", or "dmh-no-mcr" when every gamma is 0
    TrainConfig config;
    std::vector<View> views;

    std::size_t find_view(const std::string& id) const;
};

/// Variant tag derived from the per-view gamma values.
std::string model_variant(std::span<const ViewParams> params);

namespace io {

// Model file, version 1, all integers/floats little-endian:
//   "DMHM" u32 version
//   u32 code_length, u32 variant length, variant bytes
//   f64 k_s, f64 k_e, u32 max_iter, f64 convergence_rtol, u64 seed
//   u32 view count, then per view:
//     u32 id length, id bytes, u8 is_label_view,
//     u32 d, u32 c, f64 alpha, f64 beta, f64 gamma,
//     W as a matrix block (d x c), v as a matrix block (1 x c)
// Matrix blocks use the "DMH1" matrix layout, so W and v are stored as
// float32.
void save_model(const std::filesystem::path& path, const HashModel& model);
HashModel load_model(const std::filesystem::path& path);

}  // namespace io

}  // namespace dmh
