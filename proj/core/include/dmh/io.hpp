#pragma once

#include <filesystem>

#include "dmh/codes.hpp"
#include "dmh/model.hpp"

namespace dmh::io {

// Matrix file: "DMH1", u32 LE rows, u32 LE cols, rows*cols IEEE-754 float32
// LE values in row-major order. Values are narrowed to float on write.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

// Codes file: "DMHC", u32 LE n, u32 LE c, then ceil(c/8) bytes per code,
// LSB-first, zero padding.
void write_codes(const std::filesystem::path& path, const PackedCodes& codes);
PackedCodes read_codes(const std::filesystem::path& path);

}  // namespace dmh::io
