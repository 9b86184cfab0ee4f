#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>

#include "dmh/model.hpp"

// Little-endian primitives shared by the matrix, codes and model formats.
namespace dmh::io::detail {

void put_u32(std::ostream& out, std::uint32_t value);
void put_u64(std::ostream& out, std::uint64_t value);
void put_f32(std::ostream& out, float value);
void put_f64(std::ostream& out, double value);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
float get_f32(std::istream& in);
double get_f64(std::istream& in);

void put_magic(std::ostream& out, std::span<const char, 4> magic);
void expect_magic(std::istream& in, std::span<const char, 4> magic,
                  const std::string& what);

void put_matrix_block(std::ostream& out, const Matrix& m);
Matrix get_matrix_block(std::istream& in);

std::ofstream open_out(const std::filesystem::path& path);
std::ifstream open_in(const std::filesystem::path& path);
void expect_eof(std::istream& in, const std::filesystem::path& path);

}  // namespace dmh::io::detail
