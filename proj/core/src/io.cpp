#include "dmh/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "dmh/errors.hpp"
#include "io_detail.hpp"

namespace dmh::io {

namespace {

constexpr std::array<char, 4> kMatrixMagic{'D', 'M', 'H', '1'};
constexpr std::array<char, 4> kCodesMagic{'D', 'M', 'H', 'C'};

}  // namespace

namespace detail {

void put_u32(std::ostream& out, std::uint32_t value) {
    std::array<char, 4> bytes{};
    for (int i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
    }
    out.write(bytes.data(), bytes.size());
}

void put_u64(std::ostream& out, std::uint64_t value) {
    put_u32(out, static_cast<std::uint32_t>(value & 0xffffffffu));
    put_u32(out, static_cast<std::uint32_t>(value >> 32));
}

void put_f32(std::ostream& out, float value) {
    put_u32(out, std::bit_cast<std::uint32_t>(value));
}

void put_f64(std::ostream& out, double value) {
    put_u64(out, std::bit_cast<std::uint64_t>(value));
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw FormatError("unexpected end of file");
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
        value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    }
    return value;
}

std::uint64_t get_u64(std::istream& in) {
    const std::uint64_t lo = get_u32(in);
    const std::uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_magic(std::ostream& out, std::span<const char, 4> magic) {
    out.write(magic.data(), 4);
}

void expect_magic(std::istream& in, std::span<const char, 4> magic,
                  const std::string& what) {
    std::array<char, 4> got{};
    in.read(got.data(), 4);
    if (!in || std::memcmp(got.data(), magic.data(), 4) != 0) {
        throw FormatError("not a " + what + " (bad magic)");
    }
}

void put_matrix_block(std::ostream& out, const Matrix& m) {
    put_magic(out, kMatrixMagic);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_f32(out, static_cast<float>(m(r, c)));
        }
    }
}

Matrix get_matrix_block(std::istream& in) {
    expect_magic(in, kMatrixMagic, "matrix file");
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    Matrix m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            m(r, c) = static_cast<double>(get_f32(in));
        }
    }
    return m;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path.string() + "'");
    return in;
}

void expect_eof(std::istream& in, const std::filesystem::path& path) {
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes in '" + path.string() + "'");
    }
}

}  // namespace detail

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    auto out = detail::open_out(path);
    detail::put_matrix_block(out, m);
    if (!out) throw FileError("failed writing '" + path.string() + "'");
}

Matrix read_matrix(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    Matrix m;
    try {
        m = detail::get_matrix_block(in);
    } catch (const FormatError& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
    detail::expect_eof(in, path);
    return m;
}

void write_codes(const std::filesystem::path& path, const PackedCodes& codes) {
    auto out = detail::open_out(path);
    detail::put_magic(out, kCodesMagic);
    detail::put_u32(out, static_cast<std::uint32_t>(codes.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(codes.code_length()));
    const auto bytes = codes.to_bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FileError("failed writing '" + path.string() + "'");
}

PackedCodes read_codes(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    detail::expect_magic(in, kCodesMagic, "codes file");
    const std::uint32_t n = detail::get_u32(in);
    const std::uint32_t c = detail::get_u32(in);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n) * ((c + 7) / 8));
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!in) throw FormatError("'" + path.string() + "' is truncated");
    detail::expect_eof(in, path);
    return PackedCodes::from_bytes(n, c, bytes);
}

}  // namespace dmh::io
