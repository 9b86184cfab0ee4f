#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dmh/model.hpp"

namespace dmh {

/// Read-only view of one packed code.
struct CodeView {
    std::span<const std::uint64_t> words;
    std::size_t bits = 0;
};

/// Bit-packed code matrix. Bit j of code m lives in word j / 64 at bit
/// position j % 64 (LSB first); bits past the code length are zero.
class PackedCodes {
public:
    static constexpr std::size_t kWordBits = 64;

    PackedCodes() = default;
    PackedCodes(std::size_t n, std::size_t code_length);

    static PackedCodes pack(const CodeMatrix& codes);
    CodeMatrix unpack() const;

    /// Builds codes from the byte layout of the codes file: per code
    /// ceil(c/8) bytes, LSB-first. Non-zero padding bits are a FormatError.
    static PackedCodes from_bytes(std::size_t n, std::size_t code_length,
                                  std::span<const std::uint8_t> bytes);
    std::vector<std::uint8_t> to_bytes() const;

    std::size_t size() const { return n_; }
    std::size_t code_length() const { return bits_; }
    std::size_t words_per_code() const { return words_per_code_; }

    CodeView row(std::size_t m) const;
    bool bit(std::size_t m, std::size_t j) const;

    /// Selects rows by index, in the given order.
    PackedCodes select(std::span<const std::size_t> rows) const;

    bool operator==(const PackedCodes&) const = default;

private:
    void set_bit(std::size_t m, std::size_t j);

    std::size_t n_ = 0;
    std::size_t bits_ = 0;
    std::size_t words_per_code_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Binarises sigmoid_embed(queries, params) at 0.5 (ties to 1) and packs it.
PackedCodes encode_view(const ViewMatrix& queries, const ViewParams& params);

std::uint32_t hamming_distance(CodeView a, CodeView b);

/// Distance from query to every code of db, in db row order.
std::vector<std::uint32_t> distances_to_all(CodeView query,
                                            const PackedCodes& db);

}  // namespace dmh
