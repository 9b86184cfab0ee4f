#include "dmh/codes.hpp"

#include <algorithm>
#include <bit>

#include "dmh/errors.hpp"

namespace dmh {

PackedCodes::PackedCodes(std::size_t n, std::size_t code_length)
    : n_(n),
      bits_(code_length),
      words_per_code_((code_length + kWordBits - 1) / kWordBits),
      words_(n * words_per_code_, 0) {}

void PackedCodes::set_bit(std::size_t m, std::size_t j) {
    words_[m * words_per_code_ + j / kWordBits] |= std::uint64_t{1}
                                                   << (j % kWordBits);
}

bool PackedCodes::bit(std::size_t m, std::size_t j) const {
    if (m >= n_ || j >= bits_) throw ContractViolation("bit index out of range");
    return (words_[m * words_per_code_ + j / kWordBits] >> (j % kWordBits)) &
           1u;
}

PackedCodes PackedCodes::pack(const CodeMatrix& codes) {
    PackedCodes packed(static_cast<std::size_t>(codes.rows()),
                       static_cast<std::size_t>(codes.cols()));
    for (Eigen::Index m = 0; m < codes.rows(); ++m) {
        for (Eigen::Index j = 0; j < codes.cols(); ++j) {
            const auto value = codes.bits(m, j);
            if (value > 1) {
                throw ContractViolation("code matrix entry is not 0 or 1");
            }
            if (value == 1) {
                packed.set_bit(static_cast<std::size_t>(m),
                               static_cast<std::size_t>(j));
            }
        }
    }
    return packed;
}

CodeMatrix PackedCodes::unpack() const {
    CodeMatrix out{BitMatrix::Zero(static_cast<Eigen::Index>(n_),
                                   static_cast<Eigen::Index>(bits_))};
    for (std::size_t m = 0; m < n_; ++m) {
        for (std::size_t j = 0; j < bits_; ++j) {
            out.bits(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) =
                bit(m, j) ? 1 : 0;
        }
    }
    return out;
}

PackedCodes PackedCodes::from_bytes(std::size_t n, std::size_t code_length,
                                    std::span<const std::uint8_t> bytes) {
    const std::size_t bytes_per_code = (code_length + 7) / 8;
    if (bytes.size() != n * bytes_per_code) {
        throw FormatError("expected " + std::to_string(n * bytes_per_code) +
                          " code bytes, got " + std::to_string(bytes.size()));
    }
    PackedCodes packed(n, code_length);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t b = 0; b < bytes_per_code; ++b) {
            const std::uint8_t byte = bytes[m * bytes_per_code + b];
            for (std::size_t k = 0; k < 8; ++k) {
                if (((byte >> k) & 1u) == 0) continue;
                const std::size_t j = b * 8 + k;
                if (j >= code_length) {
                    throw FormatError("non-zero padding bit in code " +
                                      std::to_string(m));
                }
                packed.set_bit(m, j);
            }
        }
    }
    return packed;
}

std::vector<std::uint8_t> PackedCodes::to_bytes() const {
    const std::size_t bytes_per_code = (bits_ + 7) / 8;
    std::vector<std::uint8_t> out(n_ * bytes_per_code, 0);
    for (std::size_t m = 0; m < n_; ++m) {
        const std::uint64_t* code = words_.data() + m * words_per_code_;
        for (std::size_t b = 0; b < bytes_per_code; ++b) {
            out[m * bytes_per_code + b] = static_cast<std::uint8_t>(
                code[b / 8] >> ((b % 8) * 8));
        }
    }
    return out;
}

CodeView PackedCodes::row(std::size_t m) const {
    if (m >= n_) throw ContractViolation("code row out of range");
    return {std::span<const std::uint64_t>(words_.data() + m * words_per_code_,
                                           words_per_code_),
            bits_};
}

PackedCodes PackedCodes::select(std::span<const std::size_t> rows) const {
    PackedCodes out(rows.size(), bits_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const CodeView src = row(rows[i]);
        std::copy(src.words.begin(), src.words.end(),
                  out.words_.begin() +
                      static_cast<std::ptrdiff_t>(i * words_per_code_));
    }
    return out;
}

PackedCodes encode_view(const ViewMatrix& queries, const ViewParams& params) {
    const Matrix C = sigmoid_embed(queries, params).values;
    const CodeMatrix bits{C.unaryExpr(
        [](double x) -> std::uint8_t { return x >= 0.5 ? 1 : 0; })};
    return PackedCodes::pack(bits);
}

std::uint32_t hamming_distance(CodeView a, CodeView b) {
    if (a.bits != b.bits || a.words.size() != b.words.size()) {
        throw ContractViolation("code lengths differ: " +
                                std::to_string(a.bits) + " vs " +
                                std::to_string(b.bits));
    }
    std::uint32_t distance = 0;
    for (std::size_t w = 0; w < a.words.size(); ++w) {
        distance += static_cast<std::uint32_t>(std::popcount(a.words[w] ^ b.words[w]));
    }
    return distance;
}

std::vector<std::uint32_t> distances_to_all(CodeView query,
                                            const PackedCodes& db) {
    if (query.bits != db.code_length()) {
        throw ContractViolation("query has " + std::to_string(query.bits) +
                                " bits, database has " +
                                std::to_string(db.code_length()));
    }
    std::vector<std::uint32_t> out(db.size());
    for (std::size_t m = 0; m < db.size(); ++m) {
        out[m] = hamming_distance(query, db.row(m));
    }
    return out;
}

}  // namespace dmh
