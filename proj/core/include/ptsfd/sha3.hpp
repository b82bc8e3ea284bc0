#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ptsfd::crypto {

using Digest256 = std::array<std::uint8_t, 32>;

// Incremental SHA3-256 (FIPS 202: Keccak[512] with 0x06 domain padding).
class Sha3_256 {
public:
    static constexpr std::size_t kRateBytes = 136;

    Sha3_256() { state_.fill(0); }

    void update(std::span<const std::uint8_t> data);
    Digest256 finalize();

    static Digest256 hash(std::span<const std::uint8_t> data) {
        Sha3_256 h;
        h.update(data);
        return h.finalize();
    }

private:
    void absorb_block(const std::uint8_t* block);

    std::array<std::uint64_t, 25> state_{};
    std::array<std::uint8_t, kRateBytes> buffer_{};
    std::size_t buffered_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace ptsfd::crypto
