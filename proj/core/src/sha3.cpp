#include "ptsfd/sha3.hpp"

#include <bit>
#include <cstring>

#include "ptsfd/errors.hpp"

namespace ptsfd::crypto {

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// Rotation offsets, indexed [x][y] with lane (x, y) stored at state[x + 5y].
constexpr int kRho[5][5] = {
    {0, 36, 3, 41, 18},
    {1, 44, 10, 45, 2},
    {62, 6, 43, 15, 61},
    {28, 55, 25, 21, 56},
    {27, 20, 39, 8, 14},
};

void keccak_f1600(std::array<std::uint64_t, 25>& a) {
    for (int round = 0; round < 24; ++round) {
        // theta
        std::uint64_t c[5];
        for (int x = 0; x < 5; ++x)
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        for (int x = 0; x < 5; ++x) {
            const std::uint64_t d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 5; ++y) a[x + 5 * y] ^= d;
        }

        // rho + pi
        std::uint64_t b[25];
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                b[y + 5 * ((2 * x + 3 * y) % 5)] = std::rotl(a[x + 5 * y], kRho[x][y]);

        // chi
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x)
                a[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);

        // iota
        a[0] ^= kRoundConstants[round];
    }
}

}  // namespace

void Sha3_256::absorb_block(const std::uint8_t* block) {
    for (std::size_t i = 0; i < kRateBytes / 8; ++i) {
        std::uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);  // little-endian host assumed
        state_[i] ^= lane;
    }
    keccak_f1600(state_);
}

void Sha3_256::update(std::span<const std::uint8_t> data) {
    std::size_t off = 0;
    if (buffered_ > 0) {
        const std::size_t take = std::min(data.size(), kRateBytes - buffered_);
        std::memcpy(buffer_.data() + buffered_, data.data(), take);
        buffered_ += take;
        off = take;
        if (buffered_ == kRateBytes) {
            absorb_block(buffer_.data());
            buffered_ = 0;
        }
    }
    while (data.size() - off >= kRateBytes) {
        absorb_block(data.data() + off);
        off += kRateBytes;
    }
    if (off < data.size()) {
        std::memcpy(buffer_.data() + buffered_, data.data() + off, data.size() - off);
        buffered_ += data.size() - off;
    }
}

Digest256 Sha3_256::finalize() {
    buffer_[buffered_] = 0x06;
    for (std::size_t i = buffered_ + 1; i < kRateBytes; ++i) buffer_[i] = 0;
    buffer_[kRateBytes - 1] |= 0x80;
    absorb_block(buffer_.data());

    Digest256 out;
    std::memcpy(out.data(), state_.data(), out.size());
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0x0F]);
    }
    return s;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw ParseError("hex string has odd length");
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw ParseError("invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

}  // namespace ptsfd::crypto
