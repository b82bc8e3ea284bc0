#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ptsfd/sha3.hpp"

using ptsfd::crypto::Sha3_256;
using ptsfd::crypto::to_hex;

namespace {

std::string hash_hex(const std::vector<std::uint8_t>& data) {
    return to_hex(Sha3_256::hash(data));
}

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

}  // namespace

// Reference digests computed with an independent SHA3-256 implementation
// (CPython hashlib).
TEST_CASE("sha3-256 reference vectors") {
    CHECK(hash_hex({}) ==
          "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
    CHECK(hash_hex(bytes_of("abc")) ==
          "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
    CHECK(hash_hex(bytes_of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "41c0dba2a9d6240849100376a8235e2c82e1b9998a999e21db32dd97496d3376");
}

TEST_CASE("sha3-256 rate boundary blocks") {
    std::vector<std::uint8_t> block136(136);
    std::iota(block136.begin(), block136.end(), 0);
    CHECK(hash_hex(block136) ==
          "cf3ccff92480a29160c2d38317c430e14749bfee1788106957dfe73f8c4930e5");

    std::vector<std::uint8_t> block137(137);
    for (std::size_t i = 0; i < block137.size(); ++i)
        block137[i] = static_cast<std::uint8_t>(i % 251);
    CHECK(hash_hex(block137) ==
          "ce9d7dc90913ee5d92745019479a5352c6d6279bef18ed07dc0a83ee8084daca");
}

TEST_CASE("sha3-256 long input") {
    const std::vector<std::uint8_t> data(1000000, static_cast<std::uint8_t>('a'));
    CHECK(hash_hex(data) ==
          "5c8875ae474a3634ba4fd55ec85bffd661f32aca75c6d699d0cdcb6c115891c1");
}

TEST_CASE("incremental update matches one-shot") {
    std::vector<std::uint8_t> data(5000);
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<std::uint8_t>(i * 31 + 7);

    const auto oneshot = Sha3_256::hash(data);
    for (const std::size_t chunk : {1, 7, 135, 136, 137, 1024}) {
        Sha3_256 h;
        for (std::size_t off = 0; off < data.size(); off += chunk) {
            const std::size_t len = std::min(chunk, data.size() - off);
            h.update({data.data() + off, len});
        }
        CHECK(h.finalize() == oneshot);
    }
}

TEST_CASE("hex round trip") {
    const std::vector<std::uint8_t> data = {0x00, 0x01, 0xAB, 0xFF, 0x7E};
    CHECK(ptsfd::crypto::from_hex(to_hex(data)) == data);
    CHECK_THROWS(ptsfd::crypto::from_hex("abc"));   // odd length
    CHECK_THROWS(ptsfd::crypto::from_hex("zz"));    // bad digit
}
