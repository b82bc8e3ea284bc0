#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ptsfd/sha3.hpp"
#include "ptsfd/types.hpp"

namespace ptsfd::ledger {

using Salt = std::array<std::uint8_t, 32>;

// Canonical byte layout hashed into a commitment:
//   0x01 | m:u32le | m votes:u16le (0xFFFF = abstain) | |C|:u32le
//        | |C| counts:u32le | 32-byte salt
// Injective over well-formed inputs, so equal hashes imply equal payloads
// up to hash collisions.
std::vector<std::uint8_t> canonical_encode(std::span<const Vote> votes,
                                           const LabelCount& label_count, const Salt& salt);

crypto::Digest256 commitment_hash(std::span<const Vote> votes, const LabelCount& label_count,
                                  const Salt& salt);

}  // namespace ptsfd::ledger
