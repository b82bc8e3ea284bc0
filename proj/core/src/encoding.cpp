#include "ptsfd/encoding.hpp"

#include <limits>

namespace ptsfd::ledger {

namespace {

constexpr std::uint8_t kVersion = 0x01;

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

std::vector<std::uint8_t> canonical_encode(std::span<const Vote> votes,
                                           const LabelCount& label_count, const Salt& salt) {
    if (votes.size() > std::numeric_limits<std::uint32_t>::max())
        throw EncodingRangeError("m exceeds 2^32-1");
    if (label_count.size() > kMaxClasses)
        throw EncodingRangeError("|C| exceeds 65534");
    if (label_count.empty())
        throw EncodingRangeError("label count must cover at least one class");
    for (const Vote v : votes)
        if (!v.is_abstain() && v.value() >= label_count.size())
            throw ValidationError("vote class outside |C| in canonical encoding");

    std::vector<std::uint8_t> out;
    out.reserve(1 + 4 + 2 * votes.size() + 4 + 4 * label_count.size() + salt.size());
    out.push_back(kVersion);
    put_u32le(out, static_cast<std::uint32_t>(votes.size()));
    for (const Vote v : votes) put_u16le(out, v.raw());
    put_u32le(out, static_cast<std::uint32_t>(label_count.size()));
    for (const std::uint32_t c : label_count) put_u32le(out, c);
    out.insert(out.end(), salt.begin(), salt.end());
    return out;
}

crypto::Digest256 commitment_hash(std::span<const Vote> votes, const LabelCount& label_count,
                                  const Salt& salt) {
    const auto bytes = canonical_encode(votes, label_count, salt);
    return crypto::Sha3_256::hash(bytes);
}

}  // namespace ptsfd::ledger
