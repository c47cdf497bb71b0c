#include "engram/ulid.hpp"

#include <array>

namespace engram {

namespace {
constexpr char kAlphabet[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
}

std::string make_ulid(std::int64_t unix_millis, std::mt19937_64& rng) {
    std::array<std::uint8_t, 16> bytes{};
    const auto ms = static_cast<std::uint64_t>(unix_millis) & 0xFFFFFFFFFFFFull;
    for (int i = 0; i < 6; ++i) {
        bytes[i] = static_cast<std::uint8_t>(ms >> (8 * (5 - i)));
    }
    std::uint64_t r0 = rng();
    std::uint64_t r1 = rng();
    for (int i = 0; i < 8; ++i) bytes[6 + i] = static_cast<std::uint8_t>(r0 >> (8 * (7 - i)));
    for (int i = 0; i < 2; ++i) bytes[14 + i] = static_cast<std::uint8_t>(r1 >> (8 * (1 - i)));

    // 128 bits -> 26 base32 chars (emitted as 130 bits, top two bits zero).
    std::string out(26, '0');
    int bit = -2;  // start offset so 26*5 == 130 bits covers the 128-bit value
    for (int i = 0; i < 26; ++i) {
        unsigned value = 0;
        for (int b = 0; b < 5; ++b) {
            const int idx = bit + b;
            unsigned v = 0;
            if (idx >= 0 && idx < 128) {
                v = (bytes[static_cast<std::size_t>(idx / 8)] >> (7 - idx % 8)) & 1u;
            }
            value = (value << 1) | v;
        }
        out[static_cast<std::size_t>(i)] = kAlphabet[value];
        bit += 5;
    }
    return out;
}

}  // namespace engram
