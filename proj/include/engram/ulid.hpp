#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace engram {

// Time-ordered random 128-bit id: 48-bit millisecond timestamp plus 80 random
// bits, rendered as 26 chars of Crockford base32. Lexicographic order follows
// creation time.
std::string make_ulid(std::int64_t unix_millis, std::mt19937_64& rng);

}  // namespace engram
