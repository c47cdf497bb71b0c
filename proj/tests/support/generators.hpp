#pragma once

// Deterministic random helpers for property tests. Raw mt19937_64 output is
// mapped to doubles directly so sequences are identical on every platform
// (std::uniform_real_distribution makes no such guarantee).

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace engram::test {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::vector<double> v(dim);
    while (true) {
        double norm_sq = 0.0;
        for (auto& x : v) {
            x = uniform(rng, -1.0, 1.0);
            norm_sq += x * x;
        }
        if (norm_sq > 1e-8) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& x : v) x *= inv;
            return v;
        }
    }
}

inline std::string random_words(std::mt19937_64& rng, int count) {
    static const char* kWords[] = {
        "pasta",  "lunch",  "office", "paper",   "deadline", "hawaii",  "coffee", "library",
        "train",  "garden", "movie",  "concert", "market",   "meeting", "sunset", "guitar",
        "recipe", "friend", "museum", "morning", "project",  "dinner",  "beach",  "winter"};
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (i > 0) out += ' ';
        out += kWords[rng() % (sizeof(kWords) / sizeof(kWords[0]))];
    }
    return out;
}

}  // namespace engram::test
