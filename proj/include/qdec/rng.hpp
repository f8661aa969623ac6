#pragma once

// Deterministic random streams. All randomness in the toolkit flows from
// explicit 64-bit seeds through these helpers; bounded draws avoid
// std::uniform_* so sequences are identical across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

namespace qdec {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// domain-separated substream seed: hash of (seed, domain, index)
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t domain,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ index);
}

// seed domains
inline constexpr std::uint64_t kDomainWeights = 0x5745494748545331ULL;
inline constexpr std::uint64_t kDomainShuffle = 0x534855464c453031ULL;
inline constexpr std::uint64_t kDomainTrain = 0x545241494e534554ULL;
inline constexpr std::uint64_t kDomainEval = 0x4556414c53545231ULL;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53 bits of randomness
    double next_real() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n), rejection-free multiply-shift with
    // rejection only in the biased band
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        while (true) {
            std::uint64_t x = eng_();
            unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo < n) {
                std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
                if (lo < threshold) continue;
            }
            return static_cast<std::uint64_t>(m >> 64);
        }
    }

    bool bernoulli(double p) { return next_real() < p; }

    // first k entries of a seeded Fisher-Yates over [0, n)
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

    void shuffle(std::vector<std::uint32_t>& v);

private:
    std::mt19937_64 eng_;
};

inline std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n,
                                                                  std::uint32_t k) {
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    for (std::uint32_t i = 0; i < k && i + 1 < n; ++i) {
        std::uint32_t j = i + static_cast<std::uint32_t>(next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

inline void Rng::shuffle(std::vector<std::uint32_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace qdec
