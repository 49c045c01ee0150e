#pragma once

#include <cstdint>

namespace cavitydrag {

// Counter-based generator: every (seed, stream, index, slot) maps to a fixed
// uniform in (0,1), so results do not depend on how samples are scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
        : key_(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index)) {}

    // open interval, never exactly 0 or 1
    double uniform() {
        const std::uint64_t r = splitmix64(key_ + counter_++);
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cavitydrag
