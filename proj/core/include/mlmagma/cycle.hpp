#pragma once

#include <cstdint>
#include <optional>

namespace mlm {

struct CycleInfo {
    std::uint64_t tail = 0;    // index of the first state that lies on the cycle
    std::uint64_t period = 0;  // cycle length, >= 1
};

/// Brent's cycle detection on the sequence x0, step(x0), step(step(x0)), ...
/// using O(1) states. Gives up (nullopt) once more than `cap` calls to
/// `step` would be needed.
template <class State, class Step>
std::optional<CycleInfo> detect_cycle(const State& x0, Step&& step, std::uint64_t cap) {
    std::uint64_t calls = 0;
    std::uint64_t power = 1;
    std::uint64_t lambda = 1;
    State tortoise = x0;
    State hare = step(x0);
    ++calls;
    while (!(tortoise == hare)) {
        if (power == lambda) {
            tortoise = hare;
            power *= 2;
            lambda = 0;
        }
        if (++calls > cap) return std::nullopt;
        hare = step(hare);
        ++lambda;
    }

    tortoise = x0;
    hare = x0;
    for (std::uint64_t i = 0; i < lambda; ++i) {
        if (++calls > cap) return std::nullopt;
        hare = step(hare);
    }
    std::uint64_t mu = 0;
    while (!(tortoise == hare)) {
        calls += 2;
        if (calls > cap) return std::nullopt;
        tortoise = step(tortoise);
        hare = step(hare);
        ++mu;
    }
    return CycleInfo{mu, lambda};
}

}  // namespace mlm
