#pragma once

// Philox4x32-10 counter-based generator. A stream is addressed by (seed, cell,
// draw), so any cell can be regenerated without replaying earlier ones.

#include <array>
#include <cstdint>

namespace mpemba {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed);

    /// One block of four 32-bit words for counter (cell, draw).
    Counter block(std::uint64_t cell, std::uint64_t draw) const;

    static Counter bijection(Counter ctr, Key key);

private:
    Key key_;
};

/// Sequential view of one cell's stream: uniform doubles in [0, 1) with 53
/// random bits each.
class CellStream {
public:
    CellStream(const Philox4x32& gen, std::uint64_t cell) : gen_(gen), cell_(cell) {}

    double uniform();

private:
    const Philox4x32& gen_;
    std::uint64_t cell_;
    std::uint64_t draw_ = 0;
    Philox4x32::Counter buf_{};
    int used_ = 4;
};

} // namespace mpemba
