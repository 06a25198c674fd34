#include "mpemba/random.hpp"

namespace mpemba {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t seed)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
{
}

Philox4x32::Counter Philox4x32::bijection(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

Philox4x32::Counter Philox4x32::block(std::uint64_t cell, std::uint64_t draw) const
{
    const Counter ctr{static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32),
                      static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32)};
    return bijection(ctr, key_);
}

double CellStream::uniform()
{
    if (used_ >= 4) {
        buf_ = gen_.block(cell_, draw_++);
        used_ = 0;
    }
    const std::uint64_t hi = buf_[static_cast<std::size_t>(used_)] >> 5;
    const std::uint64_t lo = buf_[static_cast<std::size_t>(used_ + 1)] >> 6;
    used_ += 2;
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

} // namespace mpemba
