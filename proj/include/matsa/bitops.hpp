#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstddef>

namespace matsa {

/// One wordline's worth of bits: 256 columns packed into four 64-bit words.
/// Bit index == column index within the subarray.
struct Row256 {
    std::array<std::uint64_t, 4> w{0, 0, 0, 0};

    static Row256 zeros() { return {}; }
    static Row256 ones() { return {{~0ull, ~0ull, ~0ull, ~0ull}}; }

    bool test(std::size_t c) const { return (w[c >> 6] >> (c & 63)) & 1u; }
    void set(std::size_t c, bool v) {
        const std::uint64_t bit = 1ull << (c & 63);
        if (v)
            w[c >> 6] |= bit;
        else
            w[c >> 6] &= ~bit;
    }

    int count() const {
        return std::popcount(w[0]) + std::popcount(w[1]) + std::popcount(w[2]) +
               std::popcount(w[3]);
    }
    bool any() const { return (w[0] | w[1] | w[2] | w[3]) != 0; }

    /// Marks columns [lo, hi).
    void set_range(std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) set(i, true);
    }

    /// result[c] = this[c-1]; column 0 receives carry_in. The cross-column
    /// relay of the diagonal copy.
    Row256 shifted_up(bool carry_in) const {
        Row256 r;
        std::uint64_t carry = carry_in ? 1u : 0u;
        for (int i = 0; i < 4; ++i) {
            r.w[i] = (w[i] << 1) | carry;
            carry = w[i] >> 63;
        }
        return r;
    }

    bool top_bit() const { return (w[3] >> 63) & 1u; }

    friend Row256 operator&(Row256 a, const Row256& b) {
        for (int i = 0; i < 4; ++i) a.w[i] &= b.w[i];
        return a;
    }
    friend Row256 operator|(Row256 a, const Row256& b) {
        for (int i = 0; i < 4; ++i) a.w[i] |= b.w[i];
        return a;
    }
    friend Row256 operator^(Row256 a, const Row256& b) {
        for (int i = 0; i < 4; ++i) a.w[i] ^= b.w[i];
        return a;
    }
    friend Row256 operator~(Row256 a) {
        for (int i = 0; i < 4; ++i) a.w[i] = ~a.w[i];
        return a;
    }
    Row256& operator&=(const Row256& b) {
        for (int i = 0; i < 4; ++i) w[i] &= b.w[i];
        return *this;
    }
    Row256& operator|=(const Row256& b) {
        for (int i = 0; i < 4; ++i) w[i] |= b.w[i];
        return *this;
    }
    Row256& operator^=(const Row256& b) {
        for (int i = 0; i < 4; ++i) w[i] ^= b.w[i];
        return *this;
    }
    friend bool operator==(const Row256& a, const Row256& b) { return a.w == b.w; }

    /// maj(a, b, c) per column.
    static Row256 majority(const Row256& a, const Row256& b, const Row256& c) {
        Row256 r;
        for (int i = 0; i < 4; ++i)
            r.w[i] = (a.w[i] & b.w[i]) | (c.w[i] & (a.w[i] ^ b.w[i]));
        return r;
    }

    template <class Fn>
    void for_each_set(Fn&& fn) const {
        for (int i = 0; i < 4; ++i) {
            std::uint64_t m = w[i];
            while (m) {
                const int b = std::countr_zero(m);
                fn(static_cast<std::size_t>(i * 64 + b));
                m &= m - 1;
            }
        }
    }
};

}  // namespace matsa
