#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "matsa/bitops.hpp"
#include "matsa/ledger.hpp"
#include "matsa/subarray.hpp"

namespace matsa {

/// Boundary injection point for a diagonal copy: masked destination column
/// `col` takes bit k of `word` (for bit-row k of the slice) instead of its
/// left neighbour's value. Used at the left edge of every replica and batch.
struct DiagCut {
    std::size_t col = 0;
    std::uint64_t word = 0;
};

struct AddOptions {
    bool carry_init = false;  // initial carry (1 realises subtraction together with invert_b)
    bool invert_b = false;    // sense-amp inverts the second operand
    int ovf_row = -1;         // sticky overflow row; <0 for compare-style discard
};

/// Activation-phase and read-bit formulas shared verbatim by both backends.
/// Keeping them in one place is what makes the counting backend's time model
/// exactly the cell-level one. Write bits of predicated phases are charged
/// by each backend (actual cells for the cell fabric, full mask for the
/// counting fabric).
namespace opcost {

inline void copy(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_read(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(w) * cols);
    L.charge_write(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(w) * cols);
}

inline void zero(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_write(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(w) * cols);
}

/// Per bit position: one two-row sum sense, one two-row carry sense, one sum
/// write. "Two memory cycles per bit".
inline void add_reads(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_read(2ull * static_cast<std::uint64_t>(w), 4ull * static_cast<std::uint64_t>(w) * cols);
}
inline void add_sum_writes(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_write(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(w) * cols);
}
inline void sticky_ovf(CostLedger& L, std::uint64_t cols) { L.charge_write(1, cols); }

/// Sign-only subtraction: carry senses across the word, no difference stored.
inline void compare(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_read(static_cast<std::uint64_t>(w), 2ull * static_cast<std::uint64_t>(w) * cols);
}

inline void pred_copy_reads(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_read(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(w) * cols);
}
inline void pred_writes(CostLedger& L, int phases, std::uint64_t bits) {
    L.charge_write(static_cast<std::uint64_t>(phases), bits);
    L.predicated_write_bits += bits;
}
inline void sense_pred(CostLedger& L, std::uint64_t cols) { L.charge_read(1, cols); }
inline void abs_reads(CostLedger& L, int w, std::uint64_t cols) {
    L.charge_read(1ull + static_cast<std::uint64_t>(w),
                  (1ull + static_cast<std::uint64_t>(w)) * cols);
}
inline void extract(CostLedger& L, int w, std::uint64_t ncols) {
    L.charge_read(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(w) * ncols);
}

}  // namespace opcost

namespace detail {
inline std::int64_t sign_extend(std::uint64_t v, int w) {
    if (w >= 64) return static_cast<std::int64_t>(v);
    const std::uint64_t sign = 1ull << (w - 1);
    return static_cast<std::int64_t>((v ^ sign) - sign);
}
}  // namespace detail

/// Bit-exact backend: a chain of 256x256 subarrays addressed as one flat
/// column space. Adjacent subarrays are linked for the diagonal copy (the
/// first column of subarray s takes the last column of subarray s-1).
class CellFabric {
public:
    struct Mask {
        std::vector<Row256> sub;
        std::uint64_t cnt = 0;

        void clear() {
            for (auto& r : sub) r = Row256{};
            cnt = 0;
        }
        /// Marks fabric columns [lo, hi).
        void set_range(std::size_t lo, std::size_t hi) {
            if (hi <= lo) return;
            cnt += hi - lo;
            std::size_t s = lo / Subarray::kCols;
            for (; s < sub.size() && s * Subarray::kCols < hi; ++s) {
                const std::size_t base = s * Subarray::kCols;
                const std::size_t a = lo > base ? lo - base : 0;
                const std::size_t b = std::min<std::size_t>(hi - base, Subarray::kCols);
                if (a == 0 && b == Subarray::kCols)
                    sub[s] = Row256::ones();
                else
                    sub[s].set_range(a, b);
            }
        }
        std::uint64_t count() const { return cnt; }
        bool any() const { return cnt != 0; }
    };

    explicit CellFabric(std::size_t columns)
        : cols_(columns), subs_((columns + Subarray::kCols - 1) / Subarray::kCols) {
        if (columns == 0) throw std::invalid_argument("fabric: zero columns");
    }

    std::size_t columns() const { return cols_; }
    std::size_t subarray_count() const { return subs_.size(); }
    Subarray& subarray(std::size_t i) { return subs_[i]; }
    static constexpr bool has_values() { return true; }

    CostLedger& ledger() { return led_; }
    const CostLedger& ledger() const { return led_; }

    Mask make_mask() const {
        Mask m;
        m.sub.resize(subs_.size());
        return m;
    }

    // --- host data movement -------------------------------------------------

    /// Row-parallel store of one word per column: bit-row k of the slice is
    /// written across all masked columns in a single phase.
    void load_words(int base, int w, std::span<const std::int64_t> values, const Mask& m) {
        opcost::zero(led_, w, m.cnt);
        for (int k = 0; k < w; ++k) {
            for (std::size_t s = 0; s < subs_.size(); ++s) {
                if (!m.sub[s].any()) continue;
                Row256 bits;
                const std::size_t base_col = s * Subarray::kCols;
                m.sub[s].for_each_set([&](std::size_t c) {
                    const std::size_t col = base_col + c;
                    if (col < values.size() && ((static_cast<std::uint64_t>(values[col]) >> k) & 1u))
                        bits.set(c, true);
                });
                subs_[s].write_row_raw(base + k, bits, m.sub[s]);
            }
        }
    }

    /// Charged column reads used for score extraction and batch-boundary
    /// saves: one w-row read sequence, w read-bits per extracted column.
    std::vector<std::int64_t> extract_words(int base, int w, std::span<const std::size_t> cols) {
        opcost::extract(led_, w, cols.size());
        std::vector<std::int64_t> out(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) out[i] = peek_word(cols[i], base, w);
        return out;
    }

    // --- compute operations --------------------------------------------------

    void zero_slice(int base, int w, const Mask& m) {
        opcost::zero(led_, w, m.cnt);
        for (int k = 0; k < w; ++k)
            for (std::size_t s = 0; s < subs_.size(); ++s)
                if (m.sub[s].any()) subs_[s].write_row_raw(base + k, Row256{}, m.sub[s]);
    }

    void copy_slice(int src, int dst, int w, const Mask& m) {
        opcost::copy(led_, w, m.cnt);
        for (int k = 0; k < w; ++k)
            for (std::size_t s = 0; s < subs_.size(); ++s)
                if (m.sub[s].any())
                    subs_[s].write_row_raw(dst + k, subs_[s].row_raw(src + k), m.sub[s]);
    }

    /// Copy gated by the per-column predicate register.
    void pred_copy_slice(int src, int dst, int w, const Mask& m) {
        opcost::pred_copy_reads(led_, w, m.cnt);
        std::uint64_t bits = 0;
        for (int k = 0; k < w; ++k)
            for (std::size_t s = 0; s < subs_.size(); ++s) {
                const Row256 eff = m.sub[s] & subs_[s].predicate();
                if (!eff.any()) continue;
                subs_[s].write_row_raw(dst + k, subs_[s].row_raw(src + k), eff);
                bits += static_cast<std::uint64_t>(eff.count());
            }
        opcost::pred_writes(led_, w, bits);
    }

    /// dst[c] := src[c-1] for masked columns; cut columns take controller
    /// bits instead. The relay reads all source values before writing, so
    /// src == dst is fine.
    void diag_copy_slice(int src, int dst, int w, const Mask& m, std::span<const DiagCut> cuts) {
        opcost::copy(led_, w, m.cnt);
        for (int k = 0; k < w; ++k) {
            bool carry = false;
            for (std::size_t s = 0; s < subs_.size(); ++s) {
                const Row256 srcrow = subs_[s].row_raw(src + k);
                const bool next_carry = srcrow.top_bit();
                Row256 shifted = srcrow.shifted_up(carry);
                const std::size_t base_col = s * Subarray::kCols;
                for (const auto& cut : cuts) {
                    if (cut.col >= base_col && cut.col < base_col + Subarray::kCols)
                        shifted.set(cut.col - base_col, (cut.word >> k) & 1u);
                }
                if (m.sub[s].any()) subs_[s].write_row_raw(dst + k, shifted, m.sub[s]);
                carry = next_carry;
            }
        }
    }

    /// out := a + b' (b' optionally inverted, optional initial carry), mod
    /// 2^w, two's complement. Signed overflow is ORed into the sticky flag
    /// row when one is given. `out` may alias `a` or `b`.
    void add_slices(int a, int b, int out, int w, const Mask& m, const AddOptions& o) {
        opcost::add_reads(led_, w, m.cnt);
        for (std::size_t s = 0; s < subs_.size(); ++s) {
            if (!m.sub[s].any()) continue;
            Row256 carry = o.carry_init ? Row256::ones() : Row256{};
            Row256 ovf;
            for (int k = 0; k < w; ++k) {
                const Row256 xa = subs_[s].row_raw(a + k);
                Row256 xb = subs_[s].row_raw(b + k);
                if (o.invert_b) xb = ~xb;
                const Row256 sum = xa ^ xb ^ carry;
                const Row256 carry_next = Row256::majority(xa, xb, carry);
                if (k == w - 1) ovf = carry ^ carry_next;
                subs_[s].write_row_raw(out + k, sum, m.sub[s]);
                carry = carry_next;
            }
            if (o.ovf_row >= 0) {
                const Row256 sticky = subs_[s].row_raw(o.ovf_row) | (ovf & m.sub[s]);
                subs_[s].write_row_raw(o.ovf_row, sticky, m.sub[s]);
            }
        }
        opcost::add_sum_writes(led_, w, m.cnt);
        if (o.ovf_row >= 0) opcost::sticky_ovf(led_, m.cnt);
    }

    /// predicate := (a < b), signed, via the sign of a - b. Sign senses
    /// only; the difference is never written.
    void compare_lt(int a, int b, int w, const Mask& m) {
        opcost::compare(led_, w, m.cnt);
        for (std::size_t s = 0; s < subs_.size(); ++s) {
            if (!m.sub[s].any()) continue;
            Row256 carry = Row256::ones();
            for (int k = 0; k < w - 1; ++k) {
                const Row256 xa = subs_[s].row_raw(a + k);
                const Row256 xb = ~subs_[s].row_raw(b + k);
                carry = Row256::majority(xa, xb, carry);
            }
            const Row256 xa = subs_[s].row_raw(a + w - 1);
            const Row256 xb = ~subs_[s].row_raw(b + w - 1);
            const Row256 sign = xa ^ xb ^ carry;
            subs_[s].set_predicate((subs_[s].predicate() & ~m.sub[s]) | (sign & m.sub[s]));
        }
    }

    /// predicate := cell (or its complement) of one row.
    void sense_predicate(int row, const Mask& m, bool invert) {
        opcost::sense_pred(led_, m.cnt);
        for (std::size_t s = 0; s < subs_.size(); ++s) {
            if (!m.sub[s].any()) continue;
            Row256 v = subs_[s].row_raw(row);
            if (invert) v = ~v;
            subs_[s].set_predicate((subs_[s].predicate() & ~m.sub[s]) | (v & m.sub[s]));
        }
    }

    /// a := |a| in place: sign sense sets the predicate, then a predicated
    /// invert-and-increment pass. Nonnegative columns take the no-write fast
    /// path. abs of the most negative value wraps and sets the sticky flag.
    void abs_slice(int a, int w, const Mask& m, int ovf_row) {
        opcost::abs_reads(led_, w, m.cnt);
        std::uint64_t bits = 0;
        for (std::size_t s = 0; s < subs_.size(); ++s) {
            if (!m.sub[s].any()) continue;
            const Row256 sign = subs_[s].row_raw(a + w - 1);
            subs_[s].set_predicate((subs_[s].predicate() & ~m.sub[s]) | (sign & m.sub[s]));
            const Row256 eff = m.sub[s] & sign;
            Row256 carry = Row256::ones();
            Row256 msb_out;
            for (int k = 0; k < w; ++k) {
                const Row256 nb = ~subs_[s].row_raw(a + k);
                const Row256 sum = nb ^ carry;
                carry = nb & carry;
                if (k == w - 1) msb_out = sum;
                if (eff.any()) {
                    subs_[s].write_row_raw(a + k, sum, eff);
                    bits += static_cast<std::uint64_t>(eff.count());
                }
            }
            if (ovf_row >= 0) {
                const Row256 sticky = subs_[s].row_raw(ovf_row) | (msb_out & eff);
                subs_[s].write_row_raw(ovf_row, sticky, m.sub[s]);
            }
        }
        opcost::pred_writes(led_, w, bits);
        if (ovf_row >= 0) opcost::sticky_ovf(led_, m.cnt);
    }

    /// acc := acc + a*a for nonnegative a, as w predicated shift-adds (the
    /// shift is pure row addressing). Precondition: a fits w/2 bits, or the
    /// sticky flag records the wrap.
    void square_acc_slice(int a, int acc, int w, const Mask& m, int ovf_row) {
        std::vector<Row256> ovf_acc(ovf_row >= 0 ? subs_.size() : 0);
        for (int k = 0; k < w; ++k) {
            opcost::sense_pred(led_, m.cnt);
            opcost::add_reads(led_, w - k, m.cnt);
            std::uint64_t bits = 0;
            for (std::size_t s = 0; s < subs_.size(); ++s) {
                if (!m.sub[s].any()) continue;
                const Row256 pred = subs_[s].row_raw(a + k);
                subs_[s].set_predicate((subs_[s].predicate() & ~m.sub[s]) | (pred & m.sub[s]));
                const Row256 eff = m.sub[s] & pred;
                if (!eff.any()) continue;
                Row256 carry;
                for (int p = k; p < w; ++p) {
                    const Row256 xa = subs_[s].row_raw(a + (p - k));
                    const Row256 xb = subs_[s].row_raw(acc + p);
                    const Row256 sum = xa ^ xb ^ carry;
                    carry = Row256::majority(xa, xb, carry);
                    subs_[s].write_row_raw(acc + p, sum, eff);
                    bits += static_cast<std::uint64_t>(eff.count());
                }
                if (ovf_row >= 0) ovf_acc[s] |= carry & eff;
            }
            opcost::pred_writes(led_, w - k, bits);
        }
        if (ovf_row >= 0) {
            for (std::size_t s = 0; s < subs_.size(); ++s) {
                if (!m.sub[s].any()) continue;
                const Row256 sticky = subs_[s].row_raw(ovf_row) | (ovf_acc[s] & m.sub[s]);
                subs_[s].write_row_raw(ovf_row, sticky, m.sub[s]);
            }
            opcost::sticky_ovf(led_, m.cnt);
        }
    }

    // --- uncharged simulator introspection ----------------------------------

    std::int64_t peek_word(std::size_t col, int base, int w) const {
        const std::size_t s = col / Subarray::kCols, c = col % Subarray::kCols;
        std::uint64_t v = 0;
        for (int k = 0; k < w; ++k)
            if (subs_[s].row_raw(base + k).test(c)) v |= 1ull << k;
        return detail::sign_extend(v, w);
    }

    bool peek_bit(std::size_t col, int row) const {
        return subs_[col / Subarray::kCols].row_raw(row).test(col % Subarray::kCols);
    }

    void poke_word(std::size_t col, int base, int w, std::int64_t value) {
        const std::size_t s = col / Subarray::kCols, c = col % Subarray::kCols;
        Row256 one;
        one.set(c, true);
        for (int k = 0; k < w; ++k) {
            Row256 bits;
            bits.set(c, (static_cast<std::uint64_t>(value) >> k) & 1u);
            subs_[s].write_row_raw(base + k, bits, one);
        }
    }

    std::uint64_t total_cell_writes() const {
        std::uint64_t t = 0;
        for (const auto& s : subs_) t += s.total_write_count();
        return t;
    }

    /// Fills the ledger's wear summary from the exact per-cell counters.
    void finalize_wear(CostLedger& L) const {
        std::uint64_t mx = 0;
        for (const auto& s : subs_) mx = std::max(mx, s.max_write_count());
        L.max_writes_per_cell = std::max(L.max_writes_per_cell, mx);
        L.tracked_cells = subs_.size() * static_cast<std::uint64_t>(Subarray::kRows) *
                          static_cast<std::uint64_t>(Subarray::kCols);
    }

private:
    std::size_t cols_;
    std::vector<Subarray> subs_;
    CostLedger led_;
};

/// Cost-only backend: no cells, identical operation surface and identical
/// phase/read accounting (both go through opcost). Write bits of predicated
/// phases are charged at full mask width, an upper bound on what the cell
/// backend records. Used for design-space sweeps where only the ledger
/// matters.
class CountingFabric {
public:
    struct Mask {
        std::uint64_t cnt = 0;
        void clear() { cnt = 0; }
        void set_range(std::size_t lo, std::size_t hi) {
            if (hi > lo) cnt += hi - lo;
        }
        std::uint64_t count() const { return cnt; }
        bool any() const { return cnt != 0; }
    };

    explicit CountingFabric(std::size_t columns) : cols_(columns) { row_wr_.fill(0); }

    std::size_t columns() const { return cols_; }
    static constexpr bool has_values() { return false; }

    CostLedger& ledger() { return led_; }
    const CostLedger& ledger() const { return led_; }

    Mask make_mask() const { return {}; }

    void load_words(int base, int w, std::span<const std::int64_t>, const Mask& m) {
        opcost::zero(led_, w, m.cnt);
        mark_rows(base, w);
    }

    std::vector<std::int64_t> extract_words(int base, int w, std::span<const std::size_t> cols) {
        (void)base;
        opcost::extract(led_, w, cols.size());
        return std::vector<std::int64_t>(cols.size(), 0);
    }

    void zero_slice(int base, int w, const Mask& m) {
        opcost::zero(led_, w, m.cnt);
        mark_rows(base, w);
    }

    void copy_slice(int, int dst, int w, const Mask& m) {
        opcost::copy(led_, w, m.cnt);
        mark_rows(dst, w);
    }

    void pred_copy_slice(int, int dst, int w, const Mask& m) {
        opcost::pred_copy_reads(led_, w, m.cnt);
        opcost::pred_writes(led_, w, static_cast<std::uint64_t>(w) * m.cnt);
        mark_rows(dst, w);
    }

    void diag_copy_slice(int, int dst, int w, const Mask& m, std::span<const DiagCut>) {
        opcost::copy(led_, w, m.cnt);
        mark_rows(dst, w);
    }

    void add_slices(int, int, int out, int w, const Mask& m, const AddOptions& o) {
        opcost::add_reads(led_, w, m.cnt);
        opcost::add_sum_writes(led_, w, m.cnt);
        mark_rows(out, w);
        if (o.ovf_row >= 0) {
            opcost::sticky_ovf(led_, m.cnt);
            mark_rows(o.ovf_row, 1);
        }
    }

    void compare_lt(int, int, int w, const Mask& m) { opcost::compare(led_, w, m.cnt); }

    void sense_predicate(int, const Mask& m, bool) { opcost::sense_pred(led_, m.cnt); }

    void abs_slice(int a, int w, const Mask& m, int ovf_row) {
        opcost::abs_reads(led_, w, m.cnt);
        opcost::pred_writes(led_, w, static_cast<std::uint64_t>(w) * m.cnt);
        mark_rows(a, w);
        if (ovf_row >= 0) {
            opcost::sticky_ovf(led_, m.cnt);
            mark_rows(ovf_row, 1);
        }
    }

    void square_acc_slice(int, int acc, int w, const Mask& m, int ovf_row) {
        for (int k = 0; k < w; ++k) {
            opcost::sense_pred(led_, m.cnt);
            opcost::add_reads(led_, w - k, m.cnt);
            opcost::pred_writes(led_, w - k, static_cast<std::uint64_t>(w - k) * m.cnt);
            mark_rows(acc + k, w - k);
        }
        if (ovf_row >= 0) {
            opcost::sticky_ovf(led_, m.cnt);
            mark_rows(ovf_row, 1);
        }
    }

    std::int64_t peek_word(std::size_t, int, int) const { return 0; }
    bool peek_bit(std::size_t, int) const { return false; }

    /// Wear summary: the mean follows from total write bits over the device
    /// cells; the max is bounded by the most-written row's phase count (a
    /// cell cannot be written more often than its wordline fires).
    void finalize_wear(CostLedger& L) const {
        std::uint64_t mx = 0;
        for (auto v : row_wr_) mx = std::max(mx, v);
        L.max_writes_per_cell = std::max(L.max_writes_per_cell, mx);
        L.tracked_cells = cols_ * 256ull;
    }

private:
    void mark_rows(int base, int count) {
        for (int k = 0; k < count; ++k) ++row_wr_[static_cast<std::size_t>(base + k) & 255u];
    }

    std::size_t cols_;
    std::array<std::uint64_t, 256> row_wr_{};
    CostLedger led_;
};

/// min(a, b, c) per column, composed from two sign comparisons and
/// predicated copies. `out` must be a dead slice (the engine stages it in
/// the current-score slice, which holds no live value at that point).
template <class F>
void min3_slices(F& f, int a, int b, int c, int out, int w, const typename F::Mask& m) {
    f.copy_slice(a, out, w, m);
    f.compare_lt(b, out, w, m);
    f.pred_copy_slice(b, out, w, m);
    f.compare_lt(c, out, w, m);
    f.pred_copy_slice(c, out, w, m);
}

/// out := a - b (complement of b with initial carry 1).
template <class F>
void sub_slices(F& f, int a, int b, int out, int w, const typename F::Mask& m, int ovf_row = -1) {
    f.add_slices(a, b, out, w, m, AddOptions{true, true, ovf_row});
}

/// out := a * a for nonnegative a.
template <class F>
void square_slices(F& f, int a, int out, int w, const typename F::Mask& m, int ovf_row = -1) {
    f.zero_slice(out, w, m);
    f.square_acc_slice(a, out, w, m, ovf_row);
}

}  // namespace matsa
