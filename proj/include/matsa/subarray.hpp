#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "matsa/bitops.hpp"
#include "matsa/ledger.hpp"

namespace matsa {

/// Sense-amplifier thresholds. READ senses one activated row, NOR2 two,
/// MAJ3 three. XOR_SEQ is the documented two-threshold sequence over two
/// activated rows that yields the exclusive-or in a single activation slot.
enum class SenseMode : std::uint8_t { READ, NOR2, MAJ3, XOR_SEQ };

/// One compute-enabled memory subarray: a 256x256 grid of single-bit cells,
/// one reconfigurable sense amplifier per column, and a per-cell write
/// counter for wear tracking.
///
/// Every charged operation reports phases and touched bits to the attached
/// CostLedger. The latch and predicate registers live in the sense amps;
/// manipulating them costs no memory access.
class Subarray {
public:
    static constexpr int kRows = 256;
    static constexpr int kCols = 256;

    explicit Subarray(CostLedger* ledger = nullptr)
        : ledger_(ledger), write_counts_(kRows * kCols, 0) {}

    void attach_ledger(CostLedger* ledger) { ledger_ = ledger; }

    // --- raw accessors: cell state and wear, no ledger traffic -------------

    const Row256& row_raw(int r) const { return cells_[static_cast<std::size_t>(r)]; }

    void write_row_raw(int r, const Row256& bits, const Row256& mask) {
        auto& row = cells_[static_cast<std::size_t>(r)];
        row = (row & ~mask) | (bits & mask);
        mask.for_each_set([&](std::size_t c) { ++write_counts_[static_cast<std::size_t>(r) * kCols + c]; });
    }

    std::uint32_t write_count(int r, int c) const {
        return write_counts_[static_cast<std::size_t>(r) * kCols + static_cast<std::size_t>(c)];
    }

    std::uint64_t total_write_count() const {
        std::uint64_t t = 0;
        for (auto v : write_counts_) t += v;
        return t;
    }

    std::uint64_t max_write_count() const {
        std::uint32_t m = 0;
        for (auto v : write_counts_) m = std::max(m, v);
        return m;
    }

    const Row256& latch() const { return latch_; }
    void set_latch(const Row256& v) { latch_ = v; }
    const Row256& predicate() const { return predicate_; }
    void set_predicate(const Row256& v) { predicate_ = v; }

    // --- charged operations ------------------------------------------------

    /// Stores `bits` into row `row` on the masked columns. One write phase;
    /// one write-bit per masked column.
    void write_row(int row, const Row256& bits, const Row256& mask) {
        check_row(row);
        write_row_raw(row, bits, mask);
        charge_write(1, mask.count());
    }

    /// Multi-row threshold sensing. Returns the per-column result; cells are
    /// untouched. One read phase; arity read-bits per masked column.
    Row256 sense(SenseMode mode, std::span<const int> rows, const Row256& mask) const {
        const std::size_t need = mode == SenseMode::READ ? 1 : mode == SenseMode::MAJ3 ? 3 : 2;
        if (rows.size() != need)
            throw std::invalid_argument("sense: row count does not match mode arity");
        for (int r : rows) check_row(r);
        Row256 out;
        switch (mode) {
            case SenseMode::READ:
                out = cells_[static_cast<std::size_t>(rows[0])];
                break;
            case SenseMode::NOR2:
                out = ~(cells_[static_cast<std::size_t>(rows[0])] |
                        cells_[static_cast<std::size_t>(rows[1])]);
                break;
            case SenseMode::MAJ3:
                out = Row256::majority(cells_[static_cast<std::size_t>(rows[0])],
                                       cells_[static_cast<std::size_t>(rows[1])],
                                       cells_[static_cast<std::size_t>(rows[2])]);
                break;
            case SenseMode::XOR_SEQ:
                out = cells_[static_cast<std::size_t>(rows[0])] ^
                      cells_[static_cast<std::size_t>(rows[1])];
                break;
        }
        charge_read(1, static_cast<std::uint64_t>(need) * static_cast<std::uint64_t>(mask.count()));
        return out & mask;
    }

    /// dst row := src row on masked columns. Read and write halves of the
    /// same cycle: one read phase plus one write phase, one bit each per
    /// masked column.
    void row_copy(int src, int dst, const Row256& mask) {
        check_row(src);
        check_row(dst);
        if (src == dst) throw std::invalid_argument("row_copy: src == dst");
        charge_read(1, mask.count());
        write_row_raw(dst, cells_[static_cast<std::size_t>(src)], mask);
        charge_write(1, mask.count());
    }

    /// dst[c] := src[c-1] on masked columns; column 0 takes `boundary`,
    /// supplied by the controller. The sense amps first read their own
    /// column, then each takes its left neighbour's value, so src == dst is
    /// well defined. Cost matches row_copy.
    void diagonal_row_copy(int src, int dst, const Row256& mask, bool boundary) {
        check_row(src);
        check_row(dst);
        charge_read(1, mask.count());
        const Row256 shifted = cells_[static_cast<std::size_t>(src)].shifted_up(boundary);
        write_row_raw(dst, shifted, mask);
        charge_write(1, mask.count());
    }

    /// Text grid of all cells, one row per line, '0'/'1' per column.
    void dump(std::ostream& os) const {
        for (int r = 0; r < kRows; ++r) {
            for (int c = 0; c < kCols; ++c) os.put(cells_[static_cast<std::size_t>(r)].test(static_cast<std::size_t>(c)) ? '1' : '0');
            os.put('\n');
        }
    }

private:
    static void check_row(int r) {
        if (r < 0 || r >= kRows) throw std::out_of_range("subarray row out of range");
    }

    void charge_read(std::uint64_t phases, std::uint64_t bits) const {
        if (ledger_) ledger_->charge_read(phases, bits);
    }
    void charge_write(std::uint64_t phases, std::uint64_t bits) const {
        if (ledger_) ledger_->charge_write(phases, bits);
    }

    CostLedger* ledger_;
    std::array<Row256, kRows> cells_{};
    Row256 latch_{};
    Row256 predicate_{};
    std::vector<std::uint32_t> write_counts_;
};

}  // namespace matsa
