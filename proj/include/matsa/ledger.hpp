#pragma once

#include <algorithm>
#include <cstdint>

namespace matsa {

/// Accumulated event counts for a simulated execution.
///
/// Phases count row activations on the critical path: a column-parallel
/// operation is one activation regardless of how many columns participate.
/// Bits count every cell touched in every column, which is what energy
/// scales with. The two views deliberately diverge: time is phase-linear,
/// energy is bit-linear.
struct CostLedger {
    std::uint64_t read_phases = 0;
    std::uint64_t write_phases = 0;
    std::uint64_t read_bits = 0;
    std::uint64_t write_bits = 0;

    /// Subset of write_bits issued under a sense-amp predicate. Predicated
    /// writes are the only data-dependent component of the ledger.
    std::uint64_t predicated_write_bits = 0;

    /// Per-cell write histogram summary, filled in by the backend when a run
    /// finishes. `tracked_cells` is the cell population the mean refers to.
    std::uint64_t max_writes_per_cell = 0;
    std::uint64_t tracked_cells = 0;

    double mean_writes_per_cell() const {
        return tracked_cells == 0 ? 0.0
                                  : static_cast<double>(write_bits) /
                                        static_cast<double>(tracked_cells);
    }

    /// Component-wise sum; per-cell max merges as max. Associative and
    /// commutative.
    void merge(const CostLedger& o) {
        read_phases += o.read_phases;
        write_phases += o.write_phases;
        read_bits += o.read_bits;
        write_bits += o.write_bits;
        predicated_write_bits += o.predicated_write_bits;
        max_writes_per_cell = std::max(max_writes_per_cell, o.max_writes_per_cell);
        tracked_cells += o.tracked_cells;
    }

    void charge_read(std::uint64_t phases, std::uint64_t bits) {
        read_phases += phases;
        read_bits += bits;
    }
    void charge_write(std::uint64_t phases, std::uint64_t bits) {
        write_phases += phases;
        write_bits += bits;
    }
};

}  // namespace matsa
