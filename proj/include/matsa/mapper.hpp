#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "matsa/fabric.hpp"
#include "matsa/layout.hpp"

namespace matsa {

/// Placement of one reference onto the compute columns.
///
/// With more columns than reference elements the reference is replicated
/// rho = floor(columns / M) times and queries are dealt round-robin across
/// replicas. With fewer columns the matrix is split into
/// ceil(M / columns) sequential batches on a single replica. Exactly one of
/// the two regimes is active (both degenerate to 1 when columns == M).
struct MappingPlan {
    std::size_t total_columns = 0;
    std::size_t ref_len = 0;
    std::size_t num_queries = 0;
    std::size_t rho = 0;      // replication factor; 0 in the batching regime
    std::size_t batches = 1;  // > 1 only in the batching regime

    std::size_t replicas() const { return rho == 0 ? 1 : rho; }

    /// Columns a replica spans within one batch.
    std::size_t replica_width() const { return rho == 0 ? total_columns : ref_len; }

    std::size_t replica_base(std::size_t r) const { return r * replica_width(); }

    /// Reference offset covered by batch b.
    std::size_t batch_base(std::size_t b) const { return b * replica_width(); }

    std::size_t batch_width(std::size_t b) const {
        const std::size_t base = batch_base(b);
        const std::size_t w = replica_width();
        return base + w <= ref_len ? w : ref_len - base;
    }

    std::size_t replica_of_query(std::size_t q) const { return q % replicas(); }

    std::vector<std::size_t> per_replica_query_counts() const {
        std::vector<std::size_t> c(replicas(), 0);
        for (std::size_t q = 0; q < num_queries; ++q) ++c[replica_of_query(q)];
        return c;
    }
};

inline MappingPlan plan(std::size_t total_columns, std::size_t ref_len, std::size_t num_queries) {
    if (total_columns == 0 || ref_len == 0)
        throw std::invalid_argument("plan: columns and reference length must be >= 1");
    MappingPlan p;
    p.total_columns = total_columns;
    p.ref_len = ref_len;
    p.num_queries = num_queries;
    p.rho = total_columns / ref_len;  // 0 when the reference does not fit
    p.batches = p.rho >= 1 ? 1 : (ref_len + total_columns - 1) / total_columns;
    return p;
}

/// Writes the reference chunk of batch b into the R slice of every replica
/// and clears the score, query and aux slices. Row-parallel stores: one
/// write phase per bit-row.
template <class F>
void load_reference(F& fabric, const MappingPlan& plan, const ColumnLayout& layout,
                    std::span<const std::int64_t> ref, std::size_t batch) {
    if (plan.ref_len != ref.size() && !ref.empty())
        throw std::invalid_argument("load_reference: plan/reference length mismatch");
    const std::size_t width = plan.batch_width(batch);
    const std::size_t base = plan.batch_base(batch);

    auto m = fabric.make_mask();
    m.clear();
    for (std::size_t r = 0; r < plan.replicas(); ++r)
        m.set_range(plan.replica_base(r), plan.replica_base(r) + width);

    std::vector<std::int64_t> per_col(fabric.columns(), 0);
    if (!ref.empty()) {
        for (std::size_t r = 0; r < plan.replicas(); ++r)
            for (std::size_t j = 0; j < width; ++j)
                per_col[plan.replica_base(r) + j] = ref[base + j];
    }
    fabric.load_words(layout.r, layout.width, per_col, m);

    fabric.zero_slice(layout.q, layout.width, m);
    fabric.zero_slice(layout.s_cur, layout.width, m);
    fabric.zero_slice(layout.s_diag, layout.width, m);
    fabric.zero_slice(layout.s_up, layout.width, m);
    fabric.zero_slice(layout.s_left, layout.width, m);
    fabric.zero_slice(layout.ovf, 1, m);
}

/// Host-side boundary state carried from one batch to the next: for every
/// query, the last column's score trajectory S[i][batch_end-1] for all rows
/// i. Batch b+1's left edge consumes row i as its left input and row i-1 as
/// its diagonal input.
struct BatchBoundary {
    std::vector<std::vector<std::int64_t>> per_query;  // [query][row]

    bool empty() const { return per_query.empty(); }
};

}  // namespace matsa
