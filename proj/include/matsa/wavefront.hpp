#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "matsa/fabric.hpp"
#include "matsa/layout.hpp"
#include "matsa/mapper.hpp"
#include "matsa/sdtw.hpp"

namespace matsa {

/// One query as the engine sees it: a word per element (values unused by the
/// counting backend), plus the window index when the run is a self-join and
/// trivial self-matches must be excluded at extraction.
struct EngineQuery {
    std::vector<std::int64_t> values;
    std::size_t len = 0;
    long long window_index = -1;

    std::size_t length() const { return values.empty() ? len : values.size(); }
};

struct EngineOptions {
    Metric metric = Metric::abs_diff;
    InitPolicy policy = InitPolicy::verbatim;
    std::int64_t fold_identity = std::numeric_limits<std::int64_t>::max();
    std::ostream* trace = nullptr;
};

struct RunOutput {
    std::vector<std::int64_t> distances;
    std::vector<bool> overflow;
    CostLedger ledger;
    std::uint64_t iterations = 0;

    bool any_overflow() const {
        for (bool b : overflow)
            if (b) return true;
        return false;
    }
};

namespace detail {

struct WaveSlot {
    std::size_t query = 0;  // global query index
    std::size_t len = 0;
    std::int64_t t0 = 0;  // iteration at which row 0 enters local column 0
};

/// Truncate a host word to the w-bit pattern the controller drives onto the
/// injection register.
inline std::uint64_t inject_bits(std::int64_t v, int w) {
    const std::uint64_t u = static_cast<std::uint64_t>(v);
    return w >= 64 ? u : (u & ((1ull << w) - 1));
}

}  // namespace detail

/// Executes the diagonal-wavefront schedule for one reference batch across
/// all replicas in lockstep and folds per-query minima on the host.
///
/// Each iteration applies, to every occupied column in parallel:
///   1. distance into the aux word (subtract, absolute value, and for the
///      squared metric a predicated shift-add square),
///   2. three-way minimum of the shifted score copies, staged into the
///      current-score slice (dead at that point),
///   3. accumulate distance into the current score,
///   4. diagonal copy current -> left-neighbour score, shifted one right,
///   5. diagonal copy upper -> diagonal score, shifted one right,
///   6. vertical copy current -> upper score,
///   7. diagonal copy of the query word, injecting the next element at the
///      left edge.
/// Copies 4-7 snapshot their sources before writing, so the strict 1..7
/// order has no read-after-write hazard inside an iteration.
template <class F>
class WavefrontEngine {
public:
    WavefrontEngine(F& fabric, const MappingPlan& plan, const ColumnLayout& layout,
                    std::span<const std::int64_t> ref, std::span<const EngineQuery> queries,
                    const EngineOptions& opts)
        : f_(fabric),
          plan_(plan),
          lay_(layout),
          ref_(ref),
          queries_(queries),
          opts_(opts),
          sentinel_((1ll << (layout.width - 1)) - 1),
          fold_(queries.size(), opts.fold_identity),
          ovf_(queries.size(), false),
          m_a_(fabric.make_mask()),
          m_b_(fabric.make_mask()),
          m_c_(fabric.make_mask()),
          m_d_(fabric.make_mask()),
          m_e_(fabric.make_mask()) {
        if (plan.batches > 1) {
            bnd_prev_.resize(queries.size());
            bnd_next_.resize(queries.size());
        }
    }

    /// Runs every batch to completion. Results come back in query order.
    RunOutput run() {
        for (std::size_t b = 0; b < plan_.batches; ++b) {
            run_one_batch(b);
            if (plan_.batches > 1 && b + 1 < plan_.batches) {
                bnd_prev_ = std::move(bnd_next_);
                bnd_next_.assign(queries_.size(), {});
            }
        }
        RunOutput out;
        out.distances = fold_;
        out.overflow = ovf_;
        f_.finalize_wear(f_.ledger());
        out.ledger = f_.ledger();
        out.iterations = iterations_;
        return out;
    }

    std::uint64_t iterations() const { return iterations_; }

private:
    void run_one_batch(std::size_t b) {
        load_reference(f_, plan_, lay_, ref_, b);
        const std::size_t width = plan_.batch_width(b);
        const std::size_t nrep = plan_.replicas();

        // Back-to-back schedule: a wave's first element enters local column 0
        // the iteration after the previous wave's last element left it.
        slots_.assign(nrep, {});
        std::int64_t t_end = -1;
        for (std::size_t q = 0; q < queries_.size(); ++q) {
            auto& sl = slots_[plan_.replica_of_query(q)];
            const std::int64_t t0 =
                sl.empty() ? 0 : sl.back().t0 + static_cast<std::int64_t>(sl.back().len);
            sl.push_back({q, queries_[q].length(), t0});
            t_end = std::max(t_end, t0 + static_cast<std::int64_t>(sl.back().len) - 1 +
                                        static_cast<std::int64_t>(width) - 1);
        }
        if (plan_.batches > 1 && b + 1 < plan_.batches)
            for (std::size_t q = 0; q < queries_.size(); ++q)
                bnd_next_[q].assign(queries_[q].length(), 0);

        first_.assign(nrep, 0);
        for (std::int64_t t = 0; t <= t_end; ++t) iterate(b, width, t);
    }

    // Column interval a wave occupies at iteration t, local coordinates.
    static bool occupancy(const detail::WaveSlot& v, std::int64_t t, std::size_t width,
                          std::int64_t& lo, std::int64_t& hi) {
        const std::int64_t rel = t - v.t0;
        lo = std::max<std::int64_t>(0, rel - static_cast<std::int64_t>(v.len) + 1);
        hi = std::min<std::int64_t>(static_cast<std::int64_t>(width) - 1, rel);
        return lo <= hi;
    }

    void iterate(std::size_t b, std::size_t width, std::int64_t t) {
        ++iterations_;
        const int w = lay_.width;
        const bool verbatim = opts_.policy == InitPolicy::verbatim;
        const std::uint64_t rd0 = f_.ledger().read_phases, wr0 = f_.ledger().write_phases;
        const std::uint64_t rb0 = f_.ledger().read_bits, wb0 = f_.ledger().write_bits;

        auto& occ_t = m_a_;
        auto& occ_t1 = m_b_;
        auto& compute = m_c_;
        auto& zero_head = m_d_;  // entering columns: score-slice zeroing
        auto& zero_sup = m_e_;   // entering column 0 of the whole matrix
        occ_t.clear();
        occ_t1.clear();
        compute.clear();
        zero_head.clear();
        zero_sup.clear();

        cuts_left_.clear();
        cuts_diag_.clear();
        cuts_q_.clear();
        extract_cols_.clear();
        extract_kind_.clear();

        std::uint64_t occupied_cols = 0, active_waves = 0;

        for (std::size_t r = 0; r < plan_.replicas(); ++r) {
            const std::size_t base = plan_.replica_base(r);
            auto& sl = slots_[r];
            // Drop waves fully drained before t.
            while (first_[r] < sl.size() &&
                   sl[first_[r]].t0 + static_cast<std::int64_t>(sl[first_[r]].len) - 1 +
                           static_cast<std::int64_t>(width) - 1 <
                       t)
                ++first_[r];

            for (std::size_t k = first_[r]; k < sl.size(); ++k) {
                const auto& v = sl[k];
                if (v.t0 > t) break;
                std::int64_t lo, hi;
                if (!occupancy(v, t, width, lo, hi)) continue;
                ++active_waves;
                occupied_cols += static_cast<std::uint64_t>(hi - lo + 1);
                occ_t.set_range(base + lo, base + hi + 1);

                // Compute mask: columns at row >= 1; plus the row-0 column
                // when it genuinely computes (matrix column 0 under verbatim,
                // every entering column under open_start).
                const std::int64_t head = t - v.t0;  // column at row 0, if in range
                const std::int64_t chi = std::min<std::int64_t>(hi, head - 1);
                if (lo <= chi) compute.set_range(base + lo, base + chi + 1);
                if (head >= 0 && head <= static_cast<std::int64_t>(width) - 1) {
                    const bool is_matrix_col0 = (b == 0 && head == 0);
                    if (!verbatim || is_matrix_col0) {
                        compute.set_range(base + head, base + head + 1);
                        if (verbatim)
                            zero_sup.set_range(base + head, base + head + 1);
                        else
                            zero_head.set_range(base + head, base + head + 1);
                    } else {
                        zero_head.set_range(base + head, base + head + 1);
                    }
                }

                // Extraction: the column that just produced the last row.
                const std::int64_t ce = t - v.t0 - static_cast<std::int64_t>(v.len) + 1;
                if (ce >= 0 && ce <= static_cast<std::int64_t>(width) - 1) {
                    const auto& eq = queries_[v.query];
                    const std::size_t endpoint = plan_.batch_base(b) + static_cast<std::size_t>(ce);
                    const bool allowed =
                        eq.window_index < 0 ||
                        self_join_endpoint_allowed(static_cast<std::size_t>(eq.window_index),
                                                   endpoint, eq.length());
                    if (allowed) {
                        extract_cols_.push_back(base + static_cast<std::size_t>(ce));
                        extract_kind_.push_back({v.query, -1});
                    }
                }

                // Boundary save towards the next batch: last local column.
                if (plan_.batches > 1 && b + 1 < plan_.batches &&
                    hi == static_cast<std::int64_t>(width) - 1) {
                    const std::int64_t row = t - v.t0 - (static_cast<std::int64_t>(width) - 1);
                    if (row >= 0 && row < static_cast<std::int64_t>(v.len)) {
                        extract_cols_.push_back(base + width - 1);
                        extract_kind_.push_back({v.query, row});
                    }
                }

                // Next-iteration occupancy feeds the copy masks and cuts.
                std::int64_t nlo, nhi;
                if (occupancy(v, t + 1, width, nlo, nhi)) {
                    occ_t1.set_range(base + nlo, base + nhi + 1);
                    if (nlo == 0) add_cuts(b, base, v, t);
                }
            }
            // A wave activating exactly at t+1 also needs its first query
            // element injected and its column-0 copies masked.
            for (std::size_t k = first_[r]; k < sl.size(); ++k) {
                const auto& v = sl[k];
                if (v.t0 != t + 1) continue;
                occ_t1.set_range(base + 0, base + 1);
                add_cuts(b, base, v, t);
                break;
            }
        }

        // Entering-column initialisation, then the seven steps.
        if (zero_sup.any()) {
            f_.zero_slice(lay_.s_up, w, zero_sup);
            f_.zero_slice(lay_.ovf, 1, zero_sup);
        }
        if (zero_head.any()) {
            if (verbatim) {
                f_.zero_slice(lay_.s_cur, w, zero_head);
            } else {
                f_.zero_slice(lay_.s_diag, w, zero_head);
                f_.zero_slice(lay_.s_up, w, zero_head);
                f_.zero_slice(lay_.s_left, w, zero_head);
            }
            f_.zero_slice(lay_.ovf, 1, zero_head);
        }

        if (compute.any()) {
            sub_slices(f_, lay_.q, lay_.r, lay_.aux_d, w, compute, lay_.ovf);
            f_.abs_slice(lay_.aux_d, w, compute, lay_.ovf);
            min3_slices(f_, lay_.s_diag, lay_.s_up, lay_.s_left, lay_.s_cur, w, compute);
            if (opts_.metric == Metric::abs_diff)
                f_.add_slices(lay_.s_cur, lay_.aux_d, lay_.s_cur, w, compute,
                              AddOptions{false, false, lay_.ovf});
            else
                f_.square_acc_slice(lay_.aux_d, lay_.s_cur, w, compute, lay_.ovf);
        }

        if (!extract_cols_.empty()) harvest(b);

        if (occ_t1.any()) {
            f_.diag_copy_slice(lay_.s_cur, lay_.s_left, w, occ_t1, cuts_left_);
            f_.diag_copy_slice(lay_.s_up, lay_.s_diag, w, occ_t1, cuts_diag_);
        }
        if (occ_t.any()) f_.copy_slice(lay_.s_cur, lay_.s_up, w, occ_t);
        if (occ_t1.any()) f_.diag_copy_slice(lay_.q, lay_.q, w, occ_t1, cuts_q_);

        if (opts_.trace) {
            auto& L = f_.ledger();
            (*opts_.trace) << "it=" << t << " batch=" << b << " waves=" << active_waves
                           << " occ=" << occupied_cols << " rdp=" << (L.read_phases - rd0)
                           << " wrp=" << (L.write_phases - wr0) << " rdb=" << (L.read_bits - rb0)
                           << " wrb=" << (L.write_bits - wb0) << "\n";
        }
    }

    /// Left-edge injections consumed at t+1: score boundary words for the
    /// two diagonal score copies and the next query element.
    void add_cuts(std::size_t b, std::size_t base, const detail::WaveSlot& v, std::int64_t t) {
        const int w = lay_.width;
        const std::int64_t i1 = t + 1 - v.t0;  // row column 0 computes next
        std::int64_t left = sentinel_, diag = sentinel_;
        if (b > 0) {
            const auto& bnd = bnd_prev_[v.query];
            left = bnd[static_cast<std::size_t>(i1)];
            diag = i1 >= 1 ? bnd[static_cast<std::size_t>(i1 - 1)] : 0;
        }
        cuts_left_.push_back({base, detail::inject_bits(left, w)});
        cuts_diag_.push_back({base, detail::inject_bits(diag, w)});
        std::int64_t qv = 0;
        if (!queries_[v.query].values.empty())
            qv = queries_[v.query].values[static_cast<std::size_t>(i1)];
        cuts_q_.push_back({base, detail::inject_bits(qv, w)});
    }

    /// Charged host reads: fold last-row scores into per-query minima and
    /// save boundary trajectories. The sticky overflow flag of an extracted
    /// column rides along with the read.
    void harvest(std::size_t b) {
        (void)b;
        auto vals = f_.extract_words(lay_.s_cur, lay_.width, extract_cols_);
        for (std::size_t i = 0; i < extract_cols_.size(); ++i) {
            const auto [q, row] = extract_kind_[i];
            if (row < 0) {
                if (F::has_values()) {
                    fold_[q] = std::min(fold_[q], vals[i]);
                    if (f_.peek_bit(extract_cols_[i], lay_.ovf)) ovf_[q] = true;
                }
            } else {
                bnd_next_[q][static_cast<std::size_t>(row)] = vals[i];
            }
        }
    }

    F& f_;
    const MappingPlan& plan_;
    const ColumnLayout& lay_;
    std::span<const std::int64_t> ref_;
    std::span<const EngineQuery> queries_;
    EngineOptions opts_;
    std::int64_t sentinel_;

    std::vector<std::vector<detail::WaveSlot>> slots_;
    std::vector<std::size_t> first_;
    std::vector<std::int64_t> fold_;
    std::vector<bool> ovf_;
    std::vector<std::vector<std::int64_t>> bnd_prev_, bnd_next_;
    std::uint64_t iterations_ = 0;

    typename F::Mask m_a_, m_b_, m_c_, m_d_, m_e_;
    std::vector<DiagCut> cuts_left_, cuts_diag_, cuts_q_;
    std::vector<std::size_t> extract_cols_;
    std::vector<std::pair<std::size_t, std::int64_t>> extract_kind_;
};

/// Convenience driver: plans nothing, just runs the given plan end to end
/// and returns distances plus the accumulated ledger.
template <class F>
RunOutput run_batch(F& fabric, std::span<const std::int64_t> ref,
                    std::span<const EngineQuery> queries, const MappingPlan& plan,
                    const ColumnLayout& layout, const EngineOptions& opts = {}) {
    WavefrontEngine<F> eng(fabric, plan, layout, ref, queries, opts);
    return eng.run();
}

}  // namespace matsa
