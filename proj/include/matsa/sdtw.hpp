#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "matsa/time_series.hpp"
#include "matsa/types.hpp"

namespace matsa {

namespace detail {

template <class A>
struct AccLimits {
    static constexpr A max() { return std::numeric_limits<A>::max(); }
};
template <>
struct AccLimits<__int128> {
    static constexpr __int128 max() {
        return static_cast<__int128>((~static_cast<unsigned __int128>(0)) >> 1);
    }
};

template <class A>
inline A checked_add(A a, A b) {
    if constexpr (std::numeric_limits<A>::is_iec559) {
        return a + b;
    } else {
        A out{};
        if (__builtin_add_overflow(a, b, &out))
            throw SaturationError("score accumulator overflow");
        return out;
    }
}

template <class A>
inline A checked_mul(A a, A b) {
    if constexpr (std::numeric_limits<A>::is_iec559) {
        return a * b;
    } else {
        A out{};
        if (__builtin_mul_overflow(a, b, &out))
            throw SaturationError("squared distance exceeds accumulator width");
        return out;
    }
}

}  // namespace detail

/// Point distance between two samples, widened to the accumulator type.
/// abs_diff -> |a-b|, square_diff -> (a-b)^2. A squared difference that does
/// not fit the accumulator raises SaturationError.
template <class T>
acc_t<T> dist(T a, T b, Metric metric) {
    using A = acc_t<T>;
    A d = static_cast<A>(a) - static_cast<A>(b);
    if (metric == Metric::abs_diff) return d < A{0} ? static_cast<A>(-d) : d;
    return detail::checked_mul(d, d);
}

/// Fills the full N x M scoring matrix (row-major, N = |Q|, M = |R|).
///
/// Matrix semantics: zero init; S[0][0] = dist(Q[0],R[0]); first column is
/// the cumulative sum down column 0; interior cells are
/// dist + min(diag, left, up). Under `verbatim` the rest of row 0 stays
/// zero; under `open_start` row 0 holds raw distances.
template <class T>
std::vector<acc_t<T>> sdtw_matrix(std::span<const T> q, std::span<const T> r, Metric metric,
                                  InitPolicy policy = InitPolicy::verbatim) {
    using A = acc_t<T>;
    const std::size_t n = q.size(), m = r.size();
    if (n == 0 || m == 0) throw std::invalid_argument("sdtw: empty series");
    std::vector<A> s(n * m, A{0});

    s[0] = dist(q[0], r[0], metric);
    if (policy == InitPolicy::open_start) {
        for (std::size_t j = 1; j < m; ++j) s[j] = dist(q[0], r[j], metric);
    }
    for (std::size_t i = 1; i < n; ++i)
        s[i * m] = detail::checked_add(s[(i - 1) * m], dist(q[i], r[0], metric));

    for (std::size_t i = 1; i < n; ++i) {
        const A* prev = &s[(i - 1) * m];
        A* cur = &s[i * m];
        for (std::size_t j = 1; j < m; ++j) {
            A best = std::min({prev[j - 1], cur[j - 1], prev[j]});
            cur[j] = detail::checked_add(dist(q[i], r[j], metric), best);
        }
    }
    return s;
}

/// Reference sDTW: materialises the whole matrix and returns the minimum of
/// its last row. This is the ground-truth oracle every other execution path
/// is checked against.
template <class T>
acc_t<T> sdtw_full(std::span<const T> q, std::span<const T> r, Metric metric,
                   InitPolicy policy = InitPolicy::verbatim) {
    auto s = sdtw_matrix(q, r, metric, policy);
    const std::size_t m = r.size();
    return *std::min_element(s.end() - static_cast<std::ptrdiff_t>(m), s.end());
}

/// The four length-M working vectors of the streaming evaluation. They mirror
/// the score slices a compute column carries: the row being produced plus the
/// three shifted copies that make each cell update local.
template <class A>
struct StreamWorkspace {
    static constexpr std::size_t kVectorCount = 4;

    std::vector<A> s_cur;
    std::vector<A> s_diag;
    std::vector<A> s_up;
    std::vector<A> s_left;

    explicit StreamWorkspace(std::size_t m) : s_cur(m), s_diag(m), s_up(m), s_left(m) {}

    std::size_t vector_length() const { return s_cur.size(); }
};

namespace detail {

/// Streams the matrix row by row through a StreamWorkspace and leaves the
/// last row in ws.s_cur. O(4M) working set instead of O(NM).
template <class T>
void sdtw_stream_rows(std::span<const T> q, std::span<const T> r, Metric metric,
                      InitPolicy policy, StreamWorkspace<acc_t<T>>& ws) {
    using A = acc_t<T>;
    const std::size_t n = q.size(), m = r.size();
    if (n == 0 || m == 0) throw std::invalid_argument("sdtw: empty series");

    // Row 0.
    ws.s_cur[0] = dist(q[0], r[0], metric);
    for (std::size_t j = 1; j < m; ++j)
        ws.s_cur[j] = policy == InitPolicy::open_start ? dist(q[0], r[j], metric) : A{0};

    for (std::size_t i = 1; i < n; ++i) {
        // Shifted copies of the finished row: s_diag[j] = S[i-1][j-1],
        // s_up[j] = S[i-1][j].
        for (std::size_t j = m; j-- > 1;) ws.s_diag[j] = ws.s_cur[j - 1];
        ws.s_up = ws.s_cur;

        ws.s_cur[0] = checked_add(dist(q[i], r[0], metric), ws.s_up[0]);
        for (std::size_t j = 1; j < m; ++j) {
            ws.s_left[j] = ws.s_cur[j - 1];
            A best = std::min({ws.s_diag[j], ws.s_left[j], ws.s_up[j]});
            ws.s_cur[j] = checked_add(dist(q[i], r[j], metric), best);
        }
    }
}

}  // namespace detail

/// Streaming sDTW. Identical result to sdtw_full for every input, computed
/// with exactly four length-M vectors plus scalars.
template <class T>
acc_t<T> sdtw_stream(std::span<const T> q, std::span<const T> r, Metric metric,
                     InitPolicy policy = InitPolicy::verbatim) {
    StreamWorkspace<acc_t<T>> ws(r.size());
    detail::sdtw_stream_rows(q, r, metric, policy, ws);
    return *std::min_element(ws.s_cur.begin(), ws.s_cur.end());
}

/// Last row of the scoring matrix, streamed. Used by the self-join driver,
/// which needs per-endpoint values to apply its exclusion zone.
template <class T>
std::vector<acc_t<T>> sdtw_last_row(std::span<const T> q, std::span<const T> r, Metric metric,
                                    InitPolicy policy = InitPolicy::verbatim) {
    StreamWorkspace<acc_t<T>> ws(r.size());
    detail::sdtw_stream_rows(q, r, metric, policy, ws);
    return ws.s_cur;
}

/// Compares every query against the reference independently. The anomaly
/// flag is (distance > threshold).
template <class T>
std::vector<SdtwResult<acc_t<T>>> run_query_filtering(const TimeSeries<T>& ref,
                                                      const QuerySet<T>& qs, Metric metric,
                                                      acc_t<T> threshold,
                                                      InitPolicy policy = InitPolicy::verbatim) {
    std::vector<SdtwResult<acc_t<T>>> out;
    out.reserve(qs.size());
    for (const auto& q : qs) {
        acc_t<T> d = sdtw_stream<T>(q.view(), ref.view(), metric, policy);
        out.push_back({d, d > threshold});
    }
    return out;
}

/// Endpoint exclusion for the self-join: an alignment ending at reference
/// column j is attributed to the window starting at j-(m-1); endpoints whose
/// window lies closer than m positions to query window i are trivial
/// self-matches and are skipped.
inline bool self_join_endpoint_allowed(std::size_t window, std::size_t endpoint, std::size_t m) {
    const long long p = static_cast<long long>(endpoint) - static_cast<long long>(m) + 1;
    const long long d = static_cast<long long>(window) - p;
    return (d < 0 ? -d : d) >= static_cast<long long>(m);
}

/// Self-join: every length-m window of `series` is matched against the whole
/// series, minimising over non-excluded endpoints. A window with no allowed
/// endpoint (possible only when the series barely exceeds the window) gets
/// the accumulator maximum, i.e. "no valid match".
template <class T>
std::vector<SdtwResult<acc_t<T>>> run_self_join(const TimeSeries<T>& series, std::size_t m,
                                                Metric metric, acc_t<T> threshold,
                                                InitPolicy policy = InitPolicy::verbatim) {
    using A = acc_t<T>;
    const std::size_t n = series.size();
    if (m == 0 || m > n) throw std::invalid_argument("self_join: window must satisfy 1 <= m <= n");

    std::vector<SdtwResult<A>> out;
    out.reserve(n - m + 1);
    for (std::size_t i = 0; i + m <= n; ++i) {
        std::span<const T> window(series.data() + i, m);
        auto last = sdtw_last_row<T>(window, series.view(), metric, policy);
        A best = detail::AccLimits<A>::max();
        for (std::size_t j = 0; j < n; ++j) {
            if (!self_join_endpoint_allowed(i, j, m)) continue;
            best = std::min(best, last[j]);
        }
        out.push_back({best, best > threshold});
    }
    return out;
}

}  // namespace matsa
