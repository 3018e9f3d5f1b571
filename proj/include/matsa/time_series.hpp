#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matsa/types.hpp"

namespace matsa {

/// A host-side sample sequence. Thin wrapper over a contiguous vector that
/// enforces the non-empty invariant the algorithms rely on.
template <class T>
class TimeSeries {
public:
    TimeSeries() = default;

    explicit TimeSeries(std::vector<T> samples) : samples_(std::move(samples)) {
        if (samples_.empty()) throw std::invalid_argument("TimeSeries: length must be >= 1");
    }

    TimeSeries(std::initializer_list<T> init) : TimeSeries(std::vector<T>(init)) {}

    std::size_t size() const { return samples_.size(); }
    const T* data() const { return samples_.data(); }
    const T& operator[](std::size_t i) const { return samples_[i]; }

    std::span<const T> view() const { return {samples_.data(), samples_.size()}; }

    const std::vector<T>& samples() const { return samples_; }

private:
    std::vector<T> samples_;
};

/// A batch of query sequences plus the analysis mode they were produced for.
/// In self_join mode the queries are the sliding windows of a single series.
template <class T>
class QuerySet {
public:
    QuerySet() : mode_(Mode::query_filtering) {}

    QuerySet(std::vector<TimeSeries<T>> queries, Mode mode)
        : queries_(std::move(queries)), mode_(mode) {}

    std::size_t size() const { return queries_.size(); }
    bool empty() const { return queries_.empty(); }
    Mode mode() const { return mode_; }

    const TimeSeries<T>& operator[](std::size_t i) const { return queries_[i]; }

    auto begin() const { return queries_.begin(); }
    auto end() const { return queries_.end(); }

    void add(TimeSeries<T> q) { queries_.push_back(std::move(q)); }

private:
    std::vector<TimeSeries<T>> queries_;
    Mode mode_;
};

/// Per-query outcome: the accumulated alignment distance and the anomaly
/// flag derived from a caller-supplied threshold (flag set iff distance
/// strictly exceeds the threshold).
template <class A>
struct SdtwResult {
    A distance{};
    bool anomaly = false;
};

}  // namespace matsa
