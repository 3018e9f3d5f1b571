#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matsa/io.hpp"

namespace matsa {

/// One characterisation workload: a reference and a stream of equally sized
/// queries sliced from (or generated alongside) it.
struct WorkloadSpec {
    std::string id;
    std::size_t ref_size = 0;
    std::size_t query_size = 0;
    std::size_t num_queries = 0;
};

/// The characterisation grid: reference {64K..512K} x query {4K..32K} x
/// queries {4K..64K}, divided by `scale`. scale = 64 is the desk-size twin
/// that finishes in minutes; scaled workload ids carry an explicit "s<scale>"
/// marker so reports cannot be mistaken for full-size runs.
inline std::vector<WorkloadSpec> characterization_grid(std::size_t scale = 64) {
    const std::size_t refs[] = {65536, 131072, 262144, 524288};
    const std::size_t qs[] = {4096, 8192, 16384, 32768};
    const std::size_t ns[] = {4096, 8192, 16384, 65536};
    std::vector<WorkloadSpec> out;
    for (std::size_t r : refs)
        for (std::size_t q : qs)
            for (std::size_t n : ns) {
                WorkloadSpec w;
                w.ref_size = r / scale;
                w.query_size = q / scale;
                w.num_queries = n / scale;
                w.id = (scale == 1 ? std::string("t3") : "t3s" + std::to_string(scale)) + "-r" +
                       std::to_string(w.ref_size) + "-q" + std::to_string(w.query_size) + "-n" +
                       std::to_string(w.num_queries);
                out.push_back(w);
            }
    return out;
}

/// Synthetic workload: random-walk reference plus queries sliced from a
/// second walk with the same statistics. Deterministic in (spec, seed).
struct SyntheticWorkload {
    std::vector<std::int64_t> ref;
    std::vector<std::vector<std::int64_t>> queries;
};

inline SyntheticWorkload make_synthetic(const WorkloadSpec& spec, std::uint64_t seed,
                                        std::int64_t max_step = 3, std::int64_t amplitude = 100) {
    SyntheticWorkload w;
    w.ref = random_walk(spec.ref_size, seed, max_step, amplitude);
    const std::size_t pool = spec.query_size * spec.num_queries;
    auto src = random_walk(pool, seed ^ 0x9e3779b97f4a7c15ull, max_step, amplitude);
    w.queries = slice_queries(src, spec.query_size, spec.num_queries, spec.query_size);
    return w;
}

}  // namespace matsa
