#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace matsa {

/// Sample data types accepted by the host API. Integer types up to 32 bits
/// run on the crossbar path; int64 and the floating-point types are
/// supported by the host-side reference implementation only (the column
/// layout cannot fit six 64-bit slices into a 256-cell column).
enum class DType : std::uint8_t { i8 = 0, i16 = 1, i32 = 2, i64 = 3, f32 = 4, f64 = 5 };

enum class Metric : std::uint8_t { abs_diff, square_diff };

enum class Mode : std::uint8_t { query_filtering, self_join };

/// Row-0 initialisation of the scoring matrix.
///
/// `verbatim` keeps row 0 at zero for j >= 1 (only S[0][0] is a distance),
/// which is what the recurrence produces when the matrix is zero-initialised
/// and the fill starts at row 1. `open_start` seeds the whole first row with
/// raw distances, the conventional unanchored-start variant. Both are
/// implemented everywhere; `verbatim` is the default contract.
enum class InitPolicy : std::uint8_t { verbatim, open_start };

/// Thrown when an accumulated score exceeds the reference accumulator width
/// (twice the sample width). The reference path refuses to wrap silently.
class SaturationError : public std::runtime_error {
public:
    explicit SaturationError(const std::string& what) : std::runtime_error(what) {}
};

/// Maps a sample type to its score accumulator type (twice the sample width;
/// floating point accumulates in double).
template <class T> struct AccOf;
template <> struct AccOf<std::int8_t>  { using type = std::int16_t; };
template <> struct AccOf<std::int16_t> { using type = std::int32_t; };
template <> struct AccOf<std::int32_t> { using type = std::int64_t; };
template <> struct AccOf<std::int64_t> { using type = __int128; };
template <> struct AccOf<float>        { using type = double; };
template <> struct AccOf<double>       { using type = double; };

template <class T> using acc_t = typename AccOf<T>::type;

template <class T> inline constexpr bool is_integer_sample_v =
    std::numeric_limits<T>::is_integer;

inline const char* dtype_name(DType d) {
    switch (d) {
        case DType::i8: return "int8";
        case DType::i16: return "int16";
        case DType::i32: return "int32";
        case DType::i64: return "int64";
        case DType::f32: return "fp32";
        case DType::f64: return "fp64";
    }
    return "?";
}

inline bool dtype_is_integer(DType d) {
    return d == DType::i8 || d == DType::i16 || d == DType::i32 || d == DType::i64;
}

/// Bit width of the sample type as mapped onto a crossbar column slice.
inline int dtype_bits(DType d) {
    switch (d) {
        case DType::i8: return 8;
        case DType::i16: return 16;
        case DType::i32: return 32;
        case DType::i64: return 64;
        case DType::f32: return 32;
        case DType::f64: return 64;
    }
    return 0;
}

/// True when the dtype can be executed on the crossbar (integer, and the
/// six word slices plus aux fit into a 256-cell column, i.e. width <= 32).
inline bool dtype_on_crossbar(DType d) {
    return d == DType::i8 || d == DType::i16 || d == DType::i32;
}

}  // namespace matsa
