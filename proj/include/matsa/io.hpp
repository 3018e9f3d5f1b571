#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "matsa/types.hpp"

namespace matsa {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A loaded series before dtype dispatch: integer dtypes populate `ints`,
/// floating dtypes populate `reals`.
struct RawSeries {
    DType dtype = DType::i32;
    std::vector<std::int64_t> ints;
    std::vector<double> reals;

    std::size_t size() const { return dtype_is_integer(dtype) ? ints.size() : reals.size(); }
};

namespace detail {

inline void check_int_range(std::int64_t v, DType d, std::size_t line) {
    const int bits = dtype_bits(d);
    if (bits >= 64) return;
    const std::int64_t lo = -(1ll << (bits - 1)), hi = (1ll << (bits - 1)) - 1;
    if (v < lo || v > hi)
        throw ParseError("sample " + std::to_string(v) + " out of range for " + dtype_name(d),
                         line);
}

/// Nearest, ties to even.
inline std::int64_t quantize(double v, DType d, std::size_t line) {
    if (std::isnan(v) || std::isinf(v)) throw ParseError("non-finite sample", line);
    const double r = std::nearbyint(v);
    if (r < -9.3e18 || r > 9.2e18) throw ParseError("sample out of 64-bit range", line);
    const std::int64_t q = static_cast<std::int64_t>(r);
    check_int_range(q, d, line);
    return q;
}

}  // namespace detail

/// Plain CSV: one value per line, optional single header line, '#' comments
/// and blank lines ignored. Values are quantized (nearest, ties to even) for
/// integer dtypes.
inline RawSeries read_csv_series(std::istream& in, DType dtype) {
    RawSeries out;
    out.dtype = dtype;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos || line[a] == '#') continue;
        std::size_t bpos = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(a, bpos - a + 1);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || errno == ERANGE) {
            if (first_content) {  // a single non-numeric header line is fine
                first_content = false;
                continue;
            }
            throw ParseError("not a number: '" + tok + "'", lineno);
        }
        first_content = false;
        if (dtype_is_integer(dtype))
            out.ints.push_back(detail::quantize(v, dtype, lineno));
        else
            out.reals.push_back(v);
    }
    if (out.size() == 0) throw IoError("empty series");
    return out;
}

inline RawSeries read_csv_series(const std::string& path, DType dtype) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    return read_csv_series(f, dtype);
}

// Raw little-endian binary with a 16-byte header:
//   bytes 0..3   magic "TSA1"
//   byte  4      dtype code (0..5)
//   bytes 5..7   zero
//   bytes 8..15  element count, uint64 LE
// followed by the samples, little-endian, at each dtype's natural width.

inline void write_tsa1(std::ostream& os, const RawSeries& s) {
    char hdr[16] = {0};
    std::memcpy(hdr, "TSA1", 4);
    hdr[4] = static_cast<char>(s.dtype);
    const std::uint64_t n = s.size();
    for (int i = 0; i < 8; ++i) hdr[8 + i] = static_cast<char>((n >> (8 * i)) & 0xff);
    os.write(hdr, 16);
    const int bytes = dtype_bits(s.dtype) / 8;
    for (std::uint64_t i = 0; i < n; ++i) {
        char buf[8];
        if (dtype_is_integer(s.dtype)) {
            const std::uint64_t u = static_cast<std::uint64_t>(s.ints[i]);
            for (int k = 0; k < bytes; ++k) buf[k] = static_cast<char>((u >> (8 * k)) & 0xff);
        } else if (s.dtype == DType::f32) {
            const float f = static_cast<float>(s.reals[i]);
            std::memcpy(buf, &f, 4);
        } else {
            const double d = s.reals[i];
            std::memcpy(buf, &d, 8);
        }
        os.write(buf, bytes);
    }
}

inline void write_tsa1(const std::string& path, const RawSeries& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    write_tsa1(f, s);
}

inline RawSeries read_tsa1(std::istream& is) {
    char hdr[16];
    if (!is.read(hdr, 16) || std::memcmp(hdr, "TSA1", 4) != 0)
        throw IoError("bad TSA1 header");
    const int code = static_cast<unsigned char>(hdr[4]);
    if (code > 5) throw IoError("bad TSA1 dtype code");
    RawSeries s;
    s.dtype = static_cast<DType>(code);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(static_cast<unsigned char>(hdr[8 + i])) << (8 * i);
    const int bytes = dtype_bits(s.dtype) / 8;
    for (std::uint64_t i = 0; i < n; ++i) {
        char buf[8] = {0};
        if (!is.read(buf, bytes)) throw IoError("truncated TSA1 payload");
        if (dtype_is_integer(s.dtype)) {
            std::uint64_t u = 0;
            for (int k = 0; k < bytes; ++k)
                u |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[k])) << (8 * k);
            // sign extension to the dtype's width
            const int b = dtype_bits(s.dtype);
            if (b < 64) {
                const std::uint64_t sign = 1ull << (b - 1);
                u = (u ^ sign) - sign;
            }
            s.ints.push_back(static_cast<std::int64_t>(u));
        } else if (s.dtype == DType::f32) {
            float f;
            std::memcpy(&f, buf, 4);
            s.reals.push_back(f);
        } else {
            double d;
            std::memcpy(&d, buf, 8);
            s.reals.push_back(d);
        }
    }
    if (s.size() == 0) throw IoError("empty series");
    return s;
}

inline RawSeries read_tsa1(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    return read_tsa1(f);
}

/// Loads a series by extension: ".tsa1"/".bin" binary, anything else CSV.
inline RawSeries load_series(const std::string& path, DType dtype) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".tsa1" || ext == ".bin") {
        RawSeries s = read_tsa1(path);
        if (s.dtype != dtype)
            throw IoError("dtype mismatch: file holds " + std::string(dtype_name(s.dtype)));
        return s;
    }
    return read_csv_series(path, dtype);
}

/// Deterministic windows at the given stride; no wrapping, the tail that
/// cannot fill a window is dropped. Requesting more windows than fit is an
/// error.
inline std::vector<std::vector<std::int64_t>> slice_queries(const std::vector<std::int64_t>& s,
                                                            std::size_t query_size,
                                                            std::size_t num_queries,
                                                            std::size_t stride) {
    if (query_size == 0 || query_size > s.size())
        throw std::invalid_argument("slice_queries: query_size exceeds series length");
    if (stride == 0) throw std::invalid_argument("slice_queries: zero stride");
    const std::size_t available = (s.size() - query_size) / stride + 1;
    if (num_queries > available)
        throw std::invalid_argument("slice_queries: only " + std::to_string(available) +
                                    " windows available");
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(num_queries);
    for (std::size_t q = 0; q < num_queries; ++q) {
        const std::size_t off = q * stride;
        out.emplace_back(s.begin() + static_cast<long>(off),
                         s.begin() + static_cast<long>(off + query_size));
    }
    return out;
}

/// Seedable integer random walk with bounded step, clamped to +-amplitude.
inline std::vector<std::int64_t> random_walk(std::size_t n, std::uint64_t seed,
                                             std::int64_t max_step = 3,
                                             std::int64_t amplitude = 100) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> step(-max_step, max_step);
    std::vector<std::int64_t> out(n);
    std::int64_t x = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x += step(rng);
        x = std::max(-amplitude, std::min(amplitude, x));
        out[i] = x;
    }
    return out;
}

}  // namespace matsa
