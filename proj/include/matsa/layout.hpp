#pragma once

#include <stdexcept>

namespace matsa {

/// Fixed slicing of a 256-cell compute column for word width w.
///
/// Six w-bit value slices (reference element, query element, current score
/// and the three shifted score copies) occupy the bottom 6w cells; the rest
/// is the aux region holding the sticky overflow flag and the distance
/// scratch word. For w = 32 the aux region is exactly the top 64 cells; for
/// narrower words it grows accordingly.
struct ColumnLayout {
    int width = 0;   // word width in bits (8, 16 or 32)
    int r = 0;       // reference element
    int q = 0;       // in-flight query element
    int s_cur = 0;   // S[i][j]
    int s_diag = 0;  // S[i-1][j-1]
    int s_up = 0;    // S[i-1][j]
    int s_left = 0;  // S[i][j-1]
    int aux_begin = 0;
    int aux_size = 0;
    int ovf = 0;     // sticky per-column overflow flag (first aux cell)
    int aux_d = 0;   // distance scratch slice (w aux cells)

    static ColumnLayout for_width(int w) {
        if (w != 8 && w != 16 && w != 32)
            throw std::invalid_argument("column layout: width must be 8, 16 or 32");
        ColumnLayout l;
        l.width = w;
        l.r = 0;
        l.q = w;
        l.s_cur = 2 * w;
        l.s_diag = 3 * w;
        l.s_up = 4 * w;
        l.s_left = 5 * w;
        l.aux_begin = 6 * w;
        l.aux_size = 256 - 6 * w;
        l.ovf = l.aux_begin;
        l.aux_d = l.aux_begin + 1;
        return l;
    }
};

}  // namespace matsa
