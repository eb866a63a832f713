#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace optmol {

/// 17-significant-digit decimal form: parses back to the identical double.
/// NaN prints as lowercase "nan"; zero loses its sign bit.
inline std::string format_full(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace optmol
