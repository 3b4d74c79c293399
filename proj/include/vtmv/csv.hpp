#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace vtmv {

/// Ten significant digits, the precision used by every CSV the tools emit.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace vtmv
