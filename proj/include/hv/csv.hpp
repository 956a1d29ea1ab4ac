#ifndef HV_CSV_HPP
#define HV_CSV_HPP

#include <cstdio>
#include <string>

namespace hv {

// 17 significant digits: enough for exact double round-trips.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace hv

#endif  // HV_CSV_HPP
