#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace lemon {

inline constexpr double kPi = 3.14159265358979323846;

// Shortest exact round-trip formatting for CSV/JSON output ('.' decimal, C locale).
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_g(double v, int digits = 12) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Compensated accumulator for long log-sum chains.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Wrap into [0, period).
inline double wrap_periodic(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;  // fmod can round up to period
    return r;
}

}  // namespace lemon
