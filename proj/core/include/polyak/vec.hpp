#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace polyak {

using Vec = std::vector<double>;
using Point = std::span<const double>;

inline double dot(Point a, Point b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(Point a) { return dot(a, a); }

inline double norm(Point a) { return std::sqrt(norm_sq(a)); }

inline double dist_sq(Point a, Point b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(Point a, Point b) { return std::sqrt(dist_sq(a, b)); }

// a - s*b
inline Vec sub_scaled(Point a, double s, Point b) {
    Vec out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= s * b[i];
    return out;
}

inline bool is_zero(Point a) {
    for (double v : a)
        if (v != 0.0) return false;
    return true;
}

inline bool all_finite(Point a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

inline Vec to_vec(Point a) { return Vec(a.begin(), a.end()); }

}  // namespace polyak
