#pragma once

#include <cstddef>

namespace tfnorm::detail {

inline void unflatten(std::size_t flat, int dim, std::size_t n, std::size_t* idx)
{
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = flat % n;
        flat /= n;
    }
}

/// Flat index of (m - j + s) per axis; false when it leaves [0, n)^dim.
inline bool difference_index(const std::size_t* m, const std::size_t* j, long s, int dim, std::size_t n, std::size_t& out)
{
    std::size_t flat = 0;
    const long nn = static_cast<long>(n);
    for (int a = 0; a < dim; ++a) {
        const long t = static_cast<long>(m[a]) - static_cast<long>(j[a]) + s;
        if (t < 0 || t >= nn) return false;
        flat = flat * n + static_cast<std::size_t>(t);
    }
    out = flat;
    return true;
}

} // namespace tfnorm::detail
