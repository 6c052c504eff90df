#pragma once

#include <complex>
#include <span>
#include <vector>

namespace tfnorm {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

namespace fft {

/// Unnormalized in-place complex FFT of a row-major array with the given extents.
/// sign = -1 is the forward transform, +1 the backward one.
void transform(std::span<cplx> data, std::span<const int> dims, int sign);

inline void forward(std::span<cplx> data, std::span<const int> dims) { transform(data, dims, -1); }
inline void backward(std::span<cplx> data, std::span<const int> dims) { transform(data, dims, +1); }

} // namespace fft
} // namespace tfnorm
