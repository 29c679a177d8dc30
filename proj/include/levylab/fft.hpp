#pragma once

// Thin wrapper over FFTW's complex transforms. Plans are cached per
// (shape, axes, direction) and executed on caller arrays, so concurrent
// callers only contend on the first use of a shape.

#include <complex>
#include <cstddef>
#include <vector>

namespace levylab::fft {

enum class Direction { forward, backward };

/// Unnormalised in-place transform over every axis of a row-major array.
void transform(std::complex<double>* data, const std::vector<std::size_t>& shape, Direction dir);

/// Unnormalised in-place transform over the listed axes only; the remaining
/// axes are treated as a batch.
void transform_axes(std::complex<double>* data, const std::vector<std::size_t>& shape,
                    const std::vector<std::size_t>& axes, Direction dir);

/// Signed DFT index of position m in an N-point transform (0..N/2, then negatives).
inline long signed_index(std::size_t m, std::size_t n) {
  return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

}  // namespace levylab::fft
