#pragma once

#include "rose2/types.hpp"

#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>

namespace rose2 {

template <typename Scalar>
using ComplexRaster = Raster<std::complex<Scalar>>;

constexpr bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

constexpr int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 transform. The inverse is scaled by 1/N.
template <typename Scalar>
void fft_inplace(std::span<std::complex<Scalar>> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const Scalar sign = inverse ? Scalar(1) : Scalar(-1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const Scalar angle = sign * Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles straight from sin/cos keep the error at O(eps log n).
      const std::complex<Scalar> w(std::cos(angle * Scalar(k)), std::sin(angle * Scalar(k)));
      for (std::size_t start = 0; start < n; start += len) {
        const std::complex<Scalar> u = data[start + k];
        const std::complex<Scalar> v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto& x : data) x /= Scalar(n);
  }
}

/// Row transforms followed by column transforms on a square power-of-two array.
template <typename Scalar>
void fft2_inplace(ComplexRaster<Scalar>& a, bool inverse) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  for (Eigen::Index r = 0; r < rows; ++r) {
    fft_inplace<Scalar>(std::span<std::complex<Scalar>>(a.data() + r * cols, cols), inverse);
  }
  std::vector<std::complex<Scalar>> column(static_cast<std::size_t>(rows));
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) column[r] = a(r, c);
    fft_inplace<Scalar>(std::span<std::complex<Scalar>>(column), inverse);
    for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = column[r];
  }
}

/// Moves the zero-frequency bin to (n/2, n/2). Self-inverse for even sides.
template <typename Derived>
auto fftshift(const Eigen::ArrayBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Plain out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      out((r + rows / 2) % rows, (c + cols / 2) % cols) = a(r, c);
    }
  }
  return out;
}

}  // namespace rose2
