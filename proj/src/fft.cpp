#include "windopt/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace windopt {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = data[i + j];
        const std::complex<double> v = data[i + j + len / 2] * w;
        data[i + j] = u + v;
        data[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

void fft3(std::vector<std::complex<double>>& data, int n1, int n2, int n3, bool inverse) {
  const std::size_t total = static_cast<std::size_t>(n1) * n2 * n3;
  if (data.size() != total) throw std::invalid_argument("fft3: size does not match dimensions");

  // Axis 3 (contiguous rows).
  for (std::size_t row = 0; row < total / n3; ++row)
    fft(std::span(data.data() + row * n3, static_cast<std::size_t>(n3)), inverse);

  // Axes 1 and 2 via gather/scatter through a scratch line.
  std::vector<std::complex<double>> line;
  line.resize(static_cast<std::size_t>(std::max(n1, n2)));

  const auto idx = [n2, n3](int i1, int i2, int i3) {
    return (static_cast<std::size_t>(i1) * n2 + i2) * n3 + i3;
  };

  for (int i1 = 0; i1 < n1; ++i1)
    for (int i3 = 0; i3 < n3; ++i3) {
      for (int i2 = 0; i2 < n2; ++i2) line[i2] = data[idx(i1, i2, i3)];
      fft(std::span(line.data(), static_cast<std::size_t>(n2)), inverse);
      for (int i2 = 0; i2 < n2; ++i2) data[idx(i1, i2, i3)] = line[i2];
    }

  for (int i2 = 0; i2 < n2; ++i2)
    for (int i3 = 0; i3 < n3; ++i3) {
      for (int i1 = 0; i1 < n1; ++i1) line[i1] = data[idx(i1, i2, i3)];
      fft(std::span(line.data(), static_cast<std::size_t>(n1)), inverse);
      for (int i1 = 0; i1 < n1; ++i1) data[idx(i1, i2, i3)] = line[i1];
    }
}

}  // namespace windopt
