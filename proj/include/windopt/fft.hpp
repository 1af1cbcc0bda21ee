#ifndef WINDOPT_FFT_HPP
#define WINDOPT_FFT_HPP

#include <complex>
#include <span>
#include <vector>

namespace windopt {

/// In-place radix-2 transform, length must be a power of two.
/// Forward uses kernel e^{-i 2 pi j k / n}; inverse uses e^{+i ...}.
/// Neither direction applies a 1/n normalization.
void fft(std::span<std::complex<double>> data, bool inverse);

/// Separable 3-D transform of data indexed as [i1][i2][i3] (i3 fastest),
/// dimensions (n1, n2, n3), each a power of two. Same kernel/normalization
/// conventions as the 1-D transform.
void fft3(std::vector<std::complex<double>>& data, int n1, int n2, int n3, bool inverse);

}  // namespace windopt

#endif  // WINDOPT_FFT_HPP
