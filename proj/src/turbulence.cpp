#include "windopt/turbulence.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "windopt/fft.hpp"
#include "windopt/rng.hpp"

namespace windopt {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }

void check_grid(const GridSpec& grid) {
  for (int a = 0; a < 3; ++a) {
    if (!is_pow2(grid.n[a]))
      throw std::invalid_argument("grid counts must be powers of two and >= 2");
    if (!(grid.extent[a] > 0.0)) throw std::invalid_argument("grid extents must be positive");
  }
}

// Signed frequency index in standard FFT order; Nyquist mapped to +n/2.
int freq_index(int m, int n) { return (m <= n / 2) ? m : m - n; }

// Nyquist planes are excluded from the resolved band: their conjugate
// partners do not mirror the wavevector sign on that axis, which would break
// the Hermitian symmetry the real synthesis relies on.
bool on_nyquist_plane(int i1, int i2, int i3, const std::array<int, 3>& n) {
  return i1 == n[0] / 2 || i2 == n[1] / 2 || i3 == n[2] / 2;
}

// Isotropic von Karman tensor at wavevector k (real symmetric, rank 2).
void isotropic_tensor(const Vec3& k, const SpectralParams& params, double out[3][3]) {
  const double k2 = dot(k, k);
  const double e = von_karman_energy(std::sqrt(k2), params);
  const double c = e / (4.0 * kPi * k2 * k2);
  const double kv[3] = {k.x, k.y, k.z};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = c * ((i == j ? k2 : 0.0) - kv[i] * kv[j]);
}

// Real PSD Cholesky with zero-pivot tolerance (the isotropic tensor has
// rank 2: the direction along k is annihilated).
void psd_cholesky(const double a[3][3], double scale, double out[3][3]) {
  const double tol = 1e-14 * (1.0 + scale);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = 0.0;
  for (int j = 0; j < 3; ++j) {
    double d = a[j][j];
    for (int m = 0; m < j; ++m) d -= out[j][m] * out[j][m];
    if (d <= tol) continue;
    out[j][j] = std::sqrt(d);
    for (int i = j + 1; i < 3; ++i) {
      double s = a[i][j];
      for (int m = 0; m < j; ++m) s -= out[i][m] * out[j][m];
      out[i][j] = s / out[j][j];
    }
  }
}

}  // namespace

double von_karman_energy(double k, const SpectralParams& params) {
  const double kl = k * params.length_scale;
  const double kl2 = kl * kl;
  return params.energy_coeff * std::pow(params.length_scale, 5.0 / 3.0) * kl2 * kl2 /
         std::pow(1.0 + kl2, 17.0 / 6.0);
}

double eddy_lifetime_beta(double k_mag, const SpectralParams& params) {
  if (params.gamma == 0.0) return 0.0;
  const double kl = k_mag * params.length_scale;
  // Rational fit of [2F1(1/3, 17/6; 4/3; -y)]^(-1/2) with y = (kL)^(-2),
  // constrained to the exact y->0 slope and y->inf constant. Max relative
  // error 4.8e-4 over kL in [1e-4, 1e4].
  const double y = 1.0 / (kl * kl);
  const double p = 2.935054183864916;
  const double q = 2.4836911193016085;
  const double r = 0.8100541838649157;
  const double g = std::pow((1.0 + p * y + q * y * y) / (1.0 + r * y), 1.0 / 6.0);
  return params.gamma * std::pow(kl, -2.0 / 3.0) * g;
}

Mat3c spectral_tensor(const Vec3& k, const SpectralParams& params) {
  Mat3c phi{};
  const double k2 = dot(k, k);
  if (k2 == 0.0) return phi;

  double iso[3][3];
  if (params.gamma == 0.0) {
    isotropic_tensor(k, params, iso);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) phi[i][j] = iso[i][j];
    return phi;
  }

  const double k_mag = std::sqrt(k2);
  const double kperp2 = k.x * k.x + k.y * k.y;

  // Wavevector along the vertical axis: incompressibility zeroes the only
  // component the shear map would act on, so the tensor is isotropic.
  if (kperp2 < 1e-28 * k2) {
    isotropic_tensor(k, params, iso);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) phi[i][j] = iso[i][j];
    return phi;
  }

  const double beta = eddy_lifetime_beta(k_mag, params);
  const double k30 = k.z + beta * k.x;
  const Vec3 k0{k.x, k.y, k30};
  const double k02 = dot(k0, k0);

  double zeta1, zeta2;
  if (std::abs(k.x) < 1e-14 * k_mag) {
    // k1 -> 0 limit of the expressions below (the direct shear forcing of
    // the streamwise component survives; everything else vanishes).
    zeta1 = -beta * k.y * k.y / kperp2;
    zeta2 = 0.0;
  } else {
    const double c1 =
        beta * k.x * k.x * (k02 - 2.0 * k30 * k30 + beta * k.x * k30) / (k2 * kperp2);
    const double c2 = k.y * k02 / std::pow(kperp2, 1.5) *
                      std::atan2(beta * k.x * std::sqrt(kperp2), k02 - k30 * k.x * beta);
    zeta1 = c1 - (k.y / k.x) * c2;
    zeta2 = (k.y / k.x) * c1 + c2;
  }

  // Rapid-distortion map B applied to the isotropic tensor at the initial
  // wavevector k0: Phi = (B C)(B C)^T with C C^T = Phi_iso(k0). The Gram
  // form keeps the result PSD to machine precision.
  isotropic_tensor(k0, params, iso);
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) scale += std::abs(iso[i][i]);
  double c_iso[3][3];
  psd_cholesky(iso, scale, c_iso);

  const double b[3][3] = {{1.0, 0.0, zeta1}, {0.0, 1.0, zeta2}, {0.0, 0.0, k02 / k2}};
  double m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r) s += b[i][r] * c_iso[r][j];
      m[i][j] = s;
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r) s += m[i][r] * m[j][r];
      phi[i][j] = s;
    }
  return phi;
}

Mat3c factorize_spectrum(const Mat3c& phi) {
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) scale += std::norm(phi[i][j]);
  scale = std::sqrt(scale);
  const double tol = 1e-10 * (1.0 + scale);

  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      if (std::abs(phi[i][j] - std::conj(phi[j][i])) > tol)
        throw std::runtime_error("factorize_spectrum: input is not Hermitian");

  // Cholesky with zero-pivot tolerance for the PSD rank-deficient case.
  Mat3c c{};
  for (int j = 0; j < 3; ++j) {
    std::complex<double> diag = phi[j][j];
    for (int m = 0; m < j; ++m) diag -= c[j][m] * std::conj(c[j][m]);
    const double d = diag.real();
    if (d < -tol) throw std::runtime_error("factorize_spectrum: input is indefinite");
    if (d <= tol) {
      // Null direction: by positive semidefiniteness the remaining column
      // entries must vanish as well.
      for (int i = j; i < 3; ++i) c[i][j] = 0.0;
      continue;
    }
    const double root = std::sqrt(d);
    c[j][j] = root;
    for (int i = j + 1; i < 3; ++i) {
      std::complex<double> s = phi[i][j];
      for (int m = 0; m < j; ++m) s -= c[i][m] * std::conj(c[j][m]);
      c[i][j] = s / root;
    }
  }
  return c;
}

TurbulenceBox generate_box(const SpectralParams& params, const GridSpec& grid,
                           std::uint64_t seed) {
  check_grid(grid);
  const int n1 = grid.n[0], n2 = grid.n[1], n3 = grid.n[2];
  const std::size_t total = grid.points();
  const double dk1 = 2.0 * kPi / grid.extent[0];
  const double dk2 = 2.0 * kPi / grid.extent[1];
  const double dk3 = 2.0 * kPi / grid.extent[2];
  const double amplitude = std::sqrt(dk1 * dk2 * dk3);

  const auto idx = [n2, n3](int i1, int i2, int i3) {
    return (static_cast<std::size_t>(i1) * n2 + i2) * n3 + i3;
  };

  // Hermitian-symmetric complex standard normal noise, one stream per
  // (component, canonical mode index). Pairing m <-> (n - m) mod n makes the
  // synthesized field real; self-conjugate modes get real draws. Seeding by
  // mode index (not draw order) keeps the layout platform- and
  // parallelism-independent.
  std::vector<std::complex<double>> noise[3];
  for (auto& c : noise) c.assign(total, {0.0, 0.0});

  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int i3 = 0; i3 < n3; ++i3) {
        const int j1 = (n1 - i1) % n1, j2 = (n2 - i2) % n2, j3 = (n3 - i3) % n3;
        const std::size_t m = idx(i1, i2, i3);
        const std::size_t mc = idx(j1, j2, j3);
        if (m > mc) continue;  // filled by the conjugate partner
        if (m == 0) continue;  // k = 0 carries no fluctuation energy
        if (on_nyquist_plane(i1, i2, i3, grid.n)) continue;
        for (int c = 0; c < 3; ++c) {
          Rng rng(derive_seed(seed, seed_stream::turbulence, c, m));
          if (m == mc) {
            noise[c][m] = {rng.normal(), 0.0};
          } else {
            const double a = rng.normal();
            const double b = rng.normal();
            noise[c][m] = {a * std::numbers::sqrt2 / 2.0, b * std::numbers::sqrt2 / 2.0};
            noise[c][mc] = std::conj(noise[c][m]);
          }
        }
      }

  // Spectral coloring: u_hat(k) = sqrt(dk^3) C(k) xi(k).
  std::vector<std::complex<double>> spectral[3];
  for (auto& c : spectral) c.assign(total, {0.0, 0.0});

  for (int i1 = 0; i1 < n1; ++i1) {
    const double k1 = dk1 * freq_index(i1, n1);
    for (int i2 = 0; i2 < n2; ++i2) {
      const double k2 = dk2 * freq_index(i2, n2);
      for (int i3 = 0; i3 < n3; ++i3) {
        const std::size_t m = idx(i1, i2, i3);
        if (m == 0) continue;
        if (on_nyquist_plane(i1, i2, i3, grid.n)) continue;
        const double k3 = dk3 * freq_index(i3, n3);
        const Mat3c phi = spectral_tensor({k1, k2, k3}, params);
        const Mat3c c = factorize_spectrum(phi);
        for (int i = 0; i < 3; ++i) {
          std::complex<double> s{0.0, 0.0};
          for (int j = 0; j < 3; ++j) s += c[i][j] * noise[j][m];
          spectral[i][m] = amplitude * s;
        }
      }
    }
  }

  TurbulenceBox box;
  box.grid = grid;
  box.params = params;
  box.seed = seed;
  box.field.resize(3 * total);

  for (int comp = 0; comp < 3; ++comp) {
    fft3(spectral[comp], n1, n2, n3, /*inverse=*/true);
    double max_re = 0.0, max_im = 0.0;
    for (const auto& v : spectral[comp]) {
      max_re = std::max(max_re, std::abs(v.real()));
      max_im = std::max(max_im, std::abs(v.imag()));
    }
    if (max_im > 1e-12 * std::max(max_re, 1e-300))
      throw std::runtime_error("generate_box: imaginary residue exceeds tolerance");
    double* out = box.field.data() + static_cast<std::size_t>(comp) * total;
    for (std::size_t m = 0; m < total; ++m) out[m] = spectral[comp][m].real();
  }
  return box;
}

Vec3 InletPlane::sample(double y, double z) const {
  const double fy = y / spacing[0];
  const double fz = z / spacing[1];
  const auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  const int iy = static_cast<int>(std::floor(fy));
  const int iz = static_cast<int>(std::floor(fz));
  const double wy = fy - iy, wz = fz - iz;
  const int y0 = wrap(iy, ny), y1 = wrap(iy + 1, ny);
  const int z0 = wrap(iz, nz), z1 = wrap(iz + 1, nz);
  const Vec3 v00 = at(y0, z0), v01 = at(y0, z1), v10 = at(y1, z0), v11 = at(y1, z1);
  return (1.0 - wy) * ((1.0 - wz) * v00 + wz * v01) + wy * ((1.0 - wz) * v10 + wz * v11);
}

InletPlane slice_inlet(const TurbulenceBox& box, double t, double advection_speed,
                       bool wrap) {
  if (!(advection_speed > 0.0))
    throw std::invalid_argument("slice_inlet: advection speed must be positive");
  const double extent = box.time_extent(advection_speed);
  if (wrap) {
    t = std::fmod(t, extent);
    if (t < 0.0) t += extent;
  } else if (t < 0.0 || t > extent) {
    throw std::out_of_range("slice_inlet: time outside box extent");
  }

  const int n1 = box.grid.n[0];
  const double pos = t / extent * n1;  // fractional plane index
  const int i_lo = static_cast<int>(std::floor(pos)) % n1;
  const int i_hi = (i_lo + 1) % n1;
  const double w = pos - std::floor(pos);

  InletPlane plane;
  plane.ny = box.grid.n[1];
  plane.nz = box.grid.n[2];
  plane.spacing = {box.grid.extent[1] / plane.ny, box.grid.extent[2] / plane.nz};
  plane.data.resize(3 * static_cast<std::size_t>(plane.ny) * plane.nz);

  std::size_t out = 0;
  for (int c = 0; c < 3; ++c)
    for (int iy = 0; iy < plane.ny; ++iy)
      for (int iz = 0; iz < plane.nz; ++iz)
        plane.data[out++] =
            (1.0 - w) * box.at(c, i_lo, iy, iz) + w * box.at(c, i_hi, iy, iz);
  return plane;
}

double resolved_band_variance(const SpectralParams& params, const GridSpec& grid,
                              int component) {
  check_grid(grid);
  if (component < 0 || component > 2) throw std::invalid_argument("component out of range");
  const double dk1 = 2.0 * kPi / grid.extent[0];
  const double dk2 = 2.0 * kPi / grid.extent[1];
  const double dk3 = 2.0 * kPi / grid.extent[2];
  double sum = 0.0;
  for (int i1 = 0; i1 < grid.n[0]; ++i1)
    for (int i2 = 0; i2 < grid.n[1]; ++i2)
      for (int i3 = 0; i3 < grid.n[2]; ++i3) {
        if (i1 == 0 && i2 == 0 && i3 == 0) continue;
        if (on_nyquist_plane(i1, i2, i3, grid.n)) continue;
        const Vec3 k{dk1 * freq_index(i1, grid.n[0]), dk2 * freq_index(i2, grid.n[1]),
                     dk3 * freq_index(i3, grid.n[2])};
        sum += spectral_tensor(k, params)[component][component].real();
      }
  return sum * dk1 * dk2 * dk3;
}

namespace {

template <typename T>
void put(std::ofstream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "box files are little-endian");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::ifstream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("box file truncated");
  return value;
}

constexpr std::uint32_t kBoxMagic = 0x584f4257;  // "WBOX"
constexpr std::uint32_t kBoxVersion = 1;

}  // namespace

void write_box(const TurbulenceBox& box, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open box file for writing: " + path.string());
  put(out, kBoxMagic);
  put(out, kBoxVersion);
  for (int a = 0; a < 3; ++a) put(out, static_cast<std::uint32_t>(box.grid.n[a]));
  for (int a = 0; a < 3; ++a) put(out, box.grid.extent[a]);
  put(out, box.params.energy_coeff);
  put(out, box.params.length_scale);
  put(out, box.params.gamma);
  put(out, box.seed);
  out.write(reinterpret_cast<const char*>(box.field.data()),
            static_cast<std::streamsize>(box.field.size() * sizeof(double)));
  if (!out) throw std::runtime_error("box file write failed: " + path.string());
}

TurbulenceBox read_box(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open box file: " + path.string());
  if (take<std::uint32_t>(in) != kBoxMagic) throw std::runtime_error("not a box file");
  if (take<std::uint32_t>(in) != kBoxVersion)
    throw std::runtime_error("unsupported box file version");
  TurbulenceBox box;
  for (int a = 0; a < 3; ++a) box.grid.n[a] = static_cast<int>(take<std::uint32_t>(in));
  for (int a = 0; a < 3; ++a) box.grid.extent[a] = take<double>(in);
  box.params.energy_coeff = take<double>(in);
  box.params.length_scale = take<double>(in);
  box.params.gamma = take<double>(in);
  box.seed = take<std::uint64_t>(in);
  box.field.resize(3 * box.grid.points());
  in.read(reinterpret_cast<char*>(box.field.data()),
          static_cast<std::streamsize>(box.field.size() * sizeof(double)));
  if (!in) throw std::runtime_error("box file truncated");
  return box;
}

}  // namespace windopt
