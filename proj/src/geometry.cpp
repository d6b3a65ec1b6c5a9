#include "nfse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nfse {

void PolarPoint::validate() const {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(angle >= -half_pi && angle <= half_pi)) {
    throw Error(ErrorKind::InvalidArgument, "PolarPoint: angle outside [-pi/2, pi/2]");
  }
  if (!(distance > 0.0) || !std::isfinite(distance)) {
    throw Error(ErrorKind::InvalidArgument, "PolarPoint: distance must be positive and finite");
  }
}

ArrayGeometry ArrayGeometry::build(std::size_t num_subarrays, std::size_t antennas_per_subarray,
                                   double antenna_spacing, double subarray_spacing, double wavelength) {
  if (num_subarrays == 0 || antennas_per_subarray == 0) {
    throw Error(ErrorKind::InvalidArgument, "ArrayGeometry: M and N must be >= 1");
  }
  if (!(antenna_spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "ArrayGeometry: d must be > 0");
  if (!(wavelength > 0.0)) throw Error(ErrorKind::InvalidArgument, "ArrayGeometry: wavelength must be > 0");
  const double min_span = static_cast<double>(antennas_per_subarray) * antenna_spacing;
  // Relative slack so D = N*d computed in floating point is not rejected.
  if (!(subarray_spacing >= min_span * (1.0 - 1e-12))) {
    throw Error(ErrorKind::OverlappingSubarrays, "ArrayGeometry: D = " + std::to_string(subarray_spacing) +
                                                     " is smaller than N*d = " + std::to_string(min_span));
  }

  ArrayGeometry g;
  g.m_ = num_subarrays;
  g.n_ = antennas_per_subarray;
  g.d_ = antenna_spacing;
  g.big_d_ = subarray_spacing;
  g.lambda_ = wavelength;
  g.coords_.reserve(num_subarrays * antennas_per_subarray);
  for (std::size_t m = 0; m < num_subarrays; ++m)
    for (std::size_t n = 0; n < antennas_per_subarray; ++n)
      g.coords_.push_back(static_cast<double>(m) * subarray_spacing + static_cast<double>(n) * antenna_spacing);
  const auto [lo, hi] = std::ranges::minmax(g.coords_);
  const double center = 0.5 * (lo + hi);
  for (auto& z : g.coords_) z -= center;
  return g;
}

double ArrayGeometry::wavenumber() const noexcept { return 2.0 * std::numbers::pi / lambda_; }

std::vector<double> ArrayGeometry::local_coords() const {
  std::vector<double> z(n_);
  const double center = 0.5 * static_cast<double>(n_ - 1) * d_;
  for (std::size_t n = 0; n < n_; ++n) z[n] = static_cast<double>(n) * d_ - center;
  return z;
}

double element_distance(const PolarPoint& p, double z) {
  p.validate();
  const double r = p.distance;
  return std::sqrt(r * r - 2.0 * r * z * std::sin(p.angle) + z * z);
}

void array_response(const ArrayGeometry& g, const PolarPoint& p, std::span<cdouble> out) {
  p.validate();
  const auto coords = g.antenna_coords();
  if (out.size() != coords.size()) throw Error(ErrorKind::InvalidArgument, "array_response: output length != MN");
  const double k0 = g.wavenumber();
  const double amp = 1.0 / std::sqrt(static_cast<double>(coords.size()));
  const double r = p.distance;
  const double s = std::sin(p.angle);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const double z = coords[k];
    // r_k - r rewritten as (z^2 - 2 r z s) / (r_k + r) to avoid cancellation
    // at large r.
    const double rk = std::sqrt(r * r - 2.0 * r * z * s + z * z);
    const double delta = (z * z - 2.0 * r * z * s) / (rk + r);
    const double phase = -k0 * delta;
    out[k] = {amp * std::cos(phase), amp * std::sin(phase)};
  }
}

CVector array_response(const ArrayGeometry& g, const PolarPoint& p) {
  CVector out(g.num_antennas());
  array_response(g, p, out);
  return out;
}

double fraunhofer_distance(const ArrayGeometry& g) {
  const double a = g.aperture();
  return 2.0 * a * a / g.wavelength();
}

}  // namespace nfse
