#pragma once

#include "nfse/numeric.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nfse {

/// Angle and range of a point seen from the array center.
/// The angle is measured from broadside; endfire (|angle| = pi/2) is
/// accepted because the sine-uniform angle grid starts at sin = -1.
struct PolarPoint {
  double angle = 0.0;     // radians
  double distance = 1.0;  // meters

  void validate() const;
};

/// Uniform linear array split into M subarrays of N antennas along z.
/// Antenna order is subarray-major (m outer, n inner). Coordinates are
/// the raw offsets m*D + n*d translated so the array is symmetric about 0.
class ArrayGeometry {
 public:
  /// Throws OverlappingSubarrays when D < N*d, InvalidArgument on any other
  /// violated precondition.
  static ArrayGeometry build(std::size_t num_subarrays, std::size_t antennas_per_subarray, double antenna_spacing,
                             double subarray_spacing, double wavelength);

  std::size_t num_subarrays() const noexcept { return m_; }
  std::size_t antennas_per_subarray() const noexcept { return n_; }
  std::size_t num_antennas() const noexcept { return m_ * n_; }
  double antenna_spacing() const noexcept { return d_; }
  double subarray_spacing() const noexcept { return big_d_; }
  double wavelength() const noexcept { return lambda_; }
  double wavenumber() const noexcept;

  std::span<const double> antenna_coords() const noexcept { return coords_; }
  /// Coordinates of subarray m's antennas relative to that subarray's center.
  std::vector<double> local_coords() const;
  /// M * D, the aperture convention used for the Fraunhofer distance.
  double aperture() const noexcept { return static_cast<double>(m_) * big_d_; }

 private:
  ArrayGeometry() = default;

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  double d_ = 0.0;
  double big_d_ = 0.0;
  double lambda_ = 0.0;
  std::vector<double> coords_;
};

/// Distance from p to the antenna at coordinate z:
/// sqrt(r^2 - 2 r z sin(theta) + z^2).
double element_distance(const PolarPoint& p, double z);

/// Near-field array response: entry k is exp(-j k0 (r_k - r)) / sqrt(MN)
/// for the k-th antenna coordinate.
CVector array_response(const ArrayGeometry& g, const PolarPoint& p);
/// Writes the response into `out` (length MN) without allocating.
void array_response(const ArrayGeometry& g, const PolarPoint& p, std::span<cdouble> out);

/// 2 (M D)^2 / lambda.
double fraunhofer_distance(const ArrayGeometry& g);

}  // namespace nfse
