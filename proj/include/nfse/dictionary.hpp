#pragma once

#include "nfse/geometry.hpp"
#include "nfse/numeric.hpp"

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

namespace nfse {

/// Which length plays the role of the aperture in the distance-ring rule.
enum class ApertureChoice { TotalAperture, SubarraySpacing };

/// Distance rings r(t, k) = A^2 cos^2(theta_t) / (2 beta^2 lambda k),
/// k = 1..num_rings. Rings that collapse at endfire are floored at one
/// wavelength so every node stays in front of the array.
struct BetaRule {
  double beta = 1.2;
  std::size_t num_rings = 1;
  ApertureChoice aperture = ApertureChoice::TotalAperture;
};

/// Angle-independent distances r_min, r_min + step, ... up to r_max.
struct UniformDistances {
  double step = 5.0;
  double r_min = 5.0;
  double r_max = 0.0;

  /// 5 m steps from 5 m to the Fraunhofer distance.
  static UniformDistances standard(const ArrayGeometry& geometry);
};

using GridMode = std::variant<BetaRule, UniformDistances>;

/// Angle-distance sampling grid. Angles follow
/// sin(theta_t) = (2t - T) / T for t = 0..T-1 in both modes.
/// Column index of node (t, k) is k * T + t (distance-block-major).
class PolarGrid {
 public:
  static PolarGrid build(const ArrayGeometry& geometry, std::size_t num_angles, const GridMode& mode);

  std::size_t num_angles() const noexcept { return sines_.size(); }
  std::size_t num_distances() const noexcept { return num_rings_; }
  std::size_t num_columns() const noexcept { return num_angles() * num_distances(); }

  std::span<const double> sines() const noexcept { return sines_; }
  double angle(std::size_t t) const { return angles_.at(t); }
  double distance(std::size_t t, std::size_t k) const { return distances_.at(k * num_angles() + t); }
  const GridMode& mode() const noexcept { return mode_; }

  std::size_t column_index(std::size_t t, std::size_t k) const;
  /// Inverse of column_index: {angle index, distance index}.
  std::pair<std::size_t, std::size_t> split(std::size_t column) const;
  PolarPoint node(std::size_t column) const;

 private:
  PolarGrid() = default;

  std::vector<double> sines_;
  std::vector<double> angles_;
  std::size_t num_rings_ = 0;
  std::vector<double> distances_;  // num_rings_ blocks of num_angles()
  GridMode mode_;
};

struct Dictionary {
  ComplexMatrix G;  // MN x (T_theta * T_r), unit-norm columns
  PolarGrid grid;
};

/// Column k * T + t is array_response(theta_t, r(t, k)).
Dictionary build_polar_dictionary(const ArrayGeometry& geometry, const PolarGrid& grid);

/// One N x T far-field dictionary per subarray, on the subarray's own
/// centered coordinates: entry (n, t) = exp(+j k0 z_n sin(theta_t)) / sqrt(N).
std::vector<ComplexMatrix> build_angular_dictionary(const ArrayGeometry& geometry, std::size_t num_angles);

/// Nearest node, angle first (in sine) then distance within that angle's
/// column; ties go to the smaller index.
std::size_t nearest_grid_index(const PolarGrid& grid, const PolarPoint& p);

}  // namespace nfse
