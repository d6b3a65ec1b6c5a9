#pragma once

#include "nfse/geometry.hpp"
#include "nfse/numeric.hpp"

#include <cstddef>
#include <vector>

namespace nfse {

class PolarGrid;

struct Path {
  cdouble gain;
  PolarPoint point;
};

struct PathSet {
  std::vector<Path> paths;

  std::size_t size() const noexcept { return paths.size(); }
};

/// Antenna-domain channel of one user, length M*N.
struct Channel {
  CVector h;
};

inline constexpr double kDefaultMinDistance = 5.0;
inline constexpr double kMaxAbsSineOfAngle = 0.75;

/// Maps two uniforms in [0,1) and a gain onto one path (s = max_abs_sine):
/// sin(theta) = -s + 2 s u_angle, r = r_min + (R_FD - r_min) u_distance.
Path path_from_uniforms(double u_angle, double u_distance, cdouble gain, const ArrayGeometry& geometry,
                        double r_min = kDefaultMinDistance, double max_abs_sine = kMaxAbsSineOfAngle);

/// L independent paths with sin(theta) ~ U[-s, s], r ~ U[r_min, R_FD]
/// and CN(0,1) gains.
PathSet sample_paths(Rng& rng, std::size_t num_paths, const ArrayGeometry& geometry,
                     double r_min = kDefaultMinDistance, double max_abs_sine = kMaxAbsSineOfAngle);

/// L paths placed on distinct grid nodes drawn uniformly from the nodes that
/// satisfy |sin(theta)| <= s and r_min <= r <= R_FD, with CN(0,1) gains.
PathSet sample_grid_paths(Rng& rng, std::size_t num_paths, const ArrayGeometry& geometry, const PolarGrid& grid,
                          double r_min = kDefaultMinDistance, double max_abs_sine = kMaxAbsSineOfAngle);

/// h = sqrt(MN/L) sum_l gain_l exp(-j k0 r_l) g(theta_l, r_l).
Channel synthesize_channel(const ArrayGeometry& geometry, const PathSet& paths);

}  // namespace nfse
