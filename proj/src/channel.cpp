#include "nfse/channel.hpp"

#include "nfse/dictionary.hpp"

#include <cmath>

namespace nfse {

namespace {

void check_range(const ArrayGeometry& geometry, double r_min) {
  const double rfd = fraunhofer_distance(geometry);
  if (!(r_min > 0.0) || !(r_min < rfd)) {
    throw Error(ErrorKind::InvalidRange, "path sampling: need 0 < r_min < Fraunhofer distance (" +
                                             std::to_string(rfd) + " m), got r_min = " + std::to_string(r_min));
  }
}

}  // namespace

Path path_from_uniforms(double u_angle, double u_distance, cdouble gain, const ArrayGeometry& geometry, double r_min,
                        double max_abs_sine) {
  check_range(geometry, r_min);
  if (!(max_abs_sine > 0.0 && max_abs_sine <= 1.0)) {
    throw Error(ErrorKind::InvalidRange, "path sampling: max |sin(theta)| must be in (0, 1]");
  }
  const double rfd = fraunhofer_distance(geometry);
  const double s = -max_abs_sine + 2.0 * max_abs_sine * u_angle;
  const double r = r_min + (rfd - r_min) * u_distance;
  return Path{gain, PolarPoint{std::asin(s), r}};
}

PathSet sample_paths(Rng& rng, std::size_t num_paths, const ArrayGeometry& geometry, double r_min,
                     double max_abs_sine) {
  if (num_paths == 0) throw Error(ErrorKind::InvalidArgument, "sample_paths: L must be >= 1");
  check_range(geometry, r_min);
  PathSet set;
  set.paths.reserve(num_paths);
  for (std::size_t l = 0; l < num_paths; ++l) {
    const double ua = rng.uniform();
    const double ur = rng.uniform();
    const cdouble gain = complex_gaussian(rng, 1, 1.0).front();
    set.paths.push_back(path_from_uniforms(ua, ur, gain, geometry, r_min, max_abs_sine));
  }
  return set;
}

PathSet sample_grid_paths(Rng& rng, std::size_t num_paths, const ArrayGeometry& geometry, const PolarGrid& grid,
                          double r_min, double max_abs_sine) {
  if (num_paths == 0) throw Error(ErrorKind::InvalidArgument, "sample_grid_paths: L must be >= 1");
  check_range(geometry, r_min);
  const double rfd = fraunhofer_distance(geometry);
  std::vector<std::size_t> eligible;
  for (std::size_t col = 0; col < grid.num_columns(); ++col) {
    const PolarPoint p = grid.node(col);
    if (std::abs(std::sin(p.angle)) <= max_abs_sine + 1e-12 && p.distance >= r_min && p.distance <= rfd) {
      eligible.push_back(col);
    }
  }
  if (eligible.size() < num_paths) {
    throw Error(ErrorKind::InvalidRange, "sample_grid_paths: grid has fewer eligible nodes than requested paths");
  }
  PathSet set;
  set.paths.reserve(num_paths);
  // Partial Fisher-Yates: the first L entries become a uniform draw without
  // replacement.
  for (std::size_t l = 0; l < num_paths; ++l) {
    const std::size_t pick = l + rng.index(eligible.size() - l);
    std::swap(eligible[l], eligible[pick]);
    const cdouble gain = complex_gaussian(rng, 1, 1.0).front();
    set.paths.push_back(Path{gain, grid.node(eligible[l])});
  }
  return set;
}

Channel synthesize_channel(const ArrayGeometry& geometry, const PathSet& paths) {
  if (paths.paths.empty()) throw Error(ErrorKind::InvalidArgument, "synthesize_channel: empty path set");
  const std::size_t mn = geometry.num_antennas();
  const double scale = std::sqrt(static_cast<double>(mn) / static_cast<double>(paths.size()));
  const double k0 = geometry.wavenumber();
  Channel ch{CVector(mn)};
  CVector g(mn);
  for (const auto& path : paths.paths) {
    array_response(geometry, path.point, g);
    const cdouble w = scale * path.gain * std::polar(1.0, -k0 * path.point.distance);
    for (std::size_t k = 0; k < mn; ++k) ch.h[k] += w * g[k];
  }
  return ch;
}

}  // namespace nfse
