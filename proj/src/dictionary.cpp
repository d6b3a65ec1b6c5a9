#include "nfse/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nfse {

UniformDistances UniformDistances::standard(const ArrayGeometry& geometry) {
  return UniformDistances{5.0, 5.0, fraunhofer_distance(geometry)};
}

PolarGrid PolarGrid::build(const ArrayGeometry& geometry, std::size_t num_angles, const GridMode& mode) {
  if (num_angles < 1) throw Error(ErrorKind::InvalidArgument, "PolarGrid: need at least one angle sample");

  PolarGrid grid;
  grid.mode_ = mode;
  const double t_count = static_cast<double>(num_angles);
  grid.sines_.resize(num_angles);
  grid.angles_.resize(num_angles);
  for (std::size_t t = 0; t < num_angles; ++t) {
    grid.sines_[t] = (2.0 * static_cast<double>(t) - t_count) / t_count;
    grid.angles_[t] = std::asin(grid.sines_[t]);
  }

  if (const auto* beta = std::get_if<BetaRule>(&mode)) {
    if (!(beta->beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "PolarGrid: beta must be > 0");
    if (beta->num_rings == 0) throw Error(ErrorKind::InvalidArgument, "PolarGrid: need at least one distance ring");
    const double a = beta->aperture == ApertureChoice::TotalAperture ? geometry.aperture()
                                                                     : geometry.subarray_spacing();
    const double lambda = geometry.wavelength();
    grid.num_rings_ = beta->num_rings;
    grid.distances_.resize(grid.num_rings_ * num_angles);
    for (std::size_t k = 0; k < grid.num_rings_; ++k) {
      for (std::size_t t = 0; t < num_angles; ++t) {
        const double c2 = 1.0 - grid.sines_[t] * grid.sines_[t];
        const double r = a * a * c2 / (2.0 * beta->beta * beta->beta * lambda * static_cast<double>(k + 1));
        grid.distances_[k * num_angles + t] = std::max(r, lambda);
      }
    }
  } else {
    const auto& u = std::get<UniformDistances>(mode);
    if (!(u.step > 0.0) || !(u.r_min > 0.0) || !(u.r_max >= u.r_min)) {
      throw Error(ErrorKind::InvalidArgument, "PolarGrid: uniform distances need 0 < r_min <= r_max and step > 0");
    }
    std::vector<double> rings;
    for (std::size_t k = 0;; ++k) {
      const double r = u.r_min + static_cast<double>(k) * u.step;
      if (r > u.r_max * (1.0 + 1e-12)) break;
      rings.push_back(r);
    }
    grid.num_rings_ = rings.size();
    grid.distances_.resize(grid.num_rings_ * num_angles);
    for (std::size_t k = 0; k < grid.num_rings_; ++k)
      for (std::size_t t = 0; t < num_angles; ++t) grid.distances_[k * num_angles + t] = rings[k];
  }
  return grid;
}

std::size_t PolarGrid::column_index(std::size_t t, std::size_t k) const {
  if (t >= num_angles() || k >= num_distances()) throw Error(ErrorKind::InvalidArgument, "column_index: out of range");
  return k * num_angles() + t;
}

std::pair<std::size_t, std::size_t> PolarGrid::split(std::size_t column) const {
  if (column >= num_columns()) throw Error(ErrorKind::InvalidArgument, "split: column out of range");
  return {column % num_angles(), column / num_angles()};
}

PolarPoint PolarGrid::node(std::size_t column) const {
  const std::size_t t = split(column).first;
  return PolarPoint{angles_[t], distances_[column]};
}

Dictionary build_polar_dictionary(const ArrayGeometry& geometry, const PolarGrid& grid) {
  Dictionary dict{ComplexMatrix(geometry.num_antennas(), grid.num_columns()), grid};
  const auto ncols = static_cast<std::ptrdiff_t>(grid.num_columns());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < ncols; ++c) {
    const auto col = static_cast<std::size_t>(c);
    array_response(geometry, grid.node(col), dict.G.col(col));
  }
  return dict;
}

std::vector<ComplexMatrix> build_angular_dictionary(const ArrayGeometry& geometry, std::size_t num_angles) {
  if (num_angles < 1) throw Error(ErrorKind::InvalidArgument, "angular dictionary: need at least one angle sample");
  const std::size_t n = geometry.antennas_per_subarray();
  const auto z = geometry.local_coords();
  const double k0 = geometry.wavenumber();
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  const double t_count = static_cast<double>(num_angles);

  ComplexMatrix block(n, num_angles);
  for (std::size_t t = 0; t < num_angles; ++t) {
    const double s = (2.0 * static_cast<double>(t) - t_count) / t_count;
    for (std::size_t i = 0; i < n; ++i) block(i, t) = std::polar(amp, k0 * z[i] * s);
  }
  // Every subarray has the same local layout, so the blocks coincide.
  return std::vector<ComplexMatrix>(geometry.num_subarrays(), block);
}

std::size_t nearest_grid_index(const PolarGrid& grid, const PolarPoint& p) {
  p.validate();
  const double s = std::sin(p.angle);
  std::size_t best_t = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < grid.num_angles(); ++t) {
    const double gap = std::abs(grid.sines()[t] - s);
    if (gap < best) {
      best = gap;
      best_t = t;
    }
  }
  std::size_t best_k = 0;
  best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.num_distances(); ++k) {
    const double gap = std::abs(grid.distance(best_t, k) - p.distance);
    if (gap < best) {
      best = gap;
      best_k = k;
    }
  }
  return grid.column_index(best_t, best_k);
}

}  // namespace nfse
