#include "nfse/estimators.hpp"

#include "nfse/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nfse {

namespace {

constexpr double kDivergenceRatio = 1e6;
// OMP treats a residual this small relative to ||y|| as exactly zero.
constexpr double kZeroResidual = 1e-13;

void gemv(Backend b, const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y) {
  if (b == Backend::Serial) {
    kernels::serial::gemv(a, x, y);
  } else {
    kernels::gemv(a, x, y);
  }
}

void gemv_adjoint(Backend b, const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y) {
  if (b == Backend::Serial) {
    kernels::serial::gemv_adjoint(a, x, y);
  } else {
    kernels::gemv_adjoint(a, x, y);
  }
}

bool all_zero(std::span<const cdouble> v) {
  return std::ranges::all_of(v, [](const cdouble& z) { return z == cdouble{}; });
}

EstimateResult lift(const Dictionary& dictionary, std::span<const std::size_t> support, std::span<const cdouble> coef) {
  EstimateResult out;
  out.eta_hat.assign(dictionary.G.cols(), cdouble{});
  for (std::size_t k = 0; k < support.size(); ++k) out.eta_hat[support[k]] = coef[k];
  out.h_hat.assign(dictionary.G.rows(), cdouble{});
  kernels::gemv(dictionary.G, out.eta_hat, out.h_hat);
  return out;
}

}  // namespace

void ZalmsConfig::validate() const {
  if (!(step_size > 0.0)) throw Error(ErrorKind::InvalidArgument, "ZalmsConfig: mu must be > 0");
  if (!(attractor_step >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ZalmsConfig: delta must be >= 0");
  if (!(sharpness > 0.0)) throw Error(ErrorKind::InvalidArgument, "ZalmsConfig: alpha must be > 0");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "ZalmsConfig: max_iters must be >= 1");
  if (!(rel_tolerance >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ZalmsConfig: rel_tolerance must be >= 0");
}

ZalmsConfig ZalmsConfig::from_regularization(double step_size, double regularization, double sharpness) {
  ZalmsConfig c;
  c.step_size = step_size;
  c.attractor_step = step_size * regularization / 2.0;
  c.sharpness = sharpness;
  return c;
}

ZalmsConfig ZalmsConfig::for_unit_norm_atoms(double atom_norm) const {
  if (!(atom_norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "for_unit_norm_atoms: atom norm must be > 0");
  ZalmsConfig c = *this;
  c.step_size = step_size * atom_norm * atom_norm;
  c.attractor_step = attractor_step * atom_norm * atom_norm;
  c.sharpness = sharpness / atom_norm;
  return c;
}

CVector attractor_gradient(std::span<const cdouble> eta, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "attractor_gradient: alpha must be > 0");
  CVector g(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double mag = std::abs(eta[i]);
    if (mag > 0.0) g[i] = (alpha * std::exp(-alpha * mag) / mag) * eta[i];
  }
  return g;
}

EstimateResult zalms_iterate(const ComplexMatrix& psi, std::span<const cdouble> y, const ZalmsConfig& cfg,
                             Backend backend) {
  cfg.validate();
  if (y.size() != psi.rows()) throw Error(ErrorKind::InvalidArgument, "pd_zalms: observation length != rows(Psi)");

  const std::size_t t = psi.cols();
  const double mu = cfg.step_size;
  const double delta = cfg.attractor_step;
  const double alpha = cfg.sharpness;
  const double y_norm = norm2(y);
  const double eps = std::numeric_limits<double>::epsilon();

  EstimateResult out;
  out.eta_hat.assign(t, cdouble{});
  CVector fitted(psi.rows());
  CVector err(psi.rows());
  CVector corr(t);
  out.residual_history.reserve(std::min<std::size_t>(cfg.max_iters, 1 << 16));

  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    gemv(backend, psi, out.eta_hat, fitted);
    for (std::size_t i = 0; i < err.size(); ++i) err[i] = y[i] - fitted[i];
    const double e_norm = norm2(err);
    out.residual_history.push_back(e_norm);
    out.iterations_run = k;
    if (!std::isfinite(e_norm) || e_norm > kDivergenceRatio * y_norm) {
      std::ostringstream msg;
      msg << "pd_zalms diverged at iteration " << k << " (||e|| = " << e_norm << ", ||y|| = " << y_norm
          << "); the step size mu = " << mu << " is likely too large for this sensing matrix";
      throw Error(ErrorKind::Divergence, msg.str());
    }

    gemv_adjoint(backend, psi, err, corr);
    double change2 = 0.0;
    double prev2 = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
      const cdouble prev = out.eta_hat[i];
      const double mag = std::abs(prev);
      cdouble next = prev + mu * corr[i];
      if (mag > 0.0) next -= delta * ((alpha * std::exp(-alpha * mag) / mag) * prev);
      change2 += std::norm(next - prev);
      prev2 += std::norm(prev);
      out.eta_hat[i] = next;
    }
    if (std::sqrt(change2) / std::max(std::sqrt(prev2), eps) < cfg.rel_tolerance) break;
  }
  return out;
}

EstimateResult pd_zalms(const MeasurementSet& m, const Dictionary& dictionary, const ZalmsConfig& cfg,
                        Backend backend) {
  if (m.Psi.cols() != dictionary.G.cols()) throw Error(ErrorKind::InvalidArgument, "pd_zalms: Psi/G column mismatch");
  EstimateResult out = zalms_iterate(m.Psi, m.y_tilde, cfg, backend);
  out.h_hat.assign(dictionary.G.rows(), cdouble{});
  gemv(backend, dictionary.G, out.eta_hat, out.h_hat);
  return out;
}

OmpResult omp(std::span<const cdouble> y, const ComplexMatrix& a, std::size_t sparsity) {
  if (sparsity < 1) throw Error(ErrorKind::InvalidArgument, "omp: sparsity must be >= 1");
  if (sparsity > a.rows()) throw Error(ErrorKind::InvalidArgument, "omp: sparsity exceeds the number of observations");
  if (y.size() != a.rows()) throw Error(ErrorKind::InvalidArgument, "omp: observation length != rows(A)");

  OmpResult res;
  if (all_zero(y)) return res;

  std::vector<double> col_norm(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) col_norm[j] = norm2(a.col(j));
  std::vector<bool> used(a.cols(), false);

  const double y_norm = norm2(y);
  CVector r(y.begin(), y.end());
  CVector corr(a.cols());
  for (std::size_t it = 0; it < sparsity; ++it) {
    if (norm2(r) <= kZeroResidual * y_norm) break;
    kernels::gemv_adjoint(a, r, corr);
    std::size_t best = a.cols();
    double best_score = -1.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (used[j] || col_norm[j] == 0.0) continue;
      const double score = std::abs(corr[j]) / col_norm[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best == a.cols()) break;
    used[best] = true;
    res.support.push_back(best);

    const ComplexMatrix sub = a.select_columns(res.support);
    res.coefficients = ls_solve(sub, y);
    CVector fit(a.rows());
    kernels::serial::gemv(sub, res.coefficients, fit);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - fit[i];
    res.residual_norms.push_back(norm2(r));
  }
  return res;
}

EstimateResult pd_omp(const MeasurementSet& m, const Dictionary& dictionary, std::size_t sparsity) {
  if (m.Psi.cols() != dictionary.G.cols()) throw Error(ErrorKind::InvalidArgument, "pd_omp: Psi/G column mismatch");
  const OmpResult r = omp(m.y_tilde, m.Psi, sparsity);
  EstimateResult out = lift(dictionary, r.support, r.coefficients);
  out.iterations_run = r.support.size();
  out.residual_history = r.residual_norms;
  return out;
}

EstimateResult mad_omp(std::span<const cdouble> y_tilde, const SamplingMatrix& sampling,
                       const std::vector<ComplexMatrix>& angular, std::size_t sparsity) {
  const std::size_t m_count = sampling.num_subarrays();
  const std::size_t n = sampling.antennas_per_subarray();
  const std::size_t q = sampling.pilot_length();
  if (angular.size() != m_count) throw Error(ErrorKind::InvalidArgument, "mad_omp: need one angular block per subarray");
  if (y_tilde.size() != m_count * q) throw Error(ErrorKind::InvalidArgument, "mad_omp: observation length != MQ");
  const std::size_t t = angular.front().cols();

  EstimateResult out;
  out.eta_hat.assign(m_count * t, cdouble{});
  out.h_hat.assign(m_count * n, cdouble{});
  for (std::size_t m = 0; m < m_count; ++m) {
    const ComplexMatrix& a = angular[m];
    if (a.rows() != n || a.cols() != t) throw Error(ErrorKind::InvalidArgument, "mad_omp: angular block shape");
    const ComplexMatrix sensing = adjoint_multiply(sampling.blocks[m], a);
    const auto ym = y_tilde.subspan(m * q, q);
    const OmpResult r = omp(ym, sensing, sparsity);
    for (std::size_t k = 0; k < r.support.size(); ++k) out.eta_hat[m * t + r.support[k]] = r.coefficients[k];
    std::span<cdouble> hm(out.h_hat.data() + m * n, n);
    kernels::serial::gemv(a, std::span<const cdouble>(out.eta_hat.data() + m * t, t), hm);
    out.iterations_run += r.support.size();
    out.residual_history.insert(out.residual_history.end(), r.residual_norms.begin(), r.residual_norms.end());
  }
  return out;
}

EstimateResult oracle_ls(const MeasurementSet& m, const Dictionary& dictionary, const PathSet& true_paths) {
  if (true_paths.paths.empty()) throw Error(ErrorKind::InvalidArgument, "oracle_ls: empty path set");
  if (m.Psi.cols() != dictionary.G.cols()) throw Error(ErrorKind::InvalidArgument, "oracle_ls: Psi/G column mismatch");

  std::vector<std::size_t> support;
  for (const auto& p : true_paths.paths) support.push_back(nearest_grid_index(dictionary.grid, p.point));
  std::ranges::sort(support);
  support.erase(std::unique(support.begin(), support.end()), support.end());

  if (all_zero(m.y_tilde)) {
    EstimateResult out = lift(dictionary, {}, {});
    return out;
  }
  if (support.size() > m.Psi.rows()) {
    throw Error(ErrorKind::RankDeficient, "oracle_ls: support larger than the number of observations");
  }
  const CVector coef = ls_solve(m.Psi.select_columns(support), m.y_tilde);
  EstimateResult out = lift(dictionary, support, coef);
  out.iterations_run = 1;
  CVector fit(m.Psi.rows());
  kernels::serial::gemv(m.Psi, out.eta_hat, fit);
  for (std::size_t i = 0; i < fit.size(); ++i) fit[i] = m.y_tilde[i] - fit[i];
  out.residual_history.push_back(norm2(fit));
  return out;
}

}  // namespace nfse
