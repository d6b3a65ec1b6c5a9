#include "nfse/estimators.hpp"
#include "nfse/harness.hpp"
#include "nfse/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <set>

using namespace nfse;

namespace {

ArrayGeometry table3() { return ArrayGeometry::build(8, 32, 1.5e-3, 0.072, 3e-3); }

const Dictionary& default_dictionary() {
  static const Dictionary dict = [] {
    const auto g = table3();
    return build_polar_dictionary(g, PolarGrid::build(g, 32, UniformDistances::standard(g)));
  }();
  return dict;
}

ComplexMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix a(rows, cols);
  const auto v = complex_gaussian(rng, rows * cols, 1.0);
  std::copy(v.begin(), v.end(), a.data());
  return a;
}

CVector times(const ComplexMatrix& a, std::span<const cdouble> x) {
  CVector y(a.rows());
  kernels::serial::gemv(a, x, y);
  return y;
}

double rel_err(std::span<const cdouble> a, std::span<const cdouble> b) {
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += std::norm(a[i] - b[i]);
  return std::sqrt(num) / norm2(b);
}

bool bit_equal(const CVector& a, const CVector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cdouble)) == 0;
}

struct Scene {
  PathSet paths;
  Channel h;
  SamplingMatrix w;
  MeasurementSet ms;
};

Scene grid_scene(std::uint64_t seed, std::size_t num_paths, double snr, std::size_t q = 15) {
  const auto g = table3();
  const auto& dict = default_dictionary();
  Rng rng(seed);
  Scene s;
  s.paths = sample_grid_paths(rng, num_paths, g, dict.grid);
  s.h = synthesize_channel(g, s.paths);
  s.w = build_sampling_matrix(rng, g, q);
  s.ms = measure(rng, s.h, s.w, dict, snr);
  return s;
}

}  // namespace

TEST_CASE("attractor gradient examples") {
  const CVector zero(5);
  for (const auto& v : attractor_gradient(zero, 25.0)) CHECK(v == cdouble{});

  const CVector one{cdouble(0.1)};
  CHECK(attractor_gradient(one, 25.0)[0].real() == doctest::Approx(25.0 * std::exp(-2.5)).epsilon(1e-14));
  CHECK(attractor_gradient(one, 25.0)[0].real() == doctest::Approx(2.0521).epsilon(1e-4));

  Rng rng(139);
  const auto eta = complex_gaussian(rng, 1000, 0.01);
  const auto grad = attractor_gradient(eta, 25.0);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    CHECK(std::abs(grad[i]) <= 25.0);
    // Points along the coefficient's phase.
    CHECK(std::real(grad[i] * std::conj(eta[i])) >= 0.0);
  }
}

TEST_CASE("attractor gradient matches finite differences of the surrogate") {
  const double alpha = 25.0;
  auto f = [alpha](double x) { return 1.0 - std::exp(-alpha * std::abs(x)); };
  Rng rng(149);
  for (int i = 0; i < 100; ++i) {
    double x = rng.uniform(0.01, 0.5);
    if (rng.uniform() < 0.5) x = -x;
    const double h = 1e-7;
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    const CVector eta{cdouble(x)};
    CHECK(std::abs(attractor_gradient(eta, alpha)[0].real() - fd) < 1e-6);
  }
}

TEST_CASE("attractor step shrinks a coefficient without crossing zero") {
  const double alpha = 25.0;
  Rng rng(151);
  for (int i = 0; i < 200; ++i) {
    const double delta = rng.uniform(1e-5, 1e-3);
    const double mag = rng.uniform(delta * alpha * 1.01, 1.0);
    const cdouble eta = std::polar(mag, rng.uniform(-3.0, 3.0));
    const CVector v{eta};
    const cdouble next = eta - delta * attractor_gradient(v, alpha)[0];
    CHECK(std::abs(next) < mag);
    CHECK(std::real(next * std::conj(eta)) > 0.0);
  }
}

TEST_CASE("first PD-ZALMS iterate is mu Psi^H y") {
  Rng rng(157);
  const auto psi = random_matrix(rng, 12, 40);
  const auto y = complex_gaussian(rng, 12, 1.0);
  ZalmsConfig cfg;
  cfg.step_size = 1e-3;
  cfg.max_iters = 1;
  const auto r = zalms_iterate(psi, y, cfg, Backend::Serial);
  CVector expected(40);
  kernels::serial::gemv_adjoint(psi, y, expected);
  for (auto& v : expected) v *= cfg.step_size;
  CHECK(bit_equal(r.eta_hat, expected));
  CHECK(r.iterations_run == 1);
}

TEST_CASE("PD-ZALMS with delta = 0 is plain LMS") {
  Rng rng(163);
  const auto psi = random_matrix(rng, 10, 30);
  const auto y = complex_gaussian(rng, 10, 1.0);
  ZalmsConfig cfg;
  cfg.step_size = 5e-3;
  cfg.attractor_step = 0.0;
  cfg.max_iters = 25;
  cfg.rel_tolerance = 0.0;
  const auto r = zalms_iterate(psi, y, cfg, Backend::Serial);

  CVector eta(30), fit(10), err(10), corr(30);
  for (int k = 0; k < 25; ++k) {
    kernels::serial::gemv(psi, eta, fit);
    for (std::size_t i = 0; i < 10; ++i) err[i] = y[i] - fit[i];
    kernels::serial::gemv_adjoint(psi, err, corr);
    for (std::size_t i = 0; i < 30; ++i) eta[i] = eta[i] + cfg.step_size * corr[i];
  }
  CHECK(bit_equal(r.eta_hat, eta));
}

TEST_CASE("PD-ZALMS with delta = 0 converges to least squares") {
  Rng rng(167);
  const auto psi = random_matrix(rng, 8, 3);
  const auto x0 = complex_gaussian(rng, 3, 1.0);
  const auto y = times(psi, x0);
  const auto ls = ls_solve(psi, y);

  double frob2 = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) frob2 += std::norm(psi.data()[k]);
  ZalmsConfig cfg;
  cfg.step_size = 1.0 / frob2;
  cfg.attractor_step = 0.0;
  cfg.max_iters = 200000;
  cfg.rel_tolerance = 1e-15;
  const auto r = zalms_iterate(psi, y, cfg);
  CHECK(rel_err(r.eta_hat, ls) < 1e-6);
}

TEST_CASE("PD-ZALMS keeps a zero observation at zero") {
  Rng rng(173);
  const auto psi = random_matrix(rng, 6, 20);
  const CVector y(6);
  ZalmsConfig cfg;
  cfg.max_iters = 50;
  const auto r = zalms_iterate(psi, y, cfg);
  for (const auto& v : r.eta_hat) CHECK(v == cdouble{});
}

TEST_CASE("PD-ZALMS reports divergence") {
  Rng rng(179);
  const auto psi = random_matrix(rng, 6, 20);
  const auto y = complex_gaussian(rng, 6, 1.0);
  ZalmsConfig cfg;
  cfg.step_size = 10.0;
  cfg.max_iters = 1000;
  try {
    zalms_iterate(psi, y, cfg);
    FAIL("expected Divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
  }
}

TEST_CASE("PD-ZALMS serial and parallel backends agree bit for bit") {
  const auto s = grid_scene(181, 4, db_to_linear(20.0));
  ExperimentConfig defaults;
  auto cfg = defaults.effective_zalms();
  cfg.max_iters = 200;
  const auto& dict = default_dictionary();
  for (int threads : {1, 2, 4}) {
    kernels::set_threads(threads);
    const auto ser = pd_zalms(s.ms, dict, cfg, Backend::Serial);
    const auto par = pd_zalms(s.ms, dict, cfg, Backend::Parallel);
    CHECK(bit_equal(ser.eta_hat, par.eta_hat));
    CHECK(bit_equal(ser.h_hat, par.h_hat));
    CHECK(ser.residual_history == par.residual_history);
  }
  kernels::set_threads(kernels::max_threads());
}

TEST_CASE("unit-atom reparametrization reproduces the unnormalized iteration") {
  Rng rng(191);
  auto psi = random_matrix(rng, 12, 50);
  for (std::size_t j = 0; j < psi.cols(); ++j) {
    const double n = norm2(psi.col(j));
    for (auto& v : psi.col(j)) v /= n;
  }
  const auto y = complex_gaussian(rng, 12, 1.0);
  const double s = 16.0;
  ComplexMatrix scaled = psi;
  for (std::size_t k = 0; k < scaled.size(); ++k) scaled.data()[k] *= s;

  ZalmsConfig raw;
  raw.step_size = 6e-5;
  raw.attractor_step = 5e-5;
  raw.sharpness = 25.0;
  raw.max_iters = 300;
  raw.rel_tolerance = 0.0;
  const auto a = zalms_iterate(scaled, y, raw);
  const auto b = zalms_iterate(psi, y, raw.for_unit_norm_atoms(s));
  CVector a_scaled(a.eta_hat);
  for (auto& v : a_scaled) v *= s;
  CHECK(rel_err(b.eta_hat, a_scaled) < 1e-10);
  for (std::size_t k = 0; k < a.residual_history.size(); ++k)
    CHECK(b.residual_history[k] == doctest::Approx(a.residual_history[k]).epsilon(1e-10));
}

TEST_CASE("from_regularization halves mu times delta'") {
  const auto c = ZalmsConfig::from_regularization(2e-3, 0.5, 10.0);
  CHECK(c.step_size == 2e-3);
  CHECK(c.attractor_step == doctest::Approx(5e-4));
  CHECK(c.sharpness == 10.0);
}

TEST_CASE("OMP on the identity") {
  const CVector y{0.0, 3.0, 0.0};
  const auto r = omp(y, ComplexMatrix::identity(3), 1);
  REQUIRE(r.support.size() == 1);
  CHECK(r.support[0] == 1);
  CHECK(std::abs(r.coefficients[0] - cdouble(3.0)) < 1e-14);
}

TEST_CASE("OMP recovers a 2-sparse vector on a low-coherence dictionary") {
  // [I_8 | H_8 / sqrt(8)]: coherence 1/sqrt(8) < 1/3.
  ComplexMatrix a(8, 16);
  for (std::size_t i = 0; i < 8; ++i) {
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < 8; ++j) {
      const int parity = __builtin_popcount(static_cast<unsigned>(i & j)) & 1;
      a(i, 8 + j) = (parity ? -1.0 : 1.0) / std::sqrt(8.0);
    }
  }
  Rng rng(193);
  for (int rep = 0; rep < 50; ++rep) {
    const auto i0 = rng.index(16);
    auto i1 = rng.index(16);
    while (i1 == i0) i1 = rng.index(16);
    CVector x(16);
    x[i0] = std::polar(rng.uniform(0.5, 2.0), rng.uniform(-3.0, 3.0));
    x[i1] = std::polar(rng.uniform(0.5, 2.0), rng.uniform(-3.0, 3.0));
    const auto r = omp(times(a, x), a, 2);
    REQUIRE(r.support.size() == 2);
    CHECK(std::set<std::size_t>(r.support.begin(), r.support.end()) == std::set<std::size_t>{i0, i1});
  }
}

TEST_CASE("OMP with K = rows on a square matrix solves exactly") {
  Rng rng(197);
  const auto a = random_matrix(rng, 6, 6);
  const auto y = complex_gaussian(rng, 6, 1.0);
  const auto r = omp(y, a, 6);
  CHECK(r.residual_norms.back() < 1e-10 * norm2(y));
}

TEST_CASE("OMP never repeats a column") {
  Rng rng(199);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_matrix(rng, 20, 60);
    const auto y = complex_gaussian(rng, 20, 1.0);
    const auto r = omp(y, a, 8);
    CHECK(r.support.size() == 8);
    CHECK(std::set<std::size_t>(r.support.begin(), r.support.end()).size() == 8);
  }
}

TEST_CASE("PD-OMP recovers a noiseless on-grid path exactly") {
  const auto s = grid_scene(211, 1, std::numeric_limits<double>::infinity());
  const auto est = pd_omp(s.ms, default_dictionary(), 1);
  CHECK(nmse(s.h, est.h_hat) < 1e-20);
}

TEST_CASE("estimators return h_hat = G eta_hat") {
  const auto s = grid_scene(223, 4, db_to_linear(10.0));
  const auto& dict = default_dictionary();
  ExperimentConfig defaults;
  auto zcfg = defaults.effective_zalms();
  zcfg.max_iters = 100;
  for (const auto& est : {pd_omp(s.ms, dict, 4), oracle_ls(s.ms, dict, s.paths), pd_zalms(s.ms, dict, zcfg)}) {
    const auto recomputed = times(dict.G, est.eta_hat);
    double worst = 0.0;
    for (std::size_t i = 0; i < recomputed.size(); ++i) worst = std::max(worst, std::abs(recomputed[i] - est.h_hat[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("zero observation gives zero estimates") {
  const auto g = table3();
  const auto& dict = default_dictionary();
  auto s = grid_scene(227, 4, db_to_linear(10.0));
  std::fill(s.ms.y_tilde.begin(), s.ms.y_tilde.end(), cdouble{});
  const auto angular = build_angular_dictionary(g, 32);
  for (const auto& est : {pd_omp(s.ms, dict, 4), oracle_ls(s.ms, dict, s.paths), mad_omp(s.ms.y_tilde, s.w, angular, 4)}) {
    for (const auto& v : est.h_hat) CHECK(v == cdouble{});
  }
}

TEST_CASE("PD-OMP beats MAD-OMP at 30 dB on the same trials") {
  const auto g = table3();
  const auto angular = build_angular_dictionary(g, 32);
  double pd = 0.0, mad = 0.0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    const auto s = grid_scene(1000 + t, 4, db_to_linear(30.0));
    pd += nmse(s.h, pd_omp(s.ms, default_dictionary(), 4).h_hat);
    mad += nmse(s.h, mad_omp(s.ms.y_tilde, s.w, angular, 4).h_hat);
  }
  CHECK(pd < mad);
}

TEST_CASE("MAD-OMP recovers a far-field channel on an angular node") {
  const auto g = table3();
  const auto& dict = default_dictionary();
  const auto angular = build_angular_dictionary(g, 32);
  Rng rng(229);
  for (std::size_t t : {5u, 16u, 23u}) {
    const PolarPoint p{std::asin((2.0 * static_cast<double>(t) - 32.0) / 32.0), 1e6};
    const auto h = synthesize_channel(g, PathSet{{Path{cdouble(0.8, 0.6), p}}});
    const auto w = build_sampling_matrix(rng, g, 15);
    const auto ms = measure(rng, h, w, dict, std::numeric_limits<double>::infinity());
    const auto est = mad_omp(ms.y_tilde, w, angular, 1);
    for (std::size_t m = 0; m < 8; ++m) {
      double num = 0.0, den = 0.0;
      for (std::size_t n = 0; n < 32; ++n) {
        num += std::norm(h.h[m * 32 + n] - est.h_hat[m * 32 + n]);
        den += std::norm(h.h[m * 32 + n]);
      }
      CHECK(num / den < 1e-6);
    }
  }
}

TEST_CASE("MAD-OMP trails PD-OMP for channels at 5 m") {
  const auto g = table3();
  const auto& dict = default_dictionary();
  const auto angular = build_angular_dictionary(g, 32);
  Rng rng(233);
  double pd = 0.0, mad = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    PathSet set;
    std::set<std::size_t> used;
    while (set.size() < 4) {
      const std::size_t t = 8 + rng.index(17);  // |sin| <= 0.5
      if (!used.insert(t).second) continue;
      set.paths.push_back(Path{complex_gaussian(rng, 1, 1.0)[0], dict.grid.node(dict.grid.column_index(t, 0))});
    }
    const auto h = synthesize_channel(g, set);
    const auto w = build_sampling_matrix(rng, g, 15);
    const auto ms = measure(rng, h, w, dict, db_to_linear(15.0));
    pd += nmse(h, pd_omp(ms, dict, 4).h_hat);
    mad += nmse(h, mad_omp(ms.y_tilde, w, angular, 4).h_hat);
  }
  CHECK(mad > pd);
}

TEST_CASE("oracle LS is exact for noiseless on-grid paths") {
  for (std::uint64_t seed : {239u, 241u, 251u}) {
    const auto s = grid_scene(seed, 4, std::numeric_limits<double>::infinity());
    CHECK(nmse(s.h, oracle_ls(s.ms, default_dictionary(), s.paths).h_hat) < 1e-20);
  }
}

TEST_CASE("oracle LS merges paths that share a grid node") {
  auto s = grid_scene(257, 3, db_to_linear(20.0));
  PathSet dup = s.paths;
  dup.paths[2].point = dup.paths[0].point;
  dup.paths[2].point.distance += 0.5;
  const auto est = oracle_ls(s.ms, default_dictionary(), dup);
  std::size_t nonzero = 0;
  for (const auto& v : est.eta_hat) nonzero += v != cdouble{};
  CHECK(nonzero == 2);
}

TEST_CASE("oracle LS under heavy noise stays finite") {
  const auto s = grid_scene(263, 4, db_to_linear(-30.0));
  const double e = nmse(s.h, oracle_ls(s.ms, default_dictionary(), s.paths).h_hat);
  CHECK(std::isfinite(e));
  CHECK(e > 0.0);
}
