#pragma once

// Self-check suites run by `qtl verify`. Each suite reports its worst
// residual against a fixed threshold.

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "qtl/bases.hpp"
#include "qtl/channels.hpp"
#include "qtl/metrics.hpp"
#include "qtl/optimizer.hpp"
#include "qtl/states.hpp"
#include "qtl/tensor.hpp"

namespace qtl {

enum class VerifyLevel { quick, full };

struct SuiteResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

/// Replaceable building blocks, so a test can inject a broken operator and
/// watch the suites catch it.
struct VerifyHooks {
  std::function<ComplexMatrix(int)> weyl_g = [](int n) { return qtl::weyl_g(n); };
  std::function<ComplexMatrix(int)> weyl_h = [](int n) { return qtl::weyl_h(n); };
};

namespace detail {

inline ComplexMatrix power(const ComplexMatrix& m, int k) {
  ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = m * out;
  return out;
}

template <class F>
SuiteResult run_suite(const std::string& name, double threshold, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = name;
  r.threshold = threshold;
  try {
    r.residual = body();
    r.passed = r.residual < threshold;
  } catch (const std::exception&) {
    r.residual = std::numeric_limits<double>::infinity();
    r.passed = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// Weyl operators built from the hooked h and g: tr(U_a^dagger U_b) = n delta_ab,
/// plus the defining spectrum g = diag(w^j) with w = exp(-2 pi i / n).
inline double weyl_suite(const VerifyHooks& hooks, const std::vector<int>& dims) {
  double worst = 0.0;
  for (int n : dims) {
    const ComplexMatrix h = hooks.weyl_h(n);
    const ComplexMatrix g = hooks.weyl_g(n);
    for (int j = 0; j < n; ++j) {
      const double angle = -2.0 * M_PI * j / n;
      worst = std::max(worst, std::abs(g(j, j) - Complex(std::cos(angle), std::sin(angle))));
    }
    std::vector<ComplexMatrix> ops;
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) ops.push_back(detail::power(h, t) * detail::power(g, s));
    }
    for (std::size_t a = 0; a < ops.size(); ++a) {
      for (std::size_t b = 0; b < ops.size(); ++b) {
        const Complex tr = (ops[a].adjoint() * ops[b]).trace();
        worst = std::max(worst, std::abs(tr - (a == b ? Complex(n) : Complex(0.0))));
      }
    }
  }
  return worst;
}

inline double bell_ghz_suite(const std::vector<int>& dims) {
  double worst = 0.0;
  for (int n : dims) {
    const Index d2 = static_cast<Index>(n) * n;
    ComplexMatrix bell(d2, d2);
    for (const auto& idx : WeylIndex::all(n)) bell.col(idx.flat()) = bell_state(idx).amplitudes();
    worst = std::max(worst, (bell.adjoint() * bell - ComplexMatrix::Identity(d2, d2)).cwiseAbs().maxCoeff());
    const Index d3 = d2 * n;
    ComplexMatrix ghz(d3, d3);
    for (const auto& idx : GhzIndex::all(n)) ghz.col(idx.flat()) = ghz_state(idx).amplitudes();
    worst = std::max(worst, (ghz.adjoint() * ghz - ComplexMatrix::Identity(d3, d3)).cwiseAbs().maxCoeff());
    for (const auto& idx : GhzIndex::all(n)) {
      const ComplexMatrix ud = utilde_adjoint(idx);
      worst = std::max(worst, (ud.adjoint() * ud - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

inline double depolarizing_suite(const std::vector<int>& dims, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n : dims) {
    const Index d2 = static_cast<Index>(n) * n;
    for (int k = 0; k < samples; ++k) {
      const ComplexMatrix a = ginibre(n, n, rng);
      ComplexMatrix sum = ComplexMatrix::Zero(n, n);
      for (const auto& idx : WeylIndex::all(n)) {
        const ComplexMatrix u = weyl_u(idx);
        sum += u.adjoint() * a * u;
      }
      worst = std::max(worst, (sum - static_cast<double>(n) * a.trace() * ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
      ComplexMatrix ghz_sum = ComplexMatrix::Zero(d2, d2);
      for (const auto& idx : GhzIndex::all(n)) ghz_sum += utilde_adjoint(idx) * a * utilde(idx);
      worst = std::max(worst,
                       (ghz_sum - static_cast<double>(n) * a.trace() * ComplexMatrix::Identity(d2, d2)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

/// Ideal teleportation, trace preservation for all protocols, and the W = V = I
/// reduction to the one-channel protocol.
inline double channel_suite(const std::vector<int>& dims, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n : dims) {
    const Index d2 = static_cast<Index>(n) * n;
    const DensityMatrix phi = maximally_entangled_state(n);
    for (int k = 0; k < samples; ++k) {
      const DensityMatrix rho = random_density(n, rng);
      const DensityMatrix chi = random_resource(n, rng);
      worst = std::max(worst, (apply_channel(ChannelSpec::two_channel_bell(n), phi, rho).matrix() - rho.matrix()).norm());
      worst = std::max(worst, (apply_channel(ChannelSpec::two_channel_ghz(n), phi, rho).matrix() - rho.matrix()).norm());
      const ComplexMatrix one = apply_channel(ChannelSpec::one_channel(n), chi, rho).matrix();
      const ComplexMatrix two = apply_channel(ChannelSpec::two_channel_bell(n), chi, rho).matrix();
      worst = std::max(worst, (one - two).cwiseAbs().maxCoeff());
      const ComplexMatrix w = haar_unitary(d2, rng);
      const ComplexMatrix v = haar_unitary(d2, rng);
      std::vector<ComplexMatrix> t;
      for (int o = 0; o < n * n * n; ++o) t.push_back(haar_unitary(d2, rng));
      const auto specs = {ChannelSpec::two_channel_bell(n, w, v),
                          ChannelSpec::two_channel_ghz(n, w, CorrectionFamily(Protocol::two_channel_ghz, n, t))};
      for (const auto& spec : specs) {
        const auto kraus = kraus_operators(spec, chi);
        worst = std::max(worst, (kraus_completeness(kraus) - ComplexMatrix::Identity(n, n)).norm());
      }
    }
  }
  return worst;
}

inline double oracle_suite(const std::vector<int>& dims, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n : dims) {
    const Index d2 = static_cast<Index>(n) * n;
    for (int k = 0; k < samples; ++k) {
      const DensityMatrix rho = random_density(n, rng);
      const DensityMatrix chi = random_resource(n, rng);
      const ComplexMatrix w = haar_unitary(d2, rng);
      const ComplexMatrix v = haar_unitary(d2, rng);
      const auto spec = ChannelSpec::two_channel_bell(n, w, v);
      worst = std::max(worst, (apply_channel(spec, chi, rho).matrix() - apply_channel_oracle(spec, chi, rho).matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  }
  return worst;
}

inline double grad_suite(int n, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const DensityMatrix chi = random_resource(n, rng);
  const TwoUnitaryForm form(chi.matrix());
  const Index d2 = static_cast<Index>(n) * n;
  double worst = grad_check(f1_objective(chi.matrix()), samples, seed);
  worst = std::max(worst, grad_check(f2_lower_objective(chi.matrix()), samples, seed + 1));
  worst = std::max(worst, grad_check(form.omega_block(haar_unitary(d2, rng)), samples, seed + 2));
  worst = std::max(worst, grad_check(form.v_block(haar_unitary(d2, rng)), samples, seed + 3));
  return worst;
}

/// Largest entrywise deviation of a Monte-Carlo twirl from the closed form,
/// in units of the per-entry standard error.
inline double mc_twirl_suite(int n, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const Index d2 = static_cast<Index>(n) * n;
  const ComplexMatrix sigma = ginibre(d2, d2, rng);
  const ComplexMatrix exact = schur_twirl(sigma);
  ComplexMatrix mean = ComplexMatrix::Zero(d2, d2);
  Eigen::MatrixXd m2_re = Eigen::MatrixXd::Zero(d2, d2);
  Eigen::MatrixXd m2_im = Eigen::MatrixXd::Zero(d2, d2);
  for (int k = 0; k < samples; ++k) {
    const ComplexMatrix u = haar_unitary(n, rng);
    const ComplexMatrix uu = kron(u, u);
    const ComplexMatrix x = uu.adjoint() * sigma * uu;
    mean += x;
    m2_re += x.real().cwiseAbs2();
    m2_im += x.imag().cwiseAbs2();
  }
  const double s = samples;
  mean /= s;
  double worst = 0.0;
  for (Index i = 0; i < d2; ++i) {
    for (Index j = 0; j < d2; ++j) {
      const double se_re = std::sqrt(std::max(m2_re(i, j) / s - std::pow(mean(i, j).real(), 2), 0.0) / (s - 1.0));
      const double se_im = std::sqrt(std::max(m2_im(i, j) / s - std::pow(mean(i, j).imag(), 2), 0.0) / (s - 1.0));
      const double dr = std::abs(mean(i, j).real() - exact(i, j).real());
      const double di = std::abs(mean(i, j).imag() - exact(i, j).imag());
      worst = std::max(worst, se_re > 0.0 ? dr / se_re : (dr > 1e-12 ? 1e9 : 0.0));
      worst = std::max(worst, se_im > 0.0 ? di / se_im : (di > 1e-12 ? 1e9 : 0.0));
    }
  }
  return worst;
}

inline std::vector<SuiteResult> run_verify(VerifyLevel level, const VerifyHooks& hooks = {}) {
  const bool full = level == VerifyLevel::full;
  const std::vector<int> dims = {2, 3};
  std::vector<SuiteResult> out;
  out.push_back(detail::run_suite("weyl-orthogonality", 1e-12, [&] { return weyl_suite(hooks, dims); }));
  out.push_back(detail::run_suite("bell-ghz-orthonormality", 1e-12, [&] { return bell_ghz_suite(dims); }));
  out.push_back(detail::run_suite("depolarizing-identities", 1e-11,
                                  [&] { return depolarizing_suite(dims, full ? 50 : 10, kDefaultSeed); }));
  out.push_back(detail::run_suite("channels", 1e-10, [&] { return channel_suite(dims, full ? 20 : 4, kDefaultSeed); }));
  out.push_back(detail::run_suite("gradient-check", 1e-5, [&] { return grad_suite(2, full ? 20 : 5, kDefaultSeed); }));
  out.push_back(detail::run_suite("oracle-n2", 1e-9, [&] { return oracle_suite({2}, full ? 20 : 3, kDefaultSeed); }));
  if (full) {
    out.push_back(detail::run_suite("oracle-n3", 1e-9, [&] { return oracle_suite({3}, 2, kDefaultSeed); }));
    out.push_back(detail::run_suite("mc-twirl-sigmas", 3.0, [&] { return mc_twirl_suite(2, 100000, kDefaultSeed); }));
  }
  return out;
}

}  // namespace qtl
