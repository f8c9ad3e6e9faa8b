#pragma once

// Riemannian conjugate-gradient ascent on U(d).
//
// Conventions. An objective supplies its value and the Euclidean gradient
// Gamma, scaled so that f(U + e D) = f(U) + 2 e Re tr(D^dagger Gamma) + O(e^2).
// The Riemannian gradient is the skew-Hermitian G = Gamma U^dagger - U Gamma^dagger;
// moving along exp(e Z) U changes f at rate <Z, G> = Re tr(Z^dagger G), so the
// rate along G itself is ||G||_F^2.
//
// Iteration: Polak-Ribiere+ directions D_k = G_k + beta_k D_{k-1}, geodesic
// step U <- exp(mu D_k) U. The step starts at initial_step; if it satisfies
// the Armijo condition it is doubled while the doubled step still satisfies
// it and improves on the current one, otherwise it is multiplied by
// armijo_shrink until the condition holds.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "qtl/errors.hpp"
#include "qtl/tensor.hpp"

namespace qtl {

struct Objective {
  Index dim = 0;
  std::function<Complex(const ComplexMatrix&)> value;
  std::function<ComplexMatrix(const ComplexMatrix&)> gradient;
};

struct OptimizerConfig {
  int max_iters = 500;
  double grad_tol = 1e-8;
  int restarts = 10;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double initial_step = 1.0;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;

  void validate() const {
    if (max_iters < 0) throw ValidationError("max_iters", "must be non-negative");
    if (!(grad_tol > 0.0)) throw ValidationError("grad_tol", "must be positive");
    if (restarts < 1) throw ValidationError("restarts", "at least one run is required");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ValidationError("armijo_c", "must lie in (0, 1)");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw ValidationError("armijo_shrink", "must lie in (0, 1)");
    if (!(initial_step > 0.0)) throw ValidationError("initial_step", "must be positive");
  }
};

struct TracePoint {
  double value = 0.0;
  double grad_norm = 0.0;
};

struct RunResult {
  double value = -std::numeric_limits<double>::infinity();
  ComplexMatrix maximizer;
  int iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;  // accepted iterates, starting point first
};

struct OptimizerResult {
  double best_value = -std::numeric_limits<double>::infinity();
  ComplexMatrix maximizer;
  int iterations = 0;  // of the best run
  bool converged = false;
  int best_restart = 0;
  std::vector<std::vector<TracePoint>> traces;
};

inline constexpr double kImaginaryTolerance = 1e-9;
inline constexpr double kIterateUnitarity = 1e-8;

namespace detail {

inline double real_value(const Objective& obj, const ComplexMatrix& u) {
  const Complex v = obj.value(u);
  if (!(std::abs(v.imag()) <= kImaginaryTolerance)) {
    throw ConvergenceError("objective returned a non-real value (imaginary part " + std::to_string(v.imag()) + ")");
  }
  return v.real();
}

inline ComplexMatrix skew_gradient(const ComplexMatrix& gamma, const ComplexMatrix& u) {
  const ComplexMatrix s = gamma * u.adjoint();
  return s - s.adjoint();
}

}  // namespace detail

/// G = Gamma U^dagger - U Gamma^dagger.
inline ComplexMatrix riemannian_grad(const Objective& obj, const ComplexMatrix& u) {
  if (u.rows() != obj.dim || u.cols() != obj.dim) throw DimensionError("riemannian_grad: wrong dimension");
  if (!(unitarity_residual(u) <= kIterateUnitarity)) {
    throw ValidationError("unitarity", "riemannian_grad requires a unitary point");
  }
  return detail::skew_gradient(obj.gradient(u), u);
}

/// One CG run from `start`.
inline RunResult maximize_from(const Objective& obj, const OptimizerConfig& cfg, ComplexMatrix start) {
  const Index d = obj.dim;
  RunResult run;
  ComplexMatrix u = std::move(start);
  double f = detail::real_value(obj, u);
  ComplexMatrix g = detail::skew_gradient(obj.gradient(u), u);
  double gnorm = g.norm();
  run.trace.push_back({f, gnorm});

  ComplexMatrix dir = g;
  ComplexMatrix g_prev;
  int since_reset = 0;
  const int reset_period = static_cast<int>(std::max<Index>(1, d * d));
  constexpr double kMaxStep = 1e6;
  constexpr double kMinStep = 1e-14;

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (gnorm < cfg.grad_tol) break;
    if (it > 0) {
      const double denom = g_prev.squaredNorm();
      double beta = denom > 0.0 ? real_inner(g, g - g_prev) / denom : 0.0;
      beta = std::max(0.0, beta);
      if (since_reset >= reset_period) {
        beta = 0.0;
        since_reset = 0;
      }
      dir = g + beta * dir;
      if (real_inner(dir, g) <= 0.0) {
        dir = g;
        since_reset = 0;
      }
    }
    const double slope = real_inner(dir, g);
    const SkewHermitianExp step(dir);
    auto trial = [&](double mu, ComplexMatrix& out) {
      out = step(mu) * u;
      return detail::real_value(obj, out);
    };

    ComplexMatrix u_mu, u_try;
    double mu = cfg.initial_step;
    double f_mu = trial(mu, u_mu);
    if (f_mu - f >= cfg.armijo_c * mu * slope) {
      while (2.0 * mu <= kMaxStep) {
        const double f_try = trial(2.0 * mu, u_try);
        if (f_try <= f_mu || f_try - f < cfg.armijo_c * 2.0 * mu * slope) break;
        mu *= 2.0;
        f_mu = f_try;
        std::swap(u_mu, u_try);
      }
    } else {
      while (mu > kMinStep && f_mu - f < cfg.armijo_c * mu * slope) {
        mu *= cfg.armijo_shrink;
        f_mu = trial(mu, u_mu);
      }
      if (f_mu - f < cfg.armijo_c * mu * slope) {
        // No admissible step: the remaining ascent is below round-off.
        break;
      }
    }

    u = std::move(u_mu);
    f = f_mu;
    g_prev = std::move(g);
    g = detail::skew_gradient(obj.gradient(u), u);
    gnorm = g.norm();
    run.trace.push_back({f, gnorm});
    ++since_reset;
  }
  run.value = f;
  run.maximizer = std::move(u);
  run.iterations = it;
  run.converged = gnorm < cfg.grad_tol;
  return run;
}

/// Best of several CG runs. The runs start at `starts` (identity when empty)
/// followed by Haar-random points drawn from Rng(seed).fork(k) for run k, up
/// to `restarts` runs in total. Ties go to the lower run index.
inline OptimizerResult maximize(const Objective& obj, const OptimizerConfig& cfg,
                                const std::vector<ComplexMatrix>& starts = {}) {
  cfg.validate();
  if (obj.dim < 1) throw DimensionError("maximize: objective dimension must be at least 1");
  std::vector<ComplexMatrix> initial = starts;
  if (initial.empty()) initial.push_back(ComplexMatrix::Identity(obj.dim, obj.dim));
  for (const auto& s : initial) {
    if (s.rows() != obj.dim || s.cols() != obj.dim) throw DimensionError("maximize: start has the wrong dimension");
    require_unitary(s, "start", kIterateUnitarity);
  }
  const Rng root(cfg.seed);
  const auto total = static_cast<std::size_t>(std::max<int>(cfg.restarts, static_cast<int>(initial.size())));
  auto start_of = [&](std::size_t k) {
    if (k < initial.size()) return initial[k];
    Rng rng = root.fork(k);
    return haar_unitary(obj.dim, rng);
  };

  std::vector<RunResult> runs(total);
  if (cfg.workers <= 1) {
    for (std::size_t k = 0; k < total; ++k) runs[k] = maximize_from(obj, cfg, start_of(k));
  } else {
    for (std::size_t base = 0; base < total; base += cfg.workers) {
      std::vector<std::future<RunResult>> batch;
      for (std::size_t k = base; k < std::min(total, base + cfg.workers); ++k) {
        batch.push_back(std::async(std::launch::async, [&, k] { return maximize_from(obj, cfg, start_of(k)); }));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) runs[base + k] = batch[k].get();
    }
  }

  OptimizerResult result;
  for (std::size_t k = 0; k < total; ++k) {
    if (runs[k].value > result.best_value) {
      result.best_value = runs[k].value;
      result.best_restart = static_cast<int>(k);
    }
  }
  auto& best = runs[static_cast<std::size_t>(result.best_restart)];
  result.maximizer = best.maximizer;
  result.iterations = best.iterations;
  result.converged = best.converged;
  for (auto& r : runs) result.traces.push_back(std::move(r.trace));
  return result;
}

/// Largest relative error between the analytic rate <Z, G> along exp(t Z) U
/// and a central difference with step 1e-6, over random U and random
/// skew-Hermitian Z. Pairs whose rates are both below 1e-10 count as absolute.
inline double grad_check(const Objective& obj, int samples, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("samples", "at least one sample is required");
  constexpr double h = 1e-6;
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const ComplexMatrix u = haar_unitary(obj.dim, rng);
    const ComplexMatrix a = ginibre(obj.dim, obj.dim, rng);
    ComplexMatrix z = a - a.adjoint();
    z /= z.norm();
    const double analytic = real_inner(z, riemannian_grad(obj, u));
    const SkewHermitianExp e(z);
    const double fd = (detail::real_value(obj, e(h) * u) - detail::real_value(obj, e(-h) * u)) / (2.0 * h);
    const double scale = std::max(std::abs(analytic), std::abs(fd));
    const double err = scale > 1e-10 ? std::abs(analytic - fd) / scale : std::abs(analytic - fd);
    worst = std::max(worst, err);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Objective builders

/// Hermitian operator as sum_k w_k |v_k><v_k| (small eigenvalues dropped).
struct LowRankHermitian {
  std::vector<double> weights;
  std::vector<ComplexVector> vectors;

  static LowRankHermitian from(const ComplexMatrix& m, double cutoff = 1e-14) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
    LowRankHermitian out;
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (Index k = m.rows(); k-- > 0;) {
      const double w = es.eigenvalues()(k);
      if (std::abs(w) <= cutoff * scale) continue;
      out.weights.push_back(w);
      out.vectors.emplace_back(es.eigenvectors().col(k));
    }
    return out;
  }
};

namespace detail {

/// (I_a (x) U (x) I_b) v, or with U^dagger when `adjoint`.
inline ComplexVector apply_middle(const ComplexMatrix& u, const ComplexVector& v, Index a, Index b, bool adjoint) {
  const Index du = u.rows();
  ComplexVector out(v.size());
  ComplexVector slice(du);
  for (Index i = 0; i < a; ++i) {
    for (Index k = 0; k < b; ++k) {
      for (Index j = 0; j < du; ++j) slice(j) = v((i * du + j) * b + k);
      const ComplexVector r = adjoint ? ComplexVector(u.adjoint() * slice) : ComplexVector(u * slice);
      for (Index j = 0; j < du; ++j) out((i * du + j) * b + k) = r(j);
    }
  }
  return out;
}

}  // namespace detail

/// f(U) = tr(M L X L^dagger) with L = I_a (x) U (x) I_b, M and X Hermitian.
/// Euclidean gradient: the (a, b)-partial trace of M L X.
inline Objective quadratic_form_objective(LowRankHermitian m, ComplexMatrix x, Index a, Index du, Index b) {
  const Index total = a * du * b;
  if (x.rows() != total || x.cols() != total) throw DimensionError("quadratic_form_objective: X has the wrong size");
  for (const auto& v : m.vectors) {
    if (v.size() != total) throw DimensionError("quadratic_form_objective: M has the wrong size");
  }
  auto data = std::make_shared<std::pair<LowRankHermitian, ComplexMatrix>>(std::move(m), std::move(x));
  Objective obj;
  obj.dim = du;
  obj.value = [data, a, b](const ComplexMatrix& u) {
    Complex acc = 0.0;
    const auto& [lm, xm] = *data;
    for (std::size_t k = 0; k < lm.vectors.size(); ++k) {
      const ComplexVector y = detail::apply_middle(u, lm.vectors[k], a, b, true);
      acc += lm.weights[k] * y.dot(xm * y);
    }
    return acc;
  };
  obj.gradient = [data, a, du, b](const ComplexMatrix& u) {
    ComplexMatrix gamma = ComplexMatrix::Zero(du, du);
    const auto& [lm, xm] = *data;
    for (std::size_t k = 0; k < lm.vectors.size(); ++k) {
      const ComplexVector& v = lm.vectors[k];
      const ComplexVector y = xm * detail::apply_middle(u, v, a, b, true);
      // Gamma_L = sum_k w_k v_k y_k^dagger; trace out the a and b factors.
      for (Index i = 0; i < a; ++i) {
        for (Index c = 0; c < b; ++c) {
          for (Index r = 0; r < du; ++r) {
            const Complex vr = lm.weights[k] * v((i * du + r) * b + c);
            if (vr == Complex(0.0)) continue;
            for (Index s = 0; s < du; ++s) gamma(r, s) += vr * std::conj(y((i * du + s) * b + c));
          }
        }
      }
    }
    return gamma;
  };
  return obj;
}

/// f(U) = sum_j c_j |tr(U B_j)|^2 with c_j >= 0; Gamma = sum_j c_j tr(U B_j) B_j^dagger.
inline Objective trace_sum_objective(std::vector<ComplexMatrix> terms, std::vector<double> weights) {
  if (terms.empty()) throw DimensionError("trace_sum_objective: no terms");
  if (weights.size() != terms.size()) throw DimensionError("trace_sum_objective: weight count mismatch");
  const Index d = terms.front().rows();
  for (const auto& t : terms) {
    if (t.rows() != d || t.cols() != d) throw DimensionError("trace_sum_objective: terms must be square and equal-sized");
  }
  auto data = std::make_shared<std::pair<std::vector<ComplexMatrix>, std::vector<double>>>(std::move(terms),
                                                                                         std::move(weights));
  auto trace_product = [](const ComplexMatrix& u, const ComplexMatrix& b) {
    return (u.transpose().cwiseProduct(b)).sum();
  };
  Objective obj;
  obj.dim = d;
  obj.value = [data, trace_product](const ComplexMatrix& u) {
    double acc = 0.0;
    for (std::size_t j = 0; j < data->first.size(); ++j) acc += data->second[j] * std::norm(trace_product(u, data->first[j]));
    return Complex(acc, 0.0);
  };
  obj.gradient = [data, trace_product, d](const ComplexMatrix& u) {
    ComplexMatrix gamma = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < data->first.size(); ++j) {
      gamma += (data->second[j] * trace_product(u, data->first[j])) * data->first[j].adjoint();
    }
    return gamma;
  };
  return obj;
}

/// c * obj, for c > 0.
inline Objective scaled(const Objective& obj, double c) {
  Objective out;
  out.dim = obj.dim;
  out.value = [f = obj.value, c](const ComplexMatrix& u) { return c * f(u); };
  out.gradient = [g = obj.gradient, c](const ComplexMatrix& u) { return ComplexMatrix(c * g(u)); };
  return out;
}

}  // namespace qtl
