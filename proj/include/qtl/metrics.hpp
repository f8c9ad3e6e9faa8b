#pragma once

// Entangled-fraction objectives and their maximization.
//
//   F1        max_U <Phi| (1 (x) U^dagger) chi (1 (x) U) |Phi>                     over U(n)
//   F2_lower  max_O tr[(|Phi><Phi| (x) rho^*) O_23 (chi (x) 1) O_23^dagger]        over U(n^2)
//             with rho = tr_2 chi (the V = I simplification)
//   F2_full   max_{O,V} <Phi| tr_34[O_13 V_24 (chi (x) chi) O_13^dagger V_24^dagger] |Phi>
//   F2_ghz    max_{W,T} (1/n) sum_{rms,i} <Phi Phi| K (chi (x) chi) K^dagger |Phi Phi>,
//             K = W_24 (h^r g^{s*})_2 (h^m)_4 (E_i)_24 (T^s_rm)_24
//
// Every reported value is the best value the optimizer found, i.e. a lower
// bound of the supremum.

#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "qtl/bases.hpp"
#include "qtl/channels.hpp"
#include "qtl/optimizer.hpp"
#include "qtl/states.hpp"
#include "qtl/tensor.hpp"

namespace qtl {

enum class FefKind { f1, f2_lower, f2_full, f2_ghz };

inline std::string to_string(FefKind k) {
  switch (k) {
    case FefKind::f1: return "f1";
    case FefKind::f2_lower: return "f2lower";
    case FefKind::f2_full: return "f2full";
    case FefKind::f2_ghz: return "f2ghz";
  }
  return "unknown";
}

inline FefKind fef_kind_from_string(const std::string& s) {
  if (s == "f1") return FefKind::f1;
  if (s == "f2lower") return FefKind::f2_lower;
  if (s == "f2full") return FefKind::f2_full;
  if (s == "f2ghz") return FefKind::f2_ghz;
  throw ValidationError("kind", "unknown kind '" + s + "'");
}

struct FefReport {
  FefKind kind = FefKind::f1;
  int n = 2;
  double value = 0.0;
  /// f1: {U}; f2_lower: {Omega}; f2_full: {Omega, V}; f2_ghz: {W, T_0, ..., T_{n^3-1}}.
  std::vector<ComplexMatrix> maximizers;
  double optimal_fidelity = 0.0;
  bool useful = false;
  int iterations = 0;
  bool converged = false;
  std::vector<std::vector<TracePoint>> traces;
};

inline constexpr double kUsefulSlack = 1e-12;

inline bool usefulness(double value, int n) { return value > 1.0 / static_cast<double>(n) + kUsefulSlack; }
inline bool usefulness(const FefReport& r) { return usefulness(r.value, r.n); }

namespace detail {

inline int resource_local_dim(const ComplexMatrix& chi) {
  if (chi.rows() != chi.cols()) throw DimensionError("resource must be square");
  return local_dim_of_square(chi.rows(), "resource");
}

inline FefReport make_report(FefKind kind, int n, double value, std::vector<ComplexMatrix> maximizers) {
  FefReport r;
  r.kind = kind;
  r.n = n;
  r.value = value;
  r.maximizers = std::move(maximizers);
  const double nd = static_cast<double>(n);
  // Affine link (n F + 1)/(n + 1), applied without the range check so that
  // a value outside [0, 1] is reported rather than masked.
  r.optimal_fidelity = (nd * value + 1.0) / (nd + 1.0);
  r.useful = usefulness(value, n);
  return r;
}

/// Single-run config seeded from a warm start; used inside block ascent.
inline OptimizerConfig single_run(const OptimizerConfig& cfg) {
  OptimizerConfig c = cfg;
  c.restarts = 1;
  c.workers = 1;
  return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// F1

/// U -> <Phi|(1 (x) U^dagger) chi (1 (x) U)|Phi>. Accepts any Hermitian chi.
inline Objective f1_objective(const ComplexMatrix& chi) {
  const int n = detail::resource_local_dim(chi);
  const ComplexVector phi = max_entangled_vector(n);
  return quadratic_form_objective(LowRankHermitian::from(chi), phi * phi.adjoint(), n, n, 1);
}

inline FefReport fef_f1(const DensityMatrix& chi, const OptimizerConfig& cfg,
                        const std::vector<ComplexMatrix>& starts = {}) {
  const int n = detail::resource_local_dim(chi.matrix());
  const auto res = maximize(f1_objective(chi.matrix()), cfg, starts);
  auto report = detail::make_report(FefKind::f1, n, res.best_value, {res.maximizer});
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.traces = res.traces;
  return report;
}

// ---------------------------------------------------------------------------
// F2, V = I form

/// Omega -> tr[(|Phi><Phi| (x) rho^*) (1 (x) Omega)(chi (x) 1)(1 (x) Omega)^dagger],
/// rho = tr_2 chi. Accepts any Hermitian chi (the continuity probe feeds
/// unnormalized sums).
inline Objective f2_lower_objective(const ComplexMatrix& chi) {
  const int n = detail::resource_local_dim(chi);
  const ComplexMatrix rho_conj = partial_trace(chi, Dims{n, n}, {0}).conjugate();
  const ComplexVector phi = max_entangled_vector(n);
  const LowRankHermitian r = LowRankHermitian::from(rho_conj);
  LowRankHermitian m;
  for (std::size_t k = 0; k < r.vectors.size(); ++k) {
    m.weights.push_back(r.weights[k]);
    m.vectors.push_back(kron(phi, r.vectors[k]));
  }
  return quadratic_form_objective(std::move(m), kron(chi, ComplexMatrix::Identity(n, n)), n,
                                  static_cast<Index>(n) * n, 1);
}

/// Maximizes the V = I form. Omega = U^dagger (x) 1 reproduces the F1
/// objective at U, so the F1 maximizer lifted this way is always the first
/// start and the result is never below F1's best value.
inline FefReport tfef_f2_lower(const DensityMatrix& chi, const OptimizerConfig& cfg,
                               const std::vector<ComplexMatrix>& extra_starts = {}) {
  const int n = detail::resource_local_dim(chi.matrix());
  const auto f1 = maximize(f1_objective(chi.matrix()), cfg);
  std::vector<ComplexMatrix> starts = {kron(ComplexMatrix(f1.maximizer.adjoint()), ComplexMatrix::Identity(n, n))};
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());
  const auto res = maximize(f2_lower_objective(chi.matrix()), cfg, starts);
  auto report = detail::make_report(FefKind::f2_lower, n, res.best_value, {res.maximizer});
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.traces = res.traces;
  return report;
}

// ---------------------------------------------------------------------------
// F2, two-unitary form

/// The two-unitary functional on the reordered space (1, 3, 2, 4), where Omega
/// acts on the first H (x) H factor and V on the second:
/// F(Omega, V) = tr[M (Omega (x) V) X (Omega (x) V)^dagger].
class TwoUnitaryForm {
 public:
  explicit TwoUnitaryForm(const ComplexMatrix& chi) : n_(detail::resource_local_dim(chi)) {
    const Dims dims{n_, n_, n_, n_};
    const std::vector<Index> order{0, 2, 1, 3};
    x_ = permute_subsystems(kron(chi, chi), dims, order);
    const ComplexVector phi = max_entangled_vector(n_);
    const Index d = static_cast<Index>(n_) * n_;
    for (Index k = 0; k < d; ++k) {
      ComplexVector e = ComplexVector::Zero(d);
      e(k) = 1.0;
      m_.weights.push_back(1.0);
      m_.vectors.push_back(permute_subsystems(ComplexVector(kron(phi, e)), dims, order));
    }
  }

  int n() const noexcept { return n_; }

  double value(const ComplexMatrix& omega, const ComplexMatrix& v) const {
    const ComplexMatrix l = kron(omega, v);
    const ComplexMatrix y = l * x_ * l.adjoint();
    Complex acc = 0.0;
    for (const auto& m : m_.vectors) acc += m.dot(y * m);
    return acc.real();
  }

  /// Objective in Omega with V fixed.
  Objective omega_block(const ComplexMatrix& v) const {
    const Index d = static_cast<Index>(n_) * n_;
    const ComplexMatrix r = kron(ComplexMatrix::Identity(d, d), v);
    return quadratic_form_objective(m_, r * x_ * r.adjoint(), 1, d, d);
  }

  /// Objective in V with Omega fixed.
  Objective v_block(const ComplexMatrix& omega) const {
    const Index d = static_cast<Index>(n_) * n_;
    const ComplexMatrix r = kron(omega, ComplexMatrix::Identity(d, d));
    return quadratic_form_objective(m_, r * x_ * r.adjoint(), d, d, 1);
  }

 private:
  int n_;
  LowRankHermitian m_;
  ComplexMatrix x_;
};

inline constexpr int kMaxSweeps = 50;
inline constexpr double kSweepTolerance = 1e-9;

struct BlockAscentResult {
  double value = 0.0;
  std::vector<ComplexMatrix> blocks;
  int sweeps = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;  // value after each block update
};

/// Alternating ascent over (Omega, V) from one starting pair.
inline BlockAscentResult two_unitary_ascent(const TwoUnitaryForm& form, ComplexMatrix omega, ComplexMatrix v,
                                            const OptimizerConfig& cfg) {
  const auto inner = detail::single_run(cfg);
  BlockAscentResult out;
  double f = form.value(omega, v);
  out.trace.push_back({f, 0.0});
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double before = f;
    auto ro = maximize(form.omega_block(v), inner, {omega});
    if (ro.best_value >= f) {
      omega = ro.maximizer;
      f = ro.best_value;
    }
    out.trace.push_back({f, ro.traces.front().back().grad_norm});
    auto rv = maximize(form.v_block(omega), inner, {v});
    if (rv.best_value >= f) {
      v = rv.maximizer;
      f = rv.best_value;
    }
    out.trace.push_back({f, rv.traces.front().back().grad_norm});
    out.iterations += ro.iterations + rv.iterations;
    out.sweeps = sweep + 1;
    if (f - before < kSweepTolerance) {
      out.converged = true;
      break;
    }
  }
  out.value = form.value(omega, v);
  out.blocks = {std::move(omega), std::move(v)};
  return out;
}

/// Block ascent over (Omega, V). Starts: (I, I); (Omega_1^T, I) with Omega_1
/// the maximizer of the V = I form, which reproduces that form's value (and
/// so bounds F1 as well); any extra pairs; then random pairs up to
/// `cfg.restarts`.
inline FefReport tfef_f2_full(const DensityMatrix& chi, const OptimizerConfig& cfg,
                              const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& extra_starts = {}) {
  cfg.validate();
  const TwoUnitaryForm form(chi.matrix());
  const int n = form.n();
  const Index d = static_cast<Index>(n) * n;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const auto lower = tfef_f2_lower(chi, cfg);

  std::vector<std::pair<ComplexMatrix, ComplexMatrix>> starts = {{id, id},
                                                                 {lower.maximizers.front().transpose(), id}};
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());
  const Rng root(cfg.seed);
  for (std::size_t k = starts.size(); k < static_cast<std::size_t>(cfg.restarts); ++k) {
    Rng rng = root.fork(k);
    ComplexMatrix o = haar_unitary(d, rng);
    starts.emplace_back(std::move(o), haar_unitary(d, rng));
  }

  BlockAscentResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<TracePoint>> traces;
  for (auto& [o, v] : starts) {
    auto r = two_unitary_ascent(form, o, v, cfg);
    traces.push_back(r.trace);
    if (r.value > best.value) best = std::move(r);
  }
  auto report = detail::make_report(FefKind::f2_full, n, best.value, best.blocks);
  report.iterations = best.iterations;
  report.converged = best.converged;
  report.traces = std::move(traces);
  return report;
}

/// Two-channel Bell spec realizing the two-unitary functional at (Omega, V):
/// its fixed-spec entangled fraction equals F(Omega, V) with W = Omega^T and
/// Weyl corrections.
inline ChannelSpec bell_spec_from_tfef(const ComplexMatrix& omega, const ComplexMatrix& v) {
  const int n = local_dim_of_square(omega.rows(), "bell_spec_from_tfef");
  return ChannelSpec::two_channel_bell(n, omega.transpose(), v);
}

// ---------------------------------------------------------------------------
// F2', GHZ measurements

/// The GHZ functional in the reduced trace form
/// (1/n^3) sum_{rms,i,a,b} p_a p_b |tr(T^s_rm (A_a (x) A_b) W G_rms E_i)|^2,
/// G_rms = h^r g^{s*} (x) h^m, which follows from the operator-sum definition by
/// |psi_a> = sqrt(n)(1 (x) A_a)|Phi> and <Phi Phi|(M)_24|Phi Phi> = tr(M)/n^2.
class GhzForm {
 public:
  explicit GhzForm(const DensityMatrix& chi) : n_(detail::resource_local_dim(chi.matrix())) {
    const auto terms = decompose_resource(chi, n_);
    for (const auto& a : terms) {
      for (const auto& b : terms) {
        pairs_.push_back(kron(a.coefficients, b.coefficients));
        weights_.push_back(a.weight * b.weight);
      }
    }
    for (const auto& idx : GhzIndex::all(n_)) {
      const ComplexMatrix g =
          kron(shift_clock(idx.r, 0, n_) * shift_clock(0, -idx.s, n_), shift_clock(idx.m, 0, n_));
      std::vector<ComplexMatrix> ge;
      for (int i = 0; i < n_; ++i) ge.push_back(g * e_i(n_, i));
      g_e_.push_back(std::move(ge));
    }
  }

  int n() const noexcept { return n_; }
  std::size_t outcome_count() const noexcept { return g_e_.size(); }

  double value(const ComplexMatrix& w, const std::vector<ComplexMatrix>& t) const {
    double acc = 0.0;
    for (std::size_t o = 0; o < g_e_.size(); ++o) {
      for (const auto& ge : g_e_[o]) {
        const ComplexMatrix right = w * ge;
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          acc += weights_[p] * std::norm((t[o] * pairs_[p] * right).trace());
        }
      }
    }
    return acc / cube();
  }

  Objective w_block(const std::vector<ComplexMatrix>& t) const {
    std::vector<ComplexMatrix> terms;
    std::vector<double> weights;
    for (std::size_t o = 0; o < g_e_.size(); ++o) {
      for (const auto& ge : g_e_[o]) {
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          terms.push_back(ge * t[o] * pairs_[p]);
          weights.push_back(weights_[p] / cube());
        }
      }
    }
    return trace_sum_objective(std::move(terms), std::move(weights));
  }

  /// Objective in T^s_rm (outcome `o`), everything else fixed. Only the terms
  /// of that outcome depend on it; the rest is a constant and omitted.
  Objective t_block(const ComplexMatrix& w, std::size_t o) const {
    std::vector<ComplexMatrix> terms;
    std::vector<double> weights;
    for (const auto& ge : g_e_.at(o)) {
      const ComplexMatrix right = w * ge;
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        terms.push_back(pairs_[p] * right);
        weights.push_back(weights_[p] / cube());
      }
    }
    return trace_sum_objective(std::move(terms), std::move(weights));
  }

 private:
  double cube() const { return static_cast<double>(n_) * n_ * n_; }

  int n_;
  std::vector<ComplexMatrix> pairs_;
  std::vector<double> weights_;
  std::vector<std::vector<ComplexMatrix>> g_e_;
};

/// The GHZ functional evaluated literally from its operator-sum definition: operators
/// embedded on slots (2, 4) of |Phi>_12 |Phi>_34 and chi_12 chi_34.
inline double f2_ghz_display(const DensityMatrix& chi, const ComplexMatrix& w, const std::vector<ComplexMatrix>& t) {
  const int n = detail::resource_local_dim(chi.matrix());
  const Dims dims{n, n, n, n};
  const std::vector<Index> bob{1, 3};
  const ComplexVector phi = max_entangled_vector(n);
  const ComplexVector phiphi = kron(phi, phi);
  const ComplexMatrix chichi = kron(chi.matrix(), chi.matrix());
  double acc = 0.0;
  for (const auto& idx : GhzIndex::all(n)) {
    ComplexMatrix hr = ComplexMatrix::Identity(n, n), gs = hr, hm = hr;
    for (int k = 0; k < idx.r; ++k) hr = weyl_h(n) * hr;
    for (int k = 0; k < idx.s; ++k) gs = weyl_g(n).conjugate() * gs;
    for (int k = 0; k < idx.m; ++k) hm = weyl_h(n) * hm;
    const ComplexMatrix g = kron(hr * gs, hm);
    for (int i = 0; i < n; ++i) {
      const ComplexMatrix k = embed(w * g * e_i(n, i) * t[static_cast<std::size_t>(idx.flat())], dims, bob);
      const ComplexVector left = k.adjoint() * phiphi;
      acc += left.dot(chichi * left).real();
    }
  }
  return acc / static_cast<double>(n);
}

inline ChannelSpec ghz_spec_from_blocks(const ComplexMatrix& w, const std::vector<ComplexMatrix>& t) {
  const int n = local_dim_of_square(w.rows(), "ghz_spec_from_blocks");
  return ChannelSpec::two_channel_ghz(n, w, CorrectionFamily(Protocol::two_channel_ghz, n, t));
}

/// Block ascent over W and the n^3 corrections. The first start is W = I with
/// identity corrections; further starts are random up to `cfg.restarts`.
inline FefReport tfef_f2_ghz(const DensityMatrix& chi, const OptimizerConfig& cfg) {
  cfg.validate();
  const GhzForm form(chi);
  const int n = form.n();
  const Index d = static_cast<Index>(n) * n;
  const auto inner = detail::single_run(cfg);
  const Rng root(cfg.seed);

  FefReport best = detail::make_report(FefKind::f2_ghz, n, -std::numeric_limits<double>::infinity(), {});
  std::vector<std::vector<TracePoint>> traces;
  for (int start = 0; start < cfg.restarts; ++start) {
    ComplexMatrix w = ComplexMatrix::Identity(d, d);
    std::vector<ComplexMatrix> t(form.outcome_count(), ComplexMatrix::Identity(d, d));
    if (start > 0) {
      Rng rng = root.fork(static_cast<std::uint64_t>(start));
      w = haar_unitary(d, rng);
      for (auto& tc : t) tc = haar_unitary(d, rng);
    }
    double f = form.value(w, t);
    std::vector<TracePoint> trace{{f, 0.0}};
    int iterations = 0;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const double before = f;
      auto rw = maximize(form.w_block(t), inner, {w});
      iterations += rw.iterations;
      w = rw.maximizer;
      for (std::size_t o = 0; o < t.size(); ++o) {
        auto rt = maximize(form.t_block(w, o), inner, {t[o]});
        iterations += rt.iterations;
        t[o] = rt.maximizer;
      }
      f = form.value(w, t);
      trace.push_back({f, rw.traces.front().back().grad_norm});
      if (f - before < kSweepTolerance) {
        converged = true;
        break;
      }
    }
    traces.push_back(std::move(trace));
    if (f > best.value) {
      std::vector<ComplexMatrix> blocks{w};
      blocks.insert(blocks.end(), t.begin(), t.end());
      best = detail::make_report(FefKind::f2_ghz, n, f, std::move(blocks));
      best.iterations = iterations;
      best.converged = converged;
    }
  }
  best.traces = std::move(traces);
  return best;
}

inline FefReport compute_fef(FefKind kind, const DensityMatrix& chi, const OptimizerConfig& cfg) {
  switch (kind) {
    case FefKind::f1: return fef_f1(chi, cfg);
    case FefKind::f2_lower: return tfef_f2_lower(chi, cfg);
    case FefKind::f2_full: return tfef_f2_full(chi, cfg);
    case FefKind::f2_ghz: return tfef_f2_ghz(chi, cfg);
  }
  throw ValidationError("kind", "unknown kind");
}

// ---------------------------------------------------------------------------
// Convexity and continuity probes for the V = I form

struct ConvexityPoint {
  double xi = 0.0;
  double f_a = 0.0;
  double f_b = 0.0;
  double f_mix = 0.0;
  double slack = 0.0;  // xi f_a + (1 - xi) f_b - f_mix
};

struct ConvexityReport {
  std::vector<ConvexityPoint> points;
  double min_slack = 0.0;
};

/// For each xi: the mixture is optimized first; both endpoints are then
/// optimized with the mixture's maximizer as an additional start.
inline ConvexityReport convexity_probe(const DensityMatrix& chi_a, const DensityMatrix& chi_b,
                                       const std::vector<double>& xi_grid, const OptimizerConfig& cfg) {
  if (chi_a.dim() != chi_b.dim()) throw DimensionError("convexity_probe: states differ in dimension");
  ConvexityReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  const auto base_a = tfef_f2_lower(chi_a, cfg);
  const auto base_b = tfef_f2_lower(chi_b, cfg);
  for (double xi : xi_grid) {
    if (xi < 0.0 || xi > 1.0) throw ValidationError("xi", "mixing weight must lie in [0, 1]");
    const DensityMatrix mixed = mix(chi_a, chi_b, xi);
    const auto fm = tfef_f2_lower(mixed, cfg, {base_a.maximizers.front(), base_b.maximizers.front()});
    const auto fa = tfef_f2_lower(chi_a, cfg, {fm.maximizers.front(), base_a.maximizers.front()});
    const auto fb = tfef_f2_lower(chi_b, cfg, {fm.maximizers.front(), base_b.maximizers.front()});
    ConvexityPoint p{xi, fa.value, fb.value, fm.value, xi * fa.value + (1.0 - xi) * fb.value - fm.value};
    report.min_slack = std::min(report.min_slack, p.slack);
    report.points.push_back(p);
  }
  return report;
}

struct ContinuityPoint {
  double epsilon = 0.0;
  double difference = 0.0;  // F(chi_a + eps chi_b) - F(chi_a)
  double bound = 0.0;       // n^2 (2 + ||eps chi_b||) ||eps chi_b||
};

/// The V = I functional on the unnormalized sums chi_a + eps chi_b. The
/// perturbed maximum is warm-started from the unperturbed maximizer and vice
/// versa, so both values are consistent lower bounds.
inline std::vector<ContinuityPoint> continuity_probe(const DensityMatrix& chi_a, const DensityMatrix& chi_b,
                                                     const std::vector<double>& epsilons, const OptimizerConfig& cfg) {
  if (chi_a.dim() != chi_b.dim()) throw DimensionError("continuity_probe: states differ in dimension");
  const int n = detail::resource_local_dim(chi_a.matrix());
  const double norm_b = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(chi_b.matrix()).eigenvalues().maxCoeff();
  const auto base = tfef_f2_lower(chi_a, cfg);
  std::vector<ContinuityPoint> out;
  for (double eps : epsilons) {
    const ComplexMatrix sum = chi_a.matrix() + eps * chi_b.matrix();
    const auto perturbed = maximize(f2_lower_objective(sum), cfg, {base.maximizers.front()});
    const auto again = maximize(f2_lower_objective(chi_a.matrix()), cfg, {perturbed.maximizer, base.maximizers.front()});
    const double fa = std::max(base.value, again.best_value);
    const double nb = eps * norm_b;
    out.push_back({eps, perturbed.best_value - fa, static_cast<double>(n) * n * (2.0 + nb) * nb});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random-state experiment

struct ExperimentRecord {
  int n = 2;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  double f2 = 0.0;
  double df = 0.0;
  double f1_opt = 0.0;
  double f2_opt = 0.0;
  int iters_f1 = 0;
  int iters_f2 = 0;
};

/// The state with index k is drawn from Rng(seed + k) and optimized with the
/// same seed, so every record can be reproduced in isolation.
inline ExperimentRecord df_record(int n, std::uint64_t state_seed, const OptimizerConfig& cfg) {
  Rng rng(state_seed);
  const DensityMatrix chi = random_resource(n, rng);
  OptimizerConfig c = cfg;
  c.seed = state_seed;
  const auto f1 = fef_f1(chi, c);
  const auto f2 = tfef_f2_lower(chi, c, {});
  ExperimentRecord r;
  r.n = n;
  r.seed = state_seed;
  r.f1 = f1.value;
  r.f2 = f2.value;
  r.df = f2.value - f1.value;
  r.f1_opt = f1.optimal_fidelity;
  r.f2_opt = f2.optimal_fidelity;
  r.iters_f1 = f1.iterations;
  r.iters_f2 = f2.iterations;
  return r;
}

inline std::vector<ExperimentRecord> df_experiment(int n, int count, const OptimizerConfig& cfg, std::uint64_t seed,
                                                   unsigned workers = 1) {
  if (n < 2 || n > 4) throw ValidationError("n", "the experiment supports n in {2, 3, 4}");
  if (count < 0) throw ValidationError("count", "must be non-negative");
  std::vector<ExperimentRecord> out(static_cast<std::size_t>(count));
  OptimizerConfig c = cfg;
  c.workers = 1;
  if (workers <= 1) {
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = df_record(n, seed + static_cast<std::uint64_t>(k), c);
  } else {
    for (int base = 0; base < count; base += static_cast<int>(workers)) {
      std::vector<std::future<ExperimentRecord>> batch;
      for (int k = base; k < std::min(count, base + static_cast<int>(workers)); ++k) {
        batch.push_back(std::async(std::launch::async, df_record, n, seed + static_cast<std::uint64_t>(k), c));
      }
      for (std::size_t j = 0; j < batch.size(); ++j) out[static_cast<std::size_t>(base) + j] = batch[j].get();
    }
  }
  return out;
}

}  // namespace qtl
