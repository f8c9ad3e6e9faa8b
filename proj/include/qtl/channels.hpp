#pragma once

// Teleportation channels for the one-channel Bell protocol, the two-channel
// Bell protocol and the two-channel GHZ protocol.
//
// Particle layout: 0 = input, (1, 2) = first resource pair, (3, 4) = second
// pair. Alice holds 0, 1, 3 and Bob holds 2, 4. Every protocol is reduced to
// operators on Bob's particles (2, 4), in the order (2, 4).
//
// The resource is decomposed as chi = sum_a p_a |psi_a><psi_a| with
// |psi_a> = sqrt(n) (1 (x) A_a)|Phi>, so that A_a = sum_st c_st U_st has
// Bell-basis coefficients <Phi_st|psi_a> = sqrt(n) c_st. Measurement branches
// then become Kraus operators:
//
//   one-channel Bell   (branch st)   sqrt(p/n)      T_st A U_st^dagger
//   two-channel Bell   (branch st)   sqrt(pp'/n) <k|_4 T_2 V (A (x) A') W (U_st^dagger)_2 |j>_4
//   two-channel GHZ    (branch rms)  sqrt(pp'/n) <k|_4 T^s_rm (A (x) A') W Utilde^{s dagger}_rm
//
// In the two-channel protocols W (Alice's joint unitary) enters on (2, 4).

#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "qtl/bases.hpp"
#include "qtl/tensor.hpp"

namespace qtl {

enum class Protocol { one_channel_bell, two_channel_bell, two_channel_ghz };

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::one_channel_bell: return "one-channel-bell";
    case Protocol::two_channel_bell: return "two-channel-bell";
    case Protocol::two_channel_ghz: return "two-channel-ghz";
  }
  return "unknown";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "one-channel-bell") return Protocol::one_channel_bell;
  if (s == "two-channel-bell") return Protocol::two_channel_bell;
  if (s == "two-channel-ghz") return Protocol::two_channel_ghz;
  throw ValidationError("protocol", "unknown protocol '" + s + "'");
}

inline bool is_bell(Protocol p) { return p != Protocol::two_channel_ghz; }

/// Outcome-indexed corrections. Bell protocols: n^2 unitaries on H indexed by
/// WeylIndex::flat(). GHZ: n^3 unitaries on H (x) H indexed by GhzIndex::flat().
class CorrectionFamily {
 public:
  CorrectionFamily(Protocol protocol, int n, std::vector<ComplexMatrix> ops)
      : protocol_(protocol), n_(n), ops_(std::move(ops)) {
    detail::require_local_dim(n_, "CorrectionFamily");
    const std::size_t expected = is_bell(protocol_) ? static_cast<std::size_t>(n_ * n_)
                                                    : static_cast<std::size_t>(n_ * n_ * n_);
    if (ops_.size() != expected) {
      throw ValidationError("corrections", "expected " + std::to_string(expected) + " corrections, got " +
                                               std::to_string(ops_.size()));
    }
    const Index d = is_bell(protocol_) ? n_ : static_cast<Index>(n_) * n_;
    for (std::size_t k = 0; k < ops_.size(); ++k) {
      if (ops_[k].rows() != d || ops_[k].cols() != d) {
        throw ValidationError("corrections", "correction " + std::to_string(k) + " has the wrong shape");
      }
      require_unitary(ops_[k], "correction " + std::to_string(k));
    }
  }

  /// T_st = U_st.
  static CorrectionFamily weyl(Protocol protocol, int n) {
    if (!is_bell(protocol)) throw ValidationError("protocol", "Weyl corrections apply to Bell protocols");
    std::vector<ComplexMatrix> ops;
    for (const auto& idx : WeylIndex::all(n)) ops.push_back(weyl_u(idx));
    return {protocol, n, std::move(ops)};
  }

  /// T^s_rm = C (g^s (x) 1)(h^{-r} (x) h^{-m}) with C|a, b> = |a, b - a>.
  /// Undoes the GHZ outcome phase and shifts and disentangles particle 4,
  /// which gives the identity channel on the ideal resource.
  static CorrectionFamily ghz_standard(int n) {
    detail::require_local_dim(n, "ghz_standard");
    const Index d = static_cast<Index>(n) * n;
    ComplexMatrix disentangle = ComplexMatrix::Zero(d, d);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) disentangle(a * n + detail::mod(b - a, n), a * n + b) = 1.0;
    }
    std::vector<ComplexMatrix> ops;
    for (const auto& idx : GhzIndex::all(n)) {
      const ComplexMatrix undo_shift = kron(shift_clock(-idx.r, 0, n), shift_clock(-idx.m, 0, n));
      const ComplexMatrix phase = kron(shift_clock(0, idx.s, n), ComplexMatrix::Identity(n, n));
      ops.push_back(disentangle * phase * undo_shift);
    }
    return {Protocol::two_channel_ghz, n, std::move(ops)};
  }

  static CorrectionFamily identity(Protocol protocol, int n) {
    const std::size_t count = is_bell(protocol) ? static_cast<std::size_t>(n * n)
                                                : static_cast<std::size_t>(n * n * n);
    const Index d = is_bell(protocol) ? n : static_cast<Index>(n) * n;
    return {protocol, n, std::vector<ComplexMatrix>(count, ComplexMatrix::Identity(d, d))};
  }

  Protocol protocol() const noexcept { return protocol_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return ops_.size(); }
  const ComplexMatrix& operator[](std::size_t k) const { return ops_.at(k); }
  const std::vector<ComplexMatrix>& ops() const noexcept { return ops_; }

 private:
  Protocol protocol_;
  int n_;
  std::vector<ComplexMatrix> ops_;
};

/// Protocol selector plus the local operations. W and V act on H (x) H; for
/// the one-channel protocol both must be the identity, and V is unused by GHZ.
class ChannelSpec {
 public:
  ChannelSpec(Protocol protocol, int n, ComplexMatrix w, ComplexMatrix v, CorrectionFamily corrections)
      : protocol_(protocol), n_(n), w_(std::move(w)), v_(std::move(v)), corrections_(std::move(corrections)) {
    detail::require_local_dim(n_, "ChannelSpec");
    const Index d = static_cast<Index>(n_) * n_;
    if (w_.rows() != d || w_.cols() != d || v_.rows() != d || v_.cols() != d) {
      throw ValidationError("dims", "W and V must be " + std::to_string(d) + "x" + std::to_string(d));
    }
    require_unitary(w_, "W");
    require_unitary(v_, "V");
    if (corrections_.protocol() != protocol_ || corrections_.n() != n_) {
      throw ValidationError("corrections", "correction family does not match the protocol or dimension");
    }
    if (protocol_ == Protocol::one_channel_bell &&
        (!w_.isIdentity(tolerance::kUnitary) || !v_.isIdentity(tolerance::kUnitary))) {
      throw ValidationError("protocol", "one-channel protocol takes W = V = I");
    }
  }

  static ChannelSpec one_channel(int n) {
    return one_channel(n, CorrectionFamily::weyl(Protocol::one_channel_bell, n));
  }
  static ChannelSpec one_channel(int n, CorrectionFamily t) {
    const Index d = static_cast<Index>(n) * n;
    return {Protocol::one_channel_bell, n, ComplexMatrix::Identity(d, d), ComplexMatrix::Identity(d, d),
            std::move(t)};
  }

  static ChannelSpec two_channel_bell(int n) {
    const Index d = static_cast<Index>(n) * n;
    return two_channel_bell(n, ComplexMatrix::Identity(d, d), ComplexMatrix::Identity(d, d));
  }
  static ChannelSpec two_channel_bell(int n, ComplexMatrix w, ComplexMatrix v) {
    return {Protocol::two_channel_bell, n, std::move(w), std::move(v),
            CorrectionFamily::weyl(Protocol::two_channel_bell, n)};
  }

  static ChannelSpec two_channel_ghz(int n) {
    const Index d = static_cast<Index>(n) * n;
    return two_channel_ghz(n, ComplexMatrix::Identity(d, d), CorrectionFamily::ghz_standard(n));
  }
  static ChannelSpec two_channel_ghz(int n, ComplexMatrix w, CorrectionFamily t) {
    const Index d = static_cast<Index>(n) * n;
    return {Protocol::two_channel_ghz, n, std::move(w), ComplexMatrix::Identity(d, d), std::move(t)};
  }

  Protocol protocol() const noexcept { return protocol_; }
  int n() const noexcept { return n_; }
  const ComplexMatrix& w() const noexcept { return w_; }
  const ComplexMatrix& v() const noexcept { return v_; }
  const CorrectionFamily& corrections() const noexcept { return corrections_; }

 private:
  Protocol protocol_;
  int n_;
  ComplexMatrix w_;
  ComplexMatrix v_;
  CorrectionFamily corrections_;
};

// ---------------------------------------------------------------------------
// Resource decomposition

struct ResourceTerm {
  double weight = 0.0;
  ComplexMatrix coefficients;  // A with |psi> = sqrt(n) (1 (x) A)|Phi>, tr A^dagger A = 1
};

inline constexpr double kEigenvalueCutoff = 1e-12;

/// Eigen-decomposition of chi into pure terms; eigenvalues below 1e-12 are dropped.
inline std::vector<ResourceTerm> decompose_resource(const DensityMatrix& chi, int n) {
  const Index d = static_cast<Index>(n) * n;
  if (chi.dim() != d) {
    throw DimensionError("resource has dimension " + std::to_string(chi.dim()) + ", expected " +
                         std::to_string(d));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(chi.matrix());
  std::vector<ResourceTerm> terms;
  for (Index k = d; k-- > 0;) {
    const double p = es.eigenvalues()(k);
    if (p < kEigenvalueCutoff) continue;
    const ComplexVector psi = es.eigenvectors().col(k);
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = psi(j * n + i);
    }
    terms.push_back({p, std::move(a)});
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Kraus representation

namespace detail {

/// <k|_second X |j>_second for X on H_a (x) H_b, as an n_a x n_a matrix.
inline ComplexMatrix second_factor_element(const ComplexMatrix& x, Index na, Index nb, Index k, Index j) {
  ComplexMatrix out(na, na);
  for (Index a = 0; a < na; ++a) {
    for (Index b = 0; b < na; ++b) out(a, b) = x(a * nb + k, b * nb + j);
  }
  return out;
}

inline void require_resource(const DensityMatrix& chi, int n) {
  if (chi.dim() != static_cast<Index>(n) * n) {
    throw DimensionError("resource dimension does not match the channel's n");
  }
}

inline void require_input(const DensityMatrix& rho, int n) {
  if (rho.dim() != n) throw DimensionError("input state dimension does not match the channel's n");
}

}  // namespace detail

/// Kraus operators of the teleportation channel defined by (spec, chi).
inline std::vector<ComplexMatrix> kraus_operators(const ChannelSpec& spec, const DensityMatrix& chi) {
  const int n = spec.n();
  detail::require_resource(chi, n);
  const auto terms = decompose_resource(chi, n);
  const auto& t = spec.corrections();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<ComplexMatrix> kraus;

  switch (spec.protocol()) {
    case Protocol::one_channel_bell: {
      for (const auto& idx : WeylIndex::all(n)) {
        const ComplexMatrix ud = weyl_u(idx).adjoint();
        for (const auto& a : terms) {
          kraus.push_back(std::sqrt(a.weight * inv_n) * (t[static_cast<std::size_t>(idx.flat())] * a.coefficients * ud));
        }
      }
      break;
    }
    case Protocol::two_channel_bell: {
      for (const auto& idx : WeylIndex::all(n)) {
        const ComplexMatrix left = kron(t[static_cast<std::size_t>(idx.flat())], id) * spec.v();
        const ComplexMatrix right = spec.w() * kron(weyl_u(idx).adjoint(), id);
        for (const auto& a : terms) {
          for (const auto& b : terms) {
            const ComplexMatrix x = left * kron(a.coefficients, b.coefficients) * right;
            const double scale = std::sqrt(a.weight * b.weight * inv_n);
            for (Index k = 0; k < n; ++k) {
              for (Index j = 0; j < n; ++j) kraus.push_back(scale * detail::second_factor_element(x, n, n, k, j));
            }
          }
        }
      }
      break;
    }
    case Protocol::two_channel_ghz: {
      for (const auto& idx : GhzIndex::all(n)) {
        const ComplexMatrix right = spec.w() * utilde_adjoint(idx);
        const ComplexMatrix& tc = t[static_cast<std::size_t>(idx.flat())];
        for (const auto& a : terms) {
          for (const auto& b : terms) {
            const ComplexMatrix y = tc * kron(a.coefficients, b.coefficients) * right;  // n^2 x n
            const double scale = std::sqrt(a.weight * b.weight * inv_n);
            for (Index k = 0; k < n; ++k) {
              ComplexMatrix kr(n, n);
              for (Index r = 0; r < n; ++r) kr.row(r) = y.row(r * n + k);
              kraus.push_back(scale * kr);
            }
          }
        }
      }
      break;
    }
  }
  return kraus;
}

inline ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

/// sum_K K^dagger K; equals I exactly when the channel is trace preserving.
inline ComplexMatrix kraus_completeness(const std::vector<ComplexMatrix>& kraus) {
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& k : kraus) out.noalias() += k.adjoint() * k;
  return out;
}

/// Choi matrix sum_K |K>><<K| with |K>> = sum_i |i> (x) K|i>.
inline ComplexMatrix choi_matrix(const std::vector<ComplexMatrix>& kraus) {
  const Index n = kraus.front().rows();
  ComplexMatrix j = ComplexMatrix::Zero(n * n, n * n);
  ComplexVector v(n * n);
  for (const auto& k : kraus) {
    for (Index i = 0; i < n; ++i) v.segment(i * n, n) = k.col(i);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

/// Equivalent Kraus set of minimal size (at most n^2), from the Choi spectrum.
inline std::vector<ComplexMatrix> compress_kraus(const std::vector<ComplexMatrix>& kraus) {
  const Index n = kraus.front().rows();
  const ComplexMatrix j = choi_matrix(kraus);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (j + j.adjoint()));
  const double cutoff = 1e-15 * std::max(1.0, j.trace().real());
  std::vector<ComplexMatrix> out;
  for (Index e = n * n; e-- > 0;) {
    const double lambda = es.eigenvalues()(e);
    if (lambda <= cutoff) continue;
    ComplexMatrix k(n, n);
    for (Index i = 0; i < n; ++i) k.col(i) = std::sqrt(lambda) * es.eigenvectors().col(e).segment(i * n, n);
    out.push_back(std::move(k));
  }
  return out;
}

/// Lambda(rho_in) for the given protocol and resource.
inline DensityMatrix apply_channel(const ChannelSpec& spec, const DensityMatrix& chi, const DensityMatrix& rho_in) {
  detail::require_input(rho_in, spec.n());
  ComplexMatrix out = apply_kraus(kraus_operators(spec, chi), rho_in.matrix());
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out), Dims{spec.n()});
}

// ---------------------------------------------------------------------------
// Independent evaluation from Bell-basis matrix elements

inline constexpr int kOracleMaxDim = 3;

/// <Phi_a|chi|Phi_b> over the Weyl enumeration.
inline ComplexMatrix bell_matrix_elements(const ComplexMatrix& chi, int n) {
  ComplexMatrix basis(static_cast<Index>(n) * n, static_cast<Index>(n) * n);
  for (const auto& idx : WeylIndex::all(n)) basis.col(idx.flat()) = bell_state(idx).amplitudes();
  return basis.adjoint() * chi * basis;
}

/// The channel evaluated as the sum over products of Bell-basis matrix
/// elements of chi (n^10 terms for the two-channel protocols). Shares no code
/// path with `kraus_operators` beyond the basis constructors.
inline DensityMatrix apply_channel_oracle(const ChannelSpec& spec, const DensityMatrix& chi,
                                          const DensityMatrix& rho_in) {
  const int n = spec.n();
  if (n > kOracleMaxDim) throw DimensionError("apply_channel_oracle: refused for n > 3 (cost guard)");
  detail::require_resource(chi, n);
  detail::require_input(rho_in, n);
  const ComplexMatrix c = bell_matrix_elements(chi.matrix(), n);
  const auto weyl = WeylIndex::all(n);
  std::vector<ComplexMatrix> u;
  for (const auto& idx : weyl) u.push_back(weyl_u(idx));
  const auto nw = static_cast<Index>(u.size());
  const auto& t = spec.corrections();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix& rho = rho_in.matrix();
  const double nd = static_cast<double>(n);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);

  if (spec.protocol() == Protocol::one_channel_bell) {
    for (const auto& idx : weyl) {
      const ComplexMatrix& ust = u[static_cast<std::size_t>(idx.flat())];
      const ComplexMatrix y = ust.adjoint() * rho * ust;
      const ComplexMatrix& tc = t[static_cast<std::size_t>(idx.flat())];
      for (Index a = 0; a < nw; ++a) {
        for (Index b = 0; b < nw; ++b) {
          out += c(a, b) * (tc * u[static_cast<std::size_t>(a)] * y *
                            u[static_cast<std::size_t>(b)].adjoint() * tc.adjoint());
        }
      }
    }
    out /= nd * nd;
  } else {
    // Two-channel: (1/n^3) sum c(a1,b1) c(a2,b2) sum_branch tr_4[ L_a M L_b^dagger ].
    std::vector<ComplexMatrix> pair_ops;  // (U_a1 (x) U_a2), a = a1 * nw + a2
    for (Index a1 = 0; a1 < nw; ++a1) {
      for (Index a2 = 0; a2 < nw; ++a2) pair_ops.push_back(kron(u[static_cast<std::size_t>(a1)], u[static_cast<std::size_t>(a2)]));
    }
    std::vector<std::pair<ComplexMatrix, ComplexMatrix>> branches;  // (left factor, inner operator)
    if (spec.protocol() == Protocol::two_channel_bell) {
      for (const auto& idx : weyl) {
        const ComplexMatrix& ust = u[static_cast<std::size_t>(idx.flat())];
        const ComplexMatrix inner = spec.w() * kron(ust.adjoint() * rho * ust, id) * spec.w().adjoint();
        branches.emplace_back(kron(t[static_cast<std::size_t>(idx.flat())], id) * spec.v(), inner);
      }
    } else {
      for (const auto& idx : GhzIndex::all(n)) {
        const ComplexMatrix ud = utilde_adjoint(idx);
        const ComplexMatrix inner = spec.w() * ud * rho * ud.adjoint() * spec.w().adjoint();
        branches.emplace_back(t[static_cast<std::size_t>(idx.flat())], inner);
      }
    }
    const Index d = static_cast<Index>(n) * n;
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (const auto& [left, inner] : branches) {
      ComplexMatrix branch_sum = ComplexMatrix::Zero(d, d);
      for (Index a1 = 0; a1 < nw; ++a1) {
        for (Index b1 = 0; b1 < nw; ++b1) {
          for (Index a2 = 0; a2 < nw; ++a2) {
            for (Index b2 = 0; b2 < nw; ++b2) {
              const Complex coeff = c(a1, b1) * c(a2, b2);
              branch_sum += coeff * (pair_ops[static_cast<std::size_t>(a1 * nw + a2)] * inner *
                                     pair_ops[static_cast<std::size_t>(b1 * nw + b2)].adjoint());
            }
          }
        }
      }
      acc += left * branch_sum * left.adjoint();
    }
    out = partial_trace(acc, Dims{n, n}, {0}) / (nd * nd * nd);
  }
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out), Dims{n});
}

// ---------------------------------------------------------------------------
// Fidelities

/// (n F + 1) / (n + 1).
inline double fidelity_closed_form(double entangled_fraction, int n) {
  detail::require_local_dim(n, "fidelity_closed_form");
  if (entangled_fraction < -1e-9 || entangled_fraction > 1.0 + 1e-9) {
    throw ValidationError("entangled_fraction", "value " + std::to_string(entangled_fraction) + " outside [0, 1]");
  }
  const double nd = static_cast<double>(n);
  return (nd * entangled_fraction + 1.0) / (nd + 1.0);
}

/// Entangled fraction of the channel at its fixed (W, V, T): sum_K |tr K|^2 / n^2.
inline double channel_entangled_fraction(const ChannelSpec& spec, const DensityMatrix& chi) {
  const auto kraus = compress_kraus(kraus_operators(spec, chi));
  double acc = 0.0;
  for (const auto& k : kraus) acc += std::norm(k.trace());
  const double nd = static_cast<double>(spec.n());
  return acc / (nd * nd);
}

/// Input-averaged fidelity at fixed (W, V, T) via the closed-form twirl:
/// <00| twirl(sum_K K (x) K^dagger) |00>.
inline double twirl_fidelity(const ChannelSpec& spec, const DensityMatrix& chi) {
  const auto kraus = compress_kraus(kraus_operators(spec, chi));
  const Index n = spec.n();
  ComplexMatrix sigma = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& k : kraus) sigma += kron(k, ComplexMatrix(k.adjoint()));
  return schur_twirl(sigma)(0, 0).real();
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

namespace detail {

struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    const auto total = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }
};

}  // namespace detail

inline constexpr std::size_t kMonteCarloStreams = 8;

/// Mean of <phi|Lambda(|phi><phi|)|phi> over Haar-random pure inputs. Samples
/// are split over a fixed number of generator streams (forks of `seed`), so
/// the estimate does not depend on `workers`.
inline MonteCarloEstimate average_fidelity_mc(const ChannelSpec& spec, const DensityMatrix& chi,
                                              std::size_t samples, std::uint64_t seed, unsigned workers = 1) {
  if (samples < 100) throw ValidationError("samples", "at least 100 samples are required");
  const auto kraus = compress_kraus(kraus_operators(spec, chi));
  const Index n = spec.n();
  const Rng root(seed);

  auto run_stream = [&](std::size_t stream) {
    Rng rng = root.fork(stream);
    const std::size_t begin = samples * stream / kMonteCarloStreams;
    const std::size_t end = samples * (stream + 1) / kMonteCarloStreams;
    detail::RunningStats stats;
    for (std::size_t s = begin; s < end; ++s) {
      const ComplexVector phi = haar_state(n, rng).amplitudes();
      double f = 0.0;
      for (const auto& k : kraus) f += std::norm(phi.dot(k * phi));
      stats.push(f);
    }
    return stats;
  };

  std::vector<detail::RunningStats> parts(kMonteCarloStreams);
  if (workers <= 1) {
    for (std::size_t s = 0; s < kMonteCarloStreams; ++s) parts[s] = run_stream(s);
  } else {
    std::vector<std::future<detail::RunningStats>> futures;
    for (std::size_t s = 0; s < kMonteCarloStreams; ++s) futures.push_back(std::async(std::launch::async, run_stream, s));
    for (std::size_t s = 0; s < kMonteCarloStreams; ++s) parts[s] = futures[s].get();
  }
  detail::RunningStats total;
  for (const auto& p : parts) total.merge(p);
  const double variance = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
  return {total.mean, std::sqrt(std::max(variance, 0.0) / static_cast<double>(total.count)), total.count};
}

}  // namespace qtl
