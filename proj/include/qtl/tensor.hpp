#pragma once

// Dense complex linear algebra on tensor-product spaces: Kronecker products,
// subsystem embeddings and permutations, partial traces, the matrix
// exponential, and seeded Haar / Ginibre sampling.
//
// Subsystems ("slots") are ordered most-significant first: for dims
// {d0, d1, d2} the basis ket |a b c> has flat index (a*d1 + b)*d2 + c.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qtl/errors.hpp"

namespace qtl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Dims = std::vector<Index>;

inline constexpr Complex kImag{0.0, 1.0};
inline constexpr std::uint64_t kDefaultSeed = 42;

namespace tolerance {
inline constexpr double kHermiticity = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kMinEigenvalue = -1e-10;
inline constexpr double kPureNorm = 1e-12;
inline constexpr double kUnitary = 1e-10;
}  // namespace tolerance

// ---------------------------------------------------------------------------
// Random numbers

/// Seedable, splittable generator. Children derived with `fork(k)` depend only
/// on (seed, k), so work split across k independent streams reproduces
/// bit-for-bit regardless of how the streams are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  Rng fork(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1))));
  }

  /// Next child stream; advances an internal counter.
  Rng split() { return fork(children_++); }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Standard complex normal: real and imaginary parts N(0, 1/2).
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t children_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Residuals and checks

inline double hermiticity_residual(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Frobenius norm of U^dagger U - I.
inline double unitarity_residual(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

inline bool is_unitary(const ComplexMatrix& u, double tol = tolerance::kUnitary) {
  return unitarity_residual(u) <= tol;
}

inline void require_unitary(const ComplexMatrix& u, const std::string& what,
                            double tol = tolerance::kUnitary) {
  const double r = unitarity_residual(u);
  if (!(r <= tol)) {
    throw ValidationError("unitarity", what + " is not unitary (residual " + std::to_string(r) + ")");
  }
}

/// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue(const ComplexMatrix& m) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Subsystem bookkeeping

inline Index dims_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

namespace detail {

inline std::vector<Index> strides(const Dims& dims) {
  std::vector<Index> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

inline void check_slots(const Dims& dims, const std::vector<Index>& slots, const char* what) {
  std::vector<bool> seen(dims.size(), false);
  for (Index s : slots) {
    if (s < 0 || s >= static_cast<Index>(dims.size())) {
      throw DimensionError(std::string(what) + ": slot " + std::to_string(s) + " out of range");
    }
    if (seen[static_cast<std::size_t>(s)]) {
      throw DimensionError(std::string(what) + ": repeated slot " + std::to_string(s));
    }
    seen[static_cast<std::size_t>(s)] = true;
  }
}

inline std::vector<Index> complement(const Dims& dims, const std::vector<Index>& slots) {
  std::vector<Index> rest;
  for (Index k = 0; k < static_cast<Index>(dims.size()); ++k) {
    if (std::find(slots.begin(), slots.end(), k) == slots.end()) rest.push_back(k);
  }
  return rest;
}

/// Flat offsets in the full space of every basis ket of the sub-register
/// `slots` (enumerated with slots[0] most significant), other digits zero.
inline std::vector<Index> offsets(const Dims& dims, const std::vector<Index>& slots) {
  const auto stride = strides(dims);
  std::vector<Index> out{0};
  for (Index s : slots) {
    std::vector<Index> next;
    next.reserve(out.size() * static_cast<std::size_t>(dims[static_cast<std::size_t>(s)]));
    for (Index base : out) {
      for (Index digit = 0; digit < dims[static_cast<std::size_t>(s)]; ++digit) {
        next.push_back(base + digit * stride[static_cast<std::size_t>(s)]);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Products, embeddings, traces

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Operator on the full register acting as `op` on `slots` (in the given
/// order, first slot most significant within op) and as identity elsewhere.
inline ComplexMatrix embed(const ComplexMatrix& op, const Dims& dims, const std::vector<Index>& slots) {
  detail::check_slots(dims, slots, "embed");
  Index sub = 1;
  for (Index s : slots) sub *= dims[static_cast<std::size_t>(s)];
  if (op.rows() != sub || op.cols() != sub) {
    throw DimensionError("embed: operator is " + std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + ", slots span dimension " + std::to_string(sub));
  }
  const Index total = dims_product(dims);
  const auto in = detail::offsets(dims, slots);
  const auto rest = detail::offsets(dims, detail::complement(dims, slots));
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  for (Index base : rest) {
    for (Index i = 0; i < sub; ++i) {
      for (Index j = 0; j < sub; ++j) {
        out(base + in[static_cast<std::size_t>(i)], base + in[static_cast<std::size_t>(j)]) = op(i, j);
      }
    }
  }
  return out;
}

/// Reorders tensor factors: slot k of the result is slot order[k] of the input.
inline ComplexMatrix permute_subsystems(const ComplexMatrix& m, const Dims& dims,
                                        const std::vector<Index>& order) {
  if (order.size() != dims.size()) throw DimensionError("permute_subsystems: order must list every slot");
  detail::check_slots(dims, order, "permute_subsystems");
  const auto map = detail::offsets(dims, order);
  const Index total = dims_product(dims);
  if (m.rows() != total || m.cols() != total) throw DimensionError("permute_subsystems: matrix/dims mismatch");
  ComplexMatrix out(total, total);
  for (Index i = 0; i < total; ++i) {
    for (Index j = 0; j < total; ++j) {
      out(i, j) = m(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

inline ComplexVector permute_subsystems(const ComplexVector& v, const Dims& dims,
                                        const std::vector<Index>& order) {
  if (order.size() != dims.size()) throw DimensionError("permute_subsystems: order must list every slot");
  detail::check_slots(dims, order, "permute_subsystems");
  const auto map = detail::offsets(dims, order);
  ComplexVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = v(map[static_cast<std::size_t>(i)]);
  return out;
}

/// Traces out every slot not in `keep`; the result's factors follow `keep`'s order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims, const std::vector<Index>& keep) {
  if (keep.empty()) throw DimensionError("partial_trace: keep list is empty");
  detail::check_slots(dims, keep, "partial_trace");
  if (m.rows() != dims_product(dims) || m.cols() != m.rows()) {
    throw DimensionError("partial_trace: matrix/dims mismatch");
  }
  const auto kept = detail::offsets(dims, keep);
  const auto traced = detail::offsets(dims, detail::complement(dims, keep));
  const auto dk = static_cast<Index>(kept.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index a = 0; a < dk; ++a) {
    for (Index b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (Index t : traced) acc += m(kept[static_cast<std::size_t>(a)] + t, kept[static_cast<std::size_t>(b)] + t);
      out(a, b) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix exponential

/// Scaling-and-squaring Pade exponential (Eigen's MatrixFunctions).
inline ComplexMatrix mat_exp(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("mat_exp: matrix is not square");
  return a.exp();
}

/// exp(t*A) for a fixed skew-Hermitian A and many t. A = iH is diagonalized
/// once, so every exp(tA) is exactly unitary up to the eigenbasis rounding.
class SkewHermitianExp {
 public:
  explicit SkewHermitianExp(const ComplexMatrix& a) {
    const ComplexMatrix h = -kImag * a;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
  }

  ComplexMatrix operator()(double t) const {
    ComplexVector phases(values_.size());
    for (Index k = 0; k < values_.size(); ++k) phases(k) = std::exp(kImag * (t * values_(k)));
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

 private:
  ComplexMatrix vectors_;
  RealVector values_;
};

// ---------------------------------------------------------------------------
// States

/// Unit vector with subsystem metadata.
class PureState {
 public:
  PureState(ComplexVector amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (dims_product(dims_) != amplitudes_.size()) {
      throw ValidationError("dims", "subsystem dimensions do not multiply to the vector length");
    }
    const double err = std::abs(amplitudes_.norm() - 1.0);
    if (!(err <= tolerance::kPureNorm)) {
      throw ValidationError("norm", "state vector norm differs from 1 by " + std::to_string(err));
    }
  }

  explicit PureState(const ComplexVector& amplitudes) : PureState(amplitudes, Dims{amplitudes.size()}) {}

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  const Dims& dims() const noexcept { return dims_; }
  Index dim() const noexcept { return amplitudes_.size(); }
  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  ComplexVector amplitudes_;
  Dims dims_;
};

struct DensityDiagnostics {
  double hermiticity = 0.0;     // max |M - M^dagger|
  double trace_error = 0.0;     // |tr M - 1|
  double min_eigenvalue = 0.0;
};

inline DensityDiagnostics diagnose_density(const ComplexMatrix& m) {
  DensityDiagnostics d;
  d.hermiticity = hermiticity_residual(m);
  d.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  d.min_eigenvalue = min_eigenvalue(m);
  return d;
}

inline void validate_density(const ComplexMatrix& m, const Dims& dims) {
  if (m.rows() != m.cols()) throw ValidationError("dims", "density matrix is not square");
  if (dims_product(dims) != m.rows()) {
    throw ValidationError("dims", "subsystem dimensions do not multiply to the matrix dimension");
  }
  if (!m.allFinite()) throw ValidationError("finite", "density matrix has non-finite entries");
  const auto d = diagnose_density(m);
  if (!(d.hermiticity <= tolerance::kHermiticity)) {
    throw ValidationError("hermiticity", "max |M - M^dagger| = " + std::to_string(d.hermiticity));
  }
  if (!(d.trace_error <= tolerance::kTrace)) {
    throw ValidationError("trace", "|tr M - 1| = " + std::to_string(d.trace_error));
  }
  if (!(d.min_eigenvalue >= tolerance::kMinEigenvalue)) {
    throw ValidationError("positivity", "minimal eigenvalue " + std::to_string(d.min_eigenvalue));
  }
}

/// Hermitian, positive semidefinite, unit-trace matrix. Every constructor validates.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix m, Dims dims) : matrix_(std::move(m)), dims_(std::move(dims)) {
    validate_density(matrix_, dims_);
  }

  explicit DensityMatrix(ComplexMatrix m) : DensityMatrix(m, Dims{m.rows()}) {}

  explicit DensityMatrix(const PureState& psi) : DensityMatrix(psi.projector(), psi.dims()) {}

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const Dims& dims() const noexcept { return dims_; }
  Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
  Dims dims_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<Index>& keep) {
  Dims kept_dims;
  detail::check_slots(rho.dims(), keep, "partial_trace");
  for (Index s : keep) kept_dims.push_back(rho.dims()[static_cast<std::size_t>(s)]);
  return DensityMatrix(partial_trace(rho.matrix(), rho.dims(), keep), std::move(kept_dims));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(kron(a.matrix(), b.matrix()), std::move(dims));
}

/// xi*a + (1-xi)*b.
inline DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double xi) {
  if (a.dims() != b.dims()) throw DimensionError("mix: subsystem dimensions differ");
  return DensityMatrix(xi * a.matrix() + (1.0 - xi) * b.matrix(), a.dims());
}

// ---------------------------------------------------------------------------
// Sampling

/// Matrix of i.i.d. standard complex normals.
inline ComplexMatrix ginibre(Index rows, Index cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
inline ComplexMatrix haar_unitary(Index d, Rng& rng) {
  if (d < 1) throw DimensionError("haar_unitary: dimension must be positive");
  const ComplexMatrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    const double mod = std::abs(diag);
    q.col(k) *= (mod > 0.0) ? diag / mod : Complex(1.0, 0.0);
  }
  return q;
}

inline PureState haar_state(Index d, Rng& rng) {
  ComplexVector v = ginibre(d, 1, rng).col(0);
  v /= v.norm();
  return PureState(std::move(v), Dims{d});
}

/// G G^dagger / tr(G G^dagger) for a square Ginibre G (Hilbert-Schmidt measure).
inline DensityMatrix random_density(const Dims& dims, Rng& rng) {
  const Index d = dims_product(dims);
  if (d < 1) throw DimensionError("random_density: dimension must be positive");
  const ComplexMatrix g = ginibre(d, d, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(m), dims);
}

inline DensityMatrix random_density(Index d, Rng& rng) { return random_density(Dims{d}, rng); }

/// Conjugation by u: u m u^dagger.
inline ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m) {
  return u * m * u.adjoint();
}

/// Frobenius inner product Re tr(a^dagger b).
inline double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace qtl
