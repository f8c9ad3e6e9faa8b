#pragma once

// Weyl-Heisenberg operators, generalized Bell and GHZ bases, the rectangular
// GHZ maps, and the closed-form U (x) U twirl.
//
// Index arithmetic is always modulo n. Powers of the root of unity
// w = exp(-2 pi i / n) are taken from a table indexed by (k mod n), never by
// repeated multiplication.

#include <cmath>
#include <string>
#include <vector>

#include "qtl/tensor.hpp"

namespace qtl {

namespace detail {

inline int mod(long long k, int n) {
  const long long r = k % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline void require_local_dim(int n, const char* what) {
  if (n < 2) throw DimensionError(std::string(what) + ": local dimension must be at least 2");
}

}  // namespace detail

/// Table of w^k, k = 0..n-1, with w = exp(-2 pi i / n).
class RootsOfUnity {
 public:
  explicit RootsOfUnity(int n) : n_(n), table_(static_cast<std::size_t>(n)) {
    for (int k = 0; k < n; ++k) {
      const double angle = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
      table_[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
    }
  }

  Complex operator()(long long k) const { return table_[static_cast<std::size_t>(detail::mod(k, n_))]; }
  int n() const noexcept { return n_; }

 private:
  int n_;
  std::vector<Complex> table_;
};

/// (s, t) label of the Weyl operator U_st = h^t g^s.
struct WeylIndex {
  int s = 0;
  int t = 0;
  int n = 2;

  WeylIndex() = default;
  WeylIndex(int s_, int t_, int n_) : s(s_), t(t_), n(n_) {
    detail::require_local_dim(n, "WeylIndex");
    if (s < 0 || s >= n || t < 0 || t >= n) throw DimensionError("WeylIndex: s, t must lie in [0, n)");
  }

  /// Position in the canonical enumeration (s major).
  int flat() const noexcept { return s * n + t; }

  static WeylIndex from_flat(int k, int n) { return {k / n, k % n, n}; }

  static std::vector<WeylIndex> all(int n) {
    std::vector<WeylIndex> out;
    for (int k = 0; k < n * n; ++k) out.push_back(from_flat(k, n));
    return out;
  }
};

/// (r, m, s) label of the GHZ operator U^s_rm = h^r g^s (x) h^m.
struct GhzIndex {
  int r = 0;
  int m = 0;
  int s = 0;
  int n = 2;

  GhzIndex() = default;
  GhzIndex(int r_, int m_, int s_, int n_) : r(r_), m(m_), s(s_), n(n_) {
    detail::require_local_dim(n, "GhzIndex");
    if (r < 0 || r >= n || m < 0 || m >= n || s < 0 || s >= n) {
      throw DimensionError("GhzIndex: r, m, s must lie in [0, n)");
    }
  }

  int flat() const noexcept { return (r * n + m) * n + s; }

  static GhzIndex from_flat(int k, int n) { return {k / (n * n), (k / n) % n, k % n, n}; }

  static std::vector<GhzIndex> all(int n) {
    std::vector<GhzIndex> out;
    for (int k = 0; k < n * n * n; ++k) out.push_back(from_flat(k, n));
    return out;
  }
};

/// Cyclic shift h|j> = |j+1 mod n>.
inline ComplexMatrix weyl_h(int n) {
  detail::require_local_dim(n, "weyl_h");
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) h((j + 1) % n, j) = 1.0;
  return h;
}

/// Clock g|j> = w^j |j>.
inline ComplexMatrix weyl_g(int n) {
  detail::require_local_dim(n, "weyl_g");
  const RootsOfUnity w(n);
  ComplexMatrix g = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) g(j, j) = w(j);
  return g;
}

/// h^a g^b: maps |j> to w^{b j} |j + a>.
inline ComplexMatrix shift_clock(int a, int b, int n) {
  detail::require_local_dim(n, "shift_clock");
  const RootsOfUnity w(n);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) out(detail::mod(j + a, n), j) = w(static_cast<long long>(b) * j);
  return out;
}

/// U_st = h^t g^s.
inline ComplexMatrix weyl_u(const WeylIndex& idx) { return shift_clock(idx.t, idx.s, idx.n); }

/// Maximally entangled |Phi> = n^{-1/2} sum_i |ii>.
inline ComplexVector max_entangled_vector(int n) {
  ComplexVector v = ComplexVector::Zero(static_cast<Index>(n) * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) v(i * n + i) = amp;
  return v;
}

/// |Phi_st> = (1 (x) U_st)|Phi>; component <ij|Phi_st> = (U_st)_{ji} / sqrt(n).
inline PureState bell_state(const WeylIndex& idx) {
  const int n = idx.n;
  const ComplexMatrix u = weyl_u(idx);
  ComplexVector v(static_cast<Index>(n) * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) v(i * n + j) = u(j, i) * amp;
  }
  return PureState(std::move(v), Dims{n, n});
}

/// U^s_rm = h^r g^s (x) h^m.
inline ComplexMatrix ghz_u(const GhzIndex& idx) {
  return kron(shift_clock(idx.r, idx.s, idx.n), shift_clock(idx.m, 0, idx.n));
}

/// |Phi^s_rm> = n^{-1/2} sum_j w^{js} |j, j+r, j+m>.
inline PureState ghz_state(const GhzIndex& idx) {
  const int n = idx.n;
  const RootsOfUnity w(n);
  ComplexVector v = ComplexVector::Zero(static_cast<Index>(n) * n * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    const int b = detail::mod(j + idx.r, n);
    const int c = detail::mod(j + idx.m, n);
    v((j * n + b) * n + c) = amp * w(static_cast<long long>(j) * idx.s);
  }
  return PureState(std::move(v), Dims{n, n, n});
}

/// The n^2 x n map Utilde^{s dagger}_rm = sum_j w^{-js} |j+r, j+m><j|, i.e.
/// (h^r g^{s*} (x) h^m) E with E = sum_i |ii><i|. It sends H to H (x) H.
inline ComplexMatrix utilde_adjoint(const GhzIndex& idx) {
  const int n = idx.n;
  const RootsOfUnity w(n);
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Index>(n) * n, n);
  for (int j = 0; j < n; ++j) {
    const int b = detail::mod(j + idx.r, n);
    const int c = detail::mod(j + idx.m, n);
    out(b * n + c, j) = w(-static_cast<long long>(j) * idx.s);
  }
  return out;
}

/// Utilde^s_rm, the n x n^2 adjoint of `utilde_adjoint`.
inline ComplexMatrix utilde(const GhzIndex& idx) { return utilde_adjoint(idx).adjoint(); }

/// E = sum_i |ii><i| (n^2 x n).
inline ComplexMatrix copy_isometry(int n) {
  detail::require_local_dim(n, "copy_isometry");
  ComplexMatrix e = ComplexMatrix::Zero(static_cast<Index>(n) * n, n);
  for (int i = 0; i < n; ++i) e(i * n + i, i) = 1.0;
  return e;
}

/// E_i = sum_j |jj><ji| (n^2 x n^2).
inline ComplexMatrix e_i(int n, int i) {
  detail::require_local_dim(n, "e_i");
  if (i < 0 || i >= n) throw DimensionError("e_i: index out of range");
  ComplexMatrix e = ComplexMatrix::Zero(static_cast<Index>(n) * n, static_cast<Index>(n) * n);
  for (int j = 0; j < n; ++j) e(j * n + j, j * n + i) = 1.0;
  return e;
}

/// Flip P|ab> = |ba> on H (x) H.
inline ComplexMatrix flip(int n) {
  ComplexMatrix p = ComplexMatrix::Zero(static_cast<Index>(n) * n, static_cast<Index>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) p(b * n + a, a * n + b) = 1.0;
  }
  return p;
}

/// Integer n with n*n == d, or throws.
inline int local_dim_of_square(Index d, const char* what) {
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
  if (static_cast<Index>(n) * n != d) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(d) + " is not a perfect square");
  }
  return n;
}

/// Haar average of (U^dagger (x) U^dagger) sigma (U (x) U), in closed form
/// alpha1 I (x) I + alpha2 P.
inline ComplexMatrix schur_twirl(const ComplexMatrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw DimensionError("schur_twirl: operator is not square");
  const int n = local_dim_of_square(sigma.rows(), "schur_twirl");
  if (n < 2) throw DimensionError("schur_twirl: local dimension must be at least 2");
  const ComplexMatrix p = flip(n);
  const Complex tr = sigma.trace();
  const Complex tr_p = (sigma * p).trace();
  const double nn = static_cast<double>(n);
  const double denom = nn * nn * (nn * nn - 1.0);
  const Complex alpha1 = (nn * nn * tr - nn * tr_p) / denom;
  const Complex alpha2 = (nn * nn * tr_p - nn * tr) / denom;
  return alpha1 * ComplexMatrix::Identity(sigma.rows(), sigma.cols()) + alpha2 * p;
}

}  // namespace qtl
