#pragma once

// Named two-party resource states on H (x) H.

#include <cmath>
#include <vector>

#include "qtl/bases.hpp"
#include "qtl/tensor.hpp"

namespace qtl {

inline DensityMatrix maximally_entangled_state(int n) {
  detail::require_local_dim(n, "maximally_entangled_state");
  const ComplexVector phi = max_entangled_vector(n);
  return DensityMatrix(phi * phi.adjoint(), Dims{n, n});
}

inline DensityMatrix maximally_mixed_state(int n) {
  detail::require_local_dim(n, "maximally_mixed_state");
  const Index d = static_cast<Index>(n) * n;
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d), Dims{n, n});
}

/// p |Phi><Phi| + (1 - p) I / n^2.
inline DensityMatrix isotropic_state(int n, double p) {
  if (p < 0.0 || p > 1.0) throw ValidationError("p", "isotropic weight must lie in [0, 1]");
  return mix(maximally_entangled_state(n), maximally_mixed_state(n), p);
}

/// Pure state sum_i sqrt(lambda_i) |ii> with the given Schmidt weights.
inline DensityMatrix schmidt_state(const std::vector<double>& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  detail::require_local_dim(n, "schmidt_state");
  ComplexVector psi = ComplexVector::Zero(static_cast<Index>(n) * n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (lambdas[static_cast<std::size_t>(i)] < 0.0) throw ValidationError("schmidt", "negative Schmidt weight");
    psi(i * n + i) = std::sqrt(lambdas[static_cast<std::size_t>(i)]);
    total += lambdas[static_cast<std::size_t>(i)];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("schmidt", "Schmidt weights must sum to 1");
  return DensityMatrix(psi * psi.adjoint(), Dims{n, n});
}

/// (u (x) v) chi (u (x) v)^dagger.
inline DensityMatrix local_rotation(const DensityMatrix& chi, const ComplexMatrix& u, const ComplexMatrix& v) {
  const ComplexMatrix uv = kron(u, v);
  ComplexMatrix m = conjugate(uv, chi.matrix());
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(m), chi.dims());
}

/// Random two-party resource on C^n (x) C^n from the Hilbert-Schmidt ensemble.
inline DensityMatrix random_resource(int n, Rng& rng) {
  detail::require_local_dim(n, "random_resource");
  return random_density(Dims{n, n}, rng);
}

}  // namespace qtl
