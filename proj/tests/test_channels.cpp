#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qtl/bases.hpp"
#include "qtl/channels.hpp"
#include "qtl/states.hpp"

using namespace qtl;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<ComplexMatrix> haar_family(std::size_t count, Index d, Rng& rng) {
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(haar_unitary(d, rng));
  return out;
}

/// Projector onto the measurement outcome paired with U_st^dagger in the
/// reduced Kraus form: (U_st (x) 1)|Phi>.
ComplexMatrix outcome_projector(const WeylIndex& idx) {
  const int n = idx.n;
  const ComplexVector b = kron(weyl_u(idx), ComplexMatrix::Identity(n, n)) * max_entangled_vector(n);
  return b * b.adjoint();
}

/// Full simulation on particles (0 | 1 2 | 3 4): Alice applies W_A on (1, 3),
/// measures (0, 1), Bob applies V on (2, 4), then T_st on 2. W_A = W^T for the
/// operator W that enters the reduced form on Bob's side.
ComplexMatrix simulate_two_channel(const ChannelSpec& spec, const DensityMatrix& chi, const DensityMatrix& rho) {
  const int n = spec.n();
  const Dims dims{n, n, n, n, n};
  ComplexMatrix state = kron(kron(rho.matrix(), chi.matrix()), chi.matrix());
  state = conjugate(embed(spec.w().transpose(), dims, {1, 3}), state);
  const ComplexMatrix v = embed(spec.v(), dims, {2, 4});
  ComplexMatrix acc = ComplexMatrix::Zero(state.rows(), state.cols());
  for (const auto& idx : WeylIndex::all(n)) {
    const ComplexMatrix p = embed(outcome_projector(idx), dims, {0, 1});
    const ComplexMatrix ops = embed(spec.corrections()[static_cast<std::size_t>(idx.flat())], dims, {2}) * v * p;
    acc += ops * state * ops.adjoint();
  }
  return partial_trace(acc, dims, {2});
}

ComplexMatrix simulate_one_channel(const ChannelSpec& spec, const DensityMatrix& chi, const DensityMatrix& rho) {
  const int n = spec.n();
  const Dims dims{n, n, n};
  const ComplexMatrix state = kron(rho.matrix(), chi.matrix());
  ComplexMatrix acc = ComplexMatrix::Zero(state.rows(), state.cols());
  for (const auto& idx : WeylIndex::all(n)) {
    const ComplexMatrix ops = embed(spec.corrections()[static_cast<std::size_t>(idx.flat())], dims, {2}) *
                              embed(outcome_projector(idx), dims, {0, 1});
    acc += ops * state * ops.adjoint();
  }
  return partial_trace(acc, dims, {2});
}

}  // namespace

TEST_CASE("ideal resources teleport perfectly") {
  Rng rng(21);
  for (int n : {2, 3}) {
    const DensityMatrix phi = maximally_entangled_state(n);
    for (int k = 0; k < 20; ++k) {
      const DensityMatrix rho = random_density(n, rng);
      CHECK(oracle::max_abs(apply_channel(ChannelSpec::one_channel(n), phi, rho).matrix() - rho.matrix()) < 1e-10);
      CHECK(oracle::max_abs(apply_channel(ChannelSpec::two_channel_bell(n), phi, rho).matrix() - rho.matrix()) < 1e-10);
      CHECK(oracle::max_abs(apply_channel(ChannelSpec::two_channel_ghz(n), phi, rho).matrix() - rho.matrix()) < 1e-10);
    }
  }
}

TEST_CASE("one-channel channel matches a full three-particle simulation") {
  Rng rng(22);
  for (int n : {2, 3}) {
    for (int k = 0; k < 5; ++k) {
      const DensityMatrix chi = random_resource(n, rng);
      const DensityMatrix rho = random_density(n, rng);
      const auto spec = ChannelSpec::one_channel(
          n, CorrectionFamily(Protocol::one_channel_bell, n, haar_family(static_cast<std::size_t>(n * n), n, rng)));
      CHECK(oracle::max_abs(apply_channel(spec, chi, rho).matrix() - simulate_one_channel(spec, chi, rho)) < 1e-12);
    }
  }
}

TEST_CASE("two-channel Bell channel matches a full five-particle simulation") {
  Rng rng(23);
  const int n = 2;
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix chi = random_resource(n, rng);
    const DensityMatrix rho = random_density(n, rng);
    const auto spec = ChannelSpec(Protocol::two_channel_bell, n, haar_unitary(4, rng), haar_unitary(4, rng),
                                  CorrectionFamily(Protocol::two_channel_bell, n, haar_family(4, n, rng)));
    CHECK(oracle::max_abs(apply_channel(spec, chi, rho).matrix() - simulate_two_channel(spec, chi, rho)) < 1e-12);
  }
}

TEST_CASE("trace preservation for all protocols") {
  Rng rng(24);
  for (int n : {2, 3}) {
    const Index d2 = static_cast<Index>(n) * n;
    for (int k = 0; k < 10; ++k) {
      const DensityMatrix chi = random_resource(n, rng);
      const DensityMatrix rho = random_density(n, rng);
      const std::vector<ChannelSpec> specs = {
          ChannelSpec::one_channel(n, CorrectionFamily(Protocol::one_channel_bell, n,
                                                       haar_family(static_cast<std::size_t>(n * n), n, rng))),
          ChannelSpec(Protocol::two_channel_bell, n, haar_unitary(d2, rng), haar_unitary(d2, rng),
                      CorrectionFamily(Protocol::two_channel_bell, n, haar_family(static_cast<std::size_t>(n * n), n, rng))),
          ChannelSpec::two_channel_ghz(n, haar_unitary(d2, rng),
                                       CorrectionFamily(Protocol::two_channel_ghz, n,
                                                        haar_family(static_cast<std::size_t>(n * n * n), d2, rng)))};
      for (const auto& spec : specs) {
        const auto out = apply_channel(spec, chi, rho);
        CHECK_THAT(out.matrix().trace().real(), WithinAbs(1.0, 1e-10));
        CHECK(min_eigenvalue(out.matrix()) > -1e-12);
        CHECK(oracle::max_abs(kraus_completeness(kraus_operators(spec, chi)) - ComplexMatrix::Identity(n, n)) < 1e-10);
        // Completely positive: the Choi matrix is PSD.
        CHECK(min_eigenvalue(choi_matrix(kraus_operators(spec, chi))) > -1e-12);
      }
    }
  }
}

TEST_CASE("W = V = I reduces the two-channel Bell protocol to one channel") {
  Rng rng(25);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix chi = random_resource(2, rng);
    const DensityMatrix rho = random_density(2, rng);
    const ComplexMatrix one = apply_channel(ChannelSpec::one_channel(2), chi, rho).matrix();
    const ComplexMatrix two = apply_channel(ChannelSpec::two_channel_bell(2), chi, rho).matrix();
    CHECK(oracle::max_abs(one - two) < 1e-10);
  }
}

TEST_CASE("channel is linear in the input") {
  Rng rng(26);
  const DensityMatrix chi = random_resource(3, rng);
  const auto spec = ChannelSpec::two_channel_bell(3, haar_unitary(9, rng), haar_unitary(9, rng));
  const DensityMatrix a = random_density(3, rng), b = random_density(3, rng);
  const ComplexMatrix lhs = apply_channel(spec, chi, mix(a, b, 0.4)).matrix();
  const ComplexMatrix rhs = 0.4 * apply_channel(spec, chi, a).matrix() + 0.6 * apply_channel(spec, chi, b).matrix();
  CHECK(oracle::max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("Bell-element oracle agrees with the Kraus evaluation") {
  Rng rng(27);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix chi = random_resource(2, rng);
    const DensityMatrix rho = random_density(2, rng);
    const auto spec = ChannelSpec(Protocol::two_channel_bell, 2, haar_unitary(4, rng), haar_unitary(4, rng),
                                  CorrectionFamily(Protocol::two_channel_bell, 2, haar_family(4, 2, rng)));
    CHECK(oracle::max_abs(apply_channel(spec, chi, rho).matrix() - apply_channel_oracle(spec, chi, rho).matrix()) < 1e-9);
  }
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix chi = random_resource(2, rng);
    const DensityMatrix rho = random_density(2, rng);
    const auto ghz = ChannelSpec::two_channel_ghz(
        2, haar_unitary(4, rng), CorrectionFamily(Protocol::two_channel_ghz, 2, haar_family(8, 4, rng)));
    CHECK(oracle::max_abs(apply_channel(ghz, chi, rho).matrix() - apply_channel_oracle(ghz, chi, rho).matrix()) < 1e-9);
    const auto one = ChannelSpec::one_channel(2, CorrectionFamily(Protocol::one_channel_bell, 2, haar_family(4, 2, rng)));
    CHECK(oracle::max_abs(apply_channel(one, chi, rho).matrix() - apply_channel_oracle(one, chi, rho).matrix()) < 1e-9);
  }
  const auto big = ChannelSpec::two_channel_bell(4);
  CHECK_THROWS_AS(apply_channel_oracle(big, maximally_entangled_state(4), DensityMatrix(ComplexMatrix::Identity(4, 4) / 4.0)),
                  DimensionError);
}

TEST_CASE("maximally mixed resource gives the completely mixed output") {
  Rng rng(28);
  for (int n : {2, 3}) {
    const Index d2 = static_cast<Index>(n) * n;
    const DensityMatrix chi = maximally_mixed_state(n);
    const DensityMatrix rho = random_density(n, rng);
    const auto bell = ChannelSpec(Protocol::two_channel_bell, n, haar_unitary(d2, rng), haar_unitary(d2, rng),
                                  CorrectionFamily(Protocol::two_channel_bell, n,
                                                   haar_family(static_cast<std::size_t>(n * n), n, rng)));
    const ComplexMatrix mixed = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
    CHECK(oracle::max_abs(apply_channel(bell, chi, rho).matrix() - mixed) < 1e-10);
    const auto ghz = ChannelSpec::two_channel_ghz(
        n, haar_unitary(d2, rng),
        CorrectionFamily(Protocol::two_channel_ghz, n, haar_family(static_cast<std::size_t>(n * n * n), d2, rng)));
    CHECK(oracle::max_abs(apply_channel(ghz, chi, rho).matrix() - mixed) < 1e-10);
  }
}

TEST_CASE("fidelity closed form") {
  CHECK_THAT(fidelity_closed_form(1.0, 2), WithinAbs(1.0, 1e-15));
  CHECK_THAT(fidelity_closed_form(0.5, 2), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(fidelity_closed_form(0.25, 2), WithinAbs(0.5, 1e-15));
  CHECK_THAT(fidelity_closed_form(1.0 / 3.0, 3), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(fidelity_closed_form(1.2, 2), ValidationError);
  CHECK_THROWS_AS(fidelity_closed_form(-0.1, 2), ValidationError);
}

TEST_CASE("Monte-Carlo average fidelity") {
  const auto ideal = average_fidelity_mc(ChannelSpec::two_channel_bell(2), maximally_entangled_state(2), 1000, 1);
  CHECK_THAT(ideal.mean, WithinAbs(1.0, 1e-12));
  CHECK(ideal.samples == 1000);

  // The completely depolarizing channel has fidelity 1/n for every input.
  const auto mixed = average_fidelity_mc(ChannelSpec::two_channel_bell(2), maximally_mixed_state(2), 1000, 1);
  CHECK_THAT(mixed.mean, WithinAbs(0.5, 1e-12));

  CHECK_THROWS_AS(average_fidelity_mc(ChannelSpec::one_channel(2), maximally_mixed_state(2), 10, 1), ValidationError);

  Rng rng(29);
  const DensityMatrix chi = random_resource(2, rng);
  const auto spec = ChannelSpec::two_channel_bell(2, haar_unitary(4, rng), haar_unitary(4, rng));
  const auto a = average_fidelity_mc(spec, chi, 20000, 5, 1);
  const auto b = average_fidelity_mc(spec, chi, 20000, 5, 4);
  CHECK(a.mean == b.mean);
  const double closed = fidelity_closed_form(channel_entangled_fraction(spec, chi), 2);
  CHECK(std::abs(a.mean - closed) < 3.0 * a.standard_error);
  CHECK_THAT(twirl_fidelity(spec, chi), WithinAbs(closed, 1e-12));
}

TEST_CASE("standard GHZ corrections give the identity channel") {
  Rng rng(30);
  for (int n : {2, 3}) {
    const auto spec = ChannelSpec::two_channel_ghz(n);
    const DensityMatrix phi = maximally_entangled_state(n);
    CHECK_THAT(channel_entangled_fraction(spec, phi), WithinAbs(1.0, 1e-12));
    const DensityMatrix rho = random_density(n, rng);
    CHECK(oracle::max_abs(apply_channel(spec, phi, rho).matrix() - rho.matrix()) < 1e-12);
  }
  // The identity corrections do not undo the GHZ outcome.
  const auto naive = ChannelSpec::two_channel_ghz(2, ComplexMatrix::Identity(4, 4),
                                                  CorrectionFamily::identity(Protocol::two_channel_ghz, 2));
  CHECK(channel_entangled_fraction(naive, maximally_entangled_state(2)) < 0.9);
}

TEST_CASE("channel spec validation") {
  Rng rng(31);
  ComplexMatrix bad = ComplexMatrix::Identity(4, 4);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(ChannelSpec::two_channel_bell(2, bad, ComplexMatrix::Identity(4, 4)), ValidationError);
  CHECK_THROWS_AS(ChannelSpec::two_channel_bell(2, ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(4, 4)),
                  ValidationError);
  CHECK_THROWS_AS(ChannelSpec(Protocol::one_channel_bell, 2, haar_unitary(4, rng), ComplexMatrix::Identity(4, 4),
                              CorrectionFamily::weyl(Protocol::one_channel_bell, 2)),
                  ValidationError);
  CHECK_THROWS_AS(CorrectionFamily(Protocol::two_channel_bell, 2, haar_family(3, 2, rng)), ValidationError);
  CHECK_THROWS_AS(CorrectionFamily(Protocol::two_channel_ghz, 2, haar_family(8, 2, rng)), ValidationError);
  CHECK_THROWS_AS(CorrectionFamily::weyl(Protocol::two_channel_ghz, 2), ValidationError);
  CHECK_THROWS_AS(apply_channel(ChannelSpec::one_channel(2), maximally_entangled_state(3), random_density(2, rng)),
                  DimensionError);
  CHECK(protocol_from_string(to_string(Protocol::two_channel_ghz)) == Protocol::two_channel_ghz);
  CHECK_THROWS_AS(protocol_from_string("three-channel"), ValidationError);
}

TEST_CASE("resource decomposition reconstructs chi") {
  Rng rng(32);
  const int n = 3;
  const DensityMatrix chi = random_resource(n, rng);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(9, 9);
  for (const auto& term : decompose_resource(chi, n)) {
    const ComplexVector psi =
        std::sqrt(static_cast<double>(n)) * kron(ComplexMatrix::Identity(n, n), term.coefficients) * max_entangled_vector(n);
    CHECK_THAT(psi.norm(), WithinAbs(1.0, 1e-12));
    rebuilt += term.weight * psi * psi.adjoint();
  }
  CHECK(oracle::max_abs(rebuilt - chi.matrix()) < 1e-12);
}
