#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qtl/channels.hpp"
#include "qtl/metrics.hpp"
#include "qtl/states.hpp"

using namespace qtl;
using Catch::Matchers::WithinAbs;

namespace {

OptimizerConfig config(int restarts = 6) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  return cfg;
}

std::vector<double> random_spectrum(int n, Rng& rng) {
  std::vector<double> l(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : l) {
    x = -std::log(rng.uniform() + 1e-300);
    total += x;
  }
  for (auto& x : l) x /= total;
  return l;
}

}  // namespace

TEST_CASE("F1 matches the magic-basis eigenvalue on two qubits") {
  Rng rng(51);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix chi = random_resource(2, rng);
    CHECK_THAT(fef_f1(chi, config()).value, WithinAbs(oracle::magic_basis_f1(chi.matrix()), 1e-8));
  }
}

TEST_CASE("F1 closed forms") {
  for (int n : {2, 3}) {
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      CHECK_THAT(fef_f1(isotropic_state(n, p), config()).value, WithinAbs(oracle::isotropic_f1(n, p), 1e-8));
    }
  }
  Rng rng(52);
  for (int n : {2, 3}) {
    for (int k = 0; k < 5; ++k) {
      const auto l = random_spectrum(n, rng);
      CHECK_THAT(fef_f1(schmidt_state(l), config()).value, WithinAbs(oracle::pure_f1(l), 1e-8));
    }
  }
}

TEST_CASE("F1 is invariant under local unitaries") {
  Rng rng(53);
  for (int n : {2, 3}) {
    const DensityMatrix chi = random_resource(n, rng);
    const double base = fef_f1(chi, config()).value;
    for (int k = 0; k < 3; ++k) {
      const auto rotated = local_rotation(chi, haar_unitary(n, rng), haar_unitary(n, rng));
      CHECK_THAT(fef_f1(rotated, config()).value, WithinAbs(base, 1e-8));
    }
  }
}

TEST_CASE("V = I form at the ends of its range") {
  for (int n : {2, 3}) {
    const double nn = static_cast<double>(n) * n;
    CHECK_THAT(tfef_f2_lower(maximally_mixed_state(n), config()).value, WithinAbs(1.0 / nn, 1e-8));
    CHECK_THAT(tfef_f2_lower(maximally_entangled_state(n), config()).value, WithinAbs(1.0, 1e-8));
  }
}

TEST_CASE("V = I form reproduces F1 on the lifted maximizer") {
  Rng rng(54);
  for (int n : {2, 3}) {
    const DensityMatrix chi = random_resource(n, rng);
    const ComplexMatrix u = haar_unitary(n, rng);
    const ComplexMatrix omega = kron(ComplexMatrix(u.adjoint()), ComplexMatrix::Identity(n, n));
    CHECK_THAT(f2_lower_objective(chi.matrix()).value(omega).real(),
               WithinAbs(f1_objective(chi.matrix()).value(u).real(), 1e-12));
  }
}

TEST_CASE("F2 lower bound never falls below F1") {
  Rng rng(55);
  for (int n : {2, 3}) {
    double worst = 1.0;
    for (int k = 0; k < 200; ++k) {
      const DensityMatrix chi = random_resource(n, rng);
      const auto f1 = fef_f1(chi, config(4));
      const auto f2 = tfef_f2_lower(chi, config(4));
      worst = std::min(worst, f2.value - f1.value);
    }
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("two-unitary form is the channel entangled fraction") {
  Rng rng(56);
  for (int n : {2, 3}) {
    const Index d = static_cast<Index>(n) * n;
    const DensityMatrix chi = random_resource(n, rng);
    const TwoUnitaryForm form(chi.matrix());
    for (int k = 0; k < 3; ++k) {
      const ComplexMatrix omega = haar_unitary(d, rng), v = haar_unitary(d, rng);
      CHECK_THAT(form.value(omega, v), WithinAbs(channel_entangled_fraction(bell_spec_from_tfef(omega, v), chi), 1e-12));
    }
    // V = I collapses to the single-unitary form, with Omega transposed.
    const ComplexMatrix omega = haar_unitary(d, rng);
    CHECK_THAT(form.value(omega.transpose(), ComplexMatrix::Identity(d, d)),
               WithinAbs(f2_lower_objective(chi.matrix()).value(omega).real(), 1e-12));
  }
}

TEST_CASE("full two-unitary maximum dominates the V = I maximum") {
  Rng rng(57);
  for (int k = 0; k < 4; ++k) {
    const DensityMatrix chi = random_resource(2, rng);
    const double lower = tfef_f2_lower(chi, config()).value;
    const auto full = tfef_f2_full(chi, config(4));
    CHECK(full.value >= lower - 1e-8);
    CHECK(full.maximizers.size() == 2);
    CHECK(unitarity_residual(full.maximizers[0]) < 1e-8);
    CHECK(unitarity_residual(full.maximizers[1]) < 1e-8);
  }
  CHECK_THAT(tfef_f2_full(maximally_entangled_state(2), config(2)).value, WithinAbs(1.0, 1e-8));
  CHECK_THAT(tfef_f2_full(maximally_mixed_state(2), config(2)).value, WithinAbs(0.25, 1e-10));
}

TEST_CASE("dF is positive for some states") {
  // A two-qubit resource for which the joint operation strictly helps.
  const auto r = df_record(2, 1189, config());
  CHECK(r.df > 1e-3);
  CHECK(r.f2 > r.f1);
}

TEST_CASE("GHZ functional: literal display, reduced form and channel agree") {
  Rng rng(58);
  for (int k = 0; k < 3; ++k) {
    const DensityMatrix chi = random_resource(2, rng);
    const ComplexMatrix w = haar_unitary(4, rng);
    std::vector<ComplexMatrix> t;
    for (int o = 0; o < 8; ++o) t.push_back(haar_unitary(4, rng));
    const GhzForm form(chi);
    const double reduced = form.value(w, t);
    CHECK_THAT(f2_ghz_display(chi, w, t), WithinAbs(reduced, 1e-12));
    CHECK_THAT(channel_entangled_fraction(ghz_spec_from_blocks(w, t), chi), WithinAbs(reduced, 1e-12));
  }
}

TEST_CASE("GHZ maximization at the ends of its range") {
  const auto ideal = tfef_f2_ghz(maximally_entangled_state(2), config(2));
  CHECK_THAT(ideal.value, WithinAbs(1.0, 1e-8));
  CHECK(ideal.maximizers.size() == 9);
  CHECK_THAT(tfef_f2_ghz(maximally_mixed_state(2), config(1)).value, WithinAbs(0.25, 1e-10));
  // The standard corrections already reach the maximum on the ideal resource.
  const GhzForm form(maximally_entangled_state(3));
  CHECK_THAT(form.value(ComplexMatrix::Identity(9, 9), CorrectionFamily::ghz_standard(3).ops()), WithinAbs(1.0, 1e-12));
}

TEST_CASE("usefulness threshold") {
  CHECK(usefulness(0.51, 2));
  CHECK_FALSE(usefulness(0.5, 2));
  CHECK_FALSE(usefulness(0.25, 2));
  CHECK(usefulness(0.34, 3));
  const auto report = fef_f1(isotropic_state(2, 0.5), config());
  CHECK(report.useful);
  CHECK_THAT(report.optimal_fidelity, WithinAbs((2.0 * 0.625 + 1.0) / 3.0, 1e-8));
  CHECK_FALSE(fef_f1(isotropic_state(2, 0.2), config()).useful);
}

TEST_CASE("convexity probe on equal endpoints has zero slack") {
  Rng rng(59);
  const DensityMatrix chi = random_resource(2, rng);
  const auto report = convexity_probe(chi, chi, {0.25, 0.5, 0.75}, config(3));
  CHECK(report.points.size() == 3);
  CHECK(std::abs(report.min_slack) < 1e-9);
  CHECK_THROWS_AS(convexity_probe(chi, chi, {1.5}, config(1)), ValidationError);
}

TEST_CASE("convexity probe on random pairs") {
  Rng rng(60);
  for (int k = 0; k < 3; ++k) {
    const DensityMatrix a = random_resource(2, rng), b = random_resource(2, rng);
    CHECK(convexity_probe(a, b, {0.5}, config(3)).min_slack >= -1e-4);
  }
}

TEST_CASE("continuity probe stays inside its bound") {
  Rng rng(61);
  const DensityMatrix a = random_resource(2, rng), b = random_resource(2, rng);
  for (const auto& p : continuity_probe(a, b, {1e-1, 1e-2, 1e-3, 1e-4}, config(3))) {
    CHECK(std::abs(p.difference) <= p.bound);
    CHECK(p.difference >= -1e-9);  // chi_b is PSD, so the sum can only grow
  }
}

TEST_CASE("random-state experiment") {
  const auto none = df_experiment(2, 0, config(), 42);
  CHECK(none.empty());
  const auto a = df_experiment(2, 3, config(3), 7);
  const auto b = df_experiment(2, 3, config(3), 7, 2);
  REQUIRE(a.size() == 3);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].seed == 7 + k);
    CHECK(a[k].f1 == b[k].f1);
    CHECK(a[k].f2 == b[k].f2);
    CHECK(a[k].df >= -1e-9);
    CHECK_THAT(a[k].df, WithinAbs(a[k].f2 - a[k].f1, 0.0));
  }
  CHECK_THROWS_AS(df_experiment(5, 1, config(), 1), ValidationError);
  CHECK_THROWS_AS(df_experiment(2, -1, config(), 1), ValidationError);
}

TEST_CASE("kind names round-trip") {
  for (auto k : {FefKind::f1, FefKind::f2_lower, FefKind::f2_full, FefKind::f2_ghz}) {
    CHECK(fef_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(fef_kind_from_string("f3"), ValidationError);
}
