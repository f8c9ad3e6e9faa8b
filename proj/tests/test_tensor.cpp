#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qtl/bases.hpp"
#include "qtl/states.hpp"
#include "qtl/tensor.hpp"

using namespace qtl;
using Catch::Matchers::WithinAbs;

namespace {

ComplexMatrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  ComplexMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (const auto& x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

ComplexMatrix random_skew(Index d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  return g - g.adjoint();
}

}  // namespace

TEST_CASE("kron follows the block rule") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK(kron(i2, i2).isApprox(ComplexMatrix::Identity(4, 4)));

  const ComplexMatrix z = mat({{1, 0}, {0, -1}});
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1, 1, -1, -1;
  CHECK(kron(z, i2).isApprox(expected));

  const ComplexMatrix h2 = mat({{0, 1}, {1, 0}});
  const ComplexMatrix hg = mat({{0, 0, 1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, -1, 0, 0}});
  CHECK(oracle::max_abs(kron(h2, z) - hg) == 0.0);
}

TEST_CASE("kron is associative") {
  Rng rng(1);
  const ComplexMatrix a = ginibre(2, 3, rng), b = ginibre(3, 2, rng), c = ginibre(2, 2, rng);
  CHECK(oracle::max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-12);
}

TEST_CASE("embed places operators on named slots") {
  Rng rng(2);
  const ComplexMatrix u = haar_unitary(3, rng);
  CHECK(oracle::max_abs(embed(u, {3}, {0}) - u) == 0.0);

  const ComplexMatrix x = mat({{0, 1}, {1, 0}});
  CHECK(oracle::max_abs(embed(x, {2, 2}, {1}) - kron(ComplexMatrix::Identity(2, 2), x)) == 0.0);

  // SWAP on slots (0, 2) of three qubits, checked on every basis ket.
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) swap(b * 2 + a, a * 2 + b) = 1.0;
  }
  const ComplexMatrix full = embed(swap, {2, 2, 2}, {0, 2});
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const ComplexVector out = full * oracle::qubit_ket({a, b, c});
        CHECK((out - oracle::qubit_ket({c, b, a})).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("embed respects slot order and commutes on disjoint supports") {
  Rng rng(3);
  const ComplexMatrix a = ginibre(2, 2, rng), b = ginibre(3, 3, rng);
  const Dims dims{2, 3, 2};
  // Out-of-order slots equal the flipped operator on in-order slots.
  const ComplexMatrix ab = kron(a, ComplexMatrix(ginibre(2, 2, rng)));
  CHECK(oracle::max_abs(embed(ab, dims, {2, 0}) - embed(flip(2) * ab * flip(2), dims, {0, 2})) < 1e-12);

  const ComplexMatrix ea = embed(a, dims, {0});
  const ComplexMatrix eb = embed(b, dims, {1});
  CHECK(oracle::max_abs(ea * eb - eb * ea) < 1e-12);
}

TEST_CASE("embed rejects bad slot lists") {
  const ComplexMatrix x = ComplexMatrix::Identity(4, 4);
  CHECK_THROWS_AS(embed(x, {2, 2, 2}, {0, 0}), DimensionError);
  CHECK_THROWS_AS(embed(x, {2, 3}, {0, 1}), DimensionError);
  CHECK_THROWS_AS(embed(x, {2, 2}, {0, 2}), DimensionError);
}

TEST_CASE("partial trace") {
  Rng rng(4);
  const DensityMatrix rho = random_density(2, rng), sigma = random_density(3, rng);
  const DensityMatrix both = tensor(rho, sigma);
  CHECK(oracle::max_abs(partial_trace(both, {0}).matrix() - rho.matrix()) < 1e-12);
  CHECK(oracle::max_abs(partial_trace(both, {1}).matrix() - sigma.matrix()) < 1e-12);
  CHECK(oracle::max_abs(partial_trace(both, {0, 1}).matrix() - both.matrix()) < 1e-15);

  const DensityMatrix bell = DensityMatrix(bell_state(WeylIndex(0, 0, 2)));
  CHECK(oracle::max_abs(partial_trace(bell, {0}).matrix() - ComplexMatrix::Identity(2, 2) / 2.0) < 1e-15);

  const DensityMatrix three = random_density(Dims{2, 3, 2}, rng);
  for (const auto& keep : std::vector<std::vector<Index>>{{0}, {1}, {2}, {0, 2}, {2, 0}, {1, 2}}) {
    CHECK_THAT(partial_trace(three, keep).matrix().trace().real(), WithinAbs(1.0, 1e-12));
  }
  CHECK_THROWS_AS(partial_trace(three, {}), DimensionError);
  CHECK_THROWS_AS(partial_trace(three, {3}), DimensionError);
}

TEST_CASE("partial trace is linear") {
  Rng rng(5);
  const DensityMatrix a = random_density(Dims{2, 2}, rng), b = random_density(Dims{2, 2}, rng);
  const ComplexMatrix lhs = partial_trace(mix(a, b, 0.3), {1}).matrix();
  const ComplexMatrix rhs = 0.3 * partial_trace(a, {1}).matrix() + 0.7 * partial_trace(b, {1}).matrix();
  CHECK(oracle::max_abs(lhs - rhs) < 1e-15);
}

TEST_CASE("matrix exponential") {
  CHECK(oracle::max_abs(mat_exp(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)) < 1e-15);
  const ComplexMatrix d = mat({{Complex(0, M_PI), 0}, {0, 0}});
  CHECK(oracle::max_abs(mat_exp(d) - mat({{-1, 0}, {0, 1}})) < 1e-14);

  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix a = random_skew(5, rng);
    CHECK(oracle::max_abs(mat_exp(a) * mat_exp(-a) - ComplexMatrix::Identity(5, 5)) < 1e-10);
    CHECK(unitarity_residual(mat_exp(a)) < 1e-10);
    const SkewHermitianExp e(a);
    CHECK((e(1.0) - mat_exp(a)).norm() / mat_exp(a).norm() < 1e-12);
    CHECK((e(0.37) - mat_exp(0.37 * a)).norm() < 1e-12);
  }
}

TEST_CASE("Haar unitaries") {
  Rng rng(7);
  const ComplexMatrix u1 = haar_unitary(1, rng);
  CHECK_THAT(std::abs(u1(0, 0)), WithinAbs(1.0, 1e-14));
  for (int k = 0; k < 20; ++k) CHECK(unitarity_residual(haar_unitary(4, rng)) < 1e-10);

  // E|U_00|^2 = 1/d.
  const int samples = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = std::norm(haar_unitary(2, rng)(0, 0));
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum2 / samples - mean * mean) / (samples - 1));
  CHECK(std::abs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("random density matrices") {
  Rng rng(8);
  CHECK_THAT(random_density(1, rng).matrix()(0, 0).real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(random_density(4, rng).matrix().trace().real(), WithinAbs(1.0, 1e-12));
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng r(s);
    const DensityMatrix rho = random_density(9, r);
    CHECK(min_eigenvalue(rho.matrix()) >= 0.0);
    CHECK(hermiticity_residual(rho.matrix()) < 1e-10);
  }
}

TEST_CASE("generators are reproducible and forks are independent") {
  Rng a(99), b(99);
  CHECK(oracle::max_abs(haar_unitary(3, a) - haar_unitary(3, b)) == 0.0);
  const Rng root(5);
  Rng f1 = root.fork(1), f1b = root.fork(1), f2 = root.fork(2);
  const double x = f1.normal();
  CHECK(x == f1b.normal());
  CHECK(x != f2.normal());
}

TEST_CASE("density matrix validation names the failed check") {
  auto field_of = [](const ComplexMatrix& m, const Dims& dims) {
    try {
      DensityMatrix rho(m, dims);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("none");
  };
  ComplexMatrix m = ComplexMatrix::Identity(2, 2) / 2.0;
  CHECK(field_of(m, {2}) == "none");
  CHECK(field_of(m, {3}) == "dims");
  ComplexMatrix nh = m;
  nh(0, 1) = 0.1;
  CHECK(field_of(nh, {2}) == "hermiticity");
  CHECK(field_of(2.0 * m, {2}) == "trace");
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK(field_of(neg, {2}) == "positivity");
  ComplexMatrix nan = m;
  nan(0, 0) = std::nan("");
  CHECK(field_of(nan, {2}) == "finite");

  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState(v, {2}), ValidationError);
}

TEST_CASE("dagger is an involution") {
  Rng rng(9);
  const ComplexMatrix a = ginibre(3, 5, rng);
  CHECK(oracle::max_abs(ComplexMatrix(a.adjoint()).adjoint() - a) == 0.0);
}
