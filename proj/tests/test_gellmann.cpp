#include "sdme/gellmann.hpp"
#include "sdme/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sdme;

namespace {

CVector singlet() {
  CVector psi = CVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return psi;
}

}  // namespace

TEST(GellMann, RejectsSmallDimension) {
  EXPECT_THROW(make_basis(1), std::invalid_argument);
  EXPECT_THROW(make_basis(0), std::invalid_argument);
}

TEST(GellMann, QubitIsPauli) {
  auto b = make_basis(2);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], pauli::x());
  EXPECT_EQ(b[1], pauli::y());
  EXPECT_EQ(b[2], pauli::z());
}

TEST(GellMann, QutritMatchesStandardGellMann) {
  auto b = make_basis(3);
  ASSERT_EQ(b.size(), 8u);
  // λ8 = diag(1, 1, -2)/√3
  CMatrix l8 = CMatrix::Zero(3, 3);
  l8(0, 0) = l8(1, 1) = 1.0 / std::sqrt(3.0);
  l8(2, 2) = -2.0 / std::sqrt(3.0);
  EXPECT_LT((b[7] - l8).norm(), 1e-15);
}

TEST(GellMann, OrthonormalTraceless) {
  for (int d = 2; d <= 6; ++d) {
    auto b = make_basis(d);
    ASSERT_EQ(static_cast<int>(b.size()), d * d - 1);
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_LT(hermiticity_error(b[i]), 1e-15);
      EXPECT_LT(std::abs(b[i].trace()), 1e-12);
      for (std::size_t j = 0; j < b.size(); ++j)
        EXPECT_NEAR(std::abs(trace_product(b[i], b[j]) / 2.0 - (i == j ? 1.0 : 0.0)), 0.0, 1e-12) << d;
    }
  }
}

TEST(FactorizedBasis, Orthonormal) {
  for (auto [da, db] : {std::pair{2, 2}, {2, 3}, {3, 4}}) {
    FactorizedBasis fb(da, db);
    const auto n = fb.rows() * fb.cols();
    EXPECT_EQ(n, da * da * db * db);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q) {
        const auto& g1 = fb.element(p / fb.cols(), p % fb.cols());
        const auto& g2 = fb.element(q / fb.cols(), q % fb.cols());
        EXPECT_NEAR(std::abs(trace_product(g1, g2) / 2.0 - (p == q ? 1.0 : 0.0)), 0.0, 1e-12);
      }
    // every element except (0,0) is traceless
    for (Eigen::Index p = 1; p < n; ++p) EXPECT_LT(std::abs(fb.element(p / fb.cols(), p % fb.cols()).trace()), 1e-12);
  }
}

TEST(BlochMatrix, MaximallyMixed) {
  FactorizedBasis fb(2, 3);
  auto bm = bloch_matrix(DensityMatrix::maximally_mixed({2, 3}), fb);
  EXPECT_NEAR(bm.values(0, 0), std::sqrt(2.0) / std::sqrt(6.0), 1e-14);
  RMatrix rest = bm.values;
  rest(0, 0) = 0.0;
  EXPECT_LT(rest.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BlochMatrix, G00IsFixedByTrace) {
  Rng rng(1);
  FactorizedBasis fb(3, 4);
  auto bm = bloch_matrix(random_mixed(rng, {3, 4}), fb);
  EXPECT_NEAR(bm.values(0, 0), std::sqrt(2.0 / 12.0), 1e-12);
}

TEST(BlochMatrix, RoundTrip) {
  Rng rng(2);
  for (auto [da, db] : {std::pair{2, 2}, {2, 3}, {3, 4}}) {
    FactorizedBasis fb(da, db);
    for (int rep = 0; rep < 100; ++rep) {
      auto rho = random_mixed(rng, {da, db});
      EXPECT_LT((fb.reconstruct(bloch_matrix(rho, fb)) - rho.matrix()).norm(), 1e-10);
    }
  }
}

TEST(BlochMatrix, SingletCorrelationEntries) {
  FactorizedBasis fb(2, 2);
  auto rho = DensityMatrix::from_ket({2, 2}, singlet());
  auto bm = bloch_matrix(rho, fb);
  // G_{i,i} = σ_i⊗σ_i/√2, so ⟨G_{i,i}⟩ = −1/√2
  for (int i = 1; i <= 3; ++i) {
    const double direct = expectation(kron(make_basis(2)[i - 1], make_basis(2)[i - 1]), rho.matrix());
    EXPECT_NEAR(direct, -1.0, 1e-14);
    EXPECT_NEAR(bm.values(i, i), direct / std::sqrt(2.0), 1e-14);
  }
}

TEST(BlochMatrix, DimsMismatchThrows) {
  FactorizedBasis fb(2, 3);
  EXPECT_THROW(bloch_matrix(DensityMatrix::maximally_mixed({3, 2}), fb), std::invalid_argument);
}

TEST(ProductTest, ProductSingletMixed) {
  Rng rng(3);
  FactorizedBasis fb(2, 3);
  const DensityMatrix f[] = {random_mixed(rng, {2}), random_mixed(rng, {3})};
  auto prod = is_product(bloch_matrix(DensityMatrix::product(f), fb), 1e-10);
  EXPECT_TRUE(prod.is_product);
  EXPECT_GT(prod.singular_values(0), 0.0);
  EXPECT_LT(prod.singular_values(1), 1e-10 * prod.singular_values(0));

  FactorizedBasis f22(2, 2);
  auto bell = is_product(bloch_matrix(DensityMatrix::from_ket({2, 2}, singlet()), f22), 1e-10);
  EXPECT_FALSE(bell.is_product);
  EXPECT_TRUE(is_product(bloch_matrix(DensityMatrix::maximally_mixed({2, 2}), f22), 1e-10).is_product);
  for (Eigen::Index i = 1; i < bell.singular_values.size(); ++i)
    EXPECT_LE(bell.singular_values(i), bell.singular_values(i - 1));
}

TEST(CorrelationMatrix, ProductIsZero) {
  Rng rng(4);
  const DensityMatrix f[] = {random_mixed(rng, {2}), random_mixed(rng, {3})};
  auto d = correlation_matrix_D(DensityMatrix::product(f), {});
  EXPECT_LT(d.pair_space.matrix().norm(), 1e-14);
}

TEST(CorrelationMatrix, Singlet) {
  auto rho = DensityMatrix::from_ket({2, 2}, singlet());
  auto d = correlation_matrix_D(rho, {});
  CMatrix expect = singlet() * singlet().adjoint() - CMatrix::Identity(4, 4) / 4.0;
  EXPECT_LT((d.pair_space.matrix() - expect).norm(), 1e-14);
  EXPECT_NEAR(std::abs(d.pair_space.matrix().trace()), 0.0, 1e-14);
}

TEST(CorrelationMatrix, SpectatorIdentity) {
  Rng rng(5);
  auto bell = DensityMatrix::from_ket({2, 2}, singlet());
  auto rc = random_mixed(rng, {2});
  const DensityMatrix f[] = {bell, rc};
  auto rho = DensityMatrix::product(f);
  auto d = correlation_matrix_D(rho, {0, 1});
  CMatrix d_ab = singlet() * singlet().adjoint() - CMatrix::Identity(4, 4) / 4.0;
  EXPECT_LT((d.pair_space.matrix() - d_ab).norm(), 1e-14);
  EXPECT_LT((d.full_space.matrix() - kron(d_ab, CMatrix::Identity(2, 2))).norm(), 1e-14);
  // pair (b, c) of this state is uncorrelated
  EXPECT_LT(correlation_matrix_D(rho, {1, 2}).pair_space.matrix().norm(), 1e-14);
  EXPECT_THROW(correlation_matrix_D(rho, {1, 1}), std::invalid_argument);
  EXPECT_THROW(correlation_matrix_D(rho, {0, 3}), std::invalid_argument);
}

TEST(AdjointRepresentation, IsOrthogonal) {
  Rng rng(6);
  for (int d : {2, 3, 4}) {
    auto b = make_basis(d);
    for (int rep = 0; rep < 10; ++rep) {
      RMatrix t = adjoint_representation(b, random_unitary(rng, d));
      EXPECT_LT((t.transpose() * t - RMatrix::Identity(t.rows(), t.cols())).norm(), 1e-9);
    }
  }
}
