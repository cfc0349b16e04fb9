#include <gtest/gtest.h>

#include "support.hpp"

using namespace quac;
using namespace support;

namespace {

Labels random_labels(std::size_t n, int k, Rng& rng) {
  Labels l(n);
  for (auto& x : l) x = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(k)));
  return l;
}

}  // namespace

TEST(Scatter, UnitSquare) {
  const PointCloud X = cloud_2d({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const ScatterReport r = within_cluster_scatter(X, {0, 0, 0, 0});
  EXPECT_TRUE(r.S_W.isApprox(Matrix::Identity(2, 2), 1e-14));
  EXPECT_NEAR(r.inertia, 2.0, 1e-14);
  EXPECT_NEAR(r.det_criterion, 1.0, 1e-14);
}

TEST(Scatter, SingletonsAreZero) {
  const PointCloud X = cloud_2d({{0, 0}, {3, 1}, {-2, 5}});
  const ScatterReport r = within_cluster_scatter(X, {0, 1, 2});
  EXPECT_EQ(r.S_W.norm(), 0.0);
  EXPECT_EQ(r.inertia, 0.0);
  EXPECT_EQ(r.det_criterion, 0.0);
}

TEST(Scatter, EmptyClusterContributesNothing) {
  const PointCloud X = cloud_2d({{0, 0}, {2, 0}});
  Matrix c(3, 2);
  c << 1, 0, 50, 50, 0, 0;
  EXPECT_NEAR(within_cluster_scatter(X, {0, 0}, c).inertia, 2.0, 1e-14);
}

TEST(Scatter, TraceAndPsdOnRandomData) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 5 + uniform_index(rng, 40);
    Matrix m(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 10 * uniform01(rng) - 5;
    std::vector<VertexId> ids(n);
    std::iota(ids.begin(), ids.end(), VertexId{0});
    const PointCloud X(m, ids);
    const Labels l = random_labels(n, 3, rng);
    const ScatterReport r = within_cluster_scatter(X, l);
    EXPECT_NEAR(inertia(X, l), r.S_W.trace(), 1e-8);
    EXPECT_NEAR(r.inertia, r.S_W.trace(), 1e-8);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(r.S_W).eigenvalues().minCoeff(), -1e-9);
    EXPECT_GE(r.det_criterion, 0.0);
  }
}

TEST(Inertia, Examples) {
  EXPECT_NEAR(inertia(cloud_2d({{0, 0}, {2, 0}}), {0, 0}), 2.0, 1e-15);
  EXPECT_EQ(inertia(cloud_2d({{0, 0}, {2, 0}}), {0, 1}), 0.0);
}

TEST(Metrics, LabelErrors) {
  const PointCloud X = cloud_2d({{0, 0}, {2, 0}});
  EXPECT_THROW(inertia(X, {0}), InputError);
  EXPECT_THROW(within_cluster_scatter(X, {0, -1}), InputError);
  EXPECT_THROW(adjusted_rand_index({0, 1}, {0}), InputError);
}

TEST(Ari, Examples) {
  EXPECT_EQ(adjusted_rand_index({0, 0, 1, 1, 2}, {0, 0, 1, 1, 2}), 1.0);
  EXPECT_NEAR(adjusted_rand_index({0, 0, 0, 0}, {0, 1, 2, 3}), 0.0, 1e-15);
  EXPECT_EQ(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
}

TEST(Ari, KnownValue) {
  // contingency [[2,1],[0,3]]: index 4, row/col pair sums 6 and 7, n = 6
  const double expected = (4.0 - 42.0 / 15.0) / (6.5 - 42.0 / 15.0);
  EXPECT_NEAR(adjusted_rand_index({0, 0, 0, 1, 1, 1}, {0, 0, 1, 1, 1, 1}), expected, 1e-14);
}

TEST(Ari, SymmetricAndPermutationInvariant) {
  Rng rng(99);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + uniform_index(rng, 49);
    const int ka = 1 + static_cast<int>(uniform_index(rng, 5)), kb = 1 + static_cast<int>(uniform_index(rng, 5));
    const Labels a = random_labels(n, ka, rng), b = random_labels(n, kb, rng);
    const double ab = adjusted_rand_index(a, b);
    EXPECT_NEAR(ab, adjusted_rand_index(b, a), 1e-12);
    std::vector<int> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Labels pa(a);
    for (int& x : pa) x = perm[static_cast<std::size_t>(x)];
    EXPECT_NEAR(ab, adjusted_rand_index(pa, b), 1e-12);
    EXPECT_LE(ab, 1.0 + 1e-12);
    EXPECT_GE(ab, -1.0 - 1e-12);
  }
}

TEST(Ari, RandomLabelingsNearZero) {
  Rng rng(7);
  double sum = 0.0;
  for (int rep = 0; rep < 1000; ++rep) sum += adjusted_rand_index(random_labels(200, 3, rng), random_labels(200, 3, rng));
  EXPECT_LT(std::abs(sum / 1000.0), 0.05);
}

TEST(Success, Examples) {
  Labels truth(100);
  for (std::size_t i = 0; i < 100; ++i) truth[i] = i < 50 ? 0 : 1;
  EXPECT_TRUE(success_indicator(truth, truth));
  Labels swapped(truth);
  for (int& x : swapped) x = 1 - x;
  EXPECT_TRUE(success_indicator(swapped, truth));
  Labels moved(truth);
  moved[0] = 1;
  EXPECT_FALSE(success_indicator(moved, truth));
  ClusteringResult r;
  r.labels = swapped;
  EXPECT_TRUE(success_indicator(r, truth));
}
