#include "support.hpp"

#include <doctest.h>

using namespace chabauty;
using namespace testing;

TEST_CASE("model parsing and dimensions") {
  CHECK(GroupModel::parse("sl:3").dim() == 3);
  CHECK(GroupModel::parse("sopp:2").dim() == 4);
  CHECK(GroupModel::parse("sopp:3").label() == "sopp:3");
  CHECK_THROWS_AS(GroupModel::parse("sl:1"), Error);
  CHECK_THROWS_AS(GroupModel::parse("su:3"), Error);
  CHECK_THROWS_AS(GroupModel::parse("sl"), Error);
}

TEST_CASE("tolerances must be positive") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.spectrum_tol = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("killing form matches the ad-trace oracle") {
  Rng rng(11);
  for (const GroupModel& m : all_models()) {
    CAPTURE(m.label());
    // so(p,p) carries the normalization 2p tr, a fixed multiple of the ad-trace form (2p - 2) tr.
    const double ratio =
        m.family() == Family::SpecialLinear ? 1.0 : double(2 * m.param()) / double(2 * m.param() - 2);
    for (int i = 0; i < 5; ++i) {
      const Mat X = random_algebra(m, rng, 1.0), Y = random_algebra(m, rng, 1.0);
      const double got = killing_form(m, X, Y), want = ratio * oracle_killing(m, X, Y);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
  const GroupModel sl2 = GroupModel::special_linear(2);
  Mat H(2, 2);
  H << 1, 0, 0, -1;
  CHECK(killing_form(sl2, H, H) == doctest::Approx(8.0));
  CHECK(killing_form(sl2, Mat::Zero(2, 2), H) == 0.0);
}

TEST_CASE("killing form is ad-invariant and the twisted form is positive") {
  Rng rng(12);
  for (const GroupModel& m : all_models()) {
    for (int i = 0; i < 10; ++i) {
      const AlgebraElement X{m, random_algebra(m, rng, 1.0)}, Y{m, random_algebra(m, rng, 1.0)},
          Z{m, random_algebra(m, rng, 1.0)};
      const double inv = killing_form(bracket(Z, X), Y) + killing_form(X, bracket(Z, Y));
      CHECK(std::abs(inv) < 1e-9);
      CHECK(b_theta(X, X) > 0.0);
      const AlgebraElement tt = cartan_involution(cartan_involution(X));
      CHECK((tt.mat - X.mat).norm() < 1e-14);
    }
  }
}

TEST_CASE("membership predicates") {
  Rng rng(13);
  for (const GroupModel& m : all_models()) {
    CAPTURE(m.label());
    const Mat X = random_algebra(m, rng, 1.0);
    CHECK(is_algebra_member(X, m, 1e-10));
    CHECK_FALSE(is_algebra_member(X + Mat::Identity(m.dim(), m.dim()), m, 1e-10));
    const Mat g = random_group(m, rng, 2.0);
    CHECK(is_group_member(g, m, 1e-8));
    CHECK_FALSE(is_group_member(2.0 * g, m, 1e-8));
    CHECK(is_in_K(random_K(m, rng), m, 1e-10));
    CHECK_FALSE(is_in_K(g * mat_exp(0.5 * (X + X.transpose())), m, 1e-6));
    CHECK_THROWS_AS(AlgebraElement::checked(m, X + Mat::Identity(m.dim(), m.dim()), 1e-10), Error);
  }
}

TEST_CASE("split orthogonal identity component is detected by block determinants") {
  const GroupModel m = GroupModel::split_orthogonal(2);
  Rng rng(14);
  const Mat g = random_group(m, rng, 1.0);
  const Eigen::Vector2d dets = split_block_dets(g, m);
  CHECK(dets(0) > 0.0);
  CHECK(dets(1) > 0.0);
  // diag(-1, 1, 1, -1) preserves J and has determinant 1 but lies outside the identity component.
  Mat s = Mat::Identity(4, 4);
  s(0, 0) = s(3, 3) = -1.0;
  CHECK(std::abs((s.transpose() * m.J() * s - m.J()).norm()) < 1e-15);
  CHECK_FALSE(is_group_member(s, m, 1e-9));
}

TEST_CASE("exponential and logarithm are mutually inverse near the identity") {
  Rng rng(15);
  for (const GroupModel& m : all_models()) {
    for (int i = 0; i < 10; ++i) {
      const Mat X = random_algebra(m, rng, 1.5);
      const Mat g = mat_exp(X);
      CHECK((mat_log(g) - X).norm() < 1e-10);
      CHECK(is_group_member(g, m, 1e-10));
      CHECK((group_log(group_exp({m, X})).mat - X).norm() < 1e-10);
    }
  }
  Mat N = Mat::Zero(3, 3);
  N(0, 1) = 2.0;
  N(1, 2) = 3.0;
  Mat want = Mat::Identity(3, 3) + N + 0.5 * N * N;
  CHECK((mat_exp(N) - want).norm() == 0.0);
  CHECK((unipotent_log(want) - N).norm() < 1e-14);
  // The spectrum of a rotation by pi meets the negative real axis.
  CHECK_THROWS_AS(mat_log(givens(2, 0, 1, M_PI)), Error);
}

TEST_CASE("symmetric exponential and logarithm agree with the eigen-oracle") {
  Rng rng(16);
  for (int i = 0; i < 10; ++i) {
    const Mat A = random_algebra(GroupModel::special_linear(4), rng, 2.0);
    const Mat S = 0.5 * (A + A.transpose());
    const Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Mat want = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                     es.eigenvectors().transpose();
    CHECK((sym_exp(S) - want).norm() < 1e-10 * want.norm());
    CHECK((spd_log(want) - S).norm() < 1e-10);
  }
}

TEST_CASE("projection onto the algebra is idempotent and orthogonal") {
  Rng rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const GroupModel& m : all_models()) {
    Mat A(m.dim(), m.dim());
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
    const Mat P = project_to_algebra(A, m);
    CHECK(is_algebra_member(P, m, 1e-12));
    CHECK((project_to_algebra(P, m) - P).norm() < 1e-12);
    for (const Mat& B : oracle_algebra_basis(m)) CHECK(std::abs(((A - P).array() * B.array()).sum()) < 1e-10);
  }
}

TEST_CASE("group distance is a metric on samples") {
  Rng rng(18);
  const GroupModel m = GroupModel::special_linear(3);
  for (int i = 0; i < 20; ++i) {
    const Mat a = random_group(m, rng, 1.0), b = random_group(m, rng, 1.0), c = random_group(m, rng, 1.0);
    CHECK(group_distance(a, a) == 0.0);
    CHECK(group_distance(a, b) == doctest::Approx(group_distance(b, a)));
    CHECK(group_distance(a, c) <= group_distance(a, b) + group_distance(b, c) + 1e-12);
  }
}
