#include "support.hpp"

#include <doctest.h>

using namespace chabauty;
using namespace testing;

namespace {

Mat reversal(int d) {
  Mat P = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) P(i, d - 1 - i) = 1.0;
  return P;
}

}  // namespace

TEST_CASE("Iwasawa factors agree with Gram-Schmidt") {
  Rng rng(31);
  const Tolerances tol;
  for (const GroupModel& m : all_models()) {
    CAPTURE(m.label());
    for (int i = 0; i < 20; ++i) {
      const Mat g = random_group(m, rng, 2.0);
      Mat q, r;
      oracle_gram_schmidt(g, q, r);
      const IwasawaFactors f = iwasawa({m, g}, false, tol);
      const Mat a = r.diagonal().asDiagonal();
      CHECK((f.k.mat - q).norm() < 1e-8);
      CHECK((f.a.mat - a).norm() < 1e-8 * a.norm());
      CHECK((f.n.mat - a.inverse() * r).norm() < 1e-8 * r.norm());
      CHECK(is_group_member(f.n.mat, m, 1e-8));
      CHECK(is_group_member(f.a.mat, m, 1e-8));
    }
  }
}

TEST_CASE("opposite Iwasawa agrees with Gram-Schmidt on reversed columns") {
  Rng rng(32);
  const Tolerances tol;
  for (const GroupModel& m : all_models()) {
    const int d = m.dim();
    const Mat P = reversal(d);
    for (int i = 0; i < 20; ++i) {
      const Mat g = random_group(m, rng, 2.0);
      Mat q, r;
      oracle_gram_schmidt(g * P, q, r);
      const Mat L = P * r * P;
      const Mat a = L.diagonal().asDiagonal();
      const IwasawaFactors f = iwasawa({m, g}, true, tol);
      CHECK(f.opposite);
      CHECK((f.k.mat - q * P).norm() < 1e-8);
      CHECK((f.a.mat - a).norm() < 1e-8 * a.norm());
      CHECK((f.n.mat - a.inverse() * L).norm() < 1e-8 * L.norm());
    }
  }
}

TEST_CASE("polar and Cartan factors reconstruct and match singular values") {
  Rng rng(33);
  const Tolerances tol;
  for (const GroupModel& m : all_models()) {
    const RootSystem rs = build_root_system(m);
    for (int i = 0; i < 20; ++i) {
      const Mat g = random_group(m, rng, 3.0);
      const PolarFactors p = polar({m, g}, tol);
      CHECK((p.X.mat - p.X.mat.transpose()).norm() < 1e-12);
      CHECK(is_in_K(p.k.mat, m, 1e-9));
      CHECK((mat_exp(p.X.mat) * p.k.mat - g).norm() < 1e-8 * g.norm());
      const CartanFactors c = cartan_kak({m, g}, tol);
      CHECK((c.k1.mat * c.a.mat * c.k2.mat - g).norm() < 1e-8 * g.norm());
      Vec got = c.a.mat.diagonal();
      std::sort(got.data(), got.data() + got.size(), std::greater<double>());
      const Vec want = oracle_singular_values(g);
      CHECK((got - want).norm() < 1e-8 * want(0));
      const Mat H = c.a.mat.diagonal().array().log().matrix().asDiagonal();
      CHECK(chamber_test(rs, H, true, 1e-9));
    }
  }
}

TEST_CASE("Cartan factor of an element of K is the identity") {
  Rng rng(34);
  for (const GroupModel& m : all_models()) {
    const CartanFactors c = cartan_kak({m, random_K(m, rng)}, Tolerances{});
    CHECK((c.a.mat - Mat::Identity(m.dim(), m.dim())).norm() < 1e-10);
  }
}

TEST_CASE("Cartan a-factor of a diagonal element is its chamber representative") {
  const GroupModel m = GroupModel::special_linear(3);
  Mat H = Mat::Zero(3, 3);
  H.diagonal() << -1.0, 2.0, -1.0;
  const CartanFactors c = cartan_kak({m, mat_exp(H)}, Tolerances{});
  Vec want(3);
  want << std::exp(2.0), std::exp(-1.0), std::exp(-1.0);
  CHECK((c.a.mat.diagonal() - want).norm() < 1e-12);
}

TEST_CASE("chamber projection lands in the closed chamber") {
  Rng rng(35);
  for (const GroupModel& m : all_models()) {
    const RootSystem rs = build_root_system(m);
    for (int i = 0; i < 10; ++i) {
      const Mat A = random_algebra(m, rng, 2.0);
      const Mat X = 0.5 * (A + A.transpose());
      const ChamberProjection cp = project_to_chamber({m, X}, Tolerances{});
      CHECK(chamber_test(rs, cp.H.mat, true, 1e-9));
      CHECK((cp.k.mat * X * cp.k.mat.transpose() - cp.H.mat).norm() < 1e-9);
      CHECK(is_in_K(cp.k.mat, m, 1e-9));
    }
    const Mat A = random_algebra(m, rng, 1.0);
    CHECK_THROWS_AS(project_to_chamber({m, A - A.transpose()}, Tolerances{}), Error);
  }
}

TEST_CASE("Cartan a-factor is continuous") {
  Rng rng(36);
  const Tolerances tol;
  for (const GroupModel& m : core_models()) {
    for (int i = 0; i < 5; ++i) {
      const Mat g = random_group(m, rng, 2.0);
      const Mat Y = random_algebra(m, rng, 1.0);
      const Vec base = cartan_kak({m, g}, tol).a.mat.diagonal().array().log();
      double prev = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= 8; ++j) {
        const Mat gj = g * mat_exp(std::pow(10.0, -j) * Y);
        const double dist = (Vec(cartan_kak({m, gj}, tol).a.mat.diagonal().array().log()) - base).norm();
        CHECK(dist < prev);
        prev = dist;
      }
    }
  }
}
