#include "support.hpp"

#include <doctest.h>

using namespace chabauty;
using namespace testing;

namespace {

double oracle_dist_e(const Mat& g) {
  const Mat I = Mat::Identity(g.rows(), g.cols());
  return std::max((g - I).norm(), (g.inverse() - I).norm());
}

// Brute force directed distance with the inner-ball filter of the library.
double oracle_directed(const std::vector<Mat>& A, const std::vector<Mat>& B, double inner) {
  double out = 0.0;
  for (const Mat& p : A) {
    if (oracle_dist_e(p) > inner) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const Mat& q : B) best = std::min(best, group_distance(p, q));
    out = std::max(out, best);
  }
  return out;
}

std::vector<Mat> random_cloud(const GroupModel& m, Rng& rng, int count) {
  std::vector<Mat> out;
  for (int i = 0; i < count; ++i) out.push_back(random_group(m, rng, 1.2));
  return out;
}

}  // namespace

TEST_CASE("ball validation") {
  BallSpec b;
  CHECK_NOTHROW(b.validate());
  b.mesh = 7.0;
  CHECK_THROWS_AS(b.validate(), Error);
  b = BallSpec{};
  b.max_points = 10;
  CHECK_THROWS_AS(b.validate(), Error);
}

TEST_CASE("Hausdorff distance agrees with the brute-force oracle") {
  Rng rng(61);
  const BallSpec ball;
  for (const GroupModel& m : core_models()) {
    for (int t = 0; t < 5; ++t) {
      const auto A = random_cloud(m, rng, 60), B = random_cloud(m, rng, 50);
      const SampledSubgroup SA = from_points(A, ball, "A"), SB = from_points(B, ball, "B");
      const double inner = ball.R - 2 * ball.mesh;
      const double want = std::max(oracle_directed(SA.points, SB.points, inner), oracle_directed(SB.points, SA.points, inner));
      CHECK(hausdorff(SA, SB) == doctest::Approx(want).epsilon(1e-12));
      CHECK(hausdorff(SB, SA) == doctest::Approx(want).epsilon(1e-12));
      CHECK(directed_hausdorff(SA, SB) == doctest::Approx(oracle_directed(SA.points, SB.points, inner)).epsilon(1e-12));
      CHECK(hausdorff(SA, SA) == 0.0);
    }
  }
}

TEST_CASE("Hausdorff distance rejects incompatible samples") {
  Rng rng(62);
  const GroupModel m = GroupModel::special_linear(2);
  const SampledSubgroup S = from_points(random_cloud(m, rng, 5), BallSpec{}, "S");
  BallSpec other;
  other.R = 5.0;
  const SampledSubgroup T = from_points(random_cloud(m, rng, 5), other, "T");
  CHECK_THROWS_AS(hausdorff(S, T), Error);
  CHECK_THROWS_AS(hausdorff(S, from_points({}, BallSpec{}, "empty")), Error);
  const SampledSubgroup U = from_points(random_cloud(GroupModel::special_linear(3), rng, 5), BallSpec{}, "U");
  CHECK_THROWS_AS(hausdorff(S, U), Error);
}

TEST_CASE("from_points keeps only the ball") {
  const BallSpec ball;
  Mat far = Mat::Identity(2, 2);
  far(0, 0) = 10.0;
  far(1, 1) = 0.1;
  const SampledSubgroup S = from_points({Mat::Identity(2, 2), far}, ball, "x");
  CHECK(S.size() == 1);
}

TEST_CASE("sample of K is a fine net of K") {
  Rng rng(63);
  const Tolerances tol;
  for (const GroupModel& m : core_models()) {
    const RootSystem rs = build_root_system(m);
    const SampledSubgroup S = sample_conjugated_K(rs, Mat::Identity(m.dim(), m.dim()), BallSpec{}, 1, tol);
    CHECK(S.size() > 0);
    for (const Mat& g : S.points) CHECK(is_in_K(g, m, 1e-9));
    // every probe of K lies near the net
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const Mat k = random_K(m, rng);
      double best = std::numeric_limits<double>::infinity();
      for (const Mat& g : S.points) best = std::min(best, group_distance(k, g));
      worst = std::max(worst, best);
    }
    // 20000 points resolve K finely only up to dimension 3.
    if (m.dim() <= 3 || m.family() == Family::SplitOrthogonal) CHECK(worst < 0.5);
    else CHECK(worst < 2.0);
  }
}

TEST_CASE("samples of D^I are members and fill the ball") {
  Rng rng(64);
  const Tolerances tol;
  BallSpec ball;
  ball.R = 4.0;
  ball.mesh = 0.3;
  ball.max_points = 4000;
  for (const GroupModel& m : core_models()) {
    const RootSystem rs = build_root_system(m);
    for (const Subset& I : all_subsets(rs.rank())) {
      const PolyhedralPoint p = random_corner(rs, I, rng, 1.0);
      const LimitGroupDescriptor d{I, mat_exp(p.rep), random_K(m, rng)};
      const StructuredSubgroup sg = build_limit_group(rs, d, tol);
      const SampledSubgroup S = sample(rs, d, ball, 3);
      CHECK(S.size() > 0);
      CHECK(S.size() <= size_t(ball.max_points));
      CHECK(S.keys.size() == S.size());
      for (const Mat& g : S.points) {
        CHECK(member(g, sg, rs, 1e-6));
        CHECK(oracle_dist_e(g) <= ball.R + 1e-9);
      }
      CHECK(S.coverage_estimate >= 0.0);
    }
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const RootSystem rs = build_root_system(GroupModel::special_linear(3));
  const LimitGroupDescriptor d{{0}, Mat::Identity(3, 3), Mat::Identity(3, 3)};
  BallSpec ball;
  ball.max_points = 3000;
  const SampledSubgroup a = sample(rs, d, ball, 5), b = sample(rs, d, ball, 5);
  REQUIRE(a.size() == b.size());
  CHECK(a.keys == b.keys);
  CHECK((a.flat - b.flat).norm() == 0.0);
}

TEST_CASE("conjugating a sample by an element of K is an isometry of distances") {
  Rng rng(65);
  const GroupModel m = GroupModel::special_linear(3);
  const SampledSubgroup A = from_points(random_cloud(m, rng, 30), BallSpec{}, "A");
  const SampledSubgroup B = from_points(random_cloud(m, rng, 30), BallSpec{}, "B");
  const Mat k = random_K(m, rng);
  CHECK(hausdorff(conjugate(A, k), conjugate(B, k)) == doctest::Approx(hausdorff(A, B)).epsilon(1e-9));
}

TEST_CASE("escape directions and geometric sequences") {
  for (const GroupModel& m : core_models()) {
    const RootSystem rs = build_root_system(m);
    for (const Subset& I : all_subsets(rs.rank())) {
      const Mat H = escape_direction(rs, I);
      for (int b = 0; b < rs.rank(); ++b) {
        if (contains(I, b)) CHECK(std::abs(rs.eval_base(b, H)) < 1e-12);
        else CHECK(rs.eval_base(b, H) > 0.5);
      }
      for (Eigen::Index i = 0; i < H.rows(); ++i) CHECK(H(i, i) == std::round(H(i, i)));
      const auto seq = geometric_sequence(rs, I, 2.0, 6);
      CHECK(seq.size() == 6);
      if (I.size() != size_t(rs.rank())) CHECK_NOTHROW(require_escaping(rs, I, seq, 1e-9));
    }
  }
  const RootSystem rs = build_root_system(GroupModel::special_linear(3));
  const auto seq = geometric_sequence(rs, {}, 2.0, 6);
  CHECK_THROWS_AS(require_escaping(rs, {0}, seq, 1e-9), Error);
  const std::vector<Mat> still(6, Mat::Identity(3, 3));
  CHECK_THROWS_AS(require_escaping(rs, {}, still, 1e-9), Error);
}

TEST_CASE("eventually_decreasing") {
  std::vector<ConvergenceRow> t{{1, 3.0}, {2, 4.0}, {3, 2.0}, {4, 1.0}, {5, 1e-13}, {6, 2e-13}};
  CHECK(eventually_decreasing(t, 3));
  CHECK_FALSE(eventually_decreasing(t, 1));
  CHECK_FALSE(eventually_decreasing(t, 3, 0.0));
}

TEST_CASE("toy limits in R follow the angle chart") {
  CHECK(toy_angle(ToySubgroupR::trivial()) == 0.0);
  CHECK(toy_angle(ToySubgroupR::full()) == doctest::Approx(M_PI / 2));
  CHECK(toy_angle(ToySubgroupR::lattice(1.0)) == doctest::Approx(M_PI / 4));
  CHECK_THROWS_AS(ToySubgroupR::lattice(0.0), Error);
  std::vector<ToySubgroupR> to_c, to_full, to_triv, bad;
  for (int n = 1; n <= 40; ++n) {
    to_c.push_back(ToySubgroupR::lattice(2.0 + std::exp(-double(n))));
    to_full.push_back(ToySubgroupR::lattice(std::exp(-double(n))));
    to_triv.push_back(ToySubgroupR::lattice(std::exp(double(n))));
    bad.push_back(ToySubgroupR::lattice(n % 2 ? 1.0 : 2.0));
  }
  const ToySubgroupR c = toy_limit_R(to_c);
  CHECK(c.kind == ToySubgroupR::Kind::Lattice);
  CHECK(c.c == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(toy_limit_R(to_full).kind == ToySubgroupR::Kind::Full);
  CHECK(toy_limit_R(to_triv).kind == ToySubgroupR::Kind::Trivial);
  CHECK_THROWS_AS(toy_limit_R(bad), Error);
  CHECK_THROWS_AS(toy_limit_R({ToySubgroupR::full()}), Error);
}

TEST_CASE("toy limits in R of algebraically converging spacings") {
  std::vector<ToySubgroupR> up, down, three, slow;
  for (int n = 1; n <= 40; ++n) {
    up.push_back(ToySubgroupR::lattice(n));
    down.push_back(ToySubgroupR::lattice(1.0 / n));
    three.push_back(ToySubgroupR::lattice(3.0 + 1.0 / n));
    slow.push_back(ToySubgroupR::lattice(3.0 + std::sin(std::log(double(n)))));
  }
  CHECK(toy_limit_R(up).kind == ToySubgroupR::Kind::Trivial);
  CHECK(toy_limit_R(down).kind == ToySubgroupR::Kind::Full);
  const ToySubgroupR l = toy_limit_R(three);
  CHECK(l.kind == ToySubgroupR::Kind::Lattice);
  CHECK(l.c == doctest::Approx(3.0).epsilon(1e-5));
  CHECK_THROWS_AS(toy_limit_R(slow), Error);
}

TEST_CASE("toy limits in Z") {
  std::vector<long> constant(12, 6), growing, bad;
  for (int k = 1; k <= 12; ++k) {
    growing.push_back(long(std::pow(10, k)));
    bad.push_back(k % 2 ? 2 : 3);
  }
  CHECK(toy_limit_Z(constant) == 6);
  CHECK(toy_limit_Z(growing) == 0);
  std::vector<long> linear;
  for (long n = 1; n <= 40; ++n) linear.push_back(n);
  CHECK(toy_limit_Z(linear) == 0);
  CHECK(toy_limit_Z(std::vector<long>(8, 0)) == 0);
  CHECK_THROWS_AS(toy_limit_Z(bad), Error);
  CHECK_THROWS_AS(toy_limit_Z({1, 2, -3, 4}), Error);
}

TEST_CASE("sequential criterion accepts the true limit and rejects a wrong one") {
  const RootSystem rs = build_root_system(GroupModel::special_linear(2));
  const Tolerances tol;
  BallSpec ball;
  ball.max_points = 5000;
  const auto a_seq = geometric_sequence(rs, {}, 2.0, 10);
  const ConvergenceResult res = convergence_experiment(rs, {}, a_seq, ball, 7, tol, true);
  REQUIRE(res.samples.size() == 10);
  CHECK(res.table.back().distance < 0.5);
  CHECK(verify_sequential_criterion(res.samples, res.limit, 0.5).holds());
  const SampledSubgroup K = sample_conjugated_K(rs, Mat::Identity(2, 2), ball, 7, tol);
  const SequentialCriterionReport wrong = verify_sequential_criterion(res.samples, K, 0.5);
  CHECK_FALSE(wrong.holds());
}
