#include "support.hpp"

#include <doctest.h>

using namespace chabauty;
using namespace testing;

TEST_CASE("root counts and base sizes") {
  for (int n = 2; n <= 4; ++n) {
    const RootSystem rs = build_root_system(GroupModel::special_linear(n));
    CHECK(rs.roots.size() == size_t(n * (n - 1)));
    CHECK(rs.base.size() == size_t(n - 1));
  }
  for (int p = 2; p <= 3; ++p) {
    const RootSystem rs = build_root_system(GroupModel::split_orthogonal(p));
    CHECK(rs.roots.size() == size_t(2 * p * (p - 1)));
    CHECK(rs.base.size() == size_t(p));
  }
}

TEST_CASE("root values agree with the ad-spectrum oracle") {
  Rng rng(21);
  for (const GroupModel& m : all_models()) {
    CAPTURE(m.label());
    const RootSystem rs = build_root_system(m);
    const Mat H = random_cartan(rs, rng, 1.0);
    std::vector<double> got;
    for (size_t r = 0; r < rs.roots.size(); ++r) got.push_back(rs.eval(int(r), H));
    std::sort(got.begin(), got.end());
    const std::vector<double> want = oracle_root_values(m, H);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
  }
}

TEST_CASE("roots are integral over the base with one sign") {
  for (const GroupModel& m : all_models()) {
    const RootSystem rs = build_root_system(m);
    int positive = 0;
    for (const Root& r : rs.roots) {
      const bool nonneg = (r.coeffs.array() >= 0).all(), nonpos = (r.coeffs.array() <= 0).all();
      CHECK((nonneg || nonpos));
      CHECK(r.positive == nonneg);
      positive += r.positive;
      CHECK(rs.find(-r.coeffs).has_value());
    }
    CHECK(2 * positive == int(rs.roots.size()));
    for (size_t b = 0; b < rs.base.size(); ++b) {
      const Eigen::VectorXi& c = rs.roots[size_t(rs.base[b])].coeffs;
      CHECK(c.sum() == 1);
      CHECK(c(Eigen::Index(b)) == 1);
    }
  }
}

TEST_CASE("root vectors satisfy the eigen relation and the bracket relation") {
  for (const GroupModel& m : all_models()) {
    const RootSystem rs = build_root_system(m);
    for (size_t r = 0; r < rs.roots.size(); ++r) {
      const Mat& X = rs.root_vectors[r];
      CHECK(is_algebra_member(X, m, 1e-12));
      for (const Mat& H : rs.cartan.a_basis) CHECK((H * X - X * H - rs.eval(int(r), H) * X).norm() < 1e-10);
    }
    for (size_t a = 0; a < rs.roots.size(); ++a)
      for (size_t b = 0; b < rs.roots.size(); ++b) {
        const Mat Z = rs.root_vectors[a] * rs.root_vectors[b] - rs.root_vectors[b] * rs.root_vectors[a];
        const Eigen::VectorXi s = rs.roots[a].coeffs + rs.roots[b].coeffs;
        const RootProjection p = root_space_project(Z, rs);
        Mat allowed = Mat::Zero(Z.rows(), Z.cols());
        if (s.isZero()) allowed = p.zero;
        else if (auto i = rs.find(s)) allowed = p.components[size_t(*i)];
        CHECK((Z - allowed).norm() < 1e-9);
      }
  }
}

TEST_CASE("root space projection reconstructs random elements") {
  Rng rng(22);
  for (const GroupModel& m : all_models()) {
    const RootSystem rs = build_root_system(m);
    const Mat X = random_algebra(m, rng, 1.0);
    const RootProjection p = root_space_project(X, rs);
    Mat sum = p.zero;
    for (const Mat& c : p.components) sum += c;
    CHECK((sum - X).norm() < 1e-10);
    Vec c = rs.coordinates(X);
    Mat rebuilt = Mat::Zero(X.rows(), X.cols());
    const auto basis = rs.algebra_basis();
    for (size_t i = 0; i < basis.size(); ++i) rebuilt += c(Eigen::Index(i)) * basis[i];
    CHECK((rebuilt - X).norm() < 1e-10);
  }
}

TEST_CASE("subset data: complements, nilradicals and M") {
  for (const GroupModel& m : all_models()) {
    const RootSystem rs = build_root_system(m);
    for (const Subset& I : all_subsets(rs.rank())) {
      CAPTURE(m.label());
      CAPTURE(subset_label(rs, I));
      const SubsetData sd = build_subset(rs, I);
      CHECK(sd.a_I_basis.size() + sd.aI_basis.size() == size_t(rs.rank()));
      CHECK(sd.a_I_basis.size() == size_t(rs.rank()) - I.size());
      for (const Mat& A : sd.a_I_basis) {
        for (int b : I) CHECK(std::abs(rs.eval_base(b, A)) < 1e-12);
        for (const Mat& B : sd.aI_basis) CHECK(std::abs(killing_form(m, A, B)) < 1e-10);
      }
      CHECK(sd.sigma_I_plus.size() + sd.sigma_sup_I_plus.size() == rs.roots.size() / 2);
      for (int r : sd.sigma_I_plus) {
        bool off = false;
        for (int b = 0; b < rs.rank(); ++b) off = off || (!contains(I, b) && rs.roots[size_t(r)].coeffs(b) != 0);
        CHECK(off);
      }
      // n_I is a subalgebra.
      const auto& N = sd.n_I_basis;
      if (!N.empty()) {
        Mat basis(N.front().size(), Eigen::Index(N.size()));
        for (size_t i = 0; i < N.size(); ++i) basis.col(Eigen::Index(i)) = Eigen::Map<const Vec>(N[i].data(), N[i].size());
        const Mat Q = Eigen::HouseholderQR<Mat>(basis).householderQ() * Mat::Identity(basis.rows(), basis.cols());
        for (const Mat& A : N)
          for (const Mat& B : N) {
            const Mat Z = A * B - B * A;
            const Vec z = Eigen::Map<const Vec>(Z.data(), Z.size());
            CHECK((z - Q * (Q.transpose() * z)).norm() < 1e-10);
          }
      }
      const int expected_M = m.family() == Family::SpecialLinear ? 1 << (m.dim() - 1) : 1 << (m.param() - 1);
      CHECK(sd.M_elements.size() == size_t(expected_M));
      for (const Mat& e : sd.M_elements) {
        CHECK(is_in_K(e, m, 1e-12));
        CHECK((e - Mat(e.diagonal().asDiagonal())).norm() == 0.0);
      }
      for (const Mat& K : sd.k_I_basis) CHECK((K + K.transpose()).norm() < 1e-12);
    }
  }
}

TEST_CASE("subset parsing and labels") {
  const RootSystem rs = build_root_system(GroupModel::special_linear(3));
  CHECK(parse_subset(rs, "a12") == Subset{0});
  CHECK(parse_subset(rs, "a2") == Subset{1});
  CHECK(parse_subset(rs, "none").empty());
  CHECK(parse_subset(rs, "").empty());
  CHECK(parse_subset(rs, "all") == full_subset(rs));
  CHECK(parse_subset(rs, subset_label(rs, {0, 1})) == Subset{0, 1});
  CHECK_THROWS_AS(parse_subset(rs, "a13"), Error);
}

TEST_CASE("chamber tests and facet subsets") {
  const RootSystem rs = build_root_system(GroupModel::special_linear(3));
  Mat H = Mat::Zero(3, 3);
  H.diagonal() << 2, 0, -2;
  CHECK(chamber_test(rs, H, false, 1e-12));
  H.diagonal() << 1, 1, -2;
  CHECK(chamber_test(rs, H, true, 1e-12));
  CHECK_FALSE(chamber_test(rs, H, false, 1e-12));
  CHECK(facet_subset_of(rs, H, 1e-12) == Subset{0});
  H.diagonal() << -1, 0, 1;
  CHECK_FALSE(chamber_test(rs, H, true, 1e-12));
  Mat off = Mat::Zero(3, 3);
  off(0, 1) = 1.0;
  CHECK_THROWS_AS(require_cartan(rs, off, 1e-12), Error);
}
