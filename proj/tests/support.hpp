#pragma once

// Test-side generators and oracles. Oracles avoid the library's own root data and factorizations.

#include "chabauty/polyhedral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using chabauty::GroupModel;
using chabauty::Mat;
using chabauty::Rng;
using chabauty::Subset;
using chabauty::Vec;

inline std::vector<GroupModel> core_models() {
  return {GroupModel::special_linear(2), GroupModel::special_linear(3), GroupModel::special_linear(4),
          GroupModel::split_orthogonal(2)};
}

inline std::vector<GroupModel> all_models() {
  auto m = core_models();
  m.push_back(GroupModel::split_orthogonal(3));
  return m;
}

inline std::vector<Subset> all_subsets(int rank) {
  std::vector<Subset> out;
  for (int mask = 0; mask < (1 << rank); ++mask) {
    Subset I;
    for (int b = 0; b < rank; ++b)
      if ((mask >> b) & 1) I.push_back(b);
    out.push_back(I);
  }
  return out;
}

inline bool contains(const Subset& I, int b) { return std::find(I.begin(), I.end(), b) != I.end(); }

/// Basis of the algebra from its defining linear relations: trace zero, or X^T J + J X = 0.
inline std::vector<Mat> oracle_algebra_basis(const GroupModel& model) {
  const int d = model.dim();
  const int n2 = d * d;
  Mat C;
  if (model.family() == chabauty::Family::SpecialLinear) {
    C = Mat::Zero(1, n2);
    for (int i = 0; i < d; ++i) C(0, i * d + i) = 1.0;
  } else {
    C = Mat::Zero(n2, n2);
    for (int e = 0; e < n2; ++e) {
      Mat E = Mat::Zero(d, d);
      E(e / d, e % d) = 1.0;
      const Mat R = E.transpose() * model.J() + model.J() * E;
      for (int f = 0; f < n2; ++f) C(f, e) = R(f / d, f % d);
    }
  }
  const Eigen::FullPivLU<Mat> lu(C);
  const Mat K = lu.kernel();
  std::vector<Mat> out;
  for (Eigen::Index c = 0; c < K.cols(); ++c) {
    Mat X(d, d);
    for (int e = 0; e < n2; ++e) X(e / d, e % d) = K(e, c);
    out.push_back(X);
  }
  return out;
}

/// Matrix of ad X on a basis, by least squares on the flattened images.
inline Mat oracle_ad(const Mat& X, const std::vector<Mat>& basis) {
  const int d = static_cast<int>(X.rows());
  const int m = static_cast<int>(basis.size());
  Mat B(d * d, m);
  for (int c = 0; c < m; ++c) B.col(c) = Eigen::Map<const Vec>(basis[static_cast<size_t>(c)].data(), d * d);
  Mat img(d * d, m);
  for (int c = 0; c < m; ++c) {
    const Mat Y = X * basis[static_cast<size_t>(c)] - basis[static_cast<size_t>(c)] * X;
    img.col(c) = Eigen::Map<const Vec>(Y.data(), d * d);
  }
  return B.colPivHouseholderQr().solve(img);
}

/// Killing form as the trace of ad X ad Y.
inline double oracle_killing(const GroupModel& model, const Mat& X, const Mat& Y) {
  const auto basis = oracle_algebra_basis(model);
  return (oracle_ad(X, basis) * oracle_ad(Y, basis)).trace();
}

/// Nonzero eigenvalues of ad H for diagonal H in the algebra, counted with multiplicity.
inline std::vector<double> oracle_root_values(const GroupModel& model, const Mat& H) {
  const auto basis = oracle_algebra_basis(model);
  const Eigen::EigenSolver<Mat> es(oracle_ad(H, basis));
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) > 1e-8) out.push_back(es.eigenvalues()(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

/// Classical Gram-Schmidt on the columns: g = q r with r upper triangular, positive diagonal.
inline void oracle_gram_schmidt(const Mat& g, Mat& q, Mat& r) {
  const Eigen::Index d = g.rows();
  q = Mat::Zero(d, d);
  r = Mat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec v = g.col(j);
    for (Eigen::Index i = 0; i < j; ++i) {
      r(i, j) = q.col(i).dot(g.col(j));
      v -= r(i, j) * q.col(i);
    }
    r(j, j) = v.norm();
    q.col(j) = v / r(j, j);
  }
}

/// Singular values, descending.
inline Vec oracle_singular_values(const Mat& g) { return Eigen::JacobiSVD<Mat>(g).singularValues(); }

/// Rotation by theta in the (i, j) plane.
inline Mat givens(int d, int i, int j, double theta) {
  Mat R = Mat::Identity(d, d);
  R(i, i) = R(j, j) = std::cos(theta);
  R(i, j) = -std::sin(theta);
  R(j, i) = std::sin(theta);
  return R;
}

/// Diagonal element of the Cartan subalgebra with Gaussian coordinates.
inline Mat random_cartan(const chabauty::RootSystem& rs, Rng& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Mat H = Mat::Zero(rs.model.dim(), rs.model.dim());
  for (const Mat& B : rs.cartan.a_basis) H += g(rng) * B;
  return H;
}

/// Corner point of I with base-root coordinates uniform in [0, top].
inline chabauty::PolyhedralPoint random_corner(const chabauty::RootSystem& rs, const Subset& I, Rng& rng,
                                               double top = 2.0) {
  std::uniform_real_distribution<double> U(0.0, top);
  std::vector<chabauty::ExtendedReal> c;
  for (int b = 0; b < rs.rank(); ++b)
    c.push_back(contains(I, b) ? chabauty::ExtendedReal::finite(U(rng)) : chabauty::ExtendedReal::inf());
  return chabauty::from_corner_coords(c, rs);
}

/// Diagonal sign matrix in M: orthogonal, diagonal, a group member.
inline Mat random_M(const chabauty::RootSystem& rs, Rng& rng) {
  const auto sd = chabauty::build_subset(rs, {});
  std::uniform_int_distribution<size_t> pick(0, sd.M_elements.size() - 1);
  return sd.M_elements[pick(rng)];
}

/// Element of exp(a_I) for the subset, Gaussian coordinates.
inline Mat random_A_I(const chabauty::SubsetData& sd, Rng& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  const int d = static_cast<int>(sd.aI_basis.empty() ? sd.a_I_basis.front().rows() : sd.aI_basis.front().rows());
  Mat H = Mat::Zero(d, d);
  for (const Mat& B : sd.a_I_basis) H += g(rng) * B;
  return chabauty::mat_exp(H);
}

/// Escape direction rescaled so the first base root outside I reaches `top` at step N.
inline Mat scaled_escape(const chabauty::RootSystem& rs, const Subset& I, int N, double top) {
  Mat dir = chabauty::escape_direction(rs, I);
  for (int b = 0; b < rs.rank(); ++b)
    if (!contains(I, b)) return dir * (top / (N * rs.eval_base(b, dir)));
  return Mat::Zero(dir.rows(), dir.cols());
}

}  // namespace testing
