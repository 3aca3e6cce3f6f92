#include "chabauty/linalg.hpp"

#include <algorithm>

namespace chabauty::linalg {

Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unvec(const Vec& v, int dim) { return Eigen::Map<const Mat>(v.data(), dim, dim); }

Mat stack(const std::vector<Mat>& mats) {
  if (mats.empty()) return Mat(0, 0);
  Mat out(mats.front().size(), static_cast<Eigen::Index>(mats.size()));
  for (size_t i = 0; i < mats.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = vec(mats[i]);
  return out;
}

std::vector<Mat> unstack(const Mat& cols, int dim) {
  std::vector<Mat> out;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) out.push_back(unvec(cols.col(j), dim));
  return out;
}

Mat orthonormal_columns(const Mat& A, double cutoff) {
  if (A.cols() == 0 || A.rows() == 0) return Mat(A.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) >= cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

Mat null_space(const Mat& A, int ncols, double cutoff) {
  if (A.rows() == 0) return Mat::Identity(ncols, ncols);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) >= cutoff) ++r;
  return svd.matrixV().rightCols(ncols - r);
}

double subspace_gap(const Mat& U, const Mat& V) {
  if (U.cols() != V.cols()) return 1.0;
  if (U.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(U.transpose() * V);
  const double cmin = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  return std::sqrt(std::max(0.0, 1.0 - cmin * cmin));
}

double residual_to_span(const Mat& Q, const Mat& m) {
  const Vec v = vec(m);
  if (Q.cols() == 0) return v.norm();
  return (v - Q * (Q.transpose() * v)).norm();
}

}  // namespace chabauty::linalg
