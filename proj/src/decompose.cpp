#include "chabauty/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chabauty {

namespace {

Mat reversal(int d) {
  Mat P = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) P(i, d - 1 - i) = 1.0;
  return P;
}

void check_residual(const Mat& got, const Mat& want, double tol, const char* what) {
  const double res = (got - want).norm();
  if (!(res <= tol * std::max(1.0, want.norm())))
    throw Error(ErrorKind::Numerical, std::string(what) + " residual " + std::to_string(res) + " above tolerance");
}

// Sign-normalized QR: g = q r with diag(r) > 0.
void signed_qr(const Mat& g, Mat& q, Mat& r) {
  Eigen::HouseholderQR<Mat> qr(g);
  const int d = static_cast<int>(g.rows());
  q = qr.householderQ() * Mat::Identity(d, d);
  r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0) {
      q.col(i) *= -1.0;
      r.row(i) *= -1.0;
    }
}

bool is_diagonal(const Mat& X) {
  const Mat off = X - Mat(X.diagonal().asDiagonal());
  return off.norm() <= 1e-13 * std::max(1.0, X.norm());
}

// Weyl sort of a diagonal sl(n) element: descending entries, ties in index order.
ChamberProjection sort_sl(const GroupModel& model, const Mat& X) {
  const int d = model.dim();
  const Vec h = X.diagonal();
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return h(a) > h(b); });
  Mat k = Mat::Zero(d, d);
  Vec sorted(d);
  for (int s = 0; s < d; ++s) {
    k(s, order[s]) = 1.0;
    sorted(s) = h(order[s]);
  }
  if (k.determinant() < 0) k.row(0) *= -1.0;
  return {{model, Mat(sorted.asDiagonal())}, {model, k}};
}

// Weyl sort of a diagonal so(p,p) element: |h| descending with positive signs, except that
// an odd number of nonzero negative entries leaves the smallest one negative in the last slot.
ChamberProjection sort_sopp(const GroupModel& model, const Mat& X, double zero_tol) {
  const int p = model.param(), d = 2 * p;
  auto bar = [d](int i) { return d - 1 - i; };
  const Vec h = X.diagonal().head(p);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(h(a)) > std::abs(h(b)); });
  std::vector<bool> flip(p, false);
  int flips = 0;
  bool has_zero = false;
  for (int i = 0; i < p; ++i) {
    if (std::abs(h(i)) <= zero_tol) {
      has_zero = true;
    } else if (h(i) < 0) {
      flip[i] = true;
      ++flips;
    }
  }
  if (flips % 2 == 1) {
    if (has_zero) {
      for (int i = 0; i < p; ++i)
        if (std::abs(h(i)) <= zero_tol) {
          flip[i] = true;
          break;
        }
    } else {
      flip[order[p - 1]] = !flip[order[p - 1]];
    }
  }
  Mat k = Mat::Zero(d, d);
  for (int s = 0; s < p; ++s) {
    const int i = order[s];
    if (!flip[i]) {
      k(s, i) = 1.0;
      k(bar(s), bar(i)) = 1.0;
    } else {
      k(s, bar(i)) = 1.0;
      k(bar(s), i) = 1.0;
    }
  }
  const Eigen::Vector2d dets = split_block_dets(k, model);
  if (dets(0) < 0 && dets(1) < 0) {
    k.row(0) *= -1.0;
    k.row(d - 1) *= -1.0;
  } else if (dets(0) < 0 || dets(1) < 0) {
    throw Error(ErrorKind::Numerical, "Weyl sort left the identity component");
  }
  const Mat H = k * X * k.transpose();
  return {{model, Mat(H.diagonal().asDiagonal())}, {model, k}};
}

ChamberProjection eigen_sl(const GroupModel& model, const Mat& X) {
  const int d = model.dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
  Mat U(d, d);
  Vec lam(d);
  for (int s = 0; s < d; ++s) {
    U.col(s) = es.eigenvectors().col(d - 1 - s);
    lam(s) = es.eigenvalues()(d - 1 - s);
  }
  if (U.determinant() < 0) U.col(0) *= -1.0;
  return {{model, Mat(lam.asDiagonal())}, {model, Mat(U.transpose())}};
}

// Eigenbasis paired by v -> J v, zero eigenspace given a J-closed basis.
ChamberProjection eigen_sopp(const GroupModel& model, const Mat& X, const Tolerances& tol) {
  const int p = model.param(), d = 2 * p;
  const Mat& J = model.J();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
  const Vec& ev = es.eigenvalues();
  const Mat& V = es.eigenvectors();

  // Clusters of eigenvalues separated by gaps of at least spectrum_tol.
  std::vector<std::pair<int, int>> clusters;
  int start = 0;
  for (int i = 1; i <= d; ++i)
    if (i == d || ev(i) - ev(i - 1) >= tol.spectrum_tol) {
      clusters.emplace_back(start, i);
      start = i;
    }
  std::vector<int> pos, zero;
  int neg_count = 0;
  for (const auto& [lo, hi] : clusters) {
    const double mean = ev.segment(lo, hi - lo).mean();
    for (int i = lo; i < hi; ++i) {
      if (std::abs(mean) < tol.spectrum_tol) zero.push_back(i);
      else if (mean > 0) pos.push_back(i);
      else ++neg_count;
    }
  }
  if (static_cast<int>(pos.size()) != neg_count)
    throw Error(ErrorKind::Numerical, "eigenvalues of the symmetric element do not pair as (l, -l)");
  std::reverse(pos.begin(), pos.end());

  Mat U = Mat::Zero(d, d);
  int slot = 0;
  for (int i : pos) {
    U.col(slot) = V.col(i);
    U.col(d - 1 - slot) = J * V.col(i);
    ++slot;
  }
  if (!zero.empty()) {
    Mat Z(d, static_cast<Eigen::Index>(zero.size()));
    for (size_t c = 0; c < zero.size(); ++c) Z.col(static_cast<Eigen::Index>(c)) = V.col(zero[c]);
    Eigen::SelfAdjointEigenSolver<Mat> js(Z.transpose() * J * Z);
    std::vector<Vec> plus, minus;
    for (Eigen::Index c = 0; c < js.eigenvalues().size(); ++c) {
      const Vec u = Z * js.eigenvectors().col(c);
      (js.eigenvalues()(c) > 0 ? plus : minus).push_back(u);
    }
    if (plus.size() != minus.size())
      throw Error(ErrorKind::Numerical, "zero eigenspace has unbalanced J-signature");
    for (size_t j = 0; j < plus.size(); ++j) {
      const Vec w = (plus[j] + minus[j]) / std::sqrt(2.0);
      U.col(slot) = w;
      U.col(d - 1 - slot) = J * w;
      ++slot;
    }
  }
  Eigen::Vector2d dets = split_block_dets(U, model);
  if ((dets(0) < 0) != (dets(1) < 0)) {
    U.col(p - 1).swap(U.col(p));
    dets = split_block_dets(U, model);
  }
  if (dets(0) < 0 && dets(1) < 0) {
    U.col(0) *= -1.0;
    U.col(d - 1) *= -1.0;
  }
  const Mat k = U.transpose();
  if (!is_in_K(k, model, std::max(tol.factorization_tol, 1e-9)))
    throw Error(ErrorKind::Numerical, "J-paired eigenbasis is not in K");
  const Mat D = k * X * U;
  Vec hdiag(d);
  for (int s = 0; s < p; ++s) {
    const double v = 0.5 * (D(s, s) - D(d - 1 - s, d - 1 - s));
    hdiag(s) = v;
    hdiag(d - 1 - s) = -v;
  }
  return {{model, Mat(hdiag.asDiagonal())}, {model, k}};
}

}  // namespace

IwasawaFactors iwasawa(const GroupElement& g, bool opposite, const Tolerances& tol) {
  const GroupModel& model = g.model;
  const int d = model.dim();
  if (!is_group_member(g.mat, model, tol.membership_tol))
    throw Error(ErrorKind::Validation, "Iwasawa input is not in " + model.label());
  Mat q, r;
  if (!opposite) {
    signed_qr(g.mat, q, r);
  } else {
    // g P = q r with P the reversal; conjugating by P turns upper into lower triangular.
    const Mat P = reversal(d);
    signed_qr(g.mat * P, q, r);
    q = q * P;
    r = P * r * P;
  }
  if (q.determinant() < 0) {
    q.col(0) *= -1.0;
    r.row(0) *= -1.0;
  }
  const Vec diag = r.diagonal();
  Mat a = diag.asDiagonal();
  Mat n = diag.cwiseInverse().asDiagonal() * r;
  if (!opposite) n.triangularView<Eigen::StrictlyLower>().setZero();
  else n.triangularView<Eigen::StrictlyUpper>().setZero();
  n.diagonal().setOnes();
  check_residual(q * a * n, g.mat, tol.factorization_tol, "Iwasawa");
  if (diag.minCoeff() <= 0) throw Error(ErrorKind::Numerical, "Iwasawa A-factor not positive");
  if (!is_in_K(q, model, std::max(tol.factorization_tol, 1e-9)))
    throw Error(ErrorKind::Numerical, "Iwasawa K-factor left the group");
  return {{model, q}, {model, a}, {model, n}, opposite};
}

PolarFactors polar(const GroupElement& g, const Tolerances& tol) {
  const GroupModel& model = g.model;
  // SVD of g itself: forming g g^T would square the condition number.
  const Eigen::JacobiSVD<Mat> svd(g.mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s.minCoeff() > 0.0)) throw Error(ErrorKind::Numerical, "polar decomposition of a singular matrix");
  const Mat& U = svd.matrixU();
  const Mat X = U * s.array().log().matrix().asDiagonal() * U.transpose();
  const Mat k = U * svd.matrixV().transpose();
  if (!is_in_K(k, model, std::max(tol.factorization_tol, 1e-9)))
    throw Error(ErrorKind::Numerical, "polar K-factor left the group");
  check_residual(sym_exp(X) * k, g.mat, tol.factorization_tol, "polar");
  return {{model, X}, {model, k}};
}

ChamberProjection project_to_chamber(const AlgebraElement& X, const Tolerances& tol) {
  const GroupModel& model = X.model;
  const Mat Xs = 0.5 * (X.mat + X.mat.transpose());
  if ((X.mat - Xs).norm() > tol.membership_tol * std::max(1.0, X.mat.norm()))
    throw Error(ErrorKind::Validation, "project_to_chamber needs a symmetric element");
  ChamberProjection out = [&] {
    if (is_diagonal(Xs)) {
      return model.family() == Family::SpecialLinear ? sort_sl(model, Xs)
                                                     : sort_sopp(model, Xs, tol.spectrum_tol);
    }
    return model.family() == Family::SpecialLinear ? eigen_sl(model, Xs) : eigen_sopp(model, Xs, tol);
  }();
  check_residual(out.k.mat * Xs * out.k.mat.transpose(), out.H.mat, tol.factorization_tol, "chamber projection");
  return out;
}

CartanFactors cartan_kak(const GroupElement& g, const Tolerances& tol) {
  const PolarFactors pf = polar(g, tol);
  const ChamberProjection cp = project_to_chamber(pf.X, tol);
  const GroupModel& model = g.model;
  const Mat a = cp.H.mat.diagonal().array().exp().matrix().asDiagonal();
  const Mat k1 = cp.k.mat.transpose();
  const Mat k2 = cp.k.mat * pf.k.mat;
  check_residual(k1 * a * k2, g.mat, tol.factorization_tol, "Cartan");
  return {{model, k1}, {model, a}, {model, k2}};
}

}  // namespace chabauty
