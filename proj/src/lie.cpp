#include "chabauty/lie.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

namespace chabauty {

void Tolerances::validate() const {
  if (!(factorization_tol > 0) || !(membership_tol > 0) || !(spectrum_tol > 0))
    throw Error(ErrorKind::Validation, "tolerances must be strictly positive");
}

GroupModel::GroupModel(Family f, int param) : family_(f), param_(param) {
  if (param < 2) throw Error(ErrorKind::Validation, "model parameter must be >= 2");
  if (f == Family::SplitOrthogonal) {
    const int d = 2 * param;
    J_ = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) J_(i, d - 1 - i) = 1.0;
  }
}

GroupModel GroupModel::special_linear(int n) { return GroupModel(Family::SpecialLinear, n); }
GroupModel GroupModel::split_orthogonal(int p) { return GroupModel(Family::SplitOrthogonal, p); }

GroupModel GroupModel::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Validation, "model must look like sl:N or sopp:P");
  const std::string fam = text.substr(0, colon);
  int value = 0;
  try {
    size_t used = 0;
    value = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorKind::Validation, "bad model parameter in '" + text + "'");
  }
  if (fam == "sl") return special_linear(value);
  if (fam == "sopp") return split_orthogonal(value);
  throw Error(ErrorKind::Validation, "unknown model family '" + fam + "'");
}

std::string GroupModel::label() const {
  return (family_ == Family::SpecialLinear ? "sl:" : "sopp:") + std::to_string(param_);
}

AlgebraElement AlgebraElement::checked(const GroupModel& model, const Mat& mat, double tol) {
  if (!is_algebra_member(mat, model, tol))
    throw Error(ErrorKind::Validation, "matrix is not in the Lie algebra of " + model.label());
  return {model, mat};
}

GroupElement GroupElement::checked(const GroupModel& model, const Mat& mat, double tol) {
  if (!is_group_member(mat, model, tol))
    throw Error(ErrorKind::Validation, "matrix is not in the group " + model.label());
  return {model, mat};
}

GroupElement GroupElement::identity(const GroupModel& model) {
  return {model, Mat::Identity(model.dim(), model.dim())};
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  if (model != o.model) throw Error(ErrorKind::ModelMismatch, "group elements of different models");
  return {model, mat * o.mat};
}

GroupElement GroupElement::inverse() const { return {model, mat.inverse()}; }

namespace {

void require_same(const GroupModel& a, const GroupModel& b) {
  if (a != b) throw Error(ErrorKind::ModelMismatch, "model mismatch: " + a.label() + " vs " + b.label());
}

void require_dim(const Mat& m, const GroupModel& model) {
  if (m.rows() != model.dim() || m.cols() != model.dim())
    throw Error(ErrorKind::Validation, "matrix dimension does not match " + model.label());
}

// Orthonormal change of basis Q with Q^T J Q = diag(I_p, -I_p).
Mat split_basis(const GroupModel& model) {
  const int p = model.param(), d = 2 * p;
  Mat Q = Mat::Zero(d, d);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < p; ++i) {
    Q(i, i) = s;
    Q(d - 1 - i, i) = s;
    Q(i, p + i) = s;
    Q(d - 1 - i, p + i) = -s;
  }
  return Q;
}

}  // namespace

AlgebraElement bracket(const AlgebraElement& X, const AlgebraElement& Y) {
  require_same(X.model, Y.model);
  return {X.model, X.mat * Y.mat - Y.mat * X.mat};
}

double killing_form(const GroupModel& model, const Mat& X, const Mat& Y) {
  // sl(n): 2n tr(XY). so(p,p): 2p tr(XY).
  return 2.0 * model.param() * (X * Y).trace();
}

double killing_form(const AlgebraElement& X, const AlgebraElement& Y) {
  require_same(X.model, Y.model);
  return killing_form(X.model, X.mat, Y.mat);
}

AlgebraElement cartan_involution(const AlgebraElement& X) { return {X.model, -X.mat.transpose()}; }

double b_theta(const AlgebraElement& X, const AlgebraElement& Y) {
  require_same(X.model, Y.model);
  return -killing_form(X.model, X.mat, -Y.mat.transpose());
}

bool is_algebra_member(const Mat& X, const GroupModel& model, double tol) {
  require_dim(X, model);
  const double scale = std::max(1.0, X.norm());
  if (model.family() == Family::SpecialLinear) return std::abs(X.trace()) <= tol * scale;
  const Mat& J = model.J();
  return (J * X.transpose() * J + X).norm() <= tol * scale;
}

bool is_group_member(const Mat& g, const GroupModel& model, double tol) {
  require_dim(g, model);
  if (!g.allFinite()) return false;
  const double det = g.determinant();
  const double scale = std::max(1.0, g.squaredNorm());
  if (model.family() == Family::SpecialLinear) return std::abs(det - 1.0) <= tol * scale;
  const Mat& J = model.J();
  if ((g.transpose() * J * g - J).norm() > tol * scale) return false;
  if (std::abs(det - 1.0) > tol * scale) return false;
  const Eigen::Vector2d dets = split_block_dets(g, model);
  return dets(0) > 0 && dets(1) > 0;
}

Eigen::Vector2d split_block_dets(const Mat& g, const GroupModel& model) {
  const int p = model.param();
  const Mat Q = split_basis(model);
  const Mat h = Q.transpose() * g * Q;
  return {h.topLeftCorner(p, p).determinant(), h.bottomRightCorner(p, p).determinant()};
}

bool is_in_K(const Mat& g, const GroupModel& model, double tol) {
  require_dim(g, model);
  const Mat I = Mat::Identity(g.rows(), g.cols());
  return (g.transpose() * g - I).norm() <= tol && is_group_member(g, model, tol);
}

Mat mat_exp(const Mat& X) {
  const int d = static_cast<int>(X.rows());
  // Exactly nilpotent input: the series terminates at X^(d-1).
  Mat power = X;
  Mat sum = Mat::Identity(d, d) + X;
  double fact = 1.0;
  for (int k = 2; k <= d; ++k) {
    power = power * X;
    if (power.isZero(0.0)) return sum;
    fact *= k;
    sum += power / fact;
  }
  if ((power * X).isZero(0.0)) return sum;
  return X.exp();
}

Mat mat_log(const Mat& g) {
  Eigen::EigenSolver<Mat> es(g, false);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> l = es.eigenvalues()(i);
    if (std::abs(l.imag()) <= 1e-12 * std::max(1.0, std::abs(l)) && l.real() <= 0)
      throw Error(ErrorKind::Domain, "logarithm undefined: spectrum meets the closed negative real axis");
  }
  return g.log();
}

Mat spd_log(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
  if (es.eigenvalues().minCoeff() <= 0) throw Error(ErrorKind::Domain, "matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() * es.eigenvectors().transpose();
}

Mat sym_exp(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

GroupElement group_exp(const AlgebraElement& X) { return {X.model, mat_exp(X.mat)}; }

AlgebraElement group_log(const GroupElement& g) { return {g.model, mat_log(g.mat)}; }

Mat project_to_algebra(const Mat& X, const GroupModel& model) {
  require_dim(X, model);
  if (model.family() == Family::SpecialLinear) {
    return X - (X.trace() / X.rows()) * Mat::Identity(X.rows(), X.cols());
  }
  const Mat& J = model.J();
  return 0.5 * (X - J * X.transpose() * J);
}

Mat random_algebra(const GroupModel& model, Rng& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = model.dim();
  Mat X(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = gauss(rng);
  X = project_to_algebra(X, model);
  const double nrm = X.norm();
  return nrm > 0 ? Mat(X * (scale / nrm)) : X;
}

Mat random_K(const GroupModel& model, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  const Mat X = random_algebra(model, rng, 1.0);
  Mat A = 0.5 * (X - X.transpose());
  const double nrm = A.norm();
  if (nrm > 0) A *= unif(rng) / nrm;
  return mat_exp(A);
}

Mat random_group(const GroupModel& model, Rng& rng, double log_scale) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Mat X = random_algebra(model, rng, 1.0);
  Mat P = 0.5 * (X + X.transpose());
  const double nrm = P.norm();
  if (nrm > 0) P *= unif(rng) * log_scale / nrm;
  const Mat k1 = random_K(model, rng);
  const Mat k2 = random_K(model, rng);
  return k1 * sym_exp(P) * k2;
}

Mat unipotent_log(const Mat& u) {
  const int d = static_cast<int>(u.rows());
  const Mat N = u - Mat::Identity(d, d);
  Mat power = N;
  Mat out = N;
  for (int k = 2; k < d; ++k) {
    power = power * N;
    out += ((k % 2 == 0) ? -1.0 : 1.0) / k * power;
  }
  return out;
}

double group_distance(const Mat& g, const Mat& h) {
  return std::max((g - h).norm(), (g.inverse() - h.inverse()).norm());
}

}  // namespace chabauty
