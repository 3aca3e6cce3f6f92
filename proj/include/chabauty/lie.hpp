#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>

namespace chabauty {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class ErrorKind { Validation, ModelMismatch, Domain, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct Tolerances {
  double factorization_tol = 1e-9;
  double membership_tol = 1e-7;
  double spectrum_tol = 1e-6;

  /// Throws Validation unless every field is strictly positive.
  void validate() const;
};

enum class Family { SpecialLinear, SplitOrthogonal };

class GroupModel {
 public:
  static GroupModel special_linear(int n);
  static GroupModel split_orthogonal(int p);
  /// Parses "sl:N" or "sopp:P".
  static GroupModel parse(const std::string& text);

  Family family() const { return family_; }
  /// n for SL(n), p for SO0(p,p).
  int param() const { return param_; }
  int dim() const { return family_ == Family::SpecialLinear ? param_ : 2 * param_; }
  /// Antidiagonal involution; only meaningful for SplitOrthogonal.
  const Mat& J() const { return J_; }
  std::string label() const;

  bool operator==(const GroupModel& o) const { return family_ == o.family_ && param_ == o.param_; }
  bool operator!=(const GroupModel& o) const { return !(*this == o); }

 private:
  GroupModel(Family f, int param);
  Family family_;
  int param_;
  Mat J_;
};

struct AlgebraElement {
  GroupModel model;
  Mat mat;
  /// Throws Validation if mat fails the algebra relations at tol.
  static AlgebraElement checked(const GroupModel& model, const Mat& mat, double tol);
};

struct GroupElement {
  GroupModel model;
  Mat mat;
  static GroupElement checked(const GroupModel& model, const Mat& mat, double tol);
  static GroupElement identity(const GroupModel& model);
  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;
};

AlgebraElement bracket(const AlgebraElement& X, const AlgebraElement& Y);
double killing_form(const AlgebraElement& X, const AlgebraElement& Y);
/// Killing form on raw matrices of the model: 2n tr(XY) for sl(n), 2p tr(XY) for so(p,p).
double killing_form(const GroupModel& model, const Mat& X, const Mat& Y);
AlgebraElement cartan_involution(const AlgebraElement& X);
double b_theta(const AlgebraElement& X, const AlgebraElement& Y);

bool is_group_member(const Mat& g, const GroupModel& model, double tol);
bool is_algebra_member(const Mat& X, const GroupModel& model, double tol);
/// SplitOrthogonal only: determinants of the two diagonal p-blocks of g in the basis where J = diag(I, -I).
/// Both are positive exactly on the identity component.
Eigen::Vector2d split_block_dets(const Mat& g, const GroupModel& model);
/// g in K: orthogonal and a group member.
bool is_in_K(const Mat& g, const GroupModel& model, double tol);

/// Scaling-and-squaring exponential; terminating series when X is exactly nilpotent.
Mat mat_exp(const Mat& X);
/// Principal logarithm; Domain error if the spectrum meets the closed negative real axis.
Mat mat_log(const Mat& g);
/// Logarithm of a symmetric positive definite matrix via its eigen-decomposition.
Mat spd_log(const Mat& S);
/// Exponential of a symmetric matrix via its eigen-decomposition.
Mat sym_exp(const Mat& X);

GroupElement group_exp(const AlgebraElement& X);
AlgebraElement group_log(const GroupElement& g);

/// Orthogonal projection (Frobenius) of an arbitrary square matrix onto the model's algebra.
Mat project_to_algebra(const Mat& X, const GroupModel& model);
/// Random algebra element with i.i.d. Gaussian coordinates in an orthonormal basis, scaled to Frobenius norm `scale`.
Mat random_algebra(const GroupModel& model, Rng& rng, double scale);
/// Random element of K = exp(random antisymmetric algebra element).
Mat random_K(const GroupModel& model, Rng& rng);
/// k1 exp(P) k2 with k1, k2 random in K and P symmetric of Frobenius norm uniform in [0, log_scale].
Mat random_group(const GroupModel& model, Rng& rng, double log_scale);
/// Logarithm of a unipotent matrix by the terminating series.
Mat unipotent_log(const Mat& u);
/// Metric on G: max(|g - h|_F, |g^-1 - h^-1|_F).
double group_distance(const Mat& g, const Mat& h);

}  // namespace chabauty
