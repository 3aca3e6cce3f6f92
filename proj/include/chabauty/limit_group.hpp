#pragma once

#include "chabauty/decompose.hpp"
#include "chabauty/roots.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chabauty {

/// Boundary point k a D^I a^-1 k^-1. For I = full base this is k a K a^-1 k^-1.
struct LimitGroupDescriptor {
  Subset I;
  Mat a;  ///< diagonal, log a in the Levi part of the Cartan subalgebra with alpha(log a) >= 0 on I
  Mat k;  ///< in K
};

struct StructuredSubgroup {
  LimitGroupDescriptor desc;
  SubsetData sd;
  Mat conj;      ///< k a
  Mat conj_inv;  ///< (k a)^-1
  bool full;     ///< I is the whole base
};

StructuredSubgroup build_limit_group(const RootSystem& rs, const LimitGroupDescriptor& desc, const Tolerances& tol);

bool member(const Mat& g, const StructuredSubgroup& sg, const RootSystem& rs, double tol);
/// k a (n kappa m) a^-1 k^-1 with Gaussian nilradical coordinates of size n_scale and kappa = exp of a random k^I element.
Mat random_member(const StructuredSubgroup& sg, const RootSystem& rs, Rng& rng, double n_scale);

/// Upper bound on the metric distance from g to the group, via an explicit nearby group element.
double distance_to_group(const Mat& g, const StructuredSubgroup& sg, const RootSystem& rs, const Tolerances& tol);
/// The group element used by distance_to_group.
Mat project_to_group(const Mat& g, const StructuredSubgroup& sg, const RootSystem& rs, const Tolerances& tol);

/// Matrix of Ad(g) on RootSystem::algebra_basis().
Mat ad_matrix(const Mat& g, const RootSystem& rs);
/// Matrix of ad(X) on RootSystem::algebra_basis().
Mat ad_algebra_matrix(const Mat& X, const RootSystem& rs);

/// Every eigenvalue of Ad(g) has modulus within tol of 1. Eigenvalues are grouped into clusters
/// at the resolution floor of a defective spectrum; a cluster with nearly parallel eigenvectors
/// is judged by its mean log-modulus.
bool is_distal(const Mat& g, const RootSystem& rs, double tol);

/// Validation error unless X lies in k^I + n_I within tol.
void require_in_dI(const Mat& X, const SubsetData& sd, double tol);
/// ad X nilpotent, for X in k^I + n_I. The spectrum is read off the diagonal blocks of ad X
/// in the basis graded by height outside I, where ad X is block triangular.
bool nilpotent_in_dI(const Mat& X, const RootSystem& rs, const SubsetData& sd, double tol);
/// Splits X in k^I + n_I into its two components.
std::pair<Mat, Mat> split_dI(const Mat& X, const SubsetData& sd);

struct NilpotencyReport {
  int trials = 0;
  int nilpotent = 0;
  int counterexamples = 0;
  std::vector<std::string> notes;
};
/// Random X in k^I + n_I (half of them with zero k^I-part); counts mismatches between
/// ad-nilpotency and vanishing of the k^I-component.
NilpotencyReport verify_nilpotent_characterization(const RootSystem& rs, const SubsetData& sd, int trials, Rng& rng,
                                                   double tol);

enum class NormalizerTarget { NilradicalAlgebra, LimitGroup };
bool normalizes(const Mat& g, NormalizerTarget which, const RootSystem& rs, const SubsetData& sd, double tol);

bool descriptors_equal(const LimitGroupDescriptor& d1, const LimitGroupDescriptor& d2, const RootSystem& rs,
                       double tol);

struct Classification {
  bool interior = false;
  LimitGroupDescriptor desc;
  double residual = 0.0;  ///< largest tail oscillation of a bounded coordinate
  bool converged = true;
  std::string diagnostic;
};

/// Classifies the limit of g_n K g_n^-1 from a finite sequence g_1..g_N.
/// Default bound threshold: 10 log(N).
Classification classify_sequence(const std::vector<Mat>& seq, const RootSystem& rs, const Tolerances& tol,
                                 std::optional<double> bound_threshold = std::nullopt);

/// Coordinate index groups on which the joint kernel of I acts by a common weight.
std::vector<std::vector<int>> weight_groups(const RootSystem& rs, const SubsetData& sd);

/// For X symmetric commuting with a_I: k centralizing a_I with k X k^T = H diagonal,
/// alpha(H) >= 0 for alpha in I.
ChamberProjection levi_chamber_projection(const Mat& X, const RootSystem& rs, const SubsetData& sd,
                                          const Tolerances& tol);

/// Canonical descriptor of x D^I x^-1. `residual` receives the defect of x relative to the
/// normalizer of the returned representative.
LimitGroupDescriptor canonical_descriptor(const Mat& x, const Subset& I, const RootSystem& rs, const Tolerances& tol,
                                          double* residual = nullptr);

/// Component of H (diagonal) in the Levi part a^I.
Mat levi_component(const Mat& H, const SubsetData& sd);

}  // namespace chabauty
