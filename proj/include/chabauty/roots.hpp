#pragma once

#include "chabauty/lie.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chabauty {

struct CartanData {
  GroupModel model;
  std::vector<Mat> a_basis;  ///< the diagonal matrices H_i
  int rank;
};

struct Root {
  Eigen::VectorXi coeffs;  ///< coordinates over the base, all of one sign
  Vec functional;          ///< values on CartanData::a_basis
  Vec weight;              ///< alpha(H) = weight . diag(H) for H in the Cartan subalgebra
  bool positive;
  std::string name;
};

/// Roots are kept in lexicographic order of their base coordinates; root_vectors is parallel to roots.
struct RootSystem {
  GroupModel model;
  CartanData cartan;
  std::vector<Root> roots;
  std::vector<int> base;  ///< indices into roots, in base order
  std::vector<Mat> root_vectors;
  std::vector<Mat> zero_space_basis;
  Mat coord_solver;  ///< maps vec(X) to coordinates over (a_basis, root_vectors)

  /// alpha(H) for the root at index `root`.
  double eval(int root, const Mat& H) const;
  /// Value of the i-th base root on H.
  double eval_base(int i, const Mat& H) const { return eval(base[i], H); }
  /// Index of the root with these base coordinates, if any.
  std::optional<int> find(const Eigen::VectorXi& coeffs) const;
  /// Ad-matrix basis of the algebra: a_basis, then root vectors.
  std::vector<Mat> algebra_basis() const;
  int rank() const { return cartan.rank; }
  /// Coordinates of X over algebra_basis().
  Vec coordinates(const Mat& X) const;
};

RootSystem build_root_system(const GroupModel& model);

struct RootProjection {
  Mat zero;                     ///< component in the zero root space
  std::vector<Mat> components;  ///< parallel to RootSystem::roots
};

RootProjection root_space_project(const Mat& X, const RootSystem& rs);

/// A subset of the base, as sorted indices into RootSystem::base.
using Subset = std::vector<int>;

struct SubsetData {
  Subset I;
  std::vector<Mat> a_I_basis;   ///< joint kernel of the roots in I, orthonormal
  std::vector<Mat> aI_basis;    ///< Killing-orthogonal complement of a_I in the Cartan subalgebra, orthonormal
  std::vector<int> sigma_sup_I;       ///< roots in the integer span of I
  std::vector<int> sigma_I_plus;      ///< positive roots outside that span
  std::vector<int> sigma_sup_I_plus;  ///< positive roots inside that span
  std::vector<Mat> n_I_basis;
  std::vector<Mat> n_sup_I_basis;
  std::vector<Mat> k_I_basis;   ///< orthonormal basis of k intersected with the derived centralizer of a_I
  std::vector<Mat> M_elements;
};

SubsetData build_subset(const RootSystem& rs, const Subset& I);

/// Full base.
Subset full_subset(const RootSystem& rs);
/// Parses comma separated base-root names ("a12,a23" for SL, "a1,a2" by base position for both).
/// The empty string and "none" denote the empty subset; "all" denotes the full base.
Subset parse_subset(const RootSystem& rs, const std::string& text);
std::string subset_label(const RootSystem& rs, const Subset& I);

/// Throws Validation unless H is diagonal and in the algebra.
void require_cartan(const RootSystem& rs, const Mat& H, double tol);
bool chamber_test(const RootSystem& rs, const Mat& H, bool closed, double tol);
Subset facet_subset_of(const RootSystem& rs, const Mat& H, double tol);

/// Orthonormal projection of a diagonal matrix onto span(basis) (basis orthonormal under Frobenius).
Mat project_onto(const std::vector<Mat>& basis, const Mat& X);

}  // namespace chabauty
