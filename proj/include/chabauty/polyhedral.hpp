#pragma once

#include "chabauty/metric.hpp"

#include <string>
#include <vector>

namespace chabauty {

/// Open cone of the Cartan subalgebra cut out by the signs of the roots.
struct Facet {
  std::vector<int> sigma_zero, sigma_plus, sigma_minus;  ///< root indices
  std::vector<Mat> span_basis;  ///< orthonormal basis of the linear span of the cone
  Mat interior_point;
};

/// Sign pattern of the roots on H with a dead band of tol; H = 0 gives sigma_zero = all roots.
Facet facet_of_vector(const Mat& H, const RootSystem& rs, double tol);
/// Some point with the facet's sign pattern, found by linear feasibility over the span; Domain error if none.
Mat facet_interior_point(const Facet& f, const RootSystem& rs, double tol);

/// +infinity or a finite value; only comparison is defined.
struct ExtendedReal {
  bool infinite = false;
  double value = 0.0;
  static ExtendedReal inf() { return {true, 0.0}; }
  static ExtendedReal finite(double v) { return {false, v}; }
  bool operator<(const ExtendedReal& o) const { return !infinite && (o.infinite || value < o.value); }
  bool operator==(const ExtendedReal& o) const { return infinite == o.infinite && (infinite || value == o.value); }
};

/// Coset H + a_I, represented in the Levi part a^I. I = full base is the interior copy of a.
struct PolyhedralPoint {
  Subset I;
  Mat rep;
};

struct CompactifiedPoint {
  Mat g;
  PolyhedralPoint pt;
};

/// Validation error unless rep is in the Levi part of a with alpha(rep) >= -tol on I.
void require_corner_point(const PolyhedralPoint& p, const RootSystem& rs, double tol);
/// Normalizes an arbitrary H in a to its representative for I (drops the a_I component).
PolyhedralPoint make_point(const Subset& I, const Mat& H, const RootSystem& rs);

/// Chart of the positive chamber: alpha_i(rep) on I, +infinity off I.
std::vector<ExtendedReal> corner_coords(const PolyhedralPoint& p, const RootSystem& rs, double tol);
/// Inverse of corner_coords.
PolyhedralPoint from_corner_coords(const std::vector<ExtendedReal>& coords, const RootSystem& rs);

struct PolyhedralLimit {
  bool converged = false;
  PolyhedralPoint point;
  std::string diagnostic;
};

/// Finite coordinates must settle over the last quarter within cauchy_tol; infinite ones must be
/// +infinity or strictly increasing past 10 log(N) over that tail.
PolyhedralLimit polyhedral_limit(const std::vector<PolyhedralPoint>& seq, const RootSystem& rs, double tol,
                                 double cauchy_tol = 1e-4);

/// Descriptor of g exp(rep) D^I exp(-rep) g^-1. `residual` receives the canonicalization defect.
LimitGroupDescriptor phi(const CompactifiedPoint& cp, const RootSystem& rs, const Tolerances& tol,
                         double* residual = nullptr);
bool equivalent(const CompactifiedPoint& cp1, const CompactifiedPoint& cp2, const RootSystem& rs,
                const Tolerances& tol);

/// exp(rep) D^I exp(-rep) as a descriptor.
LimitGroupDescriptor f_descriptor(const PolyhedralPoint& p);

struct ContinuityResult {
  std::vector<ConvergenceRow> table;
  PolyhedralPoint limit;
};

/// Distances from samples of f(seq_n) to a sample of f(limit), all on the plan of the limit.
ContinuityResult continuity_experiment_f(const RootSystem& rs, const std::vector<PolyhedralPoint>& seq,
                                         const BallSpec& ball, std::uint64_t seed, const Tolerances& tol);

}  // namespace chabauty
