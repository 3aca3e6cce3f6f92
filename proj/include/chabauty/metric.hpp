#pragma once

#include "chabauty/limit_group.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chabauty {

struct BallSpec {
  double R = 6.0;
  double mesh = 0.15;
  int max_points = 20000;
  /// Throws Validation unless 0 < mesh < R and max_points >= 100.
  void validate() const;
};

/// Parameter grid of the sampler. Two samples built from one plan pair up point by point
/// through their keys.
struct ChartPlan {
  Subset I;           ///< axes of roots in the span of I form the right exponential factor, the rest the left one
  Subset J;           ///< roots of J are charted through the compact factor K^J
  double h = 0.15;    ///< spacing of the unipotent and twisted-rotation coordinates
  double h_K = 0.15;  ///< spacing of the K^J grid
};

struct SampledSubgroup {
  std::vector<Mat> points;
  std::vector<std::uint64_t> keys;  ///< chart parameter key of each point
  Mat flat;      ///< row i: points[i] flattened
  Mat flat_inv;  ///< row i: points[i]^-1 flattened
  std::string source;
  BallSpec ball;
  double coverage_estimate = 0.0;  ///< largest probe-to-net distance inside the inner ball
  std::size_t size() const { return points.size(); }
};

/// Explicit point list; points outside the ball are dropped.
SampledSubgroup from_points(const std::vector<Mat>& points, const BallSpec& ball, const std::string& source);

/// Chart J defaults to the roots of I that are at most 1 on log a. Spacing grows from mesh
/// until the grid holds at most ball.max_points points.
ChartPlan plan_chart(const RootSystem& rs, const LimitGroupDescriptor& desc, const BallSpec& ball,
                     std::optional<Subset> J = std::nullopt);

/// epsilon-net of the descriptor's group intersected with the ball.
SampledSubgroup sample(const RootSystem& rs, const LimitGroupDescriptor& desc, const BallSpec& ball,
                       std::uint64_t seed, std::optional<ChartPlan> plan = std::nullopt);
/// Net of g K g^-1 intersected with the ball.
SampledSubgroup sample_conjugated_K(const RootSystem& rs, const Mat& g, const BallSpec& ball, std::uint64_t seed,
                                    const Tolerances& tol);

/// sup over points of A within R - 2 mesh of e of the distance to B.
double directed_hausdorff(const SampledSubgroup& A, const SampledSubgroup& B);
/// Pointed Hausdorff distance; symmetric.
double hausdorff(const SampledSubgroup& S1, const SampledSubgroup& S2);
/// g S g^-1, with the ball filter reapplied.
SampledSubgroup conjugate(const SampledSubgroup& S, const Mat& g);

/// Sum of the fundamental coweights of the roots outside I, scaled to integer diagonal entries.
Mat escape_direction(const RootSystem& rs, const Subset& I);
/// a_n = exp(n log(ratio) H) for n = 1..horizon, H the escape direction of I.
std::vector<Mat> geometric_sequence(const RootSystem& rs, const Subset& I, double ratio, int horizon);
/// Validation error unless the roots outside I strictly increase along log a_n and the roots of I vanish.
void require_escaping(const RootSystem& rs, const Subset& I, const std::vector<Mat>& a_seq, double tol);

struct ConvergenceRow {
  int n;
  double distance;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> table;
  SampledSubgroup limit;
  std::vector<SampledSubgroup> samples;  ///< per n, kept on request
};

/// Distances from samples of a_n K a_n^-1 to a sample of D^I, all on the plan of the limit.
ConvergenceResult convergence_experiment(const RootSystem& rs, const Subset& I, const std::vector<Mat>& a_seq,
                                         const BallSpec& ball, std::uint64_t seed, const Tolerances& tol,
                                         bool keep_samples = false);

/// Each value is below its predecessor from index `from` on; values under `floor` count as equal.
bool eventually_decreasing(const std::vector<ConvergenceRow>& table, int from, double floor = 1e-12);

struct SequentialCriterionReport {
  bool limit_points_approached = false;  ///< every point of L is near S_n for all n in the tail
  bool accumulation_points_in_limit = false;  ///< every tail point of S_n is near L
  double worst_approach = 0.0;
  double worst_accumulation = 0.0;
  bool holds() const { return limit_points_approached && accumulation_points_in_limit; }
};

/// Sequential characterization of Chabauty convergence at net resolution over the last half of the sequence.
SequentialCriterionReport verify_sequential_criterion(const std::vector<SampledSubgroup>& seq,
                                                      const SampledSubgroup& L, double tol);

struct ToySubgroupR {
  enum class Kind { Trivial, Lattice, Full };
  Kind kind = Kind::Trivial;
  double c = 0.0;  ///< lattice spacing, Lattice only

  static ToySubgroupR trivial() { return {Kind::Trivial, 0.0}; }
  static ToySubgroupR full() { return {Kind::Full, 0.0}; }
  static ToySubgroupR lattice(double c);
};

/// Angle coordinate arctan(1/c): 0 for the trivial group, pi/2 for the full line.
double toy_angle(const ToySubgroupR& s);
ToySubgroupR toy_from_angle(double theta, double tol);

/// Limit of closed subgroups of R through the angle coordinate, extrapolated in powers of 1/n (degree
/// at most 5) over the last half of the sequence. Validation error if the extrapolation is uncertain beyond tol.
/// Angles within tol of 0 or pi/2 read as the trivial group or the full line.
ToySubgroupR toy_limit_R(const std::vector<ToySubgroupR>& seq, double tol = 1e-4);
/// Limit of subgroups n Z of Z, with 0 standing for the trivial group: an eventually constant
/// index, or 1/n extrapolating to 0 within tol.
long toy_limit_Z(const std::vector<long>& seq, double tol = 1e-4);

}  // namespace chabauty
