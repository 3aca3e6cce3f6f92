#include "chabauty/polyhedral.hpp"

#include "chabauty/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace chabauty {

namespace {

double scale_of(const Mat& m) { return std::max(1.0, m.norm()); }

// Coordinates of the Cartan subalgebra: diagonal entries.
Mat diag_of(const Vec& v) { return Mat(v.asDiagonal()); }

}  // namespace

Facet facet_of_vector(const Mat& H, const RootSystem& rs, double tol) {
  require_cartan(rs, H, 1e-7 * scale_of(H));
  Facet f;
  const double band = tol * scale_of(H);
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    const double v = rs.eval(static_cast<int>(r), H);
    if (std::abs(v) <= band) f.sigma_zero.push_back(static_cast<int>(r));
    else (v > 0 ? f.sigma_plus : f.sigma_minus).push_back(static_cast<int>(r));
  }
  // Span: joint kernel of sigma_zero inside the Cartan subalgebra.
  const int rank = rs.rank();
  Mat A(std::max<size_t>(1, f.sigma_zero.size()), rank);
  A.setZero();
  for (size_t i = 0; i < f.sigma_zero.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = rs.roots[f.sigma_zero[i]].functional.transpose();
  const Mat K = linalg::null_space(A, rank);
  std::vector<Mat> span;
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    Mat X = Mat::Zero(rs.model.dim(), rs.model.dim());
    for (int i = 0; i < rank; ++i) X += K(i, j) * rs.cartan.a_basis[i];
    span.push_back(X);
  }
  if (!span.empty()) {
    Mat D(rs.model.dim(), static_cast<Eigen::Index>(span.size()));
    for (size_t j = 0; j < span.size(); ++j) D.col(static_cast<Eigen::Index>(j)) = span[j].diagonal();
    const Mat Q = linalg::orthonormal_columns(D);
    for (Eigen::Index j = 0; j < Q.cols(); ++j) f.span_basis.push_back(diag_of(Q.col(j)));
  }
  f.interior_point = H;
  return f;
}

Mat facet_interior_point(const Facet& f, const RootSystem& rs, double tol) {
  const int d = rs.model.dim();
  const int m = static_cast<int>(f.span_basis.size());
  if (m == 0) {
    if (!f.sigma_plus.empty() || !f.sigma_minus.empty()) throw Error(ErrorKind::Domain, "facet has an empty span");
    return Mat::Zero(d, d);
  }
  // Rows: sign-adjusted root values on the span basis; seek y with A y > 0 by the perceptron rule.
  std::vector<Vec> rows;
  for (int r : f.sigma_plus) {
    Vec row(m);
    for (int j = 0; j < m; ++j) row(j) = rs.eval(r, f.span_basis[j]);
    rows.push_back(row.normalized());
  }
  for (int r : f.sigma_minus) {
    Vec row(m);
    for (int j = 0; j < m; ++j) row(j) = -rs.eval(r, f.span_basis[j]);
    rows.push_back(row.normalized());
  }
  Vec y = Vec::Zero(m);
  for (const Vec& row : rows) y += row;
  for (int it = 0; it < 100000; ++it) {
    bool ok = true;
    for (const Vec& row : rows)
      if (row.dot(y) <= tol * std::max(1.0, y.norm())) {
        y += row;
        ok = false;
        break;
      }
    if (ok) {
      Mat X = Mat::Zero(d, d);
      for (int j = 0; j < m; ++j) X += y(j) * f.span_basis[j];
      return X;
    }
  }
  throw Error(ErrorKind::Domain, "facet sign conditions are infeasible");
}

void require_corner_point(const PolyhedralPoint& p, const RootSystem& rs, double tol) {
  require_cartan(rs, p.rep, 1e-7 * scale_of(p.rep));
  const SubsetData sd = build_subset(rs, p.I);
  if (project_onto(sd.a_I_basis, p.rep).norm() > tol * scale_of(p.rep))
    throw Error(ErrorKind::Validation, "representative has a component along the joint kernel of I");
  for (int b : p.I)
    if (rs.eval_base(b, p.rep) < -tol * scale_of(p.rep))
      throw Error(ErrorKind::Validation, "representative is outside the chamber corner");
}

PolyhedralPoint make_point(const Subset& I, const Mat& H, const RootSystem& rs) {
  const SubsetData sd = build_subset(rs, I);
  return {I, levi_component(H, sd)};
}

std::vector<ExtendedReal> corner_coords(const PolyhedralPoint& p, const RootSystem& rs, double tol) {
  require_corner_point(p, rs, tol);
  std::vector<ExtendedReal> out;
  for (int b = 0; b < rs.rank(); ++b)
    out.push_back(std::binary_search(p.I.begin(), p.I.end(), b) ? ExtendedReal::finite(rs.eval_base(b, p.rep))
                                                                 : ExtendedReal::inf());
  return out;
}

PolyhedralPoint from_corner_coords(const std::vector<ExtendedReal>& coords, const RootSystem& rs) {
  if (static_cast<int>(coords.size()) != rs.rank()) throw Error(ErrorKind::Validation, "wrong number of coordinates");
  PolyhedralPoint p;
  for (int b = 0; b < rs.rank(); ++b)
    if (!coords[b].infinite) p.I.push_back(b);
  const int d = rs.model.dim();
  p.rep = Mat::Zero(d, d);
  if (p.I.empty()) return p;
  const SubsetData sd = build_subset(rs, p.I);
  const int m = static_cast<int>(p.I.size());
  Mat A(m, static_cast<Eigen::Index>(sd.aI_basis.size()));
  Vec rhs(m);
  for (int i = 0; i < m; ++i) {
    rhs(i) = coords[p.I[i]].value;
    for (size_t j = 0; j < sd.aI_basis.size(); ++j) A(i, static_cast<Eigen::Index>(j)) = rs.eval_base(p.I[i], sd.aI_basis[j]);
  }
  const Vec x = A.fullPivLu().solve(rhs);
  for (size_t j = 0; j < sd.aI_basis.size(); ++j) p.rep += x(static_cast<Eigen::Index>(j)) * sd.aI_basis[j];
  return p;
}

PolyhedralLimit polyhedral_limit(const std::vector<PolyhedralPoint>& seq, const RootSystem& rs, double tol,
                                 double cauchy_tol) {
  PolyhedralLimit out;
  const int N = static_cast<int>(seq.size());
  if (N < 4) throw Error(ErrorKind::Validation, "polyhedral limit needs at least four terms");
  std::vector<std::vector<ExtendedReal>> coords;
  for (const auto& p : seq) coords.push_back(corner_coords(p, rs, tol));
  const int start = N - std::max(2, N / 4);
  const double escape = 10.0 * std::log(static_cast<double>(N));
  std::vector<ExtendedReal> lim;
  for (int b = 0; b < rs.rank(); ++b) {
    bool all_inf = true, all_finite = true, increasing = true;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int n = start; n < N; ++n) {
      const ExtendedReal& v = coords[n][b];
      all_inf = all_inf && v.infinite;
      all_finite = all_finite && !v.infinite;
      if (!v.infinite) {
        lo = std::min(lo, v.value);
        hi = std::max(hi, v.value);
      }
      if (n > start && !(coords[n - 1][b] < v)) increasing = false;
    }
    const ExtendedReal& last = coords[N - 1][b];
    if (all_inf) {
      lim.push_back(ExtendedReal::inf());
    } else if (all_finite && hi - lo < cauchy_tol) {
      lim.push_back(last);
    } else if (increasing && (last.infinite || last.value >= escape)) {
      lim.push_back(ExtendedReal::inf());
    } else {
      out.diagnostic = "coordinate " + std::to_string(b) + " neither settles nor escapes";
      return out;
    }
  }
  out.converged = true;
  out.point = from_corner_coords(lim, rs);
  return out;
}

LimitGroupDescriptor phi(const CompactifiedPoint& cp, const RootSystem& rs, const Tolerances& tol, double* residual) {
  if (!is_group_member(cp.g, rs.model, tol.membership_tol * scale_of(cp.g)))
    throw Error(ErrorKind::Validation, "g is not in " + rs.model.label());
  require_corner_point(cp.pt, rs, tol.membership_tol);
  const Mat x = cp.g * mat_exp(cp.pt.rep);
  return canonical_descriptor(x, cp.pt.I, rs, tol, residual);
}

bool equivalent(const CompactifiedPoint& cp1, const CompactifiedPoint& cp2, const RootSystem& rs,
                const Tolerances& tol) {
  if (cp1.pt.I != cp2.pt.I) return false;
  return descriptors_equal(phi(cp1, rs, tol), phi(cp2, rs, tol), rs, std::max(tol.membership_tol, 1e-6));
}

LimitGroupDescriptor f_descriptor(const PolyhedralPoint& p) {
  const int d = static_cast<int>(p.rep.rows());
  return {p.I, Mat(p.rep.diagonal().array().exp().matrix().asDiagonal()), Mat::Identity(d, d)};
}

ContinuityResult continuity_experiment_f(const RootSystem& rs, const std::vector<PolyhedralPoint>& seq,
                                         const BallSpec& ball, std::uint64_t seed, const Tolerances& tol) {
  const PolyhedralLimit lim = polyhedral_limit(seq, rs, tol.membership_tol);
  if (!lim.converged) throw Error(ErrorKind::Validation, "polyhedral sequence diverges: " + lim.diagnostic);
  ContinuityResult out;
  out.limit = lim.point;
  const LimitGroupDescriptor ld = f_descriptor(lim.point);
  const ChartPlan plan = plan_chart(rs, ld, ball);
  const SampledSubgroup L = sample(rs, ld, ball, seed, plan);
  for (size_t n = 0; n < seq.size(); ++n) {
    const SampledSubgroup Sn = sample(rs, f_descriptor(seq[n]), ball, seed, plan);
    out.table.push_back({static_cast<int>(n + 1), hausdorff(Sn, L)});
  }
  return out;
}

}  // namespace chabauty
