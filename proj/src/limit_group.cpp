#include "chabauty/limit_group.hpp"

#include "chabauty/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numeric>

namespace chabauty {

namespace {

double scale_of(const Mat& m) { return std::max(1.0, m.norm()); }

bool same_subset(const Subset& a, const Subset& b) { return a == b; }

bool is_full(const RootSystem& rs, const Subset& I) { return static_cast<int>(I.size()) == rs.rank(); }

// Largest commutator defect of k with the a_I basis.
double centralizer_defect(const Mat& k, const SubsetData& sd) {
  double worst = 0.0;
  for (const Mat& H : sd.a_I_basis) worst = std::max(worst, (k * H - H * k).norm());
  return worst;
}

// Largest n^I coordinate of a nilpotent upper triangular algebra element.
double n_sup_defect(const Mat& Y, const RootSystem& rs, const SubsetData& sd) {
  const Vec c = rs.coordinates(Y);
  double worst = 0.0;
  for (int r : sd.sigma_sup_I_plus) worst = std::max(worst, std::abs(c(rs.rank() + r)));
  return worst;
}

Mat diag_log(const Mat& a) { return Mat(a.diagonal().array().log().matrix().asDiagonal()); }

Mat diag_exp(const Mat& H) { return Mat(H.diagonal().array().exp().matrix().asDiagonal()); }

Mat levi_part(const Mat& p, const std::vector<std::vector<int>>& groups) {
  Mat out = Mat::Zero(p.rows(), p.cols());
  for (const auto& g : groups)
    for (int i : g)
      for (int j : g) out(i, j) = p(i, j);
  return out;
}

// Orthogonal V with V^T S V diagonal, eigenvalues descending; a stable permutation when S is diagonal.
Mat sorted_eigenbasis(const Mat& S) {
  const int m = static_cast<int>(S.rows());
  const Mat off = S - Mat(S.diagonal().asDiagonal());
  Mat V = Mat::Zero(m, m);
  if (off.norm() <= 1e-13 * std::max(1.0, S.norm())) {
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return S(a, a) > S(b, b); });
    for (int s = 0; s < m; ++s) V(order[s], s) = 1.0;
    return V;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
  for (int s = 0; s < m; ++s) V.col(s) = es.eigenvectors().col(m - 1 - s);
  return V;
}

}  // namespace

Mat levi_component(const Mat& H, const SubsetData& sd) { return project_onto(sd.aI_basis, H); }

StructuredSubgroup build_limit_group(const RootSystem& rs, const LimitGroupDescriptor& desc, const Tolerances& tol) {
  const GroupModel& model = rs.model;
  const int d = model.dim();
  if (desc.a.rows() != d || desc.k.rows() != d || desc.a.cols() != d || desc.k.cols() != d)
    throw Error(ErrorKind::Validation, "descriptor matrices have the wrong size");
  if (!is_in_K(desc.k, model, tol.membership_tol * 10)) throw Error(ErrorKind::Validation, "descriptor k is not in K");
  const Mat off = desc.a - Mat(desc.a.diagonal().asDiagonal());
  if (off.norm() > tol.membership_tol || desc.a.diagonal().minCoeff() <= 0)
    throw Error(ErrorKind::Validation, "descriptor a is not in A");
  const Mat H = diag_log(desc.a);
  require_cartan(rs, H, tol.membership_tol * scale_of(H));
  StructuredSubgroup sg{desc, build_subset(rs, desc.I), desc.k * desc.a, Mat(), is_full(rs, desc.I)};
  if (project_onto(sg.sd.a_I_basis, H).norm() > tol.membership_tol * scale_of(H))
    throw Error(ErrorKind::Validation, "log a has a component along the joint kernel of I");
  for (int b : desc.I)
    if (rs.eval_base(b, H) < -tol.membership_tol * scale_of(H))
      throw Error(ErrorKind::Validation, "log a is outside the closed chamber of I");
  sg.conj_inv = desc.a.diagonal().cwiseInverse().asDiagonal() * desc.k.transpose();
  return sg;
}

bool member(const Mat& g, const StructuredSubgroup& sg, const RootSystem& rs, double tol) {
  const GroupModel& model = rs.model;
  if (g.rows() != model.dim() || !g.allFinite()) return false;
  const Mat h = sg.conj_inv * g * sg.conj;
  const double s = scale_of(h);
  if (sg.full) return is_in_K(h, model, tol * s);
  try {
    Tolerances t;
    t.membership_tol = tol * s;
    t.factorization_tol = std::max(1e-9, tol);
    const IwasawaFactors f = iwasawa({model, h}, false, t);
    const int d = model.dim();
    if ((f.a.mat - Mat::Identity(d, d)).norm() > tol * s) return false;
    if (n_sup_defect(unipotent_log(f.n.mat), rs, sg.sd) > tol * s) return false;
    return centralizer_defect(f.k.mat, sg.sd) <= tol * s;
  } catch (const Error&) {
    return false;
  }
}

Mat random_member(const StructuredSubgroup& sg, const RootSystem& rs, Rng& rng, double n_scale) {
  const int d = rs.model.dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat N = Mat::Zero(d, d), X = Mat::Zero(d, d);
  for (const Mat& B : sg.sd.n_I_basis) N += n_scale * gauss(rng) * B;
  for (const Mat& B : sg.sd.k_I_basis) X += gauss(rng) * B;
  const Mat& m = sg.sd.M_elements[std::uniform_int_distribution<size_t>(0, sg.sd.M_elements.size() - 1)(rng)];
  return sg.conj * mat_exp(N) * mat_exp(X) * m * sg.conj_inv;
}

Mat project_to_group(const Mat& g, const StructuredSubgroup& sg, const RootSystem& rs, const Tolerances& tol) {
  const GroupModel& model = rs.model;
  const int d = model.dim();
  const Mat h = sg.conj_inv * g * sg.conj;
  Mat y;
  if (sg.full) {
    // Nearest orthogonal matrix.
    Eigen::JacobiSVD<Mat> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    y = svd.matrixU() * svd.matrixV().transpose();
  } else {
    Tolerances loose = tol;
    loose.membership_tol = std::max(tol.membership_tol, 1e-6) * scale_of(h);
    loose.factorization_tol = std::max(tol.factorization_tol, 1e-8);
    const IwasawaFactors f = iwasawa({model, h}, false, loose);
    const auto groups = weight_groups(rs, sg.sd);
    // Nilradical part of n: strip the Levi block entries.
    const Mat u = levi_part(f.n.mat, groups);
    const Mat v = u.inverse() * f.n.mat;
    Eigen::JacobiSVD<Mat> svd(levi_part(f.k.mat, groups), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat kappa = svd.matrixU() * svd.matrixV().transpose();
    if (!is_group_member(kappa, model, 1e-6)) kappa = Mat::Identity(d, d);
    y = kappa * v;
  }
  return sg.conj * y * sg.conj_inv;
}

double distance_to_group(const Mat& g, const StructuredSubgroup& sg, const RootSystem& rs, const Tolerances& tol) {
  try {
    return group_distance(g, project_to_group(g, sg, rs, tol));
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

Mat ad_matrix(const Mat& g, const RootSystem& rs) {
  const std::vector<Mat> basis = rs.algebra_basis();
  const Mat ginv = g.inverse();
  Mat A(basis.size(), basis.size());
  for (size_t j = 0; j < basis.size(); ++j) A.col(static_cast<Eigen::Index>(j)) = rs.coordinates(g * basis[j] * ginv);
  return A;
}

Mat ad_algebra_matrix(const Mat& X, const RootSystem& rs) {
  const std::vector<Mat> basis = rs.algebra_basis();
  Mat A(basis.size(), basis.size());
  for (size_t j = 0; j < basis.size(); ++j)
    A.col(static_cast<Eigen::Index>(j)) = rs.coordinates(X * basis[j] - basis[j] * X);
  return A;
}

bool is_distal(const Mat& g, const RootSystem& rs, double tol) {
  const Mat A = ad_matrix(g, rs);
  const int m = static_cast<int>(A.rows());
  Eigen::EigenSolver<Mat> es(A, true);
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  // Perturbation radius of a Jordan block of size q at relative precision eps*cond.
  const int q = std::min(m, 2 * rs.model.dim() - 1);
  const double cond = A.norm() * A.inverse().norm();
  const double radius =
      std::max(tol, 4.0 * std::pow(std::numeric_limits<double>::epsilon() * cond * m, 1.0 / q));

  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(lam(i) - lam(j)) <= radius) parent[root(i)] = root(j);
  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < m; ++i) clusters[root(i)].push_back(i);

  for (const auto& [r, members] : clusters) {
    bool defective = false;
    if (members.size() > 1) {
      Eigen::MatrixXcd V(m, static_cast<Eigen::Index>(members.size()));
      for (size_t c = 0; c < members.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = vecs.col(members[c]).normalized();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
      const auto& s = svd.singularValues();
      defective = s(s.size() - 1) < 1e-3 * s(0);
    }
    if (defective) {
      // Mean log-modulus: log|det| of the cluster's invariant block over its size.
      double mean_log = 0.0;
      for (int i : members) mean_log += std::log(std::abs(lam(i)));
      mean_log /= static_cast<double>(members.size());
      if (std::abs(mean_log) > tol) return false;
    } else {
      for (int i : members)
        if (std::abs(std::abs(lam(i)) - 1.0) > tol) return false;
    }
  }
  return true;
}

std::pair<Mat, Mat> split_dI(const Mat& X, const SubsetData& sd) {
  const int d = static_cast<int>(X.rows());
  std::vector<Mat> basis = sd.k_I_basis;
  basis.insert(basis.end(), sd.n_I_basis.begin(), sd.n_I_basis.end());
  if (basis.empty()) return {Mat::Zero(d, d), Mat::Zero(d, d)};
  const Mat B = linalg::stack(basis);
  const Vec c = B.colPivHouseholderQr().solve(linalg::vec(X));
  Mat kp = Mat::Zero(d, d), np = Mat::Zero(d, d);
  for (size_t i = 0; i < basis.size(); ++i)
    (i < sd.k_I_basis.size() ? kp : np) += c(static_cast<Eigen::Index>(i)) * basis[i];
  return {kp, np};
}

void require_in_dI(const Mat& X, const SubsetData& sd, double tol) {
  const auto [kp, np] = split_dI(X, sd);
  if ((kp + np - X).norm() > tol * scale_of(X))
    throw Error(ErrorKind::Validation, "element is not in k^I + n_I");
}

bool nilpotent_in_dI(const Mat& X, const RootSystem& rs, const SubsetData& sd, double tol) {
  require_in_dI(X, sd, std::max(tol, 1e-9));
  const int rank = rs.rank();
  const int m = rank + static_cast<int>(rs.roots.size());
  std::vector<int> height(m, 0);
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    int h = 0;
    for (int k = 0; k < rank; ++k)
      if (!std::binary_search(sd.I.begin(), sd.I.end(), k)) h += rs.roots[r].coeffs(k);
    height[rank + r] = h;
  }
  const Mat A = ad_algebra_matrix(X, rs);
  std::map<int, std::vector<int>> levels;
  for (int i = 0; i < m; ++i) levels[height[i]].push_back(i);
  for (const auto& [h, idx] : levels) {
    const int b = static_cast<int>(idx.size());
    Mat block(b, b);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) block(i, j) = A(idx[i], idx[j]);
    Eigen::EigenSolver<Mat> es(block, false);
    for (int i = 0; i < b; ++i)
      if (std::abs(es.eigenvalues()(i)) >= tol) return false;
  }
  return true;
}

NilpotencyReport verify_nilpotent_characterization(const RootSystem& rs, const SubsetData& sd, int trials, Rng& rng,
                                                   double tol) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const int d = rs.model.dim();
  NilpotencyReport rep;
  for (int t = 0; t < trials; ++t) {
    Mat kp = Mat::Zero(d, d), np = Mat::Zero(d, d);
    if (coin(rng))
      for (const Mat& B : sd.k_I_basis) kp += gauss(rng) * B;
    for (const Mat& B : sd.n_I_basis) np += gauss(rng) * B;
    const Mat X = kp + np;
    const bool nil = nilpotent_in_dI(X, rs, sd, tol);
    const bool vanishing = split_dI(X, sd).first.norm() <= tol * scale_of(X);
    ++rep.trials;
    if (nil) ++rep.nilpotent;
    if (nil != vanishing) {
      ++rep.counterexamples;
      if (rep.notes.size() < 5)
        rep.notes.push_back("trial " + std::to_string(t) + ": nilpotent=" + (nil ? "yes" : "no") +
                            " k-part norm=" + std::to_string(kp.norm()));
    }
  }
  return rep;
}

bool normalizes(const Mat& g, NormalizerTarget which, const RootSystem& rs, const SubsetData& sd, double tol) {
  if (g.rows() != rs.model.dim()) throw Error(ErrorKind::ModelMismatch, "element size does not match the model");
  const Mat ginv = g.inverse();
  auto preserved = [&](const std::vector<Mat>& basis) {
    if (basis.empty()) return true;
    std::vector<Mat> image;
    for (const Mat& X : basis) image.push_back(g * X * ginv);
    const Mat U = linalg::orthonormal_columns(linalg::stack(basis));
    const Mat V = linalg::orthonormal_columns(linalg::stack(image));
    return linalg::subspace_gap(U, V) < tol;
  };
  if (!preserved(sd.n_I_basis)) return false;
  if (which == NormalizerTarget::NilradicalAlgebra) return true;
  std::vector<Mat> dI = sd.k_I_basis;
  dI.insert(dI.end(), sd.n_I_basis.begin(), sd.n_I_basis.end());
  return preserved(dI);
}

bool descriptors_equal(const LimitGroupDescriptor& d1, const LimitGroupDescriptor& d2, const RootSystem& rs,
                       double tol) {
  if (!same_subset(d1.I, d2.I)) return false;
  if ((d1.a - d2.a).norm() > tol * scale_of(d1.a)) return false;
  const SubsetData sd = build_subset(rs, d1.I);
  const Mat k = d2.k.transpose() * d1.k;
  if (centralizer_defect(k, sd) > tol) return false;
  const Mat& a = d1.a;
  const Mat c = a.diagonal().cwiseInverse().asDiagonal() * k * a;
  const int d = rs.model.dim();
  return (c.transpose() * c - Mat::Identity(d, d)).norm() <= tol * scale_of(c) * scale_of(c);
}

std::vector<std::vector<int>> weight_groups(const RootSystem& rs, const SubsetData& sd) {
  const int d = rs.model.dim();
  std::vector<std::vector<int>> groups;
  std::vector<Vec> weights;
  for (int c = 0; c < d; ++c) {
    Vec w(static_cast<Eigen::Index>(sd.a_I_basis.size()));
    for (size_t t = 0; t < sd.a_I_basis.size(); ++t) w(static_cast<Eigen::Index>(t)) = sd.a_I_basis[t](c, c);
    bool placed = false;
    for (size_t g = 0; g < groups.size() && !placed; ++g)
      if ((weights[g] - w).norm() <= 1e-9) {
        groups[g].push_back(c);
        placed = true;
      }
    if (!placed) {
      groups.push_back({c});
      weights.push_back(w);
    }
  }
  return groups;
}

ChamberProjection levi_chamber_projection(const Mat& X, const RootSystem& rs, const SubsetData& sd,
                                          const Tolerances& tol) {
  const GroupModel& model = rs.model;
  const int d = model.dim();
  const auto groups = weight_groups(rs, sd);
  Mat U = Mat::Zero(d, d);
  auto sub = [&](const std::vector<int>& idx) {
    const int m = static_cast<int>(idx.size());
    Mat S(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) S(i, j) = X(idx[i], idx[j]);
    return S;
  };
  auto place = [&](const std::vector<int>& idx, const Mat& V) {
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = 0; j < idx.size(); ++j)
        U(idx[i], idx[j]) = V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  if (model.family() == Family::SpecialLinear) {
    for (const auto& g : groups) place(g, sorted_eigenbasis(sub(g)));
    if (U.determinant() < 0) U.col(groups.front().front()) *= -1.0;
  } else {
    auto bar = [d](int i) { return d - 1 - i; };
    for (const auto& g : groups) {
      std::vector<int> mirror;
      for (int c : g) mirror.push_back(bar(c));
      std::sort(mirror.begin(), mirror.end());
      if (mirror == g) {
        const int q = static_cast<int>(g.size()) / 2;
        if (q >= 2) {
          const GroupModel small = GroupModel::split_orthogonal(q);
          const ChamberProjection cp = project_to_chamber({small, sub(g)}, tol);
          place(g, cp.k.mat.transpose());
        } else {
          place(g, Mat::Identity(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size())));
        }
        continue;
      }
      if (mirror.front() < g.front()) continue;  // filled from its partner
      Mat V = sorted_eigenbasis(sub(g));
      if (V.determinant() < 0) V.col(0) *= -1.0;
      place(g, V);
      for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
          U(bar(g[i]), bar(g[j])) = V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  const Mat k = U.transpose();
  if (!is_in_K(k, model, 1e-8)) throw Error(ErrorKind::Numerical, "Levi conjugator is not in K");
  const Mat D = k * X * U;
  const Mat H = D.diagonal().asDiagonal();
  if ((D - H).norm() > std::max(tol.factorization_tol, 1e-9) * scale_of(X))
    throw Error(ErrorKind::Numerical, "Levi chamber projection failed to diagonalize");
  return {{model, H}, {model, k}};
}

LimitGroupDescriptor canonical_descriptor(const Mat& x, const Subset& I, const RootSystem& rs, const Tolerances& tol,
                                          double* residual) {
  const GroupModel& model = rs.model;
  const int d = model.dim();
  const SubsetData sd = build_subset(rs, I);
  Tolerances loose = tol;
  loose.factorization_tol = std::max(tol.factorization_tol, 1e-8);
  const IwasawaFactors f = iwasawa({model, x}, false, loose);
  const auto groups = weight_groups(rs, sd);
  const Mat levi = levi_part(f.a.mat * f.n.mat, groups);
  const Mat X = 0.5 * spd_log(levi * levi.transpose());
  const ChamberProjection cp = levi_chamber_projection(X, rs, sd, loose);
  LimitGroupDescriptor out{I, diag_exp(levi_component(cp.H.mat, sd)), f.k.mat * cp.k.mat.transpose()};
  if (residual) {
    const Mat y = out.a.diagonal().cwiseInverse().asDiagonal() * out.k.transpose() * x;
    if (is_full(rs, I)) {
      *residual = (y.transpose() * y - Mat::Identity(d, d)).norm();
    } else {
      const IwasawaFactors fy = iwasawa({model, y}, false, loose);
      *residual = std::max({centralizer_defect(fy.k.mat, sd),
                            levi_component(diag_log(fy.a.mat), sd).norm(),
                            n_sup_defect(unipotent_log(fy.n.mat), rs, sd)});
    }
  }
  return out;
}

Classification classify_sequence(const std::vector<Mat>& seq, const RootSystem& rs, const Tolerances& tol,
                                 std::optional<double> bound_threshold) {
  const int N = static_cast<int>(seq.size());
  if (N < 4) throw Error(ErrorKind::Validation, "classification needs a horizon of at least 4");
  const double threshold = bound_threshold.value_or(10.0 * std::log(static_cast<double>(N)));
  const int rank = rs.rank();
  std::vector<Mat> logs, k1s;
  for (const Mat& g : seq) {
    const CartanFactors cf = cartan_kak({rs.model, g}, tol);
    logs.push_back(diag_log(cf.a.mat));
    k1s.push_back(cf.k1.mat);
  }
  const int tail = std::max(2, N / 4);
  const double cauchy_tol = 1e-4;
  Subset I;
  double worst_osc = 0.0;
  for (int b = 0; b < rank; ++b) {
    double mx = -std::numeric_limits<double>::infinity();
    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    for (int n = 0; n < N; ++n) {
      const double v = rs.eval_base(b, logs[n]);
      mx = std::max(mx, v);
      if (n >= N - tail) {
        tmin = std::min(tmin, v);
        tmax = std::max(tmax, v);
      }
    }
    if (mx < threshold && tmax - tmin < cauchy_tol) {
      I.push_back(b);
      worst_osc = std::max(worst_osc, tmax - tmin);
    }
  }
  Classification out;
  out.residual = worst_osc;
  if (static_cast<int>(I.size()) == rank) {
    out.interior = true;
    out.desc = {I, Mat::Identity(rs.model.dim(), rs.model.dim()), Mat::Identity(rs.model.dim(), rs.model.dim())};
    return out;
  }
  const SubsetData sd = build_subset(rs, I);
  Mat mean = Mat::Zero(rs.model.dim(), rs.model.dim());
  for (int n = N - tail; n < N; ++n) mean += levi_component(logs[n], sd);
  mean /= tail;
  out.desc = {I, diag_exp(mean), k1s.back()};
  const LimitGroupDescriptor prev{I, diag_exp(levi_component(logs[N - 2], sd)), k1s[N - 2]};
  out.converged = descriptors_equal(out.desc, prev, rs, cauchy_tol);
  if (!out.converged) out.diagnostic = "tail of the K-factor or Levi part has not settled";
  return out;
}

}  // namespace chabauty
