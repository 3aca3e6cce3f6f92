#include "chabauty/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

namespace chabauty {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mix(std::uint64_t h, std::int64_t v) {
  // splitmix64 step over the running hash.
  std::uint64_t z = h ^ (static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double distance_to_identity(const Mat& g, const Mat& ginv) {
  const int d = static_cast<int>(g.rows());
  const Mat I = Mat::Identity(d, d);
  return std::max((g - I).norm(), (ginv - I).norm());
}

Eigen::RowVectorXd flatten(const Mat& m) { return Eigen::Map<const Eigen::RowVectorXd>(m.data(), m.size()); }

struct Axis {
  int root;
  Mat gen;
  double tmax;  ///< infinite for unipotent axes
};

struct Chart {
  std::vector<Axis> axes;             // ascending root index
  std::vector<Mat> kappa_gens;        // X - X^T over the positive roots of J
  std::vector<Mat> M;
  Mat a, ainv, k;
};

bool is_subset(const Subset& J, const Subset& I) {
  return std::includes(I.begin(), I.end(), J.begin(), J.end());
}

Chart build_chart(const RootSystem& rs, const LimitGroupDescriptor& desc, const Subset& J) {
  if (!is_subset(J, desc.I)) throw Error(ErrorKind::Validation, "chart subset must lie inside the descriptor subset");
  const Mat H = Mat(desc.a.diagonal().array().log().matrix().asDiagonal());
  const SubsetData sdI = build_subset(rs, desc.I);
  const SubsetData sdJ = build_subset(rs, J);
  Chart c;
  c.a = desc.a;
  c.ainv = desc.a.diagonal().cwiseInverse().asDiagonal();
  c.k = desc.k;
  c.M = sdI.M_elements;
  for (int r : sdI.sigma_I_plus) c.axes.push_back({r, rs.root_vectors[r], std::numeric_limits<double>::infinity()});
  for (int r : sdI.sigma_sup_I_plus) {
    if (std::find(sdJ.sigma_sup_I_plus.begin(), sdJ.sigma_sup_I_plus.end(), r) != sdJ.sigma_sup_I_plus.end()) continue;
    const double b = rs.eval(r, H);
    const Mat& X = rs.root_vectors[r];
    c.axes.push_back({r, Mat(X - std::exp(-2.0 * b) * X.transpose()), kPi * std::exp(b)});
  }
  std::sort(c.axes.begin(), c.axes.end(), [](const Axis& x, const Axis& y) { return x.root < y.root; });
  for (int r : sdJ.sigma_sup_I_plus) c.kappa_gens.push_back(rs.root_vectors[r] - rs.root_vectors[r].transpose());
  return c;
}

// Largest t on the grid of step h/4 with exp(+-t gen) in the ball; capped at tmax.
double axis_cap(const Axis& ax, double R, double h) {
  const double step = h / 4.0;
  double best = 0.0;
  for (double t = step; t <= ax.tmax + 1e-12; t += step) {
    bool inside = true;
    for (double sgn : {1.0, -1.0}) {
      const Mat g = mat_exp(sgn * t * ax.gen);
      if (distance_to_identity(g, mat_exp(-sgn * t * ax.gen)) > R) inside = false;
    }
    if (!inside) break;
    best = t;
    if (t > 1e4) break;
  }
  return best;
}

double kappa_grid_count(int dim, double h_K) {
  if (dim == 0) return 1.0;
  const double per = 2.0 * std::floor(kPi / h_K) + 1.0;
  return std::pow(per, dim) + 8.0 * dim;
}

// Grid over [-pi, pi]^dim at spacing h_K, then seeded uniform draws.
std::vector<Mat> kappa_list(const Chart& c, double h_K, std::uint64_t seed, int d) {
  const int dim = static_cast<int>(c.kappa_gens.size());
  std::vector<Mat> out;
  if (dim == 0) {
    out.push_back(Mat::Identity(d, d));
    return out;
  }
  const int m = static_cast<int>(std::floor(kPi / h_K));
  std::vector<int> idx(dim, -m);
  while (true) {
    Mat X = Mat::Zero(d, d);
    for (int i = 0; i < dim; ++i) X += idx[i] * h_K * c.kappa_gens[i];
    out.push_back(mat_exp(X));
    int pos = 0;
    while (pos < dim && ++idx[pos] > m) idx[pos++] = -m;
    if (pos == dim) break;
  }
  Rng rng(mix(seed, dim));
  std::uniform_real_distribution<double> U(-kPi, kPi);
  for (int t = 0; t < 8 * dim; ++t) {
    Mat X = Mat::Zero(d, d);
    for (int i = 0; i < dim; ++i) X += U(rng) * c.kappa_gens[i];
    out.push_back(mat_exp(X));
  }
  return out;
}

Subset default_chart(const RootSystem& rs, const LimitGroupDescriptor& desc) {
  const Mat H = Mat(desc.a.diagonal().array().log().matrix().asDiagonal());
  Subset J;
  for (int b : desc.I)
    if (rs.eval_base(b, H) <= 1.0) J.push_back(b);
  return J;
}

void validate_descriptor_shape(const RootSystem& rs, const LimitGroupDescriptor& desc) {
  const int d = rs.model.dim();
  if (desc.a.rows() != d || desc.k.rows() != d) throw Error(ErrorKind::ModelMismatch, "descriptor size mismatch");
  if (desc.a.diagonal().minCoeff() <= 0) throw Error(ErrorKind::Validation, "descriptor a must be positive diagonal");
  if (!is_in_K(desc.k, rs.model, 1e-6)) throw Error(ErrorKind::Validation, "descriptor k is not in K");
}

void push_point(SampledSubgroup& S, const Mat& g, const Mat& ginv, std::uint64_t key) {
  S.points.push_back(g);
  S.keys.push_back(key);
  const Eigen::Index n = static_cast<Eigen::Index>(S.points.size());
  if (S.flat.rows() < n) {
    const Eigen::Index cap = std::max<Eigen::Index>(64, 2 * n);
    S.flat.conservativeResize(cap, g.size());
    S.flat_inv.conservativeResize(cap, g.size());
  }
  S.flat.row(n - 1) = flatten(g);
  S.flat_inv.row(n - 1) = flatten(ginv);
}

void shrink(SampledSubgroup& S) {
  const Eigen::Index n = static_cast<Eigen::Index>(S.points.size());
  const Eigen::Index cols = S.points.empty() ? 0 : S.points.front().size();
  S.flat.conservativeResize(n, cols);
  S.flat_inv.conservativeResize(n, cols);
}

// Nearest distance from row i of A to B, stopping once below `good_enough`.
double nearest(const SampledSubgroup& A, Eigen::Index i, const SampledSubgroup& B, double start, double good_enough) {
  double best = start;
  const auto p = A.flat.row(i);
  const auto pinv = A.flat_inv.row(i);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(B.size()); ++j) {
    const double dg = (B.flat.row(j) - p).squaredNorm();
    if (dg >= best * best) continue;
    const double di = (B.flat_inv.row(j) - pinv).squaredNorm();
    const double dist = std::sqrt(std::max(dg, di));
    if (dist < best) {
      best = dist;
      if (best <= good_enough) break;
    }
  }
  return best;
}

struct TailLimit {
  double value;
  double uncertainty;  ///< gap to the next lower degree limit plus the worst fit residual
};

// Limit of x_n by least squares in powers of 1/n over the last half, at the degree whose
// uncertainty is smallest; exact on constant tails.
TailLimit extrapolate_tail(const std::vector<double>& x) {
  const int N = static_cast<int>(x.size());
  const int M = std::min(N, std::max(6, N / 2));
  const int s = N - M;
  if (std::all_of(x.begin() + s, x.end(), [&](double v) { return v == x.back(); })) return {x.back(), 0.0};
  Vec u(M), y(M);
  for (int i = 0; i < M; ++i) {
    u(i) = static_cast<double>(s + 1) / static_cast<double>(s + i + 1);
    y(i) = x[static_cast<size_t>(s + i)];
  }
  TailLimit best{x.back(), std::numeric_limits<double>::infinity()};
  double prev = 0.0;
  for (int deg = 0; deg <= std::min(5, M - 2); ++deg) {
    Mat A(M, deg + 1);
    A.col(0).setOnes();
    for (int j = 1; j <= deg; ++j) A.col(j) = A.col(j - 1).cwiseProduct(u);
    const Vec c = A.colPivHouseholderQr().solve(y);
    if (deg > 0) {
      const double unc = std::abs(c(0) - prev) + (A * c - y).cwiseAbs().maxCoeff();
      if (unc < best.uncertainty) best = {c(0), unc};
    }
    prev = c(0);
  }
  return best;
}

}  // namespace

void BallSpec::validate() const {
  if (!(R > 0) || !(mesh > 0) || !(mesh < R)) throw Error(ErrorKind::Validation, "ball needs 0 < mesh < R");
  if (max_points < 100) throw Error(ErrorKind::Validation, "ball needs max_points >= 100");
}

SampledSubgroup from_points(const std::vector<Mat>& points, const BallSpec& ball, const std::string& source) {
  ball.validate();
  SampledSubgroup S;
  S.ball = ball;
  S.source = source;
  for (size_t i = 0; i < points.size(); ++i) {
    const Mat inv = points[i].inverse();
    if (distance_to_identity(points[i], inv) <= ball.R) push_point(S, points[i], inv, mix(0, static_cast<std::int64_t>(i)));
  }
  shrink(S);
  return S;
}

ChartPlan plan_chart(const RootSystem& rs, const LimitGroupDescriptor& desc, const BallSpec& ball,
                     std::optional<Subset> J) {
  ball.validate();
  validate_descriptor_shape(rs, desc);
  ChartPlan plan;
  plan.I = desc.I;
  plan.J = J ? *J : default_chart(rs, desc);
  const Chart c = build_chart(rs, desc, plan.J);
  std::vector<double> caps;
  for (const Axis& ax : c.axes) caps.push_back(axis_cap(ax, ball.R, ball.mesh));
  const int kdim = static_cast<int>(c.kappa_gens.size());
  for (double f = 1.0;; f *= 1.05) {
    plan.h = plan.h_K = ball.mesh * f;
    double count = kappa_grid_count(kdim, plan.h_K) * static_cast<double>(c.M.size());
    for (double cap : caps) count *= 2.0 * std::floor(cap / plan.h + 1e-9) + 1.0;
    if (count <= ball.max_points) break;
  }
  return plan;
}

SampledSubgroup sample(const RootSystem& rs, const LimitGroupDescriptor& desc, const BallSpec& ball,
                       std::uint64_t seed, std::optional<ChartPlan> plan_in) {
  ball.validate();
  validate_descriptor_shape(rs, desc);
  const ChartPlan plan = plan_in ? *plan_in : plan_chart(rs, desc, ball);
  const Chart c = build_chart(rs, desc, plan.J);
  const int d = rs.model.dim();
  const int naxes = static_cast<int>(c.axes.size());

  std::vector<int> bound(naxes), limit(naxes);
  for (int i = 0; i < naxes; ++i) {
    const double cap = axis_cap(c.axes[i], ball.R, plan.h);
    bound[i] = static_cast<int>(std::floor(cap / plan.h + 1e-9));
    limit[i] = std::isinf(c.axes[i].tmax) ? bound[i] + 1000 : static_cast<int>(std::floor(c.axes[i].tmax / plan.h + 1e-9));
  }
  std::vector<bool> right(naxes, false);
  const SubsetData sdP = build_subset(rs, plan.I);
  for (int i = 0; i < naxes; ++i)
    right[i] = std::find(sdP.sigma_sup_I_plus.begin(), sdP.sigma_sup_I_plus.end(), c.axes[i].root) !=
               sdP.sigma_sup_I_plus.end();
  const std::vector<Mat> kappas = kappa_list(c, plan.h_K, seed, d);
  // Compact factors kappa m deduplicated at mesh/2 before twisting by a, so that samples
  // sharing a plan keep the same parameter set.
  const double cell = ball.mesh / (2.0 * std::sqrt(static_cast<double>(d * d)));
  std::vector<Mat> tails;  // a kappa a^-1 m
  std::vector<std::int64_t> tail_ids;
  std::set<std::vector<long long>> seen;
  for (size_t ki = 0; ki < kappas.size(); ++ki)
    for (size_t mi = 0; mi < c.M.size(); ++mi) {
      const Mat km = kappas[ki] * c.M[mi];
      std::vector<long long> q(km.size());
      for (Eigen::Index e = 0; e < km.size(); ++e) q[e] = std::llround(km.data()[e] / cell);
      if (!seen.insert(std::move(q)).second) continue;
      tails.push_back(c.a * kappas[ki] * c.ainv * c.M[mi]);
      tail_ids.push_back(static_cast<std::int64_t>(ki * c.M.size() + mi));
    }

  SampledSubgroup S;
  for (int round = 0; round < 4; ++round) {
    S = SampledSubgroup{};
    S.ball = ball;
    std::vector<bool> face_hit(naxes, false);
    std::vector<int> idx(naxes);
    for (int i = 0; i < naxes; ++i) idx[i] = -bound[i];
    while (true) {
      Mat N = Mat::Zero(d, d), Uexp = Mat::Zero(d, d);
      std::uint64_t key = 0;
      for (int i = 0; i < naxes; ++i) {
        (right[i] ? Uexp : N) += idx[i] * plan.h * c.axes[i].gen;
        key = mix(mix(key, c.axes[i].root), idx[i]);
      }
      const Mat NU = c.k * mat_exp(N) * mat_exp(Uexp);
      for (size_t t = 0; t < tails.size(); ++t) {
        const Mat g = NU * tails[t] * c.k.transpose();
        const Mat ginv = g.inverse();
        if (distance_to_identity(g, ginv) > ball.R) continue;
        for (int i = 0; i < naxes; ++i)
          if (std::abs(idx[i]) == bound[i] && bound[i] < limit[i]) face_hit[i] = true;
        push_point(S, g, ginv, mix(key, tail_ids[t]));
      }
      int pos = 0;
      while (pos < naxes && ++idx[pos] > bound[pos]) {
        idx[pos] = -bound[pos];
        ++pos;
      }
      if (pos == naxes) break;
    }
    bool grow = false;
    for (int i = 0; i < naxes; ++i)
      if (face_hit[i]) {
        ++bound[i];
        grow = true;
      }
    if (!grow || static_cast<int>(S.size()) > 4 * ball.max_points) break;
  }
  shrink(S);
  S.source = "descriptor(I=" + subset_label(rs, desc.I) + ")";

  // Coverage: random chart parameters inside the inner ball against the net.
  Rng rng(mix(seed, 0x636f76));
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  const double inner = ball.R - 2.0 * ball.mesh;
  double coverage = 0.0;
  for (int probe = 0; probe < 64 && !S.points.empty(); ++probe) {
    Mat N = Mat::Zero(d, d), Uexp = Mat::Zero(d, d), K = Mat::Zero(d, d);
    for (int i = 0; i < naxes; ++i)
      (right[i] ? Uexp : N) += (2.0 * U01(rng) - 1.0) * bound[i] * plan.h * c.axes[i].gen;
    for (const Mat& X : c.kappa_gens) K += (2.0 * U01(rng) - 1.0) * kPi * X;
    const Mat& m = c.M[static_cast<size_t>(U01(rng) * c.M.size()) % c.M.size()];
    const Mat g = c.k * mat_exp(N) * mat_exp(Uexp) * c.a * mat_exp(K) * c.ainv * m * c.k.transpose();
    const Mat ginv = g.inverse();
    if (distance_to_identity(g, ginv) > inner) continue;
    SampledSubgroup one;
    push_point(one, g, ginv, 0);
    coverage = std::max(coverage, nearest(one, 0, S, std::numeric_limits<double>::infinity(), 0.0));
  }
  S.coverage_estimate = coverage;
  return S;
}

SampledSubgroup sample_conjugated_K(const RootSystem& rs, const Mat& g, const BallSpec& ball, std::uint64_t seed,
                                    const Tolerances& tol) {
  const LimitGroupDescriptor desc = canonical_descriptor(g, full_subset(rs), rs, tol);
  SampledSubgroup S = sample(rs, desc, ball, seed);
  S.source = "conjugated-K(g)";
  return S;
}

double directed_hausdorff(const SampledSubgroup& A, const SampledSubgroup& B) {
  if (A.points.empty() || B.points.empty()) throw Error(ErrorKind::Validation, "Hausdorff distance of an empty sample");
  if (A.points.front().rows() != B.points.front().rows())
    throw Error(ErrorKind::ModelMismatch, "samples come from different models");
  const double inner = A.ball.R - 2.0 * A.ball.mesh;
  std::unordered_map<std::uint64_t, Eigen::Index> partner;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(B.size()); ++j) partner.emplace(B.keys[j], j);

  // Partner distance bounds each nearest distance from above; visiting in decreasing bound
  // order lets the scan stop once the bound falls under the running maximum.
  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(A.size()); ++i) {
    if (distance_to_identity(A.points[i], A.points[i].inverse()) > inner) continue;
    double bound = std::numeric_limits<double>::infinity();
    if (auto it = partner.find(A.keys[i]); it != partner.end()) {
      const Eigen::Index j = it->second;
      bound = std::sqrt(std::max((A.flat.row(i) - B.flat.row(j)).squaredNorm(),
                                 (A.flat_inv.row(i) - B.flat_inv.row(j)).squaredNorm()));
    }
    order.emplace_back(bound, i);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  double cmax = 0.0;
  for (const auto& [bound, i] : order) {
    if (bound <= cmax) break;
    cmax = std::max(cmax, nearest(A, i, B, bound, cmax));
  }
  return cmax;
}

double hausdorff(const SampledSubgroup& S1, const SampledSubgroup& S2) {
  if (S1.ball.R != S2.ball.R) throw Error(ErrorKind::Validation, "samples live in different balls");
  return std::max(directed_hausdorff(S1, S2), directed_hausdorff(S2, S1));
}

SampledSubgroup conjugate(const SampledSubgroup& S, const Mat& g) {
  SampledSubgroup out;
  out.ball = S.ball;
  out.source = S.source + " conjugated";
  const Mat ginv = g.inverse();
  for (size_t i = 0; i < S.size(); ++i) {
    const Mat p = g * S.points[i] * ginv;
    const Mat pinv = p.inverse();
    if (distance_to_identity(p, pinv) <= S.ball.R) push_point(out, p, pinv, S.keys[i]);
  }
  shrink(out);
  out.coverage_estimate = S.coverage_estimate;
  return out;
}

Mat escape_direction(const RootSystem& rs, const Subset& I) {
  const int r = rs.rank();
  Mat F(r, r);
  Vec target(r);
  for (int i = 0; i < r; ++i) {
    F.row(i) = rs.roots[rs.base[i]].functional.transpose();
    target(i) = std::binary_search(I.begin(), I.end(), i) ? 0.0 : 1.0;
  }
  const Vec c = F.fullPivLu().solve(target);
  const int d = rs.model.dim();
  Mat H = Mat::Zero(d, d);
  for (int j = 0; j < r; ++j) H += c(j) * rs.cartan.a_basis[j];
  for (int m = 1; m <= 120; ++m) {
    const Vec v = m * H.diagonal();
    if ((v - v.array().round().matrix()).norm() < 1e-9) return Mat(v.array().round().matrix().asDiagonal());
  }
  return H;
}

std::vector<Mat> geometric_sequence(const RootSystem& rs, const Subset& I, double ratio, int horizon) {
  if (!(ratio > 1.0)) throw Error(ErrorKind::Validation, "geometric ratio must exceed 1");
  if (horizon < 1) throw Error(ErrorKind::Validation, "horizon must be positive");
  const Mat H = escape_direction(rs, I);
  std::vector<Mat> out;
  for (int n = 1; n <= horizon; ++n) out.push_back(Mat((n * std::log(ratio) * H.diagonal()).array().exp().matrix().asDiagonal()));
  return out;
}

void require_escaping(const RootSystem& rs, const Subset& I, const std::vector<Mat>& a_seq, double tol) {
  if (a_seq.size() < 2) throw Error(ErrorKind::Validation, "sequence needs at least two terms");
  std::vector<Mat> logs;
  for (const Mat& a : a_seq) {
    if (a.rows() != rs.model.dim()) throw Error(ErrorKind::ModelMismatch, "sequence term has the wrong size");
    const Mat off = a - Mat(a.diagonal().asDiagonal());
    if (off.norm() > tol || a.diagonal().minCoeff() <= 0) throw Error(ErrorKind::Validation, "sequence term is not in A");
    logs.push_back(Mat(a.diagonal().array().log().matrix().asDiagonal()));
  }
  for (int b = 0; b < rs.rank(); ++b) {
    const bool in_I = std::binary_search(I.begin(), I.end(), b);
    for (size_t n = 0; n < logs.size(); ++n) {
      const double v = rs.eval_base(b, logs[n]);
      if (in_I && std::abs(v) > tol * std::max(1.0, logs[n].norm()))
        throw Error(ErrorKind::Validation, "a root of I does not vanish along the sequence");
      if (!in_I && n > 0 && !(v > rs.eval_base(b, logs[n - 1]) + tol))
        throw Error(ErrorKind::Validation, "a root outside I does not increase along the sequence");
    }
  }
}

ConvergenceResult convergence_experiment(const RootSystem& rs, const Subset& I, const std::vector<Mat>& a_seq,
                                         const BallSpec& ball, std::uint64_t seed, const Tolerances& tol,
                                         bool keep_samples) {
  ball.validate();
  if (static_cast<int>(I.size()) == rs.rank()) throw Error(ErrorKind::Validation, "convergence needs a proper subset");
  require_escaping(rs, I, a_seq, tol.membership_tol);
  const int d = rs.model.dim();
  const LimitGroupDescriptor lim{I, Mat::Identity(d, d), Mat::Identity(d, d)};
  const ChartPlan plan = plan_chart(rs, lim, ball, I);
  ConvergenceResult out;
  out.limit = sample(rs, lim, ball, seed, plan);
  for (size_t n = 0; n < a_seq.size(); ++n) {
    const LimitGroupDescriptor dn{full_subset(rs), a_seq[n], Mat::Identity(d, d)};
    SampledSubgroup Sn = sample(rs, dn, ball, seed, plan);
    out.table.push_back({static_cast<int>(n + 1), hausdorff(Sn, out.limit)});
    if (keep_samples) out.samples.push_back(std::move(Sn));
  }
  return out;
}

bool eventually_decreasing(const std::vector<ConvergenceRow>& table, int from, double floor) {
  for (size_t i = 1; i < table.size(); ++i) {
    if (table[i - 1].n < from) continue;
    const double prev = table[i - 1].distance, cur = table[i].distance;
    if (prev <= floor && cur <= floor) continue;
    if (!(cur < prev)) return false;
  }
  return true;
}

SequentialCriterionReport verify_sequential_criterion(const std::vector<SampledSubgroup>& seq,
                                                      const SampledSubgroup& L, double tol) {
  SequentialCriterionReport rep;
  if (seq.empty()) return rep;
  for (size_t n = seq.size() / 2; n < seq.size(); ++n) {
    rep.worst_approach = std::max(rep.worst_approach, directed_hausdorff(L, seq[n]));
    rep.worst_accumulation = std::max(rep.worst_accumulation, directed_hausdorff(seq[n], L));
  }
  rep.limit_points_approached = rep.worst_approach < tol;
  rep.accumulation_points_in_limit = rep.worst_accumulation < tol;
  return rep;
}

ToySubgroupR ToySubgroupR::lattice(double c) {
  if (!(c > 0) || !std::isfinite(c)) throw Error(ErrorKind::Validation, "lattice spacing must be positive");
  return {Kind::Lattice, c};
}

double toy_angle(const ToySubgroupR& s) {
  switch (s.kind) {
    case ToySubgroupR::Kind::Trivial: return 0.0;
    case ToySubgroupR::Kind::Full: return kPi / 2;
    case ToySubgroupR::Kind::Lattice: return std::atan(1.0 / s.c);
  }
  return 0.0;
}

ToySubgroupR toy_from_angle(double theta, double tol) {
  if (theta < tol) return ToySubgroupR::trivial();
  if (kPi / 2 - theta < tol) return ToySubgroupR::full();
  return ToySubgroupR::lattice(1.0 / std::tan(theta));
}

ToySubgroupR toy_limit_R(const std::vector<ToySubgroupR>& seq, double tol) {
  if (seq.size() < 4) throw Error(ErrorKind::Validation, "toy sequence needs at least four terms");
  std::vector<double> theta;
  for (const auto& s : seq) {
    if (s.kind == ToySubgroupR::Kind::Lattice && !(s.c > 0)) throw Error(ErrorKind::Validation, "nonpositive spacing");
    theta.push_back(toy_angle(s));
  }
  const TailLimit lim = extrapolate_tail(theta);
  if (!(lim.uncertainty <= tol)) throw Error(ErrorKind::Validation, "spacing sequence does not settle");
  return toy_from_angle(std::clamp(lim.value, 0.0, kPi / 2), tol);
}

long toy_limit_Z(const std::vector<long>& seq, double tol) {
  if (seq.size() < 4) throw Error(ErrorKind::Validation, "toy sequence needs at least four terms");
  for (long n : seq)
    if (n < 0) throw Error(ErrorKind::Validation, "subgroup index must be nonnegative");
  const size_t start = seq.size() - std::max<size_t>(2, seq.size() / 4);
  if (std::all_of(seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end(), [&](long n) { return n == seq.back(); }))
    return seq.back();
  // A nonconstant tail can only converge to the trivial group, where 1/n tends to 0.
  std::vector<double> x;
  for (long n : seq) x.push_back(n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  const TailLimit lim = extrapolate_tail(x);
  if (!(lim.uncertainty <= tol) || std::abs(lim.value) > tol)
    throw Error(ErrorKind::Validation, "subgroup sequence does not settle");
  return 0;
}

}  // namespace chabauty
