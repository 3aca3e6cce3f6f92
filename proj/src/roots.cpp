#include "chabauty/roots.hpp"

#include "chabauty/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chabauty {

namespace {

Mat unit(int d, int i, int j) {
  Mat E = Mat::Zero(d, d);
  E(i, j) = 1.0;
  return E;
}

struct RawRoot {
  Vec weight;
  Mat vector;
  bool positive;
  std::string name;
};

std::vector<RawRoot> sl_roots(int n) {
  std::vector<RawRoot> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Vec w = Vec::Zero(n);
      w(i) = 1.0;
      w(j) = -1.0;
      const int lo = std::min(i, j) + 1, hi = std::max(i, j) + 1;
      const std::string base = "a" + std::to_string(lo) + std::to_string(hi);
      out.push_back({w, unit(n, i, j), i < j, i < j ? base : "-" + base});
    }
  return out;
}

std::vector<RawRoot> sopp_roots(int p) {
  const int d = 2 * p;
  auto bar = [d](int i) { return d - 1 - i; };
  auto beta = [&](int i) {
    Vec w = Vec::Zero(d);
    w(i) = 0.5;
    w(bar(i)) = -0.5;
    return w;
  };
  std::vector<RawRoot> out;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const std::string bi = "b" + std::to_string(i + 1), bj = "b" + std::to_string(j + 1);
      const int ib = bar(i), jb = bar(j);
      out.push_back({beta(i) - beta(j), unit(d, i, j) - unit(d, jb, ib), true, bi + "-" + bj});
      out.push_back({beta(j) - beta(i), unit(d, j, i) - unit(d, ib, jb), false, "-(" + bi + "-" + bj + ")"});
      out.push_back({beta(i) + beta(j), unit(d, i, jb) - unit(d, j, ib), true, bi + "+" + bj});
      out.push_back({-beta(i) - beta(j), unit(d, jb, i) - unit(d, ib, j), false, "-(" + bi + "+" + bj + ")"});
    }
  return out;
}

bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return a(i) < b(i);
  return false;
}

Mat diag_columns(const std::vector<Mat>& diagonals) {
  if (diagonals.empty()) return Mat(0, 0);
  Mat out(diagonals.front().rows(), static_cast<Eigen::Index>(diagonals.size()));
  for (size_t k = 0; k < diagonals.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = diagonals[k].diagonal();
  return out;
}

std::vector<Mat> as_diagonals(const Mat& cols) {
  std::vector<Mat> out;
  for (Eigen::Index k = 0; k < cols.cols(); ++k) out.push_back(Mat(cols.col(k).asDiagonal()));
  return out;
}

}  // namespace

double RootSystem::eval(int root, const Mat& H) const { return roots[root].weight.dot(H.diagonal()); }

std::optional<int> RootSystem::find(const Eigen::VectorXi& coeffs) const {
  for (size_t r = 0; r < roots.size(); ++r)
    if (roots[r].coeffs == coeffs) return static_cast<int>(r);
  return std::nullopt;
}

std::vector<Mat> RootSystem::algebra_basis() const {
  std::vector<Mat> out = cartan.a_basis;
  out.insert(out.end(), root_vectors.begin(), root_vectors.end());
  return out;
}

Vec RootSystem::coordinates(const Mat& X) const { return coord_solver * linalg::vec(X); }

RootSystem build_root_system(const GroupModel& model) {
  const int d = model.dim();
  CartanData cartan{model, {}, 0};
  std::vector<RawRoot> raw;
  std::vector<std::string> base_names;
  if (model.family() == Family::SpecialLinear) {
    const int n = model.param();
    for (int i = 0; i + 1 < n; ++i) {
      cartan.a_basis.push_back(unit(d, i, i) - unit(d, i + 1, i + 1));
      base_names.push_back("a" + std::to_string(i + 1) + std::to_string(i + 2));
    }
    raw = sl_roots(n);
  } else {
    const int p = model.param();
    for (int i = 0; i < p; ++i) cartan.a_basis.push_back(unit(d, i, i) - unit(d, d - 1 - i, d - 1 - i));
    for (int i = 0; i + 1 < p; ++i)
      base_names.push_back("b" + std::to_string(i + 1) + "-b" + std::to_string(i + 2));
    base_names.push_back("b" + std::to_string(p - 1) + "+b" + std::to_string(p));
    raw = sopp_roots(p);
  }
  cartan.rank = static_cast<int>(cartan.a_basis.size());
  const int rank = cartan.rank;

  auto functional_of = [&](const Vec& w) {
    Vec f(rank);
    for (int k = 0; k < rank; ++k) f(k) = w.dot(cartan.a_basis[k].diagonal());
    return f;
  };

  // Base functionals as rows; coefficients c solve F^T c = functional.
  Mat F(rank, rank);
  for (int b = 0; b < rank; ++b) {
    auto it = std::find_if(raw.begin(), raw.end(), [&](const RawRoot& r) { return r.name == base_names[b]; });
    F.row(b) = functional_of(it->weight).transpose();
  }
  const Eigen::FullPivLU<Mat> lu(F.transpose());

  RootSystem rs{model, cartan, {}, {}, {}, cartan.a_basis, Mat()};
  std::vector<std::pair<Root, Mat>> built;
  for (const RawRoot& r : raw) {
    Root root;
    root.functional = functional_of(r.weight);
    root.weight = r.weight;
    root.positive = r.positive;
    root.name = r.name;
    const Vec c = lu.solve(root.functional);
    root.coeffs.resize(rank);
    for (int k = 0; k < rank; ++k) {
      const double rounded = std::round(c(k));
      if (std::abs(c(k) - rounded) > 1e-8) throw Error(ErrorKind::Numerical, "non-integral root coordinates");
      root.coeffs(k) = static_cast<int>(rounded);
    }
    built.emplace_back(root, r.vector);
  }
  std::sort(built.begin(), built.end(),
            [](const auto& a, const auto& b) { return lex_less(a.first.coeffs, b.first.coeffs); });
  for (auto& [root, vecm] : built) {
    rs.roots.push_back(root);
    rs.root_vectors.push_back(vecm);
  }
  for (int b = 0; b < rank; ++b) {
    Eigen::VectorXi e = Eigen::VectorXi::Zero(rank);
    e(b) = 1;
    rs.base.push_back(*rs.find(e));
  }
  const Mat B = linalg::stack(rs.algebra_basis());
  rs.coord_solver = (B.transpose() * B).inverse() * B.transpose();
  return rs;
}

RootProjection root_space_project(const Mat& X, const RootSystem& rs) {
  const Vec c = rs.coordinates(X);
  const int d = rs.model.dim();
  RootProjection out{Mat::Zero(d, d), {}};
  for (int k = 0; k < rs.rank(); ++k) out.zero += c(k) * rs.cartan.a_basis[k];
  for (size_t r = 0; r < rs.roots.size(); ++r) out.components.push_back(c(rs.rank() + r) * rs.root_vectors[r]);
  return out;
}

Subset full_subset(const RootSystem& rs) {
  Subset I(rs.rank());
  for (int i = 0; i < rs.rank(); ++i) I[i] = i;
  return I;
}

Mat project_onto(const std::vector<Mat>& basis, const Mat& X) {
  Mat out = Mat::Zero(X.rows(), X.cols());
  for (const Mat& B : basis) out += (B.array() * X.array()).sum() * B;
  return out;
}

SubsetData build_subset(const RootSystem& rs, const Subset& I) {
  const int rank = rs.rank(), d = rs.model.dim();
  for (size_t t = 0; t < I.size(); ++t) {
    if (I[t] < 0 || I[t] >= rank) throw Error(ErrorKind::Validation, "subset index outside the base");
    if (t > 0 && I[t] <= I[t - 1]) throw Error(ErrorKind::Validation, "subset must be sorted without repeats");
  }
  SubsetData sd;
  sd.I = I;

  // The Killing form is a multiple of the trace form, so orthogonality is Euclidean on diagonals.
  const Mat Qa = linalg::orthonormal_columns(diag_columns(rs.cartan.a_basis));
  Mat W(d, static_cast<Eigen::Index>(I.size()));
  for (size_t t = 0; t < I.size(); ++t) W.col(static_cast<Eigen::Index>(t)) = rs.roots[rs.base[I[t]]].weight;
  const Mat Wa = Qa * (Qa.transpose() * W);
  sd.aI_basis = as_diagonals(linalg::orthonormal_columns(Wa));
  sd.a_I_basis = as_diagonals(Qa * linalg::null_space(W.transpose() * Qa, rank));

  auto in_span = [&](const Root& r) {
    for (int k = 0; k < rank; ++k)
      if (r.coeffs(k) != 0 && !std::binary_search(I.begin(), I.end(), k)) return false;
    return true;
  };
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    const Root& root = rs.roots[r];
    const int idx = static_cast<int>(r);
    if (in_span(root)) {
      sd.sigma_sup_I.push_back(idx);
      if (root.positive) {
        sd.sigma_sup_I_plus.push_back(idx);
        sd.n_sup_I_basis.push_back(rs.root_vectors[r]);
      }
    } else if (root.positive) {
      sd.sigma_I_plus.push_back(idx);
      sd.n_I_basis.push_back(rs.root_vectors[r]);
    }
  }

  // k^I = k intersected with the derived algebra of the centralizer of a_I.
  const std::vector<Mat> gb = rs.algebra_basis();
  const int m = static_cast<int>(gb.size());
  Mat adstack(0, m);
  for (const Mat& H : sd.a_I_basis) {
    Mat ad(m, m);
    for (int j = 0; j < m; ++j) ad.col(j) = rs.coordinates(H * gb[j] - gb[j] * H);
    Mat grown(adstack.rows() + m, m);
    grown << adstack, ad;
    adstack = grown;
  }
  const Mat zc = linalg::null_space(adstack, m);
  std::vector<Mat> z;
  for (Eigen::Index c = 0; c < zc.cols(); ++c) {
    Mat Z = Mat::Zero(d, d);
    for (int j = 0; j < m; ++j) Z += zc(j, c) * gb[j];
    z.push_back(Z);
  }
  std::vector<Mat> brackets;
  for (size_t a = 0; a < z.size(); ++a)
    for (size_t b = a + 1; b < z.size(); ++b) brackets.push_back(z[a] * z[b] - z[b] * z[a]);
  const Mat D = linalg::orthonormal_columns(linalg::stack(brackets));
  if (D.cols() > 0) {
    Mat sym(d * d, D.cols());
    for (Eigen::Index c = 0; c < D.cols(); ++c) {
      const Mat Dc = linalg::unvec(D.col(c), d);
      sym.col(c) = linalg::vec(0.5 * (Dc + Dc.transpose()));
    }
    const Mat coeffs = linalg::null_space(sym, static_cast<int>(D.cols()));
    sd.k_I_basis = linalg::unstack(linalg::orthonormal_columns(D * coeffs), d);
  }

  // M: diagonal sign matrices in K centralizing the Cartan subalgebra.
  const int free = rs.model.family() == Family::SpecialLinear ? d : rs.model.param();
  for (int mask = 0; mask < (1 << free); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) % 2 != 0) continue;
    Vec eps(d);
    for (int i = 0; i < free; ++i) {
      const double s = (mask >> i) & 1 ? -1.0 : 1.0;
      eps(i) = s;
      if (free != d) eps(d - 1 - i) = s;
    }
    sd.M_elements.push_back(Mat(eps.asDiagonal()));
  }
  return sd;
}

Subset parse_subset(const RootSystem& rs, const std::string& text) {
  Subset I;
  if (text.empty() || text == "none") return I;
  if (text == "all") return full_subset(rs);
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    int found = -1;
    for (int b = 0; b < rs.rank(); ++b)
      if (rs.roots[rs.base[b]].name == tok) found = b;
    if (found < 0 && tok.size() > 1 && tok[0] == 'a' &&
        std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const int k = std::stoi(tok.substr(1));
      if (k >= 1 && k <= rs.rank()) found = k - 1;
    }
    if (found < 0) throw Error(ErrorKind::Validation, "unknown base root '" + tok + "' for " + rs.model.label());
    I.push_back(found);
  }
  std::sort(I.begin(), I.end());
  I.erase(std::unique(I.begin(), I.end()), I.end());
  return I;
}

std::string subset_label(const RootSystem& rs, const Subset& I) {
  if (I.empty()) return "none";
  std::string out;
  for (size_t t = 0; t < I.size(); ++t) {
    if (t) out += ",";
    out += rs.roots[rs.base[I[t]]].name;
  }
  return out;
}

void require_cartan(const RootSystem& rs, const Mat& H, double tol) {
  const Mat off = H - Mat(H.diagonal().asDiagonal());
  if (off.norm() > tol || !is_algebra_member(H, rs.model, tol))
    throw Error(ErrorKind::Validation, "element is not in the Cartan subalgebra");
}

bool chamber_test(const RootSystem& rs, const Mat& H, bool closed, double tol) {
  require_cartan(rs, H, tol);
  for (int b = 0; b < rs.rank(); ++b) {
    const double v = rs.eval_base(b, H);
    if (closed ? v < -tol : v <= tol) return false;
  }
  return true;
}

Subset facet_subset_of(const RootSystem& rs, const Mat& H, double tol) {
  require_cartan(rs, H, tol);
  Subset I;
  for (int b = 0; b < rs.rank(); ++b)
    if (std::abs(rs.eval_base(b, H)) <= tol) I.push_back(b);
  return I;
}

}  // namespace chabauty
