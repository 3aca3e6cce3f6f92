#include "chabauty/verify.hpp"

#include <cmath>
#include <functional>

namespace chabauty {

namespace {

class Tally {
 public:
  Tally(std::string name, const GroupModel& model) {
    r_.name = std::move(name);
    r_.model = model.label();
  }
  void check(bool ok, double residual, const std::string& what) {
    ++r_.checks;
    if (std::isfinite(residual)) r_.max_residual = std::max(r_.max_residual, residual);
    if (!ok) {
      ++r_.failures;
      if (r_.detail.empty()) r_.detail = what;
    }
  }
  // Runs body, turning a thrown Error into a failed check.
  void guard(const std::string& what, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      check(false, 0.0, what + ": " + e.what());
    }
  }
  SuiteResult done() {
    r_.passed = r_.failures == 0;
    return r_;
  }

 private:
  SuiteResult r_;
};

std::vector<Subset> all_subsets(const RootSystem& rs) {
  std::vector<Subset> out;
  for (int mask = 0; mask < (1 << rs.rank()); ++mask) {
    Subset I;
    for (int b = 0; b < rs.rank(); ++b)
      if ((mask >> b) & 1) I.push_back(b);
    out.push_back(I);
  }
  return out;
}

PolyhedralPoint random_corner_point(const RootSystem& rs, const Subset& I, Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 2.0);
  std::vector<ExtendedReal> c;
  for (int b = 0; b < rs.rank(); ++b)
    c.push_back(std::binary_search(I.begin(), I.end(), b) ? ExtendedReal::finite(U(rng)) : ExtendedReal::inf());
  return from_corner_coords(c, rs);
}

SuiteResult suite_roots(const RootSystem& rs, const Tolerances& tol) {
  Tally t("roots", rs.model);
  const int n = rs.model.param();
  const int expected = rs.model.family() == Family::SpecialLinear ? n * (n - 1) : 2 * n * (n - 1);
  const int base = rs.model.family() == Family::SpecialLinear ? n - 1 : n;
  t.check(static_cast<int>(rs.roots.size()) == expected, 0.0, "root count");
  t.check(static_cast<int>(rs.base.size()) == base, 0.0, "base size");
  for (size_t r = 0; r < rs.roots.size(); ++r)
    for (const Mat& H : rs.cartan.a_basis) {
      const Mat& X = rs.root_vectors[r];
      const double res = (H * X - X * H - rs.eval(static_cast<int>(r), H) * X).norm();
      t.check(res < tol.factorization_tol, res, "eigen relation of " + rs.roots[r].name);
    }
  for (size_t a = 0; a < rs.roots.size(); ++a)
    for (size_t b = 0; b < rs.roots.size(); ++b) {
      const Mat Z = rs.root_vectors[a] * rs.root_vectors[b] - rs.root_vectors[b] * rs.root_vectors[a];
      const Eigen::VectorXi sum = rs.roots[a].coeffs + rs.roots[b].coeffs;
      const RootProjection p = root_space_project(Z, rs);
      Mat allowed = Mat::Zero(Z.rows(), Z.cols());
      if (sum.isZero()) allowed = p.zero;
      else if (auto idx = rs.find(sum)) allowed = p.components[*idx];
      const double res = (Z - allowed).norm();
      t.check(res < tol.factorization_tol, res, "bracket of " + rs.roots[a].name + " and " + rs.roots[b].name);
    }
  return t.done();
}

SuiteResult suite_killing(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("killing", rs.model);
  for (int i = 0; i < trials; ++i) {
    const Mat X = random_algebra(rs.model, rng, 1.0), Y = random_algebra(rs.model, rng, 1.0);
    const Mat g = random_group(rs.model, rng, 1.0);
    const Mat gi = g.inverse();
    const double b = killing_form(rs.model, X, Y);
    const double sym = std::abs(b - killing_form(rs.model, Y, X));
    const double inv = std::abs(killing_form(rs.model, g * X * gi, g * Y * gi) - b) / std::max(1.0, std::abs(b));
    t.check(sym < tol.factorization_tol, sym, "symmetry");
    t.check(inv < tol.factorization_tol * 100, inv, "Ad-invariance");
    const double pos = b_theta({rs.model, X}, {rs.model, X});
    t.check(pos > 0, 0.0, "positivity of the twisted form");
  }
  return t.done();
}

SuiteResult suite_decompose(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("decompose", rs.model);
  for (int i = 0; i < trials; ++i) {
    const Mat g = random_group(rs.model, rng, 3.0);
    const double s = std::max(1.0, g.norm());
    t.guard("iwasawa", [&] {
      const IwasawaFactors f = iwasawa({rs.model, g}, false, tol);
      t.check(true, (f.k.mat * f.a.mat * f.n.mat - g).norm() / s, "");
    });
    t.guard("opposite iwasawa", [&] {
      const IwasawaFactors f = iwasawa({rs.model, g}, true, tol);
      t.check(true, (f.k.mat * f.a.mat * f.n.mat - g).norm() / s, "");
    });
    t.guard("polar", [&] {
      const PolarFactors f = polar({rs.model, g}, tol);
      t.check(true, (mat_exp(f.X.mat) * f.k.mat - g).norm() / s, "");
    });
    t.guard("cartan", [&] {
      const CartanFactors f = cartan_kak({rs.model, g}, tol);
      const double res = (f.k1.mat * f.a.mat * f.k2.mat - g).norm() / s;
      const Mat H = Mat(f.a.mat.diagonal().array().log().matrix().asDiagonal());
      t.check(chamber_test(rs, H, true, tol.membership_tol * std::max(1.0, H.norm())), res, "Cartan chamber");
    });
  }
  return t.done();
}

SuiteResult suite_nilpotency(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("nilpotent-characterization", rs.model);
  for (const Subset& I : all_subsets(rs)) {
    t.guard("subset " + subset_label(rs, I), [&] {
      const SubsetData sd = build_subset(rs, I);
      const NilpotencyReport rep = verify_nilpotent_characterization(rs, sd, trials, rng, tol.spectrum_tol);
      t.check(rep.counterexamples == 0, rep.counterexamples,
              "subset " + subset_label(rs, I) + (rep.notes.empty() ? "" : ": " + rep.notes.front()));
    });
  }
  return t.done();
}

SuiteResult suite_normalizer(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("normalizer", rs.model);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = rs.model.dim();
  for (const Subset& I : all_subsets(rs)) {
    if (static_cast<int>(I.size()) == rs.rank()) continue;
    const SubsetData sd = build_subset(rs, I);
    for (int i = 0; i < trials; ++i) {
      Mat N = Mat::Zero(d, d), H = Mat::Zero(d, d);
      for (size_t r = 0; r < rs.roots.size(); ++r)
        if (rs.roots[r].positive) N += gauss(rng) * rs.root_vectors[r];
      for (const Mat& B : rs.cartan.a_basis) H += gauss(rng) * B;
      const Mat& m = sd.M_elements[i % sd.M_elements.size()];
      const Mat p = m * mat_exp(H) * mat_exp(N);
      t.check(normalizes(p, NormalizerTarget::NilradicalAlgebra, rs, sd, tol.spectrum_tol), 0.0,
              "M A N element fails to normalize the nilradical");
      const int r = sd.sigma_I_plus[static_cast<size_t>(i) % sd.sigma_I_plus.size()];
      const Mat q = mat_exp((1.0 + std::abs(gauss(rng))) * rs.root_vectors[r].transpose());
      t.check(!normalizes(q, NormalizerTarget::NilradicalAlgebra, rs, sd, tol.spectrum_tol), 0.0,
              "negative root exponential normalizes the nilradical");
    }
  }
  return t.done();
}

SuiteResult suite_limit_group(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("limit-group", rs.model);
  for (const Subset& I : all_subsets(rs)) {
    t.guard("subset " + subset_label(rs, I), [&] {
      const PolyhedralPoint p = random_corner_point(rs, I, rng);
      const LimitGroupDescriptor desc{I, mat_exp(p.rep), random_K(rs.model, rng)};
      const StructuredSubgroup sg = build_limit_group(rs, desc, tol);
      for (int i = 0; i < trials; ++i) {
        const Mat g = random_member(sg, rs, rng, 0.5), h = random_member(sg, rs, rng, 0.5);
        t.check(member(g, sg, rs, tol.membership_tol), 0.0, "sampled element is not a member");
        t.check(member(g * h.inverse(), sg, rs, tol.membership_tol), 0.0, "closure under g h^-1");
        t.check(is_distal(g, rs, tol.spectrum_tol), 0.0, "member is not distal");
      }
    });
  }
  return t.done();
}

int first_outside(const RootSystem& rs, const Subset& I) {
  for (int b = 0; b < rs.rank(); ++b)
    if (!std::binary_search(I.begin(), I.end(), b)) return b;
  return -1;
}

SuiteResult suite_classification(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("classification", rs.model);
  const auto subsets = all_subsets(rs);
  for (int i = 0; i < trials; ++i) {
    const Subset& I = subsets[static_cast<size_t>(i) % subsets.size()];
    t.guard("subset " + subset_label(rs, I), [&] {
      const PolyhedralPoint p = random_corner_point(rs, I, rng);
      const Mat k = random_K(rs.model, rng), k2 = random_K(rs.model, rng);
      const bool interior = static_cast<int>(I.size()) == rs.rank();
      // Escaping roots end at twice the bound threshold, keeping cond(g_n) within double precision.
      const int N = 40;
      const double threshold = 3.0;
      Mat dir = Mat::Zero(rs.model.dim(), rs.model.dim());
      if (!interior) {
        dir = escape_direction(rs, I);
        dir *= 2.0 * threshold / (N * rs.eval_base(first_outside(rs, I), dir));
      }
      std::vector<Mat> seq;
      for (int n = 1; n <= N; ++n) seq.push_back(k * mat_exp(p.rep + n * dir) * k2);
      const Classification c = classify_sequence(seq, rs, tol, threshold);
      if (interior) {
        t.check(c.interior, 0.0, "bounded sequence not classified as interior");
      } else {
        const LimitGroupDescriptor truth{I, mat_exp(p.rep), k};
        t.check(!c.interior && descriptors_equal(c.desc, truth, rs, 1e-6), c.residual,
                "classification of subset " + subset_label(rs, I));
      }
    });
  }
  return t.done();
}

SuiteResult suite_polyhedral(const RootSystem& rs, const Tolerances& tol, Rng& rng, int trials) {
  Tally t("polyhedral", rs.model);
  const auto subsets = all_subsets(rs);
  for (int i = 0; i < trials; ++i) {
    const Subset& I = subsets[static_cast<size_t>(i) % subsets.size()];
    t.guard("corner chart", [&] {
      const PolyhedralPoint p = random_corner_point(rs, I, rng);
      const PolyhedralPoint q = from_corner_coords(corner_coords(p, rs, tol.membership_tol), rs);
      const double res = (q.rep - p.rep).norm();
      t.check(q.I == p.I && res < tol.factorization_tol * 10, res, "corner chart round trip");
      const Mat k0 = random_K(rs.model, rng);
      const LimitGroupDescriptor got = phi({k0, p}, rs, tol);
      const LimitGroupDescriptor want{I, mat_exp(p.rep), k0};
      t.check(descriptors_equal(got, want, rs, 1e-6), 0.0, "phi of a K-translate");
    });
  }
  return t.done();
}

SuiteResult suite_toy(const GroupModel& model) {
  Tally t("toy-spaces", model);
  auto seq = [](const std::function<double(double)>& c) {
    std::vector<ToySubgroupR> s;
    for (int n = 1; n <= 48; ++n) s.push_back(ToySubgroupR::lattice(c(n)));
    return s;
  };
  t.guard("toy R", [&] {
    t.check(toy_limit_R(seq([](double n) { return n; })).kind == ToySubgroupR::Kind::Trivial, 0.0,
            "diverging spacings");
    t.check(toy_limit_R(seq([](double n) { return 1.0 / n; })).kind == ToySubgroupR::Kind::Full,
            0.0, "vanishing spacings");
    const ToySubgroupR l = toy_limit_R(seq([](double n) { return 3.0 + 1.0 / n; }));
    t.check(l.kind == ToySubgroupR::Kind::Lattice && std::abs(l.c - 3.0) < 1e-4, std::abs(l.c - 3.0), "spacing 3");
  });
  t.guard("toy Z", [&] {
    std::vector<long> s;
    for (int j = 1; j <= 48; ++j) s.push_back(j < 10 ? j : 7);
    t.check(toy_limit_Z(s) == 7, 0.0, "eventually constant index");
    std::vector<long> grow;
    for (long n = 1; n <= 48; ++n) grow.push_back(n);
    t.check(toy_limit_Z(grow) == 0, 0.0, "diverging index");
  });
  return t.done();
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const GroupModel& model, const Tolerances& tol, std::uint64_t seed,
                                           int trials) {
  tol.validate();
  const RootSystem rs = build_root_system(model);
  Rng rng(seed);
  std::vector<SuiteResult> out;
  out.push_back(suite_roots(rs, tol));
  out.push_back(suite_killing(rs, tol, rng, trials));
  out.push_back(suite_decompose(rs, tol, rng, trials));
  out.push_back(suite_nilpotency(rs, tol, rng, trials));
  out.push_back(suite_normalizer(rs, tol, rng, std::max(1, trials / 5)));
  out.push_back(suite_limit_group(rs, tol, rng, std::max(1, trials / 5)));
  out.push_back(suite_classification(rs, tol, rng, std::max(1, trials / 5)));
  out.push_back(suite_polyhedral(rs, tol, rng, trials));
  out.push_back(suite_toy(model));
  return out;
}

Json suite_to_json(const SuiteResult& s) {
  Json j;
  j["suite"] = s.name;
  j["model"] = s.model;
  j["passed"] = s.passed;
  j["checks"] = s.checks;
  j["failures"] = s.failures;
  j["max_residual"] = s.max_residual;
  if (!s.detail.empty()) j["detail"] = s.detail;
  return j;
}

}  // namespace chabauty
