// chabauty-lab: command-line driver over the chabauty library.
// Exit codes: 0 success, 1 failed suite or verdict, 2 invalid input.

#include "chabauty/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace chabauty;

namespace {

struct Common {
  std::string model = "sl:3";
  double factorization_tol = 1e-9;
  double membership_tol = 1e-7;
  double spectrum_tol = 1e-6;
  double tol_all = 0.0;  ///< overrides the three when positive
  std::uint64_t seed = 7;
  std::string output;
  std::string format = "json";

  Tolerances tolerances() const {
    Tolerances t{factorization_tol, membership_tol, spectrum_tol};
    if (tol_all > 0) t = {tol_all, tol_all, tol_all};
    t.validate();
    return t;
  }
  Json tol_json() const {
    const Tolerances t = tolerances();
    return {{"factorization", t.factorization_tol}, {"membership", t.membership_tol}, {"spectrum", t.spectrum_tol}};
  }
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* app, Common& c, bool with_model = true) {
  if (with_model) app->add_option("--model", c.model, "sl:N or sopp:P");
  app->add_option("--tol", c.tol_all, "set all three tolerances");
  app->add_option("--factorization-tol", c.factorization_tol);
  app->add_option("--membership-tol", c.membership_tol);
  app->add_option("--spectrum-tol", c.spectrum_tol);
  app->add_option("--seed", c.seed, "overridden by CHABAUTY_LAB_SEED");
  app->add_option("--output", c.output, "write the report here instead of stdout");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

std::uint64_t effective_seed(const Common& c) {
  if (const char* env = std::getenv("CHABAUTY_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputError("CHABAUTY_LAB_SEED is not an integer");
    }
  }
  return c.seed;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.output);
    if (!out) throw InputError("cannot write " + c.output);
    out << text;
  }
}

void emit_json(const Common& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

/// Comma separated numbers as a diagonal matrix.
Mat parse_diagonal(const std::string& text, int dim) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InputError("bad number '" + tok + "'");
    }
  }
  if (static_cast<int>(vals.size()) != dim) throw InputError("expected " + std::to_string(dim) + " diagonal entries");
  return Eigen::Map<Vec>(vals.data(), dim).asDiagonal();
}

Mat diag_from_json(const Json& j, int dim) {
  if (j.is_array() && !j.empty() && j.at(0).is_number()) {
    if (static_cast<int>(j.size()) != dim) throw InputError("diagonal has the wrong length");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = j.at(static_cast<size_t>(i)).get<double>();
    return v.asDiagonal();
  }
  return mat_from_json(j);
}

Json base_config(const std::string& command, const Common& c, std::uint64_t seed) {
  return {{"command", command}, {"model", c.model}, {"tolerances", c.tol_json()}, {"seed", seed}};
}

int cmd_roots(const Common& c) {
  const GroupModel model = GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const Json config = base_config("roots", c, effective_seed(c));
  Json j = envelope(model, config, "root-system");
  j["count"] = rs.roots.size();
  Json base = Json::array();
  for (int b : rs.base) base.push_back(rs.roots[b].name);
  j["base"] = base;
  Json roots = Json::array();
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    Json coeffs = Json::array();
    for (Eigen::Index k = 0; k < rs.roots[r].coeffs.size(); ++k) coeffs.push_back(rs.roots[r].coeffs(k));
    roots.push_back({{"name", rs.roots[r].name},
                     {"coefficients", coeffs},
                     {"positive", rs.roots[r].positive},
                     {"vector", mat_to_json(rs.root_vectors[r])}});
  }
  j["roots"] = roots;
  j["chamber"] = "closed positive chamber: every base root is nonnegative on H";
  if (c.format == "csv") {
    std::ostringstream out;
    out << "name,positive,coefficients\n";
    for (const auto& r : rs.roots) {
      out << r.name << "," << (r.positive ? 1 : 0) << ",";
      for (Eigen::Index k = 0; k < r.coeffs.size(); ++k) out << (k ? " " : "") << r.coeffs(k);
      out << "\n";
    }
    emit(c, out.str());
  } else {
    emit_json(c, j);
  }
  return 0;
}

int cmd_verify(const Common& c, const std::vector<std::string>& models, int trials) {
  const Tolerances tol = c.tolerances();
  const std::uint64_t seed = effective_seed(c);
  Json config = base_config("verify", c, seed);
  config["models"] = models;
  config["trials"] = trials;
  std::vector<GroupModel> parsed;
  for (const auto& m : models) parsed.push_back(GroupModel::parse(m));
  Json j = envelope(parsed.front(), config, "invariant-suites");
  Json suites = Json::array();
  bool ok = true;
  for (const auto& model : parsed)
    for (const SuiteResult& s : run_verify_suites(model, tol, seed, trials)) {
      ok = ok && s.passed;
      suites.push_back(suite_to_json(s));
    }
  j["suites"] = suites;
  j["passed"] = ok;
  if (c.format == "csv") {
    std::ostringstream out;
    out << "model,suite,passed,checks,failures,max_residual\n";
    for (const auto& s : suites)
      out << s["model"].get<std::string>() << "," << s["suite"].get<std::string>() << "," << (s["passed"].get<bool>() ? 1 : 0)
          << "," << s["checks"] << "," << s["failures"] << "," << s["max_residual"] << "\n";
    emit(c, out.str());
  } else {
    emit_json(c, j);
  }
  return ok ? 0 : 1;
}

int cmd_decompose(const Common& c, const std::string& kind, const std::string& input) {
  const Tolerances tol = c.tolerances();
  const Json in = read_json_file(input);
  const bool wrapped = in.is_object();
  const GroupModel model = wrapped && in.contains("model") ? model_from_json(in["model"]) : GroupModel::parse(c.model);
  const Mat g = mat_from_json(wrapped ? in.at("g") : in);
  if (g.rows() != model.dim() || g.cols() != model.dim()) throw Error(ErrorKind::ModelMismatch, "input size does not match the model");
  Json config = base_config("decompose", c, effective_seed(c));
  config["model"] = model.label();
  config["factorization"] = kind;
  config["input"] = mat_to_json(g);
  Json j = envelope(model, config, "factorizations");
  const GroupElement ge{model, g};
  Mat recon;
  if (kind == "iwasawa" || kind == "opposite-iwasawa") {
    const IwasawaFactors f = iwasawa(ge, kind != "iwasawa", tol);
    j["k"] = mat_to_json(f.k.mat);
    j["a"] = mat_to_json(f.a.mat);
    j["n"] = mat_to_json(f.n.mat);
    recon = f.k.mat * f.a.mat * f.n.mat;
  } else if (kind == "polar") {
    const PolarFactors f = polar(ge, tol);
    j["X"] = mat_to_json(f.X.mat);
    j["k"] = mat_to_json(f.k.mat);
    recon = mat_exp(f.X.mat) * f.k.mat;
  } else {
    const CartanFactors f = cartan_kak(ge, tol);
    j["k1"] = mat_to_json(f.k1.mat);
    j["a"] = mat_to_json(f.a.mat);
    j["k2"] = mat_to_json(f.k2.mat);
    recon = f.k1.mat * f.a.mat * f.k2.mat;
  }
  j["residual"] = (recon - g).norm();
  emit_json(c, j);
  return 0;
}

int cmd_limit_group(const Common& c, const std::string& I_text, const std::string& desc_path,
                    const std::string& probe_path, bool do_sample, BallSpec ball) {
  const Tolerances tol = c.tolerances();
  const GroupModel model = GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const int d = model.dim();
  LimitGroupDescriptor desc{parse_subset(rs, I_text), Mat::Identity(d, d), Mat::Identity(d, d)};
  if (!desc_path.empty()) desc = descriptor_from_json(read_json_file(desc_path), rs);
  const StructuredSubgroup sg = build_limit_group(rs, desc, tol);
  const std::uint64_t seed = effective_seed(c);
  Json config = base_config("limit-group", c, seed);
  config["descriptor"] = descriptor_to_json(desc, rs);
  Json j = envelope(model, config, "limit-group-structure");
  j["descriptor"] = descriptor_to_json(desc, rs);
  j["nilradical_dimension"] = sg.sd.n_I_basis.size();
  j["compact_levi_dimension"] = sg.sd.k_I_basis.size();
  j["M_order"] = sg.sd.M_elements.size();
  if (!probe_path.empty()) {
    const Mat g = mat_from_json(read_json_file(probe_path));
    if (g.rows() != d) throw Error(ErrorKind::ModelMismatch, "probe size does not match the model");
    j["probe"] = {{"member", member(g, sg, rs, tol.membership_tol)},
                  {"distance_upper_bound", distance_to_group(g, sg, rs, tol)},
                  {"distal", is_distal(g, rs, tol.spectrum_tol)}};
  }
  if (do_sample) {
    const SampledSubgroup s = sample(rs, desc, ball, seed);
    j["sample"] = {{"points", s.size()}, {"coverage_estimate", s.coverage_estimate}};
  }
  emit_json(c, j);
  return 0;
}

std::vector<Mat> sequence_from_json(const Json& spec, const GroupModel& model) {
  const int d = model.dim();
  const std::string type = spec.value("type", "explicit");
  std::vector<Mat> seq;
  if (type == "explicit") {
    for (const Json& t : spec.at("terms")) seq.push_back(mat_from_json(t));
  } else if (type == "constant") {
    const Mat g = spec.contains("g") ? mat_from_json(spec["g"]) : Mat::Identity(d, d);
    seq.assign(spec.value("horizon", 32), g);
  } else if (type == "exp_line") {
    const Mat k = spec.contains("k") ? mat_from_json(spec["k"]) : Mat::Identity(d, d);
    const Mat H0 = spec.contains("H0") ? diag_from_json(spec["H0"], d) : Mat::Zero(d, d);
    const Mat H = diag_from_json(spec.at("H"), d);
    const int horizon = spec.value("horizon", 32);
    for (int n = 1; n <= horizon; ++n) seq.push_back(k * mat_exp(H0 + n * H));
  } else {
    throw InputError("unknown sequence type '" + type + "'");
  }
  for (const Mat& g : seq)
    if (g.rows() != d || g.cols() != d) throw Error(ErrorKind::ModelMismatch, "sequence term has the wrong size");
  return seq;
}

int cmd_classify(const Common& c, const std::string& path) {
  const Tolerances tol = c.tolerances();
  const Json spec = read_json_file(path);
  const GroupModel model = spec.contains("model") ? model_from_json(spec["model"]) : GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const std::vector<Mat> seq = sequence_from_json(spec, model);
  Json config = base_config("classify", c, effective_seed(c));
  config["sequence"] = spec;
  Json j = envelope(model, config, "classification");
  const Classification cl = classify_sequence(seq, rs, tol);
  j["result"] = cl.interior ? "interior" : "boundary";
  if (!cl.interior) j["descriptor"] = descriptor_to_json(cl.desc, rs);
  j["residual"] = cl.residual;
  j["converged"] = cl.converged;
  if (!cl.diagnostic.empty()) j["diagnostic"] = cl.diagnostic;
  emit_json(c, j);
  return cl.converged ? 0 : 1;
}

int cmd_converge(const Common& c, const std::string& I_text, const std::string& seq_text, int horizon,
                 BallSpec ball, double threshold) {
  const Tolerances tol = c.tolerances();
  const GroupModel model = GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const Subset I = parse_subset(rs, I_text);
  if (seq_text.rfind("geometric:", 0) != 0) throw InputError("sequence must look like geometric:RATIO");
  double ratio = 0;
  try {
    ratio = std::stod(seq_text.substr(10));
  } catch (const std::exception&) {
    throw InputError("bad ratio in '" + seq_text + "'");
  }
  const std::uint64_t seed = effective_seed(c);
  const auto a_seq = geometric_sequence(rs, I, ratio, horizon);
  const ConvergenceResult res = convergence_experiment(rs, I, a_seq, ball, seed, tol);
  const int from = std::min(4, horizon);
  const bool decreasing = eventually_decreasing(res.table, from);
  const double final_distance = res.table.back().distance;
  const bool pass = decreasing && final_distance < threshold;

  Json config = base_config("converge", c, seed);
  config["I"] = subset_label(rs, I);
  config["sequence"] = seq_text;
  config["horizon"] = horizon;
  config["ball"] = {{"R", ball.R}, {"mesh", ball.mesh}, {"max_points", ball.max_points}};
  config["threshold"] = threshold;
  Json verdict = envelope(model, config, "limit-convergence");
  verdict["limit_points"] = res.limit.size();
  verdict["limit_coverage_estimate"] = res.limit.coverage_estimate;
  verdict["decreasing_from"] = from;
  verdict["decreasing"] = decreasing;
  verdict["final_distance"] = final_distance;
  verdict["passed"] = pass;
  std::ostringstream out;
  if (c.format == "csv") {
    out << "n,distance\n";
    out.precision(17);
    for (const auto& r : res.table) out << r.n << "," << r.distance << "\n";
    out << "# verdict " << verdict.dump() << "\n";
  } else {
    Json table = Json::array();
    for (const auto& r : res.table) table.push_back({{"n", r.n}, {"distance", r.distance}});
    verdict["table"] = table;
    out << verdict.dump(2) << "\n";
  }
  emit(c, out.str());
  return pass ? 0 : 1;
}

int cmd_poly_corner(const Common& c, const std::string& I_text, const std::string& H_text) {
  const Tolerances tol = c.tolerances();
  const GroupModel model = GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const Subset I = I_text.empty() ? full_subset(rs) : parse_subset(rs, I_text);
  const PolyhedralPoint p = make_point(I, parse_diagonal(H_text, model.dim()), rs);
  Json config = base_config("polyhedral corner", c, effective_seed(c));
  config["I"] = subset_label(rs, I);
  config["H"] = H_text;
  Json j = envelope(model, config, "corner-chart");
  j["point"] = point_to_json(p, rs);
  Json coords = Json::array();
  for (const auto& x : corner_coords(p, rs, tol.membership_tol)) coords.push_back(extended_to_json(x));
  j["coordinates"] = coords;
  const Facet f = facet_of_vector(p.rep, rs, tol.membership_tol);
  j["facet"] = {{"zero", f.sigma_zero.size()}, {"plus", f.sigma_plus.size()}, {"minus", f.sigma_minus.size()}};
  emit_json(c, j);
  return 0;
}

int cmd_poly_phi(const Common& c, const std::string& g_path, const std::string& I_text, const std::string& H_text) {
  const Tolerances tol = c.tolerances();
  const GroupModel model = GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const int d = model.dim();
  const Mat g = g_path.empty() ? Mat::Identity(d, d) : mat_from_json(read_json_file(g_path));
  if (g.rows() != d) throw Error(ErrorKind::ModelMismatch, "g size does not match the model");
  const Subset I = I_text.empty() ? full_subset(rs) : parse_subset(rs, I_text);
  const Mat H = H_text.empty() ? Mat::Zero(d, d) : parse_diagonal(H_text, d);
  const PolyhedralPoint p = make_point(I, H, rs);
  Json config = base_config("polyhedral phi", c, effective_seed(c));
  config["g"] = mat_to_json(g);
  config["I"] = subset_label(rs, I);
  config["H"] = H_text;
  Json j = envelope(model, config, "compactification-map");
  double residual = 0;
  const LimitGroupDescriptor desc = phi({g, p}, rs, tol, &residual);
  j["point"] = point_to_json(p, rs);
  j["descriptor"] = descriptor_to_json(desc, rs);
  j["interior"] = static_cast<int>(I.size()) == rs.rank();
  j["canonicalization_residual"] = residual;
  emit_json(c, j);
  return 0;
}

int cmd_poly_continuity(const Common& c, const std::string& path, BallSpec ball, double threshold) {
  const Tolerances tol = c.tolerances();
  const Json spec = read_json_file(path);
  const GroupModel model = spec.contains("model") ? model_from_json(spec["model"]) : GroupModel::parse(c.model);
  const RootSystem rs = build_root_system(model);
  const int d = model.dim();
  if (spec.contains("ball")) {
    ball.R = spec["ball"].value("R", ball.R);
    ball.mesh = spec["ball"].value("mesh", ball.mesh);
    ball.max_points = spec["ball"].value("max_points", ball.max_points);
  }
  std::vector<PolyhedralPoint> seq;
  const std::string type = spec.value("type", "points");
  if (type == "points") {
    for (const Json& p : spec.at("points")) {
      const Subset I = parse_subset(rs, p.value("I", "all"));
      seq.push_back(make_point(I, diag_from_json(p.at("H"), d), rs));
    }
  } else if (type == "linear") {
    const Subset I = parse_subset(rs, spec.value("I", "all"));
    const Mat H0 = spec.contains("H0") ? diag_from_json(spec["H0"], d) : Mat::Zero(d, d);
    const Mat H = diag_from_json(spec.at("H"), d);
    for (int n = 1; n <= spec.value("horizon", 12); ++n) seq.push_back(make_point(I, H0 + n * H, rs));
  } else {
    throw InputError("unknown polyhedral sequence type '" + type + "'");
  }
  const std::uint64_t seed = effective_seed(c);
  const ContinuityResult res = continuity_experiment_f(rs, seq, ball, seed, tol);
  const bool pass = res.table.back().distance < threshold;
  Json config = base_config("polyhedral continuity", c, seed);
  config["spec"] = spec;
  config["threshold"] = threshold;
  Json j = envelope(model, config, "f-continuity");
  j["limit"] = point_to_json(res.limit, rs);
  j["final_distance"] = res.table.back().distance;
  j["passed"] = pass;
  if (c.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << "n,distance\n";
    for (const auto& r : res.table) out << r.n << "," << r.distance << "\n";
    out << "# verdict " << j.dump() << "\n";
    emit(c, out.str());
  } else {
    Json table = Json::array();
    for (const auto& r : res.table) table.push_back({{"n", r.n}, {"distance", r.distance}});
    j["table"] = table;
    emit_json(c, j);
  }
  return pass ? 0 : 1;
}

void add_ball(CLI::App* app, BallSpec& ball) {
  app->add_option("--ball", ball.R, "ball radius around the identity");
  app->add_option("--mesh", ball.mesh, "target net resolution");
  app->add_option("--max-points", ball.max_points, "sample size cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed subgroups of SL(n,R) and SO0(p,p): decompositions, limit groups and compactification experiments"};
  app.require_subcommand(1);
  Common c;
  BallSpec ball;
  double threshold = 0.5;

  auto* roots = app.add_subcommand("roots", "root system tables");
  add_common(roots, c);

  auto* verify = app.add_subcommand("verify", "invariant suites of every module");
  std::vector<std::string> models{"sl:2", "sl:3", "sl:4", "sopp:2"};
  int trials = 50;
  add_common(verify, c, false);
  verify->add_option("--model", models, "models to verify (repeatable)");
  verify->add_option("--trials", trials, "randomized draws per check")->check(CLI::PositiveNumber);

  auto* decompose = app.add_subcommand("decompose", "Iwasawa, polar or Cartan factors of a group element");
  std::string kind = "iwasawa", input;
  add_common(decompose, c);
  decompose->add_option("--factorization", kind)->check(CLI::IsMember({"iwasawa", "opposite-iwasawa", "polar", "cartan"}));
  decompose->add_option("--input", input, "JSON matrix or {\"model\", \"g\"}")->required();

  auto* limit = app.add_subcommand("limit-group", "structure, membership and sampling of a limit group");
  std::string I_text = "none", desc_path, probe_path;
  bool do_sample = false;
  add_common(limit, c);
  limit->add_option("--I", I_text, "comma separated base roots, none or all");
  limit->add_option("--descriptor", desc_path, "JSON descriptor {I, a, k}");
  limit->add_option("--probe", probe_path, "JSON matrix to test for membership");
  limit->add_flag("--sample", do_sample, "report the size of a sample in the ball");
  add_ball(limit, ball);

  auto* classify = app.add_subcommand("classify", "limit of g_n K g_n^-1 from a sequence");
  std::string seq_path;
  add_common(classify, c);
  classify->add_option("--sequence", seq_path, "JSON sequence spec")->required();

  auto* converge = app.add_subcommand("converge", "distances from a_n K a_n^-1 to the limit group");
  std::string seq_text = "geometric:2";
  int horizon = 12;
  add_common(converge, c);
  converge->add_option("--I", I_text, "proper subset of the base");
  converge->add_option("--sequence", seq_text, "geometric:RATIO");
  converge->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  converge->add_option("--threshold", threshold, "acceptance bound on the final distance");
  add_ball(converge, ball);

  auto* poly = app.add_subcommand("polyhedral", "corner charts and the compactification map");
  poly->require_subcommand(1);
  auto* corner = poly->add_subcommand("corner", "corner coordinates of a polyhedral point");
  std::string H_text, g_path, spec_path, poly_I;
  add_common(corner, c);
  corner->add_option("--I", poly_I, "facet subset (default: all)");
  corner->add_option("--H", H_text, "comma separated diagonal of H")->required();
  auto* phi_cmd = poly->add_subcommand("phi", "descriptor of g exp(H) D^I exp(-H) g^-1");
  add_common(phi_cmd, c);
  phi_cmd->add_option("--g", g_path, "JSON matrix (default identity)");
  phi_cmd->add_option("--I", poly_I, "facet subset (default: all)");
  phi_cmd->add_option("--H", H_text, "comma separated diagonal of H");
  auto* cont = poly->add_subcommand("continuity", "distances from f(H_n) to f(lim H_n)");
  add_common(cont, c);
  cont->add_option("--spec", spec_path, "JSON sequence spec")->required();
  cont->add_option("--threshold", threshold, "acceptance bound on the final distance");
  add_ball(cont, ball);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*roots) return cmd_roots(c);
    if (*verify) return cmd_verify(c, models, trials);
    if (*decompose) return cmd_decompose(c, kind, input);
    if (*limit) return cmd_limit_group(c, I_text, desc_path, probe_path, do_sample, ball);
    if (*classify) return cmd_classify(c, seq_path);
    if (*converge) return cmd_converge(c, I_text, seq_text, horizon, ball, threshold);
    if (*corner) return cmd_poly_corner(c, poly_I, H_text);
    if (*phi_cmd) return cmd_poly_phi(c, g_path, poly_I, H_text);
    if (*cont) return cmd_poly_continuity(c, spec_path, ball, threshold);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Numerical ? 1 : 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
