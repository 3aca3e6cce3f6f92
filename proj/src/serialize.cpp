#include "chabauty/serialize.hpp"

#include <cstdio>

namespace chabauty {

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Validation, "matrix must be a nonempty array of rows");
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = static_cast<Eigen::Index>(j.at(0).size());
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = j.at(static_cast<size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw Error(ErrorKind::Validation, "matrix rows have unequal lengths");
    for (Eigen::Index k = 0; k < c; ++k) {
      if (!row.at(static_cast<size_t>(k)).is_number()) throw Error(ErrorKind::Validation, "matrix entry is not a number");
      m(i, k) = row.at(static_cast<size_t>(k)).get<double>();
    }
  }
  return m;
}

Json model_to_json(const GroupModel& model) {
  Json j;
  if (model.family() == Family::SpecialLinear) {
    j["family"] = "sl";
    j["n"] = model.param();
  } else {
    j["family"] = "sopp";
    j["p"] = model.param();
  }
  return j;
}

GroupModel model_from_json(const Json& j) {
  if (j.is_string()) return GroupModel::parse(j.get<std::string>());
  const std::string fam = j.value("family", "");
  if (fam == "sl") return GroupModel::special_linear(j.at("n").get<int>());
  if (fam == "sopp") return GroupModel::split_orthogonal(j.at("p").get<int>());
  throw Error(ErrorKind::Validation, "unknown model family '" + fam + "'");
}

Json descriptor_to_json(const LimitGroupDescriptor& d, const RootSystem& rs) {
  Json I = Json::array();
  for (int b : d.I) {
    Json v = Json::array();
    for (int k = 0; k < rs.rank(); ++k) v.push_back(k == b ? 1 : 0);
    I.push_back(std::move(v));
  }
  Json j;
  j["I"] = std::move(I);
  j["I_label"] = subset_label(rs, d.I);
  j["a"] = mat_to_json(d.a);
  j["k"] = mat_to_json(d.k);
  return j;
}

LimitGroupDescriptor descriptor_from_json(const Json& j, const RootSystem& rs) {
  LimitGroupDescriptor d;
  const int dim = rs.model.dim();
  for (const Json& e : j.at("I")) {
    if (e.is_string()) {
      const Subset s = parse_subset(rs, e.get<std::string>());
      d.I.insert(d.I.end(), s.begin(), s.end());
      continue;
    }
    Eigen::VectorXi v(rs.rank());
    if (static_cast<int>(e.size()) != rs.rank()) throw Error(ErrorKind::Validation, "root coordinates have the wrong length");
    for (int k = 0; k < rs.rank(); ++k) v(k) = e.at(static_cast<size_t>(k)).get<int>();
    int pos = -1;
    for (int k = 0; k < rs.rank(); ++k)
      if (v(k) != 0) pos = (pos == -1 && v(k) == 1) ? k : -2;
    if (pos < 0) throw Error(ErrorKind::Validation, "entries of I must be base roots");
    d.I.push_back(pos);
  }
  std::sort(d.I.begin(), d.I.end());
  d.I.erase(std::unique(d.I.begin(), d.I.end()), d.I.end());
  d.a = j.contains("a") ? mat_from_json(j.at("a")) : Mat::Identity(dim, dim);
  d.k = j.contains("k") ? mat_from_json(j.at("k")) : Mat::Identity(dim, dim);
  if (d.a.rows() != dim || d.k.rows() != dim) throw Error(ErrorKind::ModelMismatch, "descriptor size does not match the model");
  return d;
}

Json extended_to_json(const ExtendedReal& x) {
  if (x.infinite) return "+inf";
  return x.value;
}

Json point_to_json(const PolyhedralPoint& p, const RootSystem& rs) {
  Json j;
  j["I"] = subset_label(rs, p.I);
  j["rep"] = mat_to_json(p.rep);
  return j;
}

Json sample_to_json(const SampledSubgroup& s) {
  Json j;
  j["source"] = s.source;
  j["ball"] = {{"R", s.ball.R}, {"mesh", s.ball.mesh}, {"max_points", s.ball.max_points}};
  j["coverage_estimate"] = s.coverage_estimate;
  Json pts = Json::array();
  for (size_t i = 0; i < s.size(); ++i) pts.push_back({{"key", s.keys[i]}, {"g", mat_to_json(s.points[i])}});
  j["points"] = std::move(pts);
  return j;
}

SampledSubgroup sample_from_json(const Json& j) {
  BallSpec ball;
  ball.R = j.at("ball").at("R").get<double>();
  ball.mesh = j.at("ball").at("mesh").get<double>();
  ball.max_points = j.at("ball").at("max_points").get<int>();
  std::vector<Mat> pts;
  std::vector<std::uint64_t> keys;
  for (const Json& p : j.at("points")) {
    pts.push_back(mat_from_json(p.at("g")));
    keys.push_back(p.at("key").get<std::uint64_t>());
  }
  SampledSubgroup s = from_points(pts, ball, j.value("source", "fixture"));
  if (s.size() == keys.size()) s.keys = keys;
  s.coverage_estimate = j.value("coverage_estimate", 0.0);
  return s;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json envelope(const GroupModel& model, const Json& config, const std::string& citation) {
  Json j;
  j["schema"] = kSchema;
  j["version"] = kVersion;
  j["model"] = model_to_json(model);
  j["config_hash"] = config_hash(config);
  j["citation"] = citation;
  return j;
}

}  // namespace chabauty
