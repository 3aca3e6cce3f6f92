#pragma once

#include "chabauty/polyhedral.hpp"

#include <json.hpp>

#include <string>

namespace chabauty {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "chabauty-lab/1";
inline constexpr const char* kVersion = "0.1.0";

/// Row-major nested arrays.
Json mat_to_json(const Mat& m);
Mat mat_from_json(const Json& j);

/// {"family": "sl", "n": N} or {"family": "sopp", "p": P}.
Json model_to_json(const GroupModel& model);
GroupModel model_from_json(const Json& j);

/// "I" lists each base root as its coordinate vector over the base.
Json descriptor_to_json(const LimitGroupDescriptor& d, const RootSystem& rs);
/// Accepts coordinate vectors or base root names in "I".
LimitGroupDescriptor descriptor_from_json(const Json& j, const RootSystem& rs);

Json extended_to_json(const ExtendedReal& x);
Json point_to_json(const PolyhedralPoint& p, const RootSystem& rs);

Json sample_to_json(const SampledSubgroup& s);
SampledSubgroup sample_from_json(const Json& j);

/// FNV-1a over the compact dump, as 16 hex digits.
std::string config_hash(const Json& config);

/// Report header: schema, tool version, model, config hash and the citation tag of the experiment.
Json envelope(const GroupModel& model, const Json& config, const std::string& citation);

}  // namespace chabauty
