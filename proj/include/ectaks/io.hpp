#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ectaks/attack.hpp"
#include "ectaks/authority.hpp"
#include "ectaks/curve.hpp"
#include "ectaks/topology.hpp"

namespace ectaks::io {

using Json = nlohmann::ordered_json;

Json to_json(const CurveParams& curve);
CurveParams curve_from_json(const Json& j);  // validates

struct TopologyFile {
  Ant ant;
  std::optional<std::vector<NodeId>> roots;
};
Json to_json(const Ant& g, const std::optional<std::vector<NodeId>>& roots = std::nullopt);
TopologyFile topology_from_json(const Json& j);  // validates

Json to_json(const CurvePoint& pt);
CurvePoint point_from_json(const Json& j);

Json to_json(const Lcd& lcd);
Lcd lcd_from_json(const Json& j, u64 p);

// What a device holds: the curve plus its own LCD.
struct NodeFile {
  CurveParams curve;
  Lcd lcd;
};
Json node_file_json(const CurveParams& curve, const Lcd& lcd);
NodeFile node_file_from_json(const Json& j);

Json public_directory_json(const std::map<NodeId, PublicComponent>& dir);

// Carries ca_secrets; the file is flagged "sensitive".
Json to_json(const CaState& state);
CaState state_from_json(const Json& j);

Json to_json(const SpEstimate& est);
Json to_json(const SpCensus& census);
Json to_json(const RecoveryReport& report);

Json read_json(const std::filesystem::path& path);
// Pretty-printed, newline-terminated; byte-stable for equal input.
void write_json(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

}  // namespace ectaks::io
