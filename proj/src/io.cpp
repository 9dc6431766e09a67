#include "ectaks/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ectaks::io {

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedFile, why); }

std::string dec(u64 v) { return std::to_string(v); }

u64 parse_dec(const Json& j, const char* field) {
  if (!j.is_string()) malformed(std::string(field) + " must be a decimal string");
  const auto& s = j.get_ref<const std::string&>();
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    malformed(std::string(field) + " is not a decimal integer: '" + s + "'");
  }
  return v;
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) malformed(std::string("missing field '") + name + "'");
  return j.at(name);
}

NodeId parse_id(const std::string& s) {
  NodeId v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) malformed("bad node id '" + s + "'");
  return v;
}

Json vector_json(const FieldVector& v) {
  Json out = Json::array();
  for (u64 c : v.coords()) out.push_back(dec(c));
  return out;
}

FieldVector vector_from_json(const Json& j, u64 p, const char* name) {
  if (!j.is_array() || j.size() != 2) malformed(std::string(name) + " must be a pair of decimal strings");
  return FieldVector(p, {parse_dec(j[0], name), parse_dec(j[1], name)});
}

Json points_json(const PointVector& v) {
  Json out = Json::array();
  for (const auto& pt : v.points()) out.push_back(to_json(pt));
  return out;
}

PointVector points_from_json(const Json& j) {
  if (!j.is_array()) malformed("topology vector must be an array of points");
  std::vector<CurvePoint> pts;
  for (const auto& e : j) pts.push_back(point_from_json(e));
  return PointVector(std::move(pts));
}

Json public_json(const PublicComponent& pub) {
  Json out = Json::object();
  for (const auto& [j, v] : pub) out[std::to_string(j)] = points_json(v);
  return out;
}

}  // namespace

Json to_json(const CurveParams& curve) {
  return Json{{"q", dec(curve.q)},       {"a", dec(curve.a)},       {"b", dec(curve.b)},
              {"gx", dec(curve.g.x)},    {"gy", dec(curve.g.y)},    {"p", dec(curve.p)}};
}

CurveParams curve_from_json(const Json& j) {
  CurveParams c;
  c.q = parse_dec(field(j, "q"), "q");
  c.a = parse_dec(field(j, "a"), "a");
  c.b = parse_dec(field(j, "b"), "b");
  c.g = CurvePoint::affine(parse_dec(field(j, "gx"), "gx"), parse_dec(field(j, "gy"), "gy"));
  c.p = parse_dec(field(j, "p"), "p");
  validate(c);
  return c;
}

Json to_json(const Ant& g, const std::optional<std::vector<NodeId>>& roots) {
  Json edges = Json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back(Json::array({i, j}));
  Json out{{"n", g.n}, {"edges", edges}};
  if (roots) out["roots"] = *roots;
  return out;
}

TopologyFile topology_from_json(const Json& j) {
  TopologyFile file;
  const Json& n = field(j, "n");
  if (!n.is_number_unsigned()) malformed("n must be a non-negative integer");
  std::vector<std::pair<NodeId, NodeId>> edges;
  const Json& e = field(j, "edges");
  if (!e.is_array()) malformed("edges must be an array");
  for (const auto& pair : e) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
      malformed("each edge must be a pair of node ids");
    }
    edges.emplace_back(pair[0].get<NodeId>(), pair[1].get<NodeId>());
  }
  file.ant = Ant::from_edges(n.get<NodeId>(), edges);
  if (j.contains("roots")) file.roots = j.at("roots").get<std::vector<NodeId>>();
  validate_ant(file.ant);
  return file;
}

Json to_json(const CurvePoint& pt) {
  if (pt.is_identity()) return "inf";
  return Json{{"x", dec(pt.x)}, {"y", dec(pt.y)}};
}

CurvePoint point_from_json(const Json& j) {
  if (j.is_string() && j.get_ref<const std::string&>() == "inf") return CurvePoint::identity();
  return CurvePoint::affine(parse_dec(field(j, "x"), "x"), parse_dec(field(j, "y"), "y"));
}

Json to_json(const Lcd& lcd) {
  return Json{{"node", lcd.node},
              {"k", vector_json(lcd.secret.k)},
              {"t", vector_json(lcd.secret.t)},
              {"public", public_json(lcd.pub)}};
}

Lcd lcd_from_json(const Json& j, u64 p) {
  Lcd lcd;
  const Json& node = field(j, "node");
  if (!node.is_number_unsigned()) malformed("node must be an id");
  lcd.node = node.get<NodeId>();
  lcd.secret.k = vector_from_json(field(j, "k"), p, "k");
  lcd.secret.t = vector_from_json(field(j, "t"), p, "t");
  const Json& pub = field(j, "public");
  if (!pub.is_object()) malformed("public must be an object");
  for (const auto& [key, value] : pub.items()) lcd.pub.emplace(parse_id(key), points_from_json(value));
  return lcd;
}

Json node_file_json(const CurveParams& curve, const Lcd& lcd) {
  Json out{{"sensitive", true}, {"curve", to_json(curve)}};
  const Json body = to_json(lcd);
  for (const auto& [key, value] : body.items()) out[key] = value;
  return out;
}

NodeFile node_file_from_json(const Json& j) {
  NodeFile file;
  file.curve = curve_from_json(field(j, "curve"));
  file.lcd = lcd_from_json(j, file.curve.p);
  for (const auto& [peer, v] : file.lcd.pub) {
    for (const auto& pt : v.points()) {
      if (!on_curve(file.curve, pt)) malformed("topology vector for peer " + std::to_string(peer) + " is off the curve");
    }
  }
  return file;
}

Json public_directory_json(const std::map<NodeId, PublicComponent>& dir) {
  Json out = Json::object();
  for (const auto& [i, pub] : dir) out[std::to_string(i)] = public_json(pub);
  return out;
}

Json to_json(const CaState& state) {
  Json lcds = Json::object();
  for (const auto& [i, lcd] : state.lcds) lcds[std::to_string(i)] = to_json(lcd);
  Json secrets = Json::object();
  for (const auto& [arrow, m] : state.ca_secrets) {
    secrets[std::to_string(arrow.first) + "-" + std::to_string(arrow.second)] = vector_json(m);
  }
  Json clusters = Json::array();
  for (const auto& c : state.clusters) {
    clusters.push_back(Json{{"master", c.master}, {"members", c.members}, {"gamma", dec(c.gamma)}});
  }
  Json replacements = Json::object();
  for (const auto& [i, count] : state.replacements) replacements[std::to_string(i)] = count;
  const double ratio = state.topology.n == 0 ? 0.0 : static_cast<double>(state.curve.p) / state.topology.n;
  return Json{{"sensitive", true},
              {"curve", to_json(state.curve)},
              {"topology", to_json(state.topology)},
              {"p_over_n", ratio},
              {"lcds", lcds},
              {"ca_secrets", secrets},
              {"clusters", clusters},
              {"replacements", replacements}};
}

CaState state_from_json(const Json& j) {
  CaState state;
  state.curve = curve_from_json(field(j, "curve"));
  state.topology = topology_from_json(field(j, "topology")).ant;
  const u64 p = state.curve.p;
  for (const auto& [key, value] : field(j, "lcds").items()) state.lcds.emplace(parse_id(key), lcd_from_json(value, p));
  for (const auto& [key, value] : field(j, "ca_secrets").items()) {
    const auto dash = key.find('-');
    if (dash == std::string::npos) malformed("bad arrow key '" + key + "'");
    state.ca_secrets.emplace(Arrow{parse_id(key.substr(0, dash)), parse_id(key.substr(dash + 1))},
                             vector_from_json(value, p, "ca_secrets"));
  }
  if (j.contains("clusters")) {
    for (const auto& c : j.at("clusters")) {
      state.clusters.push_back(
          {field(c, "master").get<NodeId>(), field(c, "members").get<std::set<NodeId>>(), parse_dec(field(c, "gamma"), "gamma")});
    }
  }
  if (j.contains("replacements")) {
    for (const auto& [key, value] : j.at("replacements").items()) state.replacements[parse_id(key)] = value.get<unsigned>();
  }
  return state;
}

Json to_json(const SpEstimate& est) {
  return Json{{"p", est.p},           {"trials", est.trials},   {"successes", est.successes},
              {"estimate", est.estimate}, {"stddev", est.stddev}, {"ci99", Json::array({est.ci_low, est.ci_high})}};
}

Json to_json(const SpCensus& c) {
  Json ranks = Json::object();
  for (std::size_t r = 0; r < c.rank_histogram.size(); ++r) {
    if (c.rank_histogram[r] != 0) ranks[std::to_string(r)] = c.rank_histogram[r];
  }
  return Json{{"p", c.p},
              {"assignment_outcomes", c.tuples},
              {"invertible_outcomes", c.invertible_tuples},
              {"success_fraction", std::to_string(c.fraction_num) + "/" + std::to_string(c.fraction_den)},
              {"success_fraction_value", c.fraction()},
              {"rank_histogram", ranks},
              {"admissible_matrices", c.admissible_matrices},
              {"invertible_admissible_matrices", c.invertible_admissible_matrices},
              {"formula_invertible_count", c.formula_ip},
              {"formula_matches_census", c.formula_ip == c.invertible_admissible_matrices},
              {"formula_lower_bound", static_cast<double>(c.formula_ip) / static_cast<double>(c.p12)},
              {"fraction_exceeds_lower_bound", c.exceeds_formula_bound()}};
}

Json to_json(const RecoveryReport& r) {
  Json matrix = Json::array();
  for (Eigen::Index i = 0; i < r.system.a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < r.system.a.cols(); ++k) row.push_back(r.system.a(i, k));
    matrix.push_back(row);
  }
  Json rhs = Json::array();
  for (Eigen::Index i = 0; i < r.system.b.size(); ++i) rhs.push_back(r.system.b(i));
  Json out{{"target", r.system.target},
           {"compromised", r.system.compromised},
           {"p", r.system.p},
           {"matrix", matrix},
           {"rhs", rhs},
           {"rank", r.solution.rank},
           {"outcome", r.solution.unique() ? "unique" : "ambiguous"},
           {"solution_space_size", static_cast<double>(r.solution.size())},
           {"truth_in_solution_space", r.truth_in_space},
           {"exact_match", r.exact_match},
           {"candidate", Json{{"k", vector_json(r.candidate.k)}, {"t", vector_json(r.candidate.t)}}},
           {"candidate_is_truth", r.candidate_is_truth},
           {"candidate_authenticated", r.candidate_authenticated}};
  if (r.det) out["det"] = *r.det;
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    malformed(path.string() + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path.string());
  out << dump(j);
}

}  // namespace ectaks::io
