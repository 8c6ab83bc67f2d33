#include "galaxy/code_file.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace galaxy {

using json = nlohmann::ordered_json;

std::string hexfloat(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hexfloat(const std::string& s) {
  if (s.empty()) throw FormatError("empty number string");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw FormatError("bad number string '" + s + "'");
  }
  return x;
}

namespace {

json point_json(const Point& p) {
  json a = json::array();
  for (double x : p.coords()) a.push_back(hexfloat(x));
  return a;
}

Point point_from(const json& j, std::size_t n) {
  if (!j.is_array()) throw FormatError("point must be an array");
  if (j.size() != n) throw FormatError("point has wrong dimension");
  std::vector<double> c;
  c.reserve(n);
  for (const auto& x : j) c.push_back(parse_hexfloat(x.get<std::string>()));
  return Point(std::move(c));
}

json node_json(const GalaxyNode& node) {
  json j;
  j["depth"] = node.depth;
  j["center"] = point_json(node.code.center);
  j["radius"] = hexfloat(node.code.radius);
  j["theta"] = hexfloat(node.code.theta);
  j["seed"] = node.code.seed;
  j["saturated"] = node.code.saturated;
  json pts = json::array();
  for (const auto& p : node.code.points) pts.push_back(point_json(p));
  j["points"] = std::move(pts);
  json kids = json::array();
  for (const auto& c : node.children) kids.push_back(node_json(c));
  j["children"] = std::move(kids);
  return j;
}

GalaxyNode node_from(const json& j, std::size_t n) {
  GalaxyNode node;
  node.depth = j.at("depth").get<std::size_t>();
  node.code.center = point_from(j.at("center"), n);
  node.code.radius = parse_hexfloat(j.at("radius").get<std::string>());
  node.code.theta = parse_hexfloat(j.at("theta").get<std::string>());
  node.code.seed = j.at("seed").get<std::uint64_t>();
  node.code.saturated = j.at("saturated").get<bool>();
  for (const auto& p : j.at("points")) node.code.points.push_back(point_from(p, n));
  for (const auto& c : j.at("children")) node.children.push_back(node_from(c, n));
  if (node.depth == 0) throw FormatError("node depth must be >= 1");
  if (node.depth > 1 && node.children.size() != node.code.points.size()) {
    throw FormatError("inner node needs one child per point");
  }
  if (node.depth == 1 && !node.children.empty()) throw FormatError("leaf node has children");
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (node.children[i].depth + 1 != node.depth) throw FormatError("child depth mismatch");
    if (!(node.children[i].code.center == node.code.points[i])) {
      throw FormatError("child center differs from its parent point");
    }
  }
  return node;
}

json params_json(const GalaxyParams& p) {
  json j;
  j["n"] = p.n;
  j["power"] = hexfloat(p.power);
  j["b"] = hexfloat(p.b);
  j["k"] = p.k;
  j["theta"] = hexfloat(p.theta);
  j["m_per_level"] = p.m_per_level;
  j["r"] = hexfloat(p.r);
  j["r_min_override"] = p.r_min_override;
  j["r_min_factor"] = hexfloat(p.r_min_factor);
  j["t_bar"] = p.t_bar;
  j["t_bar_override"] = p.t_bar_override;
  j["sigma"] = hexfloat(p.sigma);
  j["master_seed"] = p.master_seed;
  j["saturation_probes"] = p.saturation_probes;
  j["max_centers"] = p.max_centers;
  j["max_attempts"] = p.max_attempts;
  j["center_spacing"] = hexfloat(p.center_spacing);
  return j;
}

double hex_at(const json& j, const char* key) {
  return parse_hexfloat(j.at(key).get<std::string>());
}

GalaxyParams params_from(const json& j) {
  GalaxyParams p;
  p.n = j.at("n").get<std::size_t>();
  p.power = hex_at(j, "power");
  p.b = hex_at(j, "b");
  p.k = j.at("k").get<std::uint32_t>();
  p.theta = hex_at(j, "theta");
  p.m_per_level = j.at("m_per_level").get<std::size_t>();
  p.r = hex_at(j, "r");
  p.r_min_override = j.at("r_min_override").get<bool>();
  p.r_min_factor = hex_at(j, "r_min_factor");
  p.t_bar = j.at("t_bar").get<std::size_t>();
  p.t_bar_override = j.at("t_bar_override").get<bool>();
  p.sigma = hex_at(j, "sigma");
  p.master_seed = j.at("master_seed").get<std::uint64_t>();
  p.saturation_probes = j.at("saturation_probes").get<std::size_t>();
  p.max_centers = j.at("max_centers").get<std::size_t>();
  p.max_attempts = j.at("max_attempts").get<std::size_t>();
  p.center_spacing = hex_at(j, "center_spacing");
  return p;
}

}  // namespace

std::string serialize_code(const GalaxyCode& code) {
  json j;
  j["format_version"] = kCodeFormatVersion;
  j["params"] = params_json(code.params);
  j["codewords"] = code.codewords.size();
  j["centers_saturated"] = code.centers_saturated;
  j["centers_capped"] = code.centers_capped;
  j["degraded"] = code.degraded();
  json trees = json::array();
  for (const auto& t : code.trees) {
    json tj;
    tj["root_index"] = t.root_index;
    tj["leaves"] = t.leaf_count();
    tj["degraded"] = t.degraded;
    tj["top"] = node_json(t.top);
    trees.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

GalaxyCode parse_code(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("code file is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCodeFormatVersion) {
      throw FormatError("unsupported format_version " + std::to_string(version));
    }
    GalaxyCode code;
    code.params = params_from(j.at("params"));
    code.params.validate();
    code.centers_saturated = j.at("centers_saturated").get<bool>();
    code.centers_capped = j.at("centers_capped").get<bool>();
    const std::size_t n = code.params.n;
    for (const auto& tj : j.at("trees")) {
      GalaxyTree t;
      t.root_index = tj.at("root_index").get<std::size_t>();
      t.degraded = tj.at("degraded").get<bool>();
      t.top = node_from(tj.at("top"), n);
      t.root = t.top.code.center;
      if (t.root_index != code.trees.size()) throw FormatError("trees out of order");
      if (t.top.depth != code.params.t_bar) throw FormatError("tree depth differs from t_bar");
      code.roots.push_back(t.root);
      code.trees.push_back(std::move(t));
    }
    reflatten(code);
    if (code.codewords.size() != j.at("codewords").get<std::size_t>()) {
      throw FormatError("codeword count does not match the trees");
    }
    return code;
  } catch (const json::exception& e) {
    throw FormatError(std::string("code file schema: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw FormatError(std::string("code file parameters: ") + e.what());
  }
}

void write_code_file(const std::string& path, const GalaxyCode& code) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << serialize_code(code);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

GalaxyCode read_code_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_code(ss.str());
}

}  // namespace galaxy
