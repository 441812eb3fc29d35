#include "hanzawa/report.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hanzawa/core.hpp"

namespace hanzawa {

std::string tool_version() { return "0.1.0"; }

std::string fnv1a_hex(const std::string& data) {
  uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

std::string Report::to_json() const {
  nlohmann::ordered_json body;
  body["tool_version"] = tool_version;
  body["config_hash"] = config_hash;
  body["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["ref"] = c.ref;
    jc["n_points"] = c.n_points;
    jc["max_rel_err"] = c.max_rel_err;
    jc["observed_order"] = c.observed_order;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    body["checks"].push_back(jc);
  }
  body["body_hash"] = fnv1a_hex(body.dump());
  body["wall_clock_sec"] = wall_clock_sec;
  return body.dump(2);
}

void Report::write(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write report: " + tmp);
    out << to_json() << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot move report into place: " + path);
}

}  // namespace hanzawa
