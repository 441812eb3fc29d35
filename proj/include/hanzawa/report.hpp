#pragma once

#include <string>
#include <vector>

namespace hanzawa {

// One verification record. `ref` is a stable dotted identifier of the checked
// relation (e.g. "pullback.laplacian", "curvature.frechet") used for coverage
// audits of report files.
struct CheckRecord {
  std::string name;
  std::string ref;
  int n_points = 0;
  double max_rel_err = 0;
  double observed_order = 0;  // 0 when not applicable
  double tolerance = 0;
  bool pass = false;
};

struct Report {
  std::string tool_version;
  std::string config_hash;
  std::vector<CheckRecord> checks;
  double wall_clock_sec = 0;

  bool all_pass() const;
  // Canonical JSON; wall_clock excluded from the hashable body.
  std::string to_json() const;
  // Atomic write: temp file in the target directory, then rename.
  void write(const std::string& path) const;
};

std::string tool_version();
// FNV-1a over a canonical string.
std::string fnv1a_hex(const std::string& data);

}  // namespace hanzawa
