#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "hanzawa/evolution.hpp"

namespace hanzawa {

using Json = nlohmann::json;

// Load and validate a JSON config file; throws ConfigError with context.
Json load_config(const std::string& path);

// { "kind": "sphere"|"ellipsoid"|"torus", "params": {...},
//   "grid": {"nu": .., "nv": ..}, "rho0": optional }
ReferenceSurface surface_from_config(const Json& cfg);

FluidParams fluid_from_config(const Json& cfg);  // optional "fluid" block

struct HanzawaSettings {
  double delta0 = 0.3;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
};
HanzawaSettings hanzawa_settings_from_config(const Json& cfg);

EvolutionConfig evolution_from_config(const Json& cfg);

// Builtin named height fields for the CLI ("const:0.1", "x3:0.02",
// "bump:0.05"). Throws ConfigError on unknown names.
HeightField height_from_spec(const ReferenceSurface& S,
                             const std::string& spec);

// Builtin ambient velocity fields for the evolve subcommand.
VectorField velocity_from_spec(const std::string& spec);

}  // namespace hanzawa
