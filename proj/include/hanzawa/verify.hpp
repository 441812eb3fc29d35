#pragma once

#include "hanzawa/config.hpp"
#include "hanzawa/report.hpp"

namespace hanzawa {
namespace suites {

// Each suite returns one record per check with the tolerance it was run at.
// Tolerances are pinned here, identically for the CLI and the acceptance
// harness.

// Frames, Weingarten closed forms, projection round-trips, dual-frame
// identity, curvature convergence of the sample-only pipeline.
std::vector<CheckRecord> geometry(const ReferenceSurface& S);
std::vector<CheckRecord> geometry_all();

// H(h == c) = -2/(R+c) on the analytic sphere path.
std::vector<CheckRecord> concentric_exactness();

// DH[0] against central differences and spherical-harmonic eigenvalues.
std::vector<CheckRecord> linearization(unsigned seed);

// Pullback identities (gradient, divergence, Laplacian, time derivative).
std::vector<CheckRecord> identities(const ReferenceSurface& S, int draws,
                                    unsigned seed);

// Central-difference ladder over the whole Frechet catalogue.
std::vector<CheckRecord> frechet(int seeds);

// h == 0 degeneracy of every pullback coefficient and nonlinear term.
std::vector<CheckRecord> degeneracy();

// Norm machinery: Gagliardo reference values, homogeneity, triangle
// inequality, product-estimate probe stability.
std::vector<CheckRecord> norms(unsigned seed);

// Parabolic MMS order, height transport, contraction probe trend.
std::vector<CheckRecord> evolution(unsigned seed);

// L - G against the original-frame residuals at h == 0, plus the
// stress-balance reconstruction at small h.
std::vector<CheckRecord> reduction(unsigned seed);

}  // namespace suites

// Deterministic sampling helpers shared by suites and tests.
Vec2 random_param(const ReferenceSurface& S, std::mt19937_64& rng,
                  double margin = 0.1);
Vec3 random_tube_point(const ReferenceSurface& S, std::mt19937_64& rng,
                       double max_frac = 0.8);
HeightField random_height(const ReferenceSurface& S, unsigned seed,
                          double amplitude_frac, double rate = 0.0);
SurfaceVecFn random_tangent_field(const ReferenceSurface& S, unsigned seed,
                                  double amplitude = 1.0);

}  // namespace hanzawa
