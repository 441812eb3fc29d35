#pragma once

#include "hanzawa/hanzawa_map.hpp"

namespace hanzawa {

// Geometry of the deformed interface Gamma_h = { Phi(s) + h(s) n(s) },
// expressed through the reference surface and the height function.
// Mean curvature convention: H = -div_Gamma n_Gamma, so the unit sphere
// with outward normal has H = -2.
struct InterfaceGeometry {
  Vec3 alpha;    // (I - h L)^{-1} grad_S h, tangent to Sigma
  double beta;   // 1 / |n - alpha|
  Vec3 n_gamma;  // unit normal of Gamma at Theta(Phi(s))
  double H;      // mean curvature of Gamma
  Vec3 tau1_gamma, tau2_gamma;  // (I - h L) tau_i + d_i h n
};

// M0 = (I - h L)^{-1} via adjugate / determinant with the conditioning gate.
Mat3 m0_matrix(const ReferenceSurface& S, const HeightField& h, const Vec2& s);

Vec3 alpha_vec(const ReferenceSurface& S, const HeightField& h, const Vec2& s);
double beta_scalar(const ReferenceSurface& S, const HeightField& h,
                   const Vec2& s);
Vec3 normal_gamma(const ReferenceSurface& S, const HeightField& h,
                  const Vec2& s);
double mean_curvature_gamma(const ReferenceSurface& S, const HeightField& h,
                            const Vec2& s);
InterfaceGeometry interface_geometry(const ReferenceSurface& S,
                                     const HeightField& h, const Vec2& s);

// Linearization of H at h = 0: (tr L^2) phi + laplace_beltrami(phi).
double dh_gamma_zero(const ReferenceSurface& S, const SurfaceFn& phi,
                     const Vec2& s);
double dh_gamma_zero(const ReferenceSurface& S, const GridScalar& phi, int i,
                     int j);

// Full Frechet derivative D H[h] phi as the five-term expression
// I1 + I2 - I3 - I4 - I5 built from D M0, D alpha and surface gradients.
double frechet_mean_curvature(const ReferenceSurface& S, const HeightField& h,
                              const HeightField& phi, const Vec2& s);

// D alpha [h] phi = (D M0 phi) grad_S h + M0 grad_S phi.
Vec3 dalpha_vec(const ReferenceSurface& S, const HeightField& h,
                const HeightField& phi, const Vec2& s);
// D beta [h] phi = beta^3 (n - alpha) . D alpha phi.
double dbeta_scalar(const ReferenceSurface& S, const HeightField& h,
                    const HeightField& phi, const Vec2& s);

// Independent oracle: parameterize Gamma directly as Psi = Phi + h n and run
// the sample-only FD geometry pipeline on it.
FdPatch direct_interface_patch(const ReferenceSurface& S, const HeightField& h,
                               int refine = 1);

}  // namespace hanzawa
