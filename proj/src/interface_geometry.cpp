#include "hanzawa/interface_geometry.hpp"

#include <sstream>

namespace hanzawa {

namespace {
constexpr double kParamStep = 2e-3;
}

Mat3 m0_matrix(const ReferenceSurface& S, const HeightField& h,
               const Vec2& s) {
  Mat3 A = Mat3::Identity() - h.value(s) * S.weingarten(s);
  double det = A.determinant();
  if (std::abs(det) < 0.5) {
    std::ostringstream os;
    os << "pullback gate: |det(I - h L)| = " << std::abs(det) << " < 0.5";
    throw GateError(os.str());
  }
  return adjugate3(A) / det;
}

Vec3 alpha_vec(const ReferenceSurface& S, const HeightField& h, const Vec2& s) {
  return m0_matrix(S, h, s) * h.grad_sigma(s);
}

double beta_scalar(const ReferenceSurface& S, const HeightField& h,
                   const Vec2& s) {
  return 1.0 / (S.normal(s) - alpha_vec(S, h, s)).norm();
}

Vec3 normal_gamma(const ReferenceSurface& S, const HeightField& h,
                  const Vec2& s) {
  Vec3 n = S.normal(s);
  Vec3 a = alpha_vec(S, h, s);
  return (n - a) / (n - a).norm();
}

InterfaceGeometry interface_geometry(const ReferenceSurface& S,
                                     const HeightField& h, const Vec2& s) {
  h.check_gate();
  InterfaceGeometry out;
  out.alpha = alpha_vec(S, h, s);
  Vec3 n = S.normal(s);
  out.beta = 1.0 / (n - out.alpha).norm();
  out.n_gamma = out.beta * (n - out.alpha);
  out.H = mean_curvature_gamma(S, h, s);
  TangentFrame fr = S.frame(s);
  Mat3 A = Mat3::Identity() - h.value(s) * S.weingarten(s);
  Vec2 dh = h.param_grad(s);
  out.tau1_gamma = A * fr.tau1 + dh[0] * n;
  out.tau2_gamma = A * fr.tau2 + dh[1] * n;
  return out;
}

double mean_curvature_gamma(const ReferenceSurface& S, const HeightField& h,
                            const Vec2& s) {
  h.check_gate();
  Mat3 M0 = m0_matrix(S, h, s);
  Mat3 L = S.weingarten(s);
  Vec3 a = M0 * h.grad_sigma(s);
  double beta = 1.0 / (S.normal(s) - a).norm();
  auto alpha_fn = [&S, &h](const Vec2& q) -> Vec3 {
    return m0_matrix(S, h, q) * h.grad_sigma(q);
  };
  Mat3 grad_alpha = surface_grad_vec(S, alpha_fn, s, kParamStep);
  double first = beta * (M0 * (L + grad_alpha)).trace();
  Vec3 xi = M0 * a;
  double second = beta * beta * beta * xi.dot(grad_alpha * a);
  return first - second;
}

double dh_gamma_zero(const ReferenceSurface& S, const SurfaceFn& phi,
                     const Vec2& s) {
  Mat3 L = S.weingarten(s);
  return (L * L).trace() * phi(s) + laplace_beltrami(S, phi, s, kParamStep);
}

double dh_gamma_zero(const ReferenceSurface& S, const GridScalar& phi, int i,
                     int j) {
  Vec2 s = S.grid().node(i, j);
  Mat3 L = S.weingarten(s);
  return (L * L).trace() * phi.at(i, j) + laplace_beltrami(S, phi, i, j);
}

Vec3 dalpha_vec(const ReferenceSurface& S, const HeightField& h,
                const HeightField& phi, const Vec2& s) {
  Mat3 M0 = m0_matrix(S, h, s);
  Mat3 L = S.weingarten(s);
  Mat3 DM0 = phi.value(s) * M0 * L * M0;
  return DM0 * h.grad_sigma(s) + M0 * phi.grad_sigma(s);
}

double dbeta_scalar(const ReferenceSurface& S, const HeightField& h,
                    const HeightField& phi, const Vec2& s) {
  Vec3 n = S.normal(s);
  Vec3 a = alpha_vec(S, h, s);
  double beta = 1.0 / (n - a).norm();
  return beta * beta * beta * (n - a).dot(dalpha_vec(S, h, phi, s));
}

double frechet_mean_curvature(const ReferenceSurface& S, const HeightField& h,
                              const HeightField& phi, const Vec2& s) {
  h.check_gate();
  Mat3 L = S.weingarten(s);
  Mat3 M0 = m0_matrix(S, h, s);
  Vec3 n = S.normal(s);
  Vec3 gh = h.grad_sigma(s);
  Vec3 a = M0 * gh;
  double beta = 1.0 / (n - a).norm();
  double b3 = beta * beta * beta;

  Mat3 DM0 = phi.value(s) * M0 * L * M0;
  Vec3 Da = DM0 * gh + M0 * phi.grad_sigma(s);

  auto alpha_fn = [&S, &h](const Vec2& q) -> Vec3 {
    return m0_matrix(S, h, q) * h.grad_sigma(q);
  };
  auto dalpha_fn = [&S, &h, &phi](const Vec2& q) -> Vec3 {
    return dalpha_vec(S, h, phi, q);
  };
  Mat3 grad_alpha = surface_grad_vec(S, alpha_fn, s, kParamStep);
  Mat3 grad_dalpha = surface_grad_vec(S, dalpha_fn, s, kParamStep);

  double trace_part = (M0 * (L + grad_alpha)).trace();

  double I1 = b3 * (n - a).dot(Da) * trace_part;
  double I2 = beta * ((DM0 * (L + grad_alpha)).trace() +
                      (M0 * grad_dalpha).trace());
  double I3 = 3.0 * b3 * beta * beta * (n - a).dot(Da) *
              ((M0 * a).dot(grad_alpha * a));
  Vec3 w = DM0 * a + M0 * Da;  // D(M0 alpha) phi
  double I4 = b3 * w.dot(grad_alpha * a);
  Vec3 xi = M0 * a;
  double I5 = b3 * (xi.dot(grad_dalpha * a) + xi.dot(grad_alpha * Da));
  return I1 + I2 - I3 - I4 - I5;
}

FdPatch direct_interface_patch(const ReferenceSurface& S, const HeightField& h,
                               int refine) {
  ParamGrid g = S.grid();
  g.nu *= refine;
  g.nv *= refine;
  auto psi = [&S, &h](const Vec2& s) -> Vec3 {
    return S.point(s) + h.value(s) * S.normal(s);
  };
  auto hint = [&S](const Vec2& s) -> Vec3 { return S.normal(s); };
  return FdPatch(g, psi, hint);
}

}  // namespace hanzawa
