#include "hanzawa/operators.hpp"

#include <sstream>

namespace hanzawa {

namespace {

// row-vector v contracted from the left with matrix G: (v G)_j.
Vec3 row_times(const Vec3& v, const Mat3& G) { return G.transpose() * v; }

double ddot(const Mat3& A, const Mat3& B) { return (A.array() * B.array()).sum(); }

// Contraction of a pullback coefficient with a gradient, tr(A grad u).
// Composing the entrywise gradient identity with the trace pins this
// orientation; the Frobenius form would transpose it.
double trdot(const Mat3& A, const Mat3& G) { return (A * G).trace(); }

Mat3 sym(const Mat3& A) { return A + A.transpose(); }

double contract_m4(const Mat3& M4, const std::array<Mat3, 3>& H, int k) {
  return ddot(M4, H[k]);
}

}  // namespace

// --- State ---------------------------------------------------------------------

State State::zero(const ReferenceSurface& S, FluidParams fp) {
  State z;
  z.S = &S;
  z.fluid = fp;
  z.u = JumpVectorField::continuous(VectorField::zero());
  z.B = VectorField::zero();
  z.p = JumpScalarField::continuous(ScalarField::zero());
  z.varpi = [](const Vec2&) { return 0.0; };
  z.h = HeightField::constant(S, 0.0);
  return z;
}

State State::axpy(double w, const State& dir) const {
  State out = *this;
  out.u = u.plus(dir.u, w);
  out.B = B.plus(dir.B, w);
  out.p = p.plus(dir.p, w);
  SurfaceFn a = varpi, bfn = dir.varpi;
  out.varpi = [a, bfn, w](const Vec2& s) { return a(s) + w * bfn(s); };
  out.h = h.axpy(w, dir.h);
  return out;
}

double State::varpi_residual(double t, const Vec2& s) const {
  // The state's pressure lives on the fixed geometry, so its interface trace
  // sits at Phi(s); for a pulled-back state this equals the original jump
  // evaluated at the deformed point Phi + h n.
  Vec3 y = S->point(s);
  double pj = p.outer.value(t, y) - p.inner.value(t, y);
  return varpi(s) - pj;
}

// --- jumps and traces ------------------------------------------------------------

double jump(const JumpScalarField& f, double t, const Vec3& x) {
  return f.outer.value(t, x) - f.inner.value(t, x);
}

Vec3 jump(const JumpVectorField& f, double t, const Vec3& x) {
  return f.outer.value(t, x) - f.inner.value(t, x);
}

Mat3 jump_viscous_stress(const JumpVectorField& u, const FluidParams& fp,
                         double t, const Vec3& x) {
  Mat3 go = u.outer.gradient(t, x);
  Mat3 gi = u.inner.gradient(t, x);
  return fp.nu_minus * sym(go) - fp.nu_plus * sym(gi);
}

double trace_along_normal(const std::function<double(const Vec3&)>& f,
                          const Vec3& x0, const Vec3& n, double side) {
  const double e1 = 1e-4, e2 = 5e-5;
  double s = side >= 0 ? 1.0 : -1.0;
  double f1 = f(x0 + s * e1 * n);
  double f2 = f(x0 + s * e2 * n);
  // linear Richardson toward offset 0
  return (e1 * f2 - e2 * f1) / (e1 - e2);
}

// --- composition ------------------------------------------------------------------

ScalarField compose_with_theta(const ScalarField& f,
                               std::shared_ptr<const ThetaField> th) {
  ScalarField out;
  out.value = [f, th](double t, const Vec3& x) {
    return f.value(t, th->map(x));
  };
  out.grad = [f, th](double t, const Vec3& x) -> Vec3 {
    ThetaDerivs d = th->derivs(x);
    Mat3 J = Mat3::Identity() + d.grad;
    return J * f.gradient(t, x + d.theta);
  };
  out.hess = [f, th](double t, const Vec3& x) -> Mat3 {
    ThetaDerivs d = th->derivs(x, true);
    Vec3 y = x + d.theta;
    Mat3 J = Mat3::Identity() + d.grad;
    Mat3 H = f.hessian(t, y);
    Vec3 g = f.gradient(t, y);
    Mat3 out_m = J * H * J.transpose();
    for (int a = 0; a < 3; ++a) out_m += d.hess[a] * g[a];
    return out_m;
  };
  out.dt = [f, th](double t, const Vec3& x) {
    ThetaDerivs d = th->derivs(x);
    Vec3 y = x + d.theta;
    return f.time_derivative(t, y) + f.gradient(t, y).dot(d.dt);
  };
  return out;
}

VectorField compose_with_theta(const VectorField& f,
                               std::shared_ptr<const ThetaField> th) {
  VectorField out;
  out.value = [f, th](double t, const Vec3& x) -> Vec3 {
    return f.value(t, th->map(x));
  };
  out.grad = [f, th](double t, const Vec3& x) -> Mat3 {
    ThetaDerivs d = th->derivs(x);
    Mat3 J = Mat3::Identity() + d.grad;
    return J * f.gradient(t, x + d.theta);
  };
  out.hess = [f, th](double t, const Vec3& x) -> std::array<Mat3, 3> {
    ThetaDerivs d = th->derivs(x, true);
    Vec3 y = x + d.theta;
    Mat3 J = Mat3::Identity() + d.grad;
    auto Hf = f.hessian(t, y);
    Mat3 G = f.gradient(t, y);
    std::array<Mat3, 3> out_h;
    for (int k = 0; k < 3; ++k) {
      out_h[k] = J * Hf[k] * J.transpose();
      for (int a = 0; a < 3; ++a) out_h[k] += d.hess[a] * G(a, k);
    }
    return out_h;
  };
  out.dt = [f, th](double t, const Vec3& x) -> Vec3 {
    ThetaDerivs d = th->derivs(x);
    Vec3 y = x + d.theta;
    return f.time_derivative(t, y) + f.gradient(t, y).transpose() * d.dt;
  };
  return out;
}

JumpScalarField compose_with_theta(const JumpScalarField& f,
                                   std::shared_ptr<const ThetaField> th) {
  return {compose_with_theta(f.inner, th), compose_with_theta(f.outer, th)};
}

JumpVectorField compose_with_theta(const JumpVectorField& f,
                                   std::shared_ptr<const ThetaField> th) {
  return {compose_with_theta(f.inner, th), compose_with_theta(f.outer, th)};
}

State pulled_back_state(const ReferenceSurface& S, const FluidParams& fp,
                        const JumpVectorField& u, const VectorField& B,
                        const JumpScalarField& p, const HeightField& h) {
  auto hp = std::make_shared<HeightField>(h);
  auto th = std::make_shared<ThetaField>(S, *hp);
  // keep the height alive alongside the theta field
  struct Keeper {
    std::shared_ptr<HeightField> h;
    std::shared_ptr<ThetaField> th;
  };
  auto keep = std::make_shared<Keeper>(Keeper{hp, th});
  std::shared_ptr<const ThetaField> tc(keep, keep->th.get());

  State z;
  z.S = &S;
  z.fluid = fp;
  z.u = compose_with_theta(u, tc);
  z.B = compose_with_theta(B, tc);
  z.p = compose_with_theta(p, tc);
  JumpScalarField pbar = z.p;
  const ReferenceSurface* sp = &S;
  HeightField hh = h;
  z.varpi = [pbar, sp, hh](const Vec2& s) {
    Vec3 y = sp->point(s);
    return pbar.outer.value(0.0, y) - pbar.inner.value(0.0, y);
  };
  z.h = h;
  return z;
}

// --- identity checkers -------------------------------------------------------------

double check_gradient_identity(const VectorField& u, const ThetaField& th,
                               double t, const Vec3& x) {
  auto thp = std::make_shared<ThetaField>(th);
  VectorField ubar = compose_with_theta(u, thp);
  Vec3 y = th.map(x);
  Mat3 lhs = u.gradient(t, y);
  Mat3 rhs = (Mat3::Identity() - th.m1(x)) * ubar.gradient(t, x);
  return (lhs - rhs).norm();
}

double check_divergence_identity(const VectorField& u, const ThetaField& th,
                                 double t, const Vec3& x) {
  auto thp = std::make_shared<ThetaField>(th);
  VectorField ubar = compose_with_theta(u, thp);
  Vec3 y = th.map(x);
  double lhs = u.divergence(t, y);
  Mat3 gb = ubar.gradient(t, x);
  double rhs = gb.trace() - trdot(th.m1(x), gb);
  return std::abs(lhs - rhs);
}

double check_laplacian_identity(const VectorField& u, const ThetaField& th,
                                double t, const Vec3& x) {
  auto thp = std::make_shared<ThetaField>(th);
  VectorField ubar = compose_with_theta(u, thp);
  Vec3 y = th.map(x);
  Vec3 lhs = u.laplacian(t, y);
  auto Hb = ubar.hessian(t, x);
  Mat3 gb = ubar.gradient(t, x);
  Mat3 M4 = th.m4(x);
  Vec3 M2 = th.m2(x);
  Vec3 rhs;
  for (int k = 0; k < 3; ++k)
    rhs[k] = Hb[k].trace() + contract_m4(M4, Hb, k);
  rhs += row_times(M2, gb);
  return (lhs - rhs).norm();
}

double check_time_identity(const VectorField& u, const ThetaField& th,
                           double t, const Vec3& x) {
  auto thp = std::make_shared<ThetaField>(th);
  VectorField ubar = compose_with_theta(u, thp);
  Vec3 y = th.map(x);
  Vec3 lhs = u.time_derivative(t, y);
  Vec3 rhs = ubar.time_derivative(t, x) -
             row_times(th.m3(x), ubar.gradient(t, x));
  return (lhs - rhs).norm();
}

// --- linear parts ---------------------------------------------------------------

Vec3 l1(const State& z, double t, const Vec3& x) {
  double side = z.S->implicit_side(x);
  const VectorField& u = z.u.branch(side);
  const ScalarField& p = z.p.branch(side);
  double nu = z.fluid.nu(side);
  return u.time_derivative(t, x) + p.gradient(t, x) - nu * u.laplacian(t, x);
}

Vec3 l2(const State& z, double t, const Vec3& x) {
  return z.B.time_derivative(t, x) - z.fluid.sigma * z.B.laplacian(t, x);
}

double l3(const State& z, double t, const Vec3& x) {
  return z.u.branch(z.S->implicit_side(x)).divergence(t, x);
}

Vec3 l4(const State& z, double t, const Vec2& s) {
  Vec3 x = z.S->point(s);
  Vec3 n = z.S->normal(s);
  Mat3 Sj = jump_viscous_stress(z.u, z.fluid, t, x);
  double lap_h = laplace_beltrami(*z.S, z.h.as_fn(), s);
  return -Sj * n + z.varpi(s) * n - z.fluid.kappa * lap_h * n;
}

double l5(const State& z, const SurfaceVecFn& b, double t, const Vec2& s) {
  Vec3 x = z.S->point(s);
  Vec3 n = z.S->normal(s);
  Vec3 uval = z.u.outer.value(t, x);
  return z.h.dt(s) - uval.dot(n) + b(s).dot(z.h.grad_sigma(s));
}

// --- nonlinear parts -------------------------------------------------------------

Vec3 g1(const State& z, double t, const Vec3& x) {
  double side = z.S->implicit_side(x);
  const VectorField& u = z.u.branch(side);
  const ScalarField& p = z.p.branch(side);
  double nu = z.fluid.nu(side);
  ThetaField th(*z.S, z.h);

  Vec3 uval = u.value(t, x), Bval = z.B.value(t, x);
  Mat3 gu = u.gradient(t, x), gB = z.B.gradient(t, x);
  Vec3 gp = p.gradient(t, x);
  auto Hu = u.hessian(t, x);
  Mat3 M1 = th.m1(x);
  Vec3 M2 = th.m2(x);
  Vec3 M3 = th.m3(x);
  Mat3 M4 = th.m4(x);

  Vec3 gradB2_half = gB * Bval;  // (grad B) B = 1/2 grad |B|^2
  Vec3 out = -gradB2_half;
  out -= row_times(uval, gu);
  out += row_times(Bval, gB);
  out += row_times(M3, gu);
  out += row_times(uval, M1 * gu);
  out -= row_times(Bval, M1 * gB);
  out += M1 * gradB2_half;
  out += M1 * gp;
  for (int k = 0; k < 3; ++k) out[k] += nu * contract_m4(M4, Hu, k);
  out += nu * row_times(M2, gu);
  return out;
}

Vec3 g2(const State& z, double t, const Vec3& x) {
  double side = z.S->implicit_side(x);
  const VectorField& u = z.u.branch(side);
  double sigma = z.fluid.sigma;
  ThetaField th(*z.S, z.h);

  Vec3 uval = u.value(t, x), Bval = z.B.value(t, x);
  Mat3 gu = u.gradient(t, x), gB = z.B.gradient(t, x);
  auto HB = z.B.hessian(t, x);
  Mat3 M1 = th.m1(x);
  Vec3 M2 = th.m2(x);
  Vec3 M3 = th.m3(x);
  Mat3 M4 = th.m4(x);

  Vec3 out = -row_times(uval, gB);
  out += row_times(Bval, gu);
  out += row_times(uval, M1 * gB);
  out -= row_times(Bval, M1 * gu);
  out += row_times(M3, gB);
  for (int k = 0; k < 3; ++k) out[k] += sigma * contract_m4(M4, HB, k);
  out += sigma * row_times(M2, gB);
  return out;
}

double g3(const State& z, double t, const Vec3& x) {
  double side = z.S->implicit_side(x);
  ThetaField th(*z.S, z.h);
  return trdot(th.m1(x), z.u.branch(side).gradient(t, x));
}

double g5(const State& z, const SurfaceVecFn& b, double t, const Vec2& s) {
  Vec3 x = z.S->point(s);
  Vec3 uval = z.u.outer.value(t, x);
  Vec3 gh = z.h.grad_sigma(s);
  Mat3 M0 = m0_matrix(*z.S, z.h, s);
  Vec3 term1 = (Mat3::Identity() - M0) * gh;
  return term1.dot(uval) + (b(s) - uval).dot(gh);
}

double cal_g1(const State& z, double t, const Vec2& s) {
  Vec3 x = z.S->point(s);
  Vec3 n = z.S->normal(s);
  ThetaField th(*z.S, z.h);
  Vec3 a = alpha_vec(*z.S, z.h, s);
  Mat3 Sj = jump_viscous_stress(z.u, z.fluid, t, x);
  Mat3 M1 = th.m1(x);
  Mat3 go = z.u.outer.gradient(t, x), gi = z.u.inner.gradient(t, x);
  Mat3 Mj = z.fluid.nu_minus * sym(M1 * go) - z.fluid.nu_plus * sym(M1 * gi);
  return -(Sj * a).dot(n) - (Mj * (n - a)).dot(n);
}

double cal_g2(const State& z, double t, const Vec2& s) {
  (void)t;
  const double kappa = z.fluid.kappa;
  double H = mean_curvature_gamma(*z.S, z.h, s);
  Mat3 L = z.S->weingarten(s);
  double linear = (L * L).trace() * z.h.value(s) +
                  laplace_beltrami(*z.S, z.h.as_fn(), s);
  return kappa * (H - L.trace() - linear);
}

Vec3 cal_g3(const State& z, double t, const Vec2& s) {
  Vec3 x = z.S->point(s);
  Vec3 n = z.S->normal(s);
  Mat3 P = Mat3::Identity() - n * n.transpose();
  ThetaField th(*z.S, z.h);
  Vec3 a = alpha_vec(*z.S, z.h, s);
  Mat3 M1 = th.m1(x);
  Mat3 go = z.u.outer.gradient(t, x), gi = z.u.inner.gradient(t, x);
  const double nm = z.fluid.nu_minus, np = z.fluid.nu_plus;
  Mat3 Fj = nm * sym((Mat3::Identity() - M1) * go) -
            np * sym((Mat3::Identity() - M1) * gi);
  Mat3 Gj = nm * sym(M1 * go) - np * sym(M1 * gi);
  Vec3 i1 = P * (Fj * a);
  Vec3 i2 = P * (Gj * n);
  Vec3 i3 = ((Fj * (n - a)).dot(n)) * a;
  return -(i1 + i2 - i3);
}

Vec3 g4(const State& z, double t, const Vec2& s) {
  Vec3 n = z.S->normal(s);
  Mat3 L = z.S->weingarten(s);
  double tr_l2 = (L * L).trace();
  double scalar = cal_g1(z, t, s) + cal_g2(z, t, s) +
                  z.fluid.kappa * tr_l2 * z.h.value(s);
  return scalar * n + cal_g3(z, t, s);
}

// --- original-frame residuals --------------------------------------------------

Vec3 momentum_residual(const JumpVectorField& uj, const VectorField& B,
                       const JumpScalarField& pj, const FluidParams& fp,
                       double side, double t, const Vec3& y) {
  const VectorField& u = uj.branch(side);
  const ScalarField& p = pj.branch(side);
  double nu = side < 0 ? fp.nu_plus : fp.nu_minus;
  Vec3 Bval = B.value(t, y);
  Mat3 gB = B.gradient(t, y);
  Vec3 r = u.time_derivative(t, y);
  r += row_times(u.value(t, y), u.gradient(t, y));
  r -= row_times(Bval, gB);
  r += gB * Bval;  // 1/2 grad |B|^2
  r += p.gradient(t, y);
  r -= nu * u.laplacian(t, y);
  return r;
}

Vec3 induction_residual(const JumpVectorField& uj, const VectorField& B,
                        const FluidParams& fp, double side, double t,
                        const Vec3& y) {
  const VectorField& u = uj.branch(side);
  Vec3 r = B.time_derivative(t, y);
  r += row_times(u.value(t, y), B.gradient(t, y));
  r -= row_times(B.value(t, y), u.gradient(t, y));
  r -= fp.sigma * B.laplacian(t, y);
  return r;
}

Vec3 stress_residual_pulled(const ReferenceSurface& S, const FluidParams& fp,
                            const JumpVectorField& u, const JumpScalarField& p,
                            const HeightField& h, double t, const Vec2& s) {
  Vec3 y = S.point(s) + h.value(s) * S.normal(s);
  InterfaceGeometry ig = interface_geometry(S, h, s);
  Mat3 Sj = jump_viscous_stress(u, fp, t, y);
  double pj = p.outer.value(t, y) - p.inner.value(t, y);
  return -(Sj * ig.n_gamma) + pj * ig.n_gamma -
         fp.kappa * ig.H * ig.n_gamma;
}

Vec3 stress_oracle_decomposed(const ReferenceSurface& S, const FluidParams& fp,
                              const JumpVectorField& u,
                              const JumpScalarField& p, const HeightField& h,
                              double t, const Vec2& s) {
  Vec3 R = stress_residual_pulled(S, fp, u, p, h, t, s);
  InterfaceGeometry ig = interface_geometry(S, h, s);
  Vec3 n = S.normal(s);
  Mat3 P = Mat3::Identity() - n * n.transpose();
  double rn = R.dot(n);
  Vec3 out = (P * R + rn * (n + ig.alpha)) / ig.beta;
  out += fp.kappa * S.weingarten(s).trace() * n;
  return out;
}

// --- Frechet catalogue ------------------------------------------------------------

const char* frechet_op_name(FrechetOp op) {
  switch (op) {
    case FrechetOp::M0: return "DM0";
    case FrechetOp::M1: return "DM1";
    case FrechetOp::M2: return "DM2";
    case FrechetOp::M3: return "DM3";
    case FrechetOp::M4: return "DM4";
    case FrechetOp::Alpha: return "Dalpha";
    case FrechetOp::Beta: return "Dbeta";
    case FrechetOp::HGamma: return "DH";
    case FrechetOp::CalG1: return "DcalG1";
    case FrechetOp::CalG2: return "DcalG2";
    case FrechetOp::CalG3: return "DcalG3";
    case FrechetOp::G1: return "DG1";
    case FrechetOp::G2: return "DG2";
    case FrechetOp::G3: return "DG3";
    case FrechetOp::G4: return "DG4";
    case FrechetOp::G5: return "DG5";
  }
  return "?";
}

std::vector<FrechetOp> all_frechet_ops() {
  return {FrechetOp::M0,    FrechetOp::M1,    FrechetOp::M2,
          FrechetOp::M3,    FrechetOp::M4,    FrechetOp::Alpha,
          FrechetOp::Beta,  FrechetOp::HGamma, FrechetOp::CalG1,
          FrechetOp::CalG2, FrechetOp::CalG3, FrechetOp::G1,
          FrechetOp::G2,    FrechetOp::G3,    FrechetOp::G4,
          FrechetOp::G5};
}

namespace {

Eigen::VectorXd flat(double v) {
  Eigen::VectorXd out(1);
  out[0] = v;
  return out;
}
Eigen::VectorXd flat(const Vec3& v) {
  Eigen::VectorXd out(3);
  out << v[0], v[1], v[2];
  return out;
}
Eigen::VectorXd flat(const Mat3& m) {
  Eigen::VectorXd out(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[3 * i + j] = m(i, j);
  return out;
}

SurfaceVecFn zero_b() {
  return [](const Vec2&) { return Vec3::Zero(); };
}

}  // namespace

Eigen::VectorXd frechet_value(FrechetOp op, const State& z,
                              const SurfaceVecFn& b, double t,
                              const EvalPoint& pt) {
  ThetaField th(*z.S, z.h);
  switch (op) {
    case FrechetOp::M0: return flat(th.m0(pt.s));
    case FrechetOp::M1: return flat(th.m1(pt.x));
    case FrechetOp::M2: return flat(th.m2(pt.x));
    case FrechetOp::M3: return flat(th.m3(pt.x));
    case FrechetOp::M4: return flat(th.m4(pt.x));
    case FrechetOp::Alpha: return flat(alpha_vec(*z.S, z.h, pt.s));
    case FrechetOp::Beta: return flat(beta_scalar(*z.S, z.h, pt.s));
    case FrechetOp::HGamma:
      return flat(mean_curvature_gamma(*z.S, z.h, pt.s));
    case FrechetOp::CalG1: return flat(cal_g1(z, t, pt.s));
    case FrechetOp::CalG2: return flat(cal_g2(z, t, pt.s));
    case FrechetOp::CalG3: return flat(cal_g3(z, t, pt.s));
    case FrechetOp::G1: return flat(g1(z, t, pt.x));
    case FrechetOp::G2: return flat(g2(z, t, pt.x));
    case FrechetOp::G3: return flat(g3(z, t, pt.x));
    case FrechetOp::G4: return flat(g4(z, t, pt.s));
    case FrechetOp::G5: return flat(g5(z, b ? b : zero_b(), t, pt.s));
  }
  throw ParamError("unknown operator id");
}

namespace {

// D of jump(nu sym(A grad u)) for fixed matrix-producing callables; helper
// for the surface-term derivatives.
struct SurfaceDerivContext {
  const State& z;
  const Direction& dir;
  double t;
  Vec2 s;
  Vec3 x, n, a, da, gh;
  Mat3 P, M0, DM0, M1, DM1;
  Mat3 go, gi, dgo, dgi;  // grads of u branches and direction branches
  double nu_o, nu_i;

  SurfaceDerivContext(const State& zz, const Direction& dd, double tt,
                      const Vec2& ss)
      : z(zz), dir(dd), t(tt), s(ss) {
    x = z.S->point(s);
    n = z.S->normal(s);
    P = Mat3::Identity() - n * n.transpose();
    Mat3 L = z.S->weingarten(s);
    M0 = m0_matrix(*z.S, z.h, s);
    DM0 = dir.h.value(s) * M0 * L * M0;
    gh = z.h.grad_sigma(s);
    a = M0 * gh;
    da = dalpha_vec(*z.S, z.h, dir.h, s);
    ThetaField th(*z.S, z.h);
    ThetaField tphi(*z.S, dir.h, /*enforce_gate=*/false);
    M1 = th.m1(x);
    DM1 = dm1(th, tphi, x);
    go = z.u.outer.gradient(t, x);
    gi = z.u.inner.gradient(t, x);
    dgo = dir.u.outer.gradient(t, x);
    dgi = dir.u.inner.gradient(t, x);
    nu_o = z.fluid.nu_minus;
    nu_i = z.fluid.nu_plus;
  }

  Mat3 jump_sym(const Mat3& Ao, const Mat3& Ai) const {
    return nu_o * sym(Ao) - nu_i * sym(Ai);
  }
};

}  // namespace

Eigen::VectorXd frechet_derivative(FrechetOp op, const State& z,
                                   const Direction& dir, const SurfaceVecFn& b,
                                   double t, const EvalPoint& pt) {
  ThetaField th(*z.S, z.h);
  ThetaField tphi(*z.S, dir.h, /*enforce_gate=*/false);
  switch (op) {
    case FrechetOp::M0: return flat(dm0(th, dir.h, pt.s));
    case FrechetOp::M1: return flat(dm1(th, tphi, pt.x));
    case FrechetOp::M2: return flat(dm2(th, tphi, pt.x));
    case FrechetOp::M3: return flat(dm3(th, tphi, pt.x));
    case FrechetOp::M4: return flat(dm4(th, tphi, pt.x));
    case FrechetOp::Alpha:
      return flat(dalpha_vec(*z.S, z.h, dir.h, pt.s));
    case FrechetOp::Beta:
      return flat(dbeta_scalar(*z.S, z.h, dir.h, pt.s));
    case FrechetOp::HGamma:
      return flat(frechet_mean_curvature(*z.S, z.h, dir.h, pt.s));
    case FrechetOp::CalG2: {
      double dh = frechet_mean_curvature(*z.S, z.h, dir.h, pt.s);
      double lin = (z.S->weingarten(pt.s) * z.S->weingarten(pt.s)).trace() *
                       dir.h.value(pt.s) +
                   laplace_beltrami(*z.S, dir.h.as_fn(), pt.s);
      return flat(z.fluid.kappa * (dh - lin));
    }
    case FrechetOp::CalG1: {
      SurfaceDerivContext c(z, dir, t, pt.s);
      // I1 = -(jump(nu sym(grad u)) alpha) . n
      Mat3 Sj = c.jump_sym(c.go, c.gi);
      Mat3 DSj = c.jump_sym(c.dgo, c.dgi);
      double dI1 = -((DSj * c.a).dot(c.n) + (Sj * c.da).dot(c.n));
      // I2 = -(jump(nu sym(M1 grad u)) (n - alpha)) . n
      Mat3 Gj = c.jump_sym(c.M1 * c.go, c.M1 * c.gi);
      Mat3 DGj = c.jump_sym(c.DM1 * c.go + c.M1 * c.dgo,
                            c.DM1 * c.gi + c.M1 * c.dgi);
      double dI2 =
          -((DGj * (c.n - c.a)).dot(c.n)) + ((Gj * c.da).dot(c.n));
      return flat(dI1 + dI2);
    }
    case FrechetOp::CalG3: {
      SurfaceDerivContext c(z, dir, t, pt.s);
      Mat3 I = Mat3::Identity();
      Mat3 Fj = c.jump_sym((I - c.M1) * c.go, (I - c.M1) * c.gi);
      Mat3 DFj = c.jump_sym(-c.DM1 * c.go + (I - c.M1) * c.dgo,
                            -c.DM1 * c.gi + (I - c.M1) * c.dgi);
      Mat3 Gj = c.jump_sym(c.M1 * c.go, c.M1 * c.gi);
      Mat3 DGj = c.jump_sym(c.DM1 * c.go + c.M1 * c.dgo,
                            c.DM1 * c.gi + c.M1 * c.dgi);
      Vec3 dI1 = c.P * (DFj * c.a) + c.P * (Fj * c.da);
      Vec3 dI2 = c.P * (DGj * c.n);
      double base = (Fj * (c.n - c.a)).dot(c.n);
      double dbase = (DFj * (c.n - c.a)).dot(c.n) - (Fj * c.da).dot(c.n);
      Vec3 dI3 = dbase * c.a + base * c.da;
      return flat(Vec3(-(dI1 + dI2 - dI3)));
    }
    case FrechetOp::G1: {
      double side = z.S->implicit_side(pt.x);
      const VectorField& u = z.u.branch(side);
      const VectorField& du = dir.u.branch(side);
      const ScalarField& dp = dir.p.branch(side);
      double nu = z.fluid.nu(side);
      const Vec3& x = pt.x;
      Vec3 uval = u.value(t, x), Bval = z.B.value(t, x);
      Vec3 duval = du.value(t, x), dBval = dir.B.value(t, x);
      Mat3 gu = u.gradient(t, x), gB = z.B.gradient(t, x);
      Mat3 dgu = du.gradient(t, x), dgB = dir.B.gradient(t, x);
      auto Hu = u.hessian(t, x);
      auto dHu = du.hessian(t, x);
      Mat3 M1 = th.m1(x), DM1 = dm1(th, tphi, x);
      Vec3 M2 = th.m2(x), DM2 = dm2(th, tphi, x);
      Vec3 M3 = th.m3(x), DM3 = dm3(th, tphi, x);
      Mat3 M4 = th.m4(x), DM4 = dm4(th, tphi, x);

      Vec3 out = -(dgB * Bval + gB * dBval);                    // -D half grad|B|^2
      out -= row_times(duval, gu) + row_times(uval, dgu);       // -D(u grad u)
      out += row_times(dBval, gB) + row_times(Bval, dgB);       // +D(B grad B)
      out += row_times(DM3, gu) + row_times(M3, dgu);           // +D(M3 grad u)
      out += row_times(duval, M1 * gu) + row_times(uval, DM1 * gu) +
             row_times(uval, M1 * dgu);                          // +D(u M1 grad u)
      out -= row_times(dBval, M1 * gB) + row_times(Bval, DM1 * gB) +
             row_times(Bval, M1 * dgB);                          // -D(B M1 grad B)
      out += DM1 * (gB * Bval) + M1 * (dgB * Bval) + M1 * (gB * dBval);
      out += DM1 * z.p.branch(side).gradient(t, x) + M1 * dp.gradient(t, x);
      for (int k = 0; k < 3; ++k)
        out[k] += nu * (ddot(DM4, Hu[k]) + ddot(M4, dHu[k]));
      out += nu * (row_times(DM2, gu) + row_times(M2, dgu));
      return flat(out);
    }
    case FrechetOp::G2: {
      double side = z.S->implicit_side(pt.x);
      const VectorField& u = z.u.branch(side);
      const VectorField& du = dir.u.branch(side);
      double sigma = z.fluid.sigma;
      const Vec3& x = pt.x;
      Vec3 uval = u.value(t, x), Bval = z.B.value(t, x);
      Vec3 duval = du.value(t, x), dBval = dir.B.value(t, x);
      Mat3 gu = u.gradient(t, x), gB = z.B.gradient(t, x);
      Mat3 dgu = du.gradient(t, x), dgB = dir.B.gradient(t, x);
      auto HB = z.B.hessian(t, x);
      auto dHB = dir.B.hessian(t, x);
      Mat3 M1 = th.m1(x), DM1 = dm1(th, tphi, x);
      Vec3 M2 = th.m2(x), DM2 = dm2(th, tphi, x);
      Vec3 M3 = th.m3(x), DM3 = dm3(th, tphi, x);
      Mat3 M4 = th.m4(x), DM4 = dm4(th, tphi, x);

      Vec3 out = -(row_times(duval, gB) + row_times(uval, dgB));
      out += row_times(dBval, gu) + row_times(Bval, dgu);
      out += row_times(duval, M1 * gB) + row_times(uval, DM1 * gB) +
             row_times(uval, M1 * dgB);
      out -= row_times(dBval, M1 * gu) + row_times(Bval, DM1 * gu) +
             row_times(Bval, M1 * dgu);
      out += row_times(DM3, gB) + row_times(M3, dgB);
      for (int k = 0; k < 3; ++k)
        out[k] += sigma * (ddot(DM4, HB[k]) + ddot(M4, dHB[k]));
      out += sigma * (row_times(DM2, gB) + row_times(M2, dgB));
      return flat(out);
    }
    case FrechetOp::G3: {
      double side = z.S->implicit_side(pt.x);
      Mat3 M1 = th.m1(pt.x), DM1 = dm1(th, tphi, pt.x);
      Mat3 gu = z.u.branch(side).gradient(t, pt.x);
      Mat3 dgu = dir.u.branch(side).gradient(t, pt.x);
      return flat(trdot(DM1, gu) + trdot(M1, dgu));
    }
    case FrechetOp::G4: {
      Eigen::VectorXd dg1 =
          frechet_derivative(FrechetOp::CalG1, z, dir, b, t, pt);
      Eigen::VectorXd dg2 =
          frechet_derivative(FrechetOp::CalG2, z, dir, b, t, pt);
      Eigen::VectorXd dg3 =
          frechet_derivative(FrechetOp::CalG3, z, dir, b, t, pt);
      Vec3 n = z.S->normal(pt.s);
      Mat3 L = z.S->weingarten(pt.s);
      double scalar = dg1[0] + dg2[0] +
                      z.fluid.kappa * (L * L).trace() * dir.h.value(pt.s);
      Vec3 out = scalar * n + Vec3(dg3[0], dg3[1], dg3[2]);
      return flat(out);
    }
    case FrechetOp::G5: {
      const Vec2& s = pt.s;
      Vec3 x = z.S->point(s);
      Mat3 M0 = m0_matrix(*z.S, z.h, s);
      Mat3 L = z.S->weingarten(s);
      Mat3 DM0 = dir.h.value(s) * M0 * L * M0;
      Vec3 gh = z.h.grad_sigma(s);
      Vec3 dgh = dir.h.grad_sigma(s);
      Vec3 uval = z.u.outer.value(t, x);
      Vec3 duval = dir.u.outer.value(t, x);
      Vec3 bval = b ? b(s) : Vec3::Zero();
      double i1 = (DM0 * gh).dot(uval);
      double i2 = ((Mat3::Identity() - M0) * dgh).dot(uval);
      double i3 = ((Mat3::Identity() - M0) * gh).dot(duval);
      double i4 = duval.dot(gh);
      double i5 = (bval - uval).dot(dgh);
      return flat(-i1 + i2 + i3 - i4 + i5);
    }
  }
  throw ParamError("unknown operator id");
}

FrechetCheck frechet_check(FrechetOp op, const State& z, const Direction& dir,
                           const SurfaceVecFn& b, double t,
                           const EvalPoint& pt,
                           const std::vector<double>& eps_ladder,
                           double rel_tol) {
  FrechetCheck out;
  out.op = op;
  Eigen::VectorXd deriv = frechet_derivative(op, z, dir, b, t, pt);
  double scale = std::max(1e-8, deriv.norm());
  for (double eps : eps_ladder) {
    State zp = z.axpy(eps, dir);
    State zm = z.axpy(-eps, dir);
    // the ladder must stay inside the validity gate
    if (!zp.h.passes_gate() || !zm.h.passes_gate()) {
      std::ostringstream os;
      os << "gate violated along the ladder at eps=" << eps;
      throw GateError(os.str());
    }
    Eigen::VectorXd fp = frechet_value(op, zp, b, t, pt);
    Eigen::VectorXd fm = frechet_value(op, zm, b, t, pt);
    Eigen::VectorXd fd = (fp - fm) / (2 * eps);
    out.eps.push_back(eps);
    out.rel_err.push_back((fd - deriv).norm() / scale);
  }
  // observed order from the first pair of rungs above the noise floor
  out.observed_order = 0;
  for (size_t i = 0; i + 1 < out.eps.size(); ++i) {
    if (out.rel_err[i] > out.noise_floor &&
        out.rel_err[i + 1] > out.noise_floor) {
      out.observed_order = std::log(out.rel_err[i] / out.rel_err[i + 1]) /
                           std::log(out.eps[i] / out.eps[i + 1]);
      break;
    }
  }
  // pass: the mid-rung (or the smallest eps) meets the tolerance
  double err_at_target = out.rel_err.size() > 1 ? out.rel_err[1]
                                                : out.rel_err.back();
  out.pass = err_at_target <= rel_tol;
  return out;
}

}  // namespace hanzawa
