#include "hanzawa/fields.hpp"

#include <sstream>

namespace hanzawa {

namespace {
constexpr double kFdStep = 1e-5;
}

Vec3 ScalarField::gradient(double t, const Vec3& x) const {
  if (grad) return grad(t, x);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    g[i] = fd_central([&](double a) { return value(t, x + a * e); }, 0.0,
                      kFdStep);
  }
  return g;
}

Mat3 ScalarField::hessian(double t, const Vec3& x) const {
  if (hess) return hess(t, x);
  Mat3 H;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = 1.0;
    Vec3 gp = gradient(t, x + kFdStep * e);
    Vec3 gm = gradient(t, x - kFdStep * e);
    H.col(j) = (gp - gm) / (2 * kFdStep);
  }
  return 0.5 * (H + H.transpose());
}

double ScalarField::time_derivative(double t, const Vec3& x) const {
  if (dt) return dt(t, x);
  return fd_central([&](double a) { return value(a, x); }, t, kFdStep);
}

ScalarField ScalarField::constant(double c) {
  ScalarField f;
  f.value = [c](double, const Vec3&) { return c; };
  f.grad = [](double, const Vec3&) { return Vec3::Zero(); };
  f.hess = [](double, const Vec3&) { return Mat3::Zero(); };
  f.dt = [](double, const Vec3&) { return 0.0; };
  return f;
}

ScalarField ScalarField::scaled(double a) const {
  ScalarField out;
  ScalarField self = *this;
  out.value = [self, a](double t, const Vec3& x) { return a * self.value(t, x); };
  out.grad = [self, a](double t, const Vec3& x) -> Vec3 {
    return a * self.gradient(t, x);
  };
  out.hess = [self, a](double t, const Vec3& x) -> Mat3 {
    return a * self.hessian(t, x);
  };
  out.dt = [self, a](double t, const Vec3& x) {
    return a * self.time_derivative(t, x);
  };
  return out;
}

ScalarField ScalarField::plus(const ScalarField& other, double w) const {
  ScalarField out;
  ScalarField lhs = *this, rhs = other;
  out.value = [lhs, rhs, w](double t, const Vec3& x) {
    return lhs.value(t, x) + w * rhs.value(t, x);
  };
  out.grad = [lhs, rhs, w](double t, const Vec3& x) -> Vec3 {
    return lhs.gradient(t, x) + w * rhs.gradient(t, x);
  };
  out.hess = [lhs, rhs, w](double t, const Vec3& x) -> Mat3 {
    return lhs.hessian(t, x) + w * rhs.hessian(t, x);
  };
  out.dt = [lhs, rhs, w](double t, const Vec3& x) {
    return lhs.time_derivative(t, x) + w * rhs.time_derivative(t, x);
  };
  return out;
}

void ScalarField::self_test(const Vec3& lo, const Vec3& hi, int points,
                            unsigned seed, double rel_tol) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int k = 0; k < points; ++k) {
    Vec3 x;
    for (int i = 0; i < 3; ++i) x[i] = lo[i] + dist(rng) * (hi[i] - lo[i]);
    double t = dist(rng);
    Vec3 ga = grad ? grad(t, x) : Vec3::Zero();
    if (!grad) continue;
    Vec3 gf;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = 1.0;
      gf[i] = fd_central([&](double a) { return value(t, x + a * e); }, 0.0,
                         kFdStep);
    }
    double scale = std::max(1.0, ga.norm());
    if ((ga - gf).norm() > rel_tol * scale) {
      std::ostringstream os;
      os << "scalar field gradient inconsistent with finite differences: |d|="
         << (ga - gf).norm();
      throw NumericError(os.str());
    }
  }
}

Mat3 VectorField::gradient(double t, const Vec3& x) const {
  if (grad) return grad(t, x);
  Mat3 G;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    Vec3 dp = value(t, x + kFdStep * e);
    Vec3 dm = value(t, x - kFdStep * e);
    G.row(i) = ((dp - dm) / (2 * kFdStep)).transpose();
  }
  return G;
}

std::array<Mat3, 3> VectorField::hessian(double t, const Vec3& x) const {
  if (hess) return hess(t, x);
  std::array<Mat3, 3> H;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = 1.0;
    Mat3 gp = gradient(t, x + kFdStep * e);
    Mat3 gm = gradient(t, x - kFdStep * e);
    Mat3 d = (gp - gm) / (2 * kFdStep);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) H[k](i, j) = d(i, k);
  }
  for (int k = 0; k < 3; ++k) H[k] = 0.5 * (H[k] + H[k].transpose()).eval();
  return H;
}

Vec3 VectorField::time_derivative(double t, const Vec3& x) const {
  if (dt) return dt(t, x);
  Vec3 d;
  for (int k = 0; k < 3; ++k)
    d[k] = fd_central([&](double a) { return value(a, x)[k]; }, t, kFdStep);
  return d;
}

Vec3 VectorField::laplacian(double t, const Vec3& x) const {
  auto H = hessian(t, x);
  return Vec3(H[0].trace(), H[1].trace(), H[2].trace());
}

double VectorField::divergence(double t, const Vec3& x) const {
  return gradient(t, x).trace();
}

VectorField VectorField::zero() {
  VectorField f;
  f.value = [](double, const Vec3&) { return Vec3::Zero(); };
  f.grad = [](double, const Vec3&) { return Mat3::Zero(); };
  f.hess = [](double, const Vec3&) {
    return std::array<Mat3, 3>{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  };
  f.dt = [](double, const Vec3&) { return Vec3::Zero(); };
  return f;
}

VectorField VectorField::from_components(const ScalarField& f0,
                                         const ScalarField& f1,
                                         const ScalarField& f2) {
  VectorField out;
  out.value = [f0, f1, f2](double t, const Vec3& x) {
    return Vec3(f0.value(t, x), f1.value(t, x), f2.value(t, x));
  };
  out.grad = [f0, f1, f2](double t, const Vec3& x) -> Mat3 {
    Mat3 G;
    G.col(0) = f0.gradient(t, x);
    G.col(1) = f1.gradient(t, x);
    G.col(2) = f2.gradient(t, x);
    return G;
  };
  out.hess = [f0, f1, f2](double t, const Vec3& x) -> std::array<Mat3, 3> {
    return {f0.hessian(t, x), f1.hessian(t, x), f2.hessian(t, x)};
  };
  out.dt = [f0, f1, f2](double t, const Vec3& x) {
    return Vec3(f0.time_derivative(t, x), f1.time_derivative(t, x),
                f2.time_derivative(t, x));
  };
  return out;
}

VectorField VectorField::scaled(double a) const {
  VectorField self = *this;
  VectorField out;
  out.value = [self, a](double t, const Vec3& x) -> Vec3 {
    return a * self.value(t, x);
  };
  out.grad = [self, a](double t, const Vec3& x) -> Mat3 {
    return a * self.gradient(t, x);
  };
  out.hess = [self, a](double t, const Vec3& x) {
    auto H = self.hessian(t, x);
    for (auto& m : H) m *= a;
    return H;
  };
  out.dt = [self, a](double t, const Vec3& x) -> Vec3 {
    return a * self.time_derivative(t, x);
  };
  return out;
}

VectorField VectorField::plus(const VectorField& other, double w) const {
  VectorField lhs = *this, rhs = other;
  VectorField out;
  out.value = [lhs, rhs, w](double t, const Vec3& x) -> Vec3 {
    return lhs.value(t, x) + w * rhs.value(t, x);
  };
  out.grad = [lhs, rhs, w](double t, const Vec3& x) -> Mat3 {
    return lhs.gradient(t, x) + w * rhs.gradient(t, x);
  };
  out.hess = [lhs, rhs, w](double t, const Vec3& x) {
    auto H = lhs.hessian(t, x);
    auto H2 = rhs.hessian(t, x);
    for (int k = 0; k < 3; ++k) H[k] += w * H2[k];
    return H;
  };
  out.dt = [lhs, rhs, w](double t, const Vec3& x) -> Vec3 {
    return lhs.time_derivative(t, x) + w * rhs.time_derivative(t, x);
  };
  return out;
}

void VectorField::self_test(const Vec3& lo, const Vec3& hi, int points,
                            unsigned seed, double rel_tol) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int k = 0; k < points; ++k) {
    Vec3 x;
    for (int i = 0; i < 3; ++i) x[i] = lo[i] + dist(rng) * (hi[i] - lo[i]);
    double t = dist(rng);
    if (!grad) continue;
    Mat3 ga = grad(t, x);
    Mat3 gf;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = 1.0;
      gf.row(i) =
          ((value(t, x + kFdStep * e) - value(t, x - kFdStep * e)) /
           (2 * kFdStep))
              .transpose();
    }
    double scale = std::max(1.0, ga.norm());
    if ((ga - gf).norm() > rel_tol * scale)
      throw NumericError("vector field gradient inconsistent with FD");
  }
}

// --- random analytic fields -------------------------------------------------

namespace {

struct TrigTerm {
  double a;
  Vec3 k;
  double phase;
  double omega;
};

std::vector<TrigTerm> make_terms(unsigned seed, int terms, double amplitude,
                                 double time_rate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<TrigTerm> out;
  for (int i = 0; i < terms; ++i) {
    TrigTerm t;
    t.a = amplitude * unif(rng) / terms;
    t.k = Vec3(unif(rng), unif(rng), unif(rng)) * 2.0;
    t.phase = kPi * unif(rng);
    t.omega = time_rate * unif(rng);
    out.push_back(t);
  }
  return out;
}

ScalarField field_from_terms(std::vector<TrigTerm> terms) {
  ScalarField f;
  f.value = [terms](double t, const Vec3& x) {
    double v = 0;
    for (const auto& tm : terms)
      v += tm.a * std::sin(tm.k.dot(x) + tm.phase + tm.omega * t);
    return v;
  };
  f.grad = [terms](double t, const Vec3& x) -> Vec3 {
    Vec3 g = Vec3::Zero();
    for (const auto& tm : terms)
      g += tm.a * std::cos(tm.k.dot(x) + tm.phase + tm.omega * t) * tm.k;
    return g;
  };
  f.hess = [terms](double t, const Vec3& x) -> Mat3 {
    Mat3 H = Mat3::Zero();
    for (const auto& tm : terms)
      H += -tm.a * std::sin(tm.k.dot(x) + tm.phase + tm.omega * t) * tm.k *
           tm.k.transpose();
    return H;
  };
  f.dt = [terms](double t, const Vec3& x) {
    double v = 0;
    for (const auto& tm : terms)
      v += tm.a * tm.omega * std::cos(tm.k.dot(x) + tm.phase + tm.omega * t);
    return v;
  };
  return f;
}

}  // namespace

ScalarField random_scalar_field(unsigned seed, int terms, double amplitude,
                                double time_rate) {
  return field_from_terms(make_terms(seed, terms, amplitude, time_rate));
}

VectorField random_vector_field(unsigned seed, int terms, double amplitude,
                                double time_rate) {
  return VectorField::from_components(
      random_scalar_field(seed * 3 + 0, terms, amplitude, time_rate),
      random_scalar_field(seed * 3 + 1, terms, amplitude, time_rate),
      random_scalar_field(seed * 3 + 2, terms, amplitude, time_rate));
}

VectorField random_solenoidal_field(unsigned seed, int terms, double amplitude,
                                    double time_rate) {
  // curl of a random potential: components of the potential are trig terms,
  // so the curl has exact derivatives assembled term by term.
  auto a0 = make_terms(seed * 7 + 0, terms, amplitude, time_rate);
  auto a1 = make_terms(seed * 7 + 1, terms, amplitude, time_rate);
  auto a2 = make_terms(seed * 7 + 2, terms, amplitude, time_rate);
  ScalarField p0 = field_from_terms(a0), p1 = field_from_terms(a1),
              p2 = field_from_terms(a2);
  // curl A = (d1 A2 - d2 A1, d2 A0 - d0 A2, d0 A1 - d1 A0)
  VectorField out;
  auto comp = [p0, p1, p2](double t, const Vec3& x) -> Vec3 {
    Vec3 g0 = p0.gradient(t, x), g1 = p1.gradient(t, x),
         g2 = p2.gradient(t, x);
    return Vec3(g2[1] - g1[2], g0[2] - g2[0], g1[0] - g0[1]);
  };
  out.value = comp;
  out.grad = [p0, p1, p2](double t, const Vec3& x) -> Mat3 {
    Mat3 H0 = p0.hessian(t, x), H1 = p1.hessian(t, x), H2 = p2.hessian(t, x);
    Mat3 G;  // G(i, j) = d_i (curl A)_j
    for (int i = 0; i < 3; ++i) {
      G(i, 0) = H2(i, 1) - H1(i, 2);
      G(i, 1) = H0(i, 2) - H2(i, 0);
      G(i, 2) = H1(i, 0) - H0(i, 1);
    }
    return G;
  };
  // Third derivatives of the potentials: assemble from the trig terms.
  auto third = [](const std::vector<TrigTerm>& terms, double t, const Vec3& x,
                  int i, int j, int k) {
    double v = 0;
    for (const auto& tm : terms)
      v += -tm.a * std::cos(tm.k.dot(x) + tm.phase + tm.omega * t) * tm.k[i] *
           tm.k[j] * tm.k[k];
    return v;
  };
  out.hess = [a0, a1, a2, third](double t,
                                 const Vec3& x) -> std::array<Mat3, 3> {
    std::array<Mat3, 3> H;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        H[0](i, j) = third(a2, t, x, i, j, 1) - third(a1, t, x, i, j, 2);
        H[1](i, j) = third(a0, t, x, i, j, 2) - third(a2, t, x, i, j, 0);
        H[2](i, j) = third(a1, t, x, i, j, 0) - third(a0, t, x, i, j, 1);
      }
    }
    return H;
  };
  out.dt = [p0, p1, p2](double t, const Vec3& x) -> Vec3 {
    const double dt = 1e-5;
    auto comp_at = [&](double tt) {
      Vec3 g0 = p0.gradient(tt, x), g1 = p1.gradient(tt, x),
           g2 = p2.gradient(tt, x);
      return Vec3(g2[1] - g1[2], g0[2] - g2[0], g1[0] - g0[1]);
    };
    return (comp_at(t + dt) - comp_at(t - dt)) / (2 * dt);
  };
  return out;
}

}  // namespace hanzawa
