#include "hanzawa/norms.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace hanzawa {

Sampled::Sampled(std::vector<Axis> axes, bool leading_time)
    : axes_(std::move(axes)), has_time_(leading_time) {
  if (axes_.empty() || axes_.size() > 4)
    throw ParamError("sampled functions carry 1..4 axes");
  for (const Axis& a : axes_)
    if (a.n < 2 || !(a.b > a.a)) throw ParamError("bad axis");
  size_t total = 1;
  strides_.assign(axes_.size(), 1);
  for (int i = int(axes_.size()) - 1; i >= 0; --i) {
    strides_[i] = total;
    total *= axes_[i].n;
  }
  data_.assign(total, 0.0);
}

Sampled Sampled::from_function(
    std::vector<Axis> axes, bool leading_time,
    const std::function<double(const std::vector<double>&)>& f) {
  Sampled out(std::move(axes), leading_time);
  std::vector<int> idx(out.axes_.size(), 0);
  std::vector<double> coords(out.axes_.size());
  for (size_t flat = 0; flat < out.data_.size(); ++flat) {
    out.coords_of(flat, idx);
    for (size_t d = 0; d < out.axes_.size(); ++d)
      coords[d] = out.axes_[d].coord(idx[d]);
    out.data_[flat] = f(coords);
  }
  return out;
}

size_t Sampled::index(const std::vector<int>& idx) const {
  size_t flat = 0;
  for (size_t d = 0; d < axes_.size(); ++d) flat += idx[d] * strides_[d];
  return flat;
}

void Sampled::coords_of(size_t flat, std::vector<int>& idx) const {
  idx.resize(axes_.size());
  for (size_t d = 0; d < axes_.size(); ++d) {
    idx[d] = int(flat / strides_[d]);
    flat %= strides_[d];
  }
}

Sampled Sampled::derivative(int axis) const {
  Sampled out = *this;
  const Axis& ax = axes_[axis];
  const double dx = ax.dx();
  std::vector<int> idx;
  for (size_t flat = 0; flat < data_.size(); ++flat) {
    coords_of(flat, idx);
    int i = idx[axis];
    auto at = [&](int ii) {
      std::vector<int> j = idx;
      if (ax.periodic)
        j[axis] = ((ii % ax.n) + ax.n) % ax.n;
      else
        j[axis] = ii;
      return data_[index(j)];
    };
    double v;
    if (ax.periodic || (i > 0 && i < ax.n - 1)) {
      v = (at(i + 1) - at(i - 1)) / (2 * dx);
    } else if (i == 0) {
      v = (-3 * at(0) + 4 * at(1) - at(2)) / (2 * dx);
    } else {
      v = (3 * at(i) - 4 * at(i - 1) + at(i - 2)) / (2 * dx);
    }
    out.data_[flat] = v;
  }
  return out;
}

double Sampled::sup_norm() const {
  double m = 0;
  for (double v : data_) {
    if (!std::isfinite(v)) throw NumericError("non-finite sample");
    m = std::max(m, std::abs(v));
  }
  return m;
}

double Sampled::lq_norm(double q) const {
  std::vector<int> idx;
  double acc = 0;
  for (size_t flat = 0; flat < data_.size(); ++flat) {
    coords_of(flat, idx);
    double w = 1;
    for (size_t d = 0; d < axes_.size(); ++d) w *= axes_[d].weight(idx[d]);
    acc += w * std::pow(std::abs(data_[flat]), q);
  }
  return std::pow(acc, 1.0 / q);
}

double Sampled::lq_space(double q, int time_index) const {
  if (!has_time_) return lq_norm(q);
  std::vector<int> idx;
  double acc = 0;
  for (size_t flat = 0; flat < data_.size(); ++flat) {
    coords_of(flat, idx);
    if (idx[0] != time_index) continue;
    double w = 1;
    for (size_t d = 1; d < axes_.size(); ++d) w *= axes_[d].weight(idx[d]);
    acc += w * std::pow(std::abs(data_[flat]), q);
  }
  return std::pow(acc, 1.0 / q);
}

Sampled Sampled::truncated_time(double t_max) const {
  if (!has_time_) throw ParamError("no time axis to truncate");
  const Axis& t = axes_[0];
  int keep = 2;
  for (int i = 0; i < t.n; ++i)
    if (t.coord(i) <= t_max + 1e-12) keep = i + 1;
  keep = std::max(keep, 2);
  std::vector<Axis> ax = axes_;
  ax[0].n = keep;
  ax[0].b = t.coord(keep - 1);
  Sampled out(ax, true);
  std::vector<int> idx;
  for (size_t flat = 0; flat < out.data_.size(); ++flat) {
    out.coords_of(flat, idx);
    out.data_[flat] = data_[index(idx)];
  }
  return out;
}

Sampled Sampled::scaled(double a) const {
  Sampled out = *this;
  for (double& v : out.data_) v *= a;
  return out;
}

Sampled Sampled::plus(const Sampled& other, double w) const {
  if (other.data_.size() != data_.size())
    throw ShapeError("sampled functions differ in shape");
  Sampled out = *this;
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] += w * other.data_[i];
  return out;
}

// --- NormSpec ----------------------------------------------------------------

NormSpec NormSpec::parse(const std::string& text) {
  NormSpec spec;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ParamError("empty norm spec");
  const std::string& head = parts[0];
  auto num = [&](size_t i, double dflt) {
    return parts.size() > i ? std::stod(parts[i]) : dflt;
  };
  if (head == "Ck") {
    spec.family = Family::Ck;
    spec.k = int(num(1, 0));
  } else if (head == "Lq") {
    spec.family = Family::Lq;
    spec.q = num(1, 2);
    if (spec.q < 1) throw ParamError("q must be >= 1");
  } else if (head == "W") {
    spec.family = Family::Wsq;
    spec.s = num(1, 0.5);
    spec.q = num(2, 2);
    double frac = spec.s - std::floor(spec.s);
    if (spec.q < 1) throw ParamError("q must be >= 1");
    if (frac <= 0 || frac >= 1)
      throw ParamError("Wsq expects a non-integer order");
  } else if ((head.size() >= 2) &&
             (head[0] == 'W' || head[0] == 'S' || head[0] == 'C') &&
             std::isdigit(static_cast<unsigned char>(head[1]))) {
    spec.family = Family::Composite;
    spec.composite = head;
    spec.q = num(1, 6);
  } else {
    throw ParamError("unknown norm spec: " + text);
  }
  return spec;
}

// --- Gagliardo ----------------------------------------------------------------

double gagliardo_seminorm(const Sampled& f, double s, double q) {
  if (f.has_time()) throw ParamError("spatial seminorm on a time-carrying sample");
  if (!(s > 0) || !(s < 1)) throw ParamError("Gagliardo order must be in (0,1)");
  if (q < 1) throw ParamError("q must be >= 1");
  const auto& axes = f.axes();
  for (const Axis& a : axes)
    if (a.n < 8) throw ResolutionError("need at least 8 nodes per dimension");
  const int n_dim = int(axes.size());
  const size_t N = f.size();
  std::vector<int> idx;
  // precompute coordinates and weights
  std::vector<std::vector<double>> coord(N), wts;
  std::vector<double> weight(N, 1.0);
  std::vector<std::vector<double>> pos(N);
  for (size_t a = 0; a < N; ++a) {
    f.coords_of(a, idx);
    pos[a].resize(n_dim);
    for (int d = 0; d < n_dim; ++d) {
      pos[a][d] = axes[d].coord(idx[d]);
      weight[a] *= axes[d].weight(idx[d]);
    }
  }
  const double expo = n_dim + s * q;
  double acc = 0;
  for (size_t a = 0; a < N; ++a) {
    for (size_t b2 = 0; b2 < N; ++b2) {
      if (a == b2) continue;  // diagonal cell skipped
      double dist2 = 0;
      for (int d = 0; d < n_dim; ++d) dist2 += sq(pos[a][d] - pos[b2][d]);
      double dist = std::sqrt(dist2);
      double diff = std::abs(f[a] - f[b2]);
      acc += weight[a] * weight[b2] * std::pow(diff, q) / std::pow(dist, expo);
    }
  }
  return std::pow(acc, 1.0 / q);
}

double gagliardo_time_seminorm(const Sampled& f, double s, double q) {
  if (!f.has_time()) throw ParamError("time seminorm needs a time axis");
  if (!(s > 0) || !(s < 1)) throw ParamError("Gagliardo order must be in (0,1)");
  const Axis& t = f.axes()[0];
  const int nt = t.n;
  std::vector<double> fiber(nt);
  // ||f(t_i) - f(t_j)||_Lq over space for all pairs
  double acc = 0;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nt; ++j) {
      if (i == j) continue;
      double norm_q = 0;
      {
        std::vector<int> idx;
        double accq = 0;
        for (size_t flat = 0; flat < f.size(); ++flat) {
          f.coords_of(flat, idx);
          if (idx[0] != i) continue;
          std::vector<int> jdx = idx;
          jdx[0] = j;
          double w = 1;
          for (size_t d = 1; d < f.axes().size(); ++d)
            w *= f.axes()[d].weight(idx[d]);
          accq += w * std::pow(std::abs(f[flat] - f[f.index(jdx)]), q);
        }
        norm_q = accq;  // ||f(ti)-f(tj)||_Lq^q
      }
      double dt = std::abs(t.coord(i) - t.coord(j));
      acc += t.weight(i) * t.weight(j) * norm_q / std::pow(dt, 1.0 + s * q);
    }
  }
  return std::pow(acc, 1.0 / q);
}

double surface_gagliardo_seminorm(const ReferenceSurface& S,
                                  const GridScalar& f, double s, double q) {
  if (!(s > 0) || !(s < 1)) throw ParamError("Gagliardo order must be in (0,1)");
  const ParamGrid& g = f.grid();
  const int N = g.size();
  std::vector<Vec3> pts(N);
  std::vector<double> w(N);
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      Vec2 sp = g.node(i, j);
      pts[g.index(i, j)] = S.point(sp);
      Mat32 J = S.jacobian(sp);
      double area = J.col(0).cross(J.col(1)).norm();
      w[g.index(i, j)] = area * g.du() * g.dv();
    }
  }
  const double expo = 2.0 + s * q;  // surface dimension 2
  double acc = 0;
  for (int a = 0; a < N; ++a) {
    for (int b2 = 0; b2 < N; ++b2) {
      if (a == b2) continue;
      double dist = (pts[a] - pts[b2]).norm();
      acc += w[a] * w[b2] *
             std::pow(std::abs(f.values()[a] - f.values()[b2]), q) /
             std::pow(dist, expo);
    }
  }
  return std::pow(acc, 1.0 / q);
}

// --- Ck and Sobolev ------------------------------------------------------------

namespace {

// all spatial derivative combinations of total order exactly `order`
void spatial_derivs_of_order(const Sampled& f, int order,
                             std::vector<Sampled>& out) {
  int d0 = f.has_time() ? 1 : 0;
  int dims = int(f.axes().size()) - d0;
  if (order == 0) {
    out.push_back(f);
    return;
  }
  std::vector<Sampled> prev;
  spatial_derivs_of_order(f, order - 1, prev);
  for (const Sampled& p : prev)
    for (int d = 0; d < dims; ++d) out.push_back(p.derivative(d0 + d));
}

double max_sup_at_order(const Sampled& f, int order) {
  std::vector<Sampled> ds;
  spatial_derivs_of_order(f, order, ds);
  double m = 0;
  for (const Sampled& d : ds) m = std::max(m, d.sup_norm());
  return m;
}

}  // namespace

double ck_norm(const Sampled& f, int k) {
  for (int j = 1; j <= k; ++j) {
    for (size_t d = 0; d < f.axes().size(); ++d)
      if (f.axes()[d].n < 2 * j + 3 && !f.axes()[d].periodic)
        throw ResolutionError("grid too coarse for the requested order");
  }
  double acc = 0;
  for (int j = 0; j <= k; ++j) acc += max_sup_at_order(f, j);
  return acc;
}

double ck_cm_norm(const Sampled& f, int k, int m) {
  if (!f.has_time()) throw ParamError("Ck([0,T];Cm) needs a time axis");
  double acc = 0;
  Sampled g = f;
  for (int i = 0; i <= k; ++i) {
    double inner = 0;
    for (int j = 0; j <= m; ++j) inner += max_sup_at_order(g, j);
    acc += inner;
    if (i < k) g = g.derivative(0);
  }
  return acc;
}

double sobolev_norm(const Sampled& f, double s, double q) {
  int k = int(std::floor(s));
  double frac = s - k;
  double acc = 0;
  for (int j = 0; j <= k; ++j) {
    std::vector<Sampled> ds;
    spatial_derivs_of_order(f, j, ds);
    for (const Sampled& d : ds) acc += d.lq_norm(q);
  }
  std::vector<Sampled> top;
  spatial_derivs_of_order(f, k, top);
  for (const Sampled& d : top) acc += gagliardo_seminorm(d, frac, q);
  return acc;
}

double sobolev_time_norm(const Sampled& f, double s, double q) {
  if (!f.has_time()) throw ParamError("time Sobolev norm needs a time axis");
  int k = int(std::floor(s));
  double frac = s - k;
  double acc = 0;
  Sampled g = f;
  for (int j = 0; j <= k; ++j) {
    acc += g.lq_norm(q);
    if (j < k) g = g.derivative(0);
  }
  if (frac > 0) {
    Sampled top = f;
    for (int j = 0; j < k; ++j) top = top.derivative(0);
    acc += gagliardo_time_seminorm(top, frac, q);
  }
  return acc;
}

// L^q in time of a spatial norm
namespace {
template <typename Fn>
double time_lq(const Sampled& f, double q, Fn&& spatial) {
  if (!f.has_time()) return spatial(f);
  const Axis& t = f.axes()[0];
  double acc = 0;
  for (int i = 0; i < t.n; ++i) {
    // build the spatial slice
    std::vector<Axis> ax(f.axes().begin() + 1, f.axes().end());
    Sampled slice(ax, false);
    std::vector<int> idx;
    size_t c = 0;
    for (size_t flat = 0; flat < f.size(); ++flat) {
      f.coords_of(flat, idx);
      if (idx[0] != i) continue;
      slice[c++] = f[flat];
    }
    acc += t.weight(i) * std::pow(spatial(slice), q);
  }
  return std::pow(acc, 1.0 / q);
}

// W^{1,q}([0,T];X)-type member: Lq of f and of d_t f in the X-norm.
template <typename Fn>
double w1q_time(const Sampled& f, double q, Fn&& spatial) {
  return time_lq(f, q, spatial) + time_lq(f.derivative(0), q, spatial);
}

double lq_spatial(const Sampled& g, double q) { return g.lq_norm(q); }

}  // namespace

CompositeResult composite_norm(const Sampled& f, const std::string& name,
                               double q) {
  CompositeResult res;
  auto push = [&](const std::string& n, double v) {
    res.members.emplace_back(n, v);
    res.value += v;
  };
  auto lq = [q](const Sampled& g) { return g.lq_norm(q); };
  auto wq = [q](double order) {
    return [order, q](const Sampled& g) { return sobolev_norm(g, order, q); };
  };
  auto w_int = [q](int order) {
    return [order, q](const Sampled& g) {
      double acc = 0;
      for (int j = 0; j <= order; ++j) {
        std::vector<Sampled> ds;
        spatial_derivs_of_order(g, j, ds);
        for (const Sampled& d : ds) acc += d.lq_norm(q);
      }
      return acc;
    };
  };

  if (name == "S1" || name == "S2") {
    push("LqLq", f.lq_norm(q));
  } else if (name == "S3") {
    push("LqW1q", time_lq(f, q, w_int(1)));
    res.omitted_member = true;
    res.note = "negative-order time member not evaluated (needs a solver)";
  } else if (name == "S4") {
    push("Wsq_t(Lq)", sobolev_time_norm(f, 0.5 - 0.5 / q, q));
    push("Lq(Wrq)", time_lq(f, q, wq(1.0 - 1.0 / q)));
  } else if (name == "S5") {
    push("Wsq_t(Lq)", sobolev_time_norm(f, 1.0 - 0.5 / q, q));
    push("Lq(Wrq)", time_lq(f, q, wq(2.0 - 1.0 / q)));
  } else if (name == "W1" || name == "W2") {
    push("W1q_t(Lq)", w1q_time(f, q, [q](const Sampled& g) {
           return lq_spatial(g, q);
         }));
    push("Lq(W2q)", time_lq(f, q, w_int(2)));
  } else if (name == "W3") {
    // homogeneous first-order member only
    std::vector<Sampled> ds;
    spatial_derivs_of_order(f, 1, ds);
    double v = 0;
    for (const Sampled& d : ds)
      v += time_lq(d, q, [q](const Sampled& g) { return g.lq_norm(q); });
    push("Lq(dotW1q)", v);
  } else if (name == "W4") {
    push("Wsq_t(Lq)", sobolev_time_norm(f, 0.5 - 0.5 / q, q));
    push("Lq(Wrq)", time_lq(f, q, wq(1.0 - 1.0 / q)));
  } else if (name == "W5") {
    push("Wsq_t(Lq)", sobolev_time_norm(f, 2.0 - 0.5 / q, q));
    {
      auto inner = wq(2.0 - 1.0 / q);
      double v = time_lq(f, q, inner) + time_lq(f.derivative(0), q, inner);
      push("W1q_t(Wsq)", v);
    }
    push("Lq(Wsq)", time_lq(f, q, wq(3.0 - 1.0 / q)));
  } else if (name == "W6") {
    push("Wsq_t(Lq)", sobolev_time_norm(f, 0.5, q));
    push("Lq(W1q)", time_lq(f, q, w_int(1)));
  } else if (name == "C0") {
    push("C0C0", ck_cm_norm(f, 0, 0));
  } else if (name == "C1") {
    push("C0C1", ck_cm_norm(f, 0, 1));
    push("C1C0", ck_cm_norm(f, 1, 0));
  } else if (name == "C2") {
    push("C0C2", ck_cm_norm(f, 0, 2));
    push("C1C1", ck_cm_norm(f, 1, 1));
  } else if (name == "C3") {
    push("C0C1", ck_cm_norm(f, 0, 1));
  } else if (name == "C4") {
    push("C0C2", ck_cm_norm(f, 0, 2));
  } else {
    throw ParamError("unknown composite norm: " + name);
  }
  return res;
}

double evaluate_norm(const Sampled& f, const NormSpec& spec) {
  switch (spec.family) {
    case NormSpec::Family::Ck:
      return f.has_time() ? ck_cm_norm(f, spec.k, spec.k) : ck_norm(f, spec.k);
    case NormSpec::Family::Lq:
      return f.lq_norm(spec.q);
    case NormSpec::Family::Wsq: {
      int k = int(std::floor(spec.s));
      double frac = spec.s - k;
      if (f.has_time()) return sobolev_time_norm(f, spec.s, spec.q);
      if (k == 0) {
        return f.lq_norm(spec.q) + gagliardo_seminorm(f, frac, spec.q);
      }
      return sobolev_norm(f, spec.s, spec.q);
    }
    case NormSpec::Family::Composite:
      return composite_norm(f, spec.composite, spec.q).value;
  }
  throw ParamError("bad norm spec");
}

// --- product probe -----------------------------------------------------------------

ProductProbeResult product_estimate_probe(double s, double r, double q,
                                          int trials, int grid_n,
                                          unsigned seed) {
  if (!(s > 0 && s < 1 && r > 0 && r < 1))
    throw ParamError("probe orders must be in (0,1)");
  ProductProbeResult res;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::vector<Axis> axes = {{0.0, 1.0, grid_n, false}, {0.0, 1.0, grid_n, false}};

  auto g_norm = [&](const Sampled& g) {
    return sobolev_time_norm(g, s, q) +
           time_lq(g, q, [&](const Sampled& sl) {
             return sl.lq_norm(q) + gagliardo_seminorm(sl, r, q);
           });
  };

  for (int trial = 0; trial < trials; ++trial) {
    // smooth f: a few low modes
    double a0 = unif(rng), a1 = unif(rng), a2 = unif(rng), w0 = unif(rng);
    auto f_fn = [=](const std::vector<double>& c) {
      return a0 + a1 * std::sin(2 * kPi * c[1] + w0) +
             a2 * std::cos(kPi * c[0] + 2 * c[1]);
    };
    // rough g: slowly decaying random Fourier series (refinable)
    int modes = std::max(4, grid_n / 2);
    std::vector<double> amp(modes), ph(modes), tph(modes);
    for (int m = 0; m < modes; ++m) {
      amp[m] = unif(rng) / std::pow(m + 1.0, r + 0.6);
      ph[m] = kPi * unif(rng);
      tph[m] = kPi * unif(rng);
    }
    auto g_fn = [=](const std::vector<double>& c) {
      double v = 0;
      for (int m = 0; m < modes; ++m)
        v += amp[m] * std::sin((m + 1) * kPi * c[1] + ph[m]) *
             std::cos((m / 2 + 1) * kPi * c[0] + tph[m]);
      return v;
    };
    Sampled f = Sampled::from_function(axes, true, f_fn);
    Sampled g = Sampled::from_function(axes, true, g_fn);
    Sampled fg = f;
    for (size_t i = 0; i < fg.size(); ++i) fg[i] = f[i] * g[i];

    double den_g = g_norm(g);
    if (den_g < 1e-14) {
      ++res.skipped;
      continue;
    }
    double den_f = ck_cm_norm(f, 1, 0) + ck_cm_norm(f, 0, 1);
    double ratio = g_norm(fg) / (den_f * den_g);
    res.ratios.push_back(ratio);
  }
  if (!res.ratios.empty()) {
    res.max_ratio = *std::max_element(res.ratios.begin(), res.ratios.end());
    std::vector<double> sorted = res.ratios;
    std::sort(sorted.begin(), sorted.end());
    res.median_ratio = sorted[sorted.size() / 2];
  }
  return res;
}

}  // namespace hanzawa
