#include "gafs/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace gafs {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(Complex z) { return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")"; }

}  // namespace

CharFn CharFn::fn(Complex a, SpectralData data) {
  data.validate();
  CharFn f;
  f.kind_ = Kind::FN;
  f.c0_ = a;
  f.c1_ = std::sqrt(static_cast<double>(data.n)) - a;
  f.data_ = std::move(data);
  return f;
}

CharFn CharFn::gn(Complex a, SpectralData data) {
  data.validate();
  CharFn f;
  f.kind_ = Kind::GN;
  const Complex ap = a / std::sqrt(2.0);
  f.c0_ = ap;
  f.c1_ = std::sqrt(static_cast<double>(data.n) / 2.0) - ap;
  f.data_ = std::move(data);
  return f;
}

CharFn CharFn::series(VectorXc coeffs) {
  if (coeffs.size() < 1) throw InvalidDimension("series needs at least one coefficient");
  CharFn f;
  f.kind_ = Kind::Series;
  f.c0_ = coeffs[0];
  f.coeffs_ = std::move(coeffs);
  return f;
}

namespace {

void check_pole_free(Complex z) {
  if (!(std::abs(z) < 1.0 - kUnitDiskMargin))
    throw PoleProximityError("evaluation point " + fmt(z) + " is not inside the unit disk");
}

}  // namespace

Eval CharFn::eval(Complex z) const {
  if (kind_ == Kind::Series) {
    Complex v{0.0, 0.0};
    Complex dv{0.0, 0.0};
    for (Index k = coeffs_.size() - 1; k >= 0; --k) {
      dv = dv * z + v;
      v = v * z + coeffs_[k];
    }
    return {v, dv};
  }
  check_pole_free(z);
  Complex s{0.0, 0.0};
  Complex ds{0.0, 0.0};
  for (Index j = 0; j < data_.phases.size(); ++j) {
    const Complex cph = std::conj(data_.phases[j]);
    const Complex u = z * cph;
    const Complex den = 1.0 - u;
    if (std::abs(den) <= kPoleMargin) throw PoleProximityError("evaluation point " + fmt(z) + " is at a pole");
    const Complex inv = 1.0 / den;
    s += data_.weights[j] * u * inv;
    ds += data_.weights[j] * cph * inv * inv;
  }
  return {c0_ - c1_ * s, -c1_ * ds};
}

double CharFn::scale(Complex z) const {
  if (kind_ == Kind::Series) {
    double s = 0.0;
    double zk = 1.0;
    const double r = std::abs(z);
    for (Index k = 0; k < coeffs_.size(); ++k, zk *= r) s += std::abs(coeffs_[k]) * zk;
    return s;
  }
  double s = 0.0;
  for (Index j = 0; j < data_.phases.size(); ++j) {
    const Complex u = z * std::conj(data_.phases[j]);
    s += data_.weights[j] * std::abs(u / (1.0 - u));
  }
  return std::abs(c0_) + std::abs(c1_) * s;
}

Complex scaled_resolvent_sum(const SpectralData& data, Complex z) {
  check_pole_free(z);
  Complex s{0.0, 0.0};
  for (Index j = 0; j < data.phases.size(); ++j) {
    const Complex u = z * std::conj(data.phases[j]);
    s += data.weights[j] * u / (1.0 - u);
  }
  return std::sqrt(static_cast<double>(data.n)) * s;
}

// ---------------------------------------------------------------------------
// Argument principle on circles: trapezoid rule for f'/f, cross-checked with
// the winding of the sampled values.

namespace {

Index circle_winding(const CharFn& f, Complex c, double r) {
  for (Index nodes = kMinContourNodes; nodes <= kMaxContourNodes; nodes *= 2) {
    std::vector<Complex> vals(static_cast<std::size_t>(nodes));
    Complex integral{0.0, 0.0};
    bool degenerate = false;
    for (Index j = 0; j < nodes; ++j) {
      const Complex w = std::polar(r, kTwoPi * static_cast<double>(j) / static_cast<double>(nodes));
      const Eval e = f.eval(c + w);
      if (e.value == Complex{0.0, 0.0}) {
        degenerate = true;
        break;
      }
      vals[static_cast<std::size_t>(j)] = e.value;
      integral += e.derivative / e.value * w;
    }
    if (degenerate) break;
    integral /= static_cast<double>(nodes);

    double phase = 0.0;
    double max_step = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) {
      const double step = std::arg(vals[(j + 1) % vals.size()] / vals[j]);
      phase += step;
      max_step = std::max(max_step, std::abs(step));
    }
    const double winding = phase / kTwoPi;
    const double rounded = std::round(integral.real());
    if (max_step < kPi / 3.0 && std::abs(integral.real() - rounded) < kRoundingResidual &&
        std::abs(integral.imag()) < kRoundingResidual && std::abs(winding - rounded) < 1e-6)
      return static_cast<Index>(rounded);
  }
  throw ContourIndeterminateError("argument principle did not resolve on |z - " + fmt(c) +
                                  "| = " + std::to_string(r));
}

}  // namespace

Index count_zeros(const CharFn& f, const Disk& disk) {
  if (!(disk.radius > 0.0)) throw InvalidParameter("disk radius must be positive");
  const Index base = circle_winding(f, disk.center, disk.radius);
  const Index lo = circle_winding(f, disk.center, disk.radius * (1.0 - kContourJitter));
  const Index hi = circle_winding(f, disk.center, disk.radius * (1.0 + kContourJitter));
  if (lo != base || hi != base)
    throw ContourIndeterminateError("zero within jitter band of |z - " + fmt(disk.center) +
                                    "| = " + std::to_string(disk.radius));
  if (base < 0) throw NumericalError("negative zero count; function has poles inside the disk");
  return base;
}

// ---------------------------------------------------------------------------
// Sector subdivision. Sectors are polar boxes about the disk center, so every
// contour stays inside the disk and away from the poles of f_N on the circle.

namespace {

struct Sector {
  double r0, r1, t0, t1;
};

class ZeroFinder {
 public:
  ZeroFinder(const CharFn& f, const Disk& d) : f_(f), c_(d.center), radius_(d.radius) {}

  Complex at(double r, double t) const { return c_ + std::polar(r, t); }

  // Total change of arg f along z(s), s in [0, 1], length `len`.
  double path_phase(const auto& path, double len) const {
    const int pieces = std::max(8, static_cast<int>(std::ceil(64.0 * len / radius_)));
    double total = 0.0;
    Point prev = sample(path, 0.0);
    for (int i = 1; i <= pieces; ++i) {
      const Point next = sample(path, static_cast<double>(i) / pieces);
      total += refine(path, len, prev, next, 0);
      prev = next;
    }
    return total;
  }

  Index sector_count(const Sector& s) const {
    double phase = 0.0;
    const double dt = s.t1 - s.t0;
    phase += path_phase([&](double u) { return at(s.r1, s.t0 + u * dt); }, s.r1 * dt);
    phase += path_phase([&](double u) { return at(s.r1 + u * (s.r0 - s.r1), s.t1); }, s.r1 - s.r0);
    if (s.r0 > 0.0) phase += path_phase([&](double u) { return at(s.r0, s.t1 - u * dt); }, s.r0 * dt);
    phase += path_phase([&](double u) { return at(s.r0 + u * (s.r1 - s.r0), s.t0); }, s.r1 - s.r0);
    const double w = phase / kTwoPi;
    const double k = std::round(w);
    if (std::abs(w - k) > 1e-3 || k < 0.0) throw ContourIndeterminateError("sector winding is not an integer");
    return static_cast<Index>(k);
  }

  void solve(const Sector& s, Index count, int depth, std::vector<Complex>& out) const {
    if (count == 0) return;
    const double rm = 0.5 * (s.r0 + s.r1);
    const double tm = 0.5 * (s.t0 + s.t1);
    const double diameter = std::max(s.r1 - s.r0, s.r1 * (s.t1 - s.t0));
    if (count == 1) {
      Complex z;
      if (newton(at(rm, tm), z) && inside(s, z)) {
        out.push_back(z);
        return;
      }
    }
    if (diameter < 1e-12 * std::max(1.0, radius_) || depth > 200) {
      Complex z = at(rm, tm);
      Complex polished;
      if (newton(z, polished) && std::abs(polished - z) < 1e-8) z = polished;
      if (std::abs(f_.eval(z).value) > 1e-6 * f_.scale(z))
        throw ConvergenceError("zero cluster of multiplicity " + std::to_string(count) + " at " + fmt(z) +
                               " could not be resolved");
      for (Index i = 0; i < count; ++i) out.push_back(z);
      return;
    }
    split(s, count, depth, out);
  }

  void split(const Sector& s, Index count, int depth, std::vector<Complex>& out) const {
    static constexpr double kFractions[] = {0.5, 0.5 + 1.0 / 17.0, 0.5 - 1.0 / 13.0, 0.5 + 1.0 / 7.0, 0.5 - 1.0 / 5.0};
    for (double fr : kFractions) {
      const double rs = s.r0 + fr * (s.r1 - s.r0);
      const double ts = s.t0 + fr * (s.t1 - s.t0);
      const Sector kids[4] = {{s.r0, rs, s.t0, ts}, {s.r0, rs, ts, s.t1}, {rs, s.r1, s.t0, ts}, {rs, s.r1, ts, s.t1}};
      Index counts[4];
      try {
        Index total = 0;
        for (int i = 0; i < 4; ++i) total += counts[i] = sector_count(kids[i]);
        if (total != count) continue;
      } catch (const ContourIndeterminateError&) {
        continue;
      }
      for (int i = 0; i < 4; ++i) solve(kids[i], counts[i], depth + 1, out);
      return;
    }
    throw ContourIndeterminateError("sector subdivision failed near " + fmt(at(0.5 * (s.r0 + s.r1), 0.5 * (s.t0 + s.t1))));
  }

  std::vector<Complex> run(Index total) const {
    std::vector<Complex> out;
    const Sector whole{0.0, radius_, 0.1, 0.1 + kTwoPi};
    split(whole, total, 0, out);
    return out;
  }

 private:
  struct Point {
    double s;
    Complex z;
    Complex value;
    Complex dlog;  // f'/f
  };

  Point sample(const auto& path, double s) const {
    const Complex z = path(s);
    const Eval e = f_.eval(z);
    if (!(std::abs(e.value) > 1e-14 * f_.scale(z))) throw ContourIndeterminateError("zero on sector boundary");
    return {s, z, e.value, e.derivative / e.value};
  }

  double refine(const auto& path, double len, const Point& a, const Point& b, int depth) const {
    const Point m = sample(path, 0.5 * (a.s + b.s));
    const double whole = std::arg(b.value / a.value);
    const double left = std::arg(m.value / a.value);
    const double right = std::arg(b.value / m.value);
    const double h = len * (b.s - a.s);
    const double slope = std::max({std::abs(a.dlog), std::abs(m.dlog), std::abs(b.dlog)}) * h;
    if (std::abs(whole) < kPi / 4.0 && std::abs(left + right - whole) < 1e-9 && slope < kPi / 4.0) return whole;
    if (depth > 50) throw ContourIndeterminateError("phase tracking did not resolve");
    return refine(path, len, a, m, depth + 1) + refine(path, len, m, b, depth + 1);
  }

  bool inside(const Sector& s, Complex z) const {
    const double tol = 1e-10 * std::max(1.0, radius_);
    const double r = std::abs(z - c_);
    if (r < s.r0 - tol || r > s.r1 + tol) return false;
    if (r < tol) return s.r0 < tol;
    double t = std::arg(z - c_);
    while (t < s.t0 - tol / r) t += kTwoPi;
    while (t > s.t1 + tol / r) t -= kTwoPi;
    return t >= s.t0 - tol / r && t <= s.t1 + tol / r;
  }

  bool newton(Complex z0, Complex& root) const {
    Complex z = z0;
    try {
      for (int it = 0; it < 100; ++it) {
        const Eval e = f_.eval(z);
        if (e.derivative == Complex{0.0, 0.0}) return false;
        const Complex step = e.value / e.derivative;
        z -= step;
        if (std::abs(z - c_) > 2.0 * radius_ + 1.0) return false;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
          // one polishing step after the update stalls
          const Eval p = f_.eval(z);
          if (p.derivative != Complex{0.0, 0.0}) z -= p.value / p.derivative;
          root = z;
          return std::abs(f_.eval(z).value) <= kNewtonResidual * f_.scale(z);
        }
      }
      root = z;
      return std::abs(f_.eval(z).value) <= kNewtonResidual * f_.scale(z);
    } catch (const PoleProximityError&) {
      return false;
    }
  }

  const CharFn& f_;
  Complex c_;
  double radius_;
};

}  // namespace

PointSet find_zeros(const CharFn& f, const Disk& disk) {
  const Index total = count_zeros(f, disk);
  PointSet out;
  out.provenance = Provenance::Rootfinder;
  if (total == 0) return out;
  out.points = ZeroFinder(f, disk).run(total);
  if (static_cast<Index>(out.points.size()) != total)
    throw ConvergenceError("located " + std::to_string(out.points.size()) + " of " + std::to_string(total) + " zeros");
  return out;
}

Index count_zeros_robust(const CharFn& f, const Disk& disk) {
  try {
    return count_zeros(f, disk);
  } catch (const ContourIndeterminateError&) {
  }
  for (int k = 1; k <= 5; ++k) {
    const Disk wider{disk.center, disk.radius * (1.0 + 2e-3 * k)};
    try {
      return static_cast<Index>(find_zeros(f, wider).count_in(disk));
    } catch (const ContourIndeterminateError&) {
    }
  }
  throw ContourIndeterminateError("zero count in |z - " + fmt(disk.center) + "| < " + std::to_string(disk.radius) +
                                  " unresolved after widening");
}

PointSet find_zeros_robust(const CharFn& f, const Disk& disk) {
  try {
    return find_zeros(f, disk);
  } catch (const ContourIndeterminateError&) {
  }
  for (int k = 1; k <= 5; ++k) {
    const Disk wider{disk.center, disk.radius * (1.0 + 2e-3 * k)};
    try {
      return find_zeros(f, wider).restricted_to(disk);
    } catch (const ContourIndeterminateError&) {
    }
  }
  throw ContourIndeterminateError("zeros in |z - " + fmt(disk.center) + "| < " + std::to_string(disk.radius) +
                                  " unresolved after widening");
}

// ---------------------------------------------------------------------------

namespace {

// Golub-Welsch on [0, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  x.resize(static_cast<std::size_t>(m));
  w.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    x[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()[k] + 1.0);
    const double v0 = es.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = v0 * v0;  // 2 v0^2 on [-1, 1], halved
  }
}

double disk_integral(const CharFn& f, Complex c, double radius, int p, int m) {
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  const int nt = 4 * m;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double rho = radius * x[static_cast<std::size_t>(i)];
    double ring = 0.0;
    for (int j = 0; j < nt; ++j)
      ring += std::pow(std::abs(f.eval(c + std::polar(rho, kTwoPi * j / nt)).value), p);
    sum += w[static_cast<std::size_t>(i)] * rho * ring * (kTwoPi / nt);
  }
  return sum * radius;
}

}  // namespace

SupnormCheck supnorm_integral_check(const CharFn& f, const Disk& k, double delta, int p) {
  if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
  if (p < 1) throw InvalidParameter("p must be a positive integer");
  if (!(k.radius >= 0.0)) throw InvalidParameter("K radius must be nonnegative");

  SupnormCheck out;
  double sup = std::abs(f.eval(k.center).value);
  if (k.radius > 0.0) {
    constexpr int kRings = 64;
    constexpr int kAngles = 2048;
    for (int i = 1; i <= kRings; ++i) {
      const double rho = k.radius * i / kRings;
      for (int j = 0; j < kAngles; ++j)
        sup = std::max(sup, std::abs(f.eval(k.center + std::polar(rho, kTwoPi * j / kAngles)).value));
    }
  }
  out.lhs = std::pow(sup, p);

  const double big = k.radius + delta;
  double prev = disk_integral(f, k.center, big, p, 16);
  double change = 1.0;
  for (int m = 32; m <= 512; m *= 2) {
    const double cur = disk_integral(f, k.center, big, p, m);
    change = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
    prev = cur;
    if (change < 1e-10) break;
  }
  if (change > kSupnormTolerance) throw ConvergenceError("area quadrature did not converge");
  out.rhs = prev / (kPi * delta * delta);
  out.holds = out.lhs <= out.rhs * (1.0 + kSupnormTolerance);
  return out;
}

}  // namespace gafs
