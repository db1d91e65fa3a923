#include "zonalstab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>

#include "zonalstab/basis.hpp"
#include "zonalstab/parallel.hpp"

namespace zonal::dynamics {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Normalization of the sectoral seed: Pbar_k^k = c_k (1 - x^2)^{k/2}.
double sectoral_seed(int k) {
  double c = std::sqrt(0.5);
  for (int j = 1; j <= k; ++j) c *= std::sqrt((2.0 * j + 1.0) / (2.0 * j));
  return c;
}

}  // namespace

SpectralField laplacian(const SpectralField& f) {
  SpectralField out = f;
  const int L = f.truncation();
  for (int ell = 0; ell <= L; ++ell)
    for (int m = -ell; m <= ell; ++m) out(ell, m) *= -basis::eigen_degree(ell);
  return out;
}

SpectralField inv_laplacian(const SpectralField& w) {
  if (std::abs(w(0, 0)) > 1e-12) throw std::invalid_argument("inv_laplacian: field has nonzero mean");
  SpectralField out = w;
  out(0, 0) = 0.0;
  const int L = w.truncation();
  for (int ell = 1; ell <= L; ++ell)
    for (int m = -ell; m <= ell; ++m) out(ell, m) /= -basis::eigen_degree(ell);
  return out;
}

SpectralField zonal_project(const SpectralField& f) {
  SpectralField out(f.truncation());
  for (int ell = 0; ell <= f.truncation(); ++ell) out(ell, 0) = f(ell, 0);
  return out;
}

SpectralField x3_field(int L) {
  if (L < 1) throw std::invalid_argument("x3_field: truncation must be >= 1");
  SpectralField f(L);
  f(1, 0) = std::sqrt(4.0 * kPi / 3.0);
  return f;
}

SpectralField real_harmonic(int L, int ell, int m) {
  if (ell < 0 || ell > L || m < 0 || m > ell) throw std::invalid_argument("real_harmonic: need 0 <= m <= l <= L");
  SpectralField f(L);
  if (m == 0)
    f(ell, 0) = 1.0;
  else
    f.set_real_pair(ell, m, 0.5);
  return f;
}

SpectralField sectoral_harmonic(int L, int k) {
  if (k < 1 || k > L) throw std::invalid_argument("sectoral_harmonic: need 1 <= k <= L");
  SpectralField f(L);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  f.set_real_pair(k, k, sign * std::sqrt(2.0 * kPi) / (2.0 * sectoral_seed(k)));
  return f;
}

SpectralField stationary_fixture(int k, double Omega, int L, const std::optional<SpectralField>& g_k) {
  if (k < 2) throw std::invalid_argument("stationary_fixture: k must be >= 2 (lambda_k != 2)");
  if (k > L) throw std::invalid_argument("stationary_fixture: k exceeds the truncation");
  SpectralField g = g_k ? *g_k : sectoral_harmonic(L, k);
  if (g.truncation() != L) throw std::invalid_argument("stationary_fixture: g_k truncation mismatch");
  const double scale = std::sqrt(g.norm2());
  for (int ell = 0; ell <= L; ++ell)
    for (int m = -ell; m <= ell; ++m)
      if ((ell != k || m == 0) && std::abs(g(ell, m)) > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("stationary_fixture: g_k must be a non-zonal degree-k harmonic");
  const double lambda = basis::eigen_degree(k);
  SpectralField f = x3_field(L) * (Omega / (lambda - 2.0));
  f += g;
  return laplacian(f);
}

double weak_norm(const SpectralField& f, double s) {
  if (s < 0) throw std::invalid_argument("weak_norm: order must be >= 0");
  double sum = 0.0;
  for (int ell = 0; ell <= f.truncation(); ++ell) {
    const double w = std::pow(1.0 + basis::eigen_degree(ell), -s);
    for (int m = -ell; m <= ell; ++m) sum += w * std::norm(f(ell, m));
  }
  return std::sqrt(sum);
}

VorticitySystem::VorticitySystem(int L) : transform_(L), chi_(x3_field(L)) {}

SpectralField VorticitySystem::jacobian(const SpectralField& f, const SpectralField& g) const {
  if (f.truncation() != truncation() || g.truncation() != truncation())
    throw std::invalid_argument("jacobian: truncation mismatch");
  const std::size_t n = transform_.grid_size();
  std::vector<double> fp(n), fx(n), gp(n), gx(n);
  transform_.synthesize_gradient(f, fp, fx);
  transform_.synthesize_gradient(g, gp, gx);
  for (std::size_t i = 0; i < n; ++i) fp[i] = fp[i] * gx[i] - fx[i] * gp[i];
  return transform_.analyze(fp);
}

SpectralField VorticitySystem::rhs(const SpectralField& w, double Omega, const SpectralField& chi) const {
  const SpectralField f = inv_laplacian(w);
  SpectralField q = w;
  q.axpy(-Omega, chi);
  SpectralField out = jacobian(f, q);
  out *= -1.0;
  out(0, 0) = 0.0;
  return out;
}

SpectralField VorticitySystem::step_rk4(const SpectralField& w, double dt, double Omega) const {
  const SpectralField k1 = rhs(w, Omega);
  SpectralField tmp = w;
  tmp.axpy(0.5 * dt, k1);
  const SpectralField k2 = rhs(tmp, Omega);
  tmp = w;
  tmp.axpy(0.5 * dt, k2);
  const SpectralField k3 = rhs(tmp, Omega);
  tmp = w;
  tmp.axpy(dt, k3);
  const SpectralField k4 = rhs(tmp, Omega);
  SpectralField out = w;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  return out;
}

double VorticitySystem::max_speed(const SpectralField& w) const {
  const SpectralField f = inv_laplacian(w);
  const std::size_t n = transform_.grid_size();
  std::vector<double> fp(n), fx(n);
  transform_.synthesize_gradient(f, fp, fx);
  const auto& x = transform_.rule().nodes;
  double best = 0.0;
  for (int j = 0; j < transform_.nlat(); ++j) {
    const double s2 = 1.0 - x[j] * x[j];
    for (int i = 0; i < transform_.nlon(); ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * transform_.nlon() + i;
      best = std::max(best, s2 * fx[idx] * fx[idx] + fp[idx] * fp[idx] / s2);
    }
  }
  return std::sqrt(best);
}

LedgerRow VorticitySystem::ledger(double t, const SpectralField& w, double Omega) const {
  LedgerRow r;
  r.time = t;
  for (int ell = 1; ell <= w.truncation(); ++ell) {
    double s = 0.0;
    for (int m = -ell; m <= ell; ++m) s += std::norm(w(ell, m));
    r.energy += s / basis::eigen_degree(ell);
  }
  r.xi_moment = std::sqrt(4.0 * kPi / 3.0) * w(1, 0).real();
  SpectralField q = w;
  q.axpy(-Omega, chi_);
  r.casimir2 = q.norm2();
  for (double v : transform_.synthesize(q)) r.sup_q = std::max(r.sup_q, std::abs(v));
  return r;
}

Trajectory VorticitySystem::evolve(const SpectralField& w0, double Omega, double T, double dt, int sample_every,
                                   const EvolveOptions& opts) const {
  if (!(dt > 0)) throw std::invalid_argument("evolve: dt must be > 0");
  if (!(T >= 0)) throw std::invalid_argument("evolve: T must be >= 0");
  if (sample_every < 1) throw std::invalid_argument("evolve: sample_every must be >= 1");
  if (w0.truncation() != truncation()) throw std::invalid_argument("evolve: truncation mismatch");
  if (std::abs(w0(0, 0)) > 1e-12) throw std::invalid_argument("evolve: initial vorticity must have zero mean");

  Trajectory tr;
  tr.Omega = Omega;
  long steps = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
  if (T == 0) steps = 0;
  double h = steps > 0 ? T / static_cast<double>(steps) : dt;
  long cadence = sample_every;
  int halvings = 0;
  const int L = truncation();

  // Returns false when the CFL limit cannot be met within the allowed halvings.
  auto enforce_cfl = [&](const SpectralField& w, double t) {
    const double umax = max_speed(w);
    if (umax == 0.0) return;
    const double limit = opts.c_cfl / (L * umax);
    while (h > limit) {
      if (halvings >= opts.max_halvings)
        throw CflError("evolve: CFL limit " + fmt(limit) + " not met at t=" + fmt(t) + " after " +
                       std::to_string(halvings) + " halvings of dt");
      h *= 0.5;
      cadence *= 2;
      ++halvings;
      tr.warnings.push_back("CFL: dt halved to " + fmt(h) + " at t=" + fmt(t));
    }
  };

  auto record = [&](double t, const SpectralField& w) {
    tr.times.push_back(t);
    tr.ledger.push_back(ledger(t, w, Omega));
    if (opts.store_snapshots) tr.snapshots.push_back(w);
  };

  SpectralField w = w0;
  double t = 0.0;
  enforce_cfl(w, t);
  record(t, w);
  long since_sample = 0;
  const double t_end = T;
  while (t < t_end - 0.5 * h) {
    w = step_rk4(w, h, Omega);
    t += h;
    if (t_end - t < 0.5 * h) t = t_end;
    ++since_sample;
    if (since_sample >= cadence || t == t_end) {
      since_sample = 0;
      record(t, w);
      if (t < t_end) {
        const double before = h;
        enforce_cfl(w, t);
        if (h != before) since_sample = 0;
      }
    }
  }
  tr.dt = h;
  return tr;
}

SpectralField time_average(const Trajectory& traj, double S, double T) {
  if (traj.snapshots.empty() || traj.snapshots.size() != traj.times.size())
    throw std::invalid_argument("time_average: trajectory has no stored snapshots");
  if (!(T > 0)) throw std::invalid_argument("time_average: window length must be > 0");
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(t1));
  const double a = S;
  const double b = S + T;
  if (a < t0 - slack || b > t1 + slack) throw std::out_of_range("time_average: window outside the trajectory");

  auto at = [&](double t) {
    auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    std::size_t i = it == traj.times.begin() ? 0 : static_cast<std::size_t>(it - traj.times.begin()) - 1;
    if (i + 1 >= traj.times.size()) return traj.snapshots.back();
    const double ta = traj.times[i];
    const double tb = traj.times[i + 1];
    const double theta = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    SpectralField out = traj.snapshots[i] * (1.0 - theta);
    out.axpy(theta, traj.snapshots[i + 1]);
    return out;
  };

  std::vector<double> ts{a};
  std::vector<SpectralField> vs{at(a)};
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] > a + slack && traj.times[i] < b - slack) {
      ts.push_back(traj.times[i]);
      vs.push_back(traj.snapshots[i]);
    }
  }
  ts.push_back(b);
  vs.push_back(at(b));

  SpectralField sum(traj.snapshots.front().truncation());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double h = ts[i + 1] - ts[i];
    sum.axpy(0.5 * h, vs[i]);
    sum.axpy(0.5 * h, vs[i + 1]);
  }
  sum *= 1.0 / T;
  return sum;
}

void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows) {
  out << "time,energy,xi_moment,casimir2,sup_q\n";
  for (const LedgerRow& r : rows)
    out << fmt(r.time) << ',' << fmt(r.energy) << ',' << fmt(r.xi_moment) << ',' << fmt(r.casimir2) << ','
        << fmt(r.sup_q) << '\n';
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(trim(s), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("fixture line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  if (used != trim(s).size())
    throw std::invalid_argument("fixture line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line) {
  const double v = parse_number(s, line);
  if (v != std::floor(v)) throw std::invalid_argument("fixture line " + std::to_string(line) + ": expected integer");
  return static_cast<int>(v);
}

}  // namespace

DecayFixture parse_fixture(std::istream& in) {
  DecayFixture fx;
  std::vector<std::tuple<int, int, double, double, int>> coeffs;
  bool have_L = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq != std::string::npos) {
      const std::string key = trim(s.substr(0, eq));
      const std::string val = trim(s.substr(eq + 1));
      if (key == "L") {
        fx.L = parse_int(val, line);
        have_L = true;
      } else if (key == "dt") {
        fx.dt = parse_number(val, line);
      } else if (key == "T") {
        fx.T = parse_number(val, line);
      } else if (key == "sample_every") {
        fx.sample_every = parse_int(val, line);
      } else if (key == "weak_order") {
        fx.weak_order = parse_number(val, line);
      } else if (key == "omegas") {
        fx.omegas.clear();
        std::stringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) fx.omegas.push_back(parse_number(item, line));
      } else {
        throw std::invalid_argument("fixture line " + std::to_string(line) + ": unknown key '" + key + "'");
      }
      continue;
    }
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 4)
      throw std::invalid_argument("fixture line " + std::to_string(line) + ": expected l,m,re,im");
    coeffs.emplace_back(parse_int(parts[0], line), parse_int(parts[1], line), parse_number(parts[2], line),
                        parse_number(parts[3], line), line);
  }
  if (!have_L) throw std::invalid_argument("fixture: missing L");
  if (fx.L < 1) throw std::invalid_argument("fixture: L must be >= 1");
  if (!(fx.dt > 0)) throw std::invalid_argument("fixture: dt must be > 0");
  if (!(fx.T > 0)) throw std::invalid_argument("fixture: T must be > 0");
  if (fx.sample_every < 1) throw std::invalid_argument("fixture: sample_every must be >= 1");
  if (fx.weak_order < 0) throw std::invalid_argument("fixture: weak_order must be >= 0");
  for (double o : fx.omegas)
    if (!(o > 0)) throw std::invalid_argument("fixture: omegas must be positive");
  fx.w0 = SpectralField(fx.L);
  for (const auto& [l, m, re, im, ln] : coeffs) {
    if (l < 0 || l > fx.L || m < 0 || m > l)
      throw std::invalid_argument("fixture line " + std::to_string(ln) + ": need 0 <= m <= l <= L");
    if (l == 0 && (re != 0.0 || im != 0.0))
      throw std::invalid_argument("fixture line " + std::to_string(ln) + ": vorticity must have zero mean");
    if (m == 0 && im != 0.0)
      throw std::invalid_argument("fixture line " + std::to_string(ln) + ": m = 0 coefficients must be real");
    fx.w0.set_real_pair(l, m, cplx(re, im));
  }
  return fx;
}

DecayFixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open fixture file: " + path);
  return parse_fixture(in);
}

const std::string& canonical_fixture_text() {
  static const std::string text =
      "# Rotation-decay experiment: w = Re Y_2^1 + 0.5 Re Y_3^2\n"
      "# coefficient lines give c_{l,m} (m >= 0) against Y_l^m\n"
      "L=31\n"
      "dt=1e-3\n"
      "T=10\n"
      "sample_every=5\n"
      "weak_order=3\n"
      "omegas=16,32,64,128\n"
      "2,1,0.5,0\n"
      "3,2,0.25,0\n";
  return text;
}

std::pair<double, double> loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_fit: need >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::domain_error("loglog_fit: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::domain_error("loglog_fit: x values must differ");
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

DecayResult omega_decay(const DecayFixture& fx, int threads) {
  if (fx.omegas.size() < 2) throw std::invalid_argument("omega_decay: need at least two Omega values");
  const VorticitySystem sys(fx.L);
  struct Out {
    double value;
    std::vector<std::string> warnings;
  };
  const auto runs = parallel_map(fx.omegas.size(), threads, [&](std::size_t i) {
    const Trajectory tr = sys.evolve(fx.w0, fx.omegas[i], fx.T, fx.dt, fx.sample_every);
    const SpectralField avg = time_average(tr, 0.0, fx.T);
    return Out{weak_norm(avg - zonal_project(avg), fx.weak_order), tr.warnings};
  });
  DecayResult res;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    res.points.push_back({fx.omegas[i], runs[i].value});
    xs.push_back(fx.omegas[i]);
    ys.push_back(runs[i].value);
    for (const auto& w : runs[i].warnings) res.warnings.push_back("Omega=" + fmt(fx.omegas[i]) + ": " + w);
  }
  std::tie(res.slope, res.intercept) = loglog_fit(xs, ys);
  return res;
}

}  // namespace zonal::dynamics
