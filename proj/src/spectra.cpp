#include "zonalstab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "zonalstab/parallel.hpp"

namespace zonal::spectra {

ImagSummary max_imag(const SpectrumResult& r, double tau) {
  if (tau < 0) throw std::invalid_argument("max_imag: tau must be >= 0");
  ImagSummary s;
  for (const cplx& z : r.eigenvalues) {
    s.value = std::max(s.value, z.imag());
    if (z.imag() > tau) ++s.count;
  }
  return s;
}

std::vector<cplx> sorted_by_imag(std::vector<cplx> values) {
  std::stable_sort(values.begin(), values.end(), [](const cplx& a, const cplx& b) {
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() < b.real();
  });
  return values;
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

bool unstable(const SweepRecord& r) { return r.failed() || r.unstable_count > 0; }

}  // namespace

SweepRecord evaluate(const ops::ZonalModel& model, int k, int N, const SweepOptions& opts) {
  SweepRecord rec;
  rec.Omega = model.Omega;
  rec.N = N;
  rec.residual_bound = std::numeric_limits<double>::quiet_NaN();
  const ops::SectorOperator op = ops::sector_operator(model, k, N);
  const double norm = op.entries.frobenius_norm();
  rec.tau = tau_real(norm);
  if (opts.use_guard) {
    if (auto cert = ops::real_spectrum_guard(model, k)) {
      rec.status = "guarded:" + cert->clause;
      return rec;
    }
  }
  EigOptions eo;
  eo.residual = opts.residual;
  try {
    const SpectrumResult r = eig(op.entries, eo);
    const ImagSummary s = max_imag(r, rec.tau);
    rec.max_imag = s.value;
    rec.unstable_count = s.count;
    rec.residual_bound = r.residual_bound;
    std::vector<cplx> sorted = sorted_by_imag(r.eigenvalues);
    if (static_cast<int>(sorted.size()) > opts.top) sorted.resize(static_cast<std::size_t>(opts.top));
    rec.top = std::move(sorted);
  } catch (const EigenError& e) {
    rec.status = "error:" + sanitize(e.what());
    rec.max_imag = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

std::vector<SweepRecord> omega_sweep(const ops::ZonalModel& model, int k, std::span<const double> omegas, int N,
                                     const SweepOptions& opts) {
  for (std::size_t i = 1; i < omegas.size(); ++i)
    if (omegas[i] < omegas[i - 1]) throw std::invalid_argument("omega_sweep: Omega grid must be ascending");
  return parallel_map(omegas.size(), opts.threads,
                      [&](std::size_t i) { return evaluate(ops::with_omega(model, omegas[i]), k, N, opts); });
}

ConvergenceResult n_convergence(const ops::ZonalModel& model, int k, std::span<const int> N_list,
                                const SweepOptions& opts, double tol) {
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw std::invalid_argument("n_convergence: N list must be ascending");
  ConvergenceResult out;
  out.tol = tol;
  out.records = parallel_map(N_list.size(), opts.threads,
                             [&](std::size_t i) { return evaluate(model, k, N_list[i], opts); });
  out.step_converged.assign(out.records.size(), false);
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    const auto& a = out.records[i - 1];
    const auto& b = out.records[i];
    out.step_converged[i] = !a.failed() && !b.failed() && std::abs(a.max_imag - b.max_imag) < tol;
  }
  for (std::size_t i = out.records.size(); i-- > 1;) {
    if (!out.step_converged[i]) break;
    out.converged_from = out.records[i - 1].N;
  }
  return out;
}

std::vector<double> OmegaRange::values() const {
  if (!(step > 0)) throw std::invalid_argument("Omega range: step must be > 0");
  if (stop < start) throw std::invalid_argument("Omega range: stop must be >= start");
  const long count = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> v(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = start + static_cast<double>(i) * step;
  v.back() = stop;  // nearest grid point to stop is within half a step
  return v;
}

OmegaRange parse_omega_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("Omega range '" + text + "': expected start:stop:step");
    }
    if (used != item.size()) throw std::invalid_argument("Omega range '" + text + "': expected start:stop:step");
    parts.push_back(v);
  }
  if (parts.size() != 3) throw std::invalid_argument("Omega range '" + text + "': expected start:stop:step");
  OmegaRange r{parts[0], parts[1], parts[2]};
  r.values();  // validates
  return r;
}

ThresholdResult threshold(const ops::ZonalModel& model, int k, const OmegaRange& range, int N, double tol,
                          const SweepOptions& opts) {
  if (!(tol > 0)) throw std::invalid_argument("threshold: tol must be > 0");
  const std::vector<double> grid = range.values();
  const int threads = opts.threads <= 0 ? default_threads() : opts.threads;
  ThresholdResult res;

  auto check = [](const SweepRecord& r) {
    if (r.failed()) throw std::runtime_error("threshold: eigensolve failed at Omega=" + format_double(r.Omega) +
                                             " (" + r.status + ")");
  };

  long hit = -1;
  for (long top = static_cast<long>(grid.size()) - 1; top >= 0 && hit < 0; top -= threads) {
    const long lo = std::max(0L, top - threads + 1);
    const std::size_t count = static_cast<std::size_t>(top - lo + 1);
    auto batch = parallel_map(count, threads, [&](std::size_t j) {
      return evaluate(ops::with_omega(model, grid[static_cast<std::size_t>(top) - j]), k, N, opts);
    });
    for (std::size_t j = 0; j < count; ++j) {
      check(batch[j]);
      res.scan.push_back(batch[j]);
      if (unstable(batch[j])) {
        hit = top - static_cast<long>(j);
        break;
      }
    }
  }
  std::reverse(res.scan.begin(), res.scan.end());

  if (hit < 0) {
    res.degenerate = true;
    res.Omega_star = range.start;
    res.bracket_lo = res.bracket_hi = range.start;
    return res;
  }
  if (hit == static_cast<long>(grid.size()) - 1) {
    res.unresolved = true;
    res.Omega_star = grid.back();
    res.bracket_lo = res.bracket_hi = grid.back();
    return res;
  }
  double lo = grid[static_cast<std::size_t>(hit)];
  double hi = grid[static_cast<std::size_t>(hit) + 1];
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    SweepRecord r = evaluate(ops::with_omega(model, mid), k, N, opts);
    check(r);
    if (unstable(r)) lo = mid; else hi = mid;
    res.bisection.push_back(std::move(r));
  }
  res.Omega_star = hi;
  return res;
}

Matrix solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (!a.square() || b.rows() != n) throw std::invalid_argument("solve: shape mismatch");
  const std::size_t m = b.cols();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (a(piv, c) == 0.0) throw std::runtime_error("solve: singular matrix");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(c, j), b(piv, j));
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      for (std::size_t j = 0; j < m; ++j) b(r, j) -= f * b(c, j);
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = b(c, j);
      for (std::size_t q = c + 1; q < n; ++q) s -= a(c, q) * b(q, j);
      b(c, j) = s / a(c, c);
    }
  }
  return b;
}

Matrix expm(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("expm: matrix must be square");
  if (!a.all_finite()) throw std::invalid_argument("expm: matrix has non-finite entries");
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const std::size_t n = a.rows();
  const double norm = a.one_norm();
  int s = 0;
  if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Matrix A = a * std::ldexp(1.0, -s);
  const Matrix I = Matrix::identity(n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  const Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Matrix X = solve(V - U, V + U);
  for (int i = 0; i < s; ++i) {
    X = X * X;
    if (!X.all_finite()) throw std::overflow_error("expm: result overflows (strongly unstable generator)");
  }
  if (!X.all_finite()) throw std::overflow_error("expm: result overflows (strongly unstable generator)");
  return X;
}

std::vector<double> propagator_growth(const Matrix& m, std::span<const double> v0, std::span<const double> t_list,
                                      Generator gen) {
  if (!m.square() || v0.size() != m.rows()) throw std::invalid_argument("propagator_growth: shape mismatch");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (t_list[i] < 0) throw std::invalid_argument("propagator_growth: t must be >= 0");
    if (i && t_list[i] < t_list[i - 1]) throw std::invalid_argument("propagator_growth: t list must be ascending");
  }
  const std::size_t n = m.rows();
  Matrix g;
  std::vector<double> v;
  if (gen == Generator::real) {
    g = m;
    v.assign(v0.begin(), v0.end());
  } else {
    // exp(i t M) v as a real 2n system acting on (Re, Im).
    g = Matrix(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        g(i, n + j) = -m(i, j);
        g(n + i, j) = m(i, j);
      }
    v.assign(2 * n, 0.0);
    std::copy(v0.begin(), v0.end(), v.begin());
  }
  std::vector<double> out;
  out.reserve(t_list.size());
  for (double t : t_list) {
    const std::vector<double> w = expm(g * t) * std::span<const double>(v);
    double s = 0.0;
    for (double x : w) s += x * x;
    out.push_back(std::sqrt(s));
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, const std::string& first, int top) {
  out << first << ",max_imag,unstable_count";
  for (int i = 1; i <= top; ++i) out << ",ev" << i << "_re,ev" << i << "_im";
  out << ",status\n";
  for (const SweepRecord& r : records) {
    out << (first == "N" ? std::to_string(r.N) : format_double(r.Omega)) << ',' << format_double(r.max_imag) << ','
        << r.unstable_count;
    for (int i = 0; i < top; ++i) {
      if (i < static_cast<int>(r.top.size()))
        out << ',' << format_double(r.top[i].real()) << ',' << format_double(r.top[i].imag());
      else
        out << ",,";
    }
    out << ',' << r.status << '\n';
  }
  out.flush();
}

}  // namespace zonal::spectra
