#include "zonalstab/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "zonalstab/dynamics.hpp"
#include "zonalstab/geometry.hpp"
#include "zonalstab/operators.hpp"
#include "zonalstab/spectra.hpp"
#include "zonalstab/svg_plot.hpp"

namespace zonal::cli {

namespace {

using json = nlohmann::ordered_json;
using spectra::format_double;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Output {
  std::string path = "-";
  std::string manifest;
  std::string svg;
  bool logx = false;
  bool logy = false;
};

struct ModelArgs {
  std::string model;
  double alpha = 1.0;
  std::string f_coeffs;
  int k = 1;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw ConfigError(what + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

ops::ZonalModel resolve_model(const ModelArgs& a, double Omega) {
  if (a.model == "p2" || a.model == "p3" || a.model == "p4")
    return ops::legendre_model(a.model[1] - '0', Omega, a.alpha);
  if (a.model == "zonal") {
    if (a.f_coeffs.empty()) throw ConfigError("--model zonal needs --f c0,c1,...");
    return ops::general_zonal(parse_list(a.f_coeffs, "--f"), Omega);
  }
  throw ConfigError("--model must be one of p2, p3, p4, zonal");
}

json model_json(const ModelArgs& a) {
  json j;
  j["model"] = a.model;
  if (a.model == "zonal")
    j["f"] = parse_list(a.f_coeffs, "--f");
  else
    j["alpha"] = a.alpha;
  j["k"] = a.k;
  return j;
}

void add_model_options(CLI::App* sub, ModelArgs& a) {
  sub->add_option("--model", a.model, "Base flow: p2, p3, p4 (Legendre models) or zonal")->required();
  sub->add_option("--alpha", a.alpha, "Amplitude of the Legendre model")->capture_default_str();
  sub->add_option("--f", a.f_coeffs, "Stream function coefficients c0,c1,... in x3 (model zonal)");
  sub->add_option("--k", a.k, "Azimuthal sector")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App* sub, Output& o, bool plot) {
  sub->add_option("-o,--out", o.path, "Output file ('-' for stdout)")->capture_default_str();
  sub->add_option("--manifest", o.manifest, "Manifest JSON path (default: <out>.manifest.json, stderr for stdout)");
  if (plot) {
    sub->add_option("--svg", o.svg, "Also write an SVG line plot");
    sub->add_flag("--logx", o.logx, "Logarithmic x axis in the plot");
    sub->add_flag("--logy", o.logy, "Logarithmic y axis in the plot");
  }
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open output file: " + path);
  f << content;
  f.flush();
  if (!f) throw std::ios_base::failure("write failed: " + path);
}

json output_json(const Output& o) {
  json j;
  j["data"] = o.path;
  if (!o.svg.empty()) j["svg"] = o.svg;
  return j;
}

void emit_manifest(const std::string& command, const Output& o, json params, json results) {
  json m;
  m["tool"] = "zonalstab";
  m["version"] = ZONALSTAB_VERSION;
  m["command"] = command;
  m["parameters"] = std::move(params);
  m["outputs"] = output_json(o);
  m["results"] = std::move(results);
  const std::string text = m.dump(2) + "\n";
  std::string path = o.manifest;
  if (path.empty()) path = o.path == "-" ? "" : o.path + ".manifest.json";
  if (path.empty())
    std::cerr << text;
  else
    write_file(path, text);
}

void maybe_plot(const Output& o, const std::vector<plot::Series>& series, const std::string& title,
                const std::string& xl, const std::string& yl) {
  if (o.svg.empty()) return;
  plot::PlotOptions po;
  po.title = title;
  po.xlabel = xl;
  po.ylabel = yl;
  po.logx = o.logx;
  po.logy = o.logy;
  write_file(o.svg, plot::render_svg(series, po));
}

json record_json(const spectra::SweepRecord& r) {
  json j;
  j["Omega"] = r.Omega;
  j["max_imag"] = r.max_imag;
  j["unstable_count"] = r.unstable_count;
  j["status"] = r.status;
  return j;
}

geometry::SurfaceProfile resolve_profile(double ellipsoid, const std::string& profile) {
  if (!profile.empty()) return geometry::load_profile_csv(profile);
  return geometry::ellipsoid_profile(ellipsoid);
}

dynamics::DecayFixture resolve_fixture(const std::string& name) {
  if (name == "canonical") {
    std::istringstream in(dynamics::canonical_fixture_text());
    return dynamics::parse_fixture(in);
  }
  return dynamics::load_fixture(name);
}

json fixture_json(const std::string& name, const dynamics::DecayFixture& fx) {
  json j;
  j["fixture"] = name;
  j["L"] = fx.L;
  j["dt"] = fx.dt;
  j["T"] = fx.T;
  j["sample_every"] = fx.sample_every;
  j["weak_order"] = fx.weak_order;
  j["omegas"] = fx.omegas;
  json c = json::array();
  for (int l = 0; l <= fx.L; ++l)
    for (int m = 0; m <= l; ++m) {
      const auto v = fx.w0(l, m);
      if (v != 0.0) c.push_back({l, m, v.real(), v.imag()});
    }
  j["coefficients"] = c;
  return j;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Linear stability of zonal flows on the rotating sphere", "zonalstab"};
  app.set_version_flag("--version", std::string(ZONALSTAB_VERSION));
  app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags win)");
  app.require_subcommand(1);
  std::function<int()> action;

  // sweep
  ModelArgs sw_model;
  Output sw_out;
  std::string sw_omega;
  int sw_n = 400;
  int sw_threads = 0;
  bool sw_no_guard = false;
  bool sw_residual = false;
  auto* sweep = app.add_subcommand("sweep", "max Im of the sector spectrum over an Omega grid");
  add_model_options(sweep, sw_model);
  sweep->add_option("--n", sw_n, "Truncation size N")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--omega", sw_omega, "Omega range start:stop:step")->required();
  sweep->add_option("--threads", sw_threads, "Worker threads (0 = all cores)")->capture_default_str();
  sweep->add_flag("--no-guard", sw_no_guard, "Solve even when the sector is certified real");
  sweep->add_flag("--residual", sw_residual, "Compute eigenvector residual bounds");
  add_output_options(sweep, sw_out, true);
  sweep->callback([&] {
    action = [&]() -> int {
      const auto range = spectra::parse_omega_range(sw_omega);
      const auto model = resolve_model(sw_model, range.start);
      spectra::SweepOptions so;
      so.threads = sw_threads;
      so.use_guard = !sw_no_guard;
      so.residual = sw_residual;
      const auto grid = range.values();
      const auto recs = spectra::omega_sweep(model, sw_model.k, grid, sw_n, so);
      std::ostringstream csv;
      spectra::write_sweep_csv(csv, recs, "Omega");
      write_file(sw_out.path, csv.str());
      plot::Series s{"max Im", {}, {}};
      int failures = 0;
      for (const auto& r : recs) {
        s.x.push_back(r.Omega);
        s.y.push_back(r.max_imag);
        failures += r.failed();
      }
      maybe_plot(sw_out, {s}, model.name() + " k=" + std::to_string(sw_model.k) + " N=" + std::to_string(sw_n),
                 "Omega", "max Im");
      json p = model_json(sw_model);
      p["n"] = sw_n;
      p["omega"] = {{"start", range.start}, {"stop", range.stop}, {"step", range.step}, {"points", grid.size()}};
      p["threads"] = sw_threads;
      p["use_guard"] = !sw_no_guard;
      p["residual"] = sw_residual;
      p["tau_rule"] = "1e-8 * frobenius_norm";
      json res;
      res["failures"] = failures;
      emit_manifest("sweep", sw_out, p, res);
      return failures ? kNumericError : kOk;
    };
  });

  // nconv
  ModelArgs nc_model;
  Output nc_out;
  double nc_omega = 0.0;
  std::string nc_list = "25,50,75,100,125,150,175,200,225,250,275,300,325,350,375,400";
  double nc_tol = 1e-8;
  int nc_threads = 0;
  bool nc_no_guard = false;
  auto* nconv = app.add_subcommand("nconv", "max Im against the truncation size N");
  add_model_options(nconv, nc_model);
  nconv->add_option("--omega", nc_omega, "Rotation rate")->required();
  nconv->add_option("--n-list", nc_list, "Ascending truncation sizes")->capture_default_str();
  nconv->add_option("--tol", nc_tol, "Convergence tolerance on max Im")->capture_default_str();
  nconv->add_option("--threads", nc_threads, "Worker threads (0 = all cores)")->capture_default_str();
  nconv->add_flag("--no-guard", nc_no_guard, "Solve even when the sector is certified real");
  add_output_options(nconv, nc_out, true);
  nconv->callback([&] {
    action = [&]() -> int {
      std::vector<int> ns;
      for (double v : parse_list(nc_list, "--n-list")) {
        if (v < 1 || v != std::floor(v)) throw ConfigError("--n-list: sizes must be positive integers");
        ns.push_back(static_cast<int>(v));
      }
      const auto model = resolve_model(nc_model, nc_omega);
      spectra::SweepOptions so;
      so.threads = nc_threads;
      so.use_guard = !nc_no_guard;
      const auto res = spectra::n_convergence(model, nc_model.k, ns, so, nc_tol);
      std::ostringstream csv;
      spectra::write_sweep_csv(csv, res.records, "N");
      write_file(nc_out.path, csv.str());
      plot::Series s{"max Im", {}, {}};
      int failures = 0;
      for (const auto& r : res.records) {
        s.x.push_back(r.N);
        s.y.push_back(r.max_imag);
        failures += r.failed();
      }
      maybe_plot(nc_out, {s}, model.name() + " k=" + std::to_string(nc_model.k) + " Omega=" + std::to_string(nc_omega),
                 "N", "max Im");
      json p = model_json(nc_model);
      p["omega"] = nc_omega;
      p["n_list"] = ns;
      p["tol"] = nc_tol;
      p["threads"] = nc_threads;
      p["use_guard"] = !nc_no_guard;
      json r;
      r["converged_from"] = res.converged_from;
      r["failures"] = failures;
      emit_manifest("nconv", nc_out, p, r);
      return failures ? kNumericError : kOk;
    };
  });

  // threshold
  ModelArgs th_model;
  Output th_out;
  std::string th_omega;
  int th_n = 400;
  double th_tol = 1e-3;
  int th_threads = 0;
  auto* thr = app.add_subcommand("threshold", "Largest Omega at which the sector turns stable");
  add_model_options(thr, th_model);
  thr->add_option("--n", th_n, "Truncation size N")->capture_default_str()->check(CLI::PositiveNumber);
  thr->add_option("--omega", th_omega, "Scan range start:stop:step")->required();
  thr->add_option("--tol", th_tol, "Bisection tolerance in Omega")->capture_default_str();
  thr->add_option("--threads", th_threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_output_options(thr, th_out, false);
  thr->callback([&] {
    action = [&]() -> int {
      const auto range = spectra::parse_omega_range(th_omega);
      const auto model = resolve_model(th_model, range.start);
      spectra::SweepOptions so;
      so.threads = th_threads;
      const auto t = spectra::threshold(model, th_model.k, range, th_n, th_tol, so);
      const auto geo = geometry::xi(geometry::sphere_profile(), geometry::uniform_grid(geometry::sphere_profile(), 4001));
      const double rb = ops::rayleigh_bound(model);
      const double ab = ops::arnold_bound(model, geo);
      json out;
      out["Omega_star"] = t.Omega_star;
      out["bracket"] = {t.bracket_lo, t.bracket_hi};
      out["degenerate"] = t.degenerate;
      out["unresolved"] = t.unresolved;
      out["rayleigh_bound"] = rb;
      out["arnold_bound"] = ab;
      out["below_rayleigh_bound"] = t.Omega_star < rb;
      out["below_arnold_bound"] = t.Omega_star < ab;
      json scan = json::array();
      for (const auto& r : t.scan) scan.push_back(record_json(r));
      json bis = json::array();
      for (const auto& r : t.bisection) bis.push_back(record_json(r));
      out["scan"] = scan;
      out["bisection"] = bis;
      write_file(th_out.path, out.dump(2) + "\n");
      json p = model_json(th_model);
      p["n"] = th_n;
      p["omega"] = {{"start", range.start}, {"stop", range.stop}, {"step", range.step}};
      p["tol"] = th_tol;
      p["threads"] = th_threads;
      json r;
      r["Omega_star"] = t.Omega_star;
      emit_manifest("threshold", th_out, p, r);
      return kOk;
    };
  });

  // criteria
  ModelArgs cr_model;
  Output cr_out;
  double cr_omega = 0.0;
  double cr_ellipsoid = 1.0;
  std::string cr_profile;
  int cr_grid = 4001;
  int cr_kgrid = 2001;
  auto* crit = app.add_subcommand("criteria", "Rayleigh, Fjortoft and Arnold checks plus the real-spectrum guard");
  add_model_options(crit, cr_model);
  crit->add_option("--omega", cr_omega, "Rotation rate")->required();
  crit->add_option("--ellipsoid", cr_ellipsoid, "Pole height a of the ellipsoid used for the Arnold check")
      ->capture_default_str();
  crit->add_option("--profile", cr_profile, "Tabulated surface profile CSV (x3, rho) for the Arnold check");
  crit->add_option("--grid", cr_grid, "Interior s-grid size")->capture_default_str()->check(CLI::PositiveNumber);
  crit->add_option("--k-grid", cr_kgrid, "K-grid size for the Fjortoft quantifier")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));
  add_output_options(crit, cr_out, false);
  crit->callback([&] {
    action = [&]() -> int {
      const auto model = resolve_model(cr_model, cr_omega);
      const auto prof = resolve_profile(cr_ellipsoid, cr_profile);
      const auto geo = geometry::xi(prof, geometry::uniform_grid(prof, cr_grid));
      const auto s = ops::interior_grid(cr_grid);
      const auto ray = ops::rayleigh_check(model, s);
      const auto fj = ops::fjortoft_check(model, s, ops::k_grid(model, cr_kgrid));
      const auto ar = ops::arnold_check(model, geo);
      const auto guard = ops::real_spectrum_guard(model, cr_model.k);
      json out;
      out["rayleigh"] = ray.holds;
      out["fjortoft"] = fj.holds;
      out["arnold_stable"] = ar.holds;
      out["guard"] = guard ? json{{"clause", guard->clause}, {"detail", guard->detail}} : json(nullptr);
      out["witnesses"] = {{"rayleigh", ray.witnesses}, {"fjortoft", fj.witnesses}, {"arnold", ar.witnesses}};
      out["rayleigh_bound"] = ops::rayleigh_bound(model);
      out["arnold_bound"] = ops::arnold_bound(model, geo);
      out["A"] = model.A();
      out["B"] = model.B();
      write_file(cr_out.path, out.dump(2) + "\n");
      json p = model_json(cr_model);
      p["omega"] = cr_omega;
      p["surface"] = cr_profile.empty() ? json{{"ellipsoid", cr_ellipsoid}} : json{{"profile", cr_profile}};
      p["grid"] = cr_grid;
      p["k_grid"] = cr_kgrid;
      p["sign_tolerance"] = ops::kSignTolerance;
      json r;
      r["warnings"] = geo.warnings;
      emit_manifest("criteria", cr_out, p, r);
      return kOk;
    };
  });

  // geometry
  Output ge_out;
  double ge_ellipsoid = 1.0;
  std::string ge_profile;
  int ge_grid = 101;
  auto* geom = app.add_subcommand("geometry", "Tabulate chi, xi and their derivatives for a surface of revolution");
  geom->add_option("--ellipsoid", ge_ellipsoid, "Pole height a of the ellipsoid 1 - x3^2/a^2")->capture_default_str();
  geom->add_option("--profile", ge_profile, "Tabulated surface profile CSV (x3, rho)");
  geom->add_option("--grid", ge_grid, "Number of grid points on [-a, a]")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000000));
  add_output_options(geom, ge_out, true);
  geom->callback([&] {
    action = [&]() -> int {
      const auto prof = resolve_profile(ge_ellipsoid, ge_profile);
      const auto g = geometry::xi(prof, geometry::uniform_grid(prof, ge_grid));
      std::ostringstream csv;
      csv << "x3,chi,xi,chi_prime,xi_prime\n";
      for (std::size_t i = 0; i < g.x.size(); ++i)
        csv << format_double(g.x[i]) << ',' << format_double(g.chi[i]) << ',' << format_double(g.xi[i]) << ','
            << format_double(g.chi_prime[i]) << ',' << format_double(g.xi_prime[i]) << '\n';
      write_file(ge_out.path, csv.str());
      maybe_plot(ge_out, {{"chi", g.x, g.chi}, {"xi", g.x, g.xi}}, "surface profile", "x3", "");
      json p;
      p["surface"] = ge_profile.empty() ? json{{"ellipsoid", ge_ellipsoid}} : json{{"profile", ge_profile}};
      p["grid"] = ge_grid;
      json r;
      r["a"] = prof.a;
      r["beta"] = prof.beta;
      r["area"] = g.area;
      r["warnings"] = g.warnings;
      emit_manifest("geometry", ge_out, p, r);
      return kOk;
    };
  });

  // evolve
  Output ev_out;
  std::string ev_fixture = "canonical";
  double ev_omega = 0.0;
  double ev_T = -1.0;
  double ev_dt = -1.0;
  int ev_sample = -1;
  auto* evo = app.add_subcommand("evolve", "Integrate the vorticity equation and write the invariant ledger");
  evo->add_option("--fixture", ev_fixture, "'canonical' or a fixture file")->capture_default_str();
  evo->add_option("--omega", ev_omega, "Rotation rate")->capture_default_str();
  evo->add_option("--T", ev_T, "Final time (default: fixture T)");
  evo->add_option("--dt", ev_dt, "Time step (default: fixture dt)");
  evo->add_option("--sample-every", ev_sample, "Ledger cadence in steps (default: fixture value)");
  add_output_options(evo, ev_out, false);
  evo->callback([&] {
    action = [&]() -> int {
      auto fx = resolve_fixture(ev_fixture);
      if (ev_T > 0) fx.T = ev_T;
      if (ev_dt > 0) fx.dt = ev_dt;
      if (ev_sample > 0) fx.sample_every = ev_sample;
      if (!(fx.T > 0) || !(fx.dt > 0)) throw ConfigError("evolve: T and dt must be positive");
      const dynamics::VorticitySystem sys(fx.L);
      dynamics::EvolveOptions eo;
      eo.store_snapshots = false;
      const auto tr = sys.evolve(fx.w0, ev_omega, fx.T, fx.dt, fx.sample_every, eo);
      std::ostringstream csv;
      dynamics::write_ledger_csv(csv, tr.ledger);
      write_file(ev_out.path, csv.str());
      json p = fixture_json(ev_fixture, fx);
      p["omega"] = ev_omega;
      p["c_cfl"] = eo.c_cfl;
      json r;
      r["dt_used"] = tr.dt;
      r["warnings"] = tr.warnings;
      const auto& a = tr.ledger.front();
      const auto& b = tr.ledger.back();
      r["energy_drift"] = a.energy != 0 ? std::abs(b.energy - a.energy) / a.energy : 0.0;
      r["casimir2_drift"] = a.casimir2 != 0 ? std::abs(b.casimir2 - a.casimir2) / a.casimir2 : 0.0;
      r["xi_moment_change"] = std::abs(b.xi_moment - a.xi_moment);
      emit_manifest("evolve", ev_out, p, r);
      return kOk;
    };
  });

  // timeavg
  Output ta_out;
  std::string ta_fixture = "canonical";
  std::string ta_omegas;
  int ta_threads = 0;
  auto* tav = app.add_subcommand("timeavg", "Weak norm of the non-zonal part of the time average against Omega");
  tav->add_option("--fixture", ta_fixture, "'canonical' or a fixture file")->capture_default_str();
  tav->add_option("--omegas", ta_omegas, "Comma-separated Omega values (default: fixture list)");
  tav->add_option("--threads", ta_threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_output_options(tav, ta_out, true);
  tav->callback([&] {
    action = [&]() -> int {
      auto fx = resolve_fixture(ta_fixture);
      if (!ta_omegas.empty()) fx.omegas = parse_list(ta_omegas, "--omegas");
      for (double o : fx.omegas)
        if (!(o > 0)) throw ConfigError("--omegas: values must be positive");
      const auto res = dynamics::omega_decay(fx, ta_threads);
      std::ostringstream csv;
      csv << "Omega,weak_norm\n";
      plot::Series s{"weak norm", {}, {}};
      for (const auto& pt : res.points) {
        csv << format_double(pt.Omega) << ',' << format_double(pt.weak_norm) << '\n';
        s.x.push_back(pt.Omega);
        s.y.push_back(pt.weak_norm);
      }
      write_file(ta_out.path, csv.str());
      maybe_plot(ta_out, {s}, "non-zonal part of the time average", "Omega", "weak norm");
      std::cerr << "slope=" << format_double(res.slope) << '\n';
      json p = fixture_json(ta_fixture, fx);
      p["threads"] = ta_threads;
      json r;
      r["slope"] = res.slope;
      r["intercept"] = res.intercept;
      r["warnings"] = res.warnings;
      emit_manifest("timeavg", ta_out, p, r);
      return kOk;
    };
  });

  // matrix
  ModelArgs mx_model;
  Output mx_out;
  double mx_omega = 0.0;
  int mx_n = 6;
  auto* mat = app.add_subcommand("matrix", "Write the dense sector operator as plain text");
  add_model_options(mat, mx_model);
  mat->add_option("--omega", mx_omega, "Rotation rate")->capture_default_str();
  mat->add_option("--n", mx_n, "Truncation size N")->capture_default_str()->check(CLI::PositiveNumber);
  add_output_options(mat, mx_out, false);
  mat->callback([&] {
    action = [&]() -> int {
      const auto op = ops::sector_operator(resolve_model(mx_model, mx_omega), mx_model.k, mx_n);
      std::ostringstream txt;
      ops::write_matrix_text(txt, op.entries);
      write_file(mx_out.path, txt.str());
      json p = model_json(mx_model);
      p["omega"] = mx_omega;
      p["n"] = mx_n;
      json r;
      r["ell_min"] = op.spec.ell_min;
      emit_manifest("matrix", mx_out, p, r);
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return action ? action() : kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const spectra::EigenError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const dynamics::CflError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::logic_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace zonal::cli
