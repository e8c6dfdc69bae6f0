#include "maxprin/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "maxprin/abp.hpp"
#include "maxprin/barriers.hpp"
#include "maxprin/cross_section_spectrum.hpp"
#include "maxprin/eigen_exhaustion.hpp"
#include "maxprin/error.hpp"
#include "maxprin/symmetry_lab.hpp"
#include "maxprin/verifiers.hpp"

namespace maxprin {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kSymmetryTolerance = 1e-8;

// Infinite and NaN values become null in JSON; keep them visible as strings instead.
Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

class Csv {
 public:
  explicit Csv(std::string header) { out_ << header << '\n'; }
  template <typename... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  std::ostringstream out_;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1 == n ? b : a + (b - a) * i / (n - 1);
  return v;
}

Json config_echo(const ExperimentConfig& config) {
  Json out = Json::object();
  std::istringstream in(serialize(config));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      out[section] = Json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    out[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

struct Outcome {
  std::string verdict;
  Json results = Json::object();
  std::vector<CsvFile> csv;
};

void say(const Logger& log, const std::string& message) {
  if (log) log(message);
}

Outcome run_spectrum(const ExperimentConfig& config, const Logger& log) {
  const StripDomain domain = make_domain(config);
  const CrossSection& fiber = domain.cross_section;
  Outcome o;
  o.verdict = "computed";
  o.results["cross_section"] = fiber.name();
  Csv table("n_grid,lambda1,residual");
  Csv shape("xi,psi");
  Json runs = Json::array();
  std::vector<double> lambdas;
  const bool arc = fiber.kind() == CrossSectionKind::CircleArc;
  const bool cap = fiber.kind() == CrossSectionKind::SphereCap;
  if (arc) o.results["closed_form"] = lambda1_arc(fiber.extent());
  else if (!cap) o.results["closed_form"] = cross_section_lambda1(fiber);
  else o.results["closed_form"] = nullptr;
  if (arc || cap) {
    for (std::size_t k = 0; k < config.spectrum.n_grid.size(); ++k) {
      const int n = config.spectrum.n_grid[k];
      say(log, "spectrum: n_grid = " + std::to_string(n));
      const CrossEigen e = arc ? eigenfunction_arc(fiber.extent(), n) : lambda1_cap(fiber.extent(), n);
      lambdas.push_back(e.lambda1);
      runs.push_back({{"n_grid", n}, {"lambda1", e.lambda1}, {"residual", num(e.residual)}});
      table.row(n, e.lambda1, e.residual);
      if (k + 1 == config.spectrum.n_grid.size())
        for (std::size_t i = 0; i < e.nodes.size(); ++i) shape.row(e.nodes[i], e.psi[i]);
    }
  }
  o.results["runs"] = runs;
  // Observed order from the last three grids when each doubles the previous one.
  const auto& g = config.spectrum.n_grid;
  Json order = nullptr;
  const std::size_t n = lambdas.size();
  if (n >= 3 && g[n - 2] == 2 * g[n - 3] && g[n - 1] == 2 * g[n - 2]) {
    const double d1 = lambdas[n - 3] - lambdas[n - 2];
    const double d2 = lambdas[n - 2] - lambdas[n - 1];
    if (d1 != 0.0 && d2 != 0.0) order = std::log2(std::abs(d1 / d2));
  }
  o.results["observed_order"] = order;
  o.csv.push_back({"spectrum.csv", table.str()});
  if (arc || cap) o.csv.push_back({"eigenfunction.csv", shape.str()});
  return o;
}

Outcome run_barrier(const ExperimentConfig& config, const Logger& log) {
  const BarrierSection& b = config.barrier;
  const WarpProfile profile = make_profile(config);
  const StripDomain domain = make_domain(config);
  const double lambda1 = b.lambda1.value_or(cross_section_lambda1(domain.cross_section));
  if (!(lambda1 > 0.0))
    throw Error(ErrorKind::ValidationError,
                "barrier.lambda1: the fiber has no Dirichlet eigenvalue; set it explicitly");
  ClassifyOptions options;
  options.declared_beta = b.beta;
  const CaseTag tag = classify_case(profile, b.window_start, b.window_width, b.classify_samples, options);
  say(log, "barrier: classified as " + to_string(tag.value));
  Outcome o;
  o.results["profile"] = profile.name();
  o.results["lambda1"] = lambda1;
  o.results["m"] = domain.m;
  o.results["case"] = to_string(tag.value);
  o.results["case_finite_limit"] = tag.finite_limit;
  o.results["case_diverges"] = tag.diverges;
  double tail = 1e4;
  if (b.tail_length) {
    tail = *b.tail_length;
  } else {
    auto small = [&](double r) {
      try {
        return profile.eval(r).sigma < 1e-200;
      } catch (const Error&) {
        return true;
      }
    };
    while (tail > b.window_width && small(b.window_start + tail)) tail /= 2.0;
  }
  o.results["tail_length"] = tail;
  const auto grid = linspace(b.window_start, b.window_start + tail, b.tail_samples);
  Csv table("r,h,residual");
  try {
    const BarrierCertificate cert = build_barrier(tag, profile, lambda1, domain.m, grid);
    const bool diverges = verify_divergence(cert);
    o.results["certificate"] = {{"A", cert.A},
                                {"form", cert.form},
                                {"beta", cert.beta},
                                {"max_residual", cert.max_residual},
                                {"samples", cert.r_samples.size()},
                                {"diverges", diverges},
                                {"divergence_is_heuristic", cert.divergence_is_heuristic}};
    for (std::size_t i = 0; i < cert.r_samples.size(); ++i)
      table.row(cert.r_samples[i], cert.h_samples[i], cert.residuals[i]);
    o.verdict = cert.max_residual <= kBarrierSlack && diverges ? "certified" : "no_certificate";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCertificate) throw;
    o.results["certificate"] = nullptr;
    o.results["reason"] = e.what();
    o.verdict = "no_certificate";
  }
  o.csv.push_back({"barrier.csv", table.str()});
  return o;
}

Json exhaustion_json(const ExhaustionReport& r) {
  return {{"R", nums(r.R_list)},
          {"lambda", nums(r.lambda_list)},
          {"residual", nums(r.residual_list)},
          {"limit", r.extrapolated_limit},
          {"fit_slope", r.fit_slope},
          {"fit_residual", r.fit_residual},
          {"truncation", r.truncation}};
}

CsvFile lambda_csv(const ExhaustionReport& r) {
  Csv table("R,lambda,residual");
  for (std::size_t i = 0; i < r.R_list.size(); ++i)
    table.row(r.R_list[i], r.lambda_list[i], r.residual_list[i]);
  return {"lambda.csv", table.str()};
}

std::string sign_verdict(Lambda1Sign s) {
  switch (s) {
    case Lambda1Sign::Positive: return "positive";
    case Lambda1Sign::NonPositive: return "nonpositive";
    case Lambda1Sign::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Outcome run_exhaust(const ExperimentConfig& config, const Logger& log) {
  const ExhaustSection& e = config.exhaust;
  say(log, "exhaust: sweeping " + std::to_string(e.R_list.size()) + " truncations");
  const ExhaustionReport report =
      exhaustion_sweep(make_domain(config), make_operator_spec(config), make_profile(config),
                       e.R_list, e.density, e.xi_intervals);
  Outcome o;
  o.results = exhaustion_json(report);
  o.verdict = sign_verdict(classify_lambda1(report, e.margin));
  o.csv.push_back(lambda_csv(report));
  return o;
}

Outcome run_parabolic(const ExperimentConfig& config, const Logger& log) {
  const ParabolicSection& s = config.parabolic;
  const StripDomain domain = make_domain(config);
  std::optional<Probe> probe;
  if (s.probe_r || s.probe_xi) {
    Probe p = default_probe(domain);
    if (s.probe_r) p.r = *s.probe_r;
    if (s.probe_xi) p.xi = *s.probe_xi;
    probe = p;
  }
  say(log, "parabolic: solving " + std::to_string(s.R_list.size()) + " cap potentials");
  const ParabolicityVerdict v =
      dparabolicity_verdict(domain, make_profile(config), s.R_list, probe, s.density, s.xi_intervals);
  Outcome o;
  Json fits = Json::array();
  for (const DecayFit& f : v.fits)
    fits.push_back({{"model", to_string(f.model)},
                    {"limit", num(f.limit)},
                    {"scale", num(f.scale)},
                    {"rate", num(f.rate)},
                    {"residual", num(f.residual)}});
  o.results = {{"probe", {{"r", v.probe.r}, {"xi", v.probe.xi}}},
               {"R", nums(v.R_list)},
               {"potentials", nums(v.potentials)},
               {"fits", fits},
               {"best_model", to_string(v.best.model)},
               {"limit", num(v.best.limit)},
               {"in_unit_interval", v.in_unit_interval},
               {"nonincreasing", v.nonincreasing}};
  switch (v.verdict) {
    case Parabolicity::DParabolic: o.verdict = "d_parabolic"; break;
    case Parabolicity::NotDParabolic: o.verdict = "not_d_parabolic"; break;
    case Parabolicity::Indeterminate: o.verdict = "indeterminate"; break;
  }
  Csv table("R,potential");
  for (std::size_t i = 0; i < v.R_list.size(); ++i) table.row(v.R_list[i], v.potentials[i]);
  o.csv.push_back({"potentials.csv", table.str()});
  return o;
}

Outcome run_mp_check(const ExperimentConfig& config, const Logger& log) {
  const MpCheckSection& s = config.mp_check;
  const StripDomain domain = make_domain(config);
  const WarpProfile profile = make_profile(config);
  const OperatorSpec spec = make_operator_spec(config);
  const ExhaustionReport report =
      exhaustion_sweep(domain, spec, profile, s.R_list, s.density, s.xi_intervals);
  const Lambda1Sign sign = classify_lambda1(report);
  Outcome o;
  o.results["lambda"] = exhaustion_json(report);
  o.results["lambda1_sign"] = sign_verdict(sign);
  o.csv.push_back(lambda_csv(report));

  if (sign == Lambda1Sign::Positive) {
    const double R = s.R_list.back();
    const SparseOperator op = assemble(spec, make_grid(domain, R, s.density, s.xi_intervals), profile, domain.m);
    std::mt19937_64 rng(config.experiment.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Csv table("trial,max_u,min_Lu,tolerance,holds");
    bool all = true;
    double worst = -kInfinity;
    say(log, "mp-check: " + std::to_string(s.trials) + " nonnegative-rhs solves at R = " + format_number(R));
    for (int t = 0; t < s.trials; ++t) {
      std::vector<double> f(op.dimension(), 0.0);
      for (std::size_t p : op.interior) f[p] = unit(rng);
      CgOptions cg;
      cg.relative_tolerance = 1e-12;
      const std::vector<double> u = solve_dirichlet(op, f, {}, cg);
      const MPVerdict v = check_maximum_principle(op, u, report);
      all = all && v.holds;
      worst = std::max(worst, v.max_interior_value);
      table.row(t, v.max_interior_value, v.subsolution_residual, v.tolerance,
                std::string(v.holds ? "1" : "0"));
    }
    o.results["trials"] = s.trials;
    o.results["R"] = R;
    o.results["max_u"] = worst;
    o.verdict = all ? "holds" : "violated";
    o.csv.push_back({"trials.csv", table.str()});
  } else if (sign == Lambda1Sign::NonPositive) {
    say(log, "mp-check: searching for a counterexample");
    const Counterexample ce =
        generate_counterexample(domain, spec, profile, report, s.shift, s.density, s.xi_intervals);
    o.results["counterexample"] = {{"R", ce.R},
                                   {"shift", s.shift},
                                   {"shifted_lambda", ce.shifted_lambda},
                                   {"max_interior_value", ce.verdict.max_interior_value},
                                   {"max_boundary_value", ce.verdict.max_boundary_value},
                                   {"min_Lu", ce.verdict.subsolution_residual}};
    Csv table("r,xi,u");
    const Grid2D& g = ce.op.grid;
    for (std::size_t p = 0; p < g.size(); ++p)
      table.row(g.r.nodes[g.row_of(p)], g.xi.nodes[g.col_of(p)], ce.u[p]);
    o.csv.push_back({"counterexample.csv", table.str()});
    o.verdict = ce.verdict.holds ? "holds" : "violated";
  } else {
    o.verdict = "indeterminate";
  }
  return o;
}

Json log_real(const LogReal& x) {
  return {{"log", x.log_value},
          {"mantissa", x.mantissa},
          {"exponent", x.exponent},
          {"value", x.representable ? num(x.value()) : Json(nullptr)}};
}

Outcome run_abp(const ExperimentConfig& config, const Logger& log) {
  const AbpSection& a = config.abp;
  const ABPBundle bundle =
      make_abp_bundle(a.n, a.r_h, a.vol_omega, a.vol_omega_r.value_or(a.vol_omega), a.theta, a.p, a.C1);
  const StripDomain domain = make_domain(config);
  const double R = a.R.value_or(domain.r_max);
  if (!std::isfinite(R))
    throw Error(ErrorKind::ValidationError,
                "abp.R: the empirical check needs a bounded domain or an explicit R");
  const WarpProfile profile = make_profile(config);
  say(log, "abp: empirical check at R = " + format_number(R));
  const SparseOperator op = assemble(make_operator_spec(config), make_grid(domain, R, a.density), profile, domain.m);
  const std::vector<double> f(op.dimension(), a.rhs);
  const double diam = diameter_bound(domain, profile, R);
  std::optional<double> C;
  if (bundle.C_final.representable) C = bundle.C_final.value();
  const ABPCheck check = empirical_abp_check(op, f, diam, C);

  Outcome o;
  o.results["bundle"] = {{"n", bundle.n},          {"r_h", bundle.r_h},
                         {"vol_omega", bundle.vol_omega}, {"vol_omega_r", bundle.vol_omega_r},
                         {"t_bound", bundle.t_bound}, {"theta", bundle.theta},
                         {"p", bundle.p},          {"C1", bundle.C1},
                         {"C", log_real(bundle.C_final)}};
  o.results["empirical"] = {{"R", R},           {"sup_u", check.sup_u},
                            {"diam", check.diam}, {"f_norm", check.f_norm},
                            {"bound", check.bound}, {"ratio", check.ratio},
                            {"within", check.within}};
  o.verdict = check.within ? "within" : "exceeded";

  Csv sweep("theta,log10_C");
  for (int k = 1; k <= 9; ++k) {
    ABPBundle b = bundle;
    b.theta = k / 10.0;
    sweep.row(b.theta, abp_constant(b).log_value / std::log(10.0));
  }
  o.csv.push_back({"abp_sweep.csv", sweep.str()});
  return o;
}

Outcome run_symmetry(const ExperimentConfig& config, const Logger& log) {
  const SymmetrySection& s = config.symmetry;
  const StripDomain domain = make_domain(config);
  if (domain.cross_section.is_proper())
    throw Error(ErrorKind::ValidationError,
                "domain.kind: symmetry needs a closed fiber (plane_radial or space_radial)");
  AnnulusSpec spec;
  spec.r1 = s.r1;
  spec.r2 = s.r2;
  spec.fiber = domain.cross_section;
  spec.m = domain.m;
  spec.r_intervals = s.r_intervals;
  spec.xi_nodes = s.xi_nodes;

  WeightSpec weight;
  const double k = s.phi_slope, g = s.gamma_amplitude;
  weight.Phi = [k](double r) { return k * r; };
  weight.dPhi = [k](double) { return k; };
  weight.Gamma = [g](double xi) { return g * std::cos(xi); };
  weight.dGamma = [g](double xi) { return -g * std::sin(xi); };
  weight.label = format_number(k) + " r + " + format_number(g) + " cos xi";

  Nonlinearity f = Nonlinearity::allen_cahn();
  if (s.nonlinearity == NonlinearityKind::Zero) f = Nonlinearity::zero();
  if (s.nonlinearity == NonlinearityKind::Linear) f = Nonlinearity::linear();

  ScalarFn perturbation;
  if (s.perturbation != 0.0) {
    const double p = s.perturbation;
    perturbation = [p](double xi) { return p * std::sin(xi); };
  }
  const WarpProfile profile = make_profile(config);
  say(log, "symmetry: Newton on " + std::to_string(s.r_intervals) + " x " + std::to_string(s.xi_nodes));
  const SemilinearSolution sol =
      solve_semilinear_annulus(profile, spec, weight, f, s.c1, s.c2, {}, perturbation);
  const double threshold = condition_b_threshold(profile, weight.Phi, domain.m, s.r1, s.r2, s.quadrature_n);

  Outcome o;
  o.results = {{"nonlinearity", f.label},
               {"weight", weight.label},
               {"newton_iterations", sol.newton_iters},
               {"final_residual", sol.final_residual},
               {"residual_history", nums(sol.residual_history)},
               {"stability_lambda", sol.stability_lambda},
               {"symmetry_defect", sol.symmetry_defect},
               {"defect_tolerance", kSymmetryTolerance},
               {"condition_b_threshold", threshold}};
  o.verdict = sol.symmetry_defect <= kSymmetryTolerance ? "symmetric" : "asymmetric";
  const RadialProfile rp = radial_profile_extract(sol);
  Csv table("r,u_hat,defect");
  for (std::size_t i = 0; i < rp.r.size(); ++i) table.row(rp.r[i], rp.mean[i], rp.defect[i]);
  o.csv.push_back({"profile.csv", table.str()});
  return o;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
      return kExitConfigError;
    case ErrorKind::SolverDiverged:
    case ErrorKind::IndefiniteOperator:
    case ErrorKind::NewtonDiverged:
    case ErrorKind::NonmonotoneLineSearch:
    case ErrorKind::QuadratureUnderflow:
    case ErrorKind::MonotonicityViolation:
    case ErrorKind::ShiftTooSmall:
    case ErrorKind::SignError:
    case ErrorKind::ZeroVector:
      return kExitSolverError;
    default:
      return kExitInternalError;
  }
}

std::string RunReport::report_json() const {
  Json j = Json::parse(payload_json);
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

RunReport run(const ExperimentConfig& config, const Logger& log) {
  if (!config.experiment.command)
    throw Error(ErrorKind::ValidationError, "experiment.command: missing");
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = *config.experiment.command;
  report.expected = config.experiment.expect.value_or(expect_values(report.command).front());

  Outcome o;
  switch (report.command) {
    case Command::Spectrum: o = run_spectrum(config, log); break;
    case Command::Barrier: o = run_barrier(config, log); break;
    case Command::Parabolic: o = run_parabolic(config, log); break;
    case Command::Exhaust: o = run_exhaust(config, log); break;
    case Command::MpCheck: o = run_mp_check(config, log); break;
    case Command::Abp: o = run_abp(config, log); break;
    case Command::Symmetry: o = run_symmetry(config, log); break;
  }
  report.verdict = o.verdict;
  if (o.verdict == "indeterminate")
    report.exit_code = kExitIndeterminate;
  else if (o.verdict == report.expected)
    report.exit_code = kExitAsHypothesized;
  else
    report.exit_code = kExitHypothesisViolated;

  Json payload;
  payload["schema_version"] = kSchemaVersion;
  payload["command"] = to_string(report.command);
  payload["config"] = config_echo(config);
  payload["hypothesis"] = report.expected;
  payload["verdict"] = report.verdict;
  payload["exit_code"] = report.exit_code;
  payload["results"] = std::move(o.results);
  Json files = Json::array();
  for (const CsvFile& f : o.csv) files.push_back(f.name);
  payload["csv"] = files;
  report.payload_json = payload.dump(2);
  report.csv = std::move(o.csv);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_outputs(const RunReport& report, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  // report.json goes last so its presence marks a complete output set.
  std::vector<std::pair<std::string, std::string>> files;
  for (const CsvFile& f : report.csv) files.emplace_back(f.name, f.content);
  files.emplace_back("report.json", report.report_json());

  std::vector<fs::path> staged, committed;
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = out_dir / ("." + name + ".partial");
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      out.close();
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      fs::rename(staged[i], out_dir / files[i].first);
      committed.push_back(out_dir / files[i].first);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
    for (const auto& p : committed) fs::remove(p, ec);
    throw;
  }
}

}  // namespace maxprin
