#include "gsp/cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsp/bounds.hpp"
#include "gsp/chebyshev.hpp"
#include "gsp/gauss_tools.hpp"
#include "gsp/measure_io.hpp"
#include "gsp/persistence.hpp"
#include "gsp/sampler.hpp"
#include "gsp/special.hpp"

namespace gsp {

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::string config;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string format = "csv";
};

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + g.out);
  f << text;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list");
  return out;
}

EstimateMethod method_from(const std::string& name) {
  if (name == "exact") return EstimateMethod::ExactSmall;
  if (name == "orthant") return EstimateMethod::OrthantMC;
  if (name == "path") return EstimateMethod::PathMC;
  throw std::invalid_argument("unknown method: " + name);
}

const char* method_tag(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::ExactSmall: return "exact";
    case EstimateMethod::OrthantMC: return "orthant";
    case EstimateMethod::PathMC: return "path";
  }
  return "?";
}

json estimate_record(const SpectralMeasure& rho, double N,
                     const PersistenceEstimate& est, std::uint64_t seed) {
  json j;
  j["artifact"] = "estimate";
  j["schema_version"] = 1;
  j["N"] = N;
  j["log_p"] = est.log_p;
  j["se_log"] = est.se_log;
  j["method"] = method_tag(est.method);
  j["grid_step"] = est.grid_step;
  j["n_samples"] = est.n_samples;
  j["seed"] = seed;
  j["measure_digest"] = rho.digest();
  j["low_confidence"] = est.low_confidence;
  return j;
}

int cmd_measure_info(const GlobalOpts& g) {
  SpectralMeasure m = measure_from_file(g.config);
  json j;
  j["artifact"] = "measure-info";
  j["schema_version"] = 1;
  j["digest"] = m.digest();
  j["domain"] = (m.domain == Domain::IntegerTime) ? "integer" : "continuous";
  j["total_mass"] = m.total_mass();
  j["declared_delta"] = m.declared_delta;
  json moments;
  for (double d : {-2.0, -1.0, 0.0, 1.0, 2.0, m.declared_delta}) {
    MomentEntry e = m.moment(d);
    json entry;
    entry["delta"] = d;
    if (e.infinite) entry["value"] = "inf";
    else {
      entry["value"] = e.value;
      entry["error"] = e.error;
    }
    moments.push_back(entry);
  }
  j["moments"] = moments;
  json ssq;
  for (double N : {1.0, 10.0, 100.0}) ssq[fmt(N)] = m.sigma_sq(N);
  j["sigma_sq"] = ssq;
  j["canonical"] = json::parse(measure_to_json(m));
  emit(g, j.dump(2) + "\n");
  return 0;
}

int cmd_sample(const GlobalOpts& g, double start, double step, int count, int n_paths,
               const std::string& method, int n_modes, const std::string& gspp) {
  SpectralMeasure m = measure_from_file(g.config);
  PathGrid grid;
  grid.domain = m.domain;
  grid.start = start;
  grid.step = (m.domain == Domain::IntegerTime) ? 1.0 : step;
  grid.count = count;
  RngSpec rng{g.seed, 1};
  std::vector<SamplePath> paths;
  if (method == "exact") paths = sample_exact(m, grid, n_paths, rng);
  else if (method == "circulant") paths = sample_circulant(m, grid, n_paths, rng);
  else if (method == "spectral") paths = sample_spectral(m, grid, n_modes, n_paths, rng);
  else throw std::invalid_argument("unknown sampler: " + method);
  if (!gspp.empty()) write_paths_gspp(paths, gspp);
  std::ostringstream out;
  out << "t,value,path_id\n";
  char buf[96];
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (int i = 0; i < paths[p].grid.count; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%zu\n", paths[p].grid.t(i),
                    paths[p].values[i], p);
      out << buf;
    }
  }
  emit(g, out.str());
  return 0;
}

int cmd_estimate(const GlobalOpts& g, double N, double h, long n_samples,
                 const std::string& method) {
  SpectralMeasure m = measure_from_file(g.config);
  RngSpec rng{g.seed, 1};
  PersistenceOptions opts;
  opts.method = method_from(method);
  PersistenceEstimate est =
      (m.domain == Domain::IntegerTime)
          ? persistence_integer(m, static_cast<int>(std::llround(N)), n_samples, rng, opts)
          : persistence_continuous(m, N, h, n_samples, rng, opts);
  emit(g, estimate_record(m, N, est, g.seed).dump(2) + "\n");
  return 0;
}

int cmd_curve(const GlobalOpts& g, const std::string& n_list, double h, long n_samples,
              const std::string& method) {
  SpectralMeasure m = measure_from_file(g.config);
  RngSpec rng{g.seed, 1};
  PersistenceOptions opts;
  opts.method = method_from(method);
  std::vector<CurvePoint> curve = persistence_curve(m, parse_list(n_list), n_samples,
                                                    rng, opts, h);
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& pt : curve) {
      if (pt.failed) {
        json e;
        e["N"] = pt.N;
        e["error"] = pt.error;
        arr.push_back(e);
      } else {
        arr.push_back(estimate_record(m, pt.N, pt.estimate, g.seed));
      }
    }
    json j;
    j["artifact"] = "curve";
    j["schema_version"] = 1;
    j["points"] = arr;
    j["measure_digest"] = m.digest();
    emit(g, j.dump(2) + "\n");
  } else {
    emit(g, curve_to_csv(curve, opts.method, g.seed));
  }
  return 0;
}

int cmd_bounds(const GlobalOpts& g, const std::string& n_list, int k, double s,
               double beta_lower, double ell0_lower, double c0, double c1, double cs) {
  SpectralMeasure m = measure_from_file(g.config);
  BoundParams params;
  if (k >= 0) params.k = k;
  params.s = s;
  params.constants.c0 = c0;
  params.constants.c1 = c1;
  params.constants.c_s = cs;
  if (beta_lower > 0.0) params.beta_lower = beta_lower;
  if (ell0_lower >= 0.0) params.ell0_lower = ell0_lower;
  std::ostringstream out;
  out << "N,lower_log,upper_log,ell_star_lower,ell_star_upper,k_used,flags\n";
  for (double N : parse_list(n_list)) {
    std::string lower_log = "", ell_lower = "", upper_log = "", ell_upper = "",
                k_used = "", flags;
    try {
      BoundResult lo = optimize_lower(m, N, params);
      lower_log = fmt(lo.log_bound);
      ell_lower = fmt(lo.ell_star);
      for (const auto& f : lo.flags) flags += (flags.empty() ? "" : ";") + f;
    } catch (const std::exception& e) {
      flags += std::string(flags.empty() ? "" : ";") + "lower:" + e.what();
    }
    try {
      BoundResult up = optimize_upper(m, N, params);
      upper_log = fmt(up.log_bound);
      ell_upper = fmt(up.ell_star);
      k_used = std::to_string(up.k_used);
      for (const auto& f : up.flags) flags += (flags.empty() ? "" : ";") + f;
    } catch (const std::exception& e) {
      flags += std::string(flags.empty() ? "" : ";") + "upper:" + e.what();
    }
    out << fmt(N) << ',' << lower_log << ',' << upper_log << ',' << ell_lower << ','
        << ell_upper << ',' << k_used << ",\"" << flags << "\"\n";
  }
  emit(g, out.str());
  return 0;
}

RegimeFeatures derive_features(const SpectralMeasure& m) {
  RegimeFeatures f;
  bool origin_found = false;
  double min_support = std::numeric_limits<double>::infinity();
  for (const auto& at : m.atoms)
    if (at.mass > 0.0) min_support = std::min(min_support, at.freq);
  for (const auto& seg : m.segments) {
    min_support = std::min(min_support, seg.a);
    if (seg.a == 0.0) {
      origin_found = true;
      if (seg.form == SegmentForm::Power) {
        f.origin = RegimeFeatures::Origin::PowerAlpha;
        f.alpha = seg.alpha;
      } else if (seg.form == SegmentForm::Constant) {
        f.origin = RegimeFeatures::Origin::PowerAlpha;
        f.alpha = 0.0;
      } else if (seg.form == SegmentForm::ExpWell) {
        f.origin = RegimeFeatures::Origin::ExpWell;
        f.expwell_A = seg.A;
      }
    }
    if (seg.unbounded()) {
      f.tail = (seg.form == SegmentForm::LogTail) ? RegimeFeatures::Tail::Log
                                                  : RegimeFeatures::Tail::Power;
      if (seg.form == SegmentForm::PowerTail) f.tail_alpha = seg.alpha;
    }
  }
  if (!origin_found && min_support > 0.0) f.origin = RegimeFeatures::Origin::Gap;
  return f;
}

int cmd_regimes(const GlobalOpts& g) {
  SpectralMeasure m = measure_from_file(g.config);
  RegimeFeatures f = derive_features(m);
  std::vector<RegimeClass> classes = envelope(f, m.domain);
  json arr = json::array();
  for (const auto& rc : classes) {
    json e;
    switch (rc.kind) {
      case RegimeKind::PowerLog: e["class"] = "power-log"; break;
      case RegimeKind::Linear: e["class"] = "linear"; break;
      case RegimeKind::NLogN: e["class"] = "n-log-n"; break;
      case RegimeKind::Quadratic: e["class"] = "quadratic"; break;
      case RegimeKind::ExpExp: e["class"] = "exp-exp"; break;
    }
    e["side"] = (rc.side == RegimeSide::Both) ? "both"
                : (rc.side == RegimeSide::Lower) ? "lower" : "upper";
    e["exponent"] = rc.exponent;
    e["conditions"] = rc.conditions;
    arr.push_back(e);
  }
  json j;
  j["artifact"] = "regimes";
  j["schema_version"] = 1;
  j["measure_digest"] = m.digest();
  j["classes"] = arr;
  emit(g, j.dump(2) + "\n");
  return 0;
}

int cmd_cheby(const GlobalOpts& g, int k, double N, const std::string& family,
              const std::string& mode) {
  json j;
  j["artifact"] = "cheby";
  j["schema_version"] = 1;
  j["k"] = k;
  j["N"] = N;
  j["seed"] = g.seed;
  j["mode"] = mode;
  j["family"] = family;
  if (mode == "continuous") {
    std::function<double(double)> f, fk;
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    if (family == "chebyshev") {
      const double scale = std::ldexp(1.0, 1 - k);
      f = [=](double x) { return scale * chebyshev_value(k, x / N); };
      const double deriv = kfact / std::pow(N, k);
      fk = [=](double) { return deriv; };
    } else if (family == "exp") {
      f = [](double x) { return std::exp(x); };
      fk = [](double x) { return std::exp(x); };
    } else if (family == "linear") {
      if (k != 1) throw std::invalid_argument("linear family requires k = 1");
      f = [](double x) { return x; };
      fk = [](double) { return 1.0; };
    } else {
      throw std::invalid_argument("unknown family: " + family);
    }
    ContinuousCheck chk = verify_continuous(f, fk, k, N);
    j["lhs"] = chk.lhs;
    j["sup"] = chk.sup;
    j["implied_c0"] = chk.implied_c0;
    j["samples"] = 10000;
    j["window"] = "[-9N/20, 9N/20]";
  } else if (mode == "discrete") {
    const int Ni = static_cast<int>(std::llround(N));
    std::vector<double> vals;
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    for (int n = -2 * Ni; n <= 2 * Ni; ++n) {
      if (family == "chebyshev") {
        vals.push_back(std::ldexp(1.0, 1 - k) *
                       chebyshev_value(k, std::clamp(n / (2.0 * Ni), -1.0, 1.0)));
      } else {
        double p = 1.0;  // rising monomial n^k / k!
        for (int i = 0; i < k; ++i) p *= (n + i);
        vals.push_back(p / kfact);
      }
    }
    DiscreteCheck chk = verify_discrete(vals, k, Ni);
    j["lhs"] = chk.lhs;
    j["sup"] = chk.sup;
    j["implied_c0"] = chk.implied_c;
    j["hypothesis_scaling"] = chk.hypothesis_scaling;
    j["smoothing_positive"] = chk.smoothing_positive;
    j["samples"] = 4 * Ni + 1;
    j["window"] = "[-9N/10, 9N/10] over [-2N, 2N]";
  } else {
    throw std::invalid_argument("mode must be continuous or discrete");
  }
  emit(g, j.dump(2) + "\n");
  return 0;
}

int cmd_verify(const GlobalOpts& g, long n_samples, const std::string& margins_csv) {
  RngSpec rng{g.seed, 1};
  std::vector<CheckReport> reports;

  std::vector<double> grid;
  for (int i = 1; i <= 1000; ++i) grid.push_back(10.0 * i / 1000.0);
  reports.push_back(tail_bounds_check(grid));

  {
    CheckReport rep;
    rep.name = "tails_comp_theta";
    const double theta = tails_comp_theta(2.0);
    rep.detail = "delta=2, theta=" + fmt(theta);
    rep.pass = tails_comp_verify(2.0, theta, 10) && theta <= 2.0 + 1e-3;
    rep.margin = 2.0 - theta;
    reports.push_back(rep);
  }
  {
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 0.9, 0.9, 1.0;
    reports.push_back(khatri_sidak_check(s, 1.0, n_samples, rng));
  }
  {
    std::vector<double> b = {0.0, 1.0, 2.0, 3.0};
    reports.push_back(iid_average_bound_check(b, 1.5));
  }
  {
    SpectralMeasure sinc_m;
    sinc_m.domain = Domain::ContinuousTime;
    sinc_m.segments.push_back({0.0, M_PI, SegmentForm::Constant, 1.0 / (2.0 * M_PI), 0.0, 1.0});
    sinc_m.declared_delta = 2.0;
    CheckReport rep;
    rep.name = "antideriv_variance_bound";
    // cumulative mass of the sinc measure is lambda/(2 pi): b = 1/(2 pi), gamma = 1
    AntiderivVariance av = antideriv_variance(sinc_m, 8.0, 1.0 / (2.0 * M_PI), 1.0);
    rep.detail = "sinc measure, N=8, gamma=1";
    rep.margin = av.bound - av.value;
    rep.pass = av.bound_ok;
    reports.push_back(rep);
    PathGrid pg;
    pg.domain = Domain::ContinuousTime;
    pg.start = 0.0;
    pg.step = 0.25;
    pg.count = 32;
    SpectralMeasure zero;
    zero.atoms.push_back({0.0, 0.0});
    zero.domain = Domain::ContinuousTime;
    reports.push_back(anderson_check(sinc_m, zero, pg, 1.0, n_samples, rng));
    reports.push_back(borell_tis_check(sinc_m, 8.0, {1.0, 2.0, 3.0}, n_samples, rng));
  }

  bool all_pass = true;
  std::ostringstream xml, csv;
  xml << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  int failures = 0;
  for (const auto& r : reports) failures += r.pass ? 0 : 1;
  xml << "<testsuite name=\"gsp-inequalities\" tests=\"" << reports.size()
      << "\" failures=\"" << failures << "\">\n";
  csv << "name,margin,se,pass,n_samples,detail\n";
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    xml << "  <testcase name=\"" << r.name << "\"";
    if (r.pass) xml << "/>\n";
    else
      xml << "><failure message=\"margin " << fmt(r.margin) << " with se " << fmt(r.se)
          << "\"/></testcase>\n";
    csv << r.name << ',' << fmt(r.margin) << ',' << fmt(r.se) << ','
        << (r.pass ? "true" : "false") << ',' << r.n_samples << ",\"" << r.detail
        << "\"\n";
  }
  xml << "</testsuite>\n";
  emit(g, xml.str());
  if (!margins_csv.empty()) {
    std::ofstream f(margins_csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + margins_csv);
    f << csv.str();
  }
  return all_pass ? 0 : 1;
}

int cmd_report(const GlobalOpts& g, const std::vector<std::string>& inputs,
               const std::string& csv_out) {
  if (inputs.empty()) throw std::invalid_argument("report: at least one input artifact required");
  json summary;
  summary["artifact"] = "report";
  summary["schema_version"] = 1;
  json curves = json::array(), bounds_arr = json::array(), regimes_arr = json::array(),
       estimates = json::array();
  std::ostringstream longcsv;
  longcsv << "series,N,value,lo,hi\n";
  for (const auto& path : inputs) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("report: cannot open " + path);
    json j;
    try {
      std::stringstream ss;
      ss << f.rdbuf();
      j = json::parse(ss.str());
    } catch (const std::exception& e) {
      throw std::invalid_argument("report: " + path + " is not JSON: " + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
      throw std::invalid_argument("report: mixed or missing schema_version in " + path);
    const std::string kind = j.value("artifact", "");
    if (kind == "curve") {
      curves.push_back(j);
      for (const auto& pt : j["points"]) {
        if (!pt.contains("log_p")) continue;
        const double lp = pt["log_p"].get<double>();
        const double se = pt["se_log"].get<double>();
        longcsv << "curve," << fmt(pt["N"].get<double>()) << ',' << fmt(lp) << ','
                << fmt(lp - se) << ',' << fmt(lp + se) << "\n";
      }
    } else if (kind == "estimate") {
      estimates.push_back(j);
      const double lp = j["log_p"].get<double>();
      const double se = j["se_log"].get<double>();
      longcsv << "estimate," << fmt(j["N"].get<double>()) << ',' << fmt(lp) << ','
              << fmt(lp - se) << ',' << fmt(lp + se) << "\n";
    } else if (kind == "regimes") {
      regimes_arr.push_back(j);
    } else if (kind == "bounds") {
      bounds_arr.push_back(j);
    } else {
      throw std::invalid_argument("report: unrecognized artifact kind in " + path);
    }
  }
  summary["curves"] = curves;
  summary["estimates"] = estimates;
  summary["bounds"] = bounds_arr;
  summary["regimes"] = regimes_arr;
  emit(g, summary.dump(2) + "\n");
  if (!csv_out.empty()) {
    std::ofstream f(csv_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + csv_out);
    f << longcsv.str();
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"gsplab: persistence probabilities of Gaussian stationary processes"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  GlobalOpts g;
  app.add_option("--config", g.config, "measure config (JSON, schema_version 1)");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--threads", g.threads, "worker cap (results are thread-count independent)");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* info = app.add_subcommand("measure-info", "validate and describe a measure");

  auto* sample = app.add_subcommand("sample", "draw sample paths");
  double start = 0.0, step = 1.0;
  int count = 16, n_paths = 1, n_modes = 64;
  std::string sampler_method = "circulant", gspp;
  sample->add_option("--grid-start", start);
  sample->add_option("--grid-step", step);
  sample->add_option("--grid-count", count);
  sample->add_option("--n-paths", n_paths);
  sample->add_option("--method", sampler_method, "exact|circulant|spectral");
  sample->add_option("--n-modes", n_modes);
  sample->add_option("--gspp", gspp, "also write the binary GSPP dump here");

  auto* estimate = app.add_subcommand("estimate", "persistence estimate at one N");
  double est_N = 8.0, est_h = 0.25;
  long est_samples = 100000;
  std::string est_method = "orthant";
  estimate->add_option("--N", est_N)->required();
  estimate->add_option("--step", est_h, "grid step (continuous time)");
  estimate->add_option("--n-samples", est_samples);
  estimate->add_option("--method", est_method, "exact|orthant|path");

  auto* curve = app.add_subcommand("curve", "persistence curve over N");
  std::string n_list = "8,16,32";
  curve->add_option("--N-list", n_list)->required();
  curve->add_option("--step", est_h, "grid step (continuous time)");
  curve->add_option("--n-samples", est_samples);
  curve->add_option("--method", est_method, "exact|orthant|path");

  auto* bounds_cmd = app.add_subcommand("bounds", "lower/upper bound table");
  int bk = -1;
  double bs = 0.0, bbeta = -1.0, bell0 = -1.0, bc0 = 1.0, bc1 = 1.0, bcs = 1.0;
  bounds_cmd->add_option("--N-list", n_list)->required();
  bounds_cmd->add_option("--k", bk, "pin k (default: optimize over 0..k(N))");
  bounds_cmd->add_option("--s", bs, "fractional part of gamma = 2k+s");
  bounds_cmd->add_option("--beta-lower", bbeta, "continuous-time lower-bound beta");
  bounds_cmd->add_option("--ell0-lower", bell0, "continuous-time lower-bound ell0");
  bounds_cmd->add_option("--c0", bc0);
  bounds_cmd->add_option("--c1", bc1);
  bounds_cmd->add_option("--cs", bcs);

  auto* regimes = app.add_subcommand("regimes", "asymptotic regime classification");

  auto* cheby = app.add_subcommand("cheby", "analytic-inequality verification");
  int ck = 3;
  double cN = 10.0;
  std::string cfamily = "chebyshev", cmode = "continuous";
  cheby->add_option("--k", ck)->required();
  cheby->add_option("--N", cN)->required();
  cheby->add_option("--family", cfamily, "chebyshev|exp|linear (continuous), chebyshev|monomial (discrete)");
  cheby->add_option("--mode", cmode, "continuous|discrete");

  auto* verify = app.add_subcommand("verify", "run the Gaussian inequality suite");
  long v_samples = 20000;
  std::string margins_csv;
  verify->add_option("--n-samples", v_samples);
  verify->add_option("--margins-csv", margins_csv);

  auto* report = app.add_subcommand("report", "join run artifacts into a summary");
  std::vector<std::string> inputs;
  std::string csv_out;
  report->add_option("--inputs", inputs, "artifact JSON files")->expected(-1);
  report->add_option("--csv-out", csv_out, "plot-ready long CSV");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "{\"error\": \"config\", \"message\": " << json(e.what()).dump()
              << "}\n";
    return 2;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*info) return cmd_measure_info(g);
    if (*sample) return cmd_sample(g, start, step, count, n_paths, sampler_method,
                                   n_modes, gspp);
    if (*estimate) return cmd_estimate(g, est_N, est_h, est_samples, est_method);
    if (*curve) return cmd_curve(g, n_list, est_h, est_samples, est_method);
    if (*bounds_cmd)
      return cmd_bounds(g, n_list, bk, bs, bbeta, bell0, bc0, bc1, bcs);
    if (*regimes) return cmd_regimes(g);
    if (*cheby) return cmd_cheby(g, ck, cN, cfamily, cmode);
    if (*verify) return cmd_verify(g, v_samples, margins_csv);
    if (*report) return cmd_report(g, inputs, csv_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "{\"error\": \"config\", \"message\": " << json(e.what()).dump() << "}\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "{\"error\": \"inapplicable\", \"message\": " << json(e.what()).dump()
              << "}\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\": \"internal\", \"message\": " << json(e.what()).dump()
              << "}\n";
    return 1;
  }
  return 2;
}

}  // namespace gsp
