#include "surfgrow/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "surfgrow/blowup.hpp"
#include "surfgrow/evolve.hpp"
#include "surfgrow/field.hpp"
#include "surfgrow/functionals.hpp"
#include "surfgrow/inequalities.hpp"
#include "surfgrow/profiles.hpp"
#include "surfgrow/semigroup.hpp"

namespace surfgrow::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

/* nlohmann objects iterate in key order, so dumps are stable byte-for-byte
   across runs with the same inputs. */
void WriteJson(const fs::path& path, const json& j) {
  WriteText(path, j.dump(2) + "\n");
}

std::string TerminationName(Termination t) {
  switch (t) {
    case Termination::kCompleted:
      return "completed";
    case Termination::kNormCapHit:
      return "norm_cap";
    default:
      return "dt_underflow";
  }
}

/* "lo:hi:n" -> n evenly spaced values (n = 1 keeps lo). */
std::vector<double> ParseRange(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &extra) != 3 ||
      n < 1)
    throw std::invalid_argument("range must look like lo:hi:n, got " + spec);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return out;
}

std::vector<int> ParseIntList(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

/* Index-sharded fan-out: results must be written by index, so the output
   is identical no matter how many workers ran. */
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

Scheme ParseScheme(const std::string& name) {
  if (name == "etdrk4") return Scheme::kEtdrk4;
  if (name == "ifrk4") return Scheme::kIfrk4;
  throw std::invalid_argument("scheme must be etdrk4 or ifrk4");
}

/* ------------------------------------------------------------------ */
/* initial data                                                        */

struct InitOpts {
  std::string preset;
  std::string snapshot;
  std::vector<std::string> coeffs;  // "j:re:im"
  double amplitude = 1.0;
  double slope = -1.5;
  double rho = 0.6;
  bool complex_data = false;
  std::uint64_t seed = 0;
};

void AddInitOptions(CLI::App* cmd, InitOpts& o) {
  cmd->add_option("--preset", o.preset,
                  "initial data preset: cos1 | cos2 | cos12 | random | "
                  "geometric | zero");
  cmd->add_option("--snapshot", o.snapshot, "initial data snapshot file");
  cmd->add_option("--coeff", o.coeffs,
                  "explicit coefficient j:re:im (repeatable)");
  cmd->add_option("--amplitude", o.amplitude, "preset amplitude factor");
  cmd->add_option("--slope", o.slope, "spectral slope of the random preset");
  cmd->add_option("--rho", o.rho, "ratio of the geometric preset");
  cmd->add_flag("--complex-data", o.complex_data,
                "drop the reality constraint of the initial data");
  cmd->add_option("--seed", o.seed, "seed for randomized presets");
}

FourierField BuildInitialData(const InitOpts& o, double L, int K) {
  const int sources = (!o.preset.empty() ? 1 : 0) +
                      (!o.snapshot.empty() ? 1 : 0) +
                      (!o.coeffs.empty() ? 1 : 0);
  if (sources != 1)
    throw std::invalid_argument(
        "give exactly one of --preset, --snapshot, --coeff");
  if (!o.snapshot.empty()) return read_snapshot(o.snapshot).field;
  if (!o.coeffs.empty()) {
    FourierField u(L, K, !o.complex_data);
    for (const std::string& entry : o.coeffs) {
      int j = 0;
      double re = 0.0, im = 0.0;
      char extra = 0;
      if (std::sscanf(entry.c_str(), "%d:%lf:%lf%c", &j, &re, &im, &extra) !=
          3)
        throw std::invalid_argument("coefficient must look like j:re:im");
      u.set_coeff(j, Complex(re, im));
    }
    return u;
  }
  if (o.preset == "cos1") return cosine_field(L, K, 1, o.amplitude);
  if (o.preset == "cos2") return cosine_field(L, K, 2, o.amplitude);
  if (o.preset == "cos12")
    return cosine_field(L, K, 1, o.amplitude) +
           cosine_field(L, K, 2, 0.5 * o.amplitude);
  if (o.preset == "random")
    return o.amplitude *
           random_field(L, K, o.slope, o.seed, !o.complex_data);
  if (o.preset == "geometric")
    return geometric_complex_field(L, K, o.amplitude, o.rho);
  if (o.preset == "zero") return FourierField(L, K, !o.complex_data);
  throw std::invalid_argument("unknown preset " + o.preset);
}

/* ------------------------------------------------------------------ */
/* subcommand option bags                                              */

struct SimulateOpts {
  InitOpts init;
  std::string out = "surfgrow_out";
  double L = kDefaultPeriod;
  int K = 128;
  double T = 0.1;
  double dt = 1e-4;
  double dt_min = 1e-13;
  std::string scheme = "etdrk4";
  int record_every = 1;
  bool fixed_dt = false;
  double adapt_target = 1e-7;
  double norm_cap = 1e8;
  bool no_states = false;
};

struct PicardOpts {
  InitOpts init;
  std::string out = "surfgrow_out";
  double L = kDefaultPeriod;
  int K = 32;
  double alpha = 0.25;
  double T = 0.25;
  int iters = 8;
  double delta = 1.0;
};

struct BlowupScanOpts {
  std::string out = "surfgrow_out";
  bool complex_scan = false;
  std::string a_range = "0.5:2:4";
  std::string rho_range = "0.5:0.9:5";
  double L = kDefaultPeriod;
  int K = 64;
  double T = 1.0;
  double dt = 1e-5;
  double norm_cap = 1e6;
  int record_every = 4;
  double s = 2.0;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct ProfilesOpts {
  std::string out = "surfgrow_out";
  int case_id = 3;
  double L = kDefaultPeriod;
  double c1 = 0.0;
  double c2 = 0.0;
  double b = 1.0;
  double delta = 0.05;
  int grid = 4096;
  int dump_points = 2048;
};

struct SelfSimilarOpts {
  std::string out = "surfgrow_out";
  double Y = 10.0;
  int n_points = 401;
  int guesses = 50;
  std::string boundary = "decay";
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct InequalityOpts {
  std::string out = "surfgrow_out";
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  std::string k_list = "64,128";
  long samples = 10000;
  std::uint64_t seed = 0;
};

struct VerifyOpts {
  std::string out = "surfgrow_out";
  std::string suite = "trivial";
};

/* ------------------------------------------------------------------ */
/* handlers                                                            */

json FieldSummary(const DiagnosticsRecord& rec) {
  json j;
  j["t"] = rec.t;
  j["l2_sq"] = rec.l2_sq;
  j["h2_sq"] = rec.h2_sq;
  j["h_half"] = rec.sobolev.count(0.5) ? rec.sobolev.at(0.5) : 0.0;
  j["h1"] = rec.sobolev.count(1.0) ? rec.sobolev.at(1.0) : 0.0;
  j["h2"] = rec.sobolev.count(2.0) ? rec.sobolev.at(2.0) : 0.0;
  return j;
}

int RunSimulate(const SimulateOpts& o, const std::string& config_echo) {
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  const FourierField h0 = BuildInitialData(o.init, o.L, o.K);
  StepperConfig cfg;
  cfg.dt = o.dt;
  cfg.dt_min = o.dt_min;
  cfg.scheme = ParseScheme(o.scheme);
  cfg.record_every = o.record_every;
  cfg.adaptive = !o.fixed_dt;
  cfg.adapt_target = o.adapt_target;
  cfg.norm_cap = o.norm_cap;
  cfg.store_states = !o.no_states;

  const Trajectory traj = simulate(h0, o.T, cfg);

  write_snapshot(h0, 0.0, (out / "initial_state.snap").string());
  if (!traj.states.empty())
    write_snapshot(traj.states.back(), traj.times.back(),
                   (out / "final_state.snap").string());
  write_diagnostics_csv(traj.records, (out / "trajectory.csv").string());

  json summary;
  summary["command"] = "simulate";
  summary["L"] = h0.period_length();
  summary["K"] = h0.max_mode();
  summary["scheme"] = o.scheme;
  summary["dt"] = o.dt;
  summary["T_requested"] = o.T;
  summary["termination"] = TerminationName(traj.termination);
  summary["accepted_steps"] = traj.accepted_steps;
  summary["rejected_steps"] = traj.rejected_steps;
  summary["final"] = FieldSummary(traj.records.back());
  summary["energy_residual"] = energy_residual(traj);
  WriteJson(out / "summary.json", summary);

  std::cout << "simulate: " << TerminationName(traj.termination) << " at t="
            << format_full(traj.times.back())
            << " energy_residual=" << format_full(energy_residual(traj))
            << "\n";
  if (traj.termination != Termination::kCompleted) {
    WriteText(out / "failure.txt",
              "run terminated early: " + TerminationName(traj.termination) +
                  " at t=" + format_full(traj.times.back()) + "\n");
    return 2;
  }
  return 0;
}

int RunPicard(const PicardOpts& o, const std::string& config_echo) {
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  const FourierField h0 = BuildInitialData(o.init, o.L, o.K);
  const PicardState st = picard_iterate(h0, o.alpha, o.T, o.iters, o.delta);

  json rep;
  rep["command"] = "picard";
  rep["alpha"] = o.alpha;
  rep["T"] = o.T;
  rep["delta"] = o.delta;
  rep["grid_points"] = st.time_grid.size();
  rep["k_norms"] = st.k_norms;
  rep["diff_k_norms"] = st.diff_k_norms;
  json ratios = json::array();
  for (std::size_t i = 1; i < st.diff_k_norms.size(); ++i) {
    ratios.push_back(st.diff_k_norms[i - 1] > 0.0
                         ? st.diff_k_norms[i] / st.diff_k_norms[i - 1]
                         : 0.0);
  }
  rep["contraction_ratios"] = ratios;
  rep["diverged"] = st.diverged;
  rep["divergence_index"] = st.divergence_index;
  rep["beta_constant"] = duhamel_beta_constant(o.alpha);
  WriteJson(out / "picard.json", rep);

  std::cout << "picard: " << st.diff_k_norms.size() << " differences, "
            << (st.diverged ? "diverged" : "contracting") << "\n";
  return 0;
}

json CellJson(const BlowupSweepCell& c) {
  json j;
  j["amplitude"] = c.amplitude;
  j["rho"] = c.rho;
  j["termination"] = TerminationName(c.termination);
  j["final_time"] = c.final_time;
  j["final_h2"] = c.final_h2;
  j["fitted"] = c.fitted;
  if (c.fitted) {
    j["fit"] = {{"s", c.fit.s},
                {"t0_est", c.fit.t0_est},
                {"exponent_est", c.fit.exponent_est},
                {"C_est", c.fit.C_est},
                {"leray_margin", c.fit.leray_margin},
                {"window", {c.fit.window_lo, c.fit.window_hi}},
                {"r2", c.fit.r2}};
    j["c_lower_last"] = c.c_lower_last;
    j["c_lower_prev"] = c.c_lower_prev;
  }
  j["leray_consistent"] = c.leray_consistent;
  return j;
}

int RunBlowupScan(const BlowupScanOpts& o, const std::string& config_echo) {
  if (!o.complex_scan)
    throw std::invalid_argument(
        "only the complex-data sweep is implemented; pass --complex");
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  const std::vector<double> amplitudes = ParseRange(o.a_range);
  const std::vector<double> rhos = ParseRange(o.rho_range);
  for (double r : rhos) {
    if (r <= 0.0 || r >= 1.0)
      throw std::invalid_argument("rho values must lie in (0, 1)");
  }
  for (double a : amplitudes) {
    if (a <= 0.0) throw std::invalid_argument("amplitudes must be positive");
  }

  StepperConfig cfg;
  cfg.dt = o.dt;
  cfg.norm_cap = o.norm_cap;
  cfg.record_every = o.record_every;
  cfg.store_states = false;

  const int n_cells = static_cast<int>(amplitudes.size() * rhos.size());
  std::vector<BlowupSweepCell> cells(n_cells);
  ParallelFor(n_cells, o.jobs, [&](int idx) {
    const double a = amplitudes[idx / rhos.size()];
    const double r = rhos[idx % rhos.size()];
    cells[idx] = complex_blowup_cell(a, r, o.L, o.K, o.T, cfg, o.s);
  });

  json rep;
  rep["command"] = "blowup-scan";
  rep["L"] = o.L;
  rep["K"] = o.K;
  rep["T"] = o.T;
  rep["s"] = o.s;
  rep["seed"] = o.seed;
  rep["amplitudes"] = amplitudes;
  rep["rhos"] = rhos;
  json arr = json::array();
  int n_cap = 0, n_consistent = 0;
  for (const BlowupSweepCell& c : cells) {
    arr.push_back(CellJson(c));
    if (c.termination == Termination::kNormCapHit) ++n_cap;
    if (c.leray_consistent) ++n_consistent;
  }
  rep["cells"] = arr;
  rep["norm_cap_count"] = n_cap;
  rep["leray_consistent_count"] = n_consistent;
  WriteJson(out / "report.json", rep);

  std::cout << "blowup-scan: " << n_cells << " cells, " << n_cap
            << " hit the norm cap, " << n_consistent
            << " Leray-consistent\n";
  return 0;
}

int RunProfiles(const ProfilesOpts& o, const std::string& config_echo) {
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  const StationaryProfile p =
      make_stationary_profile(o.case_id, o.L, o.c1, o.c2, o.b);
  const double residual = stationary_residual(p, o.delta, o.grid);

  std::string dump;
  dump.reserve(static_cast<std::size_t>(o.dump_points) * 48);
  for (int i = 0; i < o.dump_points; ++i) {
    const double x = o.L * i / o.dump_points;
    dump += format_full(x);
    dump += ' ';
    dump += format_full(stationary_eval(p, x));
    dump += '\n';
  }
  WriteText(out / "profile.txt", dump);

  json rep;
  rep["command"] = "profiles";
  rep["case"] = p.case_id;
  rep["L"] = p.period_length;
  rep["c1"] = p.c1;
  rep["c2"] = p.c2;
  rep["b"] = p.b;
  rep["B"] = stationary_first_integral(p);
  rep["singular_points"] = p.singular_points;
  rep["delta_exclusion"] = o.delta;
  rep["residual"] = residual;
  WriteJson(out / "report.json", rep);

  std::cout << "profiles: case " << p.case_id
            << " residual=" << format_full(residual) << "\n";
  return 0;
}

int RunSelfSimilar(const SelfSimilarOpts& o, const std::string& config_echo) {
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  SelfSimilarProblem prob;
  prob.truncation = o.Y;
  prob.n_points = o.n_points;
  if (o.boundary == "decay")
    prob.boundary = SelfSimilarProblem::Boundary::kDecayToZero;
  else if (o.boundary == "free")
    prob.boundary = SelfSimilarProblem::Boundary::kFree;
  else
    throw std::invalid_argument("boundary must be decay or free");

  std::vector<SelfSimilarResult> results(o.guesses);
  std::vector<std::uint64_t> seeds(o.guesses);
  ParallelFor(o.guesses, o.jobs, [&](int i) {
    seeds[i] = mix_seed(o.seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd guess = self_similar_random_guess(prob, seeds[i]);
    results[i] = self_similar_solve(prob, guess);
  });

  int collapsed = 0, stalled = 0, other = 0;
  json arr = json::array();
  for (int i = 0; i < o.guesses; ++i) {
    const SelfSimilarResult& r = results[i];
    if (r.converged_to_zero)
      ++collapsed;
    else if (r.stalled)
      ++stalled;
    else
      ++other;
    arr.push_back({{"index", i},
                   {"seed", seeds[i]},
                   {"Y", o.Y},
                   {"n_points", o.n_points},
                   {"residual", r.residual},
                   {"iterations", r.newton_iterations},
                   {"collapsed", r.converged_to_zero},
                   {"stalled", r.stalled}});
    if (!r.converged_to_zero && !r.stalled) {
      /* neither outcome: dump the iterate, it would be a finding */
      std::string prof;
      for (int m = 0; m < r.y.size(); ++m) {
        prof += format_full(r.y[m]);
        prof += ' ';
        prof += format_full(r.phi[m]);
        prof += '\n';
      }
      WriteText(out / ("profile_" + std::to_string(i) + ".txt"), prof);
    }
  }
  json rep;
  rep["command"] = "selfsimilar";
  rep["Y"] = o.Y;
  rep["n_points"] = o.n_points;
  rep["guesses"] = o.guesses;
  rep["seed"] = o.seed;
  rep["collapsed"] = collapsed;
  rep["stalled"] = stalled;
  rep["other"] = other;
  rep["runs"] = arr;
  WriteJson(out / "outcomes.json", rep);

  std::cout << "selfsimilar: Y=" << o.Y << " collapsed=" << collapsed
            << " stalled=" << stalled << " other=" << other << "\n";
  return 0;
}

int RunInequality(const InequalityOpts& o, const std::string& config_echo) {
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  const ExponentTriple triple{o.alpha, o.beta, o.gamma};
  const std::vector<int> ks = ParseIntList(o.k_list);

  json rep;
  rep["command"] = "inequality-sweep";
  rep["triple"] = {{"alpha", o.alpha}, {"beta", o.beta}, {"gamma", o.gamma}};
  rep["admissible"] = condition_holds(triple);
  rep["samples"] = o.samples;
  rep["seed"] = o.seed;
  json per_k = json::array();
  for (int k : ks) {
    const InequalityReport r = trilinear_sup(triple, k, o.samples, o.seed);
    per_k.push_back({{"K", r.k_used},
                     {"max_ratio", r.max_ratio},
                     {"max_ratio_2k", r.max_ratio_2k},
                     {"stability", r.stability},
                     {"argmax_seed", r.argmax_seed},
                     {"slopes", {r.slope_u, r.slope_v, r.slope_w}}});
    std::cout << "inequality-sweep: K=" << r.k_used
              << " max_ratio=" << format_full(r.max_ratio)
              << " stability=" << format_full(r.stability) << "\n";
  }
  rep["results"] = per_k;
  WriteJson(out / "report.json", rep);
  return 0;
}

/* ------------------------------------------------------------------ */
/* verify: the quick identity checklist                                */

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

void RunTrivialChecks(std::vector<Check>& out) {
  const auto add = [&](const std::string& name, bool pass,
                       const std::string& detail) {
    out.push_back({name, pass, detail});
  };
  const double L = kDefaultPeriod;

  {
    const FourierField u = cosine_field(L, 16, 1, 1.0);
    const FourierField v = apply_semigroup(u, 0.0);
    const double d = (v.coeffs() - u.coeffs()).norm();
    add("semigroup_identity_at_t0", d == 0.0, "|S(0)u - u| = " + format_full(d));
  }
  add("smoothing_constant_gamma0", smoothing_constant(0.0) == 1.0,
      "value " + format_full(smoothing_constant(0.0)));
  {
    const FourierField u = cosine_field(L, 16, 1, 1.0);
    const double n3 = sobolev_norm(u, 0.3), n1 = sobolev_norm(u, 1.0);
    const bool ok = std::abs(n3 - std::sqrt(0.5)) < 1e-14 &&
                    std::abs(n1 - std::sqrt(0.5)) < 1e-14;
    add("sobolev_single_mode", ok, "|cos|_alpha = " + format_full(n3));
  }
  {
    const FourierField z(L, 16, true);
    const double v = lyapunov_value(z, 0.7);
    add("lyapunov_zero_field", std::abs(v - L) < 1e-12 * L,
        "int e^{0} dx = " + format_full(v));
  }
  {
    OdeEnvelope env{3.0, 2.0, 0.25, 1.5};
    const double at_anchor = envelope_upper(env, env.anchor_time);
    add("envelope_at_anchor", std::abs(at_anchor - 1.5) < 1e-12,
        "phi(s) = " + format_full(at_anchor));
    OdeEnvelope half{2.0, 1.0, 0.0, 1.0};
    const double v = envelope_upper(half, 0.5);
    add("envelope_p2_half", std::abs(v - 2.0) < 1e-12,
        "1/(1-t) at 1/2 = " + format_full(v));
  }
  add("sum_easy_gamma0_a10", sum_easy(0.0, 10.0) == 20.0,
      "sum = " + format_full(sum_easy(0.0, 10.0)));
  {
    const bool ok = condition_holds({0.0, 0.0, 1.0}) &&
                    !condition_holds({0.5, 0.5, -0.5}) &&
                    !condition_holds({-0.1, 0.0, 1.0});
    add("admissibility_bullets", ok, "three reference triples");
  }
  {
    const StationaryProfile p = make_stationary_profile(1, L, 0.7, 0.0);
    const bool ok = stationary_eval(p, 1.0) == 0.7 &&
                    stationary_residual(p, 0.05) == 0.0;
    add("stationary_case1_constant", ok,
        "h == c1, residual " + format_full(stationary_residual(p, 0.05)));
  }
  {
    const StationaryProfile p = make_stationary_profile(3, L, 0.0, 0.0, 1.0);
    const double v = stationary_eval(p, kPi / 2);
    add("stationary_case3_singularity", std::isinf(v) && v < 0,
        "h(pi/2) = " + format_full(v));
  }
  {
    SelfSimilarProblem prob;
    prob.truncation = 5.0;
    prob.n_points = 101;
    const SelfSimilarResult r =
        self_similar_solve(prob, Eigen::VectorXd::Zero(101));
    add("selfsimilar_zero_guess", r.converged_to_zero && r.residual == 0.0,
        "residual " + format_full(r.residual));
  }
  {
    StepperConfig cfg;
    cfg.dt = 1e-3;
    const Trajectory traj = simulate(FourierField(L, 8, true), 0.01, cfg);
    const bool ok = traj.termination == Termination::kCompleted &&
                    traj.records.back().l2_sq == 0.0 &&
                    traj.records.back().dissipation_integral == 0.0;
    add("zero_trajectory", ok, "zero data stays zero");
    const ExpBlowupIndicator ind = exp_blowup_indicator(traj, 1.0, 0.0, 0.5);
    bool flat = true;
    for (double m : ind.mixed_running) flat = flat && m == 0.0;
    for (double e : ind.exp_history) flat = flat && std::abs(e - L) < 1e-12;
    add("exp_indicator_zero_run", flat, "mixed = 0, history = L");
    const SingularBudget sb = singular_budget(traj, {}, 1.0);
    add("singular_budget_empty", sb.ok && sb.total_budget == 0.0,
        "total " + format_full(sb.total_budget));
  }
  {
    const FourierField u = complex_exponential_field(L, 8, 1, 1.0);
    const FourierField w = complex_exponential_field(L, 8, 5, 1.0);
    const double r = trilinear_ratio(u, u, w, {0.0, 0.0, 1.0});
    add("trilinear_disjoint_support", r == 0.0, "ratio " + format_full(r));
  }
  {
    const FourierField u = random_field(L, 16, -1.0, 11, true);
    const FourierField v = random_field(L, 16, -2.0, 12, true);
    const double d =
        (nonlinearity_B(u, v).coeffs() - nonlinearity_B(v, u).coeffs()).norm();
    add("nonlinearity_symmetry", d == 0.0, "|B(u,v)-B(v,u)| = " + format_full(d));
  }
  {
    std::vector<double> times, values;
    for (int i = 0; i < 200; ++i) {
      const double t = 0.995 * i / 199.0;
      times.push_back(t);
      values.push_back(2.0 * std::pow(1.0 - t, -3.0 / 8.0));
    }
    const BlowupReport rep = fit_blowup_series(times, values, 2.0, 1.0);
    const bool ok = std::abs(rep.exponent_est - 3.0 / 8.0) < 1e-3 &&
                    std::abs(rep.t0_est - 1.0) < 1e-4;
    add("fit_synthetic_power", ok,
        "q = " + format_full(rep.exponent_est) +
            ", t0 = " + format_full(rep.t0_est));
  }
}

int RunVerify(const VerifyOpts& o, const std::string& config_echo) {
  if (o.suite != "trivial")
    throw std::invalid_argument("unknown suite " + o.suite +
                                " (only: trivial)");
  const fs::path out(o.out);
  fs::create_directories(out);
  WriteText(out / "config_resolved.txt", config_echo);

  std::vector<Check> checks;
  RunTrivialChecks(checks);

  int failures = 0;
  json arr = json::array();
  for (const Check& c : checks) {
    if (!c.pass) ++failures;
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  (" << c.detail
              << ")\n";
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  json rep;
  rep["command"] = "verify";
  rep["suite"] = o.suite;
  rep["failures"] = failures;
  rep["checks"] = arr;
  WriteJson(out / "verify.json", rep);
  std::cout << checks.size() - failures << "/" << checks.size()
            << " checks passed\n";
  if (failures > 0) {
    WriteText(out / "failure.txt",
              std::to_string(failures) + " verify checks failed\n");
    return 2;
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"spectral toolkit for the growth equation "
               "h_t = -h_xxxx - (h_x^2)_xx on a periodic zero-mean domain"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file");

  SimulateOpts sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "integrate a trajectory");
  AddInitOptions(c_sim, sim.init);
  c_sim->add_option("--out", sim.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_sim->add_option("--L", sim.L, "period length");
  c_sim->add_option("--K", sim.K, "maximum mode");
  c_sim->add_option("--T", sim.T, "final time");
  c_sim->add_option("--dt", sim.dt, "initial (or fixed) step size");
  c_sim->add_option("--dt-min", sim.dt_min, "adaptivity floor");
  c_sim->add_option("--scheme", sim.scheme, "etdrk4 | ifrk4");
  c_sim->add_option("--record-every", sim.record_every,
                    "diagnostics cadence in accepted steps");
  c_sim->add_flag("--fixed-dt", sim.fixed_dt, "disable step adaptivity");
  c_sim->add_option("--adapt-target", sim.adapt_target,
                    "local error tolerance");
  c_sim->add_option("--norm-cap", sim.norm_cap, "stop once |h|_2 reaches this");
  c_sim->add_flag("--no-states", sim.no_states,
                  "do not keep field snapshots in memory");

  PicardOpts pic;
  CLI::App* c_pic =
      app.add_subcommand("picard", "fixed-point iteration in the K-norm ball");
  AddInitOptions(c_pic, pic.init);
  c_pic->add_option("--out", pic.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_pic->add_option("--L", pic.L, "period length");
  c_pic->add_option("--K", pic.K, "maximum mode");
  c_pic->add_option("--alpha", pic.alpha, "regularity offset in (0, 1/2)");
  c_pic->add_option("--T", pic.T, "horizon");
  c_pic->add_option("--iters", pic.iters, "number of Picard iterates");
  c_pic->add_option("--delta", pic.delta, "divergence guard radius");

  BlowupScanOpts scan;
  CLI::App* c_scan =
      app.add_subcommand("blowup-scan", "sweep complex geometric initial data");
  c_scan->add_option("--out", scan.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_scan->add_flag("--complex", scan.complex_scan,
                   "run the complex-coefficient preset");
  c_scan->add_option("--A-range", scan.a_range, "amplitude grid lo:hi:n");
  c_scan->add_option("--rho-range", scan.rho_range, "ratio grid lo:hi:n");
  c_scan->add_option("--L", scan.L, "period length");
  c_scan->add_option("--K", scan.K, "maximum mode");
  c_scan->add_option("--T", scan.T, "horizon per cell");
  c_scan->add_option("--dt", scan.dt, "initial step size");
  c_scan->add_option("--norm-cap", scan.norm_cap, "blow-up detection cap");
  c_scan->add_option("--record-every", scan.record_every,
                     "diagnostics cadence");
  c_scan->add_option("--s", scan.s, "Sobolev index of the fit");
  c_scan->add_option("--seed", scan.seed, "recorded for provenance");
  c_scan->add_option("--jobs", scan.jobs, "parallel cells")
      ->check(CLI::PositiveNumber);

  ProfilesOpts prof;
  CLI::App* c_prof =
      app.add_subcommand("profiles", "closed-form stationary profiles");
  c_prof->add_option("--out", prof.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_prof->add_option("--case", prof.case_id, "1 (B=0), 2 (B=b^2), 3 (B=-b^2)");
  c_prof->add_option("--L", prof.L, "period length");
  c_prof->add_option("--c1", prof.c1, "additive constant");
  c_prof->add_option("--c2", prof.c2, "second integration constant");
  c_prof->add_option("--b", prof.b, "frequency parameter (cases 2-3)");
  c_prof->add_option("--delta", prof.delta, "singularity exclusion radius");
  c_prof->add_option("--grid", prof.grid, "residual grid size");
  c_prof->add_option("--dump-points", prof.dump_points, "profile dump size");

  SelfSimilarOpts ss;
  CLI::App* c_ss = app.add_subcommand(
      "selfsimilar", "Newton search for self-similar profiles");
  c_ss->add_option("--out", ss.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_ss->add_option("--Y", ss.Y, "truncation half-width");
  c_ss->add_option("--n-points", ss.n_points, "grid nodes");
  c_ss->add_option("--guesses", ss.guesses, "number of random starts");
  c_ss->add_option("--boundary", ss.boundary, "decay | free");
  c_ss->add_option("--seed", ss.seed, "base seed for the guesses");
  c_ss->add_option("--jobs", ss.jobs, "parallel solves")
      ->check(CLI::PositiveNumber);

  InequalityOpts ineq;
  CLI::App* c_ineq = app.add_subcommand(
      "inequality-sweep", "empirical trilinear-boundedness sweep");
  c_ineq->add_option("--out", ineq.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_ineq->add_option("--alpha", ineq.alpha, "triple entry alpha");
  c_ineq->add_option("--beta", ineq.beta, "triple entry beta");
  c_ineq->add_option("--gamma", ineq.gamma, "triple entry gamma");
  c_ineq->add_option("--K", ineq.k_list, "comma list of resolutions");
  c_ineq->add_option("--samples", ineq.samples, "random fields per resolution");
  c_ineq->add_option("--seed", ineq.seed, "sampling seed");

  VerifyOpts ver;
  CLI::App* c_ver =
      app.add_subcommand("verify", "run the built-in identity checklist");
  c_ver->add_option("--out", ver.out, "output directory")
      ->envname("SURFGROW_OUT");
  c_ver->add_option("--suite", ver.suite, "checklist name (trivial)");

  /* parent-level flags (--config) stay usable after the subcommand name */
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string echo = app.config_to_str(true, false);
  const auto guard = [&](const std::string& outdir,
                         const std::function<int()>& body) {
    try {
      return body();
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      try {
        fs::create_directories(outdir);
        WriteText(fs::path(outdir) / "failure.txt",
                  std::string("numerical failure: ") + e.what() + "\n");
      } catch (...) {
      }
      return 2;
    }
  };

  if (c_sim->parsed()) return guard(sim.out, [&] { return RunSimulate(sim, echo); });
  if (c_pic->parsed()) return guard(pic.out, [&] { return RunPicard(pic, echo); });
  if (c_scan->parsed())
    return guard(scan.out, [&] { return RunBlowupScan(scan, echo); });
  if (c_prof->parsed())
    return guard(prof.out, [&] { return RunProfiles(prof, echo); });
  if (c_ss->parsed()) return guard(ss.out, [&] { return RunSelfSimilar(ss, echo); });
  if (c_ineq->parsed())
    return guard(ineq.out, [&] { return RunInequality(ineq, echo); });
  if (c_ver->parsed()) return guard(ver.out, [&] { return RunVerify(ver, echo); });
  std::cerr << "error: no subcommand\n";
  return 1;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("surfgrow");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace surfgrow::cli
