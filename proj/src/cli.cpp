#include "spin1/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "spin1/dynamics.hpp"
#include "spin1/entanglement.hpp"
#include "spin1/errors.hpp"
#include "spin1/exact_states.hpp"
#include "spin1/io.hpp"
#include "spin1/krylov.hpp"
#include "spin1/spectra.hpp"
#include "spin1/sweeps.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace spin1 {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::string config_file;
  int n = 0;
  std::string jh, jc, jz, jn;
  int hop = 0;
  std::string sector;
  std::string out = "out";
  int threads = 1;
  std::uint64_t seed = 1;
};

std::pair<int, int> parse_sector(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    const int m = std::stoi(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    const std::string rest = s.substr(comma + 1);
    const int k = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
    return {m, k};
  } catch (const std::logic_error&) {
    throw UsageError("malformed sector '" + s + "' (expected M,K)");
  }
}

cplx complex_flag(const std::string& name, const std::string& text) {
  try {
    return parse_complex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + name + ": " + e.what());
  }
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream is(path);
  if (!is) throw UsageError(std::string("cannot read ") + what + " '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed ") + what + " '" + path + "': " + e.what());
  }
}

// Defaults (J_h, J_c, J_z, n) = (1, 1, 0.5, 3), J_n = 0, N = 12, sector (0, 0);
// a config file overrides them and explicit flags override the file.
struct Resolved {
  ChainConfig cfg;
  int magnetization = 0;
  int momentum = 0;
};

Resolved resolve(const GlobalFlags& g, const CLI::App& app) {
  Resolved r;
  json base = {{"n", 12}, {"jh", 1.0}, {"jc", 1.0}, {"jz", 0.5}};
  json file;
  if (!g.config_file.empty()) {
    file = read_json_file(g.config_file, "config");
    if (!file.is_object()) throw UsageError("config '" + g.config_file + "' must be a JSON object");
    for (auto it = file.begin(); it != file.end(); ++it)
      if (it.key() != "sector") base[it.key()] = it.value();
  }
  if (!base.contains("hops") && !base.contains("jn")) base["hops"] = json::array({{{"n", 3}, {"j", 0.0}}});
  try {
    r.cfg = config_from_json(base);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  if (file.contains("sector")) {
    try {
      r.magnetization = file["sector"].at(0).get<int>();
      r.momentum = file["sector"].at(1).get<int>();
    } catch (const json::exception&) {
      throw UsageError("config 'sector' must be [M, K]");
    }
  }

  if (app.count("--n")) r.cfg.sites = g.n;
  if (app.count("--jh")) r.cfg.jh = complex_flag("jh", g.jh);
  if (app.count("--jc")) r.cfg.jc = complex_flag("jc", g.jc);
  if (app.count("--jz")) r.cfg.jz = complex_flag("jz", g.jz);
  if (app.count("--jn") || app.count("--hop")) {
    Hop h = r.cfg.hops.empty() ? Hop{3, 0.0} : r.cfg.hops.front();
    if (app.count("--hop")) h.distance = g.hop;
    if (app.count("--jn")) h.coupling = complex_flag("jn", g.jn);
    r.cfg.hops = {h};
  }
  if (app.count("--sector")) std::tie(r.magnetization, r.momentum) = parse_sector(g.sector);
  try {
    r.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (std::abs(r.magnetization) > r.cfg.sites || r.momentum < 0 || r.momentum >= r.cfg.sites)
    throw UsageError("sector (" + std::to_string(r.magnetization) + "," + std::to_string(r.momentum) +
                     ") out of range for N=" + std::to_string(r.cfg.sites));
  return r;
}

// One invocation's output directory and manifest.
class Run {
 public:
  Run(std::string subcommand, const GlobalFlags& g, json resolved, json options)
      : start_(std::chrono::steady_clock::now()) {
    man_.timestamp = utc_timestamp();
    man_.code_version = code_version();
    man_.subcommand = std::move(subcommand);
    man_.threads = g.threads;
    man_.seed = g.seed;
    man_.config = {{"resolved", std::move(resolved)}, {"options", std::move(options)}};
    if (!g.config_file.empty()) man_.inputs.push_back(g.config_file);
    dir_ = fs::path(g.out) / man_.subcommand / config_hash(man_.config);
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }
  fs::path manifest_path() const { return dir_ / "manifest.json"; }

  std::ofstream csv(const std::string& name, const std::string& header) {
    man_.outputs.push_back((dir_ / name).string());
    return open_csv(dir_ / name, manifest_path(), header);
  }
  void output(const fs::path& p) { man_.outputs.push_back(p.string()); }
  void input(const std::string& p) { man_.inputs.push_back(p); }
  void warn(const std::string& w) { man_.warnings.push_back(w); }
  void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) warn(w);
  }

  void finish() {
    man_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file_atomic(manifest_path(), man_.to_json().dump(2) + "\n");
    for (const auto& w : man_.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "manifest = " << manifest_path().string() << '\n';
  }

 private:
  std::chrono::steady_clock::time_point start_;
  RunManifest man_;
  fs::path dir_;
};

json resolved_json(const Resolved& r) {
  json j = config_to_json(r.cfg);
  j["sector"] = {r.magnetization, r.momentum};
  return j;
}

SectorMatrix sector_hamiltonian(const Resolved& r) {
  auto sec = global_sector_cache().get(r.cfg.sites, r.magnetization, r.momentum);
  if (sec->dim() == 0) throw UsageError("sector is empty");
  return build_hamiltonian(r.cfg, sec);
}

std::string fmt(double x) { return format_double(x); }

// ---- subcommands -----------------------------------------------------------

void cmd_spectrum(const GlobalFlags& g, const Resolved& r, bool dump_matrix) {
  Run run("spectrum", g, resolved_json(r), {{"dump_matrix", dump_matrix}});
  const SectorMatrix h = sector_hamiltonian(r);
  const EigenSystem es = diagonalize(h, {.right_vectors = false, .left_vectors = false});
  auto os = run.csv("spectrum.csv", "re,im");
  for (Eigen::Index i = 0; i < es.values.size(); ++i) os << fmt(es.values[i].real()) << ',' << fmt(es.values[i].imag()) << '\n';
  if (dump_matrix) {
    std::ostringstream ms;
    write_triplets(ms, h.storage);
    write_file_atomic(run.dir() / "hamiltonian.txt", ms.str());
    run.output(run.dir() / "hamiltonian.txt");
  }
  std::cout << "dim = " << h.dim() << "\nhermitian = " << (es.hermitian_input ? "true" : "false") << '\n';
  run.finish();
}

void cmd_rstat(const GlobalFlags& g, const Resolved& r, double central_fraction, int unfold_degree) {
  Run run("rstat", g, resolved_json(r), {{"central_fraction", central_fraction}, {"unfold_degree", unfold_degree}});
  const SectorMatrix h = sector_hamiltonian(r);
  if (h.hermitian != HermitianFlag::hermitian)
    throw UsageError("rstat needs a Hermitian Hamiltonian (real couplings); use csr for complex couplings");
  const EigenSystem es = diagonalize(h, {.right_vectors = false, .left_vectors = false});
  std::vector<double> levels(static_cast<std::size_t>(es.values.size()));
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = es.values[static_cast<Eigen::Index>(i)].real();
  RStatOptions ro;
  ro.central_fraction = central_fraction;
  ro.unfold_degree = unfold_degree;
  const RStatistics st = r_statistic(std::move(levels), ro);
  if (st.dropped_spacings) run.warn(std::to_string(st.dropped_spacings) + " degenerate spacings dropped");

  auto os = run.csv("rstat.csv", "# mean_r: " + fmt(st.mean_r) + ", levels_used: " + std::to_string(st.levels_used) +
                                     ", dropped_spacings: " + std::to_string(st.dropped_spacings) + "\nr");
  for (double x : st.ratios) os << fmt(x) << '\n';
  if (!st.spacing_histogram.densities.empty()) {
    auto hs = run.csv("spacing_histogram.csv", "s_lo,s_hi,density");
    const auto& hist = st.spacing_histogram;
    for (std::size_t b = 0; b < hist.densities.size(); ++b)
      hs << fmt(hist.edges[b]) << ',' << fmt(hist.edges[b + 1]) << ',' << fmt(hist.densities[b]) << '\n';
  }
  std::cout << "dim = " << h.dim() << "\nlevels_used = " << st.levels_used << "\nmean_r = " << fmt(st.mean_r) << '\n';
  run.finish();
}

void cmd_csr(const GlobalFlags& g, const Resolved& r) {
  Run run("csr", g, resolved_json(r), json::object());
  const SectorMatrix h = sector_hamiltonian(r);
  const EigenSystem es = diagonalize(h, {.right_vectors = false, .left_vectors = false});
  const CsrStatistics st = csr(std::span<const cplx>(es.values.data(), static_cast<std::size_t>(es.values.size())));
  if (st.collapsed) run.warn(std::to_string(st.collapsed) + " repeated eigenvalues collapsed");
  auto os = run.csv("csr.csv", "re_lambda,im_lambda,theta");
  for (const auto& l : st.lambdas) os << fmt(l.real()) << ',' << fmt(l.imag()) << ',' << fmt(std::arg(l)) << '\n';
  std::cout << "dim = " << h.dim() << "\nmean_cos_theta = " << fmt(st.mean_cos_theta)
            << "\nmean_abs_lambda = " << fmt(st.mean_abs_lambda) << '\n';
  run.finish();
}

void cmd_krylov(const GlobalFlags& g, const Resolved& r, double t_max, double dt, std::size_t max_length) {
  Run run("krylov", g, resolved_json(r), {{"t_max", t_max}, {"dt", dt}, {"max_length", max_length}});
  const SectorMatrix h = sector_hamiltonian(r);
  const Vec psi0 = equal_weight_initial_state(h);
  const KrylovChain chain = bilanczos(h, psi0, {.max_length = max_length, .breakdown_tol = 1e-12});
  if (chain.terminated_early)
    run.warn("chain terminated early at length " + std::to_string(chain.length()));
  const auto times = uniform_grid(t_max, dt);
  const ComplexityCurve curve = krylov_complexity(chain, times);
  if (curve.used_ode_fallback) run.warn("ill-conditioned effective operator, ODE propagation used");

  auto os = run.csv("krylov.csv", "t,ck_normalized,ck_raw,total_norm");
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    os << fmt(curve.times[i]) << ',' << fmt(curve.ck_normalized[i]) << ',' << fmt(curve.ck_raw[i]) << ','
       << fmt(curve.amplitude_norms[i]) << '\n';
  auto cs = run.csv("lanczos_coeffs.csv", "n,a_re,a_im,b_re,b_im,c_re,c_im");
  for (std::size_t n = 0; n < chain.length(); ++n)
    cs << n << ',' << fmt(chain.a[n].real()) << ',' << fmt(chain.a[n].imag()) << ',' << fmt(chain.b[n].real()) << ','
       << fmt(chain.b[n].imag()) << ',' << fmt(chain.c[n].real()) << ',' << fmt(chain.c[n].imag()) << '\n';

  const RegimeSignature sig = classify_complexity(curve, t_max / 2);
  std::cout << "dim = " << h.dim() << "\nchain_length = " << chain.length()
            << "\nbiorthogonality_defect = " << fmt(chain.biorthogonality_defect())
            << "\nglobal_max = " << fmt(sig.global_max) << "\nearly_max = " << fmt(sig.early_max)
            << "\nlate_mean = " << fmt(sig.late_mean) << "\nplateau = " << (sig.plateau ? "true" : "false")
            << "\npeak_then_decay = " << (sig.peak_then_decay ? "true" : "false") << '\n';
  run.finish();
}

void cmd_entropy(const GlobalFlags& g, const Resolved& r, int cut, double threshold, bool have_threshold) {
  json opts = {{"cut", cut}};
  if (have_threshold) opts["threshold"] = threshold;
  Run run("entropy", g, resolved_json(r), opts);
  const SectorMatrix h = sector_hamiltonian(r);
  const EigenSystem es = diagonalize(h);
  if (!es.near_defective.empty())
    run.warn(std::to_string(es.near_defective.size()) + " eigenvalues with nearly parallel eigenvectors");
  const EntropyScan scan = entropy_scan(es, *h.sector, cut > 0 ? std::optional<int>(cut) : std::nullopt,
                                        have_threshold ? std::optional<double>(threshold) : std::nullopt);
  std::vector<char> flagged(scan.entropies.size(), 0);
  for (auto i : scan.scar_candidates) flagged[i] = 1;
  auto os = run.csv("entropy.csv", "index,re_E,im_E,S_A,is_scar_candidate");
  for (std::size_t i = 0; i < scan.entropies.size(); ++i)
    os << scan.eigen_index[i] << ',' << fmt(scan.eigenvalue_re[i]) << ',' << fmt(scan.eigenvalue_im[i]) << ','
       << fmt(scan.entropies[i]) << ',' << int(flagged[i]) << '\n';
  std::cout << "dim = " << h.dim() << "\ncut = " << scan.cut << "\nmedian = " << fmt(scan.median)
            << "\nmad = " << fmt(scan.mad) << "\nthreshold = " << fmt(scan.threshold)
            << "\nscar_candidates = " << scan.scar_candidates.size() << '\n';

  // The tower member living in this sector, if any.
  const int p = r.cfg.sites - r.magnetization;
  if (r.momentum == 0 && r.cfg.sites <= 14) {
    const TowerState tower = tower_state(r.cfg.sites, p);
    const Vec target = project_to_sector(*h.sector, tower.vector);
    const auto overlaps = eigenvector_overlaps(es, target);
    const auto best = static_cast<std::size_t>(std::max_element(overlaps.begin(), overlaps.end()) - overlaps.begin());
    std::cout << "tower_overlap_index = " << best << "\ntower_overlap = " << fmt(overlaps[best])
              << "\ntower_entropy = " << fmt(scan.entropies[best])
              << "\ntower_below_threshold = " << (scan.entropies[best] < scan.threshold ? "true" : "false") << '\n';
  }
  run.finish();
}

void cmd_fidelity(const GlobalFlags& g, const Resolved& r, const std::string& state, const std::string& beta_text,
                  double t_max, double dt, const std::string& mode_text) {
  const cplx beta = complex_flag("beta", beta_text);
  FidelityMode mode;
  if (mode_text == "literal")
    mode = FidelityMode::literal;
  else if (mode_text == "normalized")
    mode = FidelityMode::normalized;
  else
    throw UsageError("--mode must be literal or normalized");
  json opts = {{"state", state}, {"t_max", t_max}, {"dt", dt}, {"mode", mode_text}};
  if (state == "coherent") opts["beta"] = complex_to_json(beta);
  json resolved = config_to_json(r.cfg);
  Run run("fidelity", g, resolved, opts);

  Vec psi0;
  if (state == "coherent")
    psi0 = coherent_state(r.cfg.sites, beta).vector;
  else if (state == "neel")
    psi0 = neel_state(r.cfg.sites);
  else
    throw UsageError("--state must be coherent or neel");

  Propagator prop(r.cfg);
  const auto times = uniform_grid(t_max, dt);
  const FidelitySeries fs = prop.fidelity_series(psi0, times, mode);
  run.warn(fs.warnings);
  auto os = run.csv("fidelity.csv", "t,F_literal,F_normalized,norm");
  for (std::size_t i = 0; i < fs.times.size(); ++i)
    os << fmt(fs.times[i]) << ',' << fmt(fs.fidelity_literal[i]) << ',' << fmt(fs.fidelity_normalized[i]) << ','
       << fmt(fs.norm[i]) << '\n';
  std::cout << "points = " << fs.times.size() << "\nfinal_fidelity = " << fmt(fs.fidelity.back()) << '\n';
  run.finish();
}

int cmd_verify_tower(const GlobalFlags& g, const Resolved& r) {
  json resolved = config_to_json(r.cfg);
  Run run("verify-tower", g, resolved, json::object());
  double worst = 0.0, worst_hop = 0.0;
  auto os = run.csv("tower.csv", "p,M,E_re,E_im,residual,hop_residual");
  for (int p = 0; p <= 2 * r.cfg.sites; ++p) {
    const TowerResidual res = verify_tower(r.cfg, p);
    const cplx e = tower_energy(r.cfg, p);
    os << p << ',' << r.cfg.sites - p << ',' << fmt(e.real()) << ',' << fmt(e.imag()) << ',' << fmt(res.residual)
       << ',' << fmt(res.hop_residual) << '\n';
    worst = std::max(worst, res.residual);
    worst_hop = std::max(worst_hop, res.hop_residual);
  }
  const bool ok = worst < 1e-10 && worst_hop < 1e-12;
  std::cout << "max_residual = " << fmt(worst) << "\nmax_hop_residual = " << fmt(worst_hop)
            << "\nstatus = " << (ok ? "ok" : "FAILED") << '\n';
  if (!ok) run.warn("tower residual above tolerance");
  run.finish();
  return ok ? 0 : 2;
}

void cmd_sweep(const GlobalFlags& g, const std::string& spec_file, bool resume) {
  const json spec_json = read_json_file(spec_file, "sweep spec");
  SweepSpec spec;
  try {
    spec = sweep_spec_from_json(spec_json);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad sweep spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad sweep spec: ") + e.what());
  }
  // Resume must land in the same directory, so the hash covers only the spec.
  Run run("sweep", g, sweep_spec_to_json(spec), json::object());
  run.input(spec_file);
  SweepOptions so;
  so.out_dir = run.dir();
  so.resume = resume;
  so.threads = g.threads;
  const SweepResult res = run_sweep(spec, so);
  run.output(run.dir() / "sweep.csv");
  run.output(run.dir() / "sweep_manifest.json");
  std::size_t failed = 0;
  for (const auto& c : res.cells) failed += c.status != "ok";
  if (failed) run.warn(std::to_string(failed) + " cells failed");
  std::cout << "cells = " << res.cells.size() << "\nrecomputed = " << res.recomputed << "\nfailed = " << failed << '\n';
  if (res.cache_check_difference) std::cout << "cache_check_difference = " << fmt(*res.cache_check_difference) << '\n';
  run.finish();
}

void cmd_references(const GlobalFlags& g, const std::string& ensemble, std::size_t dim) {
  static const std::vector<std::string> known = {"all", "poisson", "goe", "ginibre", "uniform"};
  if (std::find(known.begin(), known.end(), ensemble) == known.end())
    throw UsageError("--ensemble must be one of all, poisson, goe, ginibre, uniform");
  Run run("references", g, json::object(), {{"ensemble", ensemble}, {"dim", dim}});

  auto cs = run.csv("constants.csv", "name,value");
  cs << "mean_r_poisson," << fmt(reference::kMeanRPoisson) << '\n'
     << "mean_r_goe," << fmt(reference::kMeanRGoe) << '\n'
     << "mean_r_gue," << fmt(reference::kMeanRGue) << '\n'
     << "mean_cos_theta_uncorrelated," << fmt(reference::kMeanCosUncorrelated) << '\n'
     << "mean_cos_theta_ginibre," << fmt(reference::kMeanCosGinibre) << '\n';
  cs.close();

  auto sp = run.csv("spacing_curves.csv", "s,poisson,wigner_goe");
  for (int i = 0; i <= 200; ++i) {
    const double s = 0.02 * i;
    sp << fmt(s) << ',' << fmt(reference::poisson_spacing(s)) << ',' << fmt(reference::wigner_goe_spacing(s)) << '\n';
  }
  auto rc = run.csv("ratio_curves.csv", "r,poisson,goe");
  for (int i = 0; i <= 100; ++i) {
    const double x = 0.01 * i;
    rc << fmt(x) << ',' << fmt(reference::poisson_ratio(x)) << ',' << fmt(reference::goe_ratio(x)) << '\n';
  }

  // Sampled ensembles for quantities without a closed form.
  std::mt19937_64 rng(g.seed);
  auto sampled = run.csv("sampled.csv", "ensemble,statistic,value,dim");
  auto want = [&](const char* e) { return ensemble == "all" || ensemble == e; };
  if (want("poisson")) {
    const double v = r_statistic(reference::poisson_levels(dim, rng)).mean_r;
    sampled << "poisson,mean_r," << fmt(v) << ',' << dim << '\n';
    std::cout << "poisson_mean_r = " << fmt(v) << '\n';
  }
  if (want("goe")) {
    const double v = r_statistic(reference::goe_spectrum(dim, rng)).mean_r;
    sampled << "goe,mean_r," << fmt(v) << ',' << dim << '\n';
    std::cout << "goe_mean_r = " << fmt(v) << '\n';
  }
  auto theta_hist = [&](const char* name, const std::vector<cplx>& ev) {
    const CsrStatistics st = csr(ev);
    std::vector<double> theta;
    for (const auto& l : st.lambdas) theta.push_back(std::arg(l));
    const Histogram h = make_histogram(theta, -std::numbers::pi, std::numbers::pi, 40);
    auto os = run.csv(std::string(name) + "_theta.csv", "theta_lo,theta_hi,density");
    for (std::size_t b = 0; b < h.densities.size(); ++b)
      os << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ',' << fmt(h.densities[b]) << '\n';
    sampled << name << ",mean_cos_theta," << fmt(st.mean_cos_theta) << ',' << dim << '\n';
    std::cout << name << "_mean_cos_theta = " << fmt(st.mean_cos_theta) << '\n';
  };
  if (want("ginibre")) theta_hist("ginibre", reference::ginibre_spectrum(dim, rng));
  if (want("uniform")) theta_hist("uniform", reference::uniform_disk_levels(dim, rng));
  std::cout << "mean_cos_theta_ginibre = " << fmt(reference::kMeanCosGinibre) << '\n';
  run.finish();
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization and dynamics of the spin-1 scar chain", "spin1ed"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  GlobalFlags g;
  app.add_option("--config", g.config_file, "JSON config (n, jh, jc, jz, hops or jn/hop, sector)");
  app.add_option("--n", g.n, "number of sites");
  app.add_option("--jh", g.jh, "Heisenberg coupling RE[,IM]");
  app.add_option("--jc", g.jc, "chiral coupling RE[,IM]");
  app.add_option("--jz", g.jz, "Zeeman coupling RE[,IM]");
  app.add_option("--jn", g.jn, "hopping coupling RE[,IM]");
  app.add_option("--hop", g.hop, "hopping distance");
  app.add_option("--sector", g.sector, "symmetry sector M,K");
  app.add_option("--out", g.out, "output root directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "diagonalize a sector and write its eigenvalues");
  bool dump_matrix = false;
  spectrum->add_flag("--dump-matrix", dump_matrix, "also write the sector matrix as triplets");

  auto* rstat = app.add_subcommand("rstat", "level-spacing ratio statistics (Hermitian)");
  double central_fraction = 0.8;
  int unfold_degree = 10;
  rstat->add_option("--central-fraction", central_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  rstat->add_option("--unfold-degree", unfold_degree)->check(CLI::PositiveNumber)->capture_default_str();

  auto* csr_cmd = app.add_subcommand("csr", "complex spacing ratio statistics");

  auto* krylov = app.add_subcommand("krylov", "Krylov complexity from the equal-weight state");
  double k_tmax = 100.0, k_dt = 0.1;
  std::size_t k_len = 0;
  krylov->add_option("--t-max", k_tmax)->capture_default_str();
  krylov->add_option("--dt", k_dt)->capture_default_str();
  krylov->add_option("--max-length", k_len, "chain length cap (0: sector dimension)")->capture_default_str();

  auto* entropy = app.add_subcommand("entropy", "half-chain entanglement of every eigenstate");
  int cut = 0;
  double threshold = 0.0;
  entropy->add_option("--cut", cut, "subsystem size (default N/2)");
  auto* thr = entropy->add_option("--threshold", threshold, "scar threshold (default median - 3 MAD)");

  auto* fidelity = app.add_subcommand("fidelity", "return probability of a coherent or Neel state");
  std::string f_state = "coherent", f_beta = "1", f_mode = "literal";
  double f_tmax = 50.0, f_dt = 0.05;
  fidelity->add_option("--state", f_state, "coherent or neel")->capture_default_str();
  fidelity->add_option("--beta", f_beta, "coherent-state parameter RE[,IM]")->capture_default_str();
  fidelity->add_option("--t-max", f_tmax)->capture_default_str();
  fidelity->add_option("--dt", f_dt)->capture_default_str();
  fidelity->add_option("--mode", f_mode, "literal or normalized")->capture_default_str();

  auto* tower = app.add_subcommand("verify-tower", "check the tower states are exact eigenstates");

  auto* sweep = app.add_subcommand("sweep", "two-parameter sweep of a spectral diagnostic");
  std::string spec_file;
  bool resume = false;
  sweep->add_option("--spec", spec_file, "sweep spec JSON")->required();
  sweep->add_flag("--resume", resume, "reuse checkpointed cells");

  auto* refs = app.add_subcommand("references", "reference curves and constants");
  std::string ensemble = "all";
  std::size_t ref_dim = 1000;
  refs->add_option("--ensemble", ensemble, "all, poisson, goe, ginibre or uniform")->capture_default_str();
  refs->add_option("--dim", ref_dim, "size of sampled spectra")->check(CLI::Range(10, 20000))->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (openblas_set_num_threads) openblas_set_num_threads(g.threads);
    Eigen::setNbThreads(g.threads);
    if (*refs) {
      cmd_references(g, ensemble, ref_dim);
      return 0;
    }
    if (*sweep) {
      cmd_sweep(g, spec_file, resume);
      return 0;
    }
    const Resolved r = resolve(g, app);
    if (*spectrum) cmd_spectrum(g, r, dump_matrix);
    if (*rstat) cmd_rstat(g, r, central_fraction, unfold_degree);
    if (*csr_cmd) cmd_csr(g, r);
    if (*krylov) cmd_krylov(g, r, k_tmax, k_dt, k_len);
    if (*entropy) cmd_entropy(g, r, cut, threshold, thr->count() > 0);
    if (*fidelity) cmd_fidelity(g, r, f_state, f_beta, f_tmax, f_dt, f_mode);
    if (*tower) return cmd_verify_tower(g, r);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace spin1
