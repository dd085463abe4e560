#include "spin1/sweeps.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spin1 {

namespace {

std::vector<cplx> axis_values_from_json(const json& a) {
  std::vector<cplx> out;
  cplx scale = a.contains("scale") ? complex_from_json(a["scale"]) : cplx(1.0, 0.0);
  if (a.contains("values")) {
    for (const auto& v : a["values"]) out.push_back(complex_from_json(v) * scale);
  } else if (a.contains("linspace") || a.contains("logspace")) {
    const bool log = a.contains("logspace");
    const auto& r = log ? a["logspace"] : a["linspace"];
    if (!r.is_array() || r.size() != 3) throw std::invalid_argument("linspace/logspace needs [start, stop, count]");
    const double lo = r[0].get<double>(), hi = r[1].get<double>();
    const int count = r[2].get<int>();
    if (count < 1) throw std::invalid_argument("axis count must be >= 1");
    for (int k = 0; k < count; ++k) {
      const double x = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
      out.push_back((log ? std::exp(x) : x) * scale);
    }
  } else {
    throw std::invalid_argument("sweep axis needs values, linspace or logspace");
  }
  return out;
}

SweepAxis axis_from_json(const json& a) {
  SweepAxis ax;
  ax.path = a.at("path").get<std::string>();
  ax.values = axis_values_from_json(a);
  ax.display = a.value("display", std::string("re"));
  return ax;
}

json axis_to_json(const SweepAxis& ax) {
  json vals = json::array();
  for (auto v : ax.values) vals.push_back(complex_to_json(v));
  return {{"path", ax.path}, {"values", vals}, {"display", ax.display}};
}

struct Diagnosed {
  double value = 0.0;
  std::size_t dropped = 0;
};

Diagnosed diagnose(const SweepSpec& spec, const SectorMatrix& h) {
  const EigenSystem es = diagonalize(h, {.right_vectors = false, .left_vectors = false});
  if (spec.diagnostic == SweepDiagnostic::mean_r) {
    if (!es.hermitian_input) throw std::invalid_argument("mean_r needs a Hermitian sector matrix");
    std::vector<double> e(static_cast<std::size_t>(es.values.size()));
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = es.values[static_cast<Eigen::Index>(k)].real();
    RStatOptions ro;
    ro.central_fraction = spec.central_fraction;
    const RStatistics r = r_statistic(std::move(e), ro);
    return {r.mean_r, r.dropped_spacings};
  }
  const CsrStatistics c = csr(std::span<const cplx>(es.values.data(), static_cast<std::size_t>(es.values.size())));
  return {c.mean_cos_theta, c.collapsed};
}

ChainConfig cell_config(const SweepSpec& spec, std::size_t i, std::size_t j) {
  ChainConfig cfg = with_parameter(spec.base, spec.axis1.path, spec.axis1.values.at(i));
  return with_parameter(std::move(cfg), spec.axis2.path, spec.axis2.values.at(j));
}

std::filesystem::path cell_path(const std::filesystem::path& dir, std::size_t i, std::size_t j) {
  return dir / "cells" / (std::to_string(i) + "_" + std::to_string(j) + ".json");
}

}  // namespace

void SweepSpec::validate() const {
  base.validate();
  if (axis1.values.empty() || axis2.values.empty()) throw std::invalid_argument("sweep axes must be non-empty");
  // with_parameter throws on unknown paths
  (void)with_parameter(base, axis1.path, axis1.values.front());
  (void)with_parameter(base, axis2.path, axis2.values.front());
  (void)display_value(axis1.values.front(), axis1.display);
  (void)display_value(axis2.values.front(), axis2.display);
  if (momentum < 0 || momentum >= base.sites) throw std::invalid_argument("sweep sector momentum out of range");
}

SweepSpec sweep_spec_from_json(const json& j) {
  SweepSpec s;
  s.base = config_from_json(j.at("base"));
  s.axis1 = axis_from_json(j.at("axis1"));
  s.axis2 = axis_from_json(j.at("axis2"));
  const auto diag = j.value("diagnostic", std::string("mean_r"));
  if (diag == "mean_r")
    s.diagnostic = SweepDiagnostic::mean_r;
  else if (diag == "mean_cos_theta")
    s.diagnostic = SweepDiagnostic::mean_cos_theta;
  else
    throw std::invalid_argument("unknown sweep diagnostic '" + diag + "'");
  if (j.contains("sector")) {
    s.magnetization = j["sector"].at(0).get<int>();
    s.momentum = j["sector"].at(1).get<int>();
  }
  s.central_fraction = j.value("central_fraction", 0.8);
  s.seed = j.value("seed", std::uint64_t{1});
  s.validate();
  return s;
}

json sweep_spec_to_json(const SweepSpec& s) {
  return {{"base", config_to_json(s.base)},
          {"axis1", axis_to_json(s.axis1)},
          {"axis2", axis_to_json(s.axis2)},
          {"diagnostic", s.diagnostic == SweepDiagnostic::mean_r ? "mean_r" : "mean_cos_theta"},
          {"sector", {s.magnetization, s.momentum}},
          {"central_fraction", s.central_fraction},
          {"seed", s.seed}};
}

ChainConfig with_parameter(ChainConfig cfg, const std::string& path, cplx value) {
  if (path == "jh") {
    cfg.jh = value;
  } else if (path == "jc") {
    cfg.jc = value;
  } else if (path == "jz") {
    cfg.jz = value;
  } else if (path == "jn") {
    if (cfg.hops.empty()) throw std::invalid_argument("parameter jn: base config has no hopping term");
    cfg.hops.front().coupling = value;
  } else if (path.rfind("jn:", 0) == 0) {
    const int d = std::stoi(path.substr(3));
    bool found = false;
    for (auto& h : cfg.hops)
      if (h.distance == d) {
        h.coupling = value;
        found = true;
      }
    if (!found) throw std::invalid_argument("parameter " + path + ": no hopping term at that distance");
  } else {
    throw std::invalid_argument("unknown sweep parameter path '" + path + "'");
  }
  return cfg;
}

double display_value(cplx z, const std::string& display) {
  if (display == "re") return z.real();
  if (display == "im") return z.imag();
  if (display == "abs") return std::abs(z);
  if (display == "ln_im") return std::log(z.imag());
  if (display == "ln_abs") return std::log(std::abs(z));
  throw std::invalid_argument("unknown axis display '" + display + "'");
}

json SweepCell::to_json() const {
  return {{"i", i},           {"j", j},           {"value", value}, {"dim", dim},
          {"dropped", dropped}, {"wall_seconds", wall_seconds}, {"status", status}};
}

SweepCell SweepCell::from_json(const json& j) {
  SweepCell c;
  c.i = j.at("i").get<std::size_t>();
  c.j = j.at("j").get<std::size_t>();
  c.value = j.at("value").is_null() ? NAN : j.at("value").get<double>();
  c.dim = j.at("dim").get<std::size_t>();
  c.dropped = j.at("dropped").get<std::size_t>();
  c.wall_seconds = j.at("wall_seconds").get<double>();
  c.status = j.at("status").get<std::string>();
  return c;
}

SweepCell evaluate_cell(const SweepSpec& spec, const TermBlocks& blocks, std::size_t i, std::size_t j) {
  SweepCell cell;
  cell.i = i;
  cell.j = j;
  cell.dim = blocks.sector ? blocks.sector->dim() : 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Diagnosed d = diagnose(spec, combine_terms(blocks, cell_config(spec, i, j)));
    cell.value = d.value;
    cell.dropped = d.dropped;
  } catch (const std::exception& e) {
    cell.value = NAN;
    cell.status = std::string("failed: ") + e.what();
  }
  cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

double evaluate_from_scratch(const SweepSpec& spec, std::size_t i, std::size_t j) {
  const ChainConfig cfg = cell_config(spec, i, j);
  auto sec = std::make_shared<const SymmetrySector>(build_sector(cfg.sites, spec.magnetization, spec.momentum));
  return diagnose(spec, build_hamiltonian(cfg, sec)).value;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opts) {
  spec.validate();
  if (opts.out_dir.empty()) throw std::invalid_argument("run_sweep: output directory required");
  std::filesystem::create_directories(opts.out_dir / "cells");

  SweepResult res;
  res.rows = spec.axis1.values.size();
  res.cols = spec.axis2.values.size();
  res.cells.resize(res.rows * res.cols);
  std::vector<char> done(res.cells.size(), 0);

  if (opts.resume) {
    for (std::size_t idx = 0; idx < res.cells.size(); ++idx) {
      const auto p = cell_path(opts.out_dir, idx / res.cols, idx % res.cols);
      if (!std::filesystem::exists(p)) continue;
      std::ifstream is(p);
      res.cells[idx] = SweepCell::from_json(json::parse(is));
      done[idx] = 1;
    }
  }

  // Every cell shares one set of term blocks; a coupling set to zero in the
  // base still needs its block, so build with all axes' hop terms present.
  auto sec = global_sector_cache().get(spec.base.sites, spec.magnetization, spec.momentum);
  std::vector<std::size_t> todo;
  for (std::size_t idx = 0; idx < done.size(); ++idx)
    if (!done[idx]) todo.push_back(idx);
  std::optional<TermBlocks> blocks;
  auto get_blocks = [&]() -> const TermBlocks& {
    if (!blocks) blocks = build_term_blocks(spec.base, sec);
    return *blocks;
  };
  if (!todo.empty()) get_blocks();

  std::atomic<std::size_t> next{0};
  std::mutex io_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const std::size_t idx = todo[k];
      SweepCell cell = evaluate_cell(spec, *blocks, idx / res.cols, idx % res.cols);
      write_file_atomic(cell_path(opts.out_dir, cell.i, cell.j), cell.to_json().dump() + "\n");
      std::lock_guard lock(io_mu);
      res.cells[idx] = std::move(cell);
    }
  };
  const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(todo.size())));
  if (!todo.empty()) {
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }
  res.recomputed = todo.size();

  if (!todo.empty()) {
    std::mt19937_64 rng(spec.seed);
    const std::size_t pick = todo[std::uniform_int_distribution<std::size_t>(0, todo.size() - 1)(rng)];
    const SweepCell& c = res.cells[pick];
    if (c.status == "ok") res.cache_check_difference = std::abs(evaluate_from_scratch(spec, c.i, c.j) - c.value);
  }

  std::ostringstream csv;
  csv << "axis1,axis2,value,dim,status\n";
  for (const auto& c : res.cells) {
    csv << format_double(display_value(spec.axis1.values[c.i], spec.axis1.display)) << ','
        << format_double(display_value(spec.axis2.values[c.j], spec.axis2.display)) << ','
        << (std::isnan(c.value) ? std::string("nan") : format_double(c.value)) << ',' << c.dim << ','
        << (c.status == "ok" ? "ok" : "failed") << '\n';
  }
  write_file_atomic(opts.out_dir / "sweep.csv", csv.str());

  json cells_meta = json::array();
  for (const auto& c : res.cells) cells_meta.push_back(c.to_json());
  res.manifest = {{"spec", sweep_spec_to_json(spec)},
                  {"config_hash", config_hash(sweep_spec_to_json(spec))},
                  {"code_version", code_version()},
                  {"threads", nthreads},
                  {"seed", spec.seed},
                  {"recomputed_cells", res.recomputed},
                  {"cells", cells_meta}};
  if (res.cache_check_difference) {
    res.manifest["cache_check"] = {{"difference", *res.cache_check_difference},
                                   {"passed", *res.cache_check_difference <= 1e-12}};
  }
  write_file_atomic(opts.out_dir / "sweep_manifest.json", res.manifest.dump(2) + "\n");
  return res;
}

}  // namespace spin1
