#include "spin1/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifndef SPIN1_VERSION
#define SPIN1_VERSION "unknown"
#endif

namespace spin1 {

namespace {

double parse_double(const std::string& s) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || first == last)
    throw std::invalid_argument("malformed number '" + s + "'");
  return x;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::logic_error("format_double failed");
  return std::string(buf, ptr);
}

cplx parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {parse_double(text), 0.0};
  if (text.find(',', comma + 1) != std::string::npos)
    throw std::invalid_argument("malformed complex literal '" + text + "' (expected RE[,IM])");
  return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + "," + format_double(z.imag());
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  throw std::invalid_argument("expected a complex number, got " + j.dump());
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json config_to_json(const ChainConfig& cfg) {
  json hops = json::array();
  for (const auto& h : cfg.hops) hops.push_back({{"n", h.distance}, {"j", complex_to_json(h.coupling)}});
  return {{"n", cfg.sites},
          {"jh", complex_to_json(cfg.jh)},
          {"jc", complex_to_json(cfg.jc)},
          {"jz", complex_to_json(cfg.jz)},
          {"hops", hops}};
}

ChainConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("chain config must be a JSON object");
  ChainConfig cfg;
  cfg.sites = j.at("n").get<int>();
  if (j.contains("jh")) cfg.jh = complex_from_json(j["jh"]);
  if (j.contains("jc")) cfg.jc = complex_from_json(j["jc"]);
  if (j.contains("jz")) cfg.jz = complex_from_json(j["jz"]);
  if (j.contains("hops")) {
    for (const auto& h : j["hops"]) cfg.hops.push_back({h.at("n").get<int>(), complex_from_json(h.at("j"))});
  } else if (j.contains("jn")) {
    cfg.hops.push_back({j.value("hop", 3), complex_from_json(j["jn"])});
  }
  return cfg;
}

json sector_to_json(const SymmetrySector& sec) {
  return {{"N", sec.sites},         {"M", sec.magnetization}, {"k_index", sec.momentum},
          {"dim", sec.dim()},       {"reps", sec.reps},       {"periods", sec.periods}};
}

void write_state_triplets(std::ostream& os, const Vec& v, double drop_below) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= drop_below) continue;
    os << i << ' ' << format_double(v[i].real()) << ' ' << format_double(v[i].imag()) << '\n';
  }
}

Vec read_state_triplets(std::istream& is, Code dimension) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(dimension));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    unsigned long long code;
    double re, im;
    if (!(ls >> code >> re >> im) || code >= dimension)
      throw std::runtime_error("read_state_triplets: malformed line '" + line + "'");
    v[static_cast<Eigen::Index>(code)] = cplx(re, im);
  }
  return v;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json RunManifest::to_json() const {
  return {{"timestamp", timestamp}, {"config", config},   {"code_version", code_version},
          {"subcommand", subcommand}, {"inputs", inputs}, {"outputs", outputs},
          {"wall_seconds", wall_seconds}, {"warnings", warnings}, {"threads", threads},
          {"seed", seed}};
}

std::string code_version() { return SPIN1_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << contents;
    if (!os.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::ofstream open_csv(const std::filesystem::path& path, const std::filesystem::path& manifest,
                       const std::string& header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "# manifest: " << manifest.string() << '\n' << header << '\n';
  return os;
}

}  // namespace spin1
