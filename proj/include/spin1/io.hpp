#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "spin1/basis.hpp"

namespace spin1 {

using nlohmann::json;

// Shortest text that reads back to the same double.
std::string format_double(double x);

// "RE" or "RE,IM". Throws std::invalid_argument on malformed input.
cplx parse_complex(const std::string& text);
// Canonical form: "RE" when the imaginary part is zero, else "RE,IM".
std::string format_complex(cplx z);

// Complex numbers in JSON: a number, a [re, im] pair, or a "RE,IM" string.
cplx complex_from_json(const json& j);
json complex_to_json(cplx z);

json config_to_json(const ChainConfig& cfg);
// Keys: n, jh, jc, jz, hops [{n, j}] (also accepts hop + jn for one term).
ChainConfig config_from_json(const json& j);

json sector_to_json(const SymmetrySector& sec);

// (code, re, im) lines for nonzero amplitudes.
void write_state_triplets(std::ostream& os, const Vec& v, double drop_below = 0.0);
Vec read_state_triplets(std::istream& is, Code dimension);

// 16 hex digits of FNV-1a over the compact dump of `j`.
std::string config_hash(const json& j);

struct RunManifest {
  std::string timestamp;
  json config;
  std::string code_version;
  std::string subcommand;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  int threads = 1;
  std::uint64_t seed = 0;

  json to_json() const;
};

std::string code_version();
std::string utc_timestamp();

// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// CSV file whose first line is "# manifest: <path>".
std::ofstream open_csv(const std::filesystem::path& path, const std::filesystem::path& manifest,
                       const std::string& header);

}  // namespace spin1
