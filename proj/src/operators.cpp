#include "spin1/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace spin1 {

namespace {

constexpr double kLadder = 1.4142135623730951;  // S^{+/-} matrix element for spin 1
constexpr cplx kI{0.0, 1.0};

// Digit view of a product state with O(1) single-site updates.
class Sites {
 public:
  Sites(Code code, int n) : n_(n), code_(code) {
    Code c = code;
    for (int j = 0; j < n; ++j) {
      m_[j] = 1 - static_cast<int>(c % 3);
      place_[j] = j == 0 ? 1 : place_[j - 1] * 3;
      c /= 3;
    }
  }
  int m(int j) const { return m_[wrap(j)]; }
  int wrap(int j) const { return ((j % n_) + n_) % n_; }
  // Code after S^+_u S^-_v (raise u, lower v); digits move opposite to m.
  Code raise_lower(int u, int v) const { return code_ - place_[wrap(u)] + place_[wrap(v)]; }
  bool can_raise(int j) const { return m(j) < 1; }
  bool can_lower(int j) const { return m(j) > -1; }
  Code code() const { return code_; }

 private:
  int n_;
  Code code_;
  std::array<int, kMaxSites> m_{};
  std::array<Code, kMaxSites> place_{};
};

void push(ScatterResult& out, Code target, cplx amp) { out.push_back({target, amp}); }

// coeff * (S^+_u S^-_v)|s>
void add_raise_lower(const Sites& s, int u, int v, cplx coeff, ScatterResult& out) {
  if (s.can_raise(u) && s.can_lower(v)) push(out, s.raise_lower(u, v), coeff * (kLadder * kLadder));
}

// (S_u x S_v)^z = (i/2)(S^+_u S^-_v - S^-_u S^+_v)
void add_cross_z(const Sites& s, int u, int v, cplx coeff, ScatterResult& out) {
  add_raise_lower(s, u, v, coeff * 0.5 * kI, out);
  add_raise_lower(s, v, u, -coeff * 0.5 * kI, out);
}

void apply_heisenberg(const Sites& s, int n, cplx coeff, ScatterResult& out) {
  double diag = 0.0;
  for (int j = 0; j < n; ++j) {
    diag += s.m(j) * s.m(j + 1);
    add_raise_lower(s, j, j + 1, 0.5 * coeff, out);
    add_raise_lower(s, j + 1, j, 0.5 * coeff, out);
  }
  if (diag != 0.0) push(out, s.code(), coeff * diag);
}

// S_a . (S_b x S_c) = S^z_a (S_b x S_c)^z + S^z_b (S_c x S_a)^z + S^z_c (S_a x S_b)^z
// since every Levi-Civita term carries exactly one z component.
void apply_chiral(const Sites& s, int n, cplx coeff, ScatterResult& out) {
  for (int a = 0; a < n; ++a) {
    const int b = a + 1;
    const int c = a + 2;
    if (s.m(a) != 0) add_cross_z(s, b, c, coeff * static_cast<double>(s.m(a)), out);
    if (s.m(b) != 0) add_cross_z(s, c, a, coeff * static_cast<double>(s.m(b)), out);
    if (s.m(c) != 0) add_cross_z(s, a, b, coeff * static_cast<double>(s.m(c)), out);
  }
}

void apply_zeeman(const Sites& s, int n, cplx coeff, ScatterResult& out) {
  int total = 0;
  for (int j = 0; j < n; ++j) total += s.m(j);
  if (total != 0) push(out, s.code(), coeff * static_cast<double>(total));
}

void apply_hop(const Sites& s, int n, int distance, cplx coeff, ScatterResult& out) {
  for (int j = 0; j < n; ++j) {
    add_raise_lower(s, j, j + distance, coeff * kI, out);
    add_raise_lower(s, j + distance, j, -coeff * kI, out);
  }
}

void canonicalize(ScatterResult& out) {
  std::sort(out.begin(), out.end(), [](const ScatterEntry& x, const ScatterEntry& y) { return x.target < y.target; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < out.size();) {
    Code t = out[r].target;
    cplx acc = 0.0;
    while (r < out.size() && out[r].target == t) acc += out[r++].amplitude;
    if (acc != cplx(0.0, 0.0)) out[w++] = {t, acc};
  }
  out.resize(w);
}

void apply_kind(const TermKind& kind, const Sites& s, int n, cplx coeff, ScatterResult& out) {
  switch (kind.kind) {
    case TermKind::Kind::Heisenberg: apply_heisenberg(s, n, coeff, out); break;
    case TermKind::Kind::Chiral: apply_chiral(s, n, coeff, out); break;
    case TermKind::Kind::Zeeman: apply_zeeman(s, n, coeff, out); break;
    case TermKind::Kind::Hop: apply_hop(s, n, kind.distance, coeff, out); break;
  }
}

void check_kind(const TermKind& kind, const ChainConfig& cfg) {
  if (cfg.sites < 3 || cfg.sites > kMaxSites) throw std::invalid_argument("apply_term: chain needs at least 3 sites");
  if (kind.kind == TermKind::Kind::Hop && (kind.distance < 1 || kind.distance > max_hop_distance(cfg.sites)))
    throw std::invalid_argument("hop distance " + std::to_string(kind.distance) + " outside allowed range for N=" +
                                std::to_string(cfg.sites));
}

// Bloch-basis matrix of an operator given by its product-state action.
template <class Action>
SpMat assemble(const SymmetrySector& sec, Action&& act) {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(sec.dim() * 8);
  ScatterResult buf;
  for (std::size_t col = 0; col < sec.dim(); ++col) {
    buf.clear();
    act(Sites(sec.reps[col], sec.sites), buf);
    for (const auto& e : buf) {
      const auto loc = locate_orbit(e.target, sec.sites);
      const auto row = sec.index_of(loc.rep);
      if (!row) continue;  // incompatible period: Bloch sum vanishes
      // <b,k|H|a,k> = sqrt(R_a / R_b) sum_s c_s exp(i k l_s),  s = T^{l_s} b
      const cplx value = e.amplitude * sec.phase(loc.shift) * (sec.norms[col] / sec.norms[*row]);
      trip.emplace_back(static_cast<int>(*row), static_cast<int>(col), value);
    }
  }
  SpMat m(static_cast<Eigen::Index>(sec.dim()), static_cast<Eigen::Index>(sec.dim()));
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(cplx(0.0, 0.0), 1e-15);
  m.makeCompressed();
  return m;
}

HermitianFlag classify(const SpMat& a, bool couplings_real) {
  const double defect = max_hermiticity_defect(a);
  if (couplings_real && defect >= 1e-12)
    throw std::logic_error("real couplings produced a non-Hermitian sector matrix (defect " + std::to_string(defect) +
                           ")");
  return defect < 1e-12 ? HermitianFlag::hermitian : HermitianFlag::non_hermitian;
}

}  // namespace

ScatterResult apply_term(const TermKind& kind, const ChainConfig& cfg, const ProductState& s) {
  check_kind(kind, cfg);
  if (s.sites != cfg.sites) throw std::invalid_argument("apply_term: state and chain sizes differ");
  ScatterResult out;
  apply_kind(kind, Sites(s.code, s.sites), s.sites, 1.0, out);
  canonicalize(out);
  return out;
}

ScatterResult apply_hamiltonian(const ChainConfig& cfg, const ProductState& s) {
  cfg.validate();
  const Sites st(s.code, s.sites);
  ScatterResult out;
  apply_heisenberg(st, cfg.sites, cfg.jh, out);
  apply_chiral(st, cfg.sites, cfg.jc, out);
  apply_zeeman(st, cfg.sites, cfg.jz, out);
  for (const auto& h : cfg.hops) apply_hop(st, cfg.sites, h.distance, h.coupling, out);
  canonicalize(out);
  return out;
}

double max_hermiticity_defect(const SpMat& a) {
  const SpMat diff = a - SpMat(a.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

SectorMatrix build_sector_matrix(const TermKind& kind, const ChainConfig& cfg, SectorPtr sec) {
  check_kind(kind, cfg);
  if (!sec || sec->sites != cfg.sites) throw std::invalid_argument("build_sector_matrix: sector built for a different N");
  SectorMatrix out;
  out.storage = assemble(*sec, [&](const Sites& s, ScatterResult& buf) { apply_kind(kind, s, cfg.sites, 1.0, buf); });
  out.hermitian = classify(out.storage, true);
  out.sector = std::move(sec);
  return out;
}

TermBlocks build_term_blocks(const ChainConfig& cfg, SectorPtr sec) {
  cfg.validate();
  TermBlocks blocks;
  blocks.heisenberg = build_sector_matrix(TermKind::heisenberg(), cfg, sec).storage;
  blocks.chiral = build_sector_matrix(TermKind::chiral(), cfg, sec).storage;
  blocks.zeeman = build_sector_matrix(TermKind::zeeman(), cfg, sec).storage;
  for (const auto& h : cfg.hops)
    if (!blocks.hops.contains(h.distance))
      blocks.hops.emplace(h.distance, build_sector_matrix(TermKind::hop(h.distance), cfg, sec).storage);
  blocks.sector = std::move(sec);
  return blocks;
}

SectorMatrix combine_terms(const TermBlocks& blocks, const ChainConfig& cfg) {
  if (!blocks.sector || blocks.sector->sites != cfg.sites)
    throw std::invalid_argument("combine_terms: blocks built for a different chain");
  SectorMatrix out;
  out.sector = blocks.sector;
  SpMat h = cfg.jh * blocks.heisenberg + cfg.jc * blocks.chiral;
  h += cfg.jz * blocks.zeeman;
  for (const auto& hop : cfg.hops) {
    auto it = blocks.hops.find(hop.distance);
    if (it == blocks.hops.end())
      throw std::invalid_argument("combine_terms: no cached block for hop distance " + std::to_string(hop.distance));
    h += hop.coupling * it->second;
  }
  h.prune(cplx(0.0, 0.0), 1e-15);
  h.makeCompressed();
  out.storage = std::move(h);
  out.hermitian = classify(out.storage, cfg.all_real());
  return out;
}

SectorMatrix build_hamiltonian(const ChainConfig& cfg, SectorPtr sec) {
  return combine_terms(build_term_blocks(cfg, std::move(sec)), cfg);
}

Vec matvec(const SectorMatrix& a, const Vec& v) {
  if (v.size() != a.dim())
    throw std::invalid_argument("matvec: vector length " + std::to_string(v.size()) + " != " + std::to_string(a.dim()));
  return a.storage * v;
}

Vec matvec_adjoint(const SectorMatrix& a, const Vec& v) {
  if (v.size() != a.dim()) throw std::invalid_argument("matvec_adjoint: dimension mismatch");
  return a.storage.adjoint() * v;
}

SpMat build_full_space_hamiltonian(const ChainConfig& cfg) {
  cfg.validate();
  if (cfg.sites > 10) throw std::invalid_argument("build_full_space_hamiltonian: N > 10 is too large");
  const Code total = pow3(cfg.sites);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (Code c = 0; c < total; ++c) {
    for (const auto& e : apply_hamiltonian(cfg, {c, cfg.sites}))
      trip.emplace_back(static_cast<int>(e.target), static_cast<int>(c), e.amplitude);
  }
  SpMat m(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

void write_triplets(std::ostream& os, const SpMat& a) {
  os << "# " << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  os << std::setprecision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
}

SpMat read_triplets(std::istream& is) {
  std::string line;
  Eigen::Index rows = -1, cols = -1;
  std::vector<Eigen::Triplet<cplx>> trip;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      char hash;
      long long nnz;
      if (rows < 0 && (ls >> hash >> rows >> cols >> nnz)) continue;
      continue;
    }
    long long r, c;
    double re, im;
    if (!(ls >> r >> c >> re >> im)) throw std::runtime_error("read_triplets: malformed line '" + line + "'");
    trip.emplace_back(static_cast<int>(r), static_cast<int>(c), cplx(re, im));
  }
  if (rows < 0) throw std::runtime_error("read_triplets: missing size header");
  SpMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace spin1
