#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include <Eigen/Sparse>

#include "spin1/basis.hpp"

namespace spin1 {

using SpMat = Eigen::SparseMatrix<cplx>;

// The four Hermitian building blocks of the chain Hamiltonian.
//   Heisenberg  sum_j S_j . S_{j+1}
//   Chiral      sum_j S_j . (S_{j+1} x S_{j+2})
//   Zeeman      sum_j S^z_j
//   Hop(n)      i sum_j (S^+_j S^-_{j+n} - S^-_j S^+_{j+n})
struct TermKind {
  enum class Kind { Heisenberg, Chiral, Zeeman, Hop };
  Kind kind = Kind::Heisenberg;
  int distance = 0;  // Hop only

  static TermKind heisenberg() { return {Kind::Heisenberg, 0}; }
  static TermKind chiral() { return {Kind::Chiral, 0}; }
  static TermKind zeeman() { return {Kind::Zeeman, 0}; }
  static TermKind hop(int n) { return {Kind::Hop, n}; }

  friend bool operator==(const TermKind&, const TermKind&) = default;
};

struct ScatterEntry {
  Code target = 0;
  cplx amplitude{};
};

// H_term |s> = sum amplitude |target>. Targets are unique and sorted; exact
// zeros are dropped.
using ScatterResult = std::vector<ScatterEntry>;

ScatterResult apply_term(const TermKind& kind, const ChainConfig& cfg, const ProductState& s);
// Full Hamiltonian action (couplings applied).
ScatterResult apply_hamiltonian(const ChainConfig& cfg, const ProductState& s);

enum class HermitianFlag { hermitian, non_hermitian, unknown };

struct SectorMatrix {
  SectorPtr sector;
  SpMat storage;
  HermitianFlag hermitian = HermitianFlag::unknown;

  Eigen::Index dim() const { return storage.rows(); }
  Mat dense() const { return Mat(storage); }
};

double max_hermiticity_defect(const SpMat& a);

// Pure term matrix in the Bloch basis of the sector, no coupling applied.
SectorMatrix build_sector_matrix(const TermKind& kind, const ChainConfig& cfg, SectorPtr sec);

// Term matrices of every term present in cfg, for cheap recombination when
// only the couplings change.
struct TermBlocks {
  SectorPtr sector;
  SpMat heisenberg;
  SpMat chiral;
  SpMat zeeman;
  std::map<int, SpMat> hops;  // keyed by distance
};

TermBlocks build_term_blocks(const ChainConfig& cfg, SectorPtr sec);
// sum of coupling * block; every hop distance in cfg must be present.
SectorMatrix combine_terms(const TermBlocks& blocks, const ChainConfig& cfg);
SectorMatrix build_hamiltonian(const ChainConfig& cfg, SectorPtr sec);

Vec matvec(const SectorMatrix& a, const Vec& v);
Vec matvec_adjoint(const SectorMatrix& a, const Vec& v);

// 3^N x 3^N Hamiltonian in the plain product basis, no symmetry used.
SpMat build_full_space_hamiltonian(const ChainConfig& cfg);

// "row col re im" lines, zero-based indices, preceded by a "# rows cols nnz"
// comment line.
void write_triplets(std::ostream& os, const SpMat& a);
SpMat read_triplets(std::istream& is);

}  // namespace spin1
