#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "chemkd/molgraph.hpp"

namespace chemkd {

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

struct Assignment {
  /// row_to_col[i] is the column assigned to row i.
  std::vector<std::size_t> row_to_col;
  double total = 0.0;
};

/// Minimum-cost perfect assignment on an m x m row-major matrix (Hungarian
/// method with potentials, O(m^3)). Entries must be >= 0 or kForbidden.
/// Throws InvalidArgument when the matrix is not square or no finite
/// assignment exists (for example an all-forbidden row).
Assignment assignment_solve(std::span<const double> costs, std::size_t m);

/// Riesen-Bunke cost matrix of size (n1+n2)^2 under unit edit costs:
///   [0,n1)x[0,n2)    substitution: [elements differ] + optimal matching cost of
///                    the two atoms' incident bond-order multisets
///   [0,n1)x[n2,..)   deletion of atom i on the diagonal, 1 + degree
///   [n1,..)x[0,n2)   insertion of atom j on the diagonal, 1 + degree
///   [n1,..)x[n2,..)  zeros
/// Forbidden cells hold kForbidden.
std::vector<double> ged_cost_matrix(const MolecularGraph& g1, const MolecularGraph& g2);

/// Unit cost of the edit path induced by a node map from g1 to g2
/// (mapping[i] = atom of g2, or -1 for deletion). Atoms are compared by
/// element only; bonds by order.
int induced_edit_cost(const MolecularGraph& g1, const MolecularGraph& g2, std::span<const int> mapping);

/// Bipartite approximation of the graph edit distance: solves the cost
/// matrix above and returns the cost of the induced edit path, which is an
/// upper bound on the exact distance. Symmetric, and 0 for a graph against
/// itself.
double approx_ged(const MolecularGraph& g1, const MolecularGraph& g2);

/// Exact graph edit distance under the same unit costs, by A* over partial
/// node maps. Throws InvalidArgument if either graph has more than max_atoms atoms.
int exact_ged_tiny(const MolecularGraph& g1, const MolecularGraph& g2, std::size_t max_atoms = 8);

}  // namespace chemkd
