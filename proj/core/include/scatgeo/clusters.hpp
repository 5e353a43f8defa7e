#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace scatgeo {

/// A set partition of the particle indices {1,...,N} into disjoint nonempty
/// blocks.  Canonical form: blocks sorted by smallest element, elements
/// sorted within blocks, so equality is plain structural equality.
class ClusterDecomposition {
 public:
  ClusterDecomposition(std::vector<std::vector<int>> blocks, int n_particles);

  int n_particles() const { return n_particles_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& block(int i) const { return blocks_[i]; }

  /// Index (0-based) of the block containing particle i (1-based).
  int block_of(int particle) const;

  bool operator==(const ClusterDecomposition& other) const = default;

  std::string to_json() const;

 private:
  std::vector<std::vector<int>> blocks_;
  int n_particles_;
};

/// An unordered particle pair {i,j}, stored with i < j (1-based indices).
struct PairIndex {
  int i, j;
  PairIndex(int a, int b);
  bool operator==(const PairIndex&) const = default;
};

/// One of the k_b = C(|b|,2) intercluster block pairs of a decomposition,
/// ordered lexicographically by (from_block, to_block).
struct InterclusterLink {
  int k;           // 1-based link index
  int from_block;  // 0-based block indices, from_block < to_block
  int to_block;
};

/// All set partitions of {1..N} in canonical form.  Guarded to N <= 8
/// (B_8 = 4140); larger N throws.
std::vector<ClusterDecomposition> enumerate_decompositions(int n);

/// true iff every block of b is contained in some block of a (b <= a).
bool is_refinement(const ClusterDecomposition& b, const ClusterDecomposition& a);

/// true iff i and j lie in the same block of a (alpha <= a).
bool pair_leq(const PairIndex& alpha, const ClusterDecomposition& a);

/// The decomposition with {i,j} as one block and every other particle a
/// singleton.
ClusterDecomposition pair_as_decomposition(const PairIndex& alpha, int n);

/// The C(|b|,2) intercluster links of b in deterministic order.
std::vector<InterclusterLink> intercluster_links(const ClusterDecomposition& b);

/// Merge the two blocks joined by `link`, leaving the rest unchanged.
ClusterDecomposition merge_blocks(const ClusterDecomposition& c,
                                  const InterclusterLink& link);

/// All pairs {i,j}, 1 <= i < j <= N, lexicographic.
std::vector<PairIndex> all_pairs(int n);

}  // namespace scatgeo
