#include "scatgeo/clusters.hpp"

#include <algorithm>
#include <stdexcept>

namespace scatgeo {

namespace {

std::vector<std::vector<int>> canonicalize(std::vector<std::vector<int>> blocks,
                                           int n) {
  std::vector<char> seen(n + 1, 0);
  for (auto& blk : blocks) {
    if (blk.empty()) throw std::invalid_argument("empty block");
    std::sort(blk.begin(), blk.end());
    for (int p : blk) {
      if (p < 1 || p > n) throw std::invalid_argument("particle index out of range");
      if (seen[p]) throw std::invalid_argument("duplicate particle index");
      seen[p] = 1;
    }
  }
  for (int p = 1; p <= n; ++p)
    if (!seen[p]) throw std::invalid_argument("blocks do not cover {1..N}");
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return blocks;
}

}  // namespace

ClusterDecomposition::ClusterDecomposition(std::vector<std::vector<int>> blocks,
                                           int n_particles)
    : blocks_(canonicalize(std::move(blocks), n_particles)),
      n_particles_(n_particles) {}

int ClusterDecomposition::block_of(int particle) const {
  for (int i = 0; i < size(); ++i)
    for (int p : blocks_[i])
      if (p == particle) return i;
  throw std::invalid_argument("particle index out of range");
}

std::string ClusterDecomposition::to_json() const {
  std::string out = "[";
  for (int i = 0; i < size(); ++i) {
    out += (i ? ",[" : "[");
    for (size_t j = 0; j < blocks_[i].size(); ++j) {
      if (j) out += ",";
      out += std::to_string(blocks_[i][j]);
    }
    out += "]";
  }
  return out + "]";
}

PairIndex::PairIndex(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {
  if (a == b || i < 1) throw std::invalid_argument("invalid pair");
}

std::vector<ClusterDecomposition> enumerate_decompositions(int n) {
  if (n < 2 || n > 8)
    throw std::invalid_argument("enumerate_decompositions: N must be in [2,8]");
  // Restricted-growth assignment: particle p joins an existing block or
  // opens a new one.
  std::vector<ClusterDecomposition> out;
  std::vector<std::vector<int>> blocks;
  auto rec = [&](auto&& self, int p) -> void {
    if (p > n) {
      out.emplace_back(blocks, n);
      return;
    }
    for (std::size_t i = 0, count = blocks.size(); i < count; ++i) {
      blocks[i].push_back(p);
      self(self, p + 1);
      blocks[i].pop_back();
    }
    blocks.push_back({p});
    self(self, p + 1);
    blocks.pop_back();
  };
  rec(rec, 1);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.blocks() < b.blocks();
  });
  return out;
}

bool is_refinement(const ClusterDecomposition& b, const ClusterDecomposition& a) {
  if (b.n_particles() != a.n_particles())
    throw std::invalid_argument("is_refinement: mismatched particle counts");
  for (const auto& blk : b.blocks()) {
    int host = a.block_of(blk.front());
    for (int p : blk)
      if (a.block_of(p) != host) return false;
  }
  return true;
}

bool pair_leq(const PairIndex& alpha, const ClusterDecomposition& a) {
  if (alpha.j > a.n_particles())
    throw std::invalid_argument("pair_leq: index out of range");
  return a.block_of(alpha.i) == a.block_of(alpha.j);
}

ClusterDecomposition pair_as_decomposition(const PairIndex& alpha, int n) {
  std::vector<std::vector<int>> blocks{{alpha.i, alpha.j}};
  for (int p = 1; p <= n; ++p)
    if (p != alpha.i && p != alpha.j) blocks.push_back({p});
  return ClusterDecomposition(std::move(blocks), n);
}

std::vector<InterclusterLink> intercluster_links(const ClusterDecomposition& b) {
  if (b.size() < 2)
    throw std::domain_error("intercluster_links: |b| = 1 has no links");
  std::vector<InterclusterLink> links;
  int k = 1;
  for (int l = 0; l < b.size(); ++l)
    for (int m = l + 1; m < b.size(); ++m) links.push_back({k++, l, m});
  return links;
}

ClusterDecomposition merge_blocks(const ClusterDecomposition& c,
                                  const InterclusterLink& link) {
  if (link.from_block < 0 || link.to_block >= c.size() ||
      link.from_block >= link.to_block)
    throw std::invalid_argument("merge_blocks: invalid link");
  std::vector<std::vector<int>> blocks;
  std::vector<int> merged = c.block(link.from_block);
  const auto& other = c.block(link.to_block);
  merged.insert(merged.end(), other.begin(), other.end());
  blocks.push_back(std::move(merged));
  for (int i = 0; i < c.size(); ++i)
    if (i != link.from_block && i != link.to_block) blocks.push_back(c.block(i));
  return ClusterDecomposition(std::move(blocks), c.n_particles());
}

std::vector<PairIndex> all_pairs(int n) {
  std::vector<PairIndex> out;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) out.emplace_back(i, j);
  return out;
}

}  // namespace scatgeo
