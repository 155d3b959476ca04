#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perspective/corpus.hpp"
#include "perspective/types.hpp"

namespace persp {

struct PartitionOptions {
  std::size_t k = 2;
  std::size_t min_size = 2;
  // Required to enumerate more than kLargeEnumeration partitions.
  bool allow_large = false;
  // Scoring workers; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

inline constexpr std::uint64_t kLargeEnumeration = 1'000'000;
// Average-P differences at or below this are ties.
inline constexpr double kScoreTieTolerance = 1e-12;

// Number of unordered partitions of m labelled annotators into exactly k
// groups of at least min_size members. Saturates at UINT64_MAX.
std::uint64_t count_partitions(std::size_t m, std::size_t k, std::size_t min_size);

/// Groups of annotator indices. Canonical form: each group ascending, groups
/// ordered by their smallest member.
using IndexPartition = std::vector<std::vector<std::size_t>>;

// Every unordered partition exactly once, canonical, in lexicographic order.
// Throws when infeasible (m < k * min_size, k == 0, min_size == 0) or when the
// count exceeds kLargeEnumeration without allow_large.
std::vector<IndexPartition> enumerate_index_partitions(std::size_t m, const PartitionOptions& options);

// Same over annotator ids; ids are sorted first so input order does not matter.
std::vector<Partition> enumerate_partitions(std::span<const std::string> annotators,
                                            const PartitionOptions& options = {});

struct ScoredPartition {
  Partition partition;
  std::optional<double> average;  // nullopt when no item has a defined p
  std::size_t defined_items = 0;
};

struct PartitionSearch {
  Partition best;
  double best_score = 0.0;
  // Every enumerated partition: best first, then by score descending
  // (enumeration order among equal scores), undefined averages last.
  std::vector<ScoredPartition> ranking;
  // Filled when a natural partition is supplied.
  std::optional<ScoredPartition> natural;
  std::optional<double> others_max;
  std::optional<double> others_min;
};

/// Exhaustive argmax of the average P-index over all partitions of the
/// matrix's annotators. Ties within kScoreTieTolerance go to the
/// lexicographically smallest canonical partition. Throws if no partition has
/// a defined average.
PartitionSearch search_max_polarization(const AnnotationMatrix& matrix, const PartitionOptions& options = {},
                                        const std::optional<Partition>& natural = std::nullopt);

// Groups annotators by their group tag (groups ordered by tag name, untagged
// annotators left out). nullopt with fewer than two tags.
std::optional<Partition> natural_partition(const AnnotationMatrix& matrix);

Partition to_partition(const AnnotationMatrix& matrix, const IndexPartition& groups);

std::string to_json(const Partition& partition);
Partition partition_from_json(const std::string& text);

std::string to_json(const PartitionSearch& search);
// `rank<TAB>avg_p<TAB>group1<TAB>group2[...]`, members comma-joined.
void write_scored_tsv(const PartitionSearch& search, std::ostream& out);

}  // namespace persp
