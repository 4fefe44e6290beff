#pragma once

#include <cstdint>
#include <string>

#include "pkgrec/corpus.hpp"

namespace pkgrec {

/// Generator for clustered import corpora with a known structure.
///
/// Each cluster's packages sit on a ring. A file picks one cluster and a
/// focal package, then draws its imports from that cluster without
/// replacement, weighting each package by exp(-ring_distance / locality).
/// locality <= 0 draws uniformly within the cluster. Each import is then
/// swapped for a package of another cluster with probability `noise`.
struct SyntheticConfig {
  int clusters = 10;
  int packages_per_cluster = 20;
  int files = 5000;
  int min_imports = 4;
  int max_imports = 8;
  double noise = 0.05;
  double locality = 0.75;
  std::uint64_t seed = 42;
};

/// "c03_p07": package 7 of cluster 3.
std::string synthetic_package_name(int cluster, int index);

/// Cluster of a name produced by synthetic_package_name, or -1.
int synthetic_cluster_of(const std::string& name);

Corpus make_synthetic_corpus(const SyntheticConfig& config);

}  // namespace pkgrec
