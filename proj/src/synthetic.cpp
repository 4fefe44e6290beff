#include "pkgrec/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "pkgrec/error.hpp"
#include "pkgrec/rng.hpp"

namespace pkgrec {

std::string synthetic_package_name(int cluster, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%02d_p%02d", cluster, index);
  return buf;
}

int synthetic_cluster_of(const std::string& name) {
  int cluster = -1;
  int index = -1;
  if (std::sscanf(name.c_str(), "c%d_p%d", &cluster, &index) != 2) return -1;
  return cluster;
}

Corpus make_synthetic_corpus(const SyntheticConfig& cfg) {
  if (cfg.clusters < 2 || cfg.packages_per_cluster < 2) throw InvalidArgumentError("need >= 2 clusters of >= 2 packages");
  if (cfg.min_imports < 1 || cfg.max_imports < cfg.min_imports || cfg.max_imports > cfg.packages_per_cluster) {
    throw InvalidArgumentError("import counts must satisfy 1 <= min <= max <= packages_per_cluster");
  }
  if (cfg.noise < 0.0 || cfg.noise >= 1.0) throw InvalidArgumentError("noise must be in [0, 1)");

  Rng rng(cfg.seed);
  const int per = cfg.packages_per_cluster;
  Corpus corpus;
  corpus.source_root = "synthetic";
  std::vector<double> weights(static_cast<std::size_t>(per));

  for (int f = 0; f < cfg.files; ++f) {
    const int cluster = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.clusters)));
    const int focus = static_cast<int>(rng.below(static_cast<std::uint64_t>(per)));
    const int n = cfg.min_imports + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_imports - cfg.min_imports + 1)));

    for (int p = 0; p < per; ++p) {
      const int gap = std::abs(p - focus);
      const int ring = std::min(gap, per - gap);
      weights[static_cast<std::size_t>(p)] = cfg.locality > 0.0 ? std::exp(-ring / cfg.locality) : 1.0;
    }

    PackageSet packages;
    for (int drawn = 0; drawn < n; ++drawn) {
      double total = 0.0;
      for (double w : weights) total += w;
      double u = rng.uniform01() * total;
      int pick = per - 1;
      for (int p = 0; p < per; ++p) {
        if (weights[static_cast<std::size_t>(p)] == 0.0) continue;
        u -= weights[static_cast<std::size_t>(p)];
        if (u < 0.0) {
          pick = p;
          break;
        }
      }
      while (weights[static_cast<std::size_t>(pick)] == 0.0) --pick;  // rounding at the tail
      weights[static_cast<std::size_t>(pick)] = 0.0;

      if (rng.uniform01() < cfg.noise) {
        const int other = (cluster + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.clusters - 1)))) % cfg.clusters;
        packages.insert(synthetic_package_name(other, static_cast<int>(rng.below(static_cast<std::uint64_t>(per)))));
      } else {
        packages.insert(synthetic_package_name(cluster, pick));
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "synthetic/%05d.py", f);
    corpus.records.push_back({id, std::move(packages)});
  }
  return corpus;
}

}  // namespace pkgrec
