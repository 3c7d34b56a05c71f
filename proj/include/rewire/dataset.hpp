#ifndef REWIRE_DATASET_HPP
#define REWIRE_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rewire/features.hpp"
#include "rewire/graph.hpp"

namespace rewire {

struct DatasetStats {
  std::size_t num_graphs = 0;
  int num_labels = 0;
};

struct TuDataset {
  std::string name;
  std::vector<Graph> graphs;  // labels remapped to 0..C-1
  std::vector<long long> raw_labels;  // raw label for each remapped class index
  int num_classes() const { return static_cast<int>(raw_labels.size()); }
};

/// Reads <NAME>_A.txt, <NAME>_graph_indicator.txt and <NAME>_graph_labels.txt
/// from `dir`. Throws ParseError (with file and line) on malformed input and
/// IntegrityError on inconsistent files or mismatching `expected` statistics.
TuDataset load_tu_dataset(const std::filesystem::path& dir, FeatureMode features,
                          std::optional<DatasetStats> expected = std::nullopt);

/// The same three-file layout (1-based ids), keyed by file name.
std::map<std::string, std::string> render_tu_dataset(const std::string& name, const std::vector<Graph>& graphs);
/// Writes render_tu_dataset's files into `dir`.
void write_tu_dataset(const std::filesystem::path& dir, const std::string& name, const std::vector<Graph>& graphs);

/// Known statistics of public benchmarks, for loader validation.
std::optional<DatasetStats> known_dataset_stats(const std::string& name);

struct SyntheticSpec {
  int num_classes = 3;
  int graphs_per_class = 100;
  int min_nodes = 20;
  int max_nodes = 30;
  int community_nodes = 16;  // nodes split among the planted communities
  double p_in_min = 0.75;
  double p_in_max = 0.9;
  double p_out = 0.03;
  FeatureMode features = FeatureMode::DegreeBuckets;

  void validate() const;
};

/// Class c plants c + 1 dense communities over a sparse background.
/// Output is balanced and interleaved by class; deterministic per seed.
std::vector<Graph> gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

struct DatasetSplit {
  std::vector<Graph> classifier_train;
  std::vector<Graph> attacker_train;
  std::vector<Graph> attacker_test;
  std::vector<std::size_t> classifier_train_index;  // positions in the input
  std::vector<std::size_t> attacker_train_index;
  std::vector<std::size_t> attacker_test_index;
};

/// Seeded shuffle, then contiguous a% / b% / c% blocks.
DatasetSplit split_dataset(const std::vector<Graph>& graphs, int a, int b, int c, std::uint64_t seed);

}  // namespace rewire

#endif  // REWIRE_DATASET_HPP
