#ifndef REWIRE_CONFIG_HPP
#define REWIRE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rewire/attack_env.hpp"
#include "rewire/classifier.hpp"
#include "rewire/dataset.hpp"
#include "rewire/policy.hpp"

namespace rewire {

/// Flat "key = value" settings in file order. Blank lines and lines starting
/// with '#' are ignored.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text, const std::string& origin = "<config>");
ConfigMap read_config_file(const std::filesystem::path& path);

enum class Variant { ReWatt, ReWattA, ReWattN, Random, RandomS };
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
bool uses_policy(Variant v);

/// A ratio budget p (K = max(1, floor(p |E|))) or a fixed K.
struct Budget {
  BudgetMode mode = BudgetMode::Ratio;
  double ratio = 0.03;
  int k = 1;

  std::string tag() const;  // "p0.03" or "k2"
  bool operator==(const Budget&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int split_a = 50;
  int split_b = 30;
  int split_c = 20;

  std::string dataset = "synthetic";  // or a TU dataset directory
  bool validate_known_stats = true;
  SyntheticSpec synthetic;  // its feature mode also sets the features of loaded datasets
  /// Models derive features from the graph they are given (so edits show up
  /// in the features) instead of reading the stored matrix.
  bool recompute_features = true;

  ClassifierConfig classifier;
  ClassifierTrainConfig classifier_train;
  AttackerTrainConfig attacker;
  double fixed_penalty = -0.5;  // ReWatt-n step penalty
  /// Test-time policies take each stage's most probable choice instead of
  /// sampling. Training always samples.
  bool greedy_evaluation = false;

  std::vector<Variant> variants{Variant::ReWatt, Variant::ReWattA, Variant::ReWattN, Variant::Random,
                                Variant::RandomS};
  std::vector<Budget> budgets{Budget{}};

  std::string out_dir;                // empty: runs/<timestamp>-seed<seed>
  std::string classifier_checkpoint;  // empty: <out>/classifier.json
  std::string policy_dir;             // empty: <out>/policies
  bool train_missing = false;         // train absent checkpoints instead of failing

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Applies settings on top of `base`; unknown keys and malformed values throw
/// ConfigError naming the key.
ExperimentConfig apply_config(ExperimentConfig base, const ConfigMap& values);
/// Canonical flat rendering of every setting, parseable by apply_config.
ConfigMap config_to_map(const ExperimentConfig& cfg);
std::string render_config(const ExperimentConfig& cfg);

/// Model configurations with the feature mode resolved.
ClassifierConfig classifier_config(const ExperimentConfig& cfg);
AttackerTrainConfig attacker_config(const ExperimentConfig& cfg);

/// AttackConfig of one variant at one budget.
AttackConfig attack_config_for(Variant v, const Budget& b, const ExperimentConfig& cfg);

}  // namespace rewire

#endif  // REWIRE_CONFIG_HPP
