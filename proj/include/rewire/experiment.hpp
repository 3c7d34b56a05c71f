#ifndef REWIRE_EXPERIMENT_HPP
#define REWIRE_EXPERIMENT_HPP

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rewire/analysis.hpp"
#include "rewire/config.hpp"
#include "rewire/dataset.hpp"

namespace rewire {

struct LoadedDataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<std::string> ids;  // stable graph ids, one per graph
};

/// The configured TU directory or, for dataset = synthetic, the generated set.
LoadedDataset load_experiment_dataset(const ExperimentConfig& cfg);

struct ExperimentSplit {
  DatasetSplit split;
  std::vector<std::string> test_ids;
};
ExperimentSplit split_experiment(const ExperimentConfig& cfg, const LoadedDataset& data);

struct VictimTraining {
  ClassifierModel model;
  std::vector<double> epoch_loss;
  std::vector<double> epoch_accuracy;
  double train_accuracy = 0;
  double test_accuracy = 0;
};
VictimTraining train_victim(const ExperimentConfig& cfg, const ExperimentSplit& split);

std::string policy_key(Variant v, const Budget& b);  // e.g. "rewatt-a_p0.03"

/// (variant, budget) pairs that need a trained policy. Requesting Random-s
/// implies ReWatt at the same budget, whose step counts it replays.
std::vector<std::pair<Variant, Budget>> required_policies(const ExperimentConfig& cfg);

struct AttackerTraining {
  std::map<std::string, PolicyModel> policies;
  std::map<std::string, std::vector<double>> curves;  // per-epoch training success rate
};
AttackerTraining train_policies(const ExperimentConfig& cfg, const std::vector<Graph>& attacker_train,
                                const LabelOracle& oracle);

struct AttackRecord {
  std::size_t test_index = 0;
  std::string graph_id;
  Variant variant = Variant::ReWatt;
  Budget budget;
  int original_label = 0;
  Trajectory trajectory;
  double wall_ms = 0;
};

struct SuccessRate {
  Variant variant = Variant::ReWatt;
  Budget budget;
  int total = 0;
  int succeeded = 0;
  int failed = 0;           // budget exhausted
  int no_valid_action = 0;  // counted as failures
  double rate() const { return total ? static_cast<double>(succeeded) / total : 0.0; }
};

struct SuccessRateReport {
  std::vector<AttackRecord> records;
  std::vector<SuccessRate> rates;

  /// Throws InvalidInput when the pair was not evaluated.
  const SuccessRate& rate(Variant v, const Budget& b) const;
};

/// Evaluates every configured variant at every configured budget on the test
/// graphs. Policy variants need an entry in `policies` (ConfigError
/// otherwise); Random-s replays the recorded ReWatt step count per graph.
SuccessRateReport run_attack_suite(const ExperimentConfig& cfg, const std::vector<Graph>& test,
                                   const std::vector<std::string>& ids, const LabelOracle& oracle,
                                   const std::map<std::string, PolicyModel>& policies);

// CSV renderings. Columns are documented in the README and kept stable.
std::string attacks_csv(const SuccessRateReport& report);
std::string timing_csv(const SuccessRateReport& report);
std::string summary_csv(const SuccessRateReport& report);
std::string classifier_curve_csv(const VictimTraining& v);
std::string attacker_curve_csv(const AttackerTraining& a);

struct AnalysisRow {
  Variant variant = Variant::ReWatt;
  Budget budget;
  AttackAnalysisRecord record;
};
std::vector<AnalysisRow> analyze_suite(const SuccessRateReport& report, const std::vector<Graph>& test,
                                       const ClassifierModel& classifier);
std::string analysis_csv(const std::vector<AnalysisRow>& rows);

/// ReWatt records with at least one step, as matched-count operator cases.
std::vector<OperatorCase> operator_cases(const SuccessRateReport& report, const std::vector<Graph>& test,
                                         const Budget& budget);
std::string operator_comparison_csv(const OperatorComparison& c);
std::string operator_summary_csv(const OperatorComparison& c);

struct SpectralCompareRow {
  std::string graph_id;
  std::string op;  // "rewire" or "add_delete"
  int steps = 0;
  double lambda2_before = 0, lambda2_after = 0;
  std::optional<double> re_before, re_after;
  int components_before = 0, components_after = 0;
  std::optional<double> r_lambda_mean, r_lambda_max;
  int r_lambda_defined = 0;
};
SpectralCompareRow spectral_compare_row(const std::string& id, const std::string& op, const Graph& before,
                                        const Graph& after, int steps);
std::string spectral_compare_csv(const std::vector<SpectralCompareRow>& rows);

/// Files of one command, kept in memory until every step has succeeded.
class OutputSet {
 public:
  void add(const std::string& relative_path, std::string content);
  const std::map<std::string, std::string>& files() const { return files_; }
  bool contains(const std::string& relative_path) const { return files_.count(relative_path) > 0; }
  const std::string& at(const std::string& relative_path) const { return files_.at(relative_path); }
  /// Writes every file under `dir` (each via a temporary name and rename).
  void commit(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

/// Runs one CLI subcommand (gen-synth, train-classifier, train-attacker,
/// attack, analyze, spectral-compare) and returns its outputs, including
/// manifest.json. Nothing touches the disk except reading inputs.
OutputSet run_command(const std::string& command, const ExperimentConfig& cfg);

}  // namespace rewire

#endif  // REWIRE_EXPERIMENT_HPP
