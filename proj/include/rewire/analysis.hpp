#ifndef REWIRE_ANALYSIS_HPP
#define REWIRE_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "rewire/attack_env.hpp"
#include "rewire/classifier.hpp"
#include "rewire/graph.hpp"
#include "rewire/random.hpp"

namespace rewire {

/// sum_i p_o[i] log(p_o[i] / p_a[i]) with 0 log 0 = 0 and p_a floored at 1e-12.
double kl_logits(const Vector& p_original, const Vector& p_attacked);

struct AttackAnalysisRecord {
  std::string graph_id;
  Outcome outcome = Outcome::Running;
  int steps = 0;
  double step_ratio = 0;  // M / |E|
  double rc = 0;          // relative change of the graph embedding
  double kl = 0;          // divergence between logits
  int original_label = 0;
  int attacked_label = 0;
  int components_before = 0;
  int components_after = 0;
  std::vector<std::optional<double>> r_lambda;
};

/// White-box post-hoc measurements of one finished attack.
AttackAnalysisRecord analyze_attack(const std::string& graph_id, const Graph& original, const Trajectory& trajectory,
                                    const ClassifierModel& classifier);

struct OperatorCase {
  std::string graph_id;
  Graph original;
  Graph rewired;  // after `steps` recorded rewirings
  int steps = 0;
};

struct OperatorComparison {
  int graphs_used = 0;
  std::vector<double> mean_r_rewire;      // per eigen-index
  std::vector<double> mean_r_add_delete;  // per eigen-index
  std::vector<int> defined_count;         // graphs contributing to each index
  std::vector<std::optional<double>> ratio;  // mean_r_add_delete / mean_r_rewire
  double mean_components_clean = 0;
  double mean_components_rewired = 0;
  double mean_components_add_delete = 0;
  double frac_more_disconnected_rewired = 0;
  double frac_more_disconnected_add_delete = 0;
  std::vector<int> add_delete_applied;  // per used graph

  /// Fraction of defined ratios that exceed 1.
  double fraction_ratio_above_one() const;
};

/// For each case applies the same number of random edge additions/deletions
/// as recorded rewirings and compares eigenvalue change ratios and
/// connectivity between the two operators. Cases with zero steps are skipped.
OperatorComparison compare_operators(const std::vector<OperatorCase>& cases, Rng& rng);

}  // namespace rewire

#endif  // REWIRE_ANALYSIS_HPP
