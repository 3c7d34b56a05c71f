#include "rewire/analysis.hpp"

#include <cmath>
#include <limits>

#include "rewire/spectral.hpp"

namespace rewire {

double kl_logits(const Vector& p_original, const Vector& p_attacked) {
  if (p_original.size() != p_attacked.size()) throw InvalidInput("kl_logits: vectors differ in length");
  double kl = 0;
  for (Eigen::Index i = 0; i < p_original.size(); ++i) {
    const double p = p_original[i];
    if (p <= 0) continue;
    kl += p * std::log(p / std::max(p_attacked[i], kProbabilityFloor));
  }
  return kl;
}

AttackAnalysisRecord analyze_attack(const std::string& graph_id, const Graph& original, const Trajectory& trajectory,
                                    const ClassifierModel& classifier) {
  AttackAnalysisRecord r;
  r.graph_id = graph_id;
  r.outcome = trajectory.outcome;
  r.steps = trajectory.num_steps();
  r.step_ratio = original.num_edges() ? static_cast<double>(r.steps) / static_cast<double>(original.num_edges()) : 0.0;

  const Graph& attacked = trajectory.steps.empty() ? original : trajectory.final_graph;
  const Prediction before = predict(original, classifier);
  const Prediction after = predict(attacked, classifier);
  r.original_label = before.label;
  r.attacked_label = after.label;
  if (before.graph_embedding == after.graph_embedding)
    r.rc = 0.0;
  else if (before.graph_embedding.norm() == 0)
    r.rc = std::numeric_limits<double>::quiet_NaN();
  else
    r.rc = relative_embedding_change(before.graph_embedding, after.graph_embedding);
  r.kl = before.logits == after.logits ? 0.0 : kl_logits(before.logits, after.logits);
  r.components_before = connected_components(original).count;
  r.components_after = connected_components(attacked).count;
  r.r_lambda = eigenvalue_change_ratio(original, attacked);
  return r;
}

double OperatorComparison::fraction_ratio_above_one() const {
  int defined = 0;
  int above = 0;
  for (const auto& v : ratio) {
    if (!v) continue;
    ++defined;
    if (*v > 1.0) ++above;
  }
  return defined ? static_cast<double>(above) / defined : 0.0;
}

OperatorComparison compare_operators(const std::vector<OperatorCase>& cases, Rng& rng) {
  if (cases.empty()) throw InvalidInput("compare_operators: no graphs");
  OperatorComparison out;
  std::vector<double> sum_re, sum_da;
  int more_re = 0;
  int more_da = 0;
  double comp_clean = 0, comp_re = 0, comp_da = 0;
  for (const auto& c : cases) {
    if (c.steps <= 0) continue;
    if (c.rewired.num_nodes() != c.original.num_nodes())
      throw InvalidInput("compare_operators: rewired graph size differs for " + c.graph_id);
    const AddDeleteResult da = random_add_delete(c.original, c.steps, rng);
    out.add_delete_applied.push_back(da.applied);
    ++out.graphs_used;

    const int clean = connected_components(c.original).count;
    const int re = connected_components(c.rewired).count;
    const int ad = connected_components(da.graph).count;
    comp_clean += clean;
    comp_re += re;
    comp_da += ad;
    if (re > clean) ++more_re;
    if (ad > clean) ++more_da;

    const auto r_re = eigenvalue_change_ratio(c.original, c.rewired);
    const auto r_da = eigenvalue_change_ratio(c.original, da.graph);
    if (r_re.size() > sum_re.size()) {
      sum_re.resize(r_re.size(), 0.0);
      sum_da.resize(r_re.size(), 0.0);
      out.defined_count.resize(r_re.size(), 0);
    }
    for (std::size_t i = 0; i < r_re.size(); ++i) {
      if (!r_re[i] || !r_da[i]) continue;
      sum_re[i] += *r_re[i];
      sum_da[i] += *r_da[i];
      ++out.defined_count[i];
    }
  }
  if (out.graphs_used == 0) return out;

  const double n = out.graphs_used;
  out.mean_components_clean = comp_clean / n;
  out.mean_components_rewired = comp_re / n;
  out.mean_components_add_delete = comp_da / n;
  out.frac_more_disconnected_rewired = more_re / n;
  out.frac_more_disconnected_add_delete = more_da / n;
  for (std::size_t i = 0; i < sum_re.size(); ++i) {
    const int k = out.defined_count[i];
    const double re = k ? sum_re[i] / k : 0.0;
    const double da = k ? sum_da[i] / k : 0.0;
    out.mean_r_rewire.push_back(re);
    out.mean_r_add_delete.push_back(da);
    if (k > 0 && re > 0)
      out.ratio.emplace_back(da / re);
    else
      out.ratio.emplace_back(std::nullopt);
  }
  return out;
}

}  // namespace rewire
