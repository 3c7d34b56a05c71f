#include "rewire/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "rewire/checkpoint.hpp"
#include "rewire/spectral.hpp"

namespace fs = std::filesystem;

namespace rewire {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s + '\n';
}

std::string budget_column(const Budget& b) { return b.tag(); }

}  // namespace

LoadedDataset load_experiment_dataset(const ExperimentConfig& cfg) {
  LoadedDataset out;
  if (cfg.dataset == "synthetic") {
    out.name = "SYNTH";
    out.graphs = gen_synthetic(cfg.synthetic, derive_seed(cfg.seed, "synthetic"));
  } else {
    const fs::path dir(cfg.dataset);
    std::optional<DatasetStats> expected;
    TuDataset probe = load_tu_dataset(dir, cfg.synthetic.features);
    if (cfg.validate_known_stats) {
      expected = known_dataset_stats(probe.name);
      if (expected && (probe.graphs.size() != expected->num_graphs || probe.num_classes() != expected->num_labels))
        throw IntegrityError("dataset " + probe.name + ": found " + std::to_string(probe.graphs.size()) +
                             " graphs / " + std::to_string(probe.num_classes()) + " labels, expected " +
                             std::to_string(expected->num_graphs) + " / " + std::to_string(expected->num_labels));
    }
    out.name = probe.name;
    out.graphs = std::move(probe.graphs);
  }
  if (out.graphs.empty()) throw InvalidInput("dataset " + out.name + " holds no graphs");
  out.ids.reserve(out.graphs.size());
  for (std::size_t i = 0; i < out.graphs.size(); ++i) out.ids.push_back(std::to_string(i + 1));
  return out;
}

ExperimentSplit split_experiment(const ExperimentConfig& cfg, const LoadedDataset& data) {
  ExperimentSplit s;
  s.split = split_dataset(data.graphs, cfg.split_a, cfg.split_b, cfg.split_c, derive_seed(cfg.seed, "split"));
  if (s.split.classifier_train.empty() || s.split.attacker_train.empty() || s.split.attacker_test.empty())
    throw ConfigError("dataset too small: a split part is empty");
  for (std::size_t i : s.split.attacker_test_index) s.test_ids.push_back(data.ids[i]);
  return s;
}

VictimTraining train_victim(const ExperimentConfig& cfg, const ExperimentSplit& split) {
  Rng rng(derive_seed(cfg.seed, "classifier"));
  ClassifierTrainResult r = train_classifier(split.split.classifier_train, classifier_config(cfg), cfg.classifier_train, rng);
  VictimTraining v;
  v.model = std::move(r.model);
  v.epoch_loss = std::move(r.epoch_loss);
  v.epoch_accuracy = std::move(r.epoch_accuracy);
  v.train_accuracy = accuracy(split.split.classifier_train, v.model);
  v.test_accuracy = accuracy(split.split.attacker_test, v.model);
  return v;
}

std::string policy_key(Variant v, const Budget& b) { return to_string(v) + "_" + b.tag(); }

std::vector<std::pair<Variant, Budget>> required_policies(const ExperimentConfig& cfg) {
  std::vector<std::pair<Variant, Budget>> out;
  auto has = [&](Variant v) { return std::find(cfg.variants.begin(), cfg.variants.end(), v) != cfg.variants.end(); };
  for (const auto& b : cfg.budgets) {
    for (Variant v : {Variant::ReWatt, Variant::ReWattA, Variant::ReWattN}) {
      const bool needed = has(v) || (v == Variant::ReWatt && has(Variant::RandomS));
      if (needed) out.emplace_back(v, b);
    }
  }
  return out;
}

AttackerTraining train_policies(const ExperimentConfig& cfg, const std::vector<Graph>& attacker_train,
                                const LabelOracle& oracle) {
  AttackerTraining out;
  for (const auto& [variant, budget] : required_policies(cfg)) {
    const std::string key = policy_key(variant, budget);
    Rng rng(derive_seed(cfg.seed, "attacker:" + key));
    AttackerTrainResult r = train_attacker(attacker_train, oracle, attack_config_for(variant, budget, cfg),
                                           attacker_config(cfg), rng);
    out.policies.emplace(key, std::move(r.model));
    out.curves.emplace(key, std::move(r.epoch_success_rate));
  }
  return out;
}

const SuccessRate& SuccessRateReport::rate(Variant v, const Budget& b) const {
  for (const auto& r : rates)
    if (r.variant == v && r.budget == b) return r;
  throw InvalidInput("no success rate for " + policy_key(v, b));
}

SuccessRateReport run_attack_suite(const ExperimentConfig& cfg, const std::vector<Graph>& test,
                                   const std::vector<std::string>& ids, const LabelOracle& oracle,
                                   const std::map<std::string, PolicyModel>& policies) {
  if (ids.size() != test.size()) throw InvalidInput("run_attack_suite: one id per test graph required");
  SuccessRateReport report;
  std::vector<int> original(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) original[i] = oracle(test[i]);

  std::vector<Variant> order;
  for (Variant v : {Variant::ReWatt, Variant::ReWattA, Variant::ReWattN, Variant::Random, Variant::RandomS}) {
    const bool asked = std::find(cfg.variants.begin(), cfg.variants.end(), v) != cfg.variants.end();
    const bool implied = v == Variant::ReWatt &&
                         std::find(cfg.variants.begin(), cfg.variants.end(), Variant::RandomS) != cfg.variants.end();
    if (asked || implied) order.push_back(v);
  }

  for (const auto& budget : cfg.budgets) {
    std::vector<int> rewatt_steps;
    for (Variant variant : order) {
      const AttackConfig acfg = attack_config_for(variant, budget, cfg);
      const PolicyModel* policy = nullptr;
      if (uses_policy(variant)) {
        auto it = policies.find(policy_key(variant, budget));
        if (it == policies.end()) throw ConfigError("missing policy checkpoint for " + policy_key(variant, budget));
        policy = &it->second;
        if (!test.empty() && policy->input_dim != node_features(test.front(), policy->config.features).cols())
          throw ConfigError("policy " + policy_key(variant, budget) + " expects a different feature width");
      }
      SuccessRate rate{variant, budget};
      const std::string stream = "attack:" + policy_key(variant, budget);
      for (std::size_t i = 0; i < test.size(); ++i) {
        Rng rng(derive_seed(cfg.seed, stream, i));
        const auto start = std::chrono::steady_clock::now();
        Trajectory t;
        if (variant == Variant::RandomS)
          t = random_s_attack(test[i], original[i], oracle, rewatt_steps.at(i), rng);
        else if (policy)
          t = run_episode(test[i], original[i], oracle, acfg, policy_chooser(*policy, acfg.third_node_mode,
                                         cfg.greedy_evaluation ? Decoding::Greedy : Decoding::Sample),
                          rng);
        else
          t = random_attack(test[i], original[i], oracle, acfg, rng);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (variant == Variant::ReWatt) rewatt_steps.push_back(t.num_steps());

        ++rate.total;
        if (t.outcome == Outcome::Success)
          ++rate.succeeded;
        else if (t.outcome == Outcome::NoValidAction)
          ++rate.no_valid_action;
        else
          ++rate.failed;
        report.records.push_back({i, ids[i], variant, budget, original[i], std::move(t), ms});
      }
      report.rates.push_back(rate);
    }
  }
  return report;
}

std::string attacks_csv(const SuccessRateReport& report) {
  std::string s = join({"graph_id", "variant", "budget", "K", "M", "outcome", "success", "oracle_queries"});
  for (const auto& r : report.records) {
    const Trajectory& t = r.trajectory;
    s += join({r.graph_id, to_string(r.variant), budget_column(r.budget), std::to_string(t.budget),
               std::to_string(t.num_steps()), to_string(t.outcome), t.success() ? "1" : "0",
               std::to_string(t.oracle_queries)});
  }
  return s;
}

std::string timing_csv(const SuccessRateReport& report) {
  std::string s = join({"graph_id", "variant", "budget", "wall_ms"});
  for (const auto& r : report.records)
    s += join({r.graph_id, to_string(r.variant), budget_column(r.budget), num(r.wall_ms)});
  return s;
}

std::string summary_csv(const SuccessRateReport& report) {
  std::string s = join({"variant", "budget", "total", "succeeded", "failed", "no_valid_action", "success_rate"});
  for (const auto& r : report.rates)
    s += join({to_string(r.variant), budget_column(r.budget), std::to_string(r.total), std::to_string(r.succeeded),
               std::to_string(r.failed), std::to_string(r.no_valid_action), num(r.rate())});
  return s;
}

std::string classifier_curve_csv(const VictimTraining& v) {
  std::string s = join({"epoch", "loss", "train_accuracy"});
  for (std::size_t e = 0; e < v.epoch_loss.size(); ++e)
    s += join({std::to_string(e + 1), num(v.epoch_loss[e]), num(v.epoch_accuracy[e])});
  return s;
}

std::string attacker_curve_csv(const AttackerTraining& a) {
  std::string s = join({"policy", "epoch", "train_success_rate"});
  for (const auto& [key, curve] : a.curves)
    for (std::size_t e = 0; e < curve.size(); ++e) s += join({key, std::to_string(e + 1), num(curve[e])});
  return s;
}

std::vector<AnalysisRow> analyze_suite(const SuccessRateReport& report, const std::vector<Graph>& test,
                                       const ClassifierModel& classifier) {
  std::vector<AnalysisRow> rows;
  for (const auto& r : report.records)
    rows.push_back({r.variant, r.budget, analyze_attack(r.graph_id, test.at(r.test_index), r.trajectory, classifier)});
  return rows;
}

std::string analysis_csv(const std::vector<AnalysisRow>& rows) {
  std::string s = join({"graph_id", "variant", "budget", "group", "outcome", "steps", "step_ratio", "rc", "kl",
                        "original_label", "attacked_label", "components_before", "components_after",
                        "r_lambda_mean", "r_lambda_defined"});
  for (const auto& row : rows) {
    const auto& r = row.record;
    double sum = 0;
    int defined = 0;
    for (const auto& v : r.r_lambda)
      if (v) {
        sum += *v;
        ++defined;
      }
    s += join({r.graph_id, to_string(row.variant), budget_column(row.budget),
               r.outcome == Outcome::Success ? "succeeded" : "failed", to_string(r.outcome), std::to_string(r.steps),
               num(r.step_ratio), num(r.rc), num(r.kl), std::to_string(r.original_label),
               std::to_string(r.attacked_label), std::to_string(r.components_before),
               std::to_string(r.components_after), defined ? num(sum / defined) : "", std::to_string(defined)});
  }
  return s;
}

std::vector<OperatorCase> operator_cases(const SuccessRateReport& report, const std::vector<Graph>& test,
                                         const Budget& budget) {
  std::vector<OperatorCase> cases;
  for (const auto& r : report.records) {
    if (r.variant != Variant::ReWatt || !(r.budget == budget) || r.trajectory.num_steps() == 0) continue;
    cases.push_back({r.graph_id, test.at(r.test_index), r.trajectory.final_graph, r.trajectory.num_steps()});
  }
  return cases;
}

std::string operator_comparison_csv(const OperatorComparison& c) {
  std::string s = join({"eigen_index", "defined_count", "mean_r_rewire", "mean_r_add_delete", "ratio"});
  for (std::size_t i = 0; i < c.ratio.size(); ++i)
    s += join({std::to_string(i + 1), std::to_string(c.defined_count[i]), num(c.mean_r_rewire[i]),
               num(c.mean_r_add_delete[i]), opt_num(c.ratio[i])});
  return s;
}

std::string operator_summary_csv(const OperatorComparison& c) {
  std::string s = join({"metric", "value"});
  s += join({"graphs_used", std::to_string(c.graphs_used)});
  s += join({"mean_components_clean", num(c.mean_components_clean)});
  s += join({"mean_components_rewired", num(c.mean_components_rewired)});
  s += join({"mean_components_add_delete", num(c.mean_components_add_delete)});
  s += join({"frac_more_disconnected_rewired", num(c.frac_more_disconnected_rewired)});
  s += join({"frac_more_disconnected_add_delete", num(c.frac_more_disconnected_add_delete)});
  s += join({"fraction_ratio_above_one", num(c.fraction_ratio_above_one())});
  return s;
}

SpectralCompareRow spectral_compare_row(const std::string& id, const std::string& op, const Graph& before,
                                        const Graph& after, int steps) {
  SpectralCompareRow row;
  row.graph_id = id;
  row.op = op;
  row.steps = steps;
  row.lambda2_before = algebraic_connectivity(before);
  row.lambda2_after = algebraic_connectivity(after);
  row.components_before = connected_components(before).count;
  row.components_after = connected_components(after).count;
  if (row.components_before == 1) row.re_before = effective_graph_resistance(before);
  if (row.components_after == 1) row.re_after = effective_graph_resistance(after);
  double sum = 0;
  for (const auto& v : eigenvalue_change_ratio(before, after)) {
    if (!v) continue;
    sum += *v;
    ++row.r_lambda_defined;
    row.r_lambda_max = std::max(row.r_lambda_max.value_or(*v), *v);
  }
  if (row.r_lambda_defined) row.r_lambda_mean = sum / row.r_lambda_defined;
  return row;
}

std::string spectral_compare_csv(const std::vector<SpectralCompareRow>& rows) {
  std::string s = join({"graph_id", "operator", "steps", "lambda2_before", "lambda2_after", "re_before", "re_after",
                        "components_before", "components_after", "r_lambda_mean", "r_lambda_max",
                        "r_lambda_defined"});
  for (const auto& r : rows)
    s += join({r.graph_id, r.op, std::to_string(r.steps), num(r.lambda2_before), num(r.lambda2_after),
               opt_num(r.re_before), opt_num(r.re_after), std::to_string(r.components_before),
               std::to_string(r.components_after), opt_num(r.r_lambda_mean), opt_num(r.r_lambda_max),
               std::to_string(r.r_lambda_defined)});
  return s;
}

void OutputSet::add(const std::string& relative_path, std::string content) {
  files_[relative_path] = std::move(content);
}

void OutputSet::commit(const fs::path& dir) const {
  for (const auto& [rel, content] : files_) {
    const fs::path target = dir / rel;
    fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + tmp.string());
      out << content;
      if (!out) throw ConfigError("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
  }
}

namespace {

using nlohmann::json;

struct Prepared {
  LoadedDataset data;
  ExperimentSplit split;
  std::shared_ptr<const ClassifierModel> classifier;
  std::map<std::string, PolicyModel> policies;
  json checkpoints = json::object();
  json stats = json::object();
};

fs::path classifier_path(const ExperimentConfig& cfg) {
  return cfg.classifier_checkpoint.empty() ? fs::path(cfg.out_dir) / "classifier.json"
                                           : fs::path(cfg.classifier_checkpoint);
}

fs::path policy_dir(const ExperimentConfig& cfg) {
  return cfg.policy_dir.empty() ? fs::path(cfg.out_dir) / "policies" : fs::path(cfg.policy_dir);
}

void prepare_classifier(const ExperimentConfig& cfg, Prepared& p, OutputSet& out, bool force_train) {
  const fs::path path = classifier_path(cfg);
  if (!force_train && fs::exists(path)) {
    p.classifier = std::make_shared<const ClassifierModel>(load_classifier(path));
    p.checkpoints["classifier"] = path.string();
    const auto width = node_features(p.split.split.attacker_test.front(), p.classifier->config.features).cols();
    if (p.classifier->input_dim != width)
      throw ConfigError("classifier checkpoint expects feature width " + std::to_string(p.classifier->input_dim) +
                        ", dataset provides " + std::to_string(width));
  } else {
    if (!force_train && !cfg.train_missing)
      throw ConfigError("missing classifier checkpoint " + path.string() + " (run train-classifier or set train_missing)");
    VictimTraining v = train_victim(cfg, p.split);
    out.add("classifier.json", classifier_to_json(v.model) + "\n");
    out.add("classifier_curve.csv", classifier_curve_csv(v));
    p.checkpoints["classifier"] = "classifier.json";
    p.classifier = std::make_shared<const ClassifierModel>(std::move(v.model));
  }
  p.stats["classifier_train_accuracy"] = accuracy(p.split.split.classifier_train, *p.classifier);
  p.stats["classifier_test_accuracy"] = accuracy(p.split.split.attacker_test, *p.classifier);
}

void prepare_policies(const ExperimentConfig& cfg, Prepared& p, OutputSet& out, bool force_train) {
  const LabelOracle oracle = make_label_oracle(p.classifier);
  std::vector<std::pair<Variant, Budget>> to_train;
  for (const auto& [variant, budget] : required_policies(cfg)) {
    const std::string key = policy_key(variant, budget);
    const fs::path path = policy_dir(cfg) / (key + ".json");
    if (!force_train && fs::exists(path)) {
      p.policies.emplace(key, load_policy(path));
      p.checkpoints["policies"][key] = path.string();
    } else if (force_train || cfg.train_missing) {
      to_train.emplace_back(variant, budget);
    } else {
      throw ConfigError("missing policy checkpoint " + path.string() + " (run train-attacker or set train_missing)");
    }
  }
  if (to_train.empty()) return;
  AttackerTraining trained;
  for (const auto& [variant, budget] : to_train) {
    const std::string key = policy_key(variant, budget);
    Rng rng(derive_seed(cfg.seed, "attacker:" + key));
    AttackerTrainResult r = train_attacker(p.split.split.attacker_train, oracle,
                                           attack_config_for(variant, budget, cfg), attacker_config(cfg), rng);
    out.add("policies/" + key + ".json", policy_to_json(r.model) + "\n");
    p.checkpoints["policies"][key] = "policies/" + key + ".json";
    trained.curves.emplace(key, std::move(r.epoch_success_rate));
    p.policies.emplace(key, std::move(r.model));
  }
  out.add("attacker_curve.csv", attacker_curve_csv(trained));
}

json seeds_json(const ExperimentConfig& cfg) {
  json s{{"master", cfg.seed},
         {"synthetic", derive_seed(cfg.seed, "synthetic")},
         {"split", derive_seed(cfg.seed, "split")},
         {"classifier", derive_seed(cfg.seed, "classifier")}};
  for (const auto& [variant, budget] : required_policies(cfg)) {
    const std::string key = policy_key(variant, budget);
    s["attacker"][key] = derive_seed(cfg.seed, "attacker:" + key);
  }
  return s;
}

}  // namespace

OutputSet run_command(const std::string& command, const ExperimentConfig& cfg) {
  static const std::vector<std::string> known{"gen-synth", "train-classifier", "train-attacker",
                                              "attack",    "analyze",          "spectral-compare"};
  if (std::find(known.begin(), known.end(), command) == known.end())
    throw ConfigError("unknown command '" + command + "'");
  cfg.validate();

  OutputSet out;
  Prepared p;
  p.data = load_experiment_dataset(cfg);
  json manifest{{"command", command}, {"config", config_to_map(cfg)}, {"seeds", seeds_json(cfg)},
                {"dataset", {{"name", p.data.name}, {"graphs", p.data.graphs.size()}}}};

  if (command == "gen-synth" && cfg.dataset != "synthetic") throw ConfigError("gen-synth requires dataset = synthetic");

  if (command == "gen-synth") {
    for (auto& [name, content] : render_tu_dataset(p.data.name, p.data.graphs))
      out.add("data/" + p.data.name + "/" + name, std::move(content));
  } else {
    p.split = split_experiment(cfg, p.data);
    manifest["split"] = {{"classifier_train", p.split.split.classifier_train.size()},
                         {"attacker_train", p.split.split.attacker_train.size()},
                         {"attacker_test", p.split.split.attacker_test.size()}};
    prepare_classifier(cfg, p, out, command == "train-classifier");
    if (command != "train-classifier") prepare_policies(cfg, p, out, command == "train-attacker");

    if (command == "attack" || command == "analyze" || command == "spectral-compare") {
      ExperimentConfig suite_cfg = cfg;
      if (command == "spectral-compare") suite_cfg.variants = {Variant::ReWatt};
      const LabelOracle oracle = make_label_oracle(p.classifier);
      const auto& test = p.split.split.attacker_test;
      const SuccessRateReport report = run_attack_suite(suite_cfg, test, p.split.test_ids, oracle, p.policies);
      json rates = json::array();
      for (const auto& r : report.rates)
        rates.push_back({{"variant", to_string(r.variant)}, {"budget", r.budget.tag()}, {"rate", r.rate()}});
      p.stats["success_rates"] = rates;

      if (command == "attack") {
        out.add("attacks.csv", attacks_csv(report));
        out.add("summary.csv", summary_csv(report));
        out.add("timing.csv", timing_csv(report));
      } else if (command == "analyze") {
        out.add("attacks.csv", attacks_csv(report));
        out.add("summary.csv", summary_csv(report));
        out.add("analysis.csv", analysis_csv(analyze_suite(report, test, *p.classifier)));
        for (const auto& budget : cfg.budgets) {
          const auto cases = operator_cases(report, test, budget);
          if (cases.empty()) continue;
          Rng rng(derive_seed(cfg.seed, "operators:" + budget.tag()));
          const OperatorComparison c = compare_operators(cases, rng);
          out.add("operator_comparison_" + budget.tag() + ".csv", operator_comparison_csv(c));
          out.add("operator_summary_" + budget.tag() + ".csv", operator_summary_csv(c));
        }
      } else {
        std::vector<SpectralCompareRow> rows;
        for (const auto& r : report.records) {
          if (r.trajectory.num_steps() == 0) continue;
          const Graph& g = test.at(r.test_index);
          Rng rng(derive_seed(cfg.seed, "spectral:" + r.budget.tag(), r.test_index));
          const AddDeleteResult da = random_add_delete(g, r.trajectory.num_steps(), rng);
          rows.push_back(spectral_compare_row(r.graph_id, "rewire", g, r.trajectory.final_graph,
                                              r.trajectory.num_steps()));
          rows.push_back(spectral_compare_row(r.graph_id, "add_delete", g, da.graph, da.applied));
        }
        out.add("spectral_compare.csv", spectral_compare_csv(rows));
      }
    }
  }

  manifest["checkpoints"] = p.checkpoints;
  manifest["stats"] = p.stats;
  json files = json::array();
  for (const auto& [rel, content] : out.files()) files.push_back(rel);
  manifest["outputs"] = files;
  out.add("manifest.json", manifest.dump(2) + "\n");
  return out;
}

}  // namespace rewire
