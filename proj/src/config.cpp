#include "rewire/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace rewire {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why + " (got '" + value + "')");
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    bad(key, v, "expected an integer");
  }
  if (used != v.size()) bad(key, v, "expected an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  if (v.empty() || v[0] == '-') bad(key, v, "expected a non-negative integer");
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    bad(key, v, "expected a non-negative integer");
  }
  if (used != v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    bad(key, v, "expected a number");
  }
  if (used != v.size() || !std::isfinite(out)) bad(key, v, "expected a finite number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "expected true or false");
}

Budget parse_budget(const std::string& key, const std::string& v) {
  if (v.size() < 2 || (v[0] != 'p' && v[0] != 'k')) bad(key, v, "budgets look like p0.03 or k2");
  Budget b;
  if (v[0] == 'p') {
    b.mode = BudgetMode::Ratio;
    b.ratio = to_double(key, v.substr(1));
  } else {
    b.mode = BudgetMode::Fixed;
    b.k = static_cast<int>(to_int(key, v.substr(1)));
  }
  return b;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define REWIRE_INT(expr)                                                                                          \
  Field {                                                                                                         \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.expr = static_cast<int>(to_int(k, v)); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.expr); }                                          \
  }
#define REWIRE_DOUBLE(expr)                                                                                \
  Field {                                                                                                  \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.expr = to_double(k, v); },     \
        [](const ExperimentConfig& c) { return fmt(c.expr); }                                              \
  }
#define REWIRE_BOOL(expr)                                                                                  \
  Field {                                                                                                  \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.expr = to_bool(k, v); },       \
        [](const ExperimentConfig& c) { return std::string(c.expr ? "true" : "false"); }                   \
  }
#define REWIRE_STRING(expr)                                                                                \
  Field {                                                                                                  \
    [](ExperimentConfig& c, const std::string&, const std::string& v) { c.expr = v; },                    \
        [](const ExperimentConfig& c) { return c.expr; }                                                   \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table{
      {"seed", {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); },
                [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"split.a", REWIRE_INT(split_a)},
      {"split.b", REWIRE_INT(split_b)},
      {"split.c", REWIRE_INT(split_c)},
      {"dataset", REWIRE_STRING(dataset)},
      {"dataset.validate_known_stats", REWIRE_BOOL(validate_known_stats)},
      {"features",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "degree")
            c.synthetic.features = FeatureMode::DegreeBuckets;
          else if (v == "constant")
            c.synthetic.features = FeatureMode::Constant;
          else
            bad(k, v, "expected degree or constant");
        },
        [](const ExperimentConfig& c) { return to_string(c.synthetic.features); }}},
      {"features.recompute", REWIRE_BOOL(recompute_features)},
      {"synthetic.num_classes", REWIRE_INT(synthetic.num_classes)},
      {"synthetic.graphs_per_class", REWIRE_INT(synthetic.graphs_per_class)},
      {"synthetic.min_nodes", REWIRE_INT(synthetic.min_nodes)},
      {"synthetic.max_nodes", REWIRE_INT(synthetic.max_nodes)},
      {"synthetic.community_nodes", REWIRE_INT(synthetic.community_nodes)},
      {"synthetic.p_in_min", REWIRE_DOUBLE(synthetic.p_in_min)},
      {"synthetic.p_in_max", REWIRE_DOUBLE(synthetic.p_in_max)},
      {"synthetic.p_out", REWIRE_DOUBLE(synthetic.p_out)},
      {"classifier.num_layers", REWIRE_INT(classifier.num_layers)},
      {"classifier.hidden_dim", REWIRE_INT(classifier.hidden_dim)},
      {"classifier.mlp_hidden_dim", REWIRE_INT(classifier.mlp_hidden_dim)},
      {"classifier.self_loops", REWIRE_BOOL(classifier.self_loops)},
      {"classifier.epochs", REWIRE_INT(classifier_train.epochs)},
      {"classifier.batch_size", REWIRE_INT(classifier_train.batch_size)},
      {"classifier.learning_rate", REWIRE_DOUBLE(classifier_train.learning_rate)},
      {"classifier.momentum", REWIRE_DOUBLE(classifier_train.momentum)},
      {"attacker.epochs", REWIRE_INT(attacker.epochs)},
      {"attacker.batch_episodes", REWIRE_INT(attacker.batch_episodes)},
      {"attacker.learning_rate", REWIRE_DOUBLE(attacker.update.learning_rate)},
      {"attacker.clip_norm", REWIRE_DOUBLE(attacker.update.clip_norm)},
      {"attacker.embed_dim", REWIRE_INT(attacker.policy.embed_dim)},
      {"attacker.self_loops", REWIRE_BOOL(attacker.policy.self_loops)},
      {"attacker.third_uses_first_node", REWIRE_BOOL(attacker.policy.third_uses_first_node)},
      {"attacker.features",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          try {
            c.attacker.policy.features = parse_feature_mode(v);
          } catch (const InvalidInput& e) {
            bad(k, v, e.what());
          }
        },
        [](const ExperimentConfig& c) { return to_string(c.attacker.policy.features); }}},
      {"attacker.zero_init_heads", REWIRE_BOOL(attacker.policy.zero_init_heads)},
      {"attack.fixed_penalty", REWIRE_DOUBLE(fixed_penalty)},
      {"attack.greedy", REWIRE_BOOL(greedy_evaluation)},
      {"attack.variants",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.variants.clear();
          for (const auto& item : split_list(v)) {
            try {
              c.variants.push_back(parse_variant(item));
            } catch (const Error& e) {
              bad(k, v, e.what());
            }
          }
        },
        [](const ExperimentConfig& c) {
          std::string s;
          for (auto v : c.variants) s += (s.empty() ? "" : ",") + to_string(v);
          return s;
        }}},
      {"attack.budgets",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.budgets.clear();
          for (const auto& item : split_list(v)) c.budgets.push_back(parse_budget(k, item));
        },
        [](const ExperimentConfig& c) {
          std::string s;
          for (const auto& b : c.budgets) s += (s.empty() ? "" : ",") + b.tag();
          return s;
        }}},
      {"out", REWIRE_STRING(out_dir)},
      {"checkpoint.classifier", REWIRE_STRING(classifier_checkpoint)},
      {"checkpoint.policy_dir", REWIRE_STRING(policy_dir)},
      {"train_missing", REWIRE_BOOL(train_missing)},
  };
  return table;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text, const std::string& origin) {
  ConfigMap out;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::ReWatt: return "rewatt";
    case Variant::ReWattA: return "rewatt-a";
    case Variant::ReWattN: return "rewatt-n";
    case Variant::Random: return "random";
    case Variant::RandomS: return "random-s";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (auto v : {Variant::ReWatt, Variant::ReWattA, Variant::ReWattN, Variant::Random, Variant::RandomS})
    if (to_string(v) == name) return v;
  throw ConfigError("unknown variant '" + name + "' (rewatt, rewatt-a, rewatt-n, random, random-s)");
}

bool uses_policy(Variant v) { return v == Variant::ReWatt || v == Variant::ReWattA || v == Variant::ReWattN; }

std::string Budget::tag() const {
  if (mode == BudgetMode::Fixed) return "k" + std::to_string(k);
  char buf[40];
  std::snprintf(buf, sizeof buf, "p%g", ratio);
  return buf;
}

void ExperimentConfig::validate() const {
  if (split_a <= 0 || split_b <= 0 || split_c <= 0 || split_a + split_b + split_c != 100)
    throw ConfigError("split ratios must be positive and sum to 100 (got " + std::to_string(split_a) + "/" +
                      std::to_string(split_b) + "/" + std::to_string(split_c) + ")");
  if (dataset.empty()) throw ConfigError("dataset must be 'synthetic' or a directory");
  if (dataset == "synthetic") {
    try {
      synthetic.validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  }
  if (classifier.num_layers < 1 || classifier.hidden_dim < 1 || classifier.mlp_hidden_dim < 1)
    throw ConfigError("classifier widths and layer count must be positive");
  if (classifier_train.epochs < 1 || classifier_train.batch_size < 1)
    throw ConfigError("classifier epochs and batch size must be >= 1");
  if (!(classifier_train.learning_rate > 0) || classifier_train.momentum < 0 || classifier_train.momentum >= 1)
    throw ConfigError("classifier learning rate must be positive and momentum in [0, 1)");
  if (attacker.epochs < 1 || attacker.batch_episodes < 1 || attacker.policy.embed_dim < 1)
    throw ConfigError("attacker epochs, batch_episodes and embed_dim must be >= 1");
  if (!(attacker.update.learning_rate > 0) || !(attacker.update.clip_norm > 0))
    throw ConfigError("attacker learning rate and clip norm must be positive");
  if (!(fixed_penalty < 0)) throw ConfigError("attack.fixed_penalty must be negative");
  if (variants.empty()) throw ConfigError("no attack variants requested");
  if (budgets.empty()) throw ConfigError("no attack budgets requested");
  for (const auto& b : budgets) {
    if (b.mode == BudgetMode::Ratio && !(b.ratio > 0 && b.ratio <= 1))
      throw ConfigError("budget ratio must lie in (0, 1], got " + b.tag());
    if (b.mode == BudgetMode::Fixed && b.k < 1) throw ConfigError("fixed budget must be >= 1, got " + b.tag());
  }
}

ExperimentConfig apply_config(ExperimentConfig base, const ConfigMap& values) {
  const auto& table = fields();
  for (const auto& [key, value] : values) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(base, key, value);
  }
  return base;
}

ConfigMap config_to_map(const ExperimentConfig& cfg) {
  ConfigMap out;
  for (const auto& [key, field] : fields()) out[key] = field.get(cfg);
  return out;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string s;
  for (const auto& [key, value] : config_to_map(cfg)) s += key + " = " + value + "\n";
  return s;
}

ClassifierConfig classifier_config(const ExperimentConfig& cfg) {
  ClassifierConfig c = cfg.classifier;
  c.features = cfg.recompute_features ? cfg.synthetic.features : FeatureMode::Stored;
  return c;
}

AttackerTrainConfig attacker_config(const ExperimentConfig& cfg) { return cfg.attacker; }

AttackConfig attack_config_for(Variant v, const Budget& b, const ExperimentConfig& cfg) {
  AttackConfig a;
  a.budget_mode = b.mode;
  a.ratio = b.ratio;
  a.fixed_k = b.k;
  a.third_node_mode = v == Variant::ReWattA ? ThirdNodeMode::AnyNode : ThirdNodeMode::TwoHop;
  a.penalty_mode = v == Variant::ReWattN ? PenaltyMode::Fixed : PenaltyMode::Flexible;
  a.fixed_penalty = cfg.fixed_penalty;
  return a;
}

}  // namespace rewire
