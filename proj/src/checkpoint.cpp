#include "rewire/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rewire {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_to_json(const Matrix& m) {
  json values = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(format_double(m(r, c)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", values}};
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  const auto rows = j.at("rows").get<long long>();
  const auto cols = j.at("cols").get<long long>();
  const auto& values = j.at("values");
  if (rows < 0 || cols < 0 || !values.is_array() || values.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError("checkpoint: " + what + " declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " but stores " + std::to_string(values.size()) + " values");
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, ++k) {
      const std::string s = values[k].get<std::string>();
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        throw ParseError("checkpoint: " + what + " holds non-numeric value '" + s + "'");
      }
      if (used != s.size() || !std::isfinite(v))
        throw ParseError("checkpoint: " + what + " holds invalid value '" + s + "'");
      m(r, c) = v;
    }
  }
  return m;
}

json mlp_to_json(const Mlp& mlp) {
  return {{"input_dim", mlp.input_dim()},
          {"hidden_dim", mlp.w1.cols()},
          {"output_dim", mlp.output_dim()},
          {"w1", matrix_to_json(mlp.w1)},
          {"b1", matrix_to_json(mlp.b1)},
          {"w2", matrix_to_json(mlp.w2)},
          {"b2", matrix_to_json(mlp.b2)}};
}

Mlp mlp_from_json(const json& j, const std::string& what) {
  Mlp m;
  m.w1 = matrix_from_json(j.at("w1"), what + ".w1");
  m.b1 = matrix_from_json(j.at("b1"), what + ".b1");
  m.w2 = matrix_from_json(j.at("w2"), what + ".w2");
  m.b2 = matrix_from_json(j.at("b2"), what + ".b2");
  if (m.input_dim() != j.at("input_dim").get<long long>() || m.w1.cols() != j.at("hidden_dim").get<long long>() ||
      m.output_dim() != j.at("output_dim").get<long long>())
    throw IntegrityError("checkpoint: " + what + " widths disagree with its weights");
  m.check();
  return m;
}

json parse_document(const std::string& text, const std::string& kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  if (!doc.is_object() || doc.value("kind", "") != kind)
    throw ParseError("checkpoint: expected a " + kind + " document");
  if (doc.value("version", 0) != kCheckpointVersion)
    throw ParseError("checkpoint: unsupported version " + doc.value("version", json()).dump());
  return doc;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  } catch (const InvalidInput& e) {
    throw IntegrityError(std::string("checkpoint: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << text << '\n';
}

}  // namespace

std::string classifier_to_json(const ClassifierModel& model) {
  model.validate();
  json layers = json::array();
  for (const auto& w : model.layer_weights) layers.push_back(matrix_to_json(w));
  json doc{{"version", kCheckpointVersion},
           {"kind", "classifier"},
           {"dims",
            {{"input_dim", model.input_dim},
             {"num_classes", model.num_classes},
             {"num_layers", model.config.num_layers},
             {"hidden_dim", model.config.hidden_dim},
             {"mlp_hidden_dim", model.config.mlp_hidden_dim}}},
           {"config", {{"self_loops", model.config.self_loops}, {"features", to_string(model.config.features)}}},
           {"layers", layers},
           {"head", mlp_to_json(model.head)}};
  return doc.dump(1);
}

ClassifierModel classifier_from_json(const std::string& text) {
  const json doc = parse_document(text, "classifier");
  return guarded([&] {
    ClassifierModel m;
    const auto& dims = doc.at("dims");
    m.input_dim = dims.at("input_dim").get<int>();
    m.num_classes = dims.at("num_classes").get<int>();
    m.config.num_layers = dims.at("num_layers").get<int>();
    m.config.hidden_dim = dims.at("hidden_dim").get<int>();
    m.config.mlp_hidden_dim = dims.at("mlp_hidden_dim").get<int>();
    m.config.self_loops = doc.at("config").at("self_loops").get<bool>();
    m.config.features = parse_feature_mode(doc.at("config").at("features").get<std::string>());
    const auto& layers = doc.at("layers");
    for (std::size_t i = 0; i < layers.size(); ++i)
      m.layer_weights.push_back(matrix_from_json(layers[i], "layers[" + std::to_string(i) + "]"));
    m.head = mlp_from_json(doc.at("head"), "head");
    m.validate();
    if (static_cast<int>(m.layer_weights.size()) != m.config.num_layers)
      throw InvalidInput("num_layers disagrees with the stored layers");
    return m;
  });
}

std::string policy_to_json(const PolicyModel& model) {
  model.validate();
  json layers = json::array();
  for (const auto& w : model.embedder) layers.push_back(matrix_to_json(w));
  json doc{{"version", kCheckpointVersion},
           {"kind", "policy"},
           {"dims", {{"input_dim", model.input_dim}, {"embed_dim", model.embed_dim()}}},
           {"config",
            {{"self_loops", model.config.self_loops},
             {"features", to_string(model.config.features)},
             {"third_uses_first_node", model.config.third_uses_first_node},
             {"zero_init_heads", model.config.zero_init_heads}}},
           {"embedder", layers},
           {"edge_head", mlp_to_json(model.edge_head)},
           {"first_head", mlp_to_json(model.first_head)},
           {"third_head", mlp_to_json(model.third_head)}};
  return doc.dump(1);
}

PolicyModel policy_from_json(const std::string& text) {
  const json doc = parse_document(text, "policy");
  return guarded([&] {
    PolicyModel m;
    m.input_dim = doc.at("dims").at("input_dim").get<int>();
    m.config.embed_dim = doc.at("dims").at("embed_dim").get<int>();
    const auto& cfg = doc.at("config");
    m.config.self_loops = cfg.at("self_loops").get<bool>();
    m.config.features = parse_feature_mode(cfg.at("features").get<std::string>());
    m.config.third_uses_first_node = cfg.at("third_uses_first_node").get<bool>();
    m.config.zero_init_heads = cfg.at("zero_init_heads").get<bool>();
    const auto& layers = doc.at("embedder");
    for (std::size_t i = 0; i < layers.size(); ++i)
      m.embedder.push_back(matrix_from_json(layers[i], "embedder[" + std::to_string(i) + "]"));
    m.edge_head = mlp_from_json(doc.at("edge_head"), "edge_head");
    m.first_head = mlp_from_json(doc.at("first_head"), "first_head");
    m.third_head = mlp_from_json(doc.at("third_head"), "third_head");
    m.validate();
    if (m.embed_dim() != m.config.embed_dim) throw InvalidInput("embed_dim disagrees with embedder weights");
    return m;
  });
}

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model) {
  write_file(path, classifier_to_json(model));
}
ClassifierModel load_classifier(const std::filesystem::path& path) { return classifier_from_json(read_file(path)); }
void save_policy(const std::filesystem::path& path, const PolicyModel& model) { write_file(path, policy_to_json(model)); }
PolicyModel load_policy(const std::filesystem::path& path) { return policy_from_json(read_file(path)); }

}  // namespace rewire
