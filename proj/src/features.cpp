#include "rewire/features.hpp"

#include <algorithm>

namespace rewire {

std::string to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::Stored: return "stored";
    case FeatureMode::DegreeBuckets: return "degree";
    case FeatureMode::ExactDegree: return "exact-degree";
    case FeatureMode::Constant: return "constant";
  }
  return "?";
}

FeatureMode parse_feature_mode(const std::string& name) {
  for (auto m : {FeatureMode::Stored, FeatureMode::DegreeBuckets, FeatureMode::ExactDegree, FeatureMode::Constant})
    if (to_string(m) == name) return m;
  throw InvalidInput("unknown feature mode '" + name + "' (stored, degree, exact-degree, constant)");
}

int degree_bucket(int degree) {
  if (degree <= 2) return std::max(degree, 0);
  if (degree <= 4) return 3;
  if (degree <= 8) return 4;
  if (degree <= 16) return 5;
  return 6;
}

Matrix degree_bucket_features(const Graph& g) {
  Matrix x = Matrix::Zero(g.num_nodes(), kDegreeBuckets);
  for (NodeId v = 0; v < g.num_nodes(); ++v) x(v, degree_bucket(g.degree(v))) = 1.0;
  return x;
}

Matrix exact_degree_features(const Graph& g) {
  Matrix x = Matrix::Zero(g.num_nodes(), kExactDegreeCap + 1);
  for (NodeId v = 0; v < g.num_nodes(); ++v) x(v, std::min(g.degree(v), kExactDegreeCap)) = 1.0;
  return x;
}

Matrix node_features(const Graph& g, FeatureMode mode) {
  switch (mode) {
    case FeatureMode::Stored: return g.features();
    case FeatureMode::DegreeBuckets: return degree_bucket_features(g);
    case FeatureMode::ExactDegree: return exact_degree_features(g);
    case FeatureMode::Constant: return Matrix::Ones(g.num_nodes(), 1);
  }
  return g.features();
}

Graph with_synthesized_features(const Graph& g, FeatureMode mode) {
  if (mode == FeatureMode::Stored) throw InvalidInput("with_synthesized_features: needs degree or constant");
  return g.with_features(node_features(g, mode));
}

}  // namespace rewire
