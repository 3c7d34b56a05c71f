#ifndef REWIRE_FEATURES_HPP
#define REWIRE_FEATURES_HPP

#include <string>

#include "rewire/graph.hpp"

namespace rewire {

// Stored uses the graph's feature matrix as given. The other modes derive
// features from the current structure, so they follow every edit.
enum class FeatureMode { Stored, DegreeBuckets, ExactDegree, Constant };

std::string to_string(FeatureMode m);
FeatureMode parse_feature_mode(const std::string& name);

inline constexpr int kDegreeBuckets = 7;

/// Bucket index of a degree: [0], [1], [2], [3-4], [5-8], [9-16], [17+].
int degree_bucket(int degree);
Matrix degree_bucket_features(const Graph& g);

inline constexpr int kExactDegreeCap = 16;

/// One-hot of the exact degree, degrees >= 16 sharing the last column.
Matrix exact_degree_features(const Graph& g);

/// Features a model consumes for `g` under `mode`.
Matrix node_features(const Graph& g, FeatureMode mode);

/// Copy of `g` whose stored features are derived under `mode` (not Stored).
Graph with_synthesized_features(const Graph& g, FeatureMode mode);

}  // namespace rewire

#endif  // REWIRE_FEATURES_HPP
