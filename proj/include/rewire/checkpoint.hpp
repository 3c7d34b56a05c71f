#ifndef REWIRE_CHECKPOINT_HPP
#define REWIRE_CHECKPOINT_HPP

#include <filesystem>
#include <string>

#include "rewire/classifier.hpp"
#include "rewire/policy.hpp"

// JSON checkpoints. Weights are stored row-major as decimal strings with
// enough digits to round-trip doubles exactly.
namespace rewire {

inline constexpr int kCheckpointVersion = 1;

std::string classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const std::string& text);
std::string policy_to_json(const PolicyModel& model);
PolicyModel policy_from_json(const std::string& text);

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_classifier(const std::filesystem::path& path);
void save_policy(const std::filesystem::path& path, const PolicyModel& model);
PolicyModel load_policy(const std::filesystem::path& path);

}  // namespace rewire

#endif  // REWIRE_CHECKPOINT_HPP
