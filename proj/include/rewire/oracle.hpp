#ifndef REWIRE_ORACLE_HPP
#define REWIRE_ORACLE_HPP

#include <functional>

#include "rewire/graph.hpp"

namespace rewire {

/// Black-box access to a victim model: a graph goes in, a class index comes out.
using LabelOracle = std::function<int(const Graph&)>;

}  // namespace rewire

#endif  // REWIRE_ORACLE_HPP
