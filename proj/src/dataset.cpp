#include "rewire/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rewire/random.hpp"

namespace fs = std::filesystem;

namespace rewire {

namespace {

struct LineReader {
  fs::path path;
  std::ifstream in;
  std::size_t line_no = 0;

  explicit LineReader(fs::path p) : path(std::move(p)), in(path) {
    if (!in) throw ParseError("cannot open " + path.string());
  }
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  }
};

long long parse_integer(LineReader& r, const std::string& token) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &used);
  } catch (const std::exception&) {
    r.fail("expected an integer, got '" + token + "'");
  }
  if (token.find_first_not_of(" \t", used) != std::string::npos) r.fail("trailing characters in '" + token + "'");
  return v;
}

fs::path find_file(const fs::path& dir, const std::string& suffix, std::string& name) {
  if (!fs::is_directory(dir)) throw ParseError("dataset directory not found: " + dir.string());
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string fname = entry.path().filename().string();
    if (fname.size() > suffix.size() && fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0)
      hits.push_back(entry.path());
  }
  if (hits.empty()) throw ParseError("missing *" + suffix + " in " + dir.string());
  if (hits.size() > 1) throw ParseError("ambiguous: several *" + suffix + " files in " + dir.string());
  const std::string fname = hits.front().filename().string();
  const std::string stem = fname.substr(0, fname.size() - suffix.size());
  if (!name.empty() && stem != name) throw IntegrityError("dataset files carry different prefixes: " + name + " vs " + stem);
  name = stem;
  return hits.front();
}

}  // namespace

std::optional<DatasetStats> known_dataset_stats(const std::string& name) {
  static const std::map<std::string, DatasetStats> table{
      {"REDDIT-MULTI-12K", {11929, 12}},
      {"REDDIT-MULTI-5K", {4999, 5}},
      {"IMDB-MULTI", {1500, 3}},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

TuDataset load_tu_dataset(const fs::path& dir, FeatureMode features, std::optional<DatasetStats> expected) {
  TuDataset ds;
  const fs::path indicator_path = find_file(dir, "_graph_indicator.txt", ds.name);
  const fs::path labels_path = find_file(dir, "_graph_labels.txt", ds.name);
  const fs::path edges_path = find_file(dir, "_A.txt", ds.name);

  // Node -> graph.
  std::vector<long long> graph_of;
  {
    LineReader r(indicator_path);
    std::string line;
    while (r.next(line)) {
      const long long gid = parse_integer(r, line);
      if (gid < 1) r.fail("graph id must be >= 1");
      if (!graph_of.empty() && gid < graph_of.back()) r.fail("graph indicator is not sorted by graph id");
      if (!graph_of.empty() && gid > graph_of.back() + 1) r.fail("graph id skips from " + std::to_string(graph_of.back()));
      if (graph_of.empty() && gid != 1) r.fail("first graph id must be 1");
      graph_of.push_back(gid);
    }
  }
  const std::size_t num_graphs = graph_of.empty() ? 0 : static_cast<std::size_t>(graph_of.back());

  std::vector<long long> raw;
  {
    LineReader r(labels_path);
    std::string line;
    while (r.next(line)) raw.push_back(parse_integer(r, line));
  }
  if (raw.size() != num_graphs)
    throw IntegrityError(labels_path.string() + ": " + std::to_string(raw.size()) + " labels for " +
                         std::to_string(num_graphs) + " graphs in the indicator file");

  std::vector<std::size_t> first_node(num_graphs + 1, 0);
  for (std::size_t v = graph_of.size(); v-- > 0;) first_node[static_cast<std::size_t>(graph_of[v] - 1)] = v;
  first_node[num_graphs] = graph_of.size();

  std::vector<std::vector<Edge>> edges(num_graphs);
  {
    LineReader r(edges_path);
    std::string line;
    while (r.next(line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) r.fail("expected 'i, j'");
      const long long a = parse_integer(r, line.substr(0, comma));
      const long long b = parse_integer(r, line.substr(comma + 1));
      if (a < 1 || b < 1 || a > static_cast<long long>(graph_of.size()) || b > static_cast<long long>(graph_of.size()))
        r.fail("node id out of range");
      const long long ga = graph_of[static_cast<std::size_t>(a - 1)];
      const long long gb = graph_of[static_cast<std::size_t>(b - 1)];
      if (ga != gb)
        throw IntegrityError(edges_path.string() + ":" + std::to_string(r.line_no) + ": edge joins graphs " +
                             std::to_string(ga) + " and " + std::to_string(gb));
      if (a == b) continue;
      const auto base = static_cast<long long>(first_node[static_cast<std::size_t>(ga - 1)]);
      edges[static_cast<std::size_t>(ga - 1)].push_back(
          make_edge(static_cast<NodeId>(a - 1 - base), static_cast<NodeId>(b - 1 - base)));
    }
  }

  std::vector<long long> distinct = raw;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  ds.raw_labels = distinct;

  ds.graphs.reserve(num_graphs);
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    auto& list = edges[gi];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    const int label = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), raw[gi]) - distinct.begin());
    const int n = static_cast<int>(first_node[gi + 1] - first_node[gi]);
    ds.graphs.push_back(with_synthesized_features(Graph(n, std::move(list), {}, label), features));
  }

  if (expected) {
    if (ds.graphs.size() != expected->num_graphs || ds.num_classes() != expected->num_labels)
      throw IntegrityError("dataset " + ds.name + ": found " + std::to_string(ds.graphs.size()) + " graphs / " +
                           std::to_string(ds.num_classes()) + " labels, expected " +
                           std::to_string(expected->num_graphs) + " / " + std::to_string(expected->num_labels));
  }
  return ds;
}

std::map<std::string, std::string> render_tu_dataset(const std::string& name, const std::vector<Graph>& graphs) {
  std::ostringstream a, ind, lab;
  long long offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi];
    for (int v = 0; v < g.num_nodes(); ++v) ind << gi + 1 << '\n';
    for (const auto& e : g.edges()) {
      a << offset + e.u + 1 << ", " << offset + e.v + 1 << '\n';
      a << offset + e.v + 1 << ", " << offset + e.u + 1 << '\n';
    }
    lab << g.label().value_or(0) << '\n';
    offset += g.num_nodes();
  }
  return {{name + "_A.txt", a.str()}, {name + "_graph_indicator.txt", ind.str()}, {name + "_graph_labels.txt", lab.str()}};
}

void write_tu_dataset(const fs::path& dir, const std::string& name, const std::vector<Graph>& graphs) {
  fs::create_directories(dir);
  for (const auto& [file, content] : render_tu_dataset(name, graphs)) {
    std::ofstream out(dir / file);
    if (!out) throw ConfigError("cannot write " + (dir / file).string());
    out << content;
  }
}

void SyntheticSpec::validate() const {
  if (num_classes < 2) throw InvalidInput("synthetic: need at least 2 classes");
  if (graphs_per_class < 1) throw InvalidInput("synthetic: graphs_per_class must be positive");
  if (min_nodes < 2 || max_nodes < min_nodes) throw InvalidInput("synthetic: invalid node range");
  if (community_nodes > min_nodes) throw InvalidInput("synthetic: community_nodes exceeds min_nodes");
  if (!(p_in_min >= 0 && p_in_min <= p_in_max && p_in_max <= 1)) throw InvalidInput("synthetic: invalid p_in range");
  if (!(p_out >= 0 && p_out <= 1)) throw InvalidInput("synthetic: p_out must be a probability");
  if (features == FeatureMode::Stored) throw InvalidInput("synthetic: features must be degree or constant");
  if (community_nodes < 2 * num_classes)
    throw InvalidInput("synthetic: " + std::to_string(community_nodes) + " community nodes cannot host " +
                       std::to_string(num_classes) + " communities of at least 2 nodes");
}

std::vector<Graph> gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<Graph> out;
  const int total = spec.num_classes * spec.graphs_per_class;
  out.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    const int cls = i % spec.num_classes;
    Rng rng(derive_seed(seed, "synthetic", static_cast<std::uint64_t>(i)));
    const int n = std::uniform_int_distribution<int>(spec.min_nodes, spec.max_nodes)(rng);
    const double p_in = std::uniform_real_distribution<double>(spec.p_in_min, spec.p_in_max)(rng);
    std::vector<NodeId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    const int communities = cls + 1;
    const int dense = spec.community_nodes;
    std::vector<int> group(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < dense; ++k) group[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = k % communities;

    std::bernoulli_distribution in(p_in), out_edge(spec.p_out);
    std::vector<Edge> edges;
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        const int ga = group[static_cast<std::size_t>(a)];
        const bool same = ga >= 0 && ga == group[static_cast<std::size_t>(b)];
        if (same ? in(rng) : out_edge(rng)) {
          edges.push_back({a, b});
          ++degree[static_cast<std::size_t>(a)];
          ++degree[static_cast<std::size_t>(b)];
        }
      }
    }
    for (NodeId a = 0; a < n; ++a) {
      if (degree[static_cast<std::size_t>(a)] > 0) continue;
      NodeId b = a;
      while (b == a) b = static_cast<NodeId>(uniform_index(rng, static_cast<std::size_t>(n)));
      edges.push_back(make_edge(a, b));
      ++degree[static_cast<std::size_t>(a)];
      ++degree[static_cast<std::size_t>(b)];
    }
    out.push_back(with_synthesized_features(Graph(n, std::move(edges), {}, cls), spec.features));
  }
  return out;
}

DatasetSplit split_dataset(const std::vector<Graph>& graphs, int a, int b, int c, std::uint64_t seed) {
  if (a <= 0 || b <= 0 || c <= 0 || a + b + c != 100)
    throw InvalidInput("split ratios must be positive and sum to 100 (got " + std::to_string(a) + "/" +
                       std::to_string(b) + "/" + std::to_string(c) + ")");
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "split"));
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n = graphs.size();
  const auto na = static_cast<std::size_t>(std::lround(static_cast<double>(n) * a / 100.0));
  const auto nb = std::min(n - na, static_cast<std::size_t>(std::lround(static_cast<double>(n) * b / 100.0)));
  DatasetSplit s;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (k < na) {
      s.classifier_train.push_back(graphs[i]);
      s.classifier_train_index.push_back(i);
    } else if (k < na + nb) {
      s.attacker_train.push_back(graphs[i]);
      s.attacker_train_index.push_back(i);
    } else {
      s.attacker_test.push_back(graphs[i]);
      s.attacker_test_index.push_back(i);
    }
  }
  return s;
}

}  // namespace rewire
