#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetmine/bayes.hpp"
#include "tweetmine/corpus.hpp"
#include "tweetmine/features.hpp"
#include "tweetmine/graph.hpp"
#include "tweetmine/lasso.hpp"
#include "tweetmine/patterns.hpp"
#include "tweetmine/rl.hpp"

namespace tweetmine {

// Invalid or missing configuration; the message names the offending key.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config error: " + key + ": " + what), key(key) {}
  std::string key;
};

struct PipelineConfig {
  // corpus
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::jsonl;
  TokenizerConfig tokenizer;
  std::vector<std::string> thematic_field;

  // graph
  std::set<EdgeKind> edge_kinds{EdgeKind::mention, EdgeKind::retweet};
  int walktrap_t = 4;
  double isolation_cutoff = 0.25;
  double pagerank_damping = 0.85;
  double pagerank_tol = 1e-10;
  int pagerank_max_iter = 1000;
  double hits_tol = 1e-10;
  int hits_max_iter = 1000;

  // layout
  double layout_width = 100.0;
  double layout_height = 100.0;
  int layout_iterations = 500;

  // itemsets / rules
  double min_support = 0.01;
  double min_confidence = 0.5;
  int rule_groups = 5;

  // series
  std::vector<std::string> series_keywords;  // empty -> thematic field
  std::string normalization = "zscore";      // none | zscore | minmax
  std::vector<int> lags{0, 1, 2};

  // prices / predictive models
  std::string price_path;
  int horizon = 1;
  int lambda_grid_size = 20;
  double lambda_min_ratio = 1e-3;
  int cv_folds = 5;
  double lasso_tol = 1e-9;
  int lasso_max_iter = 100000;

  PriorSpec prior;
  McmcConfig mcmc;

  QHyperparams rl;
  double transaction_cost = 0.0;

  std::string output_dir = "out";
  std::uint64_t seed = 42;

  std::string base_dir;  // directory relative paths resolve against

  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::string& base_dir);
  static PipelineConfig from_file(const std::string& path);

  std::string resolve(const std::string& path) const;
};

// Stage names in dependency order, as exposed by the CLI.
const std::vector<std::string>& stage_names();

// Runs one stage (or "all"), writing the stage's artifact files into the
// output directory and upserting their hashes into manifest.json. Returns
// the artifact file names written. Logs go to `log`.
std::vector<std::string> run_stage(const PipelineConfig& cfg,
                                   const std::string& stage,
                                   std::ostream& log);

// Artifact names a full run is expected to produce, keyed by stage.
std::vector<std::string> expected_artifacts(const std::string& stage);

}  // namespace tweetmine
