#include "tweetmine/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tweetmine/dates.hpp"
#include "tweetmine/rng.hpp"
#include "tweetmine/util.hpp"

namespace fs = std::filesystem;

namespace tweetmine {

namespace {

using nlohmann::json;

const json* find_path(const json& j, const std::string& dotted) {
  const json* cur = &j;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string part =
        dotted.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(part);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  const json* v = find_path(j, key);
  if (!v || v->is_null()) return fallback;
  try {
    return v->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "unexpected value type");
  }
}

std::string stage_substream(const std::string& stage) { return "stage:" + stage; }

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j,
                                         const std::string& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;

  c.corpus_path = get_or<std::string>(j, "corpus.path", "");
  const auto format = get_or<std::string>(j, "corpus.format", "jsonl");
  if (format == "jsonl")
    c.corpus_format = CorpusFormat::jsonl;
  else if (format == "csv")
    c.corpus_format = CorpusFormat::csv;
  else
    throw ConfigError("corpus.format", "must be 'jsonl' or 'csv'");

  for (auto& w :
       get_or<std::vector<std::string>>(j, "tokenizer.stopwords", {}))
    c.tokenizer.stopwords.insert(ascii_lower(w));
  c.tokenizer.min_token_len = get_or<int>(j, "tokenizer.min_token_len", 2);
  if (c.tokenizer.min_token_len < 1)
    throw ConfigError("tokenizer.min_token_len", "must be >= 1");
  c.tokenizer.strip_urls = get_or<bool>(j, "tokenizer.strip_urls", true);
  c.tokenizer.strip_mentions_from_tokens =
      get_or<bool>(j, "tokenizer.strip_mentions_from_tokens", true);

  for (auto& w : get_or<std::vector<std::string>>(j, "thematic_field", {})) {
    const auto lw = ascii_lower(w);
    if (lw.empty() || contains_whitespace(lw))
      throw ConfigError("thematic_field", "terms must be nonempty words");
    c.thematic_field.push_back(lw);
  }

  c.edge_kinds.clear();
  for (auto& k : get_or<std::vector<std::string>>(
           j, "graph.edge_kinds", {"mention", "retweet"})) {
    if (k == "mention")
      c.edge_kinds.insert(EdgeKind::mention);
    else if (k == "retweet")
      c.edge_kinds.insert(EdgeKind::retweet);
    else
      throw ConfigError("graph.edge_kinds", "unknown kind '" + k + "'");
  }
  if (c.edge_kinds.empty())
    throw ConfigError("graph.edge_kinds", "must be nonempty");
  c.walktrap_t = get_or<int>(j, "graph.walktrap_t", 4);
  if (c.walktrap_t < 1) throw ConfigError("graph.walktrap_t", "must be >= 1");
  c.isolation_cutoff = get_or<double>(j, "graph.isolation_cutoff", 0.25);
  c.pagerank_damping = get_or<double>(j, "graph.pagerank_damping", 0.85);
  if (!(c.pagerank_damping > 0.0 && c.pagerank_damping < 1.0))
    throw ConfigError("graph.pagerank_damping", "must be in (0,1)");
  c.pagerank_tol = get_or<double>(j, "graph.pagerank_tol", 1e-10);
  c.pagerank_max_iter = get_or<int>(j, "graph.pagerank_max_iter", 1000);
  c.hits_tol = get_or<double>(j, "graph.hits_tol", 1e-10);
  c.hits_max_iter = get_or<int>(j, "graph.hits_max_iter", 1000);

  c.layout_width = get_or<double>(j, "layout.width", 100.0);
  c.layout_height = get_or<double>(j, "layout.height", 100.0);
  if (c.layout_width <= 0 || c.layout_height <= 0)
    throw ConfigError("layout.width", "frame must be positive");
  c.layout_iterations = get_or<int>(j, "layout.iterations", 500);

  c.min_support = get_or<double>(j, "itemsets.min_support", 0.01);
  if (!(c.min_support > 0.0 && c.min_support <= 1.0))
    throw ConfigError("itemsets.min_support", "must be in (0,1]");
  c.min_confidence = get_or<double>(j, "itemsets.min_confidence", 0.5);
  if (!(c.min_confidence > 0.0 && c.min_confidence <= 1.0))
    throw ConfigError("itemsets.min_confidence", "must be in (0,1]");
  c.rule_groups = get_or<int>(j, "itemsets.rule_groups", 5);
  if (c.rule_groups < 1)
    throw ConfigError("itemsets.rule_groups", "must be >= 1");

  for (auto& w : get_or<std::vector<std::string>>(j, "series.keywords", {}))
    c.series_keywords.push_back(ascii_lower(w));
  c.normalization = get_or<std::string>(j, "series.normalization", "zscore");
  if (c.normalization != "none" && c.normalization != "zscore" &&
      c.normalization != "minmax")
    throw ConfigError("series.normalization",
                      "must be 'none', 'zscore' or 'minmax'");
  c.lags = get_or<std::vector<int>>(j, "series.lags", {0, 1, 2});
  if (c.lags.empty()) throw ConfigError("series.lags", "must be nonempty");
  for (int l : c.lags)
    if (l < 0) throw ConfigError("series.lags", "lags must be >= 0");

  c.price_path = get_or<std::string>(j, "prices.path", "");
  c.horizon = get_or<int>(j, "model.horizon", 1);
  if (c.horizon < 0) throw ConfigError("model.horizon", "must be >= 0");
  c.lambda_grid_size = get_or<int>(j, "model.lambda_grid_size", 20);
  if (c.lambda_grid_size < 1)
    throw ConfigError("model.lambda_grid_size", "must be >= 1");
  c.lambda_min_ratio = get_or<double>(j, "model.lambda_min_ratio", 1e-3);
  if (!(c.lambda_min_ratio > 0.0 && c.lambda_min_ratio <= 1.0))
    throw ConfigError("model.lambda_min_ratio", "must be in (0,1]");
  c.cv_folds = get_or<int>(j, "model.cv_folds", 5);
  if (c.cv_folds < 2) throw ConfigError("model.cv_folds", "must be >= 2");
  c.lasso_tol = get_or<double>(j, "model.lasso_tol", 1e-9);
  c.lasso_max_iter = get_or<int>(j, "model.lasso_max_iter", 100000);

  const auto coef_prior = get_or<std::string>(j, "bayes.coef_prior", "gaussian");
  if (coef_prior == "gaussian")
    c.prior.coef_prior = CoefPrior::gaussian;
  else if (coef_prior == "laplace")
    c.prior.coef_prior = CoefPrior::laplace;
  else
    throw ConfigError("bayes.coef_prior", "must be 'gaussian' or 'laplace'");
  c.prior.coef_scale = get_or<double>(j, "bayes.coef_scale", 1.0);
  c.prior.intercept_scale = get_or<double>(j, "bayes.intercept_scale", 10.0);
  c.prior.sigma_scale = get_or<double>(j, "bayes.sigma_scale", 1.0);
  if (c.prior.coef_scale <= 0 || c.prior.intercept_scale <= 0 ||
      c.prior.sigma_scale <= 0)
    throw ConfigError("bayes.coef_scale", "prior scales must be positive");
  const auto likelihood = get_or<std::string>(j, "bayes.likelihood", "gaussian");
  if (likelihood == "gaussian")
    c.prior.likelihood = Likelihood::gaussian;
  else if (likelihood == "student_t")
    c.prior.likelihood = Likelihood::student_t;
  else
    throw ConfigError("bayes.likelihood", "must be 'gaussian' or 'student_t'");
  if (const json* nu = find_path(j, "bayes.nu"); nu && !nu->is_null()) {
    if (!nu->is_number() || nu->get<double>() <= 2)
      throw ConfigError("bayes.nu", "must be a number > 2");
    c.prior.nu_fixed = nu->get<double>();
  }
  c.prior.nu_exp_rate = get_or<double>(j, "bayes.nu_rate", 1.0 / 29.0);
  c.mcmc.chains = get_or<int>(j, "bayes.chains", 4);
  c.mcmc.iterations = get_or<int>(j, "bayes.iterations", 3000);
  c.mcmc.burn_in = get_or<int>(j, "bayes.burn_in", 1000);
  c.mcmc.thin = get_or<int>(j, "bayes.thin", 1);
  if (c.mcmc.chains < 2) throw ConfigError("bayes.chains", "must be >= 2");
  if (c.mcmc.burn_in < 0 || c.mcmc.burn_in >= c.mcmc.iterations)
    throw ConfigError("bayes.burn_in", "must be < bayes.iterations");
  if (c.mcmc.thin < 1 ||
      (c.mcmc.iterations - c.mcmc.burn_in) % c.mcmc.thin != 0)
    throw ConfigError("bayes.thin", "must divide iterations - burn_in");

  c.rl.episodes = get_or<int>(j, "rl.episodes", 300);
  if (c.rl.episodes < 1) throw ConfigError("rl.episodes", "must be >= 1");
  c.rl.alpha = get_or<double>(j, "rl.alpha", 0.1);
  c.rl.gamma = get_or<double>(j, "rl.gamma", 0.95);
  c.rl.epsilon_start = get_or<double>(j, "rl.epsilon_start", 1.0);
  c.rl.epsilon_end = get_or<double>(j, "rl.epsilon_end", 0.01);
  c.rl.epsilon_decay = get_or<double>(j, "rl.epsilon_decay", 0.98);
  const auto mode = get_or<std::string>(j, "rl.mode", "tabular");
  if (mode == "tabular")
    c.rl.mode = QMode::tabular;
  else if (mode == "linear")
    c.rl.mode = QMode::linear;
  else
    throw ConfigError("rl.mode", "must be 'tabular' or 'linear'");
  c.rl.bins = get_or<int>(j, "rl.bins", 3);
  if (c.rl.bins < 1) throw ConfigError("rl.bins", "must be >= 1");
  c.transaction_cost = get_or<double>(j, "rl.transaction_cost", 0.0);
  if (c.transaction_cost < 0)
    throw ConfigError("rl.transaction_cost", "must be >= 0");

  c.output_dir = get_or<std::string>(j, "output_dir", "out");
  if (const json* s = find_path(j, "seed"); s && !s->is_null()) {
    if (!s->is_number_unsigned() && !s->is_number_integer())
      throw ConfigError("seed", "must be an integer");
    c.seed = s->get<std::uint64_t>();
  }
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config", "not a valid JSON object: " + path);
  return from_json(j, fs::path(path).parent_path().string());
}

std::string PipelineConfig::resolve(const std::string& path) const {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{
      "ingest", "graph",   "communities", "layout",    "freq",
      "itemsets", "rules", "series",      "returns",   "fit-lasso",
      "fit-bayes", "qlearn"};
  return names;
}

std::vector<std::string> expected_artifacts(const std::string& stage) {
  if (stage == "ingest") return {"corpus.jsonl"};
  if (stage == "graph") return {"graph.dot", "centrality.csv"};
  if (stage == "communities")
    return {"communities.csv", "graph_communities.dot", "dendrogram.csv",
            "communities_summary.json", "graph_isolated.dot"};
  if (stage == "layout") return {"layout.csv", "graph_layout.dot"};
  if (stage == "freq") return {"keyword_freq.csv"};
  if (stage == "itemsets") return {"itemsets.csv"};
  if (stage == "rules") return {"rules.csv", "rules_grouped.json"};
  if (stage == "series")
    return {"keyword_series.csv", "keyword_series_normalized.csv"};
  if (stage == "returns") return {"prices.csv", "returns.csv"};
  if (stage == "fit-lasso") return {"lasso_model.json", "lasso_predictions.csv"};
  if (stage == "fit-bayes")
    return {"posterior_draws.csv", "posterior_summary.csv"};
  if (stage == "qlearn") return {"episodes.csv", "qmodel.json"};
  if (stage == "all") {
    std::vector<std::string> all;
    for (const auto& s : stage_names()) {
      auto a = expected_artifacts(s);
      all.insert(all.end(), a.begin(), a.end());
    }
    return all;
  }
  throw ConfigError("stage", "unknown stage '" + stage + "'");
}

namespace {

class StageRunner {
 public:
  StageRunner(const PipelineConfig& cfg, std::ostream& log)
      : cfg_(cfg), log_(log) {
    fs::create_directories(cfg_.output_dir);
  }

  std::vector<std::string> run(const std::string& stage) {
    if (stage == "all") {
      std::vector<std::string> written;
      for (const auto& s : stage_names()) {
        auto w = run(s);
        written.insert(written.end(), w.begin(), w.end());
      }
      return written;
    }
    if (stage == "ingest") return ingest();
    if (stage == "graph") return graph_stage();
    if (stage == "communities") return communities_stage();
    if (stage == "layout") return layout_stage();
    if (stage == "freq") return freq_stage();
    if (stage == "itemsets") return itemsets_stage();
    if (stage == "rules") return rules_stage();
    if (stage == "series") return series_stage();
    if (stage == "returns") return returns_stage();
    if (stage == "fit-lasso") return lasso_stage();
    if (stage == "fit-bayes") return bayes_stage();
    if (stage == "qlearn") return qlearn_stage();
    throw ConfigError("stage", "unknown stage '" + stage + "'");
  }

 private:
  const PipelineConfig& cfg_;
  std::ostream& log_;

  // lazily shared inputs
  bool corpus_loaded_ = false;
  ParseResult parsed_;

  const TweetCollection& corpus() {
    if (!corpus_loaded_) {
      const std::string path = cfg_.resolve(cfg_.corpus_path);
      if (cfg_.corpus_path.empty() || !fs::exists(path))
        throw ConfigError("corpus.path", "file not found: " + path);
      std::ifstream in(path, std::ios::binary);
      parsed_ = parse_tweets(in, cfg_.corpus_format);
      corpus_loaded_ = true;
      log_ << "[corpus] " << parsed_.collection.size() << " tweets, "
           << parsed_.skipped << " skipped\n";
    }
    return parsed_.collection;
  }

  ThematicField field() const {
    if (cfg_.thematic_field.empty())
      throw ConfigError("thematic_field", "must be nonempty");
    ThematicField f;
    f.keywords.insert(cfg_.thematic_field.begin(), cfg_.thematic_field.end());
    return f;
  }

  ThematicField series_field() const {
    if (cfg_.series_keywords.empty()) return field();
    ThematicField f;
    f.keywords.insert(cfg_.series_keywords.begin(),
                      cfg_.series_keywords.end());
    return f;
  }

  UserGraph graph() { return build_user_graph(corpus(), cfg_.edge_kinds); }

  DatedSeries prices() const {
    const std::string path = cfg_.resolve(cfg_.price_path);
    if (cfg_.price_path.empty() || !fs::exists(path))
      throw ConfigError("prices.path", "file not found: " + path);
    std::ifstream in(path);
    return read_price_csv(in);
  }

  // keyword count series (optionally normalized), lagged design, returns,
  // aligned at the configured horizon
  Aligned design() {
    auto counts = keyword_daily_counts(corpus(), series_field(), cfg_.tokenizer);
    if (cfg_.normalization != "none") {
      const auto method = cfg_.normalization == "zscore"
                              ? NormalizeMethod::zscore
                              : NormalizeMethod::minmax;
      for (auto& s : counts) s = normalize_series(s, method);
    }
    FeatureMatrix x = make_lag_matrix(counts, cfg_.lags);
    ReturnSeries r = price_returns(prices());
    return align(x, r, cfg_.horizon);
  }

  std::string out_path(const std::string& name) const {
    return (fs::path(cfg_.output_dir) / name).string();
  }

  void update_manifest(const std::vector<std::string>& names) const {
    const std::string manifest_path = out_path("manifest.json");
    json manifest = json::object();
    if (fs::exists(manifest_path)) {
      std::ifstream in(manifest_path);
      manifest = json::parse(in, nullptr, false);
      if (manifest.is_discarded() || !manifest.is_object())
        manifest = json::object();
    }
    if (!manifest.contains("artifacts") || !manifest["artifacts"].is_object())
      manifest["artifacts"] = json::object();
    for (const auto& name : names) {
      const std::string bytes = read_file_bytes(out_path(name));
      manifest["artifacts"][name] = {
          {"bytes", bytes.size()},
          {"fnv1a64", to_hex(fnv1a64(bytes.data(), bytes.size()))}};
    }
    std::ofstream out(manifest_path, std::ios::binary);
    out << manifest.dump(2) << '\n';
  }

  std::vector<std::string> finish(const std::string& stage,
                                  const std::vector<std::string>& names) const {
    update_manifest(names);
    for (const auto& n : names) log_ << "[" << stage << "] wrote " << n << "\n";
    return names;
  }

  void write_text(const std::string& name, const std::string& content) const {
    std::ofstream out(out_path(name), std::ios::binary);
    out << content;
  }

  std::vector<std::string> ingest() {
    std::ostringstream body;
    write_canonical_jsonl(corpus(), body);
    write_text("corpus.jsonl", body.str());
    return finish("ingest", {"corpus.jsonl"});
  }

  std::vector<std::string> graph_stage() {
    UserGraph g = graph();
    const auto pr = pagerank(g, cfg_.pagerank_damping, cfg_.pagerank_tol,
                             cfg_.pagerank_max_iter);
    const auto ha = hits(g, cfg_.hits_tol, cfg_.hits_max_iter);
    const auto bc = betweenness(g);
    const auto wt = walktrap(g, cfg_.walktrap_t);

    std::ostringstream dot;
    write_dot(g, dot);
    write_text("graph.dot", dot.str());

    std::ostringstream csv;
    csv << "user,pagerank,hub,authority,betweenness,community\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      csv << g.vertices()[v] << ',' << format_double(pr.scores[v]) << ','
          << format_double(ha.hub[v]) << ',' << format_double(ha.authority[v])
          << ',' << format_double(bc[v]) << ',' << wt.best.assignment[v]
          << '\n';
    write_text("centrality.csv", csv.str());
    return finish("graph", {"graph.dot", "centrality.csv"});
  }

  std::vector<std::string> communities_stage() {
    UserGraph g = graph();
    const auto wt = walktrap(g, cfg_.walktrap_t);

    std::ostringstream csv;
    csv << "user,community\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      csv << g.vertices()[v] << ',' << wt.best.assignment[v] << '\n';
    write_text("communities.csv", csv.str());

    std::ostringstream dendro;
    dendro << "merge,community_a,community_b,new_id,delta_sigma\n";
    for (std::size_t i = 0; i < wt.dendrogram.merges.size(); ++i) {
      const auto& m = wt.dendrogram.merges[i];
      dendro << i << ',' << m.a << ',' << m.b << ',' << m.merged << ','
             << format_double(m.delta_sigma) << '\n';
    }
    write_text("dendrogram.csv", dendro.str());

    std::ostringstream dot;
    DotOptions opt;
    opt.communities = &wt.best;
    write_dot(g, dot, opt);
    write_text("graph_communities.dot", dot.str());

    // conductance per community; low-conductance communities form the
    // isolated subgraph
    std::vector<double> cond(wt.best.community_count, 0.0);
    std::vector<bool> mask(g.vertex_count(), false);
    std::vector<int> sizes(wt.best.community_count, 0);
    for (int v : wt.best.assignment) ++sizes[v];
    for (int comm = 0; comm < wt.best.community_count; ++comm)
      cond[comm] = conductance(g, wt.best, comm);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      if (cond[wt.best.assignment[v]] <= cfg_.isolation_cutoff)
        mask[v] = true;

    std::ostringstream isolated;
    DotOptions iso_opt;
    iso_opt.communities = &wt.best;
    iso_opt.vertex_mask = &mask;
    write_dot(g, isolated, iso_opt);
    write_text("graph_isolated.dot", isolated.str());

    json summary;
    summary["num_communities"] = wt.best.community_count;
    summary["modularity"] = wt.best_modularity;
    summary["isolation_cutoff"] = cfg_.isolation_cutoff;
    json comms = json::array();
    for (int comm = 0; comm < wt.best.community_count; ++comm)
      comms.push_back({{"id", comm},
                       {"size", sizes[comm]},
                       {"conductance", cond[comm]},
                       {"isolated", cond[comm] <= cfg_.isolation_cutoff}});
    summary["communities"] = comms;
    write_text("communities_summary.json", summary.dump(2) + "\n");

    return finish("communities",
                  {"communities.csv", "graph_communities.dot", "dendrogram.csv",
                   "communities_summary.json", "graph_isolated.dot"});
  }

  std::vector<std::string> layout_stage() {
    UserGraph g = graph();
    const auto wt = walktrap(g, cfg_.walktrap_t);
    const Layout layout =
        fr_layout(g, cfg_.layout_width, cfg_.layout_height,
                  cfg_.layout_iterations,
                  RngStream::derive(cfg_.seed, stage_substream("layout")).next());

    std::ostringstream csv;
    csv << "user,x,y\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      csv << g.vertices()[v] << ',' << format_double(layout.coords[v].first)
          << ',' << format_double(layout.coords[v].second) << '\n';
    write_text("layout.csv", csv.str());

    std::ostringstream dot;
    DotOptions opt;
    opt.communities = &wt.best;
    opt.layout = &layout;
    write_dot(g, dot, opt);
    write_text("graph_layout.dot", dot.str());
    return finish("layout", {"layout.csv", "graph_layout.dot"});
  }

  TransactionDB transactions() {
    return build_transactions(corpus(), field(), cfg_.tokenizer);
  }

  std::vector<std::string> freq_stage() {
    const auto freq = keyword_frequencies(transactions(), field());
    std::ostringstream csv;
    csv << "term,count\n";
    for (const auto& [term, count] : freq) csv << term << ',' << count << '\n';
    write_text("keyword_freq.csv", csv.str());
    return finish("freq", {"keyword_freq.csv"});
  }

  std::vector<std::string> itemsets_stage() {
    const auto db = transactions();
    const auto sets = mine_frequent_itemsets(db, cfg_.min_support);
    std::ostringstream csv;
    csv << "items,support,count\n";
    for (const auto& is : sets)
      csv << join(is.items, "|") << ',' << format_double(is.support) << ','
          << is.count << '\n';
    write_text("itemsets.csv", csv.str());
    return finish("itemsets", {"itemsets.csv"});
  }

  std::vector<std::string> rules_stage() {
    const auto db = transactions();
    const auto sets = mine_frequent_itemsets(db, cfg_.min_support);
    const auto rules = derive_rules(sets, db, cfg_.min_confidence);

    std::ostringstream csv;
    csv << "antecedent,consequent,support,confidence,lift\n";
    for (const auto& r : rules)
      csv << join(r.antecedent, "|") << ',' << join(r.consequent, "|") << ','
          << format_double(r.support) << ',' << format_double(r.confidence)
          << ',' << format_double(r.lift) << '\n';
    write_text("rules.csv", csv.str());

    json out;
    if (rules.empty()) {
      out = {{"rows", json::array()},
             {"columns", json::array()},
             {"cells", json::array()}};
    } else {
      const std::size_t k = std::min<std::size_t>(
          static_cast<std::size_t>(cfg_.rule_groups),
          [&] {
            std::set<std::string> keys;
            for (const auto& r : rules) keys.insert(join(r.antecedent, "|"));
            return keys.size();
          }());
      const GroupedMatrix gm = group_rules(rules, k);
      json rows = json::array();
      for (const auto& row : gm.rows)
        rows.push_back({{"representative", row.representative},
                        {"antecedents", row.antecedents},
                        {"rule_count", row.rule_count}});
      json cells = json::array();
      for (const auto& cell : gm.cells)
        cells.push_back({{"row", cell.row},
                         {"col", cell.col},
                         {"rule_count", cell.rule_count},
                         {"mean_lift", cell.mean_lift},
                         {"max_support", cell.max_support}});
      out = {{"rows", rows}, {"columns", gm.columns}, {"cells", cells}};
    }
    write_text("rules_grouped.json", out.dump(2) + "\n");
    return finish("rules", {"rules.csv", "rules_grouped.json"});
  }

  std::vector<std::string> series_stage() {
    auto counts = keyword_daily_counts(corpus(), series_field(), cfg_.tokenizer);
    std::ostringstream raw;
    write_series_csv(counts, raw);
    write_text("keyword_series.csv", raw.str());

    const auto method = cfg_.normalization == "minmax"
                            ? NormalizeMethod::minmax
                            : NormalizeMethod::zscore;
    for (auto& s : counts) s = normalize_series(s, method);
    std::ostringstream norm;
    write_series_csv(counts, norm);
    write_text("keyword_series_normalized.csv", norm.str());
    return finish("series",
                  {"keyword_series.csv", "keyword_series_normalized.csv"});
  }

  std::vector<std::string> returns_stage() {
    const DatedSeries p = prices();
    std::ostringstream pcsv;
    write_dated_csv(p, pcsv, "close");
    write_text("prices.csv", pcsv.str());

    std::ostringstream rcsv;
    write_dated_csv(price_returns(p), rcsv, "return");
    write_text("returns.csv", rcsv.str());
    return finish("returns", {"prices.csv", "returns.csv"});
  }

  std::vector<std::string> lasso_stage() {
    Aligned a = design();
    const double lmax = lambda_max(a.X, a.y);
    const auto grid = lambda_grid(
        lmax, static_cast<std::size_t>(cfg_.lambda_grid_size),
        cfg_.lambda_min_ratio);
    const CvResult cv = cv_lasso(
        a.X, a.y, grid, cfg_.cv_folds,
        RngStream::derive(cfg_.seed, stage_substream("fit-lasso")).next(),
        cfg_.lasso_tol, cfg_.lasso_max_iter);

    json out;
    out["lambda"] = cv.best_lambda;
    out["lambda_max"] = lmax;
    out["intercept"] = cv.model.intercept;
    out["converged"] = cv.model.converged;
    out["iterations"] = cv.model.iterations;
    json coefs = json::object();
    for (const auto& [name, b] : cv.model.coefficients) coefs[name] = b;
    out["coefficients"] = coefs;
    out["dropped_features"] = cv.model.dropped_features;
    json table = json::array();
    for (const auto& [lambda, mse] : cv.cv_mse)
      table.push_back({{"lambda", lambda}, {"cv_mse", mse}});
    out["cv"] = table;
    write_text("lasso_model.json", out.dump(2) + "\n");

    const auto pred = predict_linear(cv.model, a.X);
    std::ostringstream csv;
    csv << "date,actual,predicted\n";
    for (std::size_t i = 0; i < pred.size(); ++i)
      csv << day_to_iso(a.y.dates[i]) << ',' << format_double(a.y.values[i])
          << ',' << format_double(pred[i]) << '\n';
    write_text("lasso_predictions.csv", csv.str());

    log_ << "[fit-lasso] lambda=" << cv.best_lambda << " nonzero="
         << [&] {
              int nz = 0;
              for (const auto& [_, b] : cv.model.coefficients)
                if (b != 0.0) ++nz;
              return nz;
            }()
         << "\n";
    return finish("fit-lasso", {"lasso_model.json", "lasso_predictions.csv"});
  }

  std::vector<std::string> bayes_stage() {
    Aligned a = design();
    McmcConfig mcmc = cfg_.mcmc;
    mcmc.seed =
        RngStream::derive(cfg_.seed, stage_substream("fit-bayes")).next();
    const PosteriorSamples post = fit_bayes(a.X, a.y, cfg_.prior, mcmc);

    std::ostringstream draws;
    draws << join(post.param_names, ",") << '\n';
    for (const auto& row : post.draws) {
      for (std::size_t i = 0; i < row.size(); ++i)
        draws << (i ? "," : "") << format_double(row[i]);
      draws << '\n';
    }
    write_text("posterior_draws.csv", draws.str());

    const auto table = posterior_summary(post);
    std::ostringstream csv;
    csv << "param,q2.5,q25,q50,q75,q97.5,rhat\n";
    for (std::size_t param = 0; param < post.param_names.size(); ++param) {
      const auto& qs = table.at(post.param_names[param]);
      csv << post.param_names[param];
      for (double q : qs) csv << ',' << format_double(q);
      csv << ',' << format_double(post.rhat[param]) << '\n';
    }
    write_text("posterior_summary.csv", csv.str());
    return finish("fit-bayes", {"posterior_draws.csv", "posterior_summary.csv"});
  }

  std::vector<std::string> qlearn_stage() {
    Aligned a = design();
    const MarketEnv env = make_env(a.X, a.y, cfg_.transaction_cost);
    QHyperparams hp = cfg_.rl;
    hp.seed = RngStream::derive(cfg_.seed, stage_substream("qlearn")).next();
    const auto [model, log] = train_q(env, hp);

    std::ostringstream csv;
    csv << "episode,cum_return,trades,epsilon\n";
    for (std::size_t ep = 0; ep < log.cum_return.size(); ++ep)
      csv << ep << ',' << format_double(log.cum_return[ep]) << ','
          << log.trades[ep] << ',' << format_double(log.epsilon[ep]) << '\n';
    write_text("episodes.csv", csv.str());

    json out;
    out["mode"] = model.mode == QMode::tabular ? "tabular" : "linear";
    out["bins"] = model.bins;
    if (model.mode == QMode::tabular) {
      json table = json::object();
      for (const auto& [key, values] : model.table) {
        std::string k;
        for (std::size_t i = 0; i < key.size(); ++i)
          k += (i ? "," : "") + std::to_string(key[i]);
        table[k] = {values[0], values[1], values[2]};
      }
      out["table"] = table;
      out["bin_low"] = model.bin_low;
      out["bin_width"] = model.bin_width;
    } else {
      out["weights"] = {{"buy", model.weights[0]},
                        {"hold", model.weights[1]},
                        {"sell", model.weights[2]}};
    }
    const EvalResult eval = evaluate(env, model);
    out["greedy_return"] = eval.cum_return;
    out["greedy_trades"] = eval.trades;
    write_text("qmodel.json", out.dump(2) + "\n");

    log_ << "[qlearn] greedy return " << eval.cum_return << " over "
         << eval.trades << " trades\n";
    return finish("qlearn", {"episodes.csv", "qmodel.json"});
  }
};

}  // namespace

std::vector<std::string> run_stage(const PipelineConfig& cfg,
                                   const std::string& stage,
                                   std::ostream& log) {
  StageRunner runner(cfg, log);
  return runner.run(stage);
}

}  // namespace tweetmine
