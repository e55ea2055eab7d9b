#include "tweetmine/patterns.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "tweetmine/util.hpp"

namespace tweetmine {

TransactionDB build_transactions(const TweetCollection& c,
                                 const ThematicField& field,
                                 const TokenizerConfig& cfg) {
  if (field.keywords.empty())
    throw std::invalid_argument("thematic field must be nonempty");
  TransactionDB db;
  for (const Tweet& t : c.tweets()) {
    auto items = filter_thematic(tokenize(t, cfg), field);
    if (items.empty()) continue;
    db.transactions.emplace_back(items.begin(), items.end());
  }
  if (db.transactions.empty())
    throw NoTransactions("no tweet matches the thematic field");
  return db;
}

std::map<std::string, std::size_t> keyword_frequencies(const TransactionDB& db) {
  std::map<std::string, std::size_t> freq;
  for (const auto& txn : db.transactions)
    for (const auto& item : txn) ++freq[item];
  return freq;
}

std::map<std::string, std::size_t> keyword_frequencies(
    const TransactionDB& db, const ThematicField& field) {
  auto freq = keyword_frequencies(db);
  for (const auto& kw : field.keywords) freq.try_emplace(kw, 0);
  return freq;
}

namespace {

// sorted-range subset test
bool contains_all(const std::vector<int>& txn, const std::vector<int>& items) {
  return std::includes(txn.begin(), txn.end(), items.begin(), items.end());
}

std::size_t count_support(const std::vector<std::vector<int>>& txns,
                          const std::vector<int>& items) {
  std::size_t c = 0;
  for (const auto& t : txns)
    if (contains_all(t, items)) ++c;
  return c;
}

}  // namespace

std::vector<Itemset> mine_frequent_itemsets(const TransactionDB& db,
                                            double min_support) {
  if (db.transactions.empty())
    throw std::invalid_argument("transaction database is empty");
  if (!(min_support > 0.0 && min_support <= 1.0))
    throw std::invalid_argument("min_support must be in (0,1]");

  // Dictionary-encode items; integer order matches lexicographic order.
  std::set<std::string> vocab_set;
  for (const auto& txn : db.transactions)
    for (const auto& item : txn) vocab_set.insert(item);
  std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  std::map<std::string, int> code;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    code[vocab[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> txns;
  txns.reserve(db.transactions.size());
  for (const auto& txn : db.transactions) {
    std::vector<int> enc;
    enc.reserve(txn.size());
    for (const auto& item : txn) enc.push_back(code[item]);
    std::sort(enc.begin(), enc.end());
    txns.push_back(std::move(enc));
  }

  const double n = static_cast<double>(txns.size());
  auto frequent = [&](std::size_t count) {
    return static_cast<double>(count) / n >= min_support;
  };

  std::vector<Itemset> result;
  std::vector<std::vector<int>> level;  // current frequent k-itemsets, sorted

  // level 1
  std::vector<std::size_t> item_count(vocab.size(), 0);
  for (const auto& t : txns)
    for (int it : t) ++item_count[it];
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (frequent(item_count[i])) {
      level.push_back({static_cast<int>(i)});
      result.push_back({{vocab[i]}, static_cast<double>(item_count[i]) / n,
                        item_count[i]});
    }

  while (!level.empty()) {
    // candidate join: pairs sharing the first k-1 items
    std::vector<std::vector<int>> candidates;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        if (!std::equal(level[a].begin(), level[a].end() - 1,
                        level[b].begin(), level[b].end() - 1))
          break;  // level is sorted; later b cannot share the prefix either
        std::vector<int> cand = level[a];
        cand.push_back(level[b].back());
        // prune: every (k-1)-subset must be frequent
        bool ok = true;
        std::vector<int> sub(cand.size() - 1);
        for (std::size_t skip = 0; skip + 1 < cand.size() && ok; ++skip) {
          sub.clear();
          for (std::size_t i = 0; i < cand.size(); ++i)
            if (i != skip) sub.push_back(cand[i]);
          ok = std::binary_search(level.begin(), level.end(), sub);
        }
        if (ok) candidates.push_back(std::move(cand));
      }
    }
    std::vector<std::vector<int>> next_level;
    for (auto& cand : candidates) {
      const std::size_t cnt = count_support(txns, cand);
      if (!frequent(cnt)) continue;
      std::vector<std::string> named;
      named.reserve(cand.size());
      for (int it : cand) named.push_back(vocab[it]);
      result.push_back({std::move(named), static_cast<double>(cnt) / n, cnt});
      next_level.push_back(std::move(cand));
    }
    level = std::move(next_level);
  }

  std::sort(result.begin(), result.end(), [](const Itemset& a, const Itemset& b) {
    if (a.items.size() != b.items.size())
      return a.items.size() < b.items.size();
    return a.items < b.items;
  });
  return result;
}

namespace {

std::string itemset_key(const std::vector<std::string>& items) {
  return join(items, "|");
}

}  // namespace

std::vector<AssociationRule> derive_rules(const std::vector<Itemset>& itemsets,
                                          const TransactionDB& db,
                                          double min_confidence) {
  if (!(min_confidence > 0.0 && min_confidence <= 1.0))
    throw std::invalid_argument("min_confidence must be in (0,1]");
  const double n = static_cast<double>(db.size());

  std::map<std::string, std::size_t> counts;
  for (const auto& is : itemsets) counts[itemset_key(is.items)] = is.count;

  std::vector<AssociationRule> rules;
  for (const auto& is : itemsets) {
    const std::size_t sz = is.items.size();
    if (sz < 2) continue;
    // every nonempty proper subset of the itemset as antecedent
    for (std::uint32_t mask = 1; mask + 1 < (1u << sz); ++mask) {
      std::vector<std::string> ante, cons;
      for (std::size_t i = 0; i < sz; ++i)
        ((mask >> i) & 1u ? ante : cons).push_back(is.items[i]);

      auto a_it = counts.find(itemset_key(ante));
      auto c_it = counts.find(itemset_key(cons));
      if (a_it == counts.end() || c_it == counts.end())
        continue;  // unreachable under downward closure
      const double confidence =
          static_cast<double>(is.count) / static_cast<double>(a_it->second);
      if (confidence < min_confidence) continue;
      const double support_c = static_cast<double>(c_it->second) / n;
      rules.push_back({std::move(ante), std::move(cons),
                       static_cast<double>(is.count) / n, confidence,
                       confidence / support_c});
    }
  }
  std::sort(rules.begin(), rules.end(),
            [](const AssociationRule& a, const AssociationRule& b) {
              if (a.lift != b.lift) return a.lift > b.lift;
              if (a.antecedent != b.antecedent)
                return a.antecedent < b.antecedent;
              return a.consequent < b.consequent;
            });
  return rules;
}

GroupedMatrix group_rules(const std::vector<AssociationRule>& rules,
                          std::size_t k) {
  if (rules.empty()) throw std::invalid_argument("no rules to group");
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  std::map<std::string, std::set<std::string>> antecedents;  // key -> items
  for (const auto& r : rules)
    antecedents.try_emplace(itemset_key(r.antecedent),
                            std::set<std::string>(r.antecedent.begin(),
                                                  r.antecedent.end()));
  if (k > antecedents.size())
    throw TooFewAntecedents("k exceeds the number of distinct antecedents");

  struct Cluster {
    std::vector<std::string> members;  // antecedent keys, sorted
  };
  std::vector<Cluster> clusters;
  for (const auto& [key, items] : antecedents) clusters.push_back({{key}});

  auto jaccard_distance = [&](const std::string& a, const std::string& b) {
    const auto& sa = antecedents.at(a);
    const auto& sb = antecedents.at(b);
    std::size_t inter = 0;
    for (const auto& x : sa) inter += sb.count(x);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
  };
  auto linkage = [&](const Cluster& a, const Cluster& b) {
    double worst = 0.0;  // complete linkage: farthest member pair
    for (const auto& x : a.members)
      for (const auto& y : b.members)
        worst = std::max(worst, jaccard_distance(x, y));
    return worst;
  };

  while (clusters.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = linkage(clusters[i], clusters[j]);
        // ties resolve to the lexicographically smallest member pair, which
        // is the first one seen since clusters stay sorted by front member
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    Cluster merged;
    merged.members = clusters[bi].members;
    merged.members.insert(merged.members.end(), clusters[bj].members.begin(),
                          clusters[bj].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = std::move(merged);
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) {
                return a.members.front() < b.members.front();
              });
  }

  GroupedMatrix gm;
  std::map<std::string, int> row_of;  // antecedent key -> row index
  for (const auto& cl : clusters) {
    GroupedMatrix::RowGroup row;
    std::set<std::string> rep;
    for (const auto& key : cl.members) {
      row.antecedents.push_back(key);
      const auto& items = antecedents.at(key);
      rep.insert(items.begin(), items.end());
    }
    row.representative.assign(rep.begin(), rep.end());
    for (const auto& key : cl.members)
      row_of[key] = static_cast<int>(gm.rows.size());
    gm.rows.push_back(std::move(row));
  }

  std::set<std::string> cons_keys;
  for (const auto& r : rules) cons_keys.insert(itemset_key(r.consequent));
  gm.columns.assign(cons_keys.begin(), cons_keys.end());
  std::map<std::string, int> col_of;
  for (std::size_t i = 0; i < gm.columns.size(); ++i)
    col_of[gm.columns[i]] = static_cast<int>(i);

  std::map<std::pair<int, int>, std::tuple<std::size_t, double, double>> agg;
  for (const auto& r : rules) {
    const int row = row_of.at(itemset_key(r.antecedent));
    const int col = col_of.at(itemset_key(r.consequent));
    auto& [count, lift_sum, max_support] = agg[{row, col}];
    ++count;
    lift_sum += r.lift;
    max_support = std::max(max_support, r.support);
    ++gm.rows[static_cast<std::size_t>(row)].rule_count;
  }
  for (const auto& [rc, v] : agg) {
    const auto& [count, lift_sum, max_support] = v;
    gm.cells.push_back({rc.first, rc.second, count,
                        lift_sum / static_cast<double>(count), max_support});
  }
  return gm;
}

}  // namespace tweetmine
