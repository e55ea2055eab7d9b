#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetmine/corpus.hpp"

namespace tweetmine {

struct NoTransactions : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooFewAntecedents : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-tweet item sets restricted to the thematic field. Items within a
// transaction are sorted and unique; empty transactions are not stored.
struct TransactionDB {
  std::vector<std::vector<std::string>> transactions;
  std::size_t size() const { return transactions.size(); }
};

TransactionDB build_transactions(const TweetCollection& c,
                                 const ThematicField& field,
                                 const TokenizerConfig& cfg);

// Number of transactions containing each term that occurs at least once.
std::map<std::string, std::size_t> keyword_frequencies(const TransactionDB& db);
// Same, with zero entries for field terms absent from every transaction.
std::map<std::string, std::size_t> keyword_frequencies(
    const TransactionDB& db, const ThematicField& field);

struct Itemset {
  std::vector<std::string> items;  // sorted lexicographically
  double support = 0.0;            // count / db size
  std::size_t count = 0;
};

// Level-wise Apriori. Returns exactly the itemsets with support >=
// min_support, sorted by (size, lexicographic items).
std::vector<Itemset> mine_frequent_itemsets(const TransactionDB& db,
                                            double min_support);

struct AssociationRule {
  std::vector<std::string> antecedent;  // sorted, nonempty
  std::vector<std::string> consequent;  // sorted, nonempty, disjoint
  double support = 0.0;                 // support of antecedent ∪ consequent
  double confidence = 0.0;              // support(A∪C) / support(A)
  double lift = 0.0;                    // confidence / support(C)
};

// All rules A -> C with A∪C in `itemsets` and confidence >= min_confidence,
// sorted by descending lift, then antecedent, then consequent.
std::vector<AssociationRule> derive_rules(const std::vector<Itemset>& itemsets,
                                          const TransactionDB& db,
                                          double min_confidence);

// Rules aggregated by clustered antecedents: complete-linkage agglomeration
// on Jaccard distance of the antecedent item sets, down to k groups.
struct GroupedMatrix {
  struct RowGroup {
    std::vector<std::string> representative;  // sorted union of member items
    std::vector<std::string> antecedents;     // member keys, '|'-joined items
    std::size_t rule_count = 0;
  };
  struct Cell {
    int row = 0;
    int col = 0;
    std::size_t rule_count = 0;
    double mean_lift = 0.0;
    double max_support = 0.0;
  };
  std::vector<RowGroup> rows;
  std::vector<std::string> columns;  // consequent keys, '|'-joined items
  std::vector<Cell> cells;
};

GroupedMatrix group_rules(const std::vector<AssociationRule>& rules,
                          std::size_t k);

}  // namespace tweetmine
