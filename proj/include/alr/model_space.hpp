#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "alr/model_id.hpp"

namespace alr {

inline constexpr std::uint64_t kDefaultCollectionCap = 1'000'000;

// An enumerable family of models over an ambient dimension d, kept sorted
// by (size, lexicographic) with contiguous per-size strata.
class ModelCollection {
 public:
  ModelCollection(int d, std::vector<ModelId> models);

  int d() const { return d_; }
  std::size_t size() const { return models_.size(); }
  const std::vector<ModelId>& models() const { return models_; }
  const ModelId& operator[](std::size_t i) const { return models_[i]; }

  // [begin, end) index range of the size-s stratum; empty when absent
  std::pair<std::size_t, std::size_t> stratum_range(int s) const;

  // proportion of models of size s
  double pi(int s) const;

  std::vector<int> sizes_present() const;

 private:
  int d_;
  std::vector<ModelId> models_;
  std::map<int, std::pair<std::size_t, std::size_t>> strata_;
};

// C(d, s) in 64-bit arithmetic; throws SizeError on overflow.
std::uint64_t binomial(int d, int s);

// | {M : 1 <= |M| <= k} | without any cap.
std::uint64_t count_up_to_k(int d, int k);

// All non-empty subsets of {1..d} of size <= k (resp. == k).  Throws
// SizeError naming the count when it exceeds cap.
ModelCollection enumerate_up_to_k(int d, int k, std::uint64_t cap = kDefaultCollectionCap);
ModelCollection enumerate_exact_k(int d, int k, std::uint64_t cap = kDefaultCollectionCap);

// Collection from explicit model lists (1-based indices).
ModelCollection from_list(int d, const std::vector<std::vector<int>>& models);

// Models of size s as a sub-sequence of the collection.
std::vector<ModelId> stratum(const ModelCollection& coll, int s);

// rank -> model within the (size, lexicographic) order of the size <= k
// family, without materializing it; rank in [0, count_up_to_k(d, k)).
ModelId model_at(int d, int k, std::uint64_t rank);

}  // namespace alr
