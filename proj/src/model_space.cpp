#include "alr/model_space.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "alr/errors.hpp"

namespace alr {

ModelCollection::ModelCollection(int d, std::vector<ModelId> models) : d_(d), models_(std::move(models)) {
  if (d_ < 1) throw ValidationError("ambient dimension must be >= 1");
  for (const auto& m : models_) m.check_within(d_);
  std::sort(models_.begin(), models_.end());
  if (std::adjacent_find(models_.begin(), models_.end()) != models_.end())
    throw ValidationError("duplicate model in collection");
  std::size_t begin = 0;
  while (begin < models_.size()) {
    const int s = models_[begin].size();
    std::size_t end = begin;
    while (end < models_.size() && models_[end].size() == s) ++end;
    strata_[s] = {begin, end};
    begin = end;
  }
}

std::pair<std::size_t, std::size_t> ModelCollection::stratum_range(int s) const {
  auto it = strata_.find(s);
  if (it == strata_.end()) return {0, 0};
  return it->second;
}

double ModelCollection::pi(int s) const {
  const auto [b, e] = stratum_range(s);
  return models_.empty() ? 0.0 : static_cast<double>(e - b) / static_cast<double>(models_.size());
}

std::vector<int> ModelCollection::sizes_present() const {
  std::vector<int> out;
  for (const auto& [s, r] : strata_) out.push_back(s);
  return out;
}

std::uint64_t binomial(int d, int s) {
  if (s < 0 || s > d) return 0;
  s = std::min(s, d - s);
  std::uint64_t result = 1;
  for (int i = 1; i <= s; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(d - s + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / num)
      throw SizeError("binomial coefficient overflows 64 bits");
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::uint64_t count_up_to_k(int d, int k) {
  std::uint64_t total = 0;
  for (int s = 1; s <= k; ++s) {
    const std::uint64_t c = binomial(d, s);
    if (total > std::numeric_limits<std::uint64_t>::max() - c)
      throw SizeError("collection count overflows 64 bits");
    total += c;
  }
  return total;
}

namespace {

void check_k(int d, int k) {
  if (d < 1) throw ValidationError("d must be >= 1");
  if (k < 1 || k > d) throw ValidationError("need 1 <= k <= d");
}

void check_cap(std::uint64_t count, std::uint64_t cap) {
  if (count > cap)
    throw SizeError("collection has " + std::to_string(count) + " models, above the cap of " +
                    std::to_string(cap));
}

// appends all size-s subsets in lexicographic order
void append_size(int d, int s, std::vector<ModelId>& out) {
  std::vector<int> comb(s);
  for (int i = 0; i < s; ++i) comb[i] = i + 1;
  while (true) {
    out.emplace_back(comb);
    int i = s - 1;
    while (i >= 0 && comb[i] == d - s + i + 1) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
  }
}

}  // namespace

ModelCollection enumerate_up_to_k(int d, int k, std::uint64_t cap) {
  check_k(d, k);
  const std::uint64_t count = count_up_to_k(d, k);
  check_cap(count, cap);
  std::vector<ModelId> models;
  models.reserve(count);
  for (int s = 1; s <= k; ++s) append_size(d, s, models);
  return ModelCollection(d, std::move(models));
}

ModelCollection enumerate_exact_k(int d, int k, std::uint64_t cap) {
  check_k(d, k);
  const std::uint64_t count = binomial(d, k);
  check_cap(count, cap);
  std::vector<ModelId> models;
  models.reserve(count);
  append_size(d, k, models);
  return ModelCollection(d, std::move(models));
}

ModelCollection from_list(int d, const std::vector<std::vector<int>>& models) {
  std::vector<ModelId> out;
  out.reserve(models.size());
  for (const auto& m : models) out.emplace_back(m);
  try {
    return ModelCollection(d, std::move(out));
  } catch (const IndexError& e) {
    throw ValidationError(e.what());
  }
}

std::vector<ModelId> stratum(const ModelCollection& coll, int s) {
  const auto [b, e] = coll.stratum_range(s);
  return {coll.models().begin() + static_cast<std::ptrdiff_t>(b),
          coll.models().begin() + static_cast<std::ptrdiff_t>(e)};
}

ModelId model_at(int d, int k, std::uint64_t rank) {
  check_k(d, k);
  int s = 0;
  std::uint64_t rem = rank;
  for (int size = 1; size <= k; ++size) {
    const std::uint64_t c = binomial(d, size);
    if (rem < c) {
      s = size;
      break;
    }
    rem -= c;
  }
  if (s == 0) throw IndexError("model rank out of range");
  // lexicographic unranking of a size-s combination of {1..d}
  std::vector<int> comb(s);
  int next = 1;
  for (int pos = 0; pos < s; ++pos) {
    for (int v = next; v <= d; ++v) {
      const std::uint64_t block = binomial(d - v, s - pos - 1);
      if (rem < block) {
        comb[pos] = v;
        next = v + 1;
        break;
      }
      rem -= block;
    }
  }
  return ModelId(comb);
}

}  // namespace alr
