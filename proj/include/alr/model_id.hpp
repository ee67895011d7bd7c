#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "alr/errors.hpp"

namespace alr {

// A non-empty, strictly increasing set of 1-based covariate indices.
class ModelId {
 public:
  explicit ModelId(std::vector<int> indices) : idx_(std::move(indices)) {
    if (idx_.empty()) throw ValidationError("model must contain at least one covariate");
    std::sort(idx_.begin(), idx_.end());
    if (idx_.front() < 1) throw ValidationError("covariate indices are 1-based");
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
      throw ValidationError("duplicate covariate index in model");
  }

  ModelId(std::initializer_list<int> indices) : ModelId(std::vector<int>(indices)) {}

  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& indices() const { return idx_; }
  int max_index() const { return idx_.back(); }

  void check_within(int d) const {
    if (idx_.back() > d) throw IndexError("covariate index " + std::to_string(idx_.back()) +
                                          " exceeds dimension " + std::to_string(d));
  }

  bool operator==(const ModelId& o) const { return idx_ == o.idx_; }

  // order by (size, lexicographic)
  bool operator<(const ModelId& o) const {
    if (idx_.size() != o.idx_.size()) return idx_.size() < o.idx_.size();
    return idx_ < o.idx_;
  }

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(idx_[i]);
    }
    return s + "}";
  }

 private:
  std::vector<int> idx_;
};

inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const ModelId& m) {
  m.check_within(static_cast<int>(a.cols()));
  const int s = m.size();
  Eigen::MatrixXd out(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) out(r, c) = a(m.indices()[r] - 1, m.indices()[c] - 1);
  return out;
}

inline Eigen::VectorXd subvector(const Eigen::VectorXd& v, const ModelId& m) {
  m.check_within(static_cast<int>(v.size()));
  Eigen::VectorXd out(m.size());
  for (int i = 0; i < m.size(); ++i) out(i) = v(m.indices()[i] - 1);
  return out;
}

// columns of an n x d matrix restricted to the model
inline Eigen::MatrixXd subcolumns(const Eigen::MatrixXd& x, const ModelId& m) {
  m.check_within(static_cast<int>(x.cols()));
  Eigen::MatrixXd out(x.rows(), m.size());
  for (int j = 0; j < m.size(); ++j) out.col(j) = x.col(m.indices()[j] - 1);
  return out;
}

}  // namespace alr
