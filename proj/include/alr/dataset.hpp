#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace alr {

// An n x d covariate matrix with its n response values.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  Dataset(Eigen::MatrixXd x_in, Eigen::VectorXd y_in);

  int n() const { return static_cast<int>(x.rows()); }
  int d() const { return static_cast<int>(x.cols()); }
};

// CSV with a header row; the column named `y` is the response, every other
// column is a covariate in file order.
Dataset load_csv(const std::string& path);

// covariate names from the same header, in dataset column order
std::vector<std::string> csv_covariate_names(const std::string& path);

}  // namespace alr
