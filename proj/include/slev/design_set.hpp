#pragma once

#include <Eigen/Dense>

#include "slev/errors.hpp"

namespace slev {

// A set of design points (one row per point) with optional responses,
// true-function values and densities. Optional columns are empty vectors
// when absent.
struct DesignSet {
  Eigen::MatrixXd points;       // n x d
  Eigen::VectorXd responses;    // y
  Eigen::VectorXd true_values;  // f*(x_i)
  Eigen::VectorXd densities;    // p(x_i)

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }

  bool has_responses() const { return responses.size() == size() && size() > 0; }
  bool has_true_values() const { return true_values.size() == size() && size() > 0; }
  bool has_densities() const { return densities.size() == size() && size() > 0; }

  void validate() const {
    if (points.rows() < 1 || points.cols() < 1)
      throw ConfigError("DesignSet must contain at least one point with dimension >= 1");
    if (!points.allFinite()) throw ConfigError("DesignSet contains non-finite coordinates");
    auto check = [&](const Eigen::VectorXd& v, const char* name) {
      if (v.size() != 0 && v.size() != size())
        throw ConfigError(std::string("DesignSet column '") + name + "' has inconsistent length");
    };
    check(responses, "y");
    check(true_values, "f_star");
    check(densities, "density");
  }
};

}  // namespace slev
