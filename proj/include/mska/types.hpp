#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mska {

using Scalar = double;
using Index = std::ptrdiff_t;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexVector = std::vector<Index>;

// Error taxonomy mirrors the CLI exit codes: usage(1), data(2), solver(3).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mska
