#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "amortized/types.hpp"

namespace amortized {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Dense copy of a libsvm-format file. Labels are normalized to {0, 1}.
struct LibsvmDataset {
  Eigen::MatrixXd X;  // rows x dim
  Vector y;
};

/// Reads "label idx:val idx:val ..." lines with 1-based, strictly increasing
/// indices. '#' starts a comment; blank lines are skipped. The dimension is
/// the largest index seen, or dim_hint when given (which must cover every
/// index). Labels must all lie in {-1, +1} or all in {0, 1}.
LibsvmDataset parse_libsvm(std::istream& in, std::optional<Eigen::Index> dim_hint = {});

LibsvmDataset load_libsvm(const std::string& path,
                          std::optional<Eigen::Index> dim_hint = {});

// Writes nonzero entries only, labels as +1 / -1.
std::string to_libsvm(const LibsvmDataset& data);

}  // namespace amortized
