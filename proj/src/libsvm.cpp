#include "amortized/libsvm.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "amortized/csv.hpp"

namespace amortized {

namespace {

double parse_number(std::string_view token, std::size_t line, const char* what) {
  std::string_view body = token;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (body.empty() || ec != std::errc() || ptr != body.data() + body.size()) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

long parse_index(std::string_view token, std::size_t line) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "non-numeric feature index '" + std::string(token) + "'");
  }
  if (value < 1) throw ParseError(line, "feature indices are 1-based");
  return value;
}

struct SparseRow {
  double label;
  std::vector<std::pair<long, double>> entries;
};

}  // namespace

LibsvmDataset parse_libsvm(std::istream& in, std::optional<Eigen::Index> dim_hint) {
  std::vector<SparseRow> rows;
  std::string raw;
  std::size_t line_no = 0;
  long max_index = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::istringstream tokens{std::string(line)};
    std::string token;
    if (!(tokens >> token)) continue;  // blank or comment-only

    SparseRow row{parse_number(token, line_no, "label"), {}};
    long previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw ParseError(line_no, "expected idx:val, got '" + token + "'");
      }
      const std::string_view view(token);
      const long idx = parse_index(view.substr(0, colon), line_no);
      const double val = parse_number(view.substr(colon + 1), line_no, "feature value");
      if (idx <= previous) {
        throw ParseError(line_no, "feature indices must be strictly increasing");
      }
      previous = idx;
      max_index = std::max(max_index, idx);
      row.entries.emplace_back(idx, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no, "empty libsvm input");

  Eigen::Index dim = max_index;
  if (dim_hint) {
    if (*dim_hint < max_index) {
      throw ParseError(line_no, "dimension hint " + std::to_string(*dim_hint) +
                                    " is smaller than the largest index " +
                                    std::to_string(max_index));
    }
    dim = *dim_hint;
  }

  std::set<double> labels;
  for (const auto& r : rows) labels.insert(r.label);
  const bool plus_minus = std::all_of(labels.begin(), labels.end(),
                                      [](double v) { return v == -1.0 || v == 1.0; });
  const bool zero_one = std::all_of(labels.begin(), labels.end(),
                                    [](double v) { return v == 0.0 || v == 1.0; });
  if (!plus_minus && !zero_one) {
    throw ParseError(line_no, "labels must all be in {-1,+1} or all in {0,1}");
  }

  LibsvmDataset data;
  data.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    data.y[r] = rows[i].label > 0.0 ? 1.0 : 0.0;
    for (const auto& [idx, val] : rows[i].entries) data.X(r, idx - 1) = val;
  }
  return data;
}

LibsvmDataset load_libsvm(const std::string& path, std::optional<Eigen::Index> dim_hint) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open libsvm file '" + path + "'");
  return parse_libsvm(in, dim_hint);
}

std::string to_libsvm(const LibsvmDataset& data) {
  std::string out;
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    out += data.y[i] > 0.5 ? "+1" : "-1";
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
      if (data.X(i, j) != 0.0) {
        out += ' ' + std::to_string(j + 1) + ':' + format_double(data.X(i, j));
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace amortized
