#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssp/linalg.hpp"
#include "ssp/model_builders.hpp"
#include "ssp/trace.hpp"

namespace ssp {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  long line_number;
};

/// A Matrix Market file: coordinate (sparse) or array (dense column-major)
/// format, real general entries. 1-based indices are converted on read.
struct MatrixMarket {
  enum class Format { Coordinate, Array };

  Format format = Format::Coordinate;
  RowMatrix matrix;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }

  Vector vector() const {
    if (matrix.cols() != 1)
      throw std::runtime_error("MatrixMarket::vector: not a single column");
    return Vector(dense());
  }
};

inline MatrixMarket read_matrix_market(std::istream& in) {
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty Matrix Market input", 1);
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw ParseError("malformed Matrix Market header", line_no);
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported Matrix Market format '" + format + "'",
                     line_no);
  if (field != "real" && field != "integer")
    throw ParseError("unsupported Matrix Market field '" + field + "'",
                     line_no);
  if (symmetry != "general")
    throw ParseError("unsupported Matrix Market symmetry '" + symmetry + "'",
                     line_no);
  const bool coordinate = (format == "coordinate");

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      std::size_t i = 0;
      while (i < out.size() && std::isspace(static_cast<unsigned char>(out[i])))
        ++i;
      if (i == out.size() || out[i] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError("missing size line", line_no + 1);
  std::istringstream size_line(line);
  Eigen::Index rows = 0, cols = 0;
  long nnz = 0;
  if (coordinate) {
    if (!(size_line >> rows >> cols >> nnz))
      throw ParseError("malformed coordinate size line", line_no);
  } else {
    if (!(size_line >> rows >> cols))
      throw ParseError("malformed array size line", line_no);
  }
  if (rows < 0 || cols < 0)
    throw ParseError("negative matrix dimension", line_no);

  MatrixMarket mm;
  mm.format = coordinate ? MatrixMarket::Format::Coordinate
                         : MatrixMarket::Format::Array;

  if (coordinate) {
    std::vector<Eigen::Triplet<double>> trips;
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    trips.reserve(static_cast<std::size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
      if (!next_data_line(line))
        throw ParseError("fewer entries than declared", line_no + 1);
      std::istringstream entry(line);
      Eigen::Index i = 0, j = 0;
      double v = 0.0;
      if (!(entry >> i >> j >> v))
        throw ParseError("malformed coordinate entry", line_no);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError("index out of range", line_no);
      if (!seen.insert({i, j}).second)
        throw ParseError("duplicate entry", line_no);
      trips.emplace_back(i - 1, j - 1, v);
    }
    mm.matrix.resize(rows, cols);
    mm.matrix.setFromTriplets(trips.begin(), trips.end());
  } else {
    Eigen::MatrixXd dense(rows, cols);
    // array format is column-major
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!next_data_line(line))
          throw ParseError("fewer entries than declared", line_no + 1);
        std::istringstream entry(line);
        double v = 0.0;
        if (!(entry >> v)) throw ParseError("malformed array entry", line_no);
        dense(i, j) = v;
      }
    mm.matrix = dense.sparseView();
  }
  mm.matrix.makeCompressed();
  return mm;
}

inline MatrixMarket read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix_market(in);
}

inline void write_matrix_market(std::ostream& os, const RowMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (Eigen::Index i = 0; i < m.outerSize(); ++i)
    for (RowMatrix::InnerIterator it(m, i); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' '
         << format_double(it.value()) << '\n';
}

inline void write_matrix_market(std::ostream& os, const Eigen::MatrixXd& m) {
  os << "%%MatrixMarket matrix array real general\n";
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      os << format_double(m(i, j)) << '\n';
}

/// LIBSVM format: one sample per line, `label idx:val ...`, feature
/// indices 1-based and strictly ascending. Labels 0 map to -1 when
/// `zero_as_negative` is set; anything other than {-1, 0, +1} is rejected.
inline LabeledDataset read_libsvm(std::istream& in,
                                  bool zero_as_negative = true,
                                  Eigen::Index num_features = 0) {
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> labels;
  Eigen::Index max_feature = num_features;
  std::string line;
  long line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank line

    double label;
    try {
      std::size_t used = 0;
      label = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("unparseable label '" + tok + "'", line_no);
    }
    if (label == 0.0 && zero_as_negative) label = -1.0;
    if (label != 1.0 && label != -1.0)
      throw ParseError("label must be -1, 0 or +1", line_no);

    const Eigen::Index row = static_cast<Eigen::Index>(labels.size());
    labels.push_back(label);

    Eigen::Index prev = 0;
    while (tokens >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected idx:val, got '" + tok + "'", line_no);
      Eigen::Index idx;
      double val;
      try {
        std::size_t used = 0;
        idx = std::stol(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        val = std::stod(tok.substr(colon + 1), &used);
        if (used != tok.size() - colon - 1) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("unparseable feature '" + tok + "'", line_no);
      }
      if (idx <= prev)
        throw ParseError("feature indices must be ascending and >= 1",
                         line_no);
      prev = idx;
      max_feature = std::max(max_feature, idx);
      trips.emplace_back(row, idx - 1, val);
    }
  }

  LabeledDataset data;
  data.features.resize(static_cast<Eigen::Index>(labels.size()), max_feature);
  data.features.setFromTriplets(trips.begin(), trips.end());
  data.features.makeCompressed();
  data.labels = Eigen::Map<Vector>(labels.data(),
                                   static_cast<Eigen::Index>(labels.size()));
  return data;
}

inline LabeledDataset read_libsvm(const std::string& path,
                                  bool zero_as_negative = true) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_libsvm(in, zero_as_negative);
}

inline void write_libsvm(std::ostream& os, const LabeledDataset& data) {
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    os << (data.labels[i] > 0 ? "+1" : "-1");
    for (RowMatrix::InnerIterator it(data.features, i); it; ++it)
      os << ' ' << it.col() + 1 << ':' << format_double(it.value());
    os << '\n';
  }
}

/// `key = value` summary report.
inline void write_report(
    std::ostream& os,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [key, value] : entries) os << key << " = " << value << '\n';
}

}  // namespace ssp
