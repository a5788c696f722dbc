#include "sgmfs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "sgmfs/rng.hpp"

namespace sgmfs {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF) {
    text.erase(0, 3);
  }
  return text;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char ch : text) {
    if (ch == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back(current);
  }
  return lines;
}

std::string trimmed(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_csv_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  cells.push_back(current);
  return cells;
}

bool parse_double(const std::string& raw, double& out) {
  const std::string cell = trimmed(raw);
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void check_invariants(const Dataset& data) {
  if (data.feature_count() < 1) throw std::runtime_error("dataset has no features");
  if (data.sample_count() < 2) throw std::runtime_error("dataset needs at least 2 samples");
  if (data.label_count() < 1) throw std::runtime_error("dataset has no labels");
}

double threshold_label(double value) { return value >= 0.5 ? 1.0 : 0.0; }

}  // namespace

Dataset load_csv(const std::string& path, int label_count) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  std::vector<std::vector<std::string>> rows;
  bool have_header = false;
  std::vector<std::string> header;
  for (const std::string& line : lines) {
    if (trimmed(line).empty()) continue;
    if (!have_header) {
      header = split_csv_cells(line);
      have_header = true;
    } else {
      rows.push_back(split_csv_cells(line));
    }
  }
  if (!have_header || rows.empty()) throw std::runtime_error("no data rows");

  const int columns = static_cast<int>(header.size());
  if (label_count < 1) throw std::runtime_error("label_count must be at least 1");
  if (label_count >= columns) {
    throw std::runtime_error("label_count (" + std::to_string(label_count) +
                             ") must be smaller than the column count (" +
                             std::to_string(columns) + ")");
  }

  const int d = columns - label_count;
  const Index n = static_cast<Index>(rows.size());
  Matrix features(d, n);
  Matrix labels(n, label_count);
  for (Index r = 0; r < n; ++r) {
    const auto& cells = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(cells.size()) != columns) {
      throw std::runtime_error("row " + std::to_string(r + 1) + ": expected " +
                               std::to_string(columns) + " columns, got " +
                               std::to_string(cells.size()));
    }
    for (int c = 0; c < columns; ++c) {
      double value = 0.0;
      if (!parse_double(cells[static_cast<std::size_t>(c)], value)) {
        throw std::runtime_error("parse error at row " + std::to_string(r + 1) +
                                 ", column " + std::to_string(c + 1) + ": \"" +
                                 trimmed(cells[static_cast<std::size_t>(c)]) +
                                 "\" is not numeric");
      }
      if (!std::isfinite(value)) {
        throw std::runtime_error("non-finite value at row " + std::to_string(r + 1) +
                                 ", column " + std::to_string(c + 1));
      }
      if (c < d) {
        features(c, r) = value;
      } else {
        labels(r, c - d) = threshold_label(value);
      }
    }
  }

  Dataset data;
  data.features = std::move(features);
  data.labels = std::move(labels);
  data.feature_names.assign(header.begin(), header.begin() + d);
  data.label_names.assign(header.begin() + d, header.end());
  for (std::string& name : data.feature_names) name = trimmed(name);
  for (std::string& name : data.label_names) name = trimmed(name);
  check_invariants(data);
  return data;
}

namespace {

std::vector<std::string> parse_label_xml(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = text.find("<label", pos)) != std::string::npos) {
    const std::size_t close = text.find('>', pos);
    if (close == std::string::npos) break;
    const std::string tag = text.substr(pos, close - pos);
    const std::size_t name_at = tag.find("name");
    if (name_at != std::string::npos) {
      std::size_t q1 = tag.find_first_of("\"'", name_at);
      if (q1 != std::string::npos) {
        const char quote = tag[q1];
        const std::size_t q2 = tag.find(quote, q1 + 1);
        if (q2 != std::string::npos) {
          names.push_back(tag.substr(q1 + 1, q2 - q1 - 1));
        }
      }
    }
    pos = close + 1;
  }
  if (names.empty()) {
    throw std::runtime_error("no <label name=...> entries found in " + path);
  }
  return names;
}

struct ArffAttribute {
  std::string name;
  bool numeric = false;  // numeric/real/integer or nominal subset of {0,1}
};

// Attribute names may be bare tokens or quoted with ' or ".
ArffAttribute parse_attribute_decl(const std::string& line, int line_no) {
  std::size_t pos = line.find_first_of(" \t");
  if (pos == std::string::npos) {
    throw std::runtime_error("malformed @attribute at line " + std::to_string(line_no));
  }
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  ArffAttribute attr;
  std::size_t type_at = std::string::npos;
  if (pos < line.size() && (line[pos] == '\'' || line[pos] == '"')) {
    const char quote = line[pos];
    const std::size_t close = line.find(quote, pos + 1);
    if (close == std::string::npos) {
      throw std::runtime_error("unterminated attribute name at line " + std::to_string(line_no));
    }
    attr.name = line.substr(pos + 1, close - pos - 1);
    type_at = close + 1;
  } else {
    const std::size_t end = line.find_first_of(" \t", pos);
    if (end == std::string::npos) {
      throw std::runtime_error("missing attribute type at line " + std::to_string(line_no));
    }
    attr.name = line.substr(pos, end - pos);
    type_at = end;
  }
  std::string type = trimmed(line.substr(type_at));
  if (type.empty()) {
    throw std::runtime_error("missing attribute type at line " + std::to_string(line_no));
  }
  if (type.front() == '{') {
    const std::size_t close = type.find('}');
    if (close == std::string::npos) {
      throw std::runtime_error("unterminated nominal spec at line " + std::to_string(line_no));
    }
    bool binary = true;
    std::string value;
    std::istringstream values(type.substr(1, close - 1));
    while (std::getline(values, value, ',')) {
      const std::string v = trimmed(value);
      if (v != "0" && v != "1") binary = false;
    }
    attr.numeric = binary;
  } else {
    const std::string kind = lowered(type.substr(0, type.find_first_of(" \t")));
    attr.numeric = (kind == "numeric" || kind == "real" || kind == "integer");
  }
  return attr;
}

}  // namespace

Dataset load_mulan(const std::string& arff_path, const std::string& xml_path) {
  const std::vector<std::string> label_names = parse_label_xml(xml_path);
  const std::vector<std::string> lines = split_lines(read_file(arff_path));

  // First pass: declarations, and the raw data lines for later parsing.
  std::vector<ArffAttribute> attributes;
  std::vector<std::pair<int, std::string>> data_lines;
  bool in_data = false;
  int line_no = 0;
  for (const std::string& raw : lines) {
    ++line_no;
    const std::string line = trimmed(raw);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      const std::string low = lowered(line.substr(0, 10));
      if (low.rfind("@attribute", 0) == 0) {
        attributes.push_back(parse_attribute_decl(line, line_no));
      } else if (low.rfind("@data", 0) == 0) {
        in_data = true;
      }
      continue;
    }
    data_lines.emplace_back(line_no, line);
  }
  if (attributes.empty()) throw std::runtime_error("no @attribute declarations in " + arff_path);
  if (data_lines.empty()) throw std::runtime_error("no data rows");

  std::unordered_map<std::string, Index> attribute_index;
  for (Index i = 0; i < static_cast<Index>(attributes.size()); ++i) {
    attribute_index[attributes[static_cast<std::size_t>(i)].name] = i;
  }
  std::vector<bool> is_label(attributes.size(), false);
  for (const std::string& name : label_names) {
    const auto found = attribute_index.find(name);
    if (found == attribute_index.end()) {
      throw std::runtime_error("label \"" + name + "\" from " + xml_path +
                               " is not an ARFF attribute");
    }
    is_label[static_cast<std::size_t>(found->second)] = true;
  }

  std::vector<Index> feature_cols;
  std::vector<Index> label_cols;
  for (Index i = 0; i < static_cast<Index>(attributes.size()); ++i) {
    const ArffAttribute& attr = attributes[static_cast<std::size_t>(i)];
    if (is_label[static_cast<std::size_t>(i)]) {
      label_cols.push_back(i);
    } else {
      if (!attr.numeric) {
        throw std::runtime_error("non-numeric feature attribute \"" + attr.name + "\"");
      }
      feature_cols.push_back(i);
    }
  }

  // Second pass: parse the rows.
  std::vector<std::vector<double>> samples;
  samples.reserve(data_lines.size());
  for (const auto& [data_line_no, line] : data_lines) {
    line_no = data_line_no;
    const Index width = static_cast<Index>(attributes.size());
    std::vector<double> row(static_cast<std::size_t>(width), 0.0);
    if (line.front() == '{') {
      const std::size_t close = line.find('}');
      if (close == std::string::npos) {
        throw std::runtime_error("unterminated sparse row at line " + std::to_string(line_no));
      }
      std::istringstream entries(line.substr(1, close - 1));
      std::string entry;
      while (std::getline(entries, entry, ',')) {
        const std::string pair = trimmed(entry);
        if (pair.empty()) continue;
        const std::size_t space = pair.find_first_of(" \t");
        if (space == std::string::npos) {
          throw std::runtime_error("malformed sparse entry at line " + std::to_string(line_no));
        }
        double index_value = 0.0;
        double value = 0.0;
        if (!parse_double(pair.substr(0, space), index_value) ||
            !parse_double(pair.substr(space + 1), value)) {
          throw std::runtime_error("malformed sparse entry at line " + std::to_string(line_no));
        }
        const long long index = static_cast<long long>(index_value);
        if (index < 0 || index >= width) {
          throw std::runtime_error("sparse index out of range at line " + std::to_string(line_no));
        }
        row[static_cast<std::size_t>(index)] = value;
      }
    } else {
      const std::vector<std::string> cells = split_csv_cells(line);
      if (static_cast<Index>(cells.size()) != width) {
        throw std::runtime_error("data row at line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(width) +
                                 " values, got " + std::to_string(cells.size()));
      }
      for (Index c = 0; c < width; ++c) {
        std::string cell = trimmed(cells[static_cast<std::size_t>(c)]);
        if (cell.size() >= 2 && (cell.front() == '\'' || cell.front() == '"') &&
            cell.back() == cell.front()) {
          cell = cell.substr(1, cell.size() - 2);
        }
        double value = 0.0;
        if (!parse_double(cell, value)) {
          throw std::runtime_error("non-numeric value \"" + cell + "\" at line " +
                                   std::to_string(line_no) + ", attribute " +
                                   attributes[static_cast<std::size_t>(c)].name);
        }
        row[static_cast<std::size_t>(c)] = value;
      }
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("non-finite value at line " + std::to_string(line_no));
      }
    }
    samples.push_back(std::move(row));
  }

  const Index n = static_cast<Index>(samples.size());
  const Index d = static_cast<Index>(feature_cols.size());
  const Index c = static_cast<Index>(label_cols.size());
  Dataset data;
  data.features.resize(d, n);
  data.labels.resize(n, c);
  for (Index s = 0; s < n; ++s) {
    const auto& row = samples[static_cast<std::size_t>(s)];
    for (Index f = 0; f < d; ++f) {
      data.features(f, s) = row[static_cast<std::size_t>(feature_cols[static_cast<std::size_t>(f)])];
    }
    for (Index l = 0; l < c; ++l) {
      data.labels(s, l) = threshold_label(row[static_cast<std::size_t>(label_cols[static_cast<std::size_t>(l)])]);
    }
  }
  for (Index f = 0; f < d; ++f) {
    data.feature_names.push_back(attributes[static_cast<std::size_t>(feature_cols[static_cast<std::size_t>(f)])].name);
  }
  for (Index l = 0; l < c; ++l) {
    data.label_names.push_back(attributes[static_cast<std::size_t>(label_cols[static_cast<std::size_t>(l)])].name);
  }
  check_invariants(data);
  return data;
}

SemiSplit make_split(const Dataset& dataset, double labeled_fraction,
                     std::uint64_t seed) {
  if (!(labeled_fraction > 0.0) || labeled_fraction > 1.0) {
    throw std::invalid_argument("labeled_fraction must lie in (0, 1]");
  }
  const Index n = dataset.sample_count();
  const Index n_l = std::max<Index>(
      1, static_cast<Index>(std::ceil(labeled_fraction * static_cast<double>(n) - 1e-9)));

  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  const Index c = dataset.label_count();
  std::vector<bool> label_present(static_cast<std::size_t>(c), false);
  for (Index b = 0; b < c; ++b) {
    label_present[static_cast<std::size_t>(b)] = dataset.labels.col(b).sum() > 0.0;
  }

  std::vector<int> labeled;
  bool covered = false;
  for (int attempt = 0; attempt < 10 && !covered; ++attempt) {
    rng.shuffle(order);
    labeled.assign(order.begin(), order.begin() + n_l);
    covered = true;
    for (Index b = 0; b < c && covered; ++b) {
      if (!label_present[static_cast<std::size_t>(b)]) continue;
      bool hit = false;
      for (int idx : labeled) {
        if (dataset.labels(idx, b) > 0.0) {
          hit = true;
          break;
        }
      }
      covered = hit;
    }
  }
  if (!covered) {
    std::cerr << "warning: labeled split misses a positive sample for some label "
                 "after 10 attempts; using the last draw\n";
  }

  SemiSplit split;
  split.seed = seed;
  split.labeled_indices = labeled;
  std::sort(split.labeled_indices.begin(), split.labeled_indices.end());
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (int idx : split.labeled_indices) taken[static_cast<std::size_t>(idx)] = true;
  for (Index i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) {
      split.unlabeled_indices.push_back(static_cast<int>(i));
    }
  }
  return split;
}

std::pair<Dataset, StandardizationStats> standardize(const Dataset& dataset) {
  const Index d = dataset.feature_count();
  const Index n = dataset.sample_count();
  StandardizationStats stats;
  stats.mean.resize(d);
  stats.stddev.resize(d);
  Dataset out = dataset;
  for (Index f = 0; f < d; ++f) {
    const double mean = dataset.features.row(f).mean();
    const double var =
        (dataset.features.row(f).array() - mean).square().sum() / static_cast<double>(n);
    const double sigma = std::sqrt(std::max(var, 0.0));
    // Constant features (sigma indistinguishable from rounding noise) pass
    // through untouched with stddev recorded as 0.
    if (sigma > 1e-12 * std::max(1.0, std::abs(mean))) {
      stats.mean(f) = mean;
      stats.stddev(f) = sigma;
      out.features.row(f) = (dataset.features.row(f).array() - mean) / sigma;
    } else {
      stats.mean(f) = mean;
      stats.stddev(f) = 0.0;
    }
  }
  return {std::move(out), std::move(stats)};
}

Matrix apply_standardization(const StandardizationStats& stats,
                             const Matrix& features) {
  if (features.rows() != stats.mean.size()) {
    throw std::invalid_argument("apply_standardization: feature dimension mismatch");
  }
  Matrix out = features;
  for (Index f = 0; f < features.rows(); ++f) {
    if (stats.stddev(f) > 0.0) {
      out.row(f) = (features.row(f).array() - stats.mean(f)) / stats.stddev(f);
    }
  }
  return out;
}

Matrix labeled_rows(const Dataset& dataset, const SemiSplit& split) {
  Matrix y_l(static_cast<Index>(split.labeled_indices.size()), dataset.label_count());
  for (Index r = 0; r < y_l.rows(); ++r) {
    y_l.row(r) = dataset.labels.row(split.labeled_indices[static_cast<std::size_t>(r)]);
  }
  return y_l;
}

}  // namespace sgmfs
