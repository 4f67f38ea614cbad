#include "gdag/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "gdag/errors.hpp"
#include "gdag/format.hpp"

namespace gdag {

namespace {

std::string trimmed(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& field, int line, int column) {
  const std::string text = trimmed(field);
  if (text.empty()) {
    throw MissingValue("missing value at line " + std::to_string(line) +
                       ", column " + std::to_string(column),
                       line, column);
  }
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw ParseError("not a number: '" + text + "' at line " +
                     std::to_string(line) + ", column " +
                     std::to_string(column),
                     line, column);
  }
  if (!std::isfinite(value) || (errno == ERANGE && std::abs(value) > 1.0)) {
    throw NonFinite("non-finite value '" + text + "' at line " +
                    std::to_string(line) + ", column " +
                    std::to_string(column),
                    line, column);
  }
  return value;
}

struct NumberedLine {
  int number;  // 1-based physical line
  std::string text;
};

std::vector<NumberedLine> split_lines(const std::string& text) {
  std::vector<NumberedLine> lines;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back({number, line});
  }
  return lines;
}

}  // namespace

bool is_identifier(const std::string& name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
    return false;
  }
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
      return false;
    }
  }
  return true;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw ParseError("failed writing file: " + path);
}

Dataset parse_dataset(const std::string& text) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  bool have_header = false;
  int header_line = 0;

  for (const auto& [number, raw] : split_lines(text)) {
    if (!raw.empty() && raw[0] == '#') continue;
    if (trimmed(raw).empty()) continue;

    const std::vector<std::string> fields = split(raw, ',');
    if (!have_header) {
      for (size_t i = 0; i < fields.size(); ++i) {
        const std::string name = trimmed(fields[i]);
        if (!is_identifier(name)) {
          throw ParseError("invalid variable name '" + name + "' at line " +
                           std::to_string(number) + ", column " +
                           std::to_string(i + 1),
                           number, static_cast<int>(i + 1));
        }
        for (const auto& seen : names) {
          if (seen == name) {
            throw ParseError("duplicate variable name '" + name +
                             "' at line " + std::to_string(number),
                             number, static_cast<int>(i + 1));
          }
        }
        names.push_back(name);
      }
      have_header = true;
      header_line = number;
      continue;
    }

    if (fields.size() > names.size()) {
      throw ParseError("expected " + std::to_string(names.size()) +
                       " fields but found " + std::to_string(fields.size()) +
                       " at line " + std::to_string(number),
                       number, static_cast<int>(names.size() + 1));
    }
    std::vector<double> row;
    row.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
      if (i >= fields.size()) {
        throw MissingValue("missing value at line " + std::to_string(number) +
                           ", column " + std::to_string(i + 1),
                           number, static_cast<int>(i + 1));
      }
      row.push_back(
          parse_double(fields[i], number, static_cast<int>(i + 1)));
    }
    rows.push_back(std::move(row));
  }

  if (!have_header) throw ParseError("no header line found", 0, 0);
  (void)header_line;

  Dataset out;
  out.variable_names = std::move(names);
  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.variable_names.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return out;
}

Dataset ingest_dataset(const std::string& path) {
  return parse_dataset(read_text_file(path));
}

std::string write_dataset(const Dataset& dataset) {
  std::string out;
  for (size_t i = 0; i < dataset.variable_names.size(); ++i) {
    if (i > 0) out += ',';
    out += dataset.variable_names[i];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < dataset.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < dataset.values.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_real(dataset.values(r, c), 17);
    }
    out += '\n';
  }
  return out;
}

DagStructure parse_dag(const std::string& text) {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> arc_pairs;

  auto intern = [&names](const std::string& name, int line) {
    if (!is_identifier(name)) {
      throw ParseError("invalid node name '" + name + "' at line " +
                       std::to_string(line),
                       line, 0);
    }
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    names.push_back(name);
    return static_cast<int>(names.size() - 1);
  };

  for (const auto& [number, raw] : split_lines(text)) {
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;

    const size_t arrow = line.find("->");
    if (arrow != std::string::npos) {
      const std::string from = trimmed(line.substr(0, arrow));
      const std::string to = trimmed(line.substr(arrow + 2));
      const int u = intern(from, number);
      const int v = intern(to, number);
      for (const auto& existing : arc_pairs) {
        if (existing.first == u && existing.second == v) {
          throw ParseError("duplicate arc '" + from + " -> " + to +
                           "' at line " + std::to_string(number),
                           number, 0);
        }
      }
      arc_pairs.emplace_back(u, v);
      continue;
    }

    if (line.rfind("node", 0) == 0 && line.size() > 4 &&
        (line[4] == ' ' || line[4] == '\t')) {
      intern(trimmed(line.substr(5)), number);
      continue;
    }
    throw ParseError("unrecognized line " + std::to_string(number) + ": '" +
                     line + "'",
                     number, 0);
  }

  std::vector<Arc> arcs;
  arcs.reserve(arc_pairs.size());
  for (const auto& [u, v] : arc_pairs) arcs.push_back({u, v});
  return DagStructure::from_arcs(std::move(names), arcs);
}

DagStructure read_dag_file(const std::string& path) {
  return parse_dag(read_text_file(path));
}

std::string write_dag(const DagStructure& g) {
  std::string out;
  for (const std::string& name : g.variable_names()) {
    out += "node " + name + "\n";
  }
  for (const Arc& arc : g.arcs()) {
    out += g.variable_names()[static_cast<size_t>(arc.from)] + " -> " +
           g.variable_names()[static_cast<size_t>(arc.to)] + "\n";
  }
  return out;
}

NormalWishartPrior default_prior(int dimension) {
  if (dimension < 1) {
    throw DimensionMismatch("prior needs at least one variable");
  }
  NormalWishartPrior p;
  p.nu = Eigen::VectorXd::Zero(dimension);
  p.alpha_mu = 1.0;
  p.alpha = dimension + 2.0;
  p.t = SymMatrix::identity(dimension);
  return p;
}

SymMatrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& [number, raw] : split_lines(text)) {
    if (!raw.empty() && raw[0] == '#') continue;
    if (trimmed(raw).empty()) continue;
    const std::vector<std::string> fields = split(raw, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      row.push_back(parse_double(fields[i], number, static_cast<int>(i + 1)));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file has no rows", 0, 0);
  const size_t n = rows.size();
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw DimensionMismatch("matrix must be square: got " +
                              std::to_string(n) + " rows but a row of " +
                              std::to_string(row.size()) + " values");
    }
  }
  Eigen::MatrixXd m(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return SymMatrix::from_dense(m, 1e-9);
}

SymMatrix read_matrix_csv(const std::string& path) {
  return parse_matrix_csv(read_text_file(path));
}

NormalWishartPrior parse_prior_config(const std::string& text, int dimension,
                                      const std::string& base_dir) {
  NormalWishartPrior prior = default_prior(dimension);
  std::vector<std::string> seen_keys;

  for (const auto& [number, raw] : split_lines(text)) {
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value' at line " +
                       std::to_string(number),
                       number, 0);
    }
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    for (const auto& k : seen_keys) {
      if (k == key) {
        throw ParseError("duplicate key '" + key + "' at line " +
                         std::to_string(number),
                         number, 0);
      }
    }
    seen_keys.push_back(key);

    if (key == "alpha_mu") {
      prior.alpha_mu = parse_double(value, number, 1);
    } else if (key == "alpha") {
      prior.alpha = parse_double(value, number, 1);
    } else if (key == "nu") {
      if (value == "zeros") {
        prior.nu = Eigen::VectorXd::Zero(dimension);
      } else {
        const std::vector<std::string> fields = split(value, ',');
        if (static_cast<int>(fields.size()) != dimension) {
          throw DimensionMismatch(
              "nu has " + std::to_string(fields.size()) + " entries but the "
              "dataset has " + std::to_string(dimension) + " variables");
        }
        prior.nu.resize(dimension);
        for (size_t i = 0; i < fields.size(); ++i) {
          prior.nu(static_cast<Eigen::Index>(i)) =
              parse_double(fields[i], number, static_cast<int>(i + 1));
        }
      }
    } else if (key == "T") {
      if (value == "identity") {
        prior.t = SymMatrix::identity(dimension);
      } else if (value.rfind("scaled:", 0) == 0) {
        const double c = parse_double(value.substr(7), number, 1);
        if (!(c > 0.0)) {
          throw ParseError("scaled:<c> needs c > 0 at line " +
                           std::to_string(number),
                           number, 0);
        }
        prior.t = SymMatrix::symmetrized(
            c * Eigen::MatrixXd::Identity(dimension, dimension));
      } else if (value.rfind("file:", 0) == 0) {
        std::string path = value.substr(5);
        if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
        prior.t = read_matrix_csv(path);
        if (prior.t.order() != dimension) {
          throw DimensionMismatch("T is " + std::to_string(prior.t.order()) +
                                  "x" + std::to_string(prior.t.order()) +
                                  " but the dataset has " +
                                  std::to_string(dimension) + " variables");
        }
      } else {
        throw ParseError("T must be identity, scaled:<c>, or file:<path>; "
                         "got '" + value + "' at line " +
                         std::to_string(number),
                         number, 0);
      }
    } else {
      throw ParseError("unknown key '" + key + "' at line " +
                       std::to_string(number),
                       number, 0);
    }
  }

  prior.validate();
  return prior;
}

NormalWishartPrior read_prior_file(const std::string& path, int dimension) {
  std::string dir = ".";
  const size_t slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_prior_config(read_text_file(path), dimension, dir);
}

}  // namespace gdag
