#pragma once

// Config ingestion (JSON) and grid files (CSV: header x1,...,xn,value, one
// grid point per row in row-major order).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxplus/duality.hpp"
#include "maxplus/errors.hpp"
#include "maxplus/grid.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

using Json = nlohmann::json;

inline Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) {
    throw InputError(what + ": expected a nonempty array of rows");
  }
  // A flat array is a column vector.
  if (!j.front().is_array()) {
    Matrix v(static_cast<Eigen::Index>(j.size()), 1);
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw InputError(what + ": non-numeric entry");
      v(static_cast<Eigen::Index>(i), 0) = j[i].get<double>();
    }
    return v;
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw InputError(what + ": rows have different lengths");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InputError(what + ": non-numeric entry");
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return M;
}

inline Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json hessian_to_json(const PartitionedHessian& Q) {
  return Json{{"11", matrix_to_json(Q.q11())},
              {"12", matrix_to_json(Q.q12())},
              {"21", matrix_to_json(Q.q21())},
              {"22", matrix_to_json(Q.q22())}};
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// A matrix stored alone in a JSON file, either bare or under the given key.
inline Matrix read_matrix_file(const std::string& path,
                               const std::string& key) {
  const Json j = read_json_file(path);
  if (j.is_object()) {
    if (!j.contains(key)) throw InputError("'" + path + "' has no '" + key + "'");
    return matrix_from_json(j.at(key), key);
  }
  return matrix_from_json(j, key);
}

namespace detail {

inline Vector broadcast(const Json& j, int n, const std::string& what) {
  if (j.is_number()) return Vector::Constant(n, j.get<double>());
  const Matrix m = matrix_from_json(j, what);
  if (m.cols() != 1 || m.rows() != n) {
    throw InputError(what + ": expected a number or " + std::to_string(n) +
                     " numbers");
  }
  return m.col(0);
}

}  // namespace detail

/// {"lower": l, "upper": u, "spacing": s}; each a number (all dimensions) or
/// an array of n numbers.
inline GridSpec grid_from_json(const Json& j, int n, const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected an object");
  for (const char* key : {"lower", "upper", "spacing"}) {
    if (!j.contains(key)) {
      throw InputError(what + ": missing '" + std::string(key) + "'");
    }
  }
  return GridSpec(detail::broadcast(j.at("lower"), n, what + ".lower"),
                  detail::broadcast(j.at("upper"), n, what + ".upper"),
                  detail::broadcast(j.at("spacing"), n, what + ".spacing"));
}

/// "lo:hi:step", the same in every dimension.
inline GridSpec grid_from_string(const std::string& s, int n) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("grid '" + s + "': expected lo:hi:step");
    }
  }
  if (parts.size() != 3) throw InputError("grid '" + s + "': expected lo:hi:step");
  return GridSpec::uniform(n, parts[0], parts[1], parts[2]);
}

inline Json grid_to_json(const GridSpec& g) {
  return Json{{"lower", vector_to_json(g.lower())},
              {"upper", vector_to_json(g.upper())},
              {"spacing", vector_to_json(g.spacing())},
              {"points", g.size()}};
}

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_grid_csv(std::ostream& out, const GridSpec& grid,
                           const std::vector<double>& values,
                           const std::string& prefix = "x") {
  if (values.size() != grid.size()) {
    throw InputError("csv: value count does not match the grid");
  }
  for (int d = 0; d < grid.dim(); ++d) out << prefix << (d + 1) << ',';
  out << "value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector x = grid.point(i);
    for (int d = 0; d < grid.dim(); ++d) out << format_double(x(d)) << ',';
    out << format_double(values[i]) << '\n';
  }
}

inline void write_grid_csv(const std::string& path, const GridSpec& grid,
                           const std::vector<double>& values,
                           const std::string& prefix = "x") {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_grid_csv(out, grid, values, prefix);
}

struct GridData {
  GridSpec grid;
  std::vector<double> values;
};

inline double parse_double(const std::string& s, const std::string& where) {
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0') throw InputError(where + ": bad number '" + s + "'");
  return v;
}

/// Reads a grid CSV. The grid is reconstructed from the distinct coordinates
/// in each column and every row is checked against it.
inline GridData read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("'" + path + "' is empty");
  const auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) {
      while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
      cells.push_back(c);
    }
    return cells;
  };
  const auto header = split(line);
  if (header.size() < 2 || header.back() != "value") {
    throw InputError("'" + path + "': header must be x1,...,xn,value");
  }
  const int n = static_cast<int>(header.size()) - 1;
  std::vector<Vector> pts;
  std::vector<double> vals;
  std::vector<std::set<double>> coords(static_cast<std::size_t>(n));
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    const std::string where = path + ":" + std::to_string(row);
    if (static_cast<int>(cells.size()) != n + 1) {
      throw InputError(where + ": expected " + std::to_string(n + 1) +
                       " columns");
    }
    Vector x(n);
    for (int d = 0; d < n; ++d) {
      x(d) = parse_double(cells[d], where);
      coords[d].insert(x(d));
    }
    pts.push_back(x);
    vals.push_back(parse_double(cells[n], where));
  }
  if (pts.empty()) throw InputError("'" + path + "' has no data rows");
  Vector lo(n), hi(n), step(n);
  for (int d = 0; d < n; ++d) {
    lo(d) = *coords[d].begin();
    hi(d) = *coords[d].rbegin();
    const auto cnt = coords[d].size();
    step(d) = cnt > 1 ? (hi(d) - lo(d)) / static_cast<double>(cnt - 1) : 1.0;
  }
  GridSpec grid(lo, hi, step);
  if (grid.size() != pts.size()) {
    throw InputError("'" + path + "': rows do not form a full tensor grid");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector g = grid.point(i);
    const double tol = 1e-9 * std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - pts[i]).cwiseAbs().maxCoeff() > tol) {
      throw InputError("'" + path + "': row " + std::to_string(i + 2) +
                       " is out of row-major grid order");
    }
  }
  return {grid, vals};
}

struct Config {
  RegulatorProblem problem;
  std::optional<Matrix> M;
  std::optional<Matrix> P0;
  Json payoff;  // null when absent
  std::map<std::string, Json> grids;
  /// Directory of the config file, for resolving relative CSV paths.
  std::string base_dir;
};

inline Config parse_config(const Json& j, const std::string& base_dir = ".") {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const char* key : {"A", "B", "Phi", "gamma"}) {
    if (!j.contains(key)) {
      throw InputError("config is missing '" + std::string(key) + "'");
    }
  }
  Config c;
  c.base_dir = base_dir;
  c.problem.A = matrix_from_json(j.at("A"), "A");
  c.problem.B = matrix_from_json(j.at("B"), "B");
  c.problem.Phi = matrix_from_json(j.at("Phi"), "Phi");
  if (!j.at("gamma").is_number()) throw InputError("gamma must be a number");
  c.problem.gamma = j.at("gamma").get<double>();
  check_dimensions(c.problem);
  if (j.contains("M")) c.M = matrix_from_json(j.at("M"), "M");
  if (j.contains("P0")) c.P0 = matrix_from_json(j.at("P0"), "P0");
  if (j.contains("payoff")) c.payoff = j.at("payoff");
  if (j.contains("grids")) {
    if (!j.at("grids").is_object()) throw InputError("grids must be an object");
    for (const auto& [k, v] : j.at("grids").items()) c.grids[k] = v;
  }
  return c;
}

inline Config load_config(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return parse_config(read_json_file(path),
                      slash == std::string::npos ? "." : path.substr(0, slash));
}

inline std::optional<GridSpec> config_grid(const Config& c,
                                           const std::string& name, int dim) {
  const auto it = c.grids.find(name);
  if (it == c.grids.end()) return std::nullopt;
  return grid_from_json(it->second, dim, "grids." + name);
}

inline GrowthBound growth_from_json(const Json& j) {
  GrowthBound g;
  g.r = j.value("r", 1.0);
  g.c = j.value("c", 0.0);
  return g;
}

/// Payoff description:
///   {"type": "quadratic", "Lambda": [[...]]}
///   {"type": "named", "name": "abs-sin", "params": {"a": 3}}
///   {"type": "csv", "path": "file.csv"}
/// each with an optional "growth": {"r": .., "c": ..}. Analytic payoffs get
/// a valid default bound; CSV payoffs must declare one.
inline TerminalPayoff payoff_from_json(const Json& j, int n,
                                       const std::string& base_dir = ".") {
  if (!j.is_object() || !j.contains("type")) {
    throw InputError("payoff must be an object with a 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  const bool has_growth = j.contains("growth");
  if (type == "quadratic") {
    const Matrix L = matrix_from_json(j.at("Lambda"), "payoff.Lambda");
    if (L.rows() != n || L.cols() != n) {
      throw InputError("payoff.Lambda must be n x n");
    }
    GrowthBound g{std::max(max_eigenvalue(L), 1e-12), 0.0};
    if (has_growth) g = growth_from_json(j.at("growth"));
    return TerminalPayoff::quadratic(L, g);
  }
  if (type == "named") {
    const std::string name = j.at("name").get<std::string>();
    std::map<std::string, double> params;
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) {
        params[k] = v.get<double>();
      }
    }
    const auto par = [&](const std::string& k, double def) {
      const auto it = params.find(k);
      return it == params.end() ? def : it->second;
    };
    // Bounds via a|t| <= t^2/2 + a^2/2.
    GrowthBound g{1.0, 0.0};
    if (name == "quadratic") {
      g.r = std::max(par("scale", 1.0), 1e-12);
    } else if (name == "abs-sin") {
      const double a = std::abs(par("a", 3.0));
      g.c = 0.5 * a * a + a * std::abs(par("b", 1.0));
    } else {
      double s = 0.0;
      for (int i = 1; i <= n; ++i) {
        const double ci = par("c" + std::to_string(i), 1.0);
        s += ci * ci;
      }
      g.c = 0.5 * s;
    }
    if (has_growth) g = growth_from_json(j.at("growth"));
    return TerminalPayoff::named(name, params, g);
  }
  if (type == "csv") {
    if (!has_growth) throw InputError("csv payoff must declare 'growth'");
    std::string path = j.at("path").get<std::string>();
    if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
    GridData data = read_grid_csv(path);
    if (data.grid.dim() != n) {
      throw InputError("csv payoff dimension does not match the problem");
    }
    return TerminalPayoff::sampled(std::move(data.grid), std::move(data.values),
                                   growth_from_json(j.at("growth")));
  }
  throw InputError("unknown payoff type '" + type +
                   "' (known: quadratic, named, csv)");
}

}  // namespace maxplus
