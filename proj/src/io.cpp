#include "wl1/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "wl1/errors.hpp"

namespace wl1 {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& field, const std::filesystem::path& path, int line) {
  std::size_t b = field.find_first_not_of(" \t\r");
  std::size_t e = field.find_last_not_of(" \t\r");
  if (b == std::string::npos) {
    throw ParameterError(path.string() + ":" + std::to_string(line) + ": empty field");
  }
  const std::string trimmed = field.substr(b, e - b + 1);
  if (trimmed == "inf") return INFINITY;
  if (trimmed == "-inf") return -INFINITY;
  if (trimmed == "nan") return NAN;
  double v = 0.0;
  const auto res = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
  if (res.ec != std::errc() || res.ptr != trimmed.data() + trimmed.size()) {
    throw ParameterError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                         trimmed + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path.string());
  return out;
}

}  // namespace

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_double(field, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParameterError(path.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParameterError(path.string() + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParameterError(path.string() + ": expected a single row or column");
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v) {
  write_matrix_csv(path, v);
}

Json signal_to_json(const Vector& x) {
  return Json{{"n", x.size()}, {"entries", std::vector<double>(x.data(), x.data() + x.size())}};
}

Vector signal_from_json(const Json& j) {
  const auto entries = j.at("entries").get<std::vector<double>>();
  if (j.contains("n") && j.at("n").get<Index>() != static_cast<Index>(entries.size())) {
    throw ParameterError("signal JSON: n does not match the number of entries");
  }
  Vector x = Eigen::Map<const Vector>(entries.data(), static_cast<Index>(entries.size()));
  check_signal(x);
  return x;
}

Json index_set_to_json(const IndexSet& s) { return Json{{"indices", s.to_one_based()}}; }

IndexSet index_set_from_json(const Json& j) {
  const auto idx = j.at("indices").get<std::vector<long long>>();
  return IndexSet::from_one_based(idx);
}

WeightVector weights_from_json(const Json& j) {
  if (j.contains("entries")) {
    const Vector w = signal_from_json(j);
    return WeightVector::from_values(w);
  }
  const Index n = j.at("n").get<Index>();
  const double omega = j.at("omega").get<double>();
  const IndexSet T = index_set_from_json(j);
  return WeightVector(T, omega, n);
}

Json weights_to_json(const WeightVector& w) { return signal_to_json(w.values()); }

Json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace wl1
