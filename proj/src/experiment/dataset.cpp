#include "lsvi/experiment/dataset.hpp"

#include "lsvi/error.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lsvi::experiment {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, long row, long col) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", row, col);
  return v;
}

}  // namespace

std::string_view to_string(GlmKind kind) { return kind == GlmKind::linear ? "linear" : "logistic"; }

GlmKind parse_kind(std::string_view name) {
  if (name == "linear") return GlmKind::linear;
  if (name == "logistic") return GlmKind::logistic;
  throw DomainError("unknown regression kind '" + std::string(name) + "'");
}

GlmDataset parse_dataset(std::istream& in, GlmKind kind, bool standardize) {
  std::vector<std::vector<double>> rows;
  std::vector<long> line_numbers;
  std::string line;
  long line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::vector<double> values;
    std::size_t start = 0;
    long col = 1;
    while (true) {
      const auto comma = view.find(',', start);
      const auto cell = view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(parse_cell(cell, line_no, col));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
      ++col;
    }
    if (width == 0) width = values.size();
    if (values.size() != width)
      throw ParseError("expected " + std::to_string(width) + " columns, found " + std::to_string(values.size()),
                       line_no, static_cast<long>(values.size()));
    rows.push_back(std::move(values));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw DomainError("dataset has no rows");
  if (width < 2) throw DomainError("dataset needs at least one feature column and a response column");

  GlmDataset data;
  data.kind = kind;
  const auto N = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  data.X.resize(N, d);
  data.y.resize(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index j = 0; j < d; ++j) data.X(n, j) = rows[n][j];
    data.y[n] = rows[n][d];
  }

  if (kind == GlmKind::logistic) {
    bool zero_one = true, plus_minus = true;
    for (Eigen::Index n = 0; n < N; ++n) {
      zero_one = zero_one && (data.y[n] == 0.0 || data.y[n] == 1.0);
      plus_minus = plus_minus && (data.y[n] == -1.0 || data.y[n] == 1.0);
    }
    if (!zero_one && !plus_minus) {
      for (Eigen::Index n = 0; n < N; ++n)
        if (data.y[n] != 0.0 && data.y[n] != 1.0 && data.y[n] != -1.0)
          throw ParseError("logistic response must be in {0,1} or {-1,+1}", line_numbers[n], static_cast<long>(width));
      throw DomainError("logistic responses mix the {0,1} and {-1,+1} conventions");
    }
    if (!plus_minus)
      for (Eigen::Index n = 0; n < N; ++n) data.y[n] = data.y[n] == 0.0 ? -1.0 : 1.0;
  }
  if (standardize) standardize_features(data);
  data.validate();
  return data;
}

GlmDataset load_dataset(const std::filesystem::path& path, GlmKind kind, bool standardize) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path.string());
  return parse_dataset(in, kind, standardize);
}

void standardize_features(GlmDataset& data) {
  const auto N = static_cast<double>(data.X.rows());
  if (N < 1) return;
  for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
    auto col = data.X.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / N);
    if (sd > 0.0) col /= sd;
  }
}

GlmDataset synth_dataset(GlmKind kind, int N, int d, std::uint64_t seed) {
  if (N < 1 || d < 1) throw DomainError("synthetic dataset needs N >= 1 and d >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec z(d);
  for (int j = 0; j < d; ++j) z[j] = normal(rng);
  GlmDataset data;
  data.kind = kind;
  data.X.resize(N, d);
  for (int n = 0; n < N; ++n)
    for (int j = 0; j < d; ++j) data.X(n, j) = normal(rng);
  const Vec eta = data.X * z;
  data.y.resize(N);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 0; n < N; ++n) {
    if (kind == GlmKind::linear)
      data.y[n] = eta[n] + normal(rng);
    else
      data.y[n] = unif(rng) < sigmoid(eta[n]) ? 1.0 : -1.0;
  }
  return data;
}

void write_dataset(const GlmDataset& data, std::ostream& out) {
  out << "#";
  for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << (j ? "," : " ") << "x" << (j + 1);
  out << ",y\n";
  char buf[32];
  auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
  };
  for (Eigen::Index n = 0; n < data.X.rows(); ++n) {
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
      put(data.X(n, j));
      out << ',';
    }
    put(data.y[n]);
    out << '\n';
  }
}

void write_dataset(const GlmDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset: " + path.string());
  write_dataset(data, out);
}

std::uint64_t checksum(const GlmDataset& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index n = 0; n < data.X.rows(); ++n)
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) mix(data.X(n, j));
  for (Eigen::Index n = 0; n < data.y.size(); ++n) mix(data.y[n]);
  return h;
}

}  // namespace lsvi::experiment
