#include "saddle/problems/libsvm.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace saddle {
namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> Tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double ParseDouble(std::string_view s, std::int64_t line, const char* what) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(std::string("malformed ") + what + " '" +
                         std::string(s) + "'",
                     line);
  }
  return v;
}

long long ParseIndex(std::string_view s, std::int64_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("malformed feature index '" + std::string(s) + "'", line);
  }
  if (v < 1) throw ParseError("feature index must be >= 1", line);
  return v;
}

void AppendDouble(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

LibsvmData ParseLibsvm(const std::string& text) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  long long max_index = 0;
  std::int64_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tokens = Tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const double label = ParseDouble(tokens[0], line_no, "label");
    const auto row = static_cast<int>(labels.size());
    labels.push_back(label > 0.0 ? 1.0 : -1.0);
    long long last = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected <index>:<value>, got '" +
                             std::string(tokens[t]) + "'",
                         line_no);
      }
      const long long idx = ParseIndex(tokens[t].substr(0, colon), line_no);
      if (idx <= last) {
        throw ParseError("feature indices must be strictly ascending",
                         line_no);
      }
      last = idx;
      const double v = ParseDouble(tokens[t].substr(colon + 1), line_no,
                                   "feature value");
      triplets.emplace_back(row, static_cast<int>(idx - 1), v);
      max_index = std::max(max_index, idx);
    }
    if (end == text.size()) break;
  }
  LibsvmData data;
  data.features.resize(static_cast<Eigen::Index>(labels.size()),
                       static_cast<Eigen::Index>(max_index));
  data.features.setFromTriplets(triplets.begin(), triplets.end());
  data.labels = Eigen::Map<const Vec>(labels.data(),
                                      static_cast<Eigen::Index>(labels.size()));
  return data;
}

LibsvmData LoadLibsvm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open LIBSVM file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseLibsvm(ss.str());
}

std::string FormatLibsvm(const Mat& features, const Vec& labels) {
  if (features.rows() != labels.size()) {
    throw InvalidArgument("FormatLibsvm: row count and label count differ");
  }
  std::string out;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out += labels[i] > 0.0 ? "+1" : "-1";
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (features(i, j) == 0.0) continue;
      out += ' ';
      out += std::to_string(j + 1);
      out += ':';
      AppendDouble(out, features(i, j));
    }
    out += '\n';
  }
  return out;
}

void WriteLibsvm(const std::string& path, const Mat& features,
                 const Vec& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write LIBSVM file '" + path + "'");
  out << FormatLibsvm(features, labels);
}

}  // namespace saddle
