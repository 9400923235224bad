#ifndef SADDLE_PROBLEMS_LIBSVM_H_
#define SADDLE_PROBLEMS_LIBSVM_H_

#include <string>

#include <Eigen/SparseCore>

#include "saddle/types.h"

namespace saddle {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// A LIBSVM classification dataset. Labels are mapped to {-1, +1}: any
// label > 0 becomes +1, anything else (0, -1, ...) becomes -1.
struct LibsvmData {
  SparseRows features;  // n x d, d = largest feature index seen
  Vec labels;
};

// Parses `<label> <index>:<value> ...` lines with 1-based, strictly
// ascending indices. Blank lines and lines starting with '#' are skipped.
// Throws ParseError carrying the 1-based line number.
LibsvmData ParseLibsvm(const std::string& text);
LibsvmData LoadLibsvm(const std::string& path);

// Writes nonzero entries with shortest round-trip formatting, labels as
// "+1"/"-1".
std::string FormatLibsvm(const Mat& features, const Vec& labels);
void WriteLibsvm(const std::string& path, const Mat& features,
                 const Vec& labels);

}  // namespace saddle

#endif  // SADDLE_PROBLEMS_LIBSVM_H_
