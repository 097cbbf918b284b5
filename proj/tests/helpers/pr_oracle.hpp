#ifndef ADAMEL_TESTS_PR_ORACLE_HPP
#define ADAMEL_TESTS_PR_ORACLE_HPP

#include <algorithm>
#include <set>
#include <vector>

namespace adamel_tests {

// Brute-force precision-recall areas: enumerate every distinct score as a
// threshold, recount the confusion matrix from scratch at each, and
// integrate. Written independently of the library implementation.
struct PrOracle {
  double average_precision = 0.0;
  double trapezoid = 0.0;
  std::vector<std::pair<double, double>> points;  // (recall, precision)
};

inline PrOracle pr_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::set<double, std::greater<double>> thresholds(scores.begin(), scores.end());
  std::size_t total_pos = 0;
  for (int y : labels)
    if (y == 1) ++total_pos;

  PrOracle out;
  for (double t : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) {
        if (labels[i] == 1)
          ++tp;
        else
          ++fp;
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    out.points.emplace_back(recall, precision);
  }

  double prev_r = 0.0;
  double prev_p = out.points.front().second;
  for (const auto& [r, p] : out.points) {
    out.average_precision += (r - prev_r) * p;
    out.trapezoid += (r - prev_r) * 0.5 * (p + prev_p);
    prev_r = r;
    prev_p = p;
  }
  return out;
}

}  // namespace adamel_tests

#endif
