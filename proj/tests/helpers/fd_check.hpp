#ifndef ADAMEL_TESTS_FD_CHECK_HPP
#define ADAMEL_TESTS_FD_CHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "adamel/losses.hpp"

namespace adamel_tests {

// Central finite differences over every parameter entry, compared against
// the analytic gradients of the same composed loss. fbar and centroids stay
// fixed inside `step`, matching the stop-gradient convention. Returns the
// max relative error.
inline double max_relative_fd_error(const adamel::StepData& step, adamel::ModelParams params,
                                    double h = 1e-5) {
  const adamel::StepResult res = adamel::loss_and_gradients(step, params);

  std::vector<double> analytic;
  adamel::visit_tensors(res.grads,
                        [&analytic](const std::string&, const double* d, std::int64_t n) {
                          analytic.insert(analytic.end(), d, d + n);
                        });

  std::vector<std::pair<double*, std::int64_t>> spans;
  adamel::visit_tensors(params, [&spans](const std::string&, double* d, std::int64_t n) {
    spans.push_back({d, n});
  });

  double worst = 0.0;
  std::size_t flat = 0;
  for (auto [ptr, n] : spans) {
    for (std::int64_t i = 0; i < n; ++i, ++flat) {
      const double saved = ptr[i];
      ptr[i] = saved + h;
      const double up = adamel::evaluate_step_loss(step, params).total;
      ptr[i] = saved - h;
      const double down = adamel::evaluate_step_loss(step, params).total;
      ptr[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double a = analytic[flat];
      const double scale = std::max({std::abs(a), std::abs(fd), 1e-6});
      worst = std::max(worst, std::abs(a - fd) / scale);
    }
  }
  return worst;
}

}  // namespace adamel_tests

#endif
