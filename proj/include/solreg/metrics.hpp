#pragma once

#include <cstddef>
#include <vector>

namespace solreg {

struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    double mse = 0.0;
    std::size_t n = 0;
};

// MAE = sum(|x - y|)/n, RMSE = sqrt(sum((x - y)^2)/n), MSE = RMSE^2.
// Throws on length mismatch or empty input.
Metrics compute_metrics(const std::vector<double>& targets, const std::vector<double>& predictions);

} // namespace solreg
