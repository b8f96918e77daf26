#include "solreg/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace solreg {

Metrics compute_metrics(const std::vector<double>& targets, const std::vector<double>& predictions) {
    if (targets.size() != predictions.size())
        throw std::runtime_error("compute_metrics: length mismatch");
    if (targets.empty())
        throw std::runtime_error("compute_metrics: empty input");

    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = targets[i] - predictions[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    Metrics m;
    m.n = targets.size();
    m.mae = abs_sum / static_cast<double>(m.n);
    m.mse = sq_sum / static_cast<double>(m.n);
    m.rmse = std::sqrt(m.mse);
    return m;
}

} // namespace solreg
