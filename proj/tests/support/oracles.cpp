#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace morphtag::testing {

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

ReferenceLstmOut reference_lstm_step(const std::vector<double>& wx, const std::vector<double>& wh,
                                     const std::vector<double>& b, const std::vector<double>& x,
                                     const std::vector<double>& h, const std::vector<double>& c) {
  const std::size_t H = h.size();
  const std::size_t D = x.size();
  auto pre = [&](std::size_t gate, std::size_t unit) {
    const std::size_t row = gate * H + unit;
    double s = b[row];
    for (std::size_t d = 0; d < D; ++d) s += wx[row * D + d] * x[d];
    for (std::size_t k = 0; k < H; ++k) s += wh[row * H + k] * h[k];
    return s;
  };
  ReferenceLstmOut out{std::vector<double>(H), std::vector<double>(H)};
  for (std::size_t u = 0; u < H; ++u) {
    const double i = logistic(pre(0, u));
    const double f = logistic(pre(1, u));
    const double o = logistic(pre(2, u));
    const double g = std::tanh(pre(3, u));
    out.cell[u] = f * c[u] + i * g;
    out.hidden[u] = o * std::tanh(out.cell[u]);
  }
  return out;
}

GradCheckResult finite_difference_check(ParameterStore& store, const std::function<double()>& loss, double eps,
                                        double rel_tol, double abs_floor) {
  GradCheckResult r;
  for (auto& p : store.params()) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + eps;
      const double up = loss();
      p.value[i] = saved - eps;
      const double down = loss();
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p.grad[i];
      const double diff = std::abs(analytic - numeric);
      const double scale = std::max(std::abs(analytic), std::abs(numeric));
      const double rel = scale > 0 ? diff / scale : 0.0;
      ++r.checked;
      const bool ok = diff <= abs_floor || rel <= rel_tol;
      if (!ok) ++r.failures;
      if (diff > abs_floor && rel > r.worst_relative) {
        r.worst_relative = rel;
        r.worst_where = p.name + "[" + std::to_string(i) + "] analytic=" + std::to_string(analytic) +
                        " numeric=" + std::to_string(numeric);
      }
    }
  }
  return r;
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> at, double eps) {
  std::vector<double> g(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double saved = at[i];
    at[i] = saved + eps;
    const double up = f(at);
    at[i] = saved - eps;
    const double down = f(at);
    at[i] = saved;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

}  // namespace morphtag::testing
