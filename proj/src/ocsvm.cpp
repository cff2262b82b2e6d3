#include "hpcids/ocsvm.hpp"

#include <cmath>
#include <limits>
#include <list>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace hpcids {

void validate(const OcsvmConfig& config) {
  if (!(config.nu > 0.0 && config.nu <= 1.0))
    throw Error(ErrorKind::NuOutOfRange, fmt::format("nu = {} outside (0, 1]", config.nu));
  if (config.gamma && !(*config.gamma > 0.0 && std::isfinite(*config.gamma)))
    throw Error(ErrorKind::InvalidArgument, fmt::format("gamma = {} must be positive", *config.gamma));
  if (!(config.tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
}

double resolve_gamma(const OcsvmConfig& config, std::size_t n_features) {
  if (config.gamma) return *config.gamma;
  if (n_features == 0) throw Error(ErrorKind::DimensionMismatch, "auto gamma needs at least one feature");
  return 1.0 / static_cast<double>(n_features);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size())
    throw Error(ErrorKind::DimensionMismatch, fmt::format("kernel on dimensions {} and {}", x.size(), y.size()));
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double DualSolution::objective() const {
  double f = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) f += alpha[i] * gradient[i];
  return 0.5 * f;
}

namespace {

// Kernel matrix columns computed on demand, least-recently-used evicted
// once the byte budget is reached.
class KernelColumns {
 public:
  KernelColumns(const Matrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma), columns_(x.rows()), where_(x.rows(), lru_.end()) {
    const std::size_t per_column = std::max<std::size_t>(1, x.rows() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / per_column);
  }

  const std::vector<double>& column(std::size_t i) {
    if (!columns_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return columns_[i];
    }
    if (lru_.size() >= capacity_) {
      const auto victim = lru_.back();
      lru_.pop_back();
      where_[victim] = lru_.end();
      std::vector<double>().swap(columns_[victim]);
    }
    auto& col = columns_[i];
    col.resize(x_.rows());
    const auto xi = x_.row(i);
    for (std::size_t j = 0; j < x_.rows(); ++j) col[j] = rbf_kernel(xi, x_.row(j), gamma_);
    lru_.push_front(i);
    where_[i] = lru_.begin();
    return col;
  }

 private:
  const Matrix& x_;
  double gamma_;
  std::size_t capacity_ = 0;
  std::vector<std::vector<double>> columns_;
  std::list<std::size_t> lru_;
  std::vector<std::list<std::size_t>::iterator> where_;
};

double compute_rho(const std::vector<double>& alpha, const std::vector<double>& grad, double bound) {
  double free_sum = 0.0;
  std::size_t n_free = 0;
  double lb = -std::numeric_limits<double>::infinity();  // from alphas at the box bound
  double ub = std::numeric_limits<double>::infinity();   // from alphas at zero
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] >= bound)
      lb = std::max(lb, grad[i]);
    else if (alpha[i] <= 0.0)
      ub = std::min(ub, grad[i]);
    else {
      free_sum += grad[i];
      ++n_free;
    }
  }
  if (n_free > 0) return free_sum / static_cast<double>(n_free);
  if (std::isinf(ub)) return lb;
  if (std::isinf(lb)) return ub;
  return 0.5 * (lb + ub);
}

}  // namespace

DualSolution solve_dual(const Matrix& samples, const OcsvmConfig& config) {
  validate(config);
  const std::size_t n = samples.rows();
  if (n < 2) throw Error(ErrorKind::TooFewSamples, fmt::format("one-class SVM needs >= 2 samples, got {}", n));
  const double nu_n = config.nu * static_cast<double>(n);
  if (nu_n < 1.0)
    throw Error(ErrorKind::NuOutOfRange, fmt::format("nu * n = {} < 1 leaves the box constraint vacuous", nu_n));

  DualSolution sol;
  sol.gamma = resolve_gamma(config, samples.cols());
  sol.upper_bound = 1.0 / nu_n;
  const double bound = sol.upper_bound;
  const std::uint64_t max_iter = config.max_iterations ? config.max_iterations : std::uint64_t{10000} * n;

  // Feasible start: the first floor(nu n) coordinates at the bound, the
  // remainder of the unit mass on the next one.
  sol.alpha.assign(n, 0.0);
  const auto n_full = static_cast<std::size_t>(std::floor(nu_n));
  for (std::size_t i = 0; i < n_full && i < n; ++i) sol.alpha[i] = bound;
  if (n_full < n) sol.alpha[n_full] = std::max(0.0, 1.0 - bound * static_cast<double>(n_full));

  KernelColumns kernel(samples, sol.gamma, config.kernel_cache_bytes);
  auto& alpha = sol.alpha;
  auto& grad = sol.gradient;
  grad.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    const auto& qi = kernel.column(i);
    for (std::size_t k = 0; k < n; ++k) grad[k] += alpha[i] * qi[k];
  }

  while (sol.iterations < max_iter) {
    // i: may still grow, smallest gradient; j: may still shrink, largest.
    std::size_t i = n, j = n;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (alpha[t] < bound && grad[t] < g_min) {
        g_min = grad[t];
        i = t;
      }
      if (alpha[t] > 0.0 && grad[t] > g_max) {
        g_max = grad[t];
        j = t;
      }
    }
    if (i == n || j == n || g_max - g_min < config.tolerance) {
      sol.converged = true;
      break;
    }

    const auto& qi = kernel.column(i);
    const auto& qj = kernel.column(j);
    double curvature = qi[i] + qj[j] - 2.0 * qi[j];
    if (curvature <= 0.0) curvature = 1e-12;
    double delta = (g_max - g_min) / curvature;
    delta = std::min({delta, bound - alpha[i], alpha[j]});

    alpha[i] = (delta == bound - alpha[i]) ? bound : alpha[i] + delta;
    alpha[j] = (delta == alpha[j]) ? 0.0 : alpha[j] - delta;
    // qi is still resident: it was most recently used before qj and the
    // cache holds at least two columns.
    for (std::size_t k = 0; k < n; ++k) grad[k] += delta * (qi[k] - qj[k]);
    ++sol.iterations;
  }

  sol.rho = compute_rho(alpha, grad, bound);
  return sol;
}

OcsvmModel model_from_dual(const Matrix& samples, const DualSolution& dual, const OcsvmConfig& config) {
  OcsvmModel m;
  m.rho = dual.rho;
  m.gamma = dual.gamma;
  m.nu = config.nu;
  m.tolerance = config.tolerance;
  m.n_train = samples.rows();
  m.iterations = dual.iterations;
  m.converged = dual.converged;
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    if (dual.alpha[i] <= 0.0) continue;
    m.support_vectors.append_row(samples.row(i));
    m.alphas.push_back(dual.alpha[i]);
  }
  return m;
}

OcsvmModel train(const Matrix& samples, const OcsvmConfig& config) {
  const auto dual = solve_dual(samples, config);
  return model_from_dual(samples, dual, config);
}

double OcsvmModel::decision(std::span<const double> x) const {
  if (x.size() != support_vectors.cols())
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("sample has {} features, model {}", x.size(), support_vectors.cols()));
  double sum = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) sum += alphas[i] * rbf_kernel(support_vectors.row(i), x, gamma);
  return sum - rho;
}

std::vector<double> OcsvmModel::decision(const Matrix& xs) const {
  std::vector<double> out(xs.rows());
  for (std::size_t r = 0; r < xs.rows(); ++r) out[r] = decision(xs.row(r));
  return out;
}

void to_json(nlohmann::json& j, const OcsvmModel& m) {
  auto sv = nlohmann::json::array();
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
    const auto row = m.support_vectors.row(i);
    sv.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j = nlohmann::json{{"format", "hpcids-ocsvm"},
                     {"version", OcsvmModel::kVersion},
                     {"kernel", "rbf"},
                     {"gamma", m.gamma},
                     {"rho", m.rho},
                     {"nu", m.nu},
                     {"tolerance", m.tolerance},
                     {"n_train", m.n_train},
                     {"iterations", m.iterations},
                     {"converged", m.converged},
                     {"n_features", m.support_vectors.cols()},
                     {"alphas", m.alphas},
                     {"support_vectors", sv}};
}

void from_json(const nlohmann::json& j, OcsvmModel& m) {
  if (j.at("format") != "hpcids-ocsvm" || j.at("version") != OcsvmModel::kVersion)
    throw Error(ErrorKind::Config, "unsupported one-class SVM document");
  j.at("gamma").get_to(m.gamma);
  j.at("rho").get_to(m.rho);
  j.at("nu").get_to(m.nu);
  j.at("tolerance").get_to(m.tolerance);
  j.at("n_train").get_to(m.n_train);
  j.at("iterations").get_to(m.iterations);
  j.at("converged").get_to(m.converged);
  j.at("alphas").get_to(m.alphas);
  const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
  m.support_vectors = Matrix::from_rows(rows);
  const auto n_features = j.at("n_features").get<std::size_t>();
  if (rows.empty()) m.support_vectors = Matrix(0, n_features);
  if (m.support_vectors.cols() != n_features || m.alphas.size() != m.support_vectors.rows())
    throw Error(ErrorKind::Config, "one-class SVM arrays are inconsistent");
}

}  // namespace hpcids
