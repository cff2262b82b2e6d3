#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpcids/matrix.hpp"

namespace hpcids {

struct OcsvmConfig {
  double nu = 0.2;
  std::optional<double> gamma;  // empty = auto, 1 / n_features
  double tolerance = 1e-4;      // on the maximal KKT violation
  std::uint64_t max_iterations = 0;  // 0 = 10^4 * n
  std::size_t kernel_cache_bytes = std::size_t{256} << 20;
};

void validate(const OcsvmConfig& config);

double resolve_gamma(const OcsvmConfig& config, std::size_t n_features);

// exp(-gamma * |x - y|^2)
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Solution of the one-class dual
//   min 1/2 a'Qa  s.t.  0 <= a_i <= 1/(nu n),  sum a_i = 1
// over the full training set.
struct DualSolution {
  std::vector<double> alpha;
  std::vector<double> gradient;  // (Q a)_i, the decision value plus rho
  double rho = 0.0;
  double upper_bound = 0.0;      // 1 / (nu n)
  double gamma = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;

  double objective() const;  // 1/2 a'Qa = 1/2 sum a_i G_i
};

// SMO with maximal-violating-pair selection; each step moves weight between
// two coordinates so the equality constraint holds throughout.
DualSolution solve_dual(const Matrix& samples, const OcsvmConfig& config);

enum class Verdict { Normal, Anomaly };

// Margin support vectors sit at decision 0 only up to the solver tolerance
// (rho is an average over them), and round-off alone gives +-1e-16. Decisions
// within `band` below zero are therefore still on the boundary; without this a
// whole cluster of duplicate windows can flip to Anomaly.
inline constexpr double kBoundaryEpsilon = 1e-9;

constexpr Verdict verdict(double decision, double band = kBoundaryEpsilon) {
  return decision >= -band ? Verdict::Normal : Verdict::Anomaly;
}

struct OcsvmModel {
  static constexpr int kVersion = 1;

  Matrix support_vectors;
  std::vector<double> alphas;
  double rho = 0.0;
  double gamma = 0.0;
  double nu = 0.0;
  double tolerance = 0.0;  // KKT tolerance the dual was solved to
  std::size_t n_train = 0;
  std::uint64_t iterations = 0;
  bool converged = true;

  double decision(std::span<const double> x) const;
  std::vector<double> decision(const Matrix& xs) const;
  Verdict predict(std::span<const double> x) const {
    return verdict(decision(x), band());
  }
  double band() const { return std::max(tolerance, kBoundaryEpsilon); }

  bool operator==(const OcsvmModel&) const = default;
};

OcsvmModel train(const Matrix& samples, const OcsvmConfig& config);

// Keeps the coordinates with alpha > 0 as support vectors.
OcsvmModel model_from_dual(const Matrix& samples, const DualSolution& dual, const OcsvmConfig& config);

void to_json(nlohmann::json& j, const OcsvmModel& m);
void from_json(const nlohmann::json& j, OcsvmModel& m);

}  // namespace hpcids
