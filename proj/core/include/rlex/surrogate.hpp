#pragma once

#include "rlex/common.hpp"
#include "rlex/objective.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rlex {

/// Uniform (or Latin-hypercube) sampling of the parameter box. For full
/// grids, eta is the axis spacing and axis points are lo, lo+eta, ... up to
/// hi; for sparse grids, eta is the effective spacing (max nearest-neighbour
/// distance among the samples), recorded so the budget formula stays
/// evaluable.
struct ParameterGrid {
  Box box;
  double eta = 0.0;
  bool sparse = false;
  std::vector<int> axis_counts;  // per-axis point counts (full grids only)
  MatrixXd points;               // M x l, one sample per row

  std::int64_t size() const { return points.rows(); }
};

/// Full axis-aligned grid of spacing eta. Throws if the cardinality exceeds
/// the cap, naming the eta that would fit and suggesting sparse mode.
ParameterGrid build_grid(const Box& box, double eta, std::int64_t cardinality_cap = 1000000);

/// Seeded Latin hypercube with the effective spacing convention above.
ParameterGrid build_sparse_grid(const Box& box, std::int64_t points, std::uint64_t seed);

/// Forward difference (Jbar(theta + c e_j) - Jbar(theta)) / c.
double finite_diff(const ObjectiveEvaluator& ev, const VectorXd& theta, int j, double c);

/// Finite-difference gradient samples over a grid: values(i, j) = gtilde_j at
/// grid point i. Evaluations are independent and run in parallel.
struct GradientSamples {
  ParameterGrid grid;
  double c = 0.0;
  MatrixXd values;  // M x l

  int param_dim() const { return static_cast<int>(values.cols()); }
};

GradientSamples sample_gradient_grid(const ObjectiveEvaluator& ev, const ParameterGrid& grid,
                                     double c);

// ---------------------------------------------------------------------------
// Multi-kernel surrogate over random features.
// ---------------------------------------------------------------------------

struct KernelSpec {
  enum class Type { gaussian, linear, poly2 };
  Type type = Type::gaussian;
  double bandwidth = 1.0;  // gaussian only
};

std::string to_string(KernelSpec::Type t);
KernelSpec::Type kernel_type_from_string(const std::string& s);

/// Realized feature map for a kernel dictionary: random Fourier features for
/// Gaussian kernels (seeded), exact coordinate/constant features for the
/// linear kernel, exact degree-2 monomials for poly2.
class FeatureMap {
 public:
  struct Feature {
    enum class Kind { cosine, coordinate, constant, monomial2 };
    Kind kind;
    double scale = 1.0;
    VectorXd w;       // cosine frequency
    double phase = 0.0;
    int i = 0, j = 0;  // monomial2 / coordinate indices
  };

  FeatureMap() = default;
  FeatureMap(const std::vector<KernelSpec>& dictionary, int random_budget, int param_dim,
             std::uint64_t seed);

  int dim() const { return static_cast<int>(features_.size()); }
  int param_dim() const { return param_dim_; }

  VectorXd eval(const VectorXd& theta) const;
  /// Gradient of feature k at theta.
  VectorXd feature_gradient(int k, const VectorXd& theta) const;
  /// Per-feature Lipschitz constants over the given box (global for cosine
  /// and coordinate features, box-dependent for monomials).
  VectorXd lipschitz(const Box& box) const;
  /// Exact per-feature interval enclosure over the box.
  void enclosure(const Box& box, VectorXd& lo, VectorXd& hi) const;

  const std::vector<Feature>& features() const { return features_; }

 private:
  int param_dim_ = 0;
  std::vector<Feature> features_;
};

/// Fitted per-component kernel expansions ghat_j(theta) = alpha_j^T k(theta),
/// reproducible from (dictionary, random_budget, feature_seed).
struct Surrogate {
  std::vector<KernelSpec> dictionary;
  int random_budget = 0;
  std::uint64_t feature_seed = 0;
  FeatureMap features;
  MatrixXd alpha;  // l x D
  Box box;
  double eta = 0.0;
  bool sparse_grid = false;

  int param_dim() const { return static_cast<int>(alpha.rows()); }
  int feature_dim() const { return static_cast<int>(alpha.cols()); }

  double eval(int j, const VectorXd& theta) const;
  VectorXd eval_all(const VectorXd& theta) const;
  VectorXd gradient(int j, const VectorXd& theta) const;
  /// Per-component Lipschitz bounds sum_k |alpha_jk| Lip(feature_k) over box.
  VectorXd lipschitz(const Box& box) const;
  /// Interval enclosure of every component over the box (feature intervals
  /// combined with the alpha signs).
  void enclosure(const Box& box, VectorXd& lo, VectorXd& hi) const;
};

/// Ridge-regularized least squares per component over the feature map
/// (normal equations; dual form when the sample count is below the feature
/// dimension). ridge = 0 is accepted only when the system is nonsingular.
Surrogate fit_mkl(const GradientSamples& samples, const std::vector<KernelSpec>& dictionary,
                  int random_budget, double ridge, std::uint64_t feature_seed);

/// zeta_j = max_i |ghat_j(theta_i) - gtilde_j(theta_i)| over the training grid.
VectorXd sample_error(const Surrogate& surrogate, const GradientSamples& samples);

/// Sampled Lipschitz estimate: safety * max over neighbour pairs of
/// |v_a - v_b| / ||theta_a - theta_b||. Duplicate points with differing
/// values are rejected.
double lipschitz_from_samples(const MatrixXd& points, const VectorXd& values, double safety);

/// Per-component sampled Lipschitz constants over grid samples, using axis
/// neighbours on full grids and nearest neighbours on sparse ones.
VectorXd lipschitz_from_grid(const GradientSamples& samples, double safety);

/// Closed-form fallback bound (H^2 G^2 R^2 + L^2 R^2) / (1 - gamma^4).
double lipschitz_theoretical(const SmoothnessConstants& consts);

/// Certified per-component error budget:
/// e_j = c*L_g_j + 2*m_bar/c + zeta_j + eta*(L_ghat_j + L_gtilde_j).
struct ErrorBudget {
  double c = 0.0;
  double m_bar = 0.0;
  double eta = 0.0;
  VectorXd L_g;
  VectorXd L_ghat;
  VectorXd L_gtilde;
  VectorXd zeta;
  VectorXd e;
};

ErrorBudget assemble_budget(double c, double m_bar, const VectorXd& L_g, const VectorXd& zeta,
                            double eta, const VectorXd& L_ghat, const VectorXd& L_gtilde);

}  // namespace rlex
