#include "rlex/surrogate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace rlex {

namespace {

std::vector<int> full_grid_axis_counts(const Box& box, double eta) {
  std::vector<int> counts(static_cast<std::size_t>(box.dim()));
  for (int d = 0; d < box.dim(); ++d) {
    const double width = box.width(d);
    counts[static_cast<std::size_t>(d)] =
        width <= 0.0 ? 1 : static_cast<int>(std::floor(width / eta + 1e-9)) + 1;
  }
  return counts;
}

}  // namespace

ParameterGrid build_grid(const Box& box, double eta, std::int64_t cardinality_cap) {
  if (!(eta > 0.0)) throw std::invalid_argument("build_grid: eta must be positive");
  if (box.dim() < 1) throw std::invalid_argument("build_grid: empty box");

  const std::vector<int> counts = full_grid_axis_counts(box, eta);
  std::int64_t cardinality = 1;
  for (int n : counts) {
    if (cardinality > cardinality_cap / n) {
      cardinality = cardinality_cap + 1;
      break;
    }
    cardinality *= n;
  }
  if (cardinality > cardinality_cap) {
    const double dims = static_cast<double>(box.dim());
    const double per_axis = std::pow(static_cast<double>(cardinality_cap), 1.0 / dims);
    const double max_width = box.widths().maxCoeff();
    const double eta_hint = max_width / std::max(1.0, per_axis - 1.0);
    throw std::invalid_argument(
        "build_grid: grid cardinality exceeds the cap of " + std::to_string(cardinality_cap) +
        " points; increase eta to roughly " + std::to_string(eta_hint) +
        " or use sparse mode (build_sparse_grid)");
  }

  ParameterGrid grid;
  grid.box = box;
  grid.eta = eta;
  grid.sparse = false;
  grid.axis_counts = counts;
  grid.points.resize(cardinality, box.dim());
  std::vector<int> idx(static_cast<std::size_t>(box.dim()), 0);
  for (std::int64_t i = 0; i < cardinality; ++i) {
    for (int d = 0; d < box.dim(); ++d)
      grid.points(i, d) = box.lo[d] + eta * idx[static_cast<std::size_t>(d)];
    // Odometer increment, last axis fastest.
    for (int d = box.dim() - 1; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] < counts[static_cast<std::size_t>(d)]) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
  return grid;
}

ParameterGrid build_sparse_grid(const Box& box, std::int64_t points, std::uint64_t seed) {
  if (points < 2) throw std::invalid_argument("build_sparse_grid: need at least 2 points");
  if (box.dim() < 1) throw std::invalid_argument("build_sparse_grid: empty box");

  ParameterGrid grid;
  grid.box = box;
  grid.sparse = true;
  grid.points.resize(points, box.dim());

  // Latin hypercube: per axis, a seeded shuffle of strata with jitter.
  for (int d = 0; d < box.dim(); ++d) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(d));
    std::vector<std::int64_t> strata(static_cast<std::size_t>(points));
    for (std::int64_t i = 0; i < points; ++i) strata[static_cast<std::size_t>(i)] = i;
    for (std::int64_t i = points - 1; i > 0; --i) {
      const auto k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(k)]);
    }
    const double width = box.width(d);
    for (std::int64_t i = 0; i < points; ++i) {
      const double u = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + rng.uniform()) /
                       static_cast<double>(points);
      grid.points(i, d) = box.lo[d] + width * u;
    }
  }

  // Effective spacing: max over samples of the nearest-neighbour distance.
  double eta = 0.0;
  for (std::int64_t i = 0; i < points; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k < points; ++k) {
      if (k == i) continue;
      nearest = std::min(nearest, (grid.points.row(i) - grid.points.row(k)).norm());
    }
    eta = std::max(eta, nearest);
  }
  grid.eta = eta;
  return grid;
}

double finite_diff(const ObjectiveEvaluator& ev, const VectorXd& theta, int j, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("finite_diff: c must be positive");
  if (j < 0 || j >= theta.size()) throw std::invalid_argument("finite_diff: coordinate out of range");
  VectorXd shifted = theta;
  shifted[j] += c;
  return (evaluate_jbar(ev, shifted) - evaluate_jbar(ev, theta)) / c;
}

GradientSamples sample_gradient_grid(const ObjectiveEvaluator& ev, const ParameterGrid& grid,
                                     double c) {
  if (!(c > 0.0)) throw std::invalid_argument("sample_gradient_grid: c must be positive");
  const std::int64_t M = grid.size();
  const int l = grid.box.dim();

  GradientSamples out;
  out.grid = grid;
  out.c = c;
  out.values.resize(M, l);
  parallel_for(M, [&](std::int64_t i) {
    const VectorXd theta = grid.points.row(i);
    const double base = evaluate_jbar(ev, theta);
    VectorXd shifted = theta;
    for (int j = 0; j < l; ++j) {
      shifted[j] = theta[j] + c;
      out.values(i, j) = (evaluate_jbar(ev, shifted) - base) / c;
      shifted[j] = theta[j];
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Feature map
// ---------------------------------------------------------------------------

std::string to_string(KernelSpec::Type t) {
  switch (t) {
    case KernelSpec::Type::gaussian: return "gaussian";
    case KernelSpec::Type::linear: return "linear";
    case KernelSpec::Type::poly2: return "poly2";
  }
  return "gaussian";
}

KernelSpec::Type kernel_type_from_string(const std::string& s) {
  if (s == "gaussian") return KernelSpec::Type::gaussian;
  if (s == "linear") return KernelSpec::Type::linear;
  if (s == "poly2") return KernelSpec::Type::poly2;
  throw std::invalid_argument("unknown kernel type: " + s);
}

FeatureMap::FeatureMap(const std::vector<KernelSpec>& dictionary, int random_budget,
                       int param_dim, std::uint64_t seed)
    : param_dim_(param_dim) {
  if (param_dim < 1) throw std::invalid_argument("FeatureMap: param_dim must be >= 1");
  if (dictionary.empty()) throw std::invalid_argument("FeatureMap: empty dictionary");

  int gaussians = 0;
  for (const auto& k : dictionary) {
    if (k.type == KernelSpec::Type::gaussian) {
      if (!(k.bandwidth > 0.0))
        throw std::invalid_argument("FeatureMap: gaussian bandwidth must be positive");
      ++gaussians;
    }
  }
  const int per_gaussian = gaussians > 0 ? std::max(1, random_budget / gaussians) : 0;

  int kernel_index = 0;
  for (const auto& kernel : dictionary) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(kernel_index++));
    switch (kernel.type) {
      case KernelSpec::Type::gaussian: {
        const double scale = std::sqrt(2.0 / per_gaussian);
        for (int f = 0; f < per_gaussian; ++f) {
          Feature feat;
          feat.kind = Feature::Kind::cosine;
          feat.scale = scale;
          feat.w.resize(param_dim);
          for (int d = 0; d < param_dim; ++d) feat.w[d] = rng.normal() / kernel.bandwidth;
          feat.phase = rng.uniform(0.0, 2.0 * M_PI);
          features_.push_back(std::move(feat));
        }
        break;
      }
      case KernelSpec::Type::linear: {
        for (int d = 0; d < param_dim; ++d) {
          Feature feat;
          feat.kind = Feature::Kind::coordinate;
          feat.i = d;
          features_.push_back(std::move(feat));
        }
        Feature one;
        one.kind = Feature::Kind::constant;
        features_.push_back(std::move(one));
        break;
      }
      case KernelSpec::Type::poly2: {
        Feature one;
        one.kind = Feature::Kind::constant;
        features_.push_back(std::move(one));
        for (int d = 0; d < param_dim; ++d) {
          Feature feat;
          feat.kind = Feature::Kind::coordinate;
          feat.i = d;
          features_.push_back(std::move(feat));
        }
        for (int i = 0; i < param_dim; ++i) {
          for (int j = i; j < param_dim; ++j) {
            Feature feat;
            feat.kind = Feature::Kind::monomial2;
            feat.i = i;
            feat.j = j;
            features_.push_back(std::move(feat));
          }
        }
        break;
      }
    }
  }
}

VectorXd FeatureMap::eval(const VectorXd& theta) const {
  VectorXd out(dim());
  for (int k = 0; k < dim(); ++k) {
    const Feature& f = features_[static_cast<std::size_t>(k)];
    switch (f.kind) {
      case Feature::Kind::cosine:
        out[k] = f.scale * std::cos(f.w.dot(theta) + f.phase);
        break;
      case Feature::Kind::coordinate:
        out[k] = theta[f.i];
        break;
      case Feature::Kind::constant:
        out[k] = 1.0;
        break;
      case Feature::Kind::monomial2:
        out[k] = theta[f.i] * theta[f.j];
        break;
    }
  }
  return out;
}

VectorXd FeatureMap::feature_gradient(int k, const VectorXd& theta) const {
  const Feature& f = features_[static_cast<std::size_t>(k)];
  VectorXd grad = VectorXd::Zero(param_dim_);
  switch (f.kind) {
    case Feature::Kind::cosine:
      grad = -f.scale * std::sin(f.w.dot(theta) + f.phase) * f.w;
      break;
    case Feature::Kind::coordinate:
      grad[f.i] = 1.0;
      break;
    case Feature::Kind::constant:
      break;
    case Feature::Kind::monomial2:
      if (f.i == f.j) {
        grad[f.i] = 2.0 * theta[f.i];
      } else {
        grad[f.i] = theta[f.j];
        grad[f.j] = theta[f.i];
      }
      break;
  }
  return grad;
}

VectorXd FeatureMap::lipschitz(const Box& box) const {
  VectorXd lip(dim());
  for (int k = 0; k < dim(); ++k) {
    const Feature& f = features_[static_cast<std::size_t>(k)];
    switch (f.kind) {
      case Feature::Kind::cosine:
        lip[k] = f.scale * f.w.norm();
        break;
      case Feature::Kind::coordinate:
        lip[k] = 1.0;
        break;
      case Feature::Kind::constant:
        lip[k] = 0.0;
        break;
      case Feature::Kind::monomial2: {
        const double mi = std::max(std::abs(box.lo[f.i]), std::abs(box.hi[f.i]));
        const double mj = std::max(std::abs(box.lo[f.j]), std::abs(box.hi[f.j]));
        lip[k] = f.i == f.j ? 2.0 * mi : std::hypot(mi, mj);
        break;
      }
    }
  }
  return lip;
}

namespace {

// Range of cos over [zlo, zhi].
void cosine_range(double zlo, double zhi, double& out_lo, double& out_hi) {
  if (zhi - zlo >= 2.0 * M_PI) {
    out_lo = -1.0;
    out_hi = 1.0;
    return;
  }
  out_lo = std::min(std::cos(zlo), std::cos(zhi));
  out_hi = std::max(std::cos(zlo), std::cos(zhi));
  // cos attains +1 at 2*pi*k and -1 at pi + 2*pi*k inside the interval.
  const double two_pi = 2.0 * M_PI;
  if (std::floor(zhi / two_pi) >= std::ceil(zlo / two_pi)) out_hi = 1.0;
  if (std::floor((zhi - M_PI) / two_pi) >= std::ceil((zlo - M_PI) / two_pi)) out_lo = -1.0;
}

void product_range(double alo, double ahi, double blo, double bhi, double& out_lo,
                   double& out_hi) {
  const double p1 = alo * blo, p2 = alo * bhi, p3 = ahi * blo, p4 = ahi * bhi;
  out_lo = std::min(std::min(p1, p2), std::min(p3, p4));
  out_hi = std::max(std::max(p1, p2), std::max(p3, p4));
}

}  // namespace

void FeatureMap::enclosure(const Box& box, VectorXd& lo, VectorXd& hi) const {
  lo.resize(dim());
  hi.resize(dim());
  for (int k = 0; k < dim(); ++k) {
    const Feature& f = features_[static_cast<std::size_t>(k)];
    switch (f.kind) {
      case Feature::Kind::cosine: {
        double zlo = f.phase, zhi = f.phase;
        for (int d = 0; d < param_dim_; ++d) {
          const double a = f.w[d] * box.lo[d];
          const double b = f.w[d] * box.hi[d];
          zlo += std::min(a, b);
          zhi += std::max(a, b);
        }
        double clo, chi;
        cosine_range(zlo, zhi, clo, chi);
        lo[k] = f.scale * clo;
        hi[k] = f.scale * chi;
        break;
      }
      case Feature::Kind::coordinate:
        lo[k] = box.lo[f.i];
        hi[k] = box.hi[f.i];
        break;
      case Feature::Kind::constant:
        lo[k] = hi[k] = 1.0;
        break;
      case Feature::Kind::monomial2:
        if (f.i == f.j) {
          const double a = box.lo[f.i], b = box.hi[f.i];
          hi[k] = std::max(a * a, b * b);
          lo[k] = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(a * a, b * b);
        } else {
          product_range(box.lo[f.i], box.hi[f.i], box.lo[f.j], box.hi[f.j], lo[k], hi[k]);
        }
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Surrogate
// ---------------------------------------------------------------------------

double Surrogate::eval(int j, const VectorXd& theta) const {
  return alpha.row(j).dot(features.eval(theta));
}

VectorXd Surrogate::eval_all(const VectorXd& theta) const {
  return alpha * features.eval(theta);
}

VectorXd Surrogate::gradient(int j, const VectorXd& theta) const {
  VectorXd grad = VectorXd::Zero(param_dim());
  for (int k = 0; k < feature_dim(); ++k) {
    const double a = alpha(j, k);
    if (a == 0.0) continue;
    grad += a * features.feature_gradient(k, theta);
  }
  return grad;
}

VectorXd Surrogate::lipschitz(const Box& over) const {
  return alpha.cwiseAbs() * features.lipschitz(over);
}

void Surrogate::enclosure(const Box& over, VectorXd& lo, VectorXd& hi) const {
  VectorXd flo, fhi;
  features.enclosure(over, flo, fhi);
  const int l = param_dim();
  lo.resize(l);
  hi.resize(l);
  for (int j = 0; j < l; ++j) {
    double acc_lo = 0.0, acc_hi = 0.0;
    for (int k = 0; k < feature_dim(); ++k) {
      const double a = alpha(j, k);
      if (a >= 0.0) {
        acc_lo += a * flo[k];
        acc_hi += a * fhi[k];
      } else {
        acc_lo += a * fhi[k];
        acc_hi += a * flo[k];
      }
    }
    lo[j] = acc_lo;
    hi[j] = acc_hi;
  }
}

Surrogate fit_mkl(const GradientSamples& samples, const std::vector<KernelSpec>& dictionary,
                  int random_budget, double ridge, std::uint64_t feature_seed) {
  if (ridge < 0.0) throw std::invalid_argument("fit_mkl: ridge must be non-negative");
  const std::int64_t M = samples.values.rows();
  const int l = samples.param_dim();
  if (M < 1) throw std::invalid_argument("fit_mkl: no samples");

  Surrogate sur;
  sur.dictionary = dictionary;
  sur.random_budget = random_budget;
  sur.feature_seed = feature_seed;
  sur.features = FeatureMap(dictionary, random_budget, l, feature_seed);
  sur.box = samples.grid.box;
  sur.eta = samples.grid.eta;
  sur.sparse_grid = samples.grid.sparse;
  const int D = sur.features.dim();

  if (M < D / 10)
    std::cerr << "fit_mkl: warning: " << M << " samples for " << D
              << " features; consider a denser grid or a smaller feature budget\n";

  constexpr double kSingularRel = 1e-12;
  if (M <= D) {
    // Dual form: alpha = K^T (K K^T + ridge I)^{-1} y, the minimum-norm
    // ridge solution; interpolates as ridge -> 0 when the Gram is regular.
    MatrixXd K(M, D);
    for (std::int64_t i = 0; i < M; ++i) K.row(i) = sur.features.eval(samples.grid.points.row(i));
    MatrixXd gram = K * K.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    const VectorXd& lam = eig.eigenvalues();
    const double lam_max = std::max(lam.maxCoeff(), 0.0);
    if (ridge == 0.0 && (lam_max <= 0.0 || lam.minCoeff() < kSingularRel * lam_max))
      throw std::invalid_argument("fit_mkl: singular normal equations with ridge = 0; pass ridge > 0");
    MatrixXd beta = eig.eigenvectors().transpose() * samples.values;  // M x l
    for (std::int64_t r = 0; r < M; ++r) {
      const double denom = lam[r] + ridge;
      if (denom <= kSingularRel * std::max(lam_max, 1.0))
        beta.row(r).setZero();
      else
        beta.row(r) /= denom;
    }
    sur.alpha = (K.transpose() * (eig.eigenvectors() * beta)).transpose();  // l x D
  } else {
    // Primal normal equations, streamed in row blocks.
    MatrixXd G = MatrixXd::Zero(D, D);
    MatrixXd R = MatrixXd::Zero(D, l);
    constexpr std::int64_t kBlock = 2048;
    MatrixXd K(std::min(kBlock, M), D);
    for (std::int64_t start = 0; start < M; start += kBlock) {
      const std::int64_t rows = std::min(kBlock, M - start);
      for (std::int64_t i = 0; i < rows; ++i)
        K.row(i) = sur.features.eval(samples.grid.points.row(start + i));
      const auto kb = K.topRows(rows);
      G.noalias() += kb.transpose() * kb;
      R.noalias() += kb.transpose() * samples.values.middleRows(start, rows);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G);
    const VectorXd& lam = eig.eigenvalues();
    const double lam_max = std::max(lam.maxCoeff(), 0.0);
    if (ridge == 0.0 && (lam_max <= 0.0 || lam.minCoeff() < kSingularRel * lam_max))
      throw std::invalid_argument("fit_mkl: singular normal equations with ridge = 0; pass ridge > 0");
    MatrixXd rhs = eig.eigenvectors().transpose() * R;  // D x l
    for (int r = 0; r < D; ++r) {
      const double denom = lam[r] + ridge;
      if (denom <= kSingularRel * std::max(lam_max, 1.0))
        rhs.row(r).setZero();
      else
        rhs.row(r) /= denom;
    }
    sur.alpha = (eig.eigenvectors() * rhs).transpose();  // l x D
  }
  return sur;
}

VectorXd sample_error(const Surrogate& surrogate, const GradientSamples& samples) {
  const std::int64_t M = samples.values.rows();
  const int l = samples.param_dim();
  VectorXd zeta = VectorXd::Zero(l);
  for (std::int64_t i = 0; i < M; ++i) {
    const VectorXd pred = surrogate.eval_all(samples.grid.points.row(i));
    for (int j = 0; j < l; ++j)
      zeta[j] = std::max(zeta[j], std::abs(pred[j] - samples.values(i, j)));
  }
  return zeta;
}

double lipschitz_from_samples(const MatrixXd& points, const VectorXd& values, double safety) {
  const std::int64_t N = points.rows();
  if (N < 2) throw std::invalid_argument("lipschitz_from_samples: need at least 2 points");
  if (values.size() != N) throw std::invalid_argument("lipschitz_from_samples: size mismatch");

  double max_slope = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    for (std::int64_t k = i + 1; k < N; ++k) {
      const double dist = (points.row(i) - points.row(k)).norm();
      const double dv = std::abs(values[i] - values[k]);
      if (dist == 0.0) {
        if (dv > 0.0)
          throw std::invalid_argument(
              "lipschitz_from_samples: duplicate points with differing values");
        continue;
      }
      max_slope = std::max(max_slope, dv / dist);
    }
  }
  return safety * max_slope;
}

VectorXd lipschitz_from_grid(const GradientSamples& samples, double safety) {
  const std::int64_t M = samples.values.rows();
  const int l = samples.param_dim();
  VectorXd lip = VectorXd::Zero(l);
  if (M < 2) return lip;

  if (!samples.grid.sparse) {
    const auto& counts = samples.grid.axis_counts;
    const int dims = samples.grid.box.dim();
    std::vector<std::int64_t> strides(static_cast<std::size_t>(dims), 1);
    for (int d = dims - 2; d >= 0; --d)
      strides[static_cast<std::size_t>(d)] =
          strides[static_cast<std::size_t>(d) + 1] * counts[static_cast<std::size_t>(d) + 1];
    for (std::int64_t i = 0; i < M; ++i) {
      std::int64_t rem = i;
      for (int d = 0; d < dims; ++d) {
        const std::int64_t coord = rem / strides[static_cast<std::size_t>(d)];
        rem %= strides[static_cast<std::size_t>(d)];
        if (coord + 1 >= counts[static_cast<std::size_t>(d)]) continue;
        const std::int64_t nb = i + strides[static_cast<std::size_t>(d)];
        const double dist = (samples.grid.points.row(i) - samples.grid.points.row(nb)).norm();
        if (dist == 0.0) continue;
        for (int j = 0; j < l; ++j)
          lip[j] = std::max(lip[j],
                            std::abs(samples.values(i, j) - samples.values(nb, j)) / dist);
      }
    }
  } else {
    // Nearest neighbours by brute force; adequate for sparse grids of up to
    // a few thousand points.
    constexpr int kNeighbours = 8;
    for (std::int64_t i = 0; i < M; ++i) {
      std::vector<std::pair<double, std::int64_t>> dists;
      dists.reserve(static_cast<std::size_t>(M) - 1);
      for (std::int64_t k = 0; k < M; ++k) {
        if (k == i) continue;
        dists.emplace_back((samples.grid.points.row(i) - samples.grid.points.row(k)).norm(), k);
      }
      const std::size_t take = std::min<std::size_t>(kNeighbours, dists.size());
      std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(take),
                        dists.end());
      for (std::size_t t = 0; t < take; ++t) {
        const auto [dist, k] = dists[t];
        if (dist == 0.0) continue;
        for (int j = 0; j < l; ++j)
          lip[j] = std::max(lip[j],
                            std::abs(samples.values(i, j) - samples.values(k, j)) / dist);
      }
    }
  }
  return safety * lip;
}

double lipschitz_theoretical(const SmoothnessConstants& consts) {
  if (!(consts.gamma >= 0.0 && consts.gamma < 1.0))
    throw std::invalid_argument("lipschitz_theoretical: gamma must lie in [0, 1)");
  const double H = static_cast<double>(consts.horizon);
  const double g4 = std::pow(consts.gamma, 4);
  return (H * H * consts.G * consts.G * consts.R * consts.R +
          consts.L * consts.L * consts.R * consts.R) /
         (1.0 - g4);
}

ErrorBudget assemble_budget(double c, double m_bar, const VectorXd& L_g, const VectorXd& zeta,
                            double eta, const VectorXd& L_ghat, const VectorXd& L_gtilde) {
  if (!(c > 0.0)) throw std::invalid_argument("assemble_budget: c must be positive");
  if (m_bar < 0.0 || eta < 0.0)
    throw std::invalid_argument("assemble_budget: m_bar and eta must be non-negative");
  const auto l = L_g.size();
  if (zeta.size() != l || L_ghat.size() != l || L_gtilde.size() != l)
    throw std::invalid_argument("assemble_budget: component count mismatch");
  for (Eigen::Index j = 0; j < l; ++j) {
    if (L_g[j] < 0.0 || zeta[j] < 0.0 || L_ghat[j] < 0.0 || L_gtilde[j] < 0.0)
      throw std::invalid_argument("assemble_budget: negative component");
  }

  ErrorBudget budget;
  budget.c = c;
  budget.m_bar = m_bar;
  budget.eta = eta;
  budget.L_g = L_g;
  budget.L_ghat = L_ghat;
  budget.L_gtilde = L_gtilde;
  budget.zeta = zeta;
  budget.e =
      (c * L_g).array() + 2.0 * m_bar / c + zeta.array() + eta * (L_ghat + L_gtilde).array();
  return budget;
}

}  // namespace rlex
