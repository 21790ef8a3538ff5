#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mieeg/classifiers.hpp"

namespace mieeg {

namespace {

// Relative eigenvalue floor below which an unregularized covariance is
// treated as singular.
constexpr double kSingularTolerance = 1e-12;

}  // namespace

CostMatrix zero_one_cost() {
  CostMatrix c{};
  for (std::size_t i = 0; i < kNumClasses; ++i)
    for (std::size_t j = 0; j < kNumClasses; ++j) c[i][j] = i == j ? 0.0 : 1.0;
  return c;
}

QdaModel QdaModel::fit(std::span<const FeatureVector> features, const QdaConfig& config) {
  if (features.empty()) throw Error(ErrorCode::EmptyDataset, "QDA needs training data");
  const std::size_t d = features.front().values.size();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "zero-length feature vectors");

  std::array<std::vector<const FeatureVector*>, kNumClasses> by_class;
  for (const auto& f : features) {
    if (f.values.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature vectors");
    by_class[label_code(f.label)].push_back(&f);
  }
  const auto present = std::count_if(by_class.begin(), by_class.end(), [](const auto& v) { return !v.empty(); });
  if (present < 2) throw Error(ErrorCode::ClassAbsent, "QDA needs at least two classes");

  const double n_total = static_cast<double>(features.size());
  std::vector<ClassParams> classes;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& members = by_class[c];
    if (members.empty()) continue;
    const double n = static_cast<double>(members.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (const auto* f : members) mean += Eigen::Map<const Eigen::VectorXd>(f->values.data(), static_cast<Eigen::Index>(d));
    mean /= n;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto* f : members) {
      const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(f->values.data(), static_cast<Eigen::Index>(d)) - mean;
      cov.noalias() += diff * diff.transpose();
    }
    cov /= n;
    if (config.regularize) {
      const double trace = cov.trace();
      const double ridge = trace > 0.0 ? config.lambda * trace / static_cast<double>(d) : config.lambda;
      cov.diagonal().array() += ridge;
    }
    classes.push_back({static_cast<ClassLabel>(c), n / n_total, std::move(mean), std::move(cov)});
  }
  return from_params(std::move(classes), config.cost, true);
}

QdaModel QdaModel::from_params(std::vector<ClassParams> classes, const CostMatrix& cost, bool require_pd) {
  QdaModel m;
  if (classes.empty()) throw Error(ErrorCode::ClassAbsent, "QDA model without classes");
  m.dim_ = static_cast<std::size_t>(classes.front().mean.size());
  m.cost_ = cost;
  for (auto& cls : classes) {
    if (static_cast<std::size_t>(cls.mean.size()) != m.dim_ || static_cast<std::size_t>(cls.covariance.rows()) != m.dim_ ||
        static_cast<std::size_t>(cls.covariance.cols()) != m.dim_)
      throw Error(ErrorCode::DimensionMismatch, "inconsistent QDA parameter shapes");
    // Exact symmetry keeps the factorization independent of which triangle is read.
    cls.covariance = (0.5 * (cls.covariance + cls.covariance.transpose())).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cls.covariance, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = std::max(eig.eigenvalues().maxCoeff(), std::numeric_limits<double>::min());
    if (require_pd && !(lo > kSingularTolerance * hi))
      throw Error(ErrorCode::SingularCovariance,
                  "class '" + std::string(label_name(cls.label)) + "' covariance is singular (min eigenvalue " +
                      std::to_string(lo) + ")");

    const Eigen::LLT<Eigen::MatrixXd> llt(cls.covariance);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::SingularCovariance,
                  "class '" + std::string(label_name(cls.label)) + "' covariance is not positive definite");
    Eigen::MatrixXd lower = llt.matrixL();
    m.log_det_.push_back(2.0 * lower.diagonal().array().log().sum());
    m.chol_lower_.push_back(std::move(lower));
  }
  m.classes_ = std::move(classes);
  return m;
}

std::vector<double> QdaModel::log_joint(std::span<const double> x) const {
  if (x.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim_) + " features, got " + std::to_string(x.size()));
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  std::vector<double> out;
  out.reserve(classes_.size());
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const Eigen::VectorXd diff = xv - classes_[i].mean;
    const Eigen::VectorXd z = chol_lower_[i].triangularView<Eigen::Lower>().solve(diff);
    const double maha = z.squaredNorm();
    out.push_back(std::log(classes_[i].prior) - 0.5 * (static_cast<double>(dim_) * log_2pi + log_det_[i] + maha));
  }
  return out;
}

Prediction QdaModel::predict(std::span<const double> x) const {
  const auto lj = log_joint(x);
  const double peak = *std::max_element(lj.begin(), lj.end());
  double z = 0.0;
  for (double v : lj) z += std::exp(v - peak);

  Prediction p;
  for (std::size_t i = 0; i < classes_.size(); ++i)
    p.scores[label_code(classes_[i].label)] = std::exp(lj[i] - peak) / z;

  double best = std::numeric_limits<double>::infinity();
  for (const auto& candidate : classes_) {
    const int y = label_code(candidate.label);
    double expected = 0.0;
    for (const auto& truth : classes_) {
      const int k = label_code(truth.label);
      expected += p.scores[k] * cost_[k][y];
    }
    if (expected < best) {
      best = expected;
      p.label = candidate.label;
    }
  }
  return p;
}

}  // namespace mieeg
