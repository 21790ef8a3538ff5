#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mieeg/core.hpp"
#include "mieeg/features.hpp"

namespace mieeg {

/// Label plus one score per class code (posterior, vote share or softmax).
/// For QDA and KNN, classes absent from training score 0.
struct Prediction {
  ClassLabel label{ClassLabel::Left};
  std::array<double, kNumClasses> scores{};
};

/// cost[true class][predicted class].
using CostMatrix = std::array<std::array<double, kNumClasses>, kNumClasses>;
CostMatrix zero_one_cost();

// ---------------------------------------------------------------------------
// Quadratic discriminant analysis
// ---------------------------------------------------------------------------

struct QdaConfig {
  bool regularize{true};
  /// Sigma_k += lambda * (trace(Sigma_k) / d) * I; lambda * I when the trace is 0.
  double lambda{1e-6};
  CostMatrix cost = zero_one_cost();
};

class QdaModel {
 public:
  struct ClassParams {
    ClassLabel label;
    double prior;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // regularized
  };

  /// Per-class maximum-likelihood mean and covariance, empirical priors.
  /// Throws ClassAbsent (< 2 classes), SingularCovariance, DimensionMismatch.
  static QdaModel fit(std::span<const FeatureVector> features, const QdaConfig& config = {});
  /// Rebuilds the cached factorizations; used by deserialization.
  static QdaModel from_params(std::vector<ClassParams> classes, const CostMatrix& cost, bool require_pd = true);

  /// Scores are posteriors. Label minimizes expected cost over the trained
  /// classes, ties to the lowest code.
  Prediction predict(std::span<const double> x) const;
  /// log P(x | C_k) + log P(C_k) for each trained class, in class order.
  std::vector<double> log_joint(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  const std::vector<ClassParams>& classes() const { return classes_; }
  double log_det(std::size_t i) const { return log_det_[i]; }
  const CostMatrix& cost() const { return cost_; }

 private:
  std::size_t dim_ = 0;
  std::vector<ClassParams> classes_;
  std::vector<Eigen::MatrixXd> chol_lower_;
  std::vector<double> log_det_;
  CostMatrix cost_ = zero_one_cost();
};

// ---------------------------------------------------------------------------
// k-nearest neighbours
// ---------------------------------------------------------------------------

enum class KnnMetric : std::uint8_t { Euclidean = 0, Cosine = 1 };

struct Neighbor {
  double distance;
  std::size_t index;
};

class KnnModel {
 public:
  /// Stores the training set verbatim. Throws EmptyDataset, KTooLarge,
  /// ZeroNormVector (cosine with a zero training vector), DimensionMismatch.
  static KnnModel fit(std::span<const FeatureVector> features, std::size_t k, KnnMetric metric);

  /// Majority vote of the k nearest points. Distance ties go to the lower
  /// training index; vote ties to the smaller summed distance, then the
  /// lowest class code. Scores are vote shares.
  Prediction predict(std::span<const double> x) const;
  /// The k nearest training points, closest first.
  std::vector<Neighbor> neighbors(std::span<const double> x) const;

  /// Euclidean: ||a - b||. Cosine: 1 - cos(a, b).
  double distance(std::span<const double> a, std::size_t train_index) const;

  std::size_t k() const { return k_; }
  KnnMetric metric() const { return metric_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<ClassLabel>& labels() const { return labels_; }
  std::span<const double> point(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

 private:
  std::size_t k_ = 1;
  KnnMetric metric_ = KnnMetric::Euclidean;
  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::vector<double> norms_;
  std::vector<ClassLabel> labels_;
};

// ---------------------------------------------------------------------------
// Wide fully connected network: d -> hidden (ReLU) -> K softmax
// ---------------------------------------------------------------------------

struct NnConfig {
  int hidden{10};
  double learning_rate{0.5};
  int max_epochs{500};
  std::size_t batch_size{0};  // 0 = full batch
  std::uint64_t seed{0};
  bool standardize_inputs{true};
};

class WideNnModel {
 public:
  Eigen::MatrixXd w1;  // d x h
  Eigen::VectorXd b1;  // h
  Eigen::MatrixXd w2;  // h x K
  Eigen::VectorXd b2;  // K
  Eigen::VectorXd input_mean;   // d
  Eigen::VectorXd input_scale;  // d, applied as (x - mean) / scale
  std::vector<double> loss_history;  // full-training-set loss after each accepted epoch

  /// He-initialized hidden layer, zero output layer. No training.
  static WideNnModel initialize(std::size_t dim, const NnConfig& config);

  /// Gradient descent on mean cross-entropy. An epoch that raises the full
  /// training loss is rolled back and the learning rate halved, so
  /// loss_history never increases. Throws ClassAbsent, DivergenceDetected.
  static WideNnModel fit(std::span<const FeatureVector> features, const NnConfig& config = {});

  std::size_t dim() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.cols()); }

  Eigen::VectorXd logits(std::span<const double> x) const;
  Prediction predict(std::span<const double> x) const;
};

struct NnGradient {
  double loss{0.0};
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

/// Mean cross-entropy over rows of `inputs` (raw features, standardized with
/// the model's input transform) and its backpropagated gradient.
NnGradient nn_loss_and_gradient(const WideNnModel& model, const Eigen::MatrixXd& inputs,
                                std::span<const ClassLabel> labels);

/// Max-subtracted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// ---------------------------------------------------------------------------
// Shared contract
// ---------------------------------------------------------------------------

enum class ModelKind : std::uint8_t { Qda, FineKnn, CosineKnn, WideNn };

std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct ModelConfig {
  ModelKind kind{ModelKind::FineKnn};
  QdaConfig qda{};
  std::size_t fine_k{1};
  std::size_t cosine_k{10};
  NnConfig nn{};
};

using TrainedModel = std::variant<QdaModel, KnnModel, WideNnModel>;

/// Requires at least two classes in `features`.
TrainedModel fit_model(std::span<const FeatureVector> features, const ModelConfig& config);
Prediction predict(const TrainedModel& model, std::span<const double> x);
std::size_t model_dim(const TrainedModel& model);
std::string describe_model(const TrainedModel& model);

// MDL1: "MDL1" | u16 version | u8 kind (0 qda, 1 knn, 2 nn) | u32 dim | body,
// little-endian, parameters stored as raw f64.
inline constexpr std::string_view kModelFileMagic = "MDL1";
inline constexpr std::uint16_t kModelFileVersion = 1;

std::vector<char> serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::vector<char> bytes);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace mieeg
