#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mieeg/classifiers.hpp"

namespace mieeg {

namespace {

constexpr int kMaxLearningRateHalvings = 60;

Eigen::MatrixXd standardized(const WideNnModel& m, const Eigen::MatrixXd& inputs) {
  return (inputs.rowwise() - m.input_mean.transpose()).array().rowwise() / m.input_scale.transpose().array();
}

Eigen::MatrixXd feature_matrix(std::span<const FeatureVector> features) {
  const auto n = static_cast<Eigen::Index>(features.size());
  const auto d = static_cast<Eigen::Index>(features.front().values.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = features[static_cast<std::size_t>(i)].values;
    if (static_cast<Eigen::Index>(v.size()) != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature vectors");
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), d);
  }
  return x;
}

double full_loss(const WideNnModel& m, const Eigen::MatrixXd& x, std::span<const ClassLabel> y) {
  return nn_loss_and_gradient(m, x, y).loss;
}

}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

WideNnModel WideNnModel::initialize(std::size_t dim, const NnConfig& config) {
  if (dim == 0 || config.hidden <= 0) throw Error(ErrorCode::InvalidArgument, "network needs positive input and hidden width");
  const auto d = static_cast<Eigen::Index>(dim);
  const auto h = static_cast<Eigen::Index>(config.hidden);
  const auto k = static_cast<Eigen::Index>(kNumClasses);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> he(0.0, std::sqrt(2.0 / static_cast<double>(dim)));
  WideNnModel m;
  m.w1.resize(d, h);
  for (Eigen::Index j = 0; j < h; ++j)
    for (Eigen::Index i = 0; i < d; ++i) m.w1(i, j) = he(rng);
  m.b1 = Eigen::VectorXd::Zero(h);
  m.w2 = Eigen::MatrixXd::Zero(h, k);
  m.b2 = Eigen::VectorXd::Zero(k);
  m.input_mean = Eigen::VectorXd::Zero(d);
  m.input_scale = Eigen::VectorXd::Ones(d);
  return m;
}

NnGradient nn_loss_and_gradient(const WideNnModel& m, const Eigen::MatrixXd& inputs, std::span<const ClassLabel> labels) {
  if (static_cast<std::size_t>(inputs.rows()) != labels.size() || labels.empty())
    throw Error(ErrorCode::LengthMismatch, "inputs and labels disagree in length");
  if (static_cast<std::size_t>(inputs.cols()) != m.dim())
    throw Error(ErrorCode::DimensionMismatch, "input width differs from network input");
  const double n = static_cast<double>(labels.size());

  const Eigen::MatrixXd xs = standardized(m, inputs);
  const Eigen::MatrixXd pre = (xs * m.w1).rowwise() + m.b1.transpose();
  const Eigen::MatrixXd hid = pre.cwiseMax(0.0);
  const Eigen::MatrixXd logits = (hid * m.w2).rowwise() + m.b2.transpose();

  NnGradient g;
  Eigen::MatrixXd delta(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - peak).exp();
    const double z = e.sum();
    const int y = label_code(labels[static_cast<std::size_t>(i)]);
    loss -= logits(i, y) - peak - std::log(z);
    delta.row(i) = e / z;
    delta(i, y) -= 1.0;
  }
  delta /= n;
  g.loss = loss / n;

  g.w2 = hid.transpose() * delta;
  g.b2 = delta.colwise().sum().transpose();
  const Eigen::MatrixXd d_hid = (delta * m.w2.transpose()).array() * (pre.array() > 0.0).cast<double>();
  g.w1 = xs.transpose() * d_hid;
  g.b1 = d_hid.colwise().sum().transpose();
  return g;
}

WideNnModel WideNnModel::fit(std::span<const FeatureVector> features, const NnConfig& config) {
  if (features.empty()) throw Error(ErrorCode::EmptyDataset, "network needs training data");
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& f : features) ++counts[label_code(f.label)];
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2)
    throw Error(ErrorCode::ClassAbsent, "network needs at least two classes");
  if (!(config.learning_rate > 0.0) || config.max_epochs < 0)
    throw Error(ErrorCode::InvalidArgument, "bad network training configuration");

  const Eigen::MatrixXd x = feature_matrix(features);
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteSample, "non-finite training features");
  std::vector<ClassLabel> y;
  for (const auto& f : features) y.push_back(f.label);

  WideNnModel m = initialize(static_cast<std::size_t>(x.cols()), config);
  if (config.standardize_inputs) {
    m.input_mean = x.colwise().mean().transpose();
    const Eigen::VectorXd var = (x.rowwise() - m.input_mean.transpose()).array().square().colwise().mean().transpose();
    m.input_scale = var.unaryExpr([](double v) { return v > 0.0 ? std::sqrt(v) : 1.0; });
  }

  double loss = full_loss(m, x, y);
  if (!std::isfinite(loss)) throw Error(ErrorCode::DivergenceDetected, "initial loss is not finite");
  m.loss_history.push_back(loss);

  const std::size_t n = y.size();
  const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(config.seed + 1);

  double lr = config.learning_rate;
  int halvings = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    WideNnModel trial = m;
    if (batch < n) std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      Eigen::MatrixXd xb(static_cast<Eigen::Index>(stop - start), x.cols());
      std::vector<ClassLabel> yb;
      for (std::size_t i = start; i < stop; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = x.row(static_cast<Eigen::Index>(order[i]));
        yb.push_back(y[order[i]]);
      }
      const NnGradient g = nn_loss_and_gradient(trial, xb, yb);
      trial.w1 -= lr * g.w1;
      trial.b1 -= lr * g.b1;
      trial.w2 -= lr * g.w2;
      trial.b2 -= lr * g.b2;
    }
    const double next = full_loss(trial, x, y);
    if (std::isfinite(next) && next <= loss) {
      trial.loss_history = std::move(m.loss_history);
      m = std::move(trial);
      loss = next;
      m.loss_history.push_back(loss);
    } else {
      lr *= 0.5;
      if (++halvings > kMaxLearningRateHalvings) {
        if (!std::isfinite(next)) throw Error(ErrorCode::DivergenceDetected, "loss stays non-finite");
        break;
      }
    }
  }
  if (!m.w1.allFinite() || !m.w2.allFinite() || !m.b1.allFinite() || !m.b2.allFinite())
    throw Error(ErrorCode::DivergenceDetected, "non-finite network parameters");
  return m;
}

Eigen::VectorXd WideNnModel::logits(std::span<const double> x) const {
  if (x.size() != dim())
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim()) + " features, got " + std::to_string(x.size()));
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd xs = (xv - input_mean).cwiseQuotient(input_scale);
  const Eigen::VectorXd hid = (w1.transpose() * xs + b1).cwiseMax(0.0);
  return w2.transpose() * hid + b2;
}

Prediction WideNnModel::predict(std::span<const double> x) const {
  const Eigen::VectorXd s = softmax(logits(x));
  Prediction p;
  std::size_t best = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    p.scores[c] = s(static_cast<Eigen::Index>(c));
    if (p.scores[c] > p.scores[best]) best = c;
  }
  p.label = static_cast<ClassLabel>(best);
  return p;
}

}  // namespace mieeg
