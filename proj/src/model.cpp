#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "mieeg/classifiers.hpp"

namespace mieeg {

namespace {

enum class BlobKind : std::uint8_t { Qda = 0, Knn = 1, WideNn = 2 };

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void put_matrix(detail::ByteWriter& out, const Eigen::MatrixXd& m) {
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.f64(m(r, c));
}

Eigen::MatrixXd get_matrix(detail::ByteReader& in) {
  const std::uint32_t rows = in.u32();
  const std::uint32_t cols = in.u32();
  in.require(static_cast<std::size_t>(rows) * cols * sizeof(double), "matrix");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = in.f64();
  return m;
}

void put_vector(detail::ByteWriter& out, const Eigen::VectorXd& v) { put_matrix(out, v); }
Eigen::VectorXd get_vector(detail::ByteReader& in) {
  const Eigen::MatrixXd m = get_matrix(in);
  if (m.cols() != 1 && m.size() != 0) throw Error(ErrorCode::ShapeMismatch, "expected a column vector");
  return m;
}

ClassLabel get_label(detail::ByteReader& in) {
  const auto code = in.u8();
  const auto label = label_from_code(code);
  if (!label) throw Error(ErrorCode::LabelOutOfRange, "label code " + std::to_string(code));
  return *label;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Qda: return "qda";
    case ModelKind::FineKnn: return "fine-knn";
    case ModelKind::CosineKnn: return "cos-knn";
    case ModelKind::WideNn: return "wide-nn";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto kind : {ModelKind::Qda, ModelKind::FineKnn, ModelKind::CosineKnn, ModelKind::WideNn})
    if (model_kind_name(kind) == name) return kind;
  return std::nullopt;
}

TrainedModel fit_model(std::span<const FeatureVector> features, const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::Qda: return QdaModel::fit(features, config.qda);
    case ModelKind::FineKnn: return KnnModel::fit(features, config.fine_k, KnnMetric::Euclidean);
    case ModelKind::CosineKnn: return KnnModel::fit(features, config.cosine_k, KnnMetric::Cosine);
    case ModelKind::WideNn: return WideNnModel::fit(features, config.nn);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

Prediction predict(const TrainedModel& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

std::size_t model_dim(const TrainedModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

std::string describe_model(const TrainedModel& model) {
  std::ostringstream s;
  std::visit(overloaded{
                 [&](const QdaModel& m) { s << "model: qda, classes: " << m.classes().size() << ", dim: " << m.dim(); },
                 [&](const KnnModel& m) {
                   std::set<ClassLabel> classes(m.labels().begin(), m.labels().end());
                   s << "model: " << (m.metric() == KnnMetric::Euclidean ? "knn-euclidean" : "knn-cosine")
                     << ", classes: " << classes.size() << ", dim: " << m.dim() << ", k: " << m.k()
                     << ", training points: " << m.size();
                 },
                 [&](const WideNnModel& m) {
                   s << "model: wide-nn, classes: " << kNumClasses << ", dim: " << m.dim() << ", hidden: " << m.hidden();
                 },
             },
             model);
  return s.str();
}

std::vector<char> serialize_model(const TrainedModel& model) {
  detail::ByteWriter out;
  out.bytes(kModelFileMagic);
  out.u16(kModelFileVersion);
  std::visit(overloaded{
                 [&](const QdaModel& m) {
                   out.u8(static_cast<std::uint8_t>(BlobKind::Qda));
                   out.u32(static_cast<std::uint32_t>(m.dim()));
                   for (const auto& row : m.cost())
                     for (double c : row) out.f64(c);
                   out.u8(static_cast<std::uint8_t>(m.classes().size()));
                   for (const auto& cls : m.classes()) {
                     out.u8(static_cast<std::uint8_t>(label_code(cls.label)));
                     out.f64(cls.prior);
                     put_vector(out, cls.mean);
                     put_matrix(out, cls.covariance);
                   }
                 },
                 [&](const KnnModel& m) {
                   out.u8(static_cast<std::uint8_t>(BlobKind::Knn));
                   out.u32(static_cast<std::uint32_t>(m.dim()));
                   out.u8(static_cast<std::uint8_t>(m.metric()));
                   out.u32(static_cast<std::uint32_t>(m.k()));
                   out.u32(static_cast<std::uint32_t>(m.size()));
                   for (ClassLabel l : m.labels()) out.u8(static_cast<std::uint8_t>(label_code(l)));
                   for (std::size_t i = 0; i < m.size(); ++i)
                     for (double v : m.point(i)) out.f64(v);
                 },
                 [&](const WideNnModel& m) {
                   out.u8(static_cast<std::uint8_t>(BlobKind::WideNn));
                   out.u32(static_cast<std::uint32_t>(m.dim()));
                   put_matrix(out, m.w1);
                   put_vector(out, m.b1);
                   put_matrix(out, m.w2);
                   put_vector(out, m.b2);
                   put_vector(out, m.input_mean);
                   put_vector(out, m.input_scale);
                 },
             },
             model);
  return out.buffer();
}

TrainedModel deserialize_model(std::vector<char> bytes) {
  detail::ByteReader in(std::move(bytes));
  if (in.remaining() < kModelFileMagic.size() || in.bytes(kModelFileMagic.size()) != kModelFileMagic)
    throw Error(ErrorCode::BadMagic, "expected \"MDL1\" file signature");
  const std::uint16_t version = in.u16();
  if (version != kModelFileVersion) throw Error(ErrorCode::UnsupportedVersion, "MDL1 version " + std::to_string(version));
  const auto kind = static_cast<BlobKind>(in.u8());
  const std::uint32_t dim = in.u32();

  TrainedModel result = [&]() -> TrainedModel {
    switch (kind) {
      case BlobKind::Qda: {
        CostMatrix cost{};
        for (auto& row : cost)
          for (double& c : row) c = in.f64();
        const std::uint8_t n = in.u8();
        std::vector<QdaModel::ClassParams> classes;
        for (std::uint8_t i = 0; i < n; ++i) {
          QdaModel::ClassParams p{get_label(in), in.f64(), {}, {}};
          p.mean = get_vector(in);
          p.covariance = get_matrix(in);
          classes.push_back(std::move(p));
        }
        return QdaModel::from_params(std::move(classes), cost, false);
      }
      case BlobKind::Knn: {
        const auto metric = in.u8();
        if (metric > 1) throw Error(ErrorCode::ShapeMismatch, "unknown KNN metric " + std::to_string(metric));
        const std::uint32_t k = in.u32();
        const std::uint32_t n = in.u32();
        std::vector<FeatureVector> points(n);
        for (auto& p : points) p.label = get_label(in);
        in.require(static_cast<std::size_t>(n) * dim * sizeof(double), "KNN training matrix");
        for (auto& p : points) {
          p.values.resize(dim);
          for (double& v : p.values) v = in.f64();
        }
        return KnnModel::fit(points, k, static_cast<KnnMetric>(metric));
      }
      case BlobKind::WideNn: {
        WideNnModel m;
        m.w1 = get_matrix(in);
        m.b1 = get_vector(in);
        m.w2 = get_matrix(in);
        m.b2 = get_vector(in);
        m.input_mean = get_vector(in);
        m.input_scale = get_vector(in);
        if (m.w1.cols() != m.b1.size() || m.w2.rows() != m.w1.cols() || m.w2.cols() != static_cast<Eigen::Index>(kNumClasses) ||
            m.b2.size() != m.w2.cols() || m.input_mean.size() != m.w1.rows() || m.input_scale.size() != m.w1.rows())
          throw Error(ErrorCode::ShapeMismatch, "inconsistent network layer shapes");
        return m;
      }
    }
    throw Error(ErrorCode::ShapeMismatch, "unknown model kind " + std::to_string(static_cast<int>(kind)));
  }();
  if (model_dim(result) != dim) throw Error(ErrorCode::ShapeMismatch, "declared dimension differs from parameters");
  if (in.remaining() != 0) throw Error(ErrorCode::ShapeMismatch, "trailing bytes after model body");
  return result;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  detail::write_file(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  try {
    return deserialize_model(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace mieeg
