#include "sgprm/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json_util.hpp"
#include "sgprm/errors.hpp"
#include "sgprm/rng.hpp"

namespace sgprm {

using detail::json;

namespace {

// The output unit is 1 - relu(z). Small initial output weights and a positive
// bias start every sample on its active side.
constexpr double kOutputBiasInit = 0.5;
constexpr double kOutputWeightScale = 0.1;

}  // namespace

int FeatureEncoder::class_index(const std::string& class_name) const {
  const auto it = std::find(class_vocabulary.begin(), class_vocabulary.end(), class_name);
  if (it == class_vocabulary.end()) throw DomainError("costmap: unknown object class '" + class_name + "'");
  return static_cast<int>(it - class_vocabulary.begin());
}

void FeatureEncoder::encode(const CameraPose& cam, const ObjectNode& obj, Eigen::Ref<Eigen::VectorXd> out) const {
  const int cls = class_index(obj.class_name);
  out.setZero();
  out.head<3>() = cam.to_camera_frame(obj.centroid);
  out.segment<3>(3) = cam.direction_to_camera_frame(obj.face_normal);
  out[kGeometricFeatures + cls] = 1.0;
}

TrainConfig TrainConfig::full_scale() {
  TrainConfig c;
  c.hidden_sizes = {256, 256, 256, 256, 256};
  c.epochs = 100;
  c.batch_size = 256;
  return c;
}

CostmapModel::CostmapModel(FeatureEncoder encoder, const std::vector<int>& hidden_sizes, std::uint64_t seed)
    : encoder_(std::move(encoder)) {
  const int in_dim = encoder_.dim();
  if (encoder_.mean.size() != in_dim) encoder_.mean = Eigen::VectorXd::Zero(in_dim);
  if (encoder_.scale.size() != in_dim) encoder_.scale = Eigen::VectorXd::Ones(in_dim);

  Rng rng(mix_seed(seed ^ 0x5eedc0de));
  std::normal_distribution<double> normal(0.0, 1.0);
  int prev = in_dim;
  std::vector<int> widths = hidden_sizes;
  widths.push_back(1);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const int w = widths[l];
    if (w <= 0) throw InvalidConfigurationError("costmap: layer widths must be positive");
    const double std_dev = std::sqrt(2.0 / prev) * (l + 1 == widths.size() ? kOutputWeightScale : 1.0);
    Eigen::MatrixXd weights(w, prev);
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < weights.rows(); ++r) weights(r, c) = std_dev * normal(rng);
    }
    weights_.push_back(std::move(weights));
    biases_.push_back(Eigen::VectorXd::Zero(w));
    prev = w;
  }
  biases_.back()[0] = kOutputBiasInit;
}

std::vector<int> CostmapModel::hidden_sizes() const {
  std::vector<int> out;
  for (std::size_t l = 0; l + 1 < weights_.size(); ++l) out.push_back(static_cast<int>(weights_[l].rows()));
  return out;
}

void CostmapModel::set_layers(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases) {
  if (weights.empty() || weights.size() != biases.size()) throw ParseError("costmap: inconsistent layer count");
  Eigen::Index prev = encoder_.dim();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].cols() != prev || biases[l].size() != weights[l].rows()) {
      throw ParseError("costmap: layer " + std::to_string(l) + " has inconsistent shape");
    }
    prev = weights[l].rows();
  }
  if (prev != 1) throw ParseError("costmap: output layer must have one unit");
  weights_ = std::move(weights);
  biases_ = std::move(biases);
}

Eigen::MatrixXd CostmapModel::standardize(const Eigen::MatrixXd& features) const {
  return (features.colwise() - encoder_.mean).array().colwise() / encoder_.scale.array();
}

Eigen::VectorXd CostmapModel::predict_raw(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd a = standardize(features);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) {
      a = z.cwiseMax(0.0);
    } else {
      return (1.0 - z.row(0).array().max(0.0)).matrix().transpose();
    }
  }
  return {};
}

Eigen::VectorXd CostmapModel::predict(const Eigen::MatrixXd& features) const {
  return predict_raw(features).cwiseMax(0.0).cwiseMin(1.0);
}

double CostmapModel::object_cost(const CameraPose& cam, const ObjectNode& obj) const {
  Eigen::MatrixXd f(encoder_.dim(), 1);
  encoder_.encode(cam, obj, f.col(0));
  return predict(f)[0];
}

void CostmapModel::object_costs(std::span<const CameraPose> cams, const ObjectNode& obj,
                                std::span<double> out) const {
  if (cams.empty()) return;
  Eigen::MatrixXd f(encoder_.dim(), static_cast<Eigen::Index>(cams.size()));
  for (std::size_t i = 0; i < cams.size(); ++i) encoder_.encode(cams[i], obj, f.col(static_cast<Eigen::Index>(i)));
  const Eigen::VectorXd y = predict(f);
  for (std::size_t i = 0; i < cams.size(); ++i) out[i] = y[static_cast<Eigen::Index>(i)];
}

std::size_t CostmapModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::VectorXd CostmapModel::parameters() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    p.segment(k, weights_[l].size()) = Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    k += weights_[l].size();
    p.segment(k, biases_[l].size()) = biases_[l];
    k += biases_[l].size();
  }
  return p;
}

void CostmapModel::set_parameters(const Eigen::VectorXd& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count()) {
    throw DomainError("costmap: parameter vector has the wrong size");
  }
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) = params.segment(k, weights_[l].size());
    k += weights_[l].size();
    biases_[l] = params.segment(k, biases_[l].size());
    k += biases_[l].size();
  }
}

double CostmapModel::loss_and_gradient(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                                       Eigen::VectorXd* gradient) const {
  const Eigen::Index n = features.cols();
  const std::size_t layers = weights_.size();
  std::vector<Eigen::MatrixXd> acts;  // acts[l] is the input of layer l
  acts.reserve(layers + 1);
  acts.push_back(standardize(features));
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = weights_[l] * acts.back();
    z.colwise() += biases_[l];
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const Eigen::RowVectorXd z_out = acts.back().row(0);
  const Eigen::RowVectorXd err = (1.0 - z_out.array().max(0.0)).matrix() - labels.transpose();
  const double loss = err.squaredNorm() / static_cast<double>(n);
  if (gradient == nullptr) return loss;

  gradient->resize(static_cast<Eigen::Index>(parameter_count()));
  std::vector<Eigen::Index> offsets(layers);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = k;
    k += weights_[l].size() + biases_[l].size();
  }

  // d(raw)/dz = -1 where the output unit is active.
  Eigen::MatrixXd delta = (z_out.array() > 0.0).select(-(2.0 / static_cast<double>(n)) * err, 0.0);  // 1 x n
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd gw = delta * acts[l].transpose();
    const Eigen::VectorXd gb = delta.rowwise().sum();
    gradient->segment(offsets[l], gw.size()) = Eigen::Map<const Eigen::VectorXd>(gw.data(), gw.size());
    gradient->segment(offsets[l] + gw.size(), gb.size()) = gb;
    if (l > 0) {
      Eigen::MatrixXd back = weights_[l].transpose() * delta;
      // ReLU derivative: acts[l] holds the post-activation of layer l-1.
      delta = (acts[l].array() > 0.0).select(back, 0.0);
    }
  }
  return loss;
}

// --- training ------------------------------------------------------------------

std::pair<Eigen::MatrixXd, Eigen::VectorXd> encode_samples(const std::vector<PerceptionSample>& samples,
                                                           const SceneGraph& scene,
                                                           const FeatureEncoder& encoder) {
  Eigen::MatrixXd x(encoder.dim(), static_cast<Eigen::Index>(samples.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ObjectNode* obj = scene.find_object(samples[i].object_id);
    if (obj == nullptr) throw DomainError("dataset references unknown object '" + samples[i].object_id + "'");
    encoder.encode(samples[i].camera, *obj, x.col(static_cast<Eigen::Index>(i)));
    y[static_cast<Eigen::Index>(i)] = samples[i].label;
  }
  return {std::move(x), std::move(y)};
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, std::span<const std::size_t> idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
  return out;
}

}  // namespace

std::pair<CostmapModel, TrainingReport> train_costmap(const std::vector<PerceptionSample>& samples,
                                                      const SceneGraph& scene, const TrainConfig& config) {
  if (samples.empty()) throw DomainError("train_costmap: empty dataset");
  if (config.epochs < 0 || config.batch_size <= 0 || !(config.learning_rate > 0.0) ||
      !(config.final_lr_fraction > 0.0 && config.final_lr_fraction <= 1.0)) {
    throw InvalidConfigurationError("train_costmap: invalid training configuration");
  }

  FeatureEncoder encoder;
  encoder.class_vocabulary = scene.class_vocabulary;
  auto [x, y] = encode_samples(samples, scene, encoder);

  TrainingReport report;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(config.seed));
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t holdout = static_cast<std::size_t>(std::floor(config.holdout_fraction * samples.size()));
  if (holdout == 0 && samples.size() >= 2 && config.holdout_fraction > 0.0) holdout = 1;
  report.holdout_indices.assign(order.begin(), order.begin() + holdout);
  report.train_indices.assign(order.begin() + holdout, order.end());

  const Eigen::MatrixXd x_train = gather_columns(x, report.train_indices);
  const Eigen::VectorXd y_train = gather(y, report.train_indices);
  const Eigen::MatrixXd x_hold = gather_columns(x, report.holdout_indices);
  const Eigen::VectorXd y_hold = gather(y, report.holdout_indices);

  // Standardize geometric features with training-set statistics; one-hot columns pass through.
  const int dim = encoder.dim();
  encoder.mean = Eigen::VectorXd::Zero(dim);
  encoder.scale = Eigen::VectorXd::Ones(dim);
  const Eigen::Index nt = x_train.cols();
  for (int r = 0; r < FeatureEncoder::kGeometricFeatures; ++r) {
    const double mean = x_train.row(r).mean();
    const double var = (x_train.row(r).array() - mean).square().sum() / static_cast<double>(nt);
    encoder.mean[r] = mean;
    encoder.scale[r] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }

  CostmapModel model(encoder, config.hidden_sizes, config.seed);
  auto record = [&] {
    report.train_mse.push_back(model.loss_and_gradient(x_train, y_train, nullptr));
    report.holdout_mse.push_back(x_hold.cols() > 0 ? model.loss_and_gradient(x_hold, y_hold, nullptr)
                                                   : std::nan(""));
  };
  record();

  constexpr double kDecay = 0.9;
  constexpr double kEps = 1e-8;
  Eigen::VectorXd params = model.parameters();
  Eigen::VectorXd sq_avg = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd grad;
  std::vector<std::size_t> batch_order(static_cast<std::size_t>(nt));
  std::iota(batch_order.begin(), batch_order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double progress = config.epochs > 1 ? static_cast<double>(epoch) / (config.epochs - 1) : 1.0;
    const double lr = config.learning_rate *
                      (config.final_lr_fraction + (1.0 - config.final_lr_fraction) * 0.5 * (1.0 + std::cos(kPi * progress)));
    std::shuffle(batch_order.begin(), batch_order.end(), rng);
    for (std::size_t start = 0; start < batch_order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(batch_order.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::span<const std::size_t> idx(batch_order.data() + start, end - start);
      const Eigen::MatrixXd xb = gather_columns(x_train, idx);
      const Eigen::VectorXd yb = gather(y_train, idx);
      model.loss_and_gradient(xb, yb, &grad);
      sq_avg = kDecay * sq_avg + (1.0 - kDecay) * grad.cwiseAbs2();
      params.array() -= lr * grad.array() / (sq_avg.array().sqrt() + kEps);
      model.set_parameters(params);
    }
    record();
  }
  return {std::move(model), std::move(report)};
}

// --- file I/O ------------------------------------------------------------------

void save_costmap(const CostmapModel& model, const std::filesystem::path& path) {
  json j;
  j["format"] = 1;
  j["kind"] = "costmap";
  j["classes"] = model.encoder().class_vocabulary;
  j["feature_mean"] = detail::to_array(model.encoder().mean);
  j["feature_scale"] = detail::to_array(model.encoder().scale);
  j["layers"] = json::array();
  for (int l = 0; l < model.layer_count(); ++l) {
    const auto& w = model.weights()[static_cast<std::size_t>(l)];
    json values = json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) values.push_back(w(r, c));
    }
    j["layers"].push_back({{"rows", w.rows()},
                           {"cols", w.cols()},
                           {"weights", std::move(values)},
                           {"bias", detail::to_array(model.biases()[static_cast<std::size_t>(l)])}});
  }
  detail::write_file(path, j.dump() + "\n");
}

namespace {

CostmapModel costmap_from_json(const json& j);

}  // namespace

CostmapModel load_costmap(const std::filesystem::path& path) {
  const json j = detail::parse_json_text(detail::read_file(path), "costmap");
  try {
    return costmap_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("costmap: ") + e.what());
  }
}

namespace {

CostmapModel costmap_from_json(const json& j) {
  detail::check_format(j, 1, "costmap");
  if (detail::get_string(j, "kind", "costmap") != "costmap") throw ParseError("costmap: wrong file kind");

  FeatureEncoder enc;
  for (const auto& c : detail::require(j, "classes", "costmap")) enc.class_vocabulary.push_back(c.get<std::string>());
  auto read_vec = [&](const char* key, Eigen::Index n) {
    const json& a = detail::require(j, key, "costmap");
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n) {
      throw ParseError(std::string("costmap: '") + key + "' has the wrong length");
    }
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
    return v;
  };
  enc.mean = read_vec("feature_mean", enc.dim());
  enc.scale = read_vec("feature_scale", enc.dim());

  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  for (const auto& layer : detail::require(j, "layers", "costmap")) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const json& values = layer.at("weights");
    if (static_cast<Eigen::Index>(values.size()) != rows * cols) throw ParseError("costmap: weight count mismatch");
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = values[static_cast<std::size_t>(r * cols + c)].get<double>();
    }
    const json& b = layer.at("bias");
    if (static_cast<Eigen::Index>(b.size()) != rows) throw ParseError("costmap: bias length mismatch");
    Eigen::VectorXd bias(rows);
    for (Eigen::Index r = 0; r < rows; ++r) bias[r] = b[static_cast<std::size_t>(r)].get<double>();
    weights.push_back(std::move(w));
    biases.push_back(std::move(bias));
  }

  CostmapModel model;
  model.encoder() = std::move(enc);
  model.set_layers(std::move(weights), std::move(biases));
  return model;
}

}  // namespace

}  // namespace sgprm
