#pragma once

// Learned perception costmap: a fully connected ReLU network over the object
// pose expressed in the camera frame plus a one-hot class code.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgprm/perception.hpp"

namespace sgprm {

/// Raw network inputs: object centroid in the camera frame (3), face normal
/// in the camera frame (3), one-hot class (|vocabulary|).
struct FeatureEncoder {
  std::vector<std::string> class_vocabulary;
  Eigen::VectorXd mean;   // per-feature offset applied before the first layer
  Eigen::VectorXd scale;  // per-feature divisor applied before the first layer

  static constexpr int kGeometricFeatures = 6;

  int dim() const { return kGeometricFeatures + static_cast<int>(class_vocabulary.size()); }

  /// Throws DomainError for a class outside the vocabulary.
  int class_index(const std::string& class_name) const;

  void encode(const CameraPose& cam, const ObjectNode& obj, Eigen::Ref<Eigen::VectorXd> out) const;
};

struct TrainConfig {
  int epochs = 300;
  int batch_size = 64;
  double learning_rate = 5e-4;
  /// Step size anneals along a cosine from learning_rate down to
  /// learning_rate * final_lr_fraction at the last epoch.
  double final_lr_fraction = 0.01;
  std::vector<int> hidden_sizes{128, 128, 128};
  std::uint64_t seed = 0;
  double holdout_fraction = 0.1;

  /// Five 256-unit layers on 50000 samples; much slower than the default.
  static TrainConfig full_scale();
};

struct TrainingReport {
  std::vector<double> train_mse;    // entry 0 is before the first epoch
  std::vector<double> holdout_mse;  // entry 0 is before the first epoch
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> holdout_indices;
};

class CostmapModel final : public PerceptionModel {
 public:
  CostmapModel() = default;

  /// He-initialized network with the given hidden widths.
  CostmapModel(FeatureEncoder encoder, const std::vector<int>& hidden_sizes, std::uint64_t seed);

  double object_cost(const CameraPose& cam, const ObjectNode& obj) const override;
  void object_costs(std::span<const CameraPose> cams, const ObjectNode& obj,
                    std::span<double> out) const override;
  std::string kind() const override { return "costmap"; }

  const FeatureEncoder& encoder() const { return encoder_; }
  FeatureEncoder& encoder() { return encoder_; }
  std::vector<int> hidden_sizes() const;
  int layer_count() const { return static_cast<int>(weights_.size()); }

  /// Unclamped network output, one per column of `features` (raw encoder output).
  Eigen::VectorXd predict_raw(const Eigen::MatrixXd& features) const;

  /// predict_raw clamped to [0, 1].
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;

  // Flat parameter view used by the optimizer and the gradient check. Layout:
  // for each layer, weights column-major followed by biases.
  std::size_t parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& params);

  /// Mean squared error of the raw output against `labels`, and its gradient
  /// w.r.t. parameters() when `gradient` is non-null.
  double loss_and_gradient(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                           Eigen::VectorXd* gradient) const;

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  void set_layers(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases);

 private:
  Eigen::MatrixXd standardize(const Eigen::MatrixXd& features) const;

  FeatureEncoder encoder_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l] is out x in
  std::vector<Eigen::VectorXd> biases_;
};

/// Encoded features (columns) and labels for `samples`; the object of each
/// sample is looked up in `scene` by id.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> encode_samples(const std::vector<PerceptionSample>& samples,
                                                           const SceneGraph& scene,
                                                           const FeatureEncoder& encoder);

/// Fits a costmap to (1 - s)^2 labels by mini-batch RMSProp on the MSE of the
/// raw output. The split into train / held-out sets is drawn from config.seed.
std::pair<CostmapModel, TrainingReport> train_costmap(const std::vector<PerceptionSample>& samples,
                                                      const SceneGraph& scene, const TrainConfig& config);

// Model file: JSON, format 1, doubles written with round-trip precision.
void save_costmap(const CostmapModel& model, const std::filesystem::path& path);
CostmapModel load_costmap(const std::filesystem::path& path);

}  // namespace sgprm
