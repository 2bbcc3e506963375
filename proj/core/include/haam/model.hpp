#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "haam/dataset.hpp"
#include "haam/graph.hpp"
#include "haam/spectral.hpp"
#include "haam/types.hpp"

namespace haam {

struct DenseLayer {
  Eigen::MatrixXd weight;  // in x out
  Eigen::RowVectorXd bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward network F -> hidden... -> C. Rectifier on hidden layers,
/// identity on the output layer.
struct MlpParams {
  std::vector<DenseLayer> layers;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().weight.rows(); }
  Index output_dim() const { return layers.empty() ? 0 : layers.back().weight.cols(); }
  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Glorot-uniform weights, zero biases.
MlpParams init_mlp(Index input_dim, std::span<const int> hidden, Index output_dim, std::uint64_t seed);

/// Intermediate activations kept for the backward pass.
struct MlpCache {
  std::vector<Matrix> inputs;  // input of each layer
  std::vector<Matrix> pre;     // pre-activation of each hidden layer
};

/// Raw logits Y0. Throws NumericError on non-finite features.
Matrix mlp_forward(const Matrix& x, const MlpParams& p, MlpCache* cache = nullptr);

/// Gradients of all layers given d/d output. Shapes mirror `p`.
MlpParams mlp_backward(const MlpParams& p, const MlpCache& cache, const Matrix& grad_out);

struct CompatibilityMatrix {
  Eigen::MatrixXd h;  // C x C
  int dimension_id = 0;

  friend bool operator==(const CompatibilityMatrix&, const CompatibilityMatrix&) = default;
};

/// (H)_{c1 c2} = #{ordered entries (i,j): i in train of class c1, j in train
/// of class c2} / #{ordered entries}. Warns and returns zeros when the graph
/// has no edges or the training set is empty.
CompatibilityMatrix init_compatibility(const DimensionGraph& g, std::span<const int> labels,
                                       std::span<const Index> train, int n_classes);

/// Numerically stable row-wise softmax.
Matrix row_softmax(const Matrix& scores);

struct DimensionForward {
  Matrix propagated;  // L_hat * Y0
  Matrix scores;      // S_d = L_hat * Y0 * H_d
  Matrix probs;       // softmax(S_d)
};

DimensionForward forward_dimension(const RescaledLaplacian& lap, const ComposedCoeffs& composed, const Matrix& y0,
                                   const CompatibilityMatrix& h);

/// Sum over dimensions and training nodes of the cross-entropy of each
/// score row, plus alpha * sum of squared MLP weights (biases excluded).
double loss(std::span<const Matrix> scores, std::span<const int> labels, std::span<const Index> train,
            const MlpParams& mlp, double alpha);

/// All learnable state. gamma0 inside each GammaParams is held fixed.
struct ModelParams {
  MlpParams mlp;
  std::vector<GammaParams> gammas;
  std::vector<CompatibilityMatrix> compat;

  int n_dims() const { return static_cast<int>(gammas.size()); }
};

struct TrainConfig {
  int k = 5;                     // Chebyshev degree of each branch
  std::vector<int> hidden{64};   // embedding size(s)
  double learning_rate = 1e-3;
  double alpha = 1e-5;
  int max_epochs = 1000;
  int patience = 100;
  std::uint64_t seed = 0;
  double gamma0 = 1.0;
  int threads = 1;

  void validate() const;
};

ModelParams init_model(const DatasetBundle& data, const TrainConfig& cfg);

/// Everything the backward pass needs from one forward evaluation.
struct ForwardPass {
  MlpCache mlp_cache;
  Matrix y0;
  std::vector<FilterCoeffs> filters;
  std::vector<DimensionForward> dims;

  std::vector<Matrix> scores() const;
  std::vector<Matrix> probs() const;
};

ForwardPass forward(const ModelParams& params, std::span<const RescaledLaplacian> laps, const Matrix& features,
                    int threads = 1);

/// Analytic reverse-mode gradient of `loss` with respect to every parameter
/// group. The result has the same shapes as `params`; gamma0 entries are zero.
ModelParams backward(const ModelParams& params, std::span<const RescaledLaplacian> laps, const ForwardPass& fwd,
                     std::span<const int> labels, std::span<const Index> train, double alpha, int threads = 1);

/// Adam with bias correction. Moments are stored in the shape of ModelParams.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Applies one step and projects every gamma entry onto [0, inf).
  void step(ModelParams& params, const ModelParams& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  ModelParams m_;
  ModelParams v_;
};

struct ModelState {
  ModelParams params;
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_f1_micro = 0.0;
};

struct TrainResult {
  ModelState state;
  std::vector<Matrix> probs;  // per-dimension Y_d at the restored snapshot
  std::vector<double> loss_trace;
  std::vector<double> val_trace;
};

/// Full-batch training with early stopping on validation F1-micro (computed
/// from the argmax of the mean of the per-dimension predictions). The best
/// snapshot is restored before returning.
TrainResult train(const DatasetBundle& data, std::span<const RescaledLaplacian> laps, const TrainConfig& cfg);
TrainResult train(const DatasetBundle& data, const TrainConfig& cfg);

/// Argmax of the mean of the per-dimension probability matrices, lowest index on ties.
std::vector<int> mean_prediction(std::span<const Matrix> probs);

}  // namespace haam
