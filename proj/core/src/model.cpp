#include "haam/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "haam/error.hpp"
#include "haam/log.hpp"
#include "haam/parallel.hpp"

namespace haam {

MlpParams init_mlp(Index input_dim, std::span<const int> hidden, Index output_dim, std::uint64_t seed) {
  if (input_dim <= 0 || output_dim <= 0) throw InvalidInput("init_mlp: layer sizes must be positive");
  std::vector<Index> sizes{input_dim};
  for (int h : hidden) {
    if (h <= 0) throw InvalidInput("init_mlp: hidden sizes must be positive");
    sizes.push_back(h);
  }
  sizes.push_back(output_dim);

  std::mt19937_64 rng(seed);
  MlpParams p;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weight.resize(sizes[l], sizes[l + 1]);
    for (Index i = 0; i < layer.weight.rows(); ++i)
      for (Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = dist(rng);
    layer.bias = Eigen::RowVectorXd::Zero(sizes[l + 1]);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Matrix mlp_forward(const Matrix& x, const MlpParams& p, MlpCache* cache) {
  if (p.layers.empty()) throw InvalidInput("mlp_forward: network has no layers");
  if (x.cols() != p.input_dim()) {
    throw InvalidInput("mlp_forward: features have " + std::to_string(x.cols()) + " columns, network expects " +
                       std::to_string(p.input_dim()));
  }
  if (!x.allFinite()) throw NumericError("mlp_forward: non-finite features");
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix h = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const DenseLayer& layer = p.layers[l];
    if (cache) cache->inputs.push_back(h);
    Matrix z = h * layer.weight;
    z.rowwise() += layer.bias;
    if (l + 1 < p.layers.size()) {
      if (cache) cache->pre.push_back(z);
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

MlpParams mlp_backward(const MlpParams& p, const MlpCache& cache, const Matrix& grad_out) {
  MlpParams grads;
  grads.layers.resize(p.layers.size());
  Matrix g = grad_out;
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    grads.layers[l].weight = cache.inputs[l].transpose() * g;
    grads.layers[l].bias = g.colwise().sum();
    if (l == 0) break;
    Matrix upstream = g * p.layers[l].weight.transpose();
    const Matrix& z = cache.pre[l - 1];
    g = upstream.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

CompatibilityMatrix init_compatibility(const DimensionGraph& g, std::span<const int> labels,
                                       std::span<const Index> train, int n_classes) {
  if (static_cast<Index>(labels.size()) != g.n_nodes()) {
    throw InvalidInput("init_compatibility: label count does not match node count");
  }
  CompatibilityMatrix out;
  out.h = Eigen::MatrixXd::Zero(n_classes, n_classes);
  out.dimension_id = g.dimension_id();
  if (g.n_entries() == 0 || train.empty()) {
    warn("init_compatibility: dimension " + std::to_string(g.dimension_id()) +
         (g.n_entries() == 0 ? " has no edges" : ": training set is empty") + "; compatibility starts at zero");
    return out;
  }

  std::vector<int> train_class(labels.size(), -1);
  for (Index i : train) {
    if (i < 0 || i >= g.n_nodes()) throw InvalidInput("init_compatibility: train index out of range");
    if (train_class[static_cast<std::size_t>(i)] != -1) throw InvalidInput("init_compatibility: duplicate train index");
    const int c = labels[static_cast<std::size_t>(i)];
    if (c < 0 || c >= n_classes) throw InvalidInput("init_compatibility: label out of range");
    train_class[static_cast<std::size_t>(i)] = c;
  }
  for (Index i : train) {
    const int ci = train_class[static_cast<std::size_t>(i)];
    for (Index j : g.neighbors(i)) {
      const int cj = train_class[static_cast<std::size_t>(j)];
      if (cj >= 0) out.h(ci, cj) += 1.0;
    }
  }
  out.h /= static_cast<double>(g.n_entries());
  return out;
}

Matrix row_softmax(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    const double m = scores.row(i).maxCoeff();
    auto e = (scores.row(i).array() - m).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

DimensionForward forward_dimension(const RescaledLaplacian& lap, const ComposedCoeffs& composed, const Matrix& y0,
                                   const CompatibilityMatrix& h) {
  if (h.h.rows() != y0.cols() || h.h.cols() != y0.cols()) {
    throw InvalidInput("forward_dimension: compatibility matrix does not match class count");
  }
  DimensionForward out;
  out.propagated = apply_cheb(composed.theta_bar, lap, y0);
  out.scores = out.propagated * h.h;
  if (!out.scores.allFinite()) {
    throw NumericError("forward: non-finite scores in dimension " + std::to_string(lap.dimension_id));
  }
  out.probs = row_softmax(out.scores);
  return out;
}

namespace {

double row_cross_entropy(const Matrix& scores, Index i, int label) {
  const double m = scores.row(i).maxCoeff();
  const double lse = m + std::log((scores.row(i).array() - m).exp().sum());
  return lse - scores(i, label);
}

double weight_penalty(const MlpParams& mlp) {
  double s = 0.0;
  for (const auto& layer : mlp.layers) s += layer.weight.squaredNorm();
  return s;
}

}  // namespace

double loss(std::span<const Matrix> scores, std::span<const int> labels, std::span<const Index> train,
            const MlpParams& mlp, double alpha) {
  if (train.empty()) throw InvalidInput("loss: empty training set");
  double total = 0.0;
  for (const Matrix& s : scores) {
    for (Index i : train) total += row_cross_entropy(s, i, labels[static_cast<std::size_t>(i)]);
  }
  return total + alpha * weight_penalty(mlp);
}

std::vector<Matrix> ForwardPass::scores() const {
  std::vector<Matrix> out;
  for (const auto& d : dims) out.push_back(d.scores);
  return out;
}

std::vector<Matrix> ForwardPass::probs() const {
  std::vector<Matrix> out;
  for (const auto& d : dims) out.push_back(d.probs);
  return out;
}

ForwardPass forward(const ModelParams& params, std::span<const RescaledLaplacian> laps, const Matrix& features,
                    int threads) {
  const int n_dims = params.n_dims();
  if (static_cast<int>(laps.size()) != n_dims || static_cast<int>(params.compat.size()) != n_dims) {
    throw InvalidInput("forward: parameter and Laplacian dimension counts differ");
  }
  ForwardPass fwd;
  fwd.y0 = mlp_forward(features, params.mlp, &fwd.mlp_cache);
  fwd.filters.resize(static_cast<std::size_t>(n_dims));
  fwd.dims.resize(static_cast<std::size_t>(n_dims));
  parallel_for(n_dims, threads, [&](int d) {
    const auto ud = static_cast<std::size_t>(d);
    fwd.filters[ud] = filter_coeffs(params.gammas[ud]);
    fwd.dims[ud] = forward_dimension(laps[ud], ComposedCoeffs{fwd.filters[ud].theta_bar}, fwd.y0, params.compat[ud]);
  });
  return fwd;
}

ModelParams backward(const ModelParams& params, std::span<const RescaledLaplacian> laps, const ForwardPass& fwd,
                     std::span<const int> labels, std::span<const Index> train, double alpha, int threads) {
  const int n_dims = params.n_dims();
  ModelParams grads;
  grads.gammas.resize(static_cast<std::size_t>(n_dims));
  grads.compat.resize(static_cast<std::size_t>(n_dims));
  std::vector<Matrix> grad_y0(static_cast<std::size_t>(n_dims));

  parallel_for(n_dims, threads, [&](int d) {
    const auto ud = static_cast<std::size_t>(d);
    const DimensionForward& df = fwd.dims[ud];
    const CsrMatrix& lap = laps[ud].matrix;

    // d loss / d S_d: softmax minus one-hot on training rows.
    Matrix g_scores = Matrix::Zero(df.scores.rows(), df.scores.cols());
    for (Index i : train) {
      g_scores.row(i) = df.probs.row(i);
      g_scores(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    }

    grads.compat[ud].h = df.propagated.transpose() * g_scores;
    grads.compat[ud].dimension_id = params.compat[ud].dimension_id;

    const Matrix g_prop = g_scores * params.compat[ud].h.transpose();
    // T_r(L) is symmetric, so the adjoint of the filter is the filter itself.
    grad_y0[ud] = apply_cheb(fwd.filters[ud].theta_bar, lap, g_prop);

    const int degree = static_cast<int>(fwd.filters[ud].theta_bar.size()) - 1;
    const Vector g_bar = cheb_inner_products(lap, fwd.y0, g_prop, degree);
    grads.gammas[ud].gamma0 = 0.0;
    grads.gammas[ud].dimension_id = params.gammas[ud].dimension_id;
    grads.gammas[ud].gamma = filter_coeffs_backward(params.gammas[ud], fwd.filters[ud], g_bar);
  });

  Matrix g_y0 = Matrix::Zero(fwd.y0.rows(), fwd.y0.cols());
  for (const Matrix& g : grad_y0) g_y0 += g;
  grads.mlp = mlp_backward(params.mlp, fwd.mlp_cache, g_y0);
  for (std::size_t l = 0; l < grads.mlp.layers.size(); ++l) {
    if (alpha != 0.0) grads.mlp.layers[l].weight += 2.0 * alpha * params.mlp.layers[l].weight;
  }

  auto check = [](bool finite, const std::string& what) {
    if (!finite) throw NumericError("backward: non-finite gradient for " + what);
  };
  for (const auto& layer : grads.mlp.layers) check(layer.weight.allFinite() && layer.bias.allFinite(), "MLP");
  for (int d = 0; d < n_dims; ++d) {
    check(grads.gammas[static_cast<std::size_t>(d)].gamma.allFinite(), "gamma of dimension " + std::to_string(d));
    check(grads.compat[static_cast<std::size_t>(d)].h.allFinite(), "H of dimension " + std::to_string(d));
  }
  return grads;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

namespace {

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& p, const Grad& g, Moment& m, Moment& v, double lr, double b1, double b2, double eps,
                 double c1, double c2) {
  if (m.size() != p.size()) {
    m.setZero(p.rows(), p.cols());
    v.setZero(p.rows(), p.cols());
  }
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

void AdamOptimizer::step(ModelParams& params, const ModelParams& grads) {
  ++t_;
  if (m_.mlp.layers.size() != params.mlp.layers.size()) {
    m_.mlp.layers.resize(params.mlp.layers.size());
    v_.mlp.layers.resize(params.mlp.layers.size());
    m_.gammas.resize(params.gammas.size());
    v_.gammas.resize(params.gammas.size());
    m_.compat.resize(params.compat.size());
    v_.compat.resize(params.compat.size());
  }
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t l = 0; l < params.mlp.layers.size(); ++l) {
    adam_update(params.mlp.layers[l].weight, grads.mlp.layers[l].weight, m_.mlp.layers[l].weight,
                v_.mlp.layers[l].weight, lr_, beta1_, beta2_, eps_, c1, c2);
    adam_update(params.mlp.layers[l].bias, grads.mlp.layers[l].bias, m_.mlp.layers[l].bias, v_.mlp.layers[l].bias,
                lr_, beta1_, beta2_, eps_, c1, c2);
  }
  for (std::size_t d = 0; d < params.gammas.size(); ++d) {
    adam_update(params.gammas[d].gamma, grads.gammas[d].gamma, m_.gammas[d].gamma, v_.gammas[d].gamma, lr_, beta1_,
                beta2_, eps_, c1, c2);
    params.gammas[d].gamma = params.gammas[d].gamma.cwiseMax(0.0);
    adam_update(params.compat[d].h, grads.compat[d].h, m_.compat[d].h, v_.compat[d].h, lr_, beta1_, beta2_, eps_, c1,
                c2);
  }
}

}  // namespace haam
