#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "puree/rng.hpp"

namespace puree {

class NeuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { Linear, Sigmoid, Softmax };
enum class LossKind { SquaredError, CrossEntropy };

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 0.002;
    double momentum = 0.9;
    double l2 = 1e-4;
    double sparsity_weight = 0.0;  // KL penalty on first-layer mean activation; off by default
    double sparsity_target = 0.05;
    std::uint64_t seed = 0;

    void validate() const {
        if (epochs < 1 || batch_size < 1 || !(learning_rate > 0.0) || momentum < 0.0 ||
            momentum >= 1.0 || l2 < 0.0 || sparsity_weight < 0.0 || sparsity_target <= 0.0 ||
            sparsity_target >= 1.0) {
            throw NeuralError("TrainConfig: invalid hyperparameter");
        }
    }
};

template <typename S>
struct DenseLayer {
    MatX<S> W;  // out x in
    VecX<S> b;  // out
    Activation act = Activation::Sigmoid;

    int in_dim() const { return static_cast<int>(W.cols()); }
    int out_dim() const { return static_cast<int>(W.rows()); }

    // Columns of X are samples.
    MatX<S> forward(const MatX<S>& X) const {
        MatX<S> Z = (W * X).colwise() + b;
        apply_activation(Z);
        return Z;
    }

    void apply_activation(MatX<S>& Z) const {
        switch (act) {
            case Activation::Linear:
                break;
            case Activation::Sigmoid:
                Z = Z.unaryExpr([](S z) { return S(1) / (S(1) + std::exp(-z)); });
                break;
            case Activation::Softmax:
                for (Eigen::Index c = 0; c < Z.cols(); ++c) {
                    auto col = Z.col(c);
                    col.array() -= col.maxCoeff();
                    col = col.array().exp();
                    col /= col.sum();
                }
                break;
        }
    }
};

// Glorot-uniform weights in +/- sqrt(6 / (fan_in + fan_out)), zero biases.
template <typename S>
DenseLayer<S> init_dense_layer(std::uint64_t seed, int out, int in, Activation act) {
    if (out < 1 || in < 1) {
        throw NeuralError("init_dense_layer: dimensions must be positive");
    }
    DenseLayer<S> layer;
    layer.act = act;
    layer.W.resize(out, in);
    layer.b = VecX<S>::Zero(out);
    const double limit = std::sqrt(6.0 / (static_cast<double>(in) + out));
    Rng rng(seed);
    for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) {
            layer.W(r, c) = static_cast<S>(rng.uniform(-limit, limit));
        }
    }
    return layer;
}

template <typename S>
struct Gradients {
    std::vector<MatX<S>> dW;
    std::vector<VecX<S>> db;
};

template <typename S>
struct LossGrads {
    double total = 0.0;  // data term + penalties (matches the gradients)
    double data = 0.0;
    Gradients<S> grads;
};

// Small fully-connected stack trained by mini-batch SGD. Samples are matrix
// columns throughout.
template <typename S>
struct FeedForward {
    std::vector<DenseLayer<S>> layers;
    LossKind loss = LossKind::SquaredError;

    MatX<S> forward(const MatX<S>& X) const {
        MatX<S> a = X;
        for (const auto& layer : layers) a = layer.forward(a);
        return a;
    }

    // Input followed by every layer output.
    std::vector<MatX<S>> activations(const MatX<S>& X) const {
        std::vector<MatX<S>> acts;
        acts.reserve(layers.size() + 1);
        acts.push_back(X);
        for (const auto& layer : layers) acts.push_back(layer.forward(acts.back()));
        return acts;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += static_cast<std::size_t>(l.W.size()) + l.b.size();
        return n;
    }
};

namespace detail {

template <typename S>
double l2_penalty(const FeedForward<S>& net, double l2) {
    if (l2 <= 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& layer : net.layers) {
        acc += static_cast<double>(layer.W.template cast<double>().squaredNorm());
    }
    return 0.5 * l2 * acc;
}

inline double kl_bernoulli(double rho, double rho_hat) {
    return rho * std::log(rho / rho_hat) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - rho_hat));
}

}  // namespace detail

// Data term plus penalties, and gradients for every parameter. The data term
// is averaged over samples and summed over output dimensions:
//   SquaredError:  (1/n) sum_cols 0.5 * |out - target|^2
//   CrossEntropy:  (1/n) sum_cols -log softmax(z)[label]   (targets one-hot)
// L2 applies to weights only. The optional KL sparsity penalty acts on the
// first layer's mean activation and requires a sigmoid first layer.
template <typename S>
LossGrads<S> loss_and_gradients(const FeedForward<S>& net, const MatX<S>& X, const MatX<S>& T,
                                double l2, double sparsity_weight = 0.0,
                                double sparsity_target = 0.05) {
    const Eigen::Index n = X.cols();
    if (n == 0) {
        throw NeuralError("loss_and_gradients: empty batch");
    }
    const std::vector<MatX<S>> acts = net.activations(X);
    const MatX<S>& out = acts.back();
    const S inv_n = S(1) / static_cast<S>(n);

    double data_loss = 0.0;
    MatX<S> delta;  // d(loss)/d(z) of the top layer
    if (net.loss == LossKind::CrossEntropy) {
        if (net.layers.back().act != Activation::Softmax) {
            throw NeuralError("cross-entropy loss requires a softmax output layer");
        }
        // out already holds softmax probabilities; recompute the loss stably
        // from logits via log-sum-exp.
        MatX<S> Z = (net.layers.back().W * acts[acts.size() - 2]).colwise() + net.layers.back().b;
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto col = Z.col(c);
            const S m = col.maxCoeff();
            const S lse = m + std::log((col.array() - m).exp().sum());
            Eigen::Index label;
            T.col(c).maxCoeff(&label);
            data_loss += static_cast<double>(lse - col(label));
        }
        data_loss /= static_cast<double>(n);
        delta = (out - T) * inv_n;
    } else {
        MatX<S> diff = out - T;
        data_loss = 0.5 * static_cast<double>(diff.template cast<double>().squaredNorm()) /
                    static_cast<double>(n);
        delta = diff * inv_n;
        switch (net.layers.back().act) {
            case Activation::Linear:
                break;
            case Activation::Sigmoid:
                delta.array() *= out.array() * (S(1) - out.array());
                break;
            case Activation::Softmax:
                throw NeuralError("squared-error loss with softmax output is unsupported");
        }
    }

    double total_loss = data_loss + detail::l2_penalty(net, l2);

    // Sparsity penalty bookkeeping (first layer only).
    VecX<S> sparsity_grad;
    if (sparsity_weight > 0.0) {
        if (net.layers.front().act != Activation::Sigmoid) {
            throw NeuralError("sparsity penalty requires a sigmoid first layer");
        }
        const MatX<S>& a1 = acts[1];
        const double rho = sparsity_target;
        sparsity_grad.resize(a1.rows());
        for (Eigen::Index j = 0; j < a1.rows(); ++j) {
            const double rho_hat =
                std::min(1.0 - 1e-12, std::max(1e-12, static_cast<double>(a1.row(j).mean())));
            total_loss += sparsity_weight * detail::kl_bernoulli(rho, rho_hat);
            sparsity_grad(j) =
                static_cast<S>(sparsity_weight * (-rho / rho_hat + (1.0 - rho) / (1.0 - rho_hat)) /
                               static_cast<double>(n));
        }
    }

    LossGrads<S> result;
    result.data = data_loss;
    result.total = total_loss;
    auto& grads = result.grads;
    grads.dW.resize(net.layers.size());
    grads.db.resize(net.layers.size());
    for (int k = static_cast<int>(net.layers.size()) - 1; k >= 0; --k) {
        const DenseLayer<S>& layer = net.layers[k];
        grads.dW[k] = delta * acts[k].transpose();
        if (l2 > 0.0) grads.dW[k] += static_cast<S>(l2) * layer.W;
        grads.db[k] = delta.rowwise().sum();
        if (k > 0) {
            MatX<S> d_act = layer.W.transpose() * delta;
            if (k == 1 && sparsity_grad.size() > 0) {
                d_act.colwise() += sparsity_grad;
            }
            const MatX<S>& a_prev = acts[k];
            if (net.layers[k - 1].act == Activation::Sigmoid) {
                delta = (d_act.array() * a_prev.array() * (S(1) - a_prev.array())).matrix();
            } else {
                delta = std::move(d_act);
            }
        }
    }
    return result;
}

// Mini-batch SGD with momentum. Returns the per-epoch mean of the batch data
// losses (penalties excluded from the trace). Deterministic given config and
// data order; aborts on a non-finite loss.
template <typename S>
std::vector<double> train_sgd(FeedForward<S>& net, const MatX<S>& X, const MatX<S>& T,
                              const TrainConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = X.cols();
    if (n == 0 || T.cols() != n) {
        throw NeuralError("train_sgd: data/target size mismatch");
    }
    std::vector<MatX<S>> vel_W;
    std::vector<VecX<S>> vel_b;
    for (const auto& layer : net.layers) {
        vel_W.push_back(MatX<S>::Zero(layer.W.rows(), layer.W.cols()));
        vel_b.push_back(VecX<S>::Zero(layer.b.size()));
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);

    std::vector<double> trace;
    trace.reserve(cfg.epochs);
    const S mom = static_cast<S>(cfg.momentum);
    const S lr = static_cast<S>(cfg.learning_rate);
    MatX<S> bx, bt;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index size = std::min<Eigen::Index>(cfg.batch_size, n - start);
            bx.resize(X.rows(), size);
            bt.resize(T.rows(), size);
            for (Eigen::Index i = 0; i < size; ++i) {
                bx.col(i) = X.col(order[start + i]);
                bt.col(i) = T.col(order[start + i]);
            }
            const LossGrads<S> lg =
                loss_and_gradients(net, bx, bt, cfg.l2, cfg.sparsity_weight, cfg.sparsity_target);
            if (!std::isfinite(lg.total)) {
                throw NeuralError("train_sgd: non-finite loss at epoch " + std::to_string(epoch) +
                                  " (lr=" + std::to_string(cfg.learning_rate) + ")");
            }
            epoch_loss += lg.data * static_cast<double>(size);
            for (std::size_t k = 0; k < net.layers.size(); ++k) {
                vel_W[k] = mom * vel_W[k] - lr * lg.grads.dW[k];
                vel_b[k] = mom * vel_b[k] - lr * lg.grads.db[k];
                net.layers[k].W += vel_W[k];
                net.layers[k].b += vel_b[k];
            }
        }
        trace.push_back(epoch_loss / static_cast<double>(n));
    }
    return trace;
}

// Guarded relative error between analytic and central-difference gradients
// over every parameter: |ga - gn| / max(1, |ga|, |gn|).
template <typename S>
double gradient_check(FeedForward<S>& net, const MatX<S>& X, const MatX<S>& T, double epsilon,
                      double l2 = 0.0, double sparsity_weight = 0.0, double sparsity_target = 0.05) {
    static_assert(std::is_same_v<S, double>, "gradient_check needs double precision");
    if (!(epsilon > 0.0)) {
        throw NeuralError("gradient_check: epsilon must be > 0");
    }
    const Gradients<S> grads =
        loss_and_gradients(net, X, T, l2, sparsity_weight, sparsity_target).grads;
    const auto eval = [&]() {
        return loss_and_gradients(net, X, T, l2, sparsity_weight, sparsity_target).total;
    };
    double max_err = 0.0;
    const auto check_param = [&](S& param, double analytic) {
        const S saved = param;
        param = saved + static_cast<S>(epsilon);
        const double up = eval();
        param = saved - static_cast<S>(epsilon);
        const double down = eval();
        param = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
        max_err = std::max(max_err, std::fabs(analytic - numeric) / denom);
    };
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        auto& layer = net.layers[k];
        for (Eigen::Index i = 0; i < layer.W.size(); ++i) {
            check_param(layer.W.data()[i], static_cast<double>(grads.dW[k].data()[i]));
        }
        for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
            check_param(layer.b.data()[i], static_cast<double>(grads.db[k].data()[i]));
        }
    }
    return max_err;
}

// ---------------------------------------------------------------------------
// Autoencoder: sigmoid encoder + sigmoid decoder trained on reconstruction.

template <typename S>
struct Autoencoder {
    FeedForward<S> net;  // [encoder, decoder], squared error

    DenseLayer<S>& encoder() { return net.layers[0]; }
    const DenseLayer<S>& encoder() const { return net.layers[0]; }
    DenseLayer<S>& decoder() { return net.layers[1]; }
    const DenseLayer<S>& decoder() const { return net.layers[1]; }

    MatX<S> encode(const MatX<S>& X) const { return net.layers[0].forward(X); }
    MatX<S> reconstruct(const MatX<S>& X) const { return net.forward(X); }
};

template <typename S>
Autoencoder<S> init_autoencoder(std::uint64_t seed, int in_dim, int hidden_dim) {
    Autoencoder<S> ae;
    ae.net.loss = LossKind::SquaredError;
    ae.net.layers.push_back(
        init_dense_layer<S>(derive_seed(seed, "encoder"), hidden_dim, in_dim, Activation::Sigmoid));
    ae.net.layers.push_back(
        init_dense_layer<S>(derive_seed(seed, "decoder"), in_dim, hidden_dim, Activation::Sigmoid));
    return ae;
}

// Mean squared reconstruction error per element (the mean-predictor baseline
// for this quantity is the per-element variance of the data).
template <typename S>
double reconstruction_mse(const Autoencoder<S>& ae, const MatX<S>& X) {
    const MatX<S> diff = ae.reconstruct(X) - X;
    return static_cast<double>(diff.template cast<double>().squaredNorm()) /
           static_cast<double>(diff.size());
}

// Unsupervised pretraining: minimizes squared reconstruction error with
// mini-batch SGD, momentum, and L2 decay. Returns the loss trace.
template <typename S>
std::vector<double> pretrain_autoencoder(Autoencoder<S>& ae, const MatX<S>& data,
                                         const TrainConfig& cfg) {
    if (data.rows() != ae.encoder().in_dim()) {
        throw NeuralError("pretrain_autoencoder: data dimension mismatch");
    }
    return train_sgd(ae.net, data, data, cfg);
}

// ---------------------------------------------------------------------------
// Stacked network: two sigmoid encoders and a softmax head.

template <typename S>
struct StackedNet {
    FeedForward<S> net;  // [enc1, enc2, head], cross-entropy

    DenseLayer<S>& enc1() { return net.layers[0]; }
    DenseLayer<S>& enc2() { return net.layers[1]; }
    DenseLayer<S>& head() { return net.layers[2]; }
    const DenseLayer<S>& enc1() const { return net.layers[0]; }
    const DenseLayer<S>& enc2() const { return net.layers[1]; }
    const DenseLayer<S>& head() const { return net.layers[2]; }

    int input_dim() const { return net.layers[0].in_dim(); }
    int n_classes() const { return net.layers[2].out_dim(); }

    MatX<S> encode1(const MatX<S>& X) const { return net.layers[0].forward(X); }
    MatX<S> encode2(const MatX<S>& X) const { return net.layers[1].forward(encode1(X)); }
    MatX<S> probabilities(const MatX<S>& X) const { return net.forward(X); }
};

inline const std::vector<int> kDefaultStackDims{3750, 100, 50, 5};

template <typename S>
StackedNet<S> init_stack(std::uint64_t seed, const std::vector<int>& dims = kDefaultStackDims) {
    if (dims.size() != 4) {
        throw NeuralError("init_stack: expected 4 dimensions [input, h1, h2, classes]");
    }
    for (int d : dims) {
        if (d < 1) throw NeuralError("init_stack: dimensions must be positive");
    }
    StackedNet<S> s;
    s.net.loss = LossKind::CrossEntropy;
    s.net.layers.push_back(
        init_dense_layer<S>(derive_seed(seed, "enc1"), dims[1], dims[0], Activation::Sigmoid));
    s.net.layers.push_back(
        init_dense_layer<S>(derive_seed(seed, "enc2"), dims[2], dims[1], Activation::Sigmoid));
    s.net.layers.push_back(
        init_dense_layer<S>(derive_seed(seed, "head"), dims[3], dims[2], Activation::Softmax));
    return s;
}

template <typename S>
MatX<S> one_hot(const std::vector<int>& labels, int n_classes) {
    MatX<S> T = MatX<S>::Zero(n_classes, static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) {
            throw NeuralError("one_hot: label out of range");
        }
        T(labels[i], static_cast<Eigen::Index>(i)) = S(1);
    }
    return T;
}

struct FinetuneTrace {
    std::vector<double> head_loss;
    std::vector<double> full_loss;
};

// Supervised fine-tuning in two phases: the softmax head is first trained on
// frozen codes, then backpropagation runs through the whole stack.
template <typename S>
FinetuneTrace finetune_stack(StackedNet<S>& net, const MatX<S>& X, const std::vector<int>& labels,
                             const TrainConfig& head_cfg, const TrainConfig& full_cfg) {
    if (static_cast<Eigen::Index>(labels.size()) != X.cols()) {
        throw NeuralError("finetune_stack: label count mismatch");
    }
    const MatX<S> T = one_hot<S>(labels, net.n_classes());
    FinetuneTrace trace;

    const MatX<S> codes = net.encode2(X);
    FeedForward<S> head_net;
    head_net.loss = LossKind::CrossEntropy;
    head_net.layers.push_back(net.head());
    trace.head_loss = train_sgd(head_net, codes, T, head_cfg);
    net.head() = head_net.layers[0];

    trace.full_loss = train_sgd(net.net, X, T, full_cfg);
    return trace;
}

struct Prediction {
    int label = 0;
    std::vector<double> probabilities;
};

// Softmax probabilities and the argmax class; ties break to the lowest index.
template <typename S>
Prediction predict_top1(const StackedNet<S>& net, const VecX<S>& x) {
    if (x.size() != net.input_dim()) {
        throw NeuralError("predict_top1: input dimension mismatch");
    }
    MatX<S> xm(x.size(), 1);
    xm.col(0) = x;
    MatX<S> p = net.probabilities(xm);
    Prediction pred;
    pred.probabilities.resize(static_cast<std::size_t>(p.rows()));
    double best = -1.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double v = static_cast<double>(p(i, 0));
        pred.probabilities[static_cast<std::size_t>(i)] = v;
        if (v > best) {
            best = v;
            pred.label = static_cast<int>(i);
        }
    }
    return pred;
}

// Argmax class per column.
template <typename S>
std::vector<int> predict_batch(const StackedNet<S>& net, const MatX<S>& X) {
    const MatX<S> P = net.probabilities(X);
    std::vector<int> out(static_cast<std::size_t>(P.cols()));
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
        int best_i = 0;
        S best = P(0, c);
        for (Eigen::Index r = 1; r < P.rows(); ++r) {
            if (P(r, c) > best) {
                best = P(r, c);
                best_i = static_cast<int>(r);
            }
        }
        out[static_cast<std::size_t>(c)] = best_i;
    }
    return out;
}

}  // namespace puree
