#pragma once

#include "evcharge/random.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace evcharge::nn {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Fully connected network with ReLU hidden layers and a linear output.
/// All weights and biases live in one flat vector so optimisers, target
/// averaging and serialisation work on a single buffer. Batches are stored
/// column-wise: one sample per column.
template <typename Scalar>
class Mlp {
public:
    using MatS = Mat<Scalar>;
    using VecS = Vec<Scalar>;
    using MatMap = Eigen::Map<MatS>;
    using ConstMatMap = Eigen::Map<const MatS>;
    using VecMap = Eigen::Map<VecS>;
    using ConstVecMap = Eigen::Map<const VecS>;

    /// Activations kept by forward() for the matching backward().
    struct Cache {
        std::vector<MatS> inputs;  ///< input of each layer, post-activation
    };

    Mlp() = default;

    explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
        Eigen::Index total = 0;
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
            w_offset_.push_back(total);
            total += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
            b_offset_.push_back(total);
            total += sizes_[l + 1];
        }
        params_ = VecS::Zero(total);
    }

    /// Uniform fan-in initialisation, same bound for weights and biases.
    void init(Rng& rng, Scalar last_layer_bound = Scalar(0)) {
        for (int l = 0; l < layers(); ++l) {
            double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[static_cast<std::size_t>(l)]));
            if (l == layers() - 1 && last_layer_bound > Scalar(0)) bound = static_cast<double>(last_layer_bound);
            auto W = weight(l);
            for (Eigen::Index j = 0; j < W.cols(); ++j)
                for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = static_cast<Scalar>(rng.uniform(-bound, bound));
            auto b = bias(l);
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
        }
    }

    int layers() const { return static_cast<int>(sizes_.size()) - 1; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    const std::vector<int>& sizes() const { return sizes_; }

    VecS& params() { return params_; }
    const VecS& params() const { return params_; }

    MatMap weight(int l) { return MatMap(params_.data() + w_offset_[idx(l)], rows(l), cols(l)); }
    ConstMatMap weight(int l) const { return ConstMatMap(params_.data() + w_offset_[idx(l)], rows(l), cols(l)); }
    VecMap bias(int l) { return VecMap(params_.data() + b_offset_[idx(l)], rows(l)); }
    ConstVecMap bias(int l) const { return ConstVecMap(params_.data() + b_offset_[idx(l)], rows(l)); }

    MatS forward(const MatS& x, Cache* cache = nullptr) const {
        if (x.rows() != input_size()) throw std::invalid_argument("Mlp::forward: input size mismatch");
        if (cache) cache->inputs.clear();
        MatS h = x;
        for (int l = 0; l < layers(); ++l) {
            MatS z(rows(l), h.cols());
            z.noalias() = weight(l) * h;
            z.colwise() += bias(l);
            if (l + 1 < layers()) z = z.cwiseMax(Scalar(0));
            if (cache) cache->inputs.push_back(std::move(h));
            h = std::move(z);
        }
        return h;
    }

    /// Accumulates dLoss/dparams into `grad` (same layout as params()) and
    /// returns dLoss/dinput. `dout` is dLoss/doutput for the cached batch.
    MatS backward(const Cache& cache, const MatS& dout, VecS& grad) const {
        if (grad.size() != params_.size()) grad = VecS::Zero(params_.size());
        MatS delta = dout;
        for (int l = layers() - 1; l >= 0; --l) {
            const MatS& in = cache.inputs[idx(l)];
            MatMap gW(grad.data() + w_offset_[idx(l)], rows(l), cols(l));
            VecMap gb(grad.data() + b_offset_[idx(l)], rows(l));
            gW.noalias() += delta * in.transpose();
            gb += delta.rowwise().sum();
            MatS dx(cols(l), delta.cols());
            dx.noalias() = weight(l).transpose() * delta;
            if (l > 0) dx = (in.array() > Scalar(0)).select(dx, Scalar(0));
            delta = std::move(dx);
        }
        return delta;
    }

    /// Polyak averaging: this = (1 - tau) * this + tau * source.
    void soft_update(const Mlp& source, Scalar tau) {
        params_ = (Scalar(1) - tau) * params_ + tau * source.params_;
    }

    template <typename Other>
    Mlp<Other> cast() const {
        Mlp<Other> out(sizes_);
        out.params() = params_.template cast<Other>();
        return out;
    }

private:
    static std::size_t idx(int l) { return static_cast<std::size_t>(l); }
    Eigen::Index rows(int l) const { return sizes_[idx(l) + 1]; }
    Eigen::Index cols(int l) const { return sizes_[idx(l)]; }

    std::vector<int> sizes_;
    std::vector<Eigen::Index> w_offset_;
    std::vector<Eigen::Index> b_offset_;
    VecS params_;
};

template <typename Scalar>
class Adam {
public:
    using VecS = Vec<Scalar>;

    explicit Adam(Eigen::Index n = 0, Scalar lr = Scalar(3e-4), Scalar beta1 = Scalar(0.9),
                  Scalar beta2 = Scalar(0.999), Scalar eps = Scalar(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(VecS::Zero(n)), v_(VecS::Zero(n)) {}

    void step(VecS& params, const VecS& grad) {
        ++t_;
        m_ = beta1_ * m_ + (Scalar(1) - beta1_) * grad;
        v_ = beta2_ * v_ + (Scalar(1) - beta2_) * grad.cwiseAbs2();
        const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(static_cast<double>(beta1_), t_));
        const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(static_cast<double>(beta2_), t_));
        params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
    }

    long long steps() const { return t_; }

private:
    Scalar lr_, beta1_, beta2_, eps_;
    VecS m_, v_;
    long long t_ = 0;
};

}  // namespace evcharge::nn
