#pragma once

#include "evcharge/nn.hpp"
#include "evcharge/rl.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace evcharge {

// ---------------------------------------------------------------------------
// Policy artifact

/// Shape of the environment a policy was trained for.
struct EnvSignature {
    int n_ports = 25;
    int horizon = 20;
    int n_transformers = 1;

    friend bool operator==(const EnvSignature&, const EnvSignature&) = default;
};

/// Fixed per-feature input scaling used by the agent: step index and time to
/// departure by the episode length, aggregate power by the site rating.
Vector observation_scale(const ScenarioConfig& scenario, int horizon);

/// A trained actor in deterministic (mean action) form.
struct PolicyArtifact {
    EnvSignature signature;
    Vector obs_scale;
    nn::Mlp<double> actor;  ///< state -> [mean ; raw log std]

    ActionVector act(const StateVector& state) const;
};

/// Binary layout, all integers uint32 and all reals float64, little-endian:
/// magic "EVCPOLv1", n_ports, horizon, n_transformers, layer count L,
/// L + 1 layer sizes, obs_scale (state length values), actor parameters
/// (per layer: weights column-major, then biases).
void save_policy(const std::filesystem::path& path, const PolicyArtifact& policy);

/// Throws DataError on a malformed file and ConfigError when `expected` is
/// given and does not match.
PolicyArtifact load_policy(const std::filesystem::path& path, const std::optional<EnvSignature>& expected = {});

/// Rolls out a policy; state is rebuilt from the simulator every step.
class PolicyController final : public Controller {
public:
    explicit PolicyController(PolicyArtifact policy, std::string name = "SAC")
        : policy_(std::move(policy)), name_(std::move(name)) {}

    std::string name() const override { return name_; }
    ActionVector act(const Simulator& sim) override;

    const PolicyArtifact& policy() const { return policy_; }

private:
    PolicyArtifact policy_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Soft actor-critic

namespace sac {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

template <typename Scalar>
Scalar softplus(Scalar x) {
    return std::max(x, Scalar(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

/// Smooth two-sided clamp of the raw log std into [kLogStdMin, kLogStdMax];
/// close to the identity well inside the range. Returns the value and writes
/// its derivative.
template <typename Scalar>
Scalar clamp_log_std(Scalar raw, Scalar* derivative = nullptr) {
    const Scalar hi = Scalar(kLogStdMax), lo = Scalar(kLogStdMin);
    const Scalar upper = hi - softplus(hi - raw);
    const Scalar out = std::min(hi, lo + softplus(upper - lo));
    if (derivative) *derivative = sigmoid(hi - raw) * sigmoid(upper - lo);
    return out;
}

template <typename Scalar>
struct Batch {
    nn::Mat<Scalar> state;       ///< state_dim x B, already scaled
    nn::Mat<Scalar> action;      ///< n x B
    nn::Vec<Scalar> reward;      ///< B
    nn::Mat<Scalar> next_state;  ///< state_dim x B
    nn::Vec<Scalar> done;        ///< B, 1 at episode end

    Eigen::Index size() const { return state.cols(); }
};

/// Reparameterised sample of the squashed Gaussian for a batch, with
/// everything the actor gradient needs.
template <typename Scalar>
struct PolicySample {
    typename nn::Mlp<Scalar>::Cache cache;
    nn::Mat<Scalar> eps;      ///< n x B
    nn::Mat<Scalar> sigma;    ///< n x B
    nn::Mat<Scalar> dls_raw;  ///< d log std / d raw
    nn::Mat<Scalar> action;   ///< tanh(u)
    nn::Vec<Scalar> log_prob; ///< B
};

template <typename Scalar>
PolicySample<Scalar> sample_policy(const nn::Mlp<Scalar>& actor, const nn::Mat<Scalar>& state,
                                   const nn::Mat<Scalar>& eps) {
    PolicySample<Scalar> ps;
    const nn::Mat<Scalar> out = actor.forward(state, &ps.cache);
    const Eigen::Index n = out.rows() / 2, B = out.cols();
    ps.eps = eps;
    ps.sigma.resize(n, B);
    ps.dls_raw.resize(n, B);
    ps.action.resize(n, B);
    ps.log_prob = nn::Vec<Scalar>::Zero(B);
    const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * std::numbers::pi));
    for (Eigen::Index j = 0; j < B; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar d;
            const Scalar ls = clamp_log_std(out(n + i, j), &d);
            const Scalar sd = std::exp(ls);
            const Scalar a = std::tanh(out(i, j) + sd * eps(i, j));
            ps.sigma(i, j) = sd;
            ps.dls_raw(i, j) = d;
            ps.action(i, j) = a;
            ps.log_prob[j] += -Scalar(0.5) * eps(i, j) * eps(i, j) - ls - half_log_2pi -
                              std::log(Scalar(1) - a * a + Scalar(kSquashEps));
        }
    }
    return ps;
}

template <typename Scalar>
nn::Mat<Scalar> critic_input(const nn::Mat<Scalar>& state, const nn::Mat<Scalar>& action) {
    nn::Mat<Scalar> x(state.rows() + action.rows(), state.cols());
    x.topRows(state.rows()) = state;
    x.bottomRows(action.rows()) = action;
    return x;
}

/// 0.5 * mean((Q - y)^2); adds its gradient to `grad`.
template <typename Scalar>
Scalar critic_loss(const nn::Mlp<Scalar>& q, const nn::Mat<Scalar>& input, const nn::Vec<Scalar>& target,
                   nn::Vec<Scalar>* grad) {
    typename nn::Mlp<Scalar>::Cache cache;
    const nn::Mat<Scalar> out = q.forward(input, grad ? &cache : nullptr);
    const nn::Vec<Scalar> err = out.row(0).transpose() - target;
    const Scalar B = static_cast<Scalar>(err.size());
    if (grad) q.backward(cache, (err / B).transpose(), *grad);
    return Scalar(0.5) * err.squaredNorm() / B;
}

/// mean(alpha * log pi(a|s) - min(Q1, Q2)(s, a)) for fixed noise `eps`; adds
/// its gradient with respect to the actor parameters to `grad`.
template <typename Scalar>
Scalar actor_loss(const nn::Mlp<Scalar>& actor, const nn::Mlp<Scalar>& q1, const nn::Mlp<Scalar>& q2,
                  const nn::Mat<Scalar>& state, const nn::Mat<Scalar>& eps, Scalar alpha, nn::Vec<Scalar>* grad,
                  nn::Vec<Scalar>* log_prob_out = nullptr) {
    const PolicySample<Scalar> ps = sample_policy(actor, state, eps);
    const Eigen::Index n = ps.action.rows(), B = ps.action.cols();
    const nn::Mat<Scalar> x = critic_input(state, ps.action);
    typename nn::Mlp<Scalar>::Cache c1, c2;
    const nn::Mat<Scalar> v1 = q1.forward(x, grad ? &c1 : nullptr);
    const nn::Mat<Scalar> v2 = q2.forward(x, grad ? &c2 : nullptr);
    const nn::Mat<Scalar> vmin = v1.cwiseMin(v2);
    const Scalar loss = (alpha * ps.log_prob.sum() - vmin.sum()) / static_cast<Scalar>(B);
    if (log_prob_out) *log_prob_out = ps.log_prob;
    if (!grad) return loss;

    // dQmin/da through whichever critic is lower for each sample.
    const nn::Mat<Scalar> pick1 = (v1.array() <= v2.array()).template cast<Scalar>();
    const nn::Mat<Scalar> pick2 = nn::Mat<Scalar>::Ones(1, B) - pick1;
    nn::Vec<Scalar> scratch1, scratch2;
    const nn::Mat<Scalar> dq = q1.backward(c1, pick1, scratch1).bottomRows(n) + q2.backward(c2, pick2, scratch2).bottomRows(n);

    const Scalar invB = Scalar(1) / static_cast<Scalar>(B);
    nn::Mat<Scalar> dout(2 * n, B);
    for (Eigen::Index j = 0; j < B; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar a = ps.action(i, j);
            const Scalar one_m = Scalar(1) - a * a;
            const Scalar du = invB * (alpha * Scalar(2) * a * one_m / (one_m + Scalar(kSquashEps)) - dq(i, j) * one_m);
            const Scalar dls = -alpha * invB + du * ps.sigma(i, j) * ps.eps(i, j);
            dout(i, j) = du;
            dout(n + i, j) = dls * ps.dls_raw(i, j);
        }
    }
    actor.backward(ps.cache, dout, *grad);
    return loss;
}

struct SacConfig {
    std::vector<int> hidden{256, 256};
    int replay_capacity = 200000;
    int batch_size = 256;
    double gamma = 0.99;
    double tau = 0.005;
    double learning_rate = 3e-4;
    std::optional<double> target_entropy;  ///< defaults to -n_ports
    double initial_alpha = 1.0;
    double reward_scale = 1.0;  ///< applied to rewards stored in the replay buffer
    long long total_steps = 100000;
    long long learning_starts = 5000;  ///< uniform random actions before this
    int update_every = 1;
    int gradient_steps = 1;
    long long eval_every = 5000;
    int eval_episodes = 5;
    std::uint64_t eval_seed_base = 1'000'000;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> log_csv;
    std::optional<std::filesystem::path> checkpoint;
};

void validate(const SacConfig& config);

struct Losses {
    double actor = 0.0;
    double critic = 0.0;
    double alpha = 0.0;
};

/// Twin-critic SAC learner; the training loop lives in train_agent.
template <typename Scalar>
class Agent {
public:
    using MatS = nn::Mat<Scalar>;
    using VecS = nn::Vec<Scalar>;

    Agent(int state_dim, int action_dim, const SacConfig& cfg, Rng& rng)
        : cfg_(cfg), n_(action_dim) {
        std::vector<int> a_sizes{state_dim}, q_sizes{state_dim + action_dim};
        for (int h : cfg.hidden) {
            a_sizes.push_back(h);
            q_sizes.push_back(h);
        }
        a_sizes.push_back(2 * action_dim);
        q_sizes.push_back(1);
        actor_ = nn::Mlp<Scalar>(a_sizes);
        q1_ = nn::Mlp<Scalar>(q_sizes);
        q2_ = nn::Mlp<Scalar>(q_sizes);
        actor_.init(rng, Scalar(3e-3));
        q1_.init(rng);
        q2_.init(rng);
        q1t_ = q1_;
        q2t_ = q2_;
        const auto lr = static_cast<Scalar>(cfg.learning_rate);
        actor_opt_ = nn::Adam<Scalar>(actor_.params().size(), lr);
        q1_opt_ = nn::Adam<Scalar>(q1_.params().size(), lr);
        q2_opt_ = nn::Adam<Scalar>(q2_.params().size(), lr);
        alpha_opt_ = nn::Adam<Scalar>(1, lr);
        log_alpha_ = VecS::Constant(1, static_cast<Scalar>(std::log(cfg.initial_alpha)));
        target_entropy_ = static_cast<Scalar>(cfg.target_entropy.value_or(-static_cast<double>(action_dim)));
    }

    Scalar alpha() const { return std::exp(log_alpha_[0]); }
    const nn::Mlp<Scalar>& actor() const { return actor_; }
    const nn::Mlp<Scalar>& q1() const { return q1_; }
    const nn::Mlp<Scalar>& q2() const { return q2_; }

    /// One stochastic action for a scaled state.
    VecS sample_action(const VecS& state, Rng& rng) const {
        MatS eps(n_, 1);
        for (Eigen::Index i = 0; i < n_; ++i) eps(i, 0) = static_cast<Scalar>(rng.normal());
        return sample_policy(actor_, MatS(state), eps).action.col(0);
    }

    Losses update(const Batch<Scalar>& b, Rng& rng) {
        const Eigen::Index B = b.size();
        Losses out;
        const Scalar alpha = this->alpha();

        // Soft Bellman target.
        const PolicySample<Scalar> next = sample_policy(actor_, b.next_state, noise(B, rng));
        const MatS xn = critic_input(b.next_state, next.action);
        const MatS qn = q1t_.forward(xn).cwiseMin(q2t_.forward(xn));
        const VecS y = b.reward.array() + static_cast<Scalar>(cfg_.gamma) * (Scalar(1) - b.done.array()) *
                                              (qn.row(0).transpose().array() - alpha * next.log_prob.array());

        const MatS x = critic_input(b.state, b.action);
        VecS g1 = VecS::Zero(q1_.params().size()), g2 = VecS::Zero(q2_.params().size());
        out.critic = static_cast<double>(critic_loss(q1_, x, y, &g1) + critic_loss(q2_, x, y, &g2));
        q1_opt_.step(q1_.params(), g1);
        q2_opt_.step(q2_.params(), g2);

        VecS ga = VecS::Zero(actor_.params().size());
        VecS log_prob;
        out.actor = static_cast<double>(actor_loss(actor_, q1_, q2_, b.state, noise(B, rng), alpha, &ga, &log_prob));
        actor_opt_.step(actor_.params(), ga);

        const Scalar mean_term = (log_prob.array() + target_entropy_).mean();
        out.alpha = static_cast<double>(-log_alpha_[0] * mean_term);
        VecS galpha = VecS::Constant(1, -mean_term);
        alpha_opt_.step(log_alpha_, galpha);

        const auto tau = static_cast<Scalar>(cfg_.tau);
        q1t_.soft_update(q1_, tau);
        q2t_.soft_update(q2_, tau);
        return out;
    }

private:
    MatS noise(Eigen::Index B, Rng& rng) const {
        MatS eps(n_, B);
        for (Eigen::Index j = 0; j < B; ++j)
            for (Eigen::Index i = 0; i < n_; ++i) eps(i, j) = static_cast<Scalar>(rng.normal());
        return eps;
    }

    SacConfig cfg_;
    Eigen::Index n_;
    nn::Mlp<Scalar> actor_, q1_, q2_, q1t_, q2t_;
    nn::Adam<Scalar> actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
    VecS log_alpha_;
    Scalar target_entropy_;
};

/// Fixed-capacity ring buffer of transitions stored in float.
class ReplayBuffer {
public:
    ReplayBuffer(int capacity, int state_dim, int action_dim);

    void add(const StateVector& s, const ActionVector& a, double r, const StateVector& s2, bool done);
    Batch<float> sample(int batch, Rng& rng) const;
    int size() const { return size_; }

private:
    int capacity_;
    int size_ = 0;
    int next_ = 0;
    nn::Mat<float> s_, a_, s2_;
    nn::Vec<float> r_, d_;
};

struct TrainLogRow {
    long long step = 0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double eval_mean_reward = 0.0;
};

struct TrainResult {
    PolicyArtifact best;
    double best_eval_reward = 0.0;
    long long best_step = 0;
    std::vector<TrainLogRow> log;
};

/// Mean undiscounted episode reward of the deterministic policy over
/// `episodes` seeds starting at `seed_base`.
double evaluate_reward(EvChargingEnv& env, const PolicyArtifact& policy, int episodes, std::uint64_t seed_base);

/// Trains on `env` and returns the best-evaluated policy. Evaluation runs at
/// step 0, every eval_every steps and at the end. Throws RuntimeFailure on a
/// non-finite loss.
TrainResult train_agent(const EnvConfig& env, const SacConfig& config);

}  // namespace sac

}  // namespace evcharge
