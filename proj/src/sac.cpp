#include "evcharge/sac.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace evcharge {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'C', 'P', 'O', 'L', 'v', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b, 4);
}

void put_f64(std::ostream& os, double v) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError("policy file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw DataError("policy file truncated");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(u);
}

}  // namespace

Vector observation_scale(const ScenarioConfig& c, int horizon) {
    Vector s = Vector::Ones(state_length(1, horizon, c.n_ports));
    s[0] = 1.0 / c.episode_steps;
    s[1] = 1.0 / (c.n_ports * c.evse_max_charge_kw);
    const Eigen::Index ports = s.size() - 2 * c.n_ports;
    for (int p = 0; p < c.n_ports; ++p) s[ports + 2 * p + 1] = 1.0 / c.episode_steps;
    return s;
}

ActionVector PolicyArtifact::act(const StateVector& state) const {
    if (state.size() != obs_scale.size()) throw std::invalid_argument("policy: state length mismatch");
    const Matrix out = actor.forward(state.cwiseProduct(obs_scale));
    return out.col(0).head(signature.n_ports).array().tanh();
}

void save_policy(const std::filesystem::path& path, const PolicyArtifact& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RuntimeFailure("cannot write policy file " + path.string());
    os.write(kMagic, sizeof kMagic);
    put_u32(os, static_cast<std::uint32_t>(p.signature.n_ports));
    put_u32(os, static_cast<std::uint32_t>(p.signature.horizon));
    put_u32(os, static_cast<std::uint32_t>(p.signature.n_transformers));
    put_u32(os, static_cast<std::uint32_t>(p.actor.layers()));
    for (int s : p.actor.sizes()) put_u32(os, static_cast<std::uint32_t>(s));
    for (Eigen::Index i = 0; i < p.obs_scale.size(); ++i) put_f64(os, p.obs_scale[i]);
    for (Eigen::Index i = 0; i < p.actor.params().size(); ++i) put_f64(os, p.actor.params()[i]);
    if (!os) throw RuntimeFailure("failed writing policy file " + path.string());
}

PolicyArtifact load_policy(const std::filesystem::path& path, const std::optional<EnvSignature>& expected) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open policy file " + path.string());
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw DataError(path.string() + ": not a policy file");
    PolicyArtifact p;
    p.signature.n_ports = static_cast<int>(get_u32(is));
    p.signature.horizon = static_cast<int>(get_u32(is));
    p.signature.n_transformers = static_cast<int>(get_u32(is));
    const auto layers = get_u32(is);
    if (layers == 0 || layers > 64) throw DataError(path.string() + ": bad layer count");
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i <= layers; ++i) {
        const auto s = get_u32(is);
        if (s == 0 || s > (1u << 20)) throw DataError(path.string() + ": bad layer size");
        sizes.push_back(static_cast<int>(s));
    }
    const int state_dim = state_length(p.signature.n_transformers, p.signature.horizon, p.signature.n_ports);
    if (sizes.front() != state_dim || sizes.back() != 2 * p.signature.n_ports)
        throw DataError(path.string() + ": layer shapes do not match the stored environment signature");
    if (expected && !(*expected == p.signature)) {
        std::ostringstream msg;
        msg << path.string() << ": policy trained for n_ports=" << p.signature.n_ports
            << " horizon=" << p.signature.horizon << " n_tr=" << p.signature.n_transformers
            << ", scenario has n_ports=" << expected->n_ports << " horizon=" << expected->horizon
            << " n_tr=" << expected->n_transformers;
        throw ConfigError(msg.str());
    }
    p.obs_scale.resize(state_dim);
    for (int i = 0; i < state_dim; ++i) p.obs_scale[i] = get_f64(is);
    p.actor = nn::Mlp<double>(sizes);
    for (Eigen::Index i = 0; i < p.actor.params().size(); ++i) p.actor.params()[i] = get_f64(is);
    if (is.peek() != std::char_traits<char>::eof()) throw DataError(path.string() + ": trailing bytes");
    return p;
}

ActionVector PolicyController::act(const Simulator& sim) {
    if (sim.config().n_ports != policy_.signature.n_ports)
        throw std::invalid_argument("policy action length does not match the scenario");
    return policy_.act(build_state(sim, policy_.signature.horizon));
}

namespace sac {

void validate(const SacConfig& c) {
    if (c.hidden.empty()) throw ConfigError("rl.hidden must list at least one layer");
    for (int h : c.hidden)
        if (h <= 0) throw ConfigError("rl.hidden sizes must be positive");
    if (c.replay_capacity <= 0) throw ConfigError("rl.replay_capacity must be positive");
    if (c.batch_size <= 0) throw ConfigError("rl.batch_size must be positive");
    if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw ConfigError("rl.gamma must lie in [0, 1]");
    if (!(c.tau > 0.0 && c.tau <= 1.0)) throw ConfigError("rl.tau must lie in (0, 1]");
    if (!(c.learning_rate > 0.0)) throw ConfigError("rl.learning_rate must be positive");
    if (!(c.initial_alpha > 0.0)) throw ConfigError("rl.initial_alpha must be positive");
    if (!(c.reward_scale > 0.0)) throw ConfigError("rl.reward_scale must be positive");
    if (c.total_steps < 0 || c.learning_starts < 0) throw ConfigError("rl step counts must be >= 0");
    if (c.update_every <= 0 || c.gradient_steps <= 0) throw ConfigError("rl.update_every and rl.gradient_steps must be positive");
    if (c.eval_every <= 0 || c.eval_episodes <= 0) throw ConfigError("rl evaluation settings must be positive");
}

ReplayBuffer::ReplayBuffer(int capacity, int state_dim, int action_dim)
    : capacity_(capacity),
      s_(state_dim, capacity),
      a_(action_dim, capacity),
      s2_(state_dim, capacity),
      r_(capacity),
      d_(capacity) {}

void ReplayBuffer::add(const StateVector& s, const ActionVector& a, double r, const StateVector& s2, bool done) {
    s_.col(next_) = s.cast<float>();
    a_.col(next_) = a.cast<float>();
    s2_.col(next_) = s2.cast<float>();
    r_[next_] = static_cast<float>(r);
    d_[next_] = done ? 1.0f : 0.0f;
    next_ = (next_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

Batch<float> ReplayBuffer::sample(int batch, Rng& rng) const {
    if (size_ == 0) throw RuntimeFailure("sampling from an empty replay buffer");
    Batch<float> b;
    b.state.resize(s_.rows(), batch);
    b.action.resize(a_.rows(), batch);
    b.next_state.resize(s2_.rows(), batch);
    b.reward.resize(batch);
    b.done.resize(batch);
    for (int j = 0; j < batch; ++j) {
        const auto k = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(size_)));
        b.state.col(j) = s_.col(k);
        b.action.col(j) = a_.col(k);
        b.next_state.col(j) = s2_.col(k);
        b.reward[j] = r_[k];
        b.done[j] = d_[k];
    }
    return b;
}

double evaluate_reward(EvChargingEnv& env, const PolicyArtifact& policy, int episodes, std::uint64_t seed_base) {
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) {
        StateVector s = env.reset(seed_base + static_cast<std::uint64_t>(e));
        while (!env.done()) {
            auto step = env.step(policy.act(s));
            total += step.reward;
            s = std::move(step.state);
        }
    }
    return total / episodes;
}

namespace {

PolicyArtifact export_policy(const Agent<float>& agent, const EnvConfig& env) {
    PolicyArtifact p;
    p.signature = {env.scenario.n_ports, env.horizon, 1};
    p.obs_scale = observation_scale(env.scenario, env.horizon);
    p.actor = agent.actor().cast<double>();
    return p;
}

void write_log(const std::filesystem::path& path, const std::vector<TrainLogRow>& rows) {
    std::ofstream os(path);
    if (!os) throw RuntimeFailure("cannot write training log " + path.string());
    os << "step,actor_loss,critic_loss,eval_mean_reward\n" << std::setprecision(10);
    for (const auto& r : rows)
        os << r.step << ',' << r.actor_loss << ',' << r.critic_loss << ',' << r.eval_mean_reward << '\n';
}

}  // namespace

TrainResult train_agent(const EnvConfig& env_config, const SacConfig& cfg) {
    validate(cfg);
    EvChargingEnv env(env_config);
    EvChargingEnv eval_env(env_config);
    const int state_dim = env.state_size();
    const int n = env.action_size();
    const Vector scale = observation_scale(env_config.scenario, env_config.horizon);

    Rng root(cfg.seed);
    Rng init_rng = root.split();
    Rng act_rng = root.split();
    Rng sample_rng = root.split();
    Rng update_rng = root.split();
    Rng episode_rng = root.split();

    Agent<float> agent(state_dim, n, cfg, init_rng);
    ReplayBuffer buffer(cfg.replay_capacity, state_dim, n);
    TrainResult result;

    auto evaluate = [&](long long step, const Losses& last) {
        PolicyArtifact p = export_policy(agent, env_config);
        const double mean = evaluate_reward(eval_env, p, cfg.eval_episodes, cfg.eval_seed_base);
        result.log.push_back({step, last.actor, last.critic, mean});
        if (result.log.size() == 1 || mean > result.best_eval_reward) {
            result.best = std::move(p);
            result.best_eval_reward = mean;
            result.best_step = step;
            if (cfg.checkpoint) save_policy(*cfg.checkpoint, result.best);
        }
        if (cfg.log_csv) write_log(*cfg.log_csv, result.log);
    };

    Losses last;
    evaluate(0, last);
    Vector s = env.reset(episode_rng.next_u64()).cwiseProduct(scale);
    for (long long step = 1; step <= cfg.total_steps; ++step) {
        ActionVector a(n);
        if (step <= cfg.learning_starts) {
            for (int i = 0; i < n; ++i) a[i] = act_rng.uniform(-1.0, 1.0);
        } else {
            a = agent.sample_action(s.cast<float>(), act_rng).cast<double>();
        }
        EnvStep out = env.step(a);
        const Vector s2 = out.state.cwiseProduct(scale);
        buffer.add(s, a, out.reward * cfg.reward_scale, s2, out.done);
        s = out.done ? Vector(env.reset(episode_rng.next_u64()).cwiseProduct(scale)) : s2;

        if (step > cfg.learning_starts && step % cfg.update_every == 0) {
            for (int g = 0; g < cfg.gradient_steps; ++g) {
                last = agent.update(buffer.sample(cfg.batch_size, sample_rng), update_rng);
                if (!std::isfinite(last.actor) || !std::isfinite(last.critic) || !std::isfinite(last.alpha)) {
                    std::ostringstream msg;
                    msg << "training diverged at step " << step << ": actor_loss=" << last.actor
                        << " critic_loss=" << last.critic << " alpha_loss=" << last.alpha
                        << " alpha=" << agent.alpha();
                    throw RuntimeFailure(msg.str());
                }
            }
        }
        if (step % cfg.eval_every == 0 || step == cfg.total_steps) evaluate(step, last);
    }
    return result;
}

}  // namespace sac

}  // namespace evcharge
