#include "alphakit/mlp.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace alphakit {

namespace {

constexpr char kMagic[8] = {'A', 'K', 'N', 'E', 'T', '0', '0', '1'};

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("checkpoint truncated");
}

}  // namespace

bool MlpNetwork::finite() const {
  for (const Mat& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const Vec& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

MlpNetwork MlpNetwork::glorot(const std::vector<int>& layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("need at least input and output sizes");
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  if (layer_sizes.back() != 1) throw std::invalid_argument("output layer must be scalar");

  MlpNetwork net;
  net.sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Mat w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) w(i, j) = dist(rng);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vec::Zero(fan_out));
  }
  return net;
}

Vec mlp_forward(const MlpNetwork& net, const Mat& inputs, ForwardCache* cache) {
  if (inputs.rows() != net.input_dim()) {
    throw std::invalid_argument("input rows do not match network input dim");
  }
  if (cache) {
    cache->acts.clear();
    cache->acts.reserve(net.weights.size() + 1);
    cache->acts.push_back(inputs);
  }
  Mat a = inputs;
  for (int l = 0; l < net.n_layers(); ++l) {
    Mat z = (net.weights[static_cast<std::size_t>(l)] * a).colwise() +
            net.biases[static_cast<std::size_t>(l)];
    if (l + 1 < net.n_layers()) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
    if (cache) cache->acts.push_back(a);
  }
  return a.transpose().col(0);
}

Gradients Gradients::zeros_like(const MlpNetwork& net) {
  Gradients g;
  for (const Mat& w : net.weights) g.w.push_back(Mat::Zero(w.rows(), w.cols()));
  for (const Vec& b : net.biases) g.b.push_back(Vec::Zero(b.size()));
  return g;
}

void Gradients::accumulate(const Gradients& other) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    w[l] += other.w[l];
    b[l] += other.b[l];
  }
}

void Gradients::scale(double s) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    w[l] *= s;
    b[l] *= s;
  }
}

void mlp_backward(const MlpNetwork& net, const ForwardCache& cache, const Vec& dloss_dout,
                  Gradients& grads) {
  const int layers = net.n_layers();
  if (static_cast<int>(cache.acts.size()) != layers + 1) {
    throw std::invalid_argument("cache does not match network");
  }
  if (cache.acts.back().cols() != dloss_dout.size()) {
    throw std::invalid_argument("output gradient length mismatch");
  }
  Mat delta = dloss_dout.transpose();  // 1 x batch
  for (int l = layers - 1; l >= 0; --l) {
    const Mat& below = cache.acts[static_cast<std::size_t>(l)];
    grads.w[static_cast<std::size_t>(l)] += delta * below.transpose();
    grads.b[static_cast<std::size_t>(l)] += delta.rowwise().sum();
    if (l > 0) {
      const Mat& h = cache.acts[static_cast<std::size_t>(l)];  // tanh outputs
      delta = (net.weights[static_cast<std::size_t>(l)].transpose() * delta)
                  .cwiseProduct((1.0 - h.array().square()).matrix());
    }
  }
}

ContributionVector contribution(const MlpNetwork& net, int window_len) {
  if (net.input_dim() != kNumFields * window_len) {
    throw std::invalid_argument("input dim is not fields * window_len");
  }
  ContributionVector cv;
  cv.per_input = net.weights.front().cwiseAbs().colwise().sum().transpose();
  cv.by_field = Vec::Zero(kNumFields);
  cv.by_lag = Vec::Zero(window_len);
  for (int f = 0; f < kNumFields; ++f) {
    for (int k = 0; k < window_len; ++k) {
      const double mass = cv.per_input[f * window_len + k];
      cv.by_field[f] += mass;
      cv.by_lag[window_len - 1 - k] += mass;
    }
  }
  return cv;
}

void save_checkpoint(const MlpNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  write_bytes(out, kMagic, sizeof(kMagic));
  const std::uint32_t n = static_cast<std::uint32_t>(net.sizes.size());
  write_bytes(out, &n, sizeof(n));
  for (int s : net.sizes) {
    const std::int32_t v = s;
    write_bytes(out, &v, sizeof(v));
  }
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Mat& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double v = w(i, j);
        write_bytes(out, &v, sizeof(v));
      }
    }
    const Vec& b = net.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double v = b[i];
      write_bytes(out, &v, sizeof(v));
    }
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

MlpNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[8];
  read_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a network checkpoint (bad magic): " + path.string());
  }
  std::uint32_t n = 0;
  read_bytes(in, &n, sizeof(n));
  if (n < 2 || n > 64) throw std::runtime_error("checkpoint has implausible layer count");
  MlpNetwork net;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::int32_t v = 0;
    read_bytes(in, &v, sizeof(v));
    if (v < 1) throw std::runtime_error("checkpoint has non-positive layer size");
    net.sizes.push_back(v);
  }
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    Mat w(net.sizes[l + 1], net.sizes[l]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) read_bytes(in, &w(i, j), sizeof(double));
    }
    Vec b(net.sizes[l + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) read_bytes(in, &b[i], sizeof(double));
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace alphakit
