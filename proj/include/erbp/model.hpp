#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "erbp/linalg.hpp"

namespace erbp {

enum class Fusion { kNone, kEarly, kMid };

std::string fusion_name(Fusion f);
Fusion fusion_from_name(const std::string& name);

// Absolute difference of two designated inputs; the fixed comparison unit the
// fusion variants wire in. Not trainable.
double dr_activation(double x, double y);

struct MLPConfig {
  std::size_t n_half = 3;
  std::size_t hidden = 10;   // width of every hidden layer
  std::size_t depth = 1;     // number of hidden layers, 1..5
  Fusion fusion = Fusion::kNone;
  std::size_t heads = 1;     // 1 = identity only, 2 = identity + pattern
  std::uint64_t seed = 0;
};

struct Layer {
  Matrix w;
  Vector b;
};

struct Gradients {
  std::vector<Layer> layers;
  std::vector<Layer> heads;
  // d loss / d input, including the paths through the fixed comparison units
  // (d|x-y|/dx = sign(x-y), 0 at x = y).
  Vector input;
};

// Feed-forward ReLU network over a 2*n_half binary input with one or two
// 2-way softmax heads. Early fusion appends the n_half comparison outputs to
// the input; mid fusion appends them to the first hidden layer's activations.
// The comparison wiring is fixed and contributes no parameters.
class MLP {
 public:
  MLP() = default;

  // Glorot-uniform weights, zero biases, deterministic given the generator.
  static MLP init(const MLPConfig& cfg, Rng& rng);

  // Caching pass used for training; returns per-head class probabilities
  // concatenated (head h occupies entries [2h, 2h+1]).
  Vector forward(const Vector& input);

  // Pure pass; identical outputs to forward but leaves no cache behind.
  Vector predict(const Vector& input) const;

  // Exact gradient of the summed cross-entropy over heads w.r.t. every
  // trainable parameter. Consumes the cache left by the last forward; calling
  // it twice, or before any forward, is a usage error.
  Gradients backward(const Vector& target);

  // argmax per head; an exact tie picks class 0.
  std::vector<std::size_t> classify(const Vector& input) const;

  Gradients zero_gradients() const;

  const MLPConfig& config() const { return cfg_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& heads() { return heads_; }
  const std::vector<Layer>& heads() const { return heads_; }

  std::size_t input_width() const;       // 2n, or 3n with early fusion
  std::size_t layer_input_width(std::size_t layer) const;
  std::size_t head_input_width() const;

  void save(const std::string& path) const;
  static MLP load(const std::string& path);

 private:
  struct Cache {
    Vector input;             // raw 2n input
    Vector dr;                // comparison outputs, n_half entries
    std::vector<Vector> pre;  // pre-activations per hidden layer
    std::vector<Vector> post; // activations (post[0] includes dr under mid fusion)
    std::vector<Vector> probs;
    bool valid = false;
  };

  void run_forward(const Vector& input, Cache& cache) const;

  MLPConfig cfg_;
  std::vector<Layer> layers_;
  std::vector<Layer> heads_;
  Cache cache_;
};

void validate_config(const MLPConfig& cfg);

}  // namespace erbp
