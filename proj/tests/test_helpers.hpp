#pragma once

#include "erbp/model.hpp"
#include "erbp/prior.hpp"

namespace erbp::testing {

// Analytic network that classifies the identity relation exactly: first layer
// is the default comparison matrix with zero bias, so the hidden sum equals
// the Hamming distance of the halves; the head fires "unequal" when that sum
// exceeds 0.5.
inline MLP build_hamming_network(std::size_t n_half) {
  MLPConfig cfg;
  cfg.n_half = n_half;
  cfg.hidden = 2 * n_half;
  cfg.depth = 1;
  cfg.fusion = Fusion::kNone;
  cfg.heads = 1;
  Rng rng(0);
  MLP net = MLP::init(cfg, rng);
  net.layers()[0].w = build_default_matrix(n_half, cfg.hidden);
  for (double& b : net.layers()[0].b) b = 0.0;
  for (std::size_t c = 0; c < cfg.hidden; ++c) {
    net.heads()[0].w(0, c) = -1.0;  // "equal" logit falls with Hamming distance
    net.heads()[0].w(1, c) = 1.0;
  }
  net.heads()[0].b = {0.5, -0.5};
  return net;
}

}  // namespace erbp::testing
