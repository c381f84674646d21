#include "erbp/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "erbp/errors.hpp"

namespace erbp {

std::string fusion_name(Fusion f) {
  switch (f) {
    case Fusion::kNone: return "none";
    case Fusion::kEarly: return "early";
    case Fusion::kMid: return "mid";
  }
  return "none";
}

Fusion fusion_from_name(const std::string& name) {
  if (name == "none") return Fusion::kNone;
  if (name == "early") return Fusion::kEarly;
  if (name == "mid") return Fusion::kMid;
  throw ConfigError("unknown fusion '" + name + "'");
}

double dr_activation(double x, double y) {
  return std::abs(x - y);
}

void validate_config(const MLPConfig& cfg) {
  if (cfg.n_half < 1 || cfg.n_half > 30) {
    throw ConfigError("model: n_half must be in [1,30]");
  }
  if (cfg.hidden < 1) throw ConfigError("model: hidden size must be positive");
  if (cfg.depth < 1 || cfg.depth > 5) {
    throw ConfigError("model: depth must be in [1,5]");
  }
  if (cfg.heads != 1 && cfg.heads != 2) {
    throw ConfigError("model: heads must be 1 or 2");
  }
}

std::size_t MLP::input_width() const {
  return 2 * cfg_.n_half + (cfg_.fusion == Fusion::kEarly ? cfg_.n_half : 0);
}

std::size_t MLP::layer_input_width(std::size_t layer) const {
  if (layer == 0) return input_width();
  if (layer == 1 && cfg_.fusion == Fusion::kMid) return cfg_.hidden + cfg_.n_half;
  return cfg_.hidden;
}

std::size_t MLP::head_input_width() const {
  if (cfg_.depth == 1 && cfg_.fusion == Fusion::kMid) {
    return cfg_.hidden + cfg_.n_half;
  }
  return cfg_.hidden;
}

MLP MLP::init(const MLPConfig& cfg, Rng& rng) {
  validate_config(cfg);
  MLP m;
  m.cfg_ = cfg;
  auto glorot = [&rng](std::size_t rows, std::size_t cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix w(rows, cols);
    for (double& x : w.data) x = rng.next_uniform(-limit, limit);
    return w;
  };
  for (std::size_t l = 0; l < cfg.depth; ++l) {
    const std::size_t in = m.layer_input_width(l);
    m.layers_.push_back({glorot(cfg.hidden, in), Vector(cfg.hidden, 0.0)});
  }
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    m.heads_.push_back({glorot(2, m.head_input_width()), Vector(2, 0.0)});
  }
  return m;
}

void MLP::run_forward(const Vector& input, Cache& cache) const {
  if (input.size() != 2 * cfg_.n_half) {
    throw ConfigError("forward: input length " + std::to_string(input.size()) +
                      " does not match 2*n_half");
  }
  cache.input = input;
  cache.dr.assign(cfg_.n_half, 0.0);
  for (std::size_t i = 0; i < cfg_.n_half; ++i) {
    cache.dr[i] = dr_activation(input[i], input[cfg_.n_half + i]);
  }

  Vector a;
  if (cfg_.fusion == Fusion::kEarly) {
    a = input;
    a.insert(a.end(), cache.dr.begin(), cache.dr.end());
  } else {
    a = input;
  }

  cache.pre.assign(cfg_.depth, {});
  cache.post.assign(cfg_.depth, {});
  for (std::size_t l = 0; l < cfg_.depth; ++l) {
    Vector z = mat_vec(layers_[l].w, a);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layers_[l].b[i];
    cache.pre[l] = z;
    Vector h = relu(z);
    if (l == 0 && cfg_.fusion == Fusion::kMid) {
      h.insert(h.end(), cache.dr.begin(), cache.dr.end());
    }
    cache.post[l] = h;
    a = std::move(h);
  }

  cache.probs.assign(heads_.size(), {});
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    Vector logits = mat_vec(heads_[h].w, cache.post[cfg_.depth - 1]);
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += heads_[h].b[i];
    cache.probs[h] = softmax(logits);
  }
}

Vector MLP::forward(const Vector& input) {
  run_forward(input, cache_);
  cache_.valid = true;
  Vector out;
  for (const Vector& p : cache_.probs) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Vector MLP::predict(const Vector& input) const {
  Cache tmp;
  run_forward(input, tmp);
  Vector out;
  for (const Vector& p : tmp.probs) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Gradients MLP::zero_gradients() const {
  Gradients g;
  for (const Layer& l : layers_) {
    g.layers.push_back({Matrix(l.w.rows, l.w.cols), Vector(l.b.size(), 0.0)});
  }
  for (const Layer& l : heads_) {
    g.heads.push_back({Matrix(l.w.rows, l.w.cols), Vector(l.b.size(), 0.0)});
  }
  g.input.assign(2 * cfg_.n_half, 0.0);
  return g;
}

Gradients MLP::backward(const Vector& target) {
  if (!cache_.valid) {
    throw std::logic_error("backward: no valid forward cache (stale or missing)");
  }
  cache_.valid = false;
  if (target.size() != 2 * heads_.size()) {
    throw ConfigError("backward: target length does not match head count");
  }

  Gradients g = zero_gradients();
  const Vector& last = cache_.post[cfg_.depth - 1];

  // Heads: cross-entropy through softmax gives dlogits = probs - target.
  Vector da_last(last.size(), 0.0);
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    Vector dlogit(2);
    for (std::size_t c = 0; c < 2; ++c) {
      dlogit[c] = cache_.probs[h][c] - target[2 * h + c];
    }
    add_outer(g.heads[h].w, dlogit, last);
    for (std::size_t c = 0; c < 2; ++c) g.heads[h].b[c] += dlogit[c];
    Vector back = mat_tvec(heads_[h].w, dlogit);
    for (std::size_t i = 0; i < da_last.size(); ++i) da_last[i] += back[i];
  }

  // Hidden layers, deepest first.
  Vector da = std::move(da_last);
  Vector da_dr;  // gradient reaching the comparison outputs (mid fusion)
  for (std::size_t li = cfg_.depth; li-- > 0;) {
    if (li == 0 && cfg_.fusion == Fusion::kMid) {
      da_dr.assign(da.begin() + static_cast<std::ptrdiff_t>(cfg_.hidden), da.end());
      da.resize(cfg_.hidden);
    }
    const Vector rg = relu_grad(cache_.pre[li]);
    Vector dz(da.size());
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] = da[i] * rg[i];

    Vector extended_input;
    const Vector* a_in = nullptr;
    if (li > 0) {
      a_in = &cache_.post[li - 1];
    } else if (cfg_.fusion == Fusion::kEarly) {
      extended_input = cache_.input;
      extended_input.insert(extended_input.end(), cache_.dr.begin(), cache_.dr.end());
      a_in = &extended_input;
    } else {
      a_in = &cache_.input;
    }
    add_outer(g.layers[li].w, dz, *a_in);
    for (std::size_t i = 0; i < dz.size(); ++i) g.layers[li].b[i] += dz[i];
    da = mat_tvec(layers_[li].w, dz);
  }

  // Remaining da is the gradient at the (possibly extended) input. Fold the
  // comparison-unit paths back onto the raw input.
  const std::size_t n = cfg_.n_half;
  for (std::size_t i = 0; i < 2 * n; ++i) g.input[i] = da[i];
  auto fold_dr = [&](const Vector& da_slice) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = cache_.input[i] > cache_.input[n + i]
                           ? 1.0
                           : (cache_.input[i] < cache_.input[n + i] ? -1.0 : 0.0);
      g.input[i] += da_slice[i] * s;
      g.input[n + i] -= da_slice[i] * s;
    }
  };
  if (cfg_.fusion == Fusion::kEarly) {
    fold_dr(Vector(da.begin() + static_cast<std::ptrdiff_t>(2 * n), da.end()));
  } else if (cfg_.fusion == Fusion::kMid) {
    fold_dr(da_dr);
  }
  return g;
}

std::vector<std::size_t> MLP::classify(const Vector& input) const {
  const Vector probs = predict(input);
  std::vector<std::size_t> out(heads_.size());
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    out[h] = probs[2 * h + 1] > probs[2 * h] ? 1 : 0;
  }
  return out;
}

namespace {

void put_matrix(std::ostream& out, const Matrix& m) {
  char buf[40];
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << (c ? " " : "") << buf;
    }
    out << "\n";
  }
}

void put_vector(std::ostream& out, const Vector& v) {
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out << (i ? " " : "") << buf;
  }
  out << "\n";
}

}  // namespace

void MLP::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "erbp-model v1\n";
  f << "n_half=" << cfg_.n_half << " hidden=" << cfg_.hidden << " depth=" << cfg_.depth
    << " fusion=" << fusion_name(cfg_.fusion) << " heads=" << cfg_.heads
    << " seed=" << cfg_.seed << "\n";
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    f << "layer " << l << " " << layers_[l].w.rows << " " << layers_[l].w.cols << "\n";
    put_matrix(f, layers_[l].w);
    f << "bias\n";
    put_vector(f, layers_[l].b);
  }
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    f << "head " << h << " " << heads_[h].w.rows << " " << heads_[h].w.cols << "\n";
    put_matrix(f, heads_[h].w);
    f << "bias\n";
    put_vector(f, heads_[h].b);
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

MLP MLP::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(f, line) || line != "erbp-model v1") {
    throw ParseError("not an erbp model checkpoint", 1);
  }
  MLPConfig cfg;
  ++line_no;
  if (!std::getline(f, line)) throw ParseError("missing config line", line_no);
  {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("malformed config '" + tok + "'", line_no);
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      try {
        if (key == "n_half") cfg.n_half = std::stoul(val);
        else if (key == "hidden") cfg.hidden = std::stoul(val);
        else if (key == "depth") cfg.depth = std::stoul(val);
        else if (key == "fusion") cfg.fusion = fusion_from_name(val);
        else if (key == "heads") cfg.heads = std::stoul(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else throw ParseError("unknown config key '" + key + "'", line_no);
      } catch (const std::invalid_argument&) {
        throw ParseError("malformed config value '" + val + "'", line_no);
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
  }
  validate_config(cfg);
  MLP m;
  m.cfg_ = cfg;

  auto read_values = [&f, &line_no](std::size_t count) {
    Vector v(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!(f >> v[i])) throw ParseError("truncated parameter block", line_no);
    }
    return v;
  };
  auto read_block = [&](const std::string& kind, std::size_t index, std::size_t rows,
                        std::size_t cols) {
    ++line_no;
    std::string word;
    std::size_t idx = 0, r = 0, c = 0;
    if (!(f >> word >> idx >> r >> c) || word != kind || idx != index || r != rows ||
        c != cols) {
      throw ParseError("unexpected block header (wanted '" + kind + " " +
                           std::to_string(index) + " " + std::to_string(rows) + " " +
                           std::to_string(cols) + "')",
                       line_no);
    }
    Layer layer;
    layer.w = Matrix(rows, cols);
    layer.w.data = read_values(rows * cols);
    if (!(f >> word) || word != "bias") throw ParseError("missing bias block", line_no);
    layer.b = read_values(rows);
    return layer;
  };

  for (std::size_t l = 0; l < cfg.depth; ++l) {
    m.layers_.push_back(read_block("layer", l, cfg.hidden, m.layer_input_width(l)));
  }
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    m.heads_.push_back(read_block("head", h, 2, m.head_input_width()));
  }
  return m;
}

}  // namespace erbp
