// Copyright 2026 The lolws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lolws/nnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "lolws/common.hpp"
#include "lolws/rng.hpp"

namespace lolws {

namespace {

void checkLayerSizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ConfigError("model needs at least input and output layers");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("layer sizes must be positive");
  }
}

void softmax(std::span<const double> z, std::vector<double>& out) {
  out.resize(z.size());
  const double hi = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - hi);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
}

void checkFinite(std::span<const double> v, const char* what, std::size_t layer) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string("non-finite ") + what + " at layer " +
                         std::to_string(layer));
    }
  }
}

}  // namespace

std::size_t MlpModel::weightOffset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(layerSizes[l + 1]) *
               static_cast<std::size_t>(layerSizes[l]) +
           static_cast<std::size_t>(layerSizes[l + 1]);
  }
  return off;
}

std::size_t MlpModel::biasOffset(std::size_t layer) const {
  return weightOffset(layer) + static_cast<std::size_t>(layerSizes[layer + 1]) *
                                   static_cast<std::size_t>(layerSizes[layer]);
}

std::size_t MlpModel::paramCount() const { return weightOffset(numLayers()); }

void MlpModel::validate() const {
  checkLayerSizes(layerSizes);
  if (!(dropoutRate >= 0.0 && dropoutRate < 1.0)) {
    throw ConfigError("dropout rate must be in [0,1)");
  }
  if (params.size() != paramCount()) throw ConfigError("parameter count mismatch");
  for (double p : params) {
    if (!std::isfinite(p)) throw NumericError("non-finite model parameter");
  }
}

MlpModel makeMlp(std::vector<int> layerSizes, double dropoutRate, std::uint64_t initSeed) {
  checkLayerSizes(layerSizes);
  MlpModel model;
  model.layerSizes = std::move(layerSizes);
  model.dropoutRate = dropoutRate;
  model.params.assign(model.paramCount(), 0.0);
  Rng rng(deriveSeed(initSeed, Stream::Init));
  for (std::size_t l = 0; l < model.numLayers(); ++l) {
    const auto fanIn = static_cast<double>(model.layerSizes[l]);
    const double bound = std::sqrt(6.0 / fanIn);
    double* w = model.params.data() + model.weightOffset(l);
    const std::size_t count = static_cast<std::size_t>(model.layerSizes[l + 1]) *
                              static_cast<std::size_t>(model.layerSizes[l]);
    for (std::size_t i = 0; i < count; ++i) w[i] = rng.uniform(-bound, bound);
  }
  model.validate();
  return model;
}

void forward(const MlpModel& model, std::span<const double> x, ForwardMode mode,
             std::uint64_t dropoutSeed, ForwardCache& cache) {
  const std::size_t L = model.numLayers();
  if (x.size() != static_cast<std::size_t>(model.inputDim())) {
    throw ConfigError("input length does not match model");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("non-finite model input");
  }
  cache.mode = mode;
  cache.shapeTag = model.paramCount();
  cache.act.resize(L);
  cache.preact.resize(L);
  cache.mask.resize(L - 1);
  cache.act[0].assign(x.begin(), x.end());

  Rng rng(dropoutSeed);
  const double p = model.dropoutRate;
  for (std::size_t l = 0; l < L; ++l) {
    const int in = model.layerSizes[l];
    const int out = model.layerSizes[l + 1];
    const double* w = model.params.data() + model.weightOffset(l);
    const double* b = model.params.data() + model.biasOffset(l);
    auto& z = cache.preact[l];
    z.assign(static_cast<std::size_t>(out), 0.0);
    const double* a = cache.act[l].data();
    for (int i = 0; i < out; ++i) {
      const double* row = w + static_cast<std::size_t>(i) * in;
      double acc = b[i];
      for (int j = 0; j < in; ++j) acc += row[j] * a[j];
      z[static_cast<std::size_t>(i)] = acc;
    }
    if (l + 1 < L) {
      auto& mask = cache.mask[l];
      mask.assign(static_cast<std::size_t>(out), 1.0);
      if (mode == ForwardMode::Train && p > 0.0) {
        const double scale = 1.0 / (1.0 - p);
        for (int i = 0; i < out; ++i) {
          mask[static_cast<std::size_t>(i)] = rng.uniform() >= p ? scale : 0.0;
        }
      }
      auto& next = cache.act[l + 1];
      next.resize(static_cast<std::size_t>(out));
      for (int i = 0; i < out; ++i) {
        const double r = z[static_cast<std::size_t>(i)] > 0.0 ? z[static_cast<std::size_t>(i)] : 0.0;
        next[static_cast<std::size_t>(i)] = r * mask[static_cast<std::size_t>(i)];
      }
    }
  }
  softmax(cache.preact[L - 1], cache.probs);
}

namespace {

void checkCache(const MlpModel& model, const ForwardCache& cache) {
  if (cache.shapeTag != model.paramCount() || cache.probs.empty() ||
      cache.act.size() != model.numLayers()) {
    throw ConfigError("forward cache does not match model (stale or missing pass)");
  }
}

}  // namespace

void paramGrad(const MlpModel& model, const ForwardCache& cache,
               std::span<const double> outputGrad, std::span<double> grad) {
  checkCache(model, cache);
  const std::size_t L = model.numLayers();
  const auto k = static_cast<std::size_t>(model.numClasses());
  if (outputGrad.size() != k) throw ConfigError("output gradient length mismatch");
  if (grad.size() != model.paramCount()) throw ConfigError("gradient buffer length mismatch");

  // Softmax backward: gz_i = p_i (gp_i - <gp, p>).
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += outputGrad[i] * cache.probs[i];
  std::vector<double> gz(k);
  for (std::size_t i = 0; i < k; ++i) gz[i] = cache.probs[i] * (outputGrad[i] - s);

  for (std::size_t l = L; l-- > 0;) {
    const int in = model.layerSizes[l];
    const int out = model.layerSizes[l + 1];
    const double* w = model.params.data() + model.weightOffset(l);
    double* gw = grad.data() + model.weightOffset(l);
    double* gb = grad.data() + model.biasOffset(l);
    const double* a = cache.act[l].data();
    for (int i = 0; i < out; ++i) {
      const double g = gz[static_cast<std::size_t>(i)];
      double* gRow = gw + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) gRow[j] += g * a[j];
      gb[i] += g;
    }
    if (l == 0) break;
    std::vector<double> ga(static_cast<std::size_t>(in), 0.0);
    for (int i = 0; i < out; ++i) {
      const double g = gz[static_cast<std::size_t>(i)];
      const double* row = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) ga[static_cast<std::size_t>(j)] += row[j] * g;
    }
    const auto& z = cache.preact[l - 1];
    const auto& mask = cache.mask[l - 1];
    gz.resize(static_cast<std::size_t>(in));
    for (int j = 0; j < in; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      gz[jj] = z[jj] > 0.0 ? ga[jj] * mask[jj] : 0.0;
    }
  }
}

void inputGrad(const MlpModel& model, const ForwardCache& cache, int classIndex,
               std::span<double> out) {
  checkCache(model, cache);
  const auto k = static_cast<std::size_t>(model.numClasses());
  if (classIndex < 0 || static_cast<std::size_t>(classIndex) >= k) {
    throw ConfigError("class index out of range");
  }
  if (out.size() != static_cast<std::size_t>(model.inputDim())) {
    throw ConfigError("input gradient buffer length mismatch");
  }
  const std::size_t L = model.numLayers();
  const double py = cache.probs[static_cast<std::size_t>(classIndex)];
  std::vector<double> gz(k);
  for (std::size_t i = 0; i < k; ++i) {
    gz[i] = cache.probs[i] * ((static_cast<std::size_t>(classIndex) == i ? 1.0 : 0.0) - py);
  }
  for (std::size_t l = L; l-- > 0;) {
    const int in = model.layerSizes[l];
    const int out_ = model.layerSizes[l + 1];
    const double* w = model.params.data() + model.weightOffset(l);
    std::vector<double> ga(static_cast<std::size_t>(in), 0.0);
    for (int i = 0; i < out_; ++i) {
      const double g = gz[static_cast<std::size_t>(i)];
      const double* row = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) ga[static_cast<std::size_t>(j)] += row[j] * g;
    }
    if (l == 0) {
      std::copy(ga.begin(), ga.end(), out.begin());
      return;
    }
    const auto& z = cache.preact[l - 1];
    const auto& mask = cache.mask[l - 1];
    gz.resize(static_cast<std::size_t>(in));
    for (int j = 0; j < in; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      gz[jj] = z[jj] > 0.0 ? ga[jj] * mask[jj] : 0.0;
    }
  }
}

void penaltyParamGrad(const MlpModel& model, const ForwardCache& cache,
                      std::span<const PenaltyResidual> residuals, std::span<double> grad) {
  checkCache(model, cache);
  if (cache.mode != ForwardMode::Eval) {
    throw ConfigError("penalty gradients require an eval-mode forward pass");
  }
  if (grad.size() != model.paramCount()) throw ConfigError("gradient buffer length mismatch");
  if (residuals.empty()) return;

  const std::size_t L = model.numLayers();
  const auto d = static_cast<std::size_t>(model.inputDim());
  const auto k = static_cast<std::size_t>(model.numClasses());

  // Tangent direction per voted class: v_y[j] = d(penalty)/d(dp_y/dx_j).
  std::map<int, std::vector<double>> tangents;
  for (const auto& r : residuals) {
    if (r.classIndex < 0 || static_cast<std::size_t>(r.classIndex) >= k) {
      throw ConfigError("penalty residual class index out of range");
    }
    if (r.featureIndex >= d) throw ConfigError("penalty residual feature index out of range");
    auto [it, inserted] = tangents.try_emplace(r.classIndex);
    if (inserted) it->second.assign(d, 0.0);
    it->second[r.featureIndex] += r.weight;
  }

  std::vector<std::vector<double>> dact(L);   // tangents of act
  std::vector<std::vector<double>> dpre(L);   // tangents of preact
  for (const auto& [y, v] : tangents) {
    // Directional (dual) forward: the scalar of interest is dp_y, the
    // derivative of p_y along v.
    dact[0] = v;
    for (std::size_t l = 0; l < L; ++l) {
      const int in = model.layerSizes[l];
      const int out = model.layerSizes[l + 1];
      const double* w = model.params.data() + model.weightOffset(l);
      auto& dz = dpre[l];
      dz.assign(static_cast<std::size_t>(out), 0.0);
      const double* da = dact[l].data();
      for (int i = 0; i < out; ++i) {
        const double* row = w + static_cast<std::size_t>(i) * in;
        double acc = 0.0;
        for (int j = 0; j < in; ++j) acc += row[j] * da[j];
        dz[static_cast<std::size_t>(i)] = acc;
      }
      if (l + 1 < L) {
        const auto& z = cache.preact[l];
        auto& next = dact[l + 1];
        next.resize(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          next[ii] = z[ii] > 0.0 ? dz[ii] : 0.0;
        }
      }
    }

    // Reverse pass over the dual program, seeded at dp_y. With
    //   dp_i = p_i (dz_i - t), t = <p, dz>,
    // the adjoints of dz and of p follow from dpBar = e_y:
    //   dzBar_m = p_m (dpBar_m - <dpBar, p>)
    //   pBar_m  = dpBar_m (dz_m - t) - dz_m <dpBar, p>
    //   zBar_m  = p_m (pBar_m - <pBar, p>).
    const auto& p = cache.probs;
    const auto& dzTop = dpre[L - 1];
    double t = 0.0;
    for (std::size_t i = 0; i < k; ++i) t += p[i] * dzTop[i];
    const double sigma = p[static_cast<std::size_t>(y)];  // <e_y, p>
    std::vector<double> pBar(k), zBar(k), dzBar(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double seed = static_cast<std::size_t>(y) == i ? 1.0 : 0.0;
      dzBar[i] = p[i] * (seed - sigma);
      pBar[i] = seed * (dzTop[static_cast<std::size_t>(y)] - t) - dzTop[i] * sigma;
    }
    double pBarDotP = 0.0;
    for (std::size_t i = 0; i < k; ++i) pBarDotP += pBar[i] * p[i];
    for (std::size_t i = 0; i < k; ++i) zBar[i] = p[i] * (pBar[i] - pBarDotP);

    for (std::size_t l = L; l-- > 0;) {
      const int in = model.layerSizes[l];
      const int out = model.layerSizes[l + 1];
      const double* w = model.params.data() + model.weightOffset(l);
      double* gw = grad.data() + model.weightOffset(l);
      double* gb = grad.data() + model.biasOffset(l);
      const double* a = cache.act[l].data();
      const double* da = dact[l].data();
      checkFinite(zBar, "penalty adjoint", l);
      checkFinite(dzBar, "penalty tangent adjoint", l);
      // z_l = W a + b and dz_l = W da both feed the scalar:
      //   WBar += zBar (x) a + dzBar (x) da, bBar += zBar.
      for (int i = 0; i < out; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        double* gRow = gw + ii * static_cast<std::size_t>(in);
        const double gzv = zBar[ii];
        const double gdzv = dzBar[ii];
        for (int j = 0; j < in; ++j) gRow[j] += gzv * a[j] + gdzv * da[j];
        gb[i] += gzv;
      }
      if (l == 0) break;
      std::vector<double> aBar(static_cast<std::size_t>(in), 0.0);
      std::vector<double> daBar(static_cast<std::size_t>(in), 0.0);
      for (int i = 0; i < out; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double* row = w + ii * static_cast<std::size_t>(in);
        const double gzv = zBar[ii];
        const double gdzv = dzBar[ii];
        for (int j = 0; j < in; ++j) {
          aBar[static_cast<std::size_t>(j)] += row[j] * gzv;
          daBar[static_cast<std::size_t>(j)] += row[j] * gdzv;
        }
      }
      // Through a = relu(z), da = relu'(z) dz; the rectifier's second
      // derivative vanishes almost everywhere, so daBar contributes to
      // dzBar only.
      const auto& z = cache.preact[l - 1];
      zBar.resize(static_cast<std::size_t>(in));
      dzBar.resize(static_cast<std::size_t>(in));
      for (int j = 0; j < in; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const bool on = z[jj] > 0.0;
        zBar[jj] = on ? aBar[jj] : 0.0;
        dzBar[jj] = on ? daBar[jj] : 0.0;
      }
    }
  }
}

OptimizerState makeOptimizer(const MlpModel& model, double learningRate, double weightDecay) {
  if (!(learningRate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(weightDecay >= 0.0)) throw ConfigError("weight decay must be non-negative");
  OptimizerState st;
  st.m.assign(model.paramCount(), 0.0);
  st.v.assign(model.paramCount(), 0.0);
  st.learningRate = learningRate;
  st.weightDecay = weightDecay;
  return st;
}

void adamStep(MlpModel& model, OptimizerState& state, std::span<const double> grad) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const std::size_t n = model.paramCount();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw ConfigError("optimizer shape mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw NumericError("non-finite gradient in optimizer step");
  }
  ++state.step;
  const double lr = state.learningRate;
  const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  const double decay = 1.0 - lr * state.weightDecay;
  for (std::size_t i = 0; i < n; ++i) {
    model.params[i] *= decay;
    state.m[i] = kBeta1 * state.m[i] + (1.0 - kBeta1) * grad[i];
    state.v[i] = kBeta2 * state.v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    const double mHat = state.m[i] / corr1;
    const double vHat = state.v[i] / corr2;
    model.params[i] -= lr * mHat / (std::sqrt(vHat) + kEps);
  }
}

namespace {

constexpr char kCheckpointMagic[8] = {'L', 'O', 'L', 'W', 'M', 'L', 'P', '\0'};
constexpr std::uint32_t kCheckpointVersion = 1;

void writeU64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t readU64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

void writeF64(std::ostream& out, double v) { writeU64(out, std::bit_cast<std::uint64_t>(v)); }
double readF64(std::istream& in) { return std::bit_cast<double>(readU64(in)); }

}  // namespace

void saveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  ckpt.model.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, 8);
  writeU64(out, kCheckpointVersion);
  writeU64(out, ckpt.model.layerSizes.size());
  for (int s : ckpt.model.layerSizes) writeU64(out, static_cast<std::uint64_t>(s));
  writeF64(out, ckpt.model.dropoutRate);
  writeU64(out, ckpt.rngSeed);
  writeU64(out, static_cast<std::uint64_t>(ckpt.epoch));
  writeU64(out, ckpt.model.params.size());
  for (double p : ckpt.model.params) writeF64(out, p);
  if (!out) throw ConfigError("failed writing checkpoint: " + path);
}

Checkpoint loadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw DataError("not a checkpoint file: " + path);
  }
  if (readU64(in) != kCheckpointVersion) throw DataError("unsupported checkpoint version");
  Checkpoint ckpt;
  const std::uint64_t numSizes = readU64(in);
  if (numSizes < 2 || numSizes > 64) throw DataError("corrupt checkpoint layer count");
  for (std::uint64_t i = 0; i < numSizes; ++i) {
    ckpt.model.layerSizes.push_back(static_cast<int>(readU64(in)));
  }
  ckpt.model.dropoutRate = readF64(in);
  ckpt.rngSeed = readU64(in);
  ckpt.epoch = static_cast<int>(readU64(in));
  const std::uint64_t count = readU64(in);
  ckpt.model.params.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) ckpt.model.params[i] = readF64(in);
  if (!in) throw DataError("truncated checkpoint: " + path);
  ckpt.model.validate();
  return ckpt;
}

}  // namespace lolws
