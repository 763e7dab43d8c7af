#include "gentune/trainer.hpp"

#include "gentune/sampler.hpp"

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>

namespace gentune {

namespace {
constexpr double kTiny = 1e-300;
const double kAlmostOne = std::nextafter(1.0, 0.0);

double sigmoid(double x) {
  double t = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return std::clamp(t, kTiny, kAlmostOne);
}
}  // namespace

WeightParams WeightParams::from_weights(const WeightVector& w, bool clamp, double lo, double hi) {
  WeightParams p;
  p.clamp = clamp;
  p.lo = lo;
  p.hi = hi;
  p.logits.resize(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    double t = std::clamp(w[i], 1e-12, 1.0 - 1e-12);
    p.logits[i] = std::log(t / (1.0 - t));
  }
  return p;
}

WeightVector WeightParams::squash() const { return logits.unaryExpr([](double x) { return sigmoid(x); }); }

WeightVector WeightParams::realize() const {
  WeightVector t = squash();
  if (clamp) t = t.cwiseMax(lo).cwiseMin(hi);
  return t;
}

std::uint64_t weight_digest(const WeightVector& w) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    unsigned char buf[sizeof(double)];
    double v = w[i];
    std::memcpy(buf, &v, sizeof v);
    for (unsigned char c : buf) h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

TrainResult train(Objective& objective, const WeightVector& init, const TrainConfig& cfg,
                  const std::function<void(const TraceRow&)>& on_epoch) {
  if (!(cfg.lr > 0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.clamp && !(cfg.clamp_lo < cfg.clamp_hi)) throw std::invalid_argument("clamp bounds must satisfy lo < hi");
  WeightParams params = WeightParams::from_weights(init, cfg.clamp, cfg.clamp_lo, cfg.clamp_hi);
  TrainResult out;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    WeightVector raw = params.squash();
    WeightVector w = params.realize();
    ObjectiveValue ov = objective.evaluate(w, stream_seed(cfg.seed, epoch));
    if (!std::isfinite(ov.value) || !ov.grad.allFinite())
      throw TrainError(epoch, w, "non-finite objective or gradient at epoch " + std::to_string(epoch));
    if (ov.empty_batch) {
      ++out.empty_batches;
      std::cerr << "warning: epoch " << epoch << ": no valid samples in batch; skipping step\n";
    }
    WeightVector g = ov.grad.cwiseProduct(raw.cwiseProduct((1.0 - raw.array()).matrix()));
    if (cfg.clamp)
      for (Eigen::Index i = 0; i < g.size(); ++i)
        if (raw[i] < cfg.clamp_lo || raw[i] > cfg.clamp_hi) g[i] = 0.0;
    TraceRow row{epoch, ov.value, g.norm(), weight_digest(w)};
    out.trace.push_back(row);
    if (on_epoch) on_epoch(row);
    if (cfg.log_every && epoch % cfg.log_every == 0)
      std::cerr << "epoch " << epoch << " objective " << ov.value << " |grad| " << row.grad_norm << "\n";
    params.logits += cfg.lr * g;
    if (cfg.early_stop && epoch >= cfg.plateau_window) {
      double before = out.trace[epoch - cfg.plateau_window].objective;
      double gain = (ov.value - before) / std::max(std::abs(before), 1e-12);
      if (gain < cfg.plateau_tol) {
        out.stopped_early = true;
        break;
      }
    }
  }
  out.weights = params.realize();
  if (cfg.epochs == 0) out.weights = init;
  return out;
}

}  // namespace gentune
