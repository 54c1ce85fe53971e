#include "swat/heads.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swat {
namespace {

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(want) + " values, got " +
                                std::to_string(got));
  }
}

double clamp_prob(double p) { return std::clamp(p, kProbFloor, kProbCeil); }

// x_{k-1} p + p (1 - p^w) / (1 - p) - x_k p^{w + 1}, i.e. (1 - p) times the
// sum of t p^{t - x_{k-1}} over the bucket. Rewritten as
// x_{k-1} p (1 - p^w) + [S - w p^{w+1}] to keep the large endpoint terms
// from cancelling.
double bucket_moment(double p, std::int64_t lo, std::int64_t w) {
  const double log_p = std::log(p);
  const double dw = static_cast<double>(w);
  const double one_minus_pw = -std::expm1(dw * log_p);
  double rest = 0.0;
  if (1.0 - p < 1e-6) {
    // sum_{j=1..w} p^j (1 - p^{w + 1 - j}), evaluated term by term.
    double pj = 1.0;
    for (std::int64_t j = 1; j <= w; ++j) {
      pj *= p;
      rest += pj * -std::expm1(static_cast<double>(w + 1 - j) * log_p);
    }
  } else {
    const double pw = std::exp(dw * log_p);
    rest = p * one_minus_pw / (1.0 - p) - dw * p * pw;
  }
  return static_cast<double>(lo) * p * one_minus_pw + rest;
}

}  // namespace

std::string_view head_name(HeadKind kind) {
  switch (kind) {
    case HeadKind::Binom: return "binom";
    case HeadKind::Geo: return "geo";
    case HeadKind::VGeo: return "vgeo";
    case HeadKind::WLR: return "wlr";
  }
  return "?";
}

HeadKind parse_head(std::string_view name) {
  if (name == "binom") return HeadKind::Binom;
  if (name == "geo") return HeadKind::Geo;
  if (name == "vgeo") return HeadKind::VGeo;
  if (name == "wlr") return HeadKind::WLR;
  throw std::invalid_argument("unknown head '" + std::string(name) +
                              "' (expected binom, geo, vgeo or wlr)");
}

std::size_t head_arity(HeadKind kind, const BucketScheme* scheme) {
  switch (kind) {
    case HeadKind::Binom:
    case HeadKind::Geo:
      if (!scheme) {
        throw std::invalid_argument(std::string(head_name(kind)) +
                                    " head requires a bucket scheme");
      }
      return kind == HeadKind::Binom ? scheme->size() : scheme->size() + 1;
    case HeadKind::VGeo:
    case HeadKind::WLR:
      return 1;
  }
  return 1;
}

void check_head_scheme(HeadKind kind, const BucketScheme* scheme) {
  if (kind == HeadKind::VGeo || kind == HeadKind::WLR) return;
  if (!scheme) {
    throw std::invalid_argument(std::string(head_name(kind)) +
                                " head requires a bucket scheme");
  }
  if (kind == HeadKind::Binom && scheme->tail_open()) {
    throw std::invalid_argument("binom head requires a closed scheme (tail_open = false)");
  }
  if (kind == HeadKind::Geo && !scheme->tail_open()) {
    throw std::invalid_argument("geo head requires an open scheme (tail_open = true)");
  }
}

double clamped_sigmoid(double logit) {
  return clamp_prob(1.0 / (1.0 + std::exp(-logit)));
}

HeadOutput HeadOutput::from_logits(std::span<const double> logits) {
  HeadOutput out;
  out.logits.assign(logits.begin(), logits.end());
  out.probs.resize(logits.size());
  std::transform(logits.begin(), logits.end(), out.probs.begin(),
                 clamped_sigmoid);
  return out;
}

HeadOutput HeadOutput::from_probs(std::span<const double> probs) {
  HeadOutput out;
  out.probs.resize(probs.size());
  out.logits.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    out.probs[i] = p;
    out.logits[i] = std::log(p) - std::log1p(-p);
  }
  return out;
}

double binom_loss(std::span<const double> probs, std::span<const double> labels,
                  std::span<double> grad) {
  check_size(labels.size(), probs.size(), "binom_loss labels");
  check_size(grad.size(), probs.size(), "binom_loss gradient");
  double loss = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double p = probs[k];
    const double l = labels[k];
    loss -= l * std::log(p) + (1.0 - l) * std::log1p(-p);
    grad[k] = p - l;
  }
  return loss;
}

LossGrad binom_loss(const HeadOutput& out, std::span<const double> labels) {
  LossGrad r;
  r.grad.resize(out.probs.size());
  r.loss = binom_loss(out.probs, labels, r.grad);
  return r;
}

double geo_loss(std::span<const double> probs, const BucketScheme& scheme,
                std::int64_t t, std::span<double> grad) {
  check_size(probs.size(), scheme.size() + 1, "geo_loss probabilities");
  check_size(grad.size(), probs.size(), "geo_loss gradient");
  if (t < 0) throw std::invalid_argument("geo_loss: negative watch time");
  const std::size_t n = scheme.open_index(t);
  double loss = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double p = probs[k];
    if (k < n) {
      const auto w = static_cast<double>(scheme.width(k));
      loss -= w * std::log(p);
      grad[k] = -w * (1.0 - p);
    } else if (k == n) {
      const auto a = static_cast<double>(t - scheme.lower(k));
      loss -= a * std::log(p) + std::log1p(-p);
      grad[k] = -(a * (1.0 - p) - p);
    } else {
      grad[k] = 0.0;
    }
  }
  return loss;
}

LossGrad geo_loss(const HeadOutput& out, const BucketScheme& scheme,
                  std::int64_t t) {
  LossGrad r;
  r.grad.resize(out.probs.size());
  r.loss = geo_loss(out.probs, scheme, t, r.grad);
  return r;
}

double geo_log_pmf(std::span<const double> probs, const BucketScheme& scheme,
                   std::int64_t t) {
  check_size(probs.size(), scheme.size() + 1, "geo_pmf probabilities");
  if (t < 0) throw std::invalid_argument("geo_pmf: negative watch time");
  const std::size_t n = scheme.open_index(t);
  double log_pmf = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    log_pmf += static_cast<double>(scheme.width(k)) * std::log(probs[k]);
  }
  const double p = probs[n];
  log_pmf += static_cast<double>(t - scheme.lower(n)) * std::log(p) +
             std::log1p(-p);
  return log_pmf;
}

double geo_pmf(std::span<const double> probs, const BucketScheme& scheme,
               std::int64_t t) {
  return std::exp(geo_log_pmf(probs, scheme, t));
}

double geo_expectation(std::span<const double> probs,
                       const BucketScheme& scheme) {
  check_size(probs.size(), scheme.size() + 1, "geo_expectation probabilities");
  // log of prod_{j<k} p_j^{width(j)}: probability of surviving past bucket k-1.
  double log_survive = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const double p = clamp_prob(probs[k]);
    total += std::exp(log_survive) * bucket_moment(p, scheme.lower(k), scheme.width(k));
    log_survive += static_cast<double>(scheme.width(k)) * std::log(p);
  }
  const double q = clamp_prob(probs.back());
  const double tail =
      static_cast<double>(scheme.last()) * q + q / (1.0 - q);
  return total + std::exp(log_survive) * tail;
}

double binom_expectation(std::span<const double> probs,
                         const BucketScheme& scheme) {
  check_size(probs.size(), scheme.size(), "binom_expectation probabilities");
  double total = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    total += static_cast<double>(scheme.width(k)) * probs[k];
  }
  return total;
}

double vgeo_loss(double prob, std::int64_t t, double& grad) {
  if (t < 0) throw std::invalid_argument("vgeo_loss: negative watch time");
  const auto dt = static_cast<double>(t);
  grad = -(dt * (1.0 - prob) - prob);
  return -(dt * std::log(prob) + std::log1p(-prob));
}

LossGrad vgeo_loss(const HeadOutput& out, std::int64_t t) {
  check_size(out.probs.size(), 1, "vgeo_loss probabilities");
  LossGrad r;
  r.grad.resize(1);
  r.loss = vgeo_loss(out.probs[0], t, r.grad[0]);
  return r;
}

double wlr_loss(double prob, std::int64_t t, double& grad) {
  if (t < 0) throw std::invalid_argument("wlr_loss: negative watch time");
  if (t == 0) {
    grad = prob;
    return -std::log1p(-prob);
  }
  const auto dt = static_cast<double>(t);
  grad = -dt * (1.0 - prob);
  return -dt * std::log(prob);
}

LossGrad wlr_loss(const HeadOutput& out, std::int64_t t) {
  check_size(out.probs.size(), 1, "wlr_loss probabilities");
  LossGrad r;
  r.grad.resize(1);
  r.loss = wlr_loss(out.probs[0], t, r.grad[0]);
  return r;
}

double expectation(HeadKind kind, const HeadOutput& out,
                   const BucketScheme* scheme) {
  check_size(out.probs.size(), head_arity(kind, scheme), "expectation");
  switch (kind) {
    case HeadKind::Binom: return binom_expectation(out.probs, *scheme);
    case HeadKind::Geo: return geo_expectation(out.probs, *scheme);
    case HeadKind::VGeo:
    case HeadKind::WLR: return std::exp(out.logits[0]);
  }
  return 0.0;
}

}  // namespace swat
