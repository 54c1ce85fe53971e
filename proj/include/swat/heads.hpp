#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "swat/buckets.hpp"

namespace swat {

// Probabilities are clamped to [kProbFloor, kProbCeil] before any log or
// expectation is taken.
inline constexpr double kProbFloor = 1e-7;
inline constexpr double kProbCeil = 1.0 - 1e-7;

enum class HeadKind { Binom, Geo, VGeo, WLR };

std::string_view head_name(HeadKind kind);
// Accepts "binom", "geo", "vgeo", "wlr".
HeadKind parse_head(std::string_view name);

// Number of logits the head consumes: N for Binom, N + 1 for Geo, 1 for the
// un-bucketized heads.
std::size_t head_arity(HeadKind kind, const BucketScheme* scheme);

// Throws std::invalid_argument if the head needs a scheme and none is given,
// or if the scheme's tail flag does not fit the head.
void check_head_scheme(HeadKind kind, const BucketScheme* scheme);

double clamped_sigmoid(double logit);

struct HeadOutput {
  std::vector<double> logits;
  std::vector<double> probs;

  static HeadOutput from_logits(std::span<const double> logits);
  // Test and simulator convenience; the probabilities are clamped and the
  // logits set to their log-odds.
  static HeadOutput from_probs(std::span<const double> probs);
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logits
};

// All losses are negative log-likelihoods; the span forms write the gradient
// with respect to the logits into `grad` and return the loss.

// Sum over buckets of binary cross-entropy against soft labels.
double binom_loss(std::span<const double> probs, std::span<const double> labels,
                  std::span<double> grad);
LossGrad binom_loss(const HeadOutput& out, std::span<const double> labels);

// Bucketized geometric likelihood of watch time t; probs has N + 1 entries.
double geo_loss(std::span<const double> probs, const BucketScheme& scheme,
                std::int64_t t, std::span<double> grad);
LossGrad geo_loss(const HeadOutput& out, const BucketScheme& scheme,
                  std::int64_t t);

double geo_log_pmf(std::span<const double> probs, const BucketScheme& scheme,
                   std::int64_t t);
double geo_pmf(std::span<const double> probs, const BucketScheme& scheme,
               std::int64_t t);

// Closed-form mean of the bucketized geometric model.
double geo_expectation(std::span<const double> probs,
                       const BucketScheme& scheme);

// Sum of width(k) * p_k.
double binom_expectation(std::span<const double> probs,
                         const BucketScheme& scheme);

// -[t log p + log(1 - p)].
double vgeo_loss(double prob, std::int64_t t, double& grad);
LossGrad vgeo_loss(const HeadOutput& out, std::int64_t t);

// -t log p for t > 0 and -log(1 - p) for t = 0.
double wlr_loss(double prob, std::int64_t t, double& grad);
LossGrad wlr_loss(const HeadOutput& out, std::int64_t t);

// Expected watch time in scaled units. VGeo and WLR return exp(logit).
double expectation(HeadKind kind, const HeadOutput& out,
                   const BucketScheme* scheme);

}  // namespace swat
