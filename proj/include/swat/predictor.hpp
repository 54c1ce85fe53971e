#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "swat/buckets.hpp"
#include "swat/dataio.hpp"
#include "swat/heads.hpp"
#include "swat/model.hpp"
#include "swat/optimizer.hpp"

namespace swat {

enum class LabelSource {
  Encoded,      // soft labels derived from the total watch time
  BucketTimes,  // logged per-bucket watch times t_k / width(k)
};

// Per-sample negative log-likelihood for one head, with its gradient at the
// logits. Keeps a label scratch buffer, so one instance per thread.
class HeadLoss {
 public:
  HeadLoss(HeadKind kind, std::optional<BucketScheme> scheme,
           LabelSource labels = LabelSource::Encoded);

  double operator()(const HeadOutput& out, const Sample& sample,
                    std::span<double> dlogits);

  HeadKind kind() const { return kind_; }
  std::size_t arity() const { return arity_; }
  // Samples whose watch time exceeded the last endpoint of a binom scheme.
  std::size_t clipped() const { return clipped_; }

 private:
  HeadKind kind_;
  std::optional<BucketScheme> scheme_;
  LabelSource labels_;
  std::size_t arity_;
  std::vector<double> label_buf_;
  std::size_t clipped_ = 0;
};

struct TrainConfig {
  HeadKind head = HeadKind::Binom;
  std::optional<BucketScheme> scheme;
  LabelSource label_source = LabelSource::Encoded;
  FeatureSpec features;
  std::size_t hidden = 16;
  AdamWOptions optimizer;
  std::size_t batch = 1024;
  std::size_t max_epochs = 20;
  // Stop once the relative epoch-over-epoch loss improvement falls below this.
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const TrainConfig& config);

// A trained model together with everything needed to featurize samples and
// turn logits into a watch-time estimate.
struct Predictor {
  FeatureSpec features;
  Model model;
  HeadKind head = HeadKind::Binom;
  std::optional<BucketScheme> scheme;
  std::uint64_t seed = 0;
  // Target scaling constant c the model was trained with.
  double scale = 1.0;

  HeadOutput output(const Sample& sample) const;
  // Expected watch time in scaled (training-target) units.
  double predict(const Sample& sample) const;
};

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const Predictor& predictor);
Predictor predictor_from_json(const nlohmann::json& j);
void save_predictor(const std::filesystem::path& path, const Predictor& predictor);
Predictor load_predictor(const std::filesystem::path& path);

struct TrainResult {
  Predictor predictor;
  // Entry 0 is the mean loss of the initial model; entry e is the mean
  // training loss during epoch e.
  std::vector<double> loss_trace;
  std::size_t epochs = 0;
  bool converged = false;
  std::size_t clipped = 0;
};

// Mean per-sample loss of a predictor over a dataset.
double mean_loss(const Predictor& predictor, const Dataset& dataset,
                 LabelSource labels = LabelSource::Encoded);

// Seeded shuffled mini-batch AdamW on the mean per-sample loss. Throws
// NumericError when a loss turns non-finite.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

}  // namespace swat
