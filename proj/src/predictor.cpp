#include "swat/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "swat/errors.hpp"
#include "swat/labels.hpp"

namespace swat {
namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HeadLoss::HeadLoss(HeadKind kind, std::optional<BucketScheme> scheme,
                   LabelSource labels)
    : kind_(kind), scheme_(std::move(scheme)), labels_(labels) {
  check_head_scheme(kind_, scheme_ ? &*scheme_ : nullptr);
  arity_ = head_arity(kind_, scheme_ ? &*scheme_ : nullptr);
  if (kind_ == HeadKind::Binom) label_buf_.resize(arity_);
}

double HeadLoss::operator()(const HeadOutput& out, const Sample& sample,
                            std::span<double> dlogits) {
  if (out.probs.size() != arity_ || dlogits.size() != arity_) {
    throw std::invalid_argument("head output has " + std::to_string(out.probs.size()) +
                                " values, " + std::string(head_name(kind_)) +
                                " head expects " + std::to_string(arity_));
  }
  switch (kind_) {
    case HeadKind::Binom: {
      if (labels_ == LabelSource::BucketTimes) {
        label_buf_ = labels_from_bucket_times(*scheme_, sample.bucket_times);
      } else if (encode_into(*scheme_, sample.target, label_buf_)) {
        ++clipped_;
      }
      return binom_loss(out.probs, label_buf_, dlogits);
    }
    case HeadKind::Geo:
      return geo_loss(out.probs, *scheme_, sample.target, dlogits);
    case HeadKind::VGeo:
      return vgeo_loss(out.probs[0], sample.target, dlogits[0]);
    case HeadKind::WLR:
      return wlr_loss(out.probs[0], sample.target, dlogits[0]);
  }
  return 0.0;
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"head", head_name(c.head)},
          {"scheme", c.scheme ? to_json(*c.scheme) : nlohmann::json(nullptr)},
          {"label_source", c.label_source == LabelSource::Encoded ? "encoded" : "bucket_times"},
          {"hash_dim", c.features.hash_dim},
          {"numeric_dims", c.features.numeric_dims},
          {"hash_seed", c.features.hash_seed},
          {"hidden", c.hidden},
          {"lr", c.optimizer.lr},
          {"beta1", c.optimizer.beta1},
          {"beta2", c.optimizer.beta2},
          {"eps", c.optimizer.eps},
          {"weight_decay", c.optimizer.weight_decay},
          {"batch", c.batch},
          {"max_epochs", c.max_epochs},
          {"tolerance", c.tolerance},
          {"seed", c.seed}};
}

HeadOutput Predictor::output(const Sample& sample) const {
  return forward(model, featurize(features, sample));
}

double Predictor::predict(const Sample& sample) const {
  return expectation(head, output(sample), scheme ? &*scheme : nullptr);
}

nlohmann::json to_json(const Predictor& p) {
  return {{"format_version", kModelFormatVersion},
          {"head", head_name(p.head)},
          {"scheme", p.scheme ? to_json(*p.scheme) : nlohmann::json(nullptr)},
          {"features",
           {{"hash_dim", p.features.hash_dim},
            {"numeric_dims", p.features.numeric_dims},
            {"hash_seed", p.features.hash_seed}}},
          {"layers", {p.model.input_dim(), p.model.hidden(), p.model.output()}},
          {"seed", p.seed},
          {"scale", p.scale},
          {"params", std::vector<double>(p.model.params().begin(), p.model.params().end())}};
}

Predictor predictor_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw std::invalid_argument("unsupported model format version " +
                                  std::to_string(version));
    }
    Predictor p;
    p.head = parse_head(j.at("head").get<std::string>());
    if (!j.at("scheme").is_null()) p.scheme = scheme_from_json(j.at("scheme"));
    const auto& f = j.at("features");
    p.features.hash_dim = f.at("hash_dim").get<std::uint32_t>();
    p.features.numeric_dims = f.at("numeric_dims").get<std::uint32_t>();
    p.features.hash_seed = f.at("hash_seed").get<std::uint64_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.scale = j.value("scale", 1.0);
    if (!(p.scale > 0.0)) throw std::invalid_argument("model scale must be > 0");
    const auto layers = j.at("layers").get<std::vector<std::size_t>>();
    if (layers.size() != 3) throw std::invalid_argument("model layers must have 3 entries");
    if (layers[0] != p.features.input_dim()) {
      throw std::invalid_argument("model input size does not match feature spec");
    }
    check_head_scheme(p.head, p.scheme ? &*p.scheme : nullptr);
    if (layers[2] != head_arity(p.head, p.scheme ? &*p.scheme : nullptr)) {
      throw std::invalid_argument("model output size does not match head arity");
    }
    p.model = Model(layers[0], layers[1], layers[2], 0);
    auto params = j.at("params").get<std::vector<double>>();
    for (double v : params) {
      if (!std::isfinite(v)) throw std::invalid_argument("model has non-finite parameters");
    }
    p.model.set_params(std::move(params));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
  }
}

void save_predictor(const std::filesystem::path& path, const Predictor& predictor) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write model");
  out << to_json(predictor).dump() << '\n';
}

Predictor load_predictor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open model");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return predictor_from_json(j);
}

double mean_loss(const Predictor& predictor, const Dataset& dataset,
                 LabelSource labels) {
  if (dataset.samples.empty()) throw std::invalid_argument("mean_loss: empty dataset");
  HeadLoss loss(predictor.head, predictor.scheme, labels);
  std::vector<double> dlogits(loss.arity());
  double total = 0.0;
  for (const auto& s : dataset.samples) total += loss(predictor.output(s), s, dlogits);
  return total / static_cast<double>(dataset.samples.size());
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  if (dataset.samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.batch == 0) throw std::invalid_argument("train: batch size must be > 0");

  HeadLoss head_loss(config.head, config.scheme, config.label_source);
  const std::size_t arity = head_loss.arity();

  std::vector<SparseVector> inputs;
  inputs.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) inputs.push_back(featurize(config.features, s));

  TrainResult result;
  Predictor& pred = result.predictor;
  pred.features = config.features;
  pred.head = config.head;
  pred.scheme = config.scheme;
  pred.seed = config.seed;
  pred.scale = dataset.c;
  pred.model = Model(config.features.input_dim(), config.hidden, arity, config.seed);

  Model& model = pred.model;
  AdamW optimizer(model.num_params(), config.optimizer);
  std::vector<double> grad(model.num_params());
  std::vector<double> dlogits(arity);
  const std::size_t n = inputs.size();

  const auto fail = [&](std::size_t epoch, std::size_t batch) {
    std::ostringstream os;
    os << "non-finite loss at epoch " << epoch << ", batch " << batch
       << " (parameter norm " << l2_norm(model.params()) << ")";
    throw NumericError(os.str());
  };

  double initial = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto out = HeadOutput::from_logits(model.forward(inputs[i]).logits);
    initial += head_loss(out, dataset.samples[i], dlogits);
  }
  initial /= static_cast<double>(n);
  if (!std::isfinite(initial)) fail(0, 0);
  result.loss_trace.push_back(initial);
  // Every sample has been encoded exactly once at this point.
  result.clipped = head_loss.clipped();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ull);

  double previous = initial;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch, ++batch_index) {
      const std::size_t end = std::min(n, start + config.batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto acts = model.forward(inputs[i]);
        const auto out = HeadOutput::from_logits(acts.logits);
        batch_loss += head_loss(out, dataset.samples[i], dlogits);
        model.backward(inputs[i], acts, dlogits, scale, grad);
      }
      if (!std::isfinite(batch_loss)) fail(epoch, batch_index);
      optimizer.step(model.params(), grad);
      epoch_loss += batch_loss;
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss) || !std::isfinite(l2_norm(model.params()))) {
      fail(epoch, batch_index);
    }
    result.loss_trace.push_back(epoch_loss);
    result.epochs = epoch;
    const double improvement = (previous - epoch_loss) / std::max(std::abs(previous), 1e-300);
    previous = epoch_loss;
    if (improvement < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace swat
