#include "swat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swat/labels.hpp"
#include "swat/model.hpp"
#include "swat/predictor.hpp"
#include "swat/simulate.hpp"

namespace swat {
namespace {

constexpr double kGradTol = 1e-5;
constexpr double kExpectationTol = 1e-9;
constexpr double kPmfAbsTol = 1e-12;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

void record(PropertyResult& r, double error, double tol) {
  ++r.checks;
  r.worst = std::max(r.worst, error);
  if (!(error <= tol)) {
    ++r.failures;
    r.passed = false;
  }
}

void finish(PropertyResult& r, const std::string& what) {
  std::ostringstream os;
  os << r.checks << " checks, " << r.failures << " failures, worst " << what
     << " " << r.worst;
  r.detail = os.str();
}

// Loss of one head as a function of its logits, plus the analytic gradient.
struct HeadCase {
  std::function<double(std::span<const double>)> loss;
  std::vector<double> logits;
  std::vector<double> analytic;
};

HeadCase draw_head_case(HeadKind kind, std::mt19937_64& rng) {
  HeadCase c;
  switch (kind) {
    case HeadKind::Binom: {
      const auto scheme = random_scheme(rng, 1, 10, 1, 30, false);
      std::vector<double> labels(scheme.size());
      if (uniform_int(rng, 0, 1) == 0) {
        labels = encode(scheme, uniform_int(rng, 0, scheme.last() + 5)).values;
      } else {
        for (auto& l : labels) l = uniform(rng, 0.0, 1.0);
      }
      c.logits.resize(scheme.size());
      for (auto& y : c.logits) y = uniform(rng, -4.0, 4.0);
      c.loss = [labels](std::span<const double> y) {
        return binom_loss(HeadOutput::from_logits(y), labels).loss;
      };
      c.analytic = binom_loss(HeadOutput::from_logits(c.logits), labels).grad;
      break;
    }
    case HeadKind::Geo: {
      const auto scheme = random_scheme(rng, 1, 10, 1, 30, true);
      const auto t = uniform_int(rng, 0, scheme.last() + 20);
      c.logits.resize(scheme.size() + 1);
      for (auto& y : c.logits) y = uniform(rng, -4.0, 4.0);
      c.loss = [scheme, t](std::span<const double> y) {
        return geo_loss(HeadOutput::from_logits(y), scheme, t).loss;
      };
      c.analytic = geo_loss(HeadOutput::from_logits(c.logits), scheme, t).grad;
      break;
    }
    case HeadKind::VGeo:
    case HeadKind::WLR: {
      const auto t = uniform_int(rng, 0, 3) == 0 ? 0 : uniform_int(rng, 1, 200);
      c.logits = {uniform(rng, -4.0, 4.0)};
      auto fn = [kind, t](std::span<const double> y) {
        const auto out = HeadOutput::from_logits(y);
        return kind == HeadKind::VGeo ? vgeo_loss(out, t).loss : wlr_loss(out, t).loss;
      };
      c.loss = fn;
      const auto out = HeadOutput::from_logits(c.logits);
      c.analytic = kind == HeadKind::VGeo ? vgeo_loss(out, t).grad : wlr_loss(out, t).grad;
      break;
    }
  }
  return c;
}

PropertyResult check_head_gradient(HeadKind kind, const VerifyOptions& opt,
                                   std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "gradient_fidelity/" + std::string(head_name(kind));
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    auto c = draw_head_case(kind, rng);
    if (opt.corrupt_gradient == kind) {
      for (auto& g : c.analytic) g = -g;
    }
    const auto numeric = numeric_gradient(c.loss, c.logits);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      record(r, gradient_error(c.analytic[i], numeric[i]), kGradTol);
    }
  }
  finish(r, "relative error");
  return r;
}

PropertyResult check_gradient_bounds(const VerifyOptions& opt, std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "gradient_bounds";
  const std::size_t draws = opt.trials * 100;
  for (std::size_t trial = 0; trial < draws; ++trial) {
    const auto scheme = random_scheme(rng, 1, 10, 1, 30, false);
    std::vector<double> logits(scheme.size() + 1);
    for (auto& y : logits) y = uniform(rng, -20.0, 20.0);
    const auto t = uniform_int(rng, 0, scheme.last() + 10);

    const std::span<const double> bounded(logits.data(), scheme.size());
    const auto binom = binom_loss(HeadOutput::from_logits(bounded), encode(scheme, t).values);
    for (double g : binom.grad) record(r, std::max(0.0, std::abs(g) - 1.0), 0.0);

    const auto geo = geo_loss(HeadOutput::from_logits(logits), scheme.with_tail(true), t);
    for (std::size_t k = 0; k < scheme.size(); ++k) {
      const auto w = static_cast<double>(scheme.width(k));
      record(r, std::max(0.0, std::abs(geo.grad[k]) - w), 0.0);
    }
  }
  finish(r, "bound violation");
  return r;
}

PropertyResult check_geo_expectation(const VerifyOptions& opt, std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "geo_expectation_vs_enumeration";
  for (std::size_t trial = 0; trial < std::max<std::size_t>(opt.trials, 200); ++trial) {
    const auto scheme = random_scheme(rng, 1, 10, 1, 30, true);
    std::vector<double> probs(scheme.size() + 1);
    for (auto& p : probs) p = uniform(rng, 0.05, 0.95);
    const double closed = geo_expectation(probs, scheme);
    const double brute = enumerate_bucket_geometric(probs, scheme, 1e-12).mean;
    record(r, std::abs(closed - brute) / std::abs(brute), kExpectationTol);
  }
  finish(r, "relative error");
  return r;
}

PropertyResult check_uniform_reduction(std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "uniform_reduction";
  for (double p : {0.1, 0.5, 0.9}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto scheme = random_scheme(rng, 1, 10, 1, 60, true);
      const std::vector<double> probs(scheme.size() + 1, p);
      for (std::int64_t t = 0; t <= 500; ++t) {
        const double want = std::pow(p, static_cast<double>(t)) * (1.0 - p);
        record(r, std::abs(geo_pmf(probs, scheme, t) - want), kPmfAbsTol);
      }
      const double mean = p / (1.0 - p);
      record(r, std::abs(geo_expectation(probs, scheme) - mean) / mean,
             kExpectationTol);
    }
  }
  finish(r, "error");
  return r;
}

PropertyResult check_label_round_trip(const VerifyOptions& opt, std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "label_round_trip";
  const std::size_t schemes = std::max<std::size_t>(opt.trials / 2, 50);
  for (std::size_t trial = 0; trial < schemes; ++trial) {
    const auto scheme = random_scheme(rng, 1, 20, 1, 500, false);
    for (std::int64_t t = 0; t <= scheme.last(); ++t) {
      const auto back = decode(scheme, encode(scheme, t));
      record(r, static_cast<double>(std::abs(back - t)), 0.0);
    }
  }
  finish(r, "error");
  return r;
}

PropertyResult check_total_mass(const VerifyOptions& opt, std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "total_mass_diagnostic";
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    const auto scheme = random_scheme(rng, 1, 10, 1, 30, true);
    const std::vector<double> uniform_probs(scheme.size() + 1, uniform(rng, 0.05, 0.95));
    record(r, std::abs(total_mass(uniform_probs, scheme) - 1.0), 1e-9);

    std::vector<double> probs(scheme.size() + 1);
    for (auto& p : probs) p = uniform(rng, 0.01, 0.99);
    const double mass = total_mass(probs, scheme);
    // In (0, 2): violation measured as distance outside the open interval.
    record(r, mass > 0.0 && mass < 2.0 ? 0.0 : 1.0, 0.0);
  }
  finish(r, "deviation");
  return r;
}

PropertyResult check_model_gradient(HeadKind kind, const VerifyOptions& opt,
                                    std::mt19937_64& rng) {
  PropertyResult r;
  r.name = "model_gradient/" + std::string(head_name(kind));
  std::optional<BucketScheme> scheme;
  if (kind == HeadKind::Binom || kind == HeadKind::Geo) {
    const std::vector<std::int64_t> ends = {5, 12, 22};
    scheme = BucketScheme::from_endpoints(ends, kind == HeadKind::Geo);
  }
  const std::size_t arity = head_arity(kind, scheme ? &*scheme : nullptr);
  const std::size_t trials = std::max<std::size_t>(opt.trials / 10, 10);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Model model(4, 3, arity, rng());
    SparseVector x{{0, 1, 2, 3}, {}};
    for (int i = 0; i < 4; ++i) x.value.push_back(uniform(rng, -1.5, 1.5));
    // Keep every hidden unit away from the relu kink.
    const auto acts = model.forward(x);
    if (std::any_of(acts.hidden_pre.begin(), acts.hidden_pre.end(),
                    [](double z) { return std::abs(z) < 1e-3; })) {
      continue;
    }
    Sample sample;
    sample.target = uniform_int(rng, 0, 30);

    HeadLoss loss(kind, scheme);
    std::vector<double> dlogits(arity);
    loss(HeadOutput::from_logits(acts.logits), sample, dlogits);
    if (opt.corrupt_gradient == kind) {
      for (auto& g : dlogits) g = -g;
    }
    std::vector<double> analytic(model.num_params(), 0.0);
    model.backward(x, acts, dlogits, 1.0, analytic);

    const std::vector<double> base(model.params().begin(), model.params().end());
    auto f = [&](std::span<const double> params) {
      Model m = model;
      m.set_params({params.begin(), params.end()});
      std::vector<double> scratch(arity);
      return loss(HeadOutput::from_logits(m.forward(x).logits), sample, scratch);
    };
    const auto numeric = numeric_gradient(f, base);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      record(r, gradient_error(analytic[i], numeric[i]), kGradTol);
    }
  }
  finish(r, "relative error");
  return r;
}

}  // namespace

double gradient_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

std::vector<double> numeric_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = point[i];
    point[i] = orig + h;
    const double up = f(point);
    point[i] = orig - h;
    const double down = f(point);
    point[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

BucketScheme random_scheme(std::mt19937_64& rng, std::size_t n_min,
                           std::size_t n_max, std::int64_t w_min,
                           std::int64_t w_max, bool tail_open) {
  const auto n = static_cast<std::size_t>(
      uniform_int(rng, static_cast<std::int64_t>(n_min), static_cast<std::int64_t>(n_max)));
  std::vector<std::int64_t> ends;
  std::int64_t x = 0;
  for (std::size_t k = 0; k < n; ++k) {
    x += uniform_int(rng, w_min, w_max);
    ends.push_back(x);
  }
  return BucketScheme::from_endpoints(ends, tail_open);
}

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

std::vector<std::string> VerifyReport::failed() const {
  std::vector<std::string> names;
  for (const auto& p : properties) {
    if (!p.passed) names.push_back(p.name);
  }
  return names;
}

VerifyReport run_verification(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  VerifyReport report;
  for (auto kind : {HeadKind::Binom, HeadKind::Geo, HeadKind::VGeo, HeadKind::WLR}) {
    report.properties.push_back(check_head_gradient(kind, options, rng));
  }
  report.properties.push_back(check_gradient_bounds(options, rng));
  report.properties.push_back(check_geo_expectation(options, rng));
  report.properties.push_back(check_uniform_reduction(rng));
  report.properties.push_back(check_label_round_trip(options, rng));
  report.properties.push_back(check_total_mass(options, rng));
  for (auto kind : {HeadKind::Binom, HeadKind::Geo, HeadKind::VGeo, HeadKind::WLR}) {
    report.properties.push_back(check_model_gradient(kind, options, rng));
  }
  return report;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : report.properties) {
    props.push_back({{"name", p.name},
                     {"passed", p.passed},
                     {"checks", p.checks},
                     {"failures", p.failures},
                     {"worst", p.worst},
                     {"detail", p.detail}});
  }
  return {{"passed", report.passed()}, {"failed", report.failed()}, {"properties", props}};
}

}  // namespace swat
