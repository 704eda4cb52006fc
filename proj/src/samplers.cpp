#include "rejective/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"
#include "rejective/parallel.hpp"

namespace rejective {

std::string_view to_string(SamplerMethod method) noexcept {
  switch (method) {
    case SamplerMethod::Poisson: return "poisson";
    case SamplerMethod::Rejection: return "rejection";
    case SamplerMethod::Sequential: return "sequential";
  }
  return "unknown";
}

SamplerMethod parse_sampler_method(std::string_view name) {
  for (auto m : {SamplerMethod::Poisson, SamplerMethod::Rejection, SamplerMethod::Sequential}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::BadInput, "unknown sampling method: " + std::string(name));
}

Sample sample_poisson(const Design& design, Rng& rng) {
  Sample s;
  s.method = SamplerMethod::Poisson;
  for (UnitIndex i = 0; i < design.population_size(); ++i) {
    if (rng.uniform() < design.p(i)) s.included.push_back(i);
  }
  return s;
}

std::uint64_t default_max_attempts(const Design& design) {
  const double P = pmf(design).at(design.sample_size());
  const double attempts = 1000.0 * std::ceil(1.0 / std::max(P, 1e-6));
  return static_cast<std::uint64_t>(std::min(attempts, 1e8));
}

Sample sample_rejective_rejection(const Design& design, Rng& rng, std::uint64_t max_attempts) {
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Sample s = sample_poisson(design, rng);
    if (s.included.size() == design.sample_size()) {
      s.method = SamplerMethod::Rejection;
      s.attempts = attempt;
      return s;
    }
  }
  throw Error(ErrorCode::MaxAttemptsExceeded,
              "no size-n Poisson sample in " + std::to_string(max_attempts) +
                  " attempts; P(K = n) is too small, use the sequential method");
}

SequentialSampler::SequentialSampler(const Design& design) : oracle_(design) {}

double SequentialSampler::include_probability(std::size_t a, std::size_t r) const {
  const double p = oracle_.random_p_[a];
  const auto& tail = oracle_.suffix_[a + 1];
  const auto rr = static_cast<std::ptrdiff_t>(r);
  const double in = p * tail.at(rr - 1);
  const double out = (1.0 - p) * tail.at(rr);
  const double total = in + out;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::NumericGuard, "sequential step has zero conditional mass");
  }
  const double q = in / total;
  if (q < -1e-12 || q > 1.0 + 1e-12) {
    throw Error(ErrorCode::NumericGuard, "conditional inclusion probability outside [0,1]");
  }
  return std::clamp(q, 0.0, 1.0);
}

Sample SequentialSampler::draw(Rng& rng) const {
  const Design& d = oracle_.design();
  Sample s;
  s.method = SamplerMethod::Sequential;
  std::size_t quota = oracle_.target_;
  for (UnitIndex i = 0; i < d.population_size(); ++i) {
    const std::size_t a = oracle_.position_[i];
    if (a == ExactOracle::kNotRandom) {
      if (d.p(i) == 1.0) s.included.push_back(i);
      continue;
    }
    const double u = rng.uniform();
    if (quota > 0 && u < include_probability(a, quota)) {
      s.included.push_back(i);
      --quota;
    }
  }
  return s;
}

double SequentialSampler::path_probability(std::span<const UnitIndex> sample) const {
  const Design& d = oracle_.design();
  const auto sorted = checked_units(d, sample);
  std::vector<bool> in(d.population_size(), false);
  for (UnitIndex i : sorted) in[i] = true;

  double prob = 1.0;
  std::size_t quota = oracle_.target_;
  for (UnitIndex i = 0; i < d.population_size(); ++i) {
    const std::size_t a = oracle_.position_[i];
    if (a == ExactOracle::kNotRandom) {
      if (in[i] != (d.p(i) == 1.0)) return 0.0;
      continue;
    }
    const double q = quota > 0 ? include_probability(a, quota) : 0.0;
    if (in[i]) {
      prob *= q;
      if (quota == 0) return 0.0;
      --quota;
    } else {
      prob *= 1.0 - q;
    }
    if (prob == 0.0) return 0.0;
  }
  return quota == 0 ? prob : 0.0;
}

Sample sample_rejective_sequential(const Design& design, Rng& rng) {
  return SequentialSampler(design).draw(rng);
}

namespace {

// Per-replication draws for the chosen method, each from its own stream.
template <typename F>
std::vector<double> replicate(const Design& design, std::uint64_t replications,
                              std::uint64_t seed, const MCOptions& options, F&& value) {
  if (replications < 1) throw Error(ErrorCode::BadInput, "replications must be >= 1");
  std::optional<SequentialSampler> sequential;
  if (options.method == SamplerMethod::Sequential) sequential.emplace(design);
  const std::uint64_t max_attempts =
      options.method == SamplerMethod::Rejection ? default_max_attempts(design) : 0;

  std::vector<double> values(replications);
  parallel_for(replications, options.workers, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    Sample s;
    switch (options.method) {
      case SamplerMethod::Poisson: s = sample_poisson(design, rng); break;
      case SamplerMethod::Rejection: s = sample_rejective_rejection(design, rng, max_attempts); break;
      case SamplerMethod::Sequential: s = sequential->draw(rng); break;
    }
    values[r] = value(s);
  });
  return values;
}

MCEstimate summarise(std::string target, const std::vector<double>& values, std::uint64_t seed) {
  MCEstimate est;
  est.target = std::move(target);
  est.replications = values.size();
  est.seed = seed;
  const double R = static_cast<double>(values.size());
  est.estimate = compensated_sum(values) / R;
  if (values.size() > 1) {
    CompensatedSum ss;
    for (double v : values) ss += (v - est.estimate) * (v - est.estimate);
    est.std_error = std::sqrt(ss.value() / (R - 1.0) / R);
  }
  return est;
}

std::string describe_units(std::span<const UnitIndex> units) {
  std::ostringstream out;
  for (std::size_t j = 0; j < units.size(); ++j) out << (j ? "," : "") << units[j] + 1;
  return out.str();
}

}  // namespace

MCEstimate mc_inclusion(const Design& design, std::span<const UnitIndex> units,
                        std::uint64_t replications, std::uint64_t seed, const MCOptions& options) {
  const auto target = checked_units(design, units);
  auto values = replicate(design, replications, seed, options, [&](const Sample& s) {
    return std::includes(s.included.begin(), s.included.end(), target.begin(), target.end())
               ? 1.0
               : 0.0;
  });
  return summarise("pi{" + describe_units(target) + "}", values, seed);
}

MCEstimate mc_central_moment(const Design& design, const CentralMomentQuery& query,
                             std::uint64_t replications, std::uint64_t seed,
                             const MCOptions& options) {
  if (query.units.size() != query.powers.size() || query.units.empty()) {
    throw Error(ErrorCode::BadInput, "units and powers differ in length");
  }
  checked_units(design, query.units);
  const ExactOracle oracle(design);
  std::vector<double> pi;
  for (UnitIndex i : query.units) {
    const UnitIndex one[] = {i};
    pi.push_back(oracle.inclusion(one));
  }
  auto values = replicate(design, replications, seed, options, [&](const Sample& s) {
    double v = 1.0;
    for (std::size_t j = 0; j < query.units.size(); ++j) {
      const double b =
          std::binary_search(s.included.begin(), s.included.end(), query.units[j]) ? 1.0 : 0.0;
      for (int e = 0; e < query.powers[j]; ++e) v *= b - pi[j];
    }
    return v;
  });
  std::ostringstream target;
  target << "moment{" << describe_units(query.units) << "}^(";
  for (std::size_t j = 0; j < query.powers.size(); ++j) target << (j ? "," : "") << query.powers[j];
  target << ")";
  return summarise(target.str(), values, seed);
}

}  // namespace rejective
