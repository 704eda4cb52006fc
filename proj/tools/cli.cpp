#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "rejective/asymptotic.hpp"
#include "rejective/correlation.hpp"
#include "rejective/design.hpp"
#include "rejective/edgeworth.hpp"
#include "rejective/error.hpp"
#include "rejective/exact_oracle.hpp"
#include "rejective/family.hpp"
#include "rejective/kernels.hpp"
#include "rejective/parallel.hpp"
#include "rejective/report_io.hpp"
#include "rejective/rng.hpp"
#include "rejective/samplers.hpp"

namespace cli {

namespace {

using namespace rejective;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string design;
  std::string family;
  std::vector<std::string> units;
  std::size_t order = 2;
  std::string powers;
  std::string formula = "theorem1-pi";
  std::string method = "sequential";
  std::uint64_t seed = 0;
  std::uint64_t reps = 1;
  std::size_t budget = 10000;
  unsigned workers = 1;
  std::string out;
  double gamma = 0.3;
  double delta = 0.5;
  double alpha = 0.4;
  std::string sizes = "1000,10000";
};

unsigned default_workers() {
  const char* env = std::getenv("ENTROPY_SAMPLER_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 4096) {
    throw UsageError("ENTROPY_SAMPLER_WORKERS must be an integer >= 1");
  }
  return static_cast<unsigned>(value);
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const char* what) {
  std::vector<std::int64_t> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError(std::string("bad ") + what + " list: " + text);
    }
  }
  if (values.empty()) throw UsageError(std::string("empty ") + what + " list");
  return values;
}

Method parse_formula(const std::string& name) {
  for (auto m : {Method::Theorem1P, Method::Theorem1Pi, Method::Hajek2}) {
    if (name == to_string(m)) return m;
  }
  throw UsageError("unknown formula '" + name + "' (expected theorem1-p, theorem1-pi or hajek2)");
}

Design load_design(const Config& cfg) {
  if (cfg.design.empty()) throw UsageError("--design is required");
  return read_design_file(cfg.design);
}

std::vector<Design> load_family(const Config& cfg, std::string& description) {
  if (cfg.family.empty()) throw UsageError("--family is required");
  const auto spec = read_family_file(cfg.family);
  description = describe(spec);
  return build_family(spec);
}

std::vector<std::vector<UnitIndex>> unit_sets(const Config& cfg) {
  if (cfg.units.empty()) throw UsageError("--units is required");
  std::vector<std::vector<UnitIndex>> sets;
  for (const auto& text : cfg.units) sets.push_back(parse_units(text));
  return sets;
}

void emit(const Config& cfg, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (cfg.out.empty()) {
    write(out);
    out.flush();
    if (!out) throw IoError("failed writing standard output");
  } else {
    write_file(cfg.out, write);
  }
}

int cmd_exact_pi(const Config& cfg, std::ostream& out) {
  const Design design = load_design(cfg);
  const ExactOracle oracle(design);
  const double d = poisson_variance(design);
  std::vector<InclusionResult> rows;
  for (const auto& units : unit_sets(cfg)) {
    auto sorted = checked_units(design, units);
    if (sorted.empty()) throw UsageError("empty unit set");
    rows.push_back(InclusionResult{std::move(sorted), 0.0, Method::ExactDp, d});
    rows.back().value = oracle.inclusion(rows.back().units);
  }
  emit(cfg, out, [&](std::ostream& o) { write_inclusion_csv(o, rows); });
  return kExitOk;
}

int cmd_approx_pi(const Config& cfg, std::ostream& out) {
  const Design design = load_design(cfg);
  const ExactOracle oracle(design);
  const Method formula = parse_formula(cfg.formula);
  std::vector<ApproxReport> rows;
  for (const auto& units : unit_sets(cfg)) {
    if (formula == Method::Theorem1P) {
      rows.push_back(theorem1_p(oracle, units));
    } else {
      if (formula == Method::Hajek2 && units.size() != 2) {
        throw UsageError("hajek2 takes exactly 2 units");
      }
      rows.push_back(theorem1_pi_report(oracle, units));
      rows.back().formula = formula;
    }
  }
  emit(cfg, out, [&](std::ostream& o) { write_approx_csv(o, rows); });
  return kExitOk;
}

int cmd_edgeworth_pmf(const Config& cfg, std::ostream& out) {
  const Design design = load_design(cfg);
  const auto law = pmf(design);
  const EdgeworthApproximation approx(design, kMaxEdgeworthOrder);
  const double centre = static_cast<double>(design.sample_size());
  const double half = std::ceil(4.0 * std::sqrt(approx.variance()));
  const auto lo = static_cast<std::int64_t>(std::max(0.0, centre - half));
  const auto hi = static_cast<std::int64_t>(
      std::min(static_cast<double>(design.population_size()), centre + half));
  std::vector<EdgeworthRow> rows;
  for (std::int64_t l = lo; l <= hi; ++l) {
    rows.push_back(EdgeworthRow{l, law.at(static_cast<std::size_t>(l)), approx.density(l, 0),
                                approx.density(l, 2), approx.density(l, 4)});
  }
  emit(cfg, out, [&](std::ostream& o) { write_edgeworth_csv(o, rows); });
  return kExitOk;
}

int cmd_sample(const Config& cfg, std::ostream& out) {
  const Design design = load_design(cfg);
  SamplerMethod method;
  try {
    method = parse_sampler_method(cfg.method);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::optional<SequentialSampler> sequential;
  if (method == SamplerMethod::Sequential) sequential.emplace(design);
  const std::uint64_t max_attempts =
      method == SamplerMethod::Rejection ? default_max_attempts(design) : 0;

  std::vector<Sample> samples(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t r) {
    Rng rng = Rng::stream(cfg.seed, r);
    switch (method) {
      case SamplerMethod::Poisson: samples[r] = sample_poisson(design, rng); break;
      case SamplerMethod::Rejection:
        samples[r] = sample_rejective_rejection(design, rng, max_attempts);
        break;
      case SamplerMethod::Sequential: samples[r] = sequential->draw(rng); break;
    }
  });
  emit(cfg, out, [&](std::ostream& o) { write_samples(o, samples); });
  return kExitOk;
}

int cmd_study(const Config& cfg, std::ostream& out, const CLI::App& sub) {
  std::string description;
  const auto family = load_family(cfg, description);
  const StudyOptions options{cfg.budget, cfg.seed, cfg.workers};
  ScalingStudy study;
  if (!cfg.powers.empty()) {
    std::vector<int> powers;
    for (auto v : parse_int_list(cfg.powers, "powers")) {
      if (v < 1 || v > 64) throw UsageError("powers must lie in 1..64");
      powers.push_back(static_cast<int>(v));
    }
    if (sub.count("--order") > 0 && cfg.order != powers.size()) {
      throw UsageError("--order does not match the number of --powers");
    }
    study = proposition1_study(family, description, powers, options);
  } else {
    if (cfg.order < 2) throw UsageError("--order must be >= 2");
    study = error_scaling_study(family, description, cfg.order, parse_formula(cfg.formula), options);
  }
  emit(cfg, out, [&](std::ostream& o) { write_study_csv(o, study); });
  return kExitOk;
}

int cmd_check_conditions(const Config& cfg, std::ostream& out) {
  ConditionOptions options;
  options.tuple_budget = cfg.budget;
  options.seed = cfg.seed;
  options.workers = cfg.workers;
  ConditionReport report;
  if (!cfg.family.empty()) {
    std::string description;
    const auto family = load_family(cfg, description);
    report = check_conditions(family, description, options);
  } else if (!cfg.design.empty()) {
    report.family = cfg.design;
    report.rows.push_back(check_conditions(load_design(cfg), options));
  } else {
    throw UsageError("--design or --family is required");
  }
  emit(cfg, out, [&](std::ostream& o) { write_condition_csv(o, report); });
  return kExitOk;
}

int cmd_arratia(const Config& cfg, std::ostream& out) {
  std::vector<ArratiaRow> rows;
  for (auto N : parse_int_list(cfg.sizes, "sizes")) {
    if (N < 2) throw UsageError("sizes must be >= 2");
    const auto ex = arratia_example(cfg.gamma, cfg.delta, cfg.alpha, static_cast<std::size_t>(N));
    const auto block = arratia_rows(ex);
    rows.insert(rows.end(), block.begin(), block.end());
  }
  emit(cfg, out, [&](std::ostream& o) { write_arratia_csv(o, rows); });
  return kExitOk;
}

// Built-in invariant checks on tiny designs.
int cmd_selftest(const Config& cfg, std::ostream& out) {
  struct Check {
    std::string name;
    bool ok;
  };
  std::vector<Check> checks;
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };

  {
    const Design srs = validate_design({0.5, 0.5, 0.5, 0.5}, 2);
    const UnitIndex pair[] = {0, 1};
    checks.push_back({"srswor-pair", near(ExactOracle(srs).inclusion(pair), 1.0 / 6.0, 1e-15)});
  }
  {
    const Design d = validate_design({0.2, 0.4, 0.6, 0.8}, 2);
    const UnitIndex first[] = {0};
    checks.push_back({"bayes-first-order",
                      near(ExactOracle(d).inclusion(first), 0.2 * 0.296 / 0.4304, 1e-14)});
  }

  bool oracle_ok = true, lemma_ok = true, path_ok = true, total_ok = true;
  Rng rng(cfg.seed);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t N = 4 + rng.below(7);
    const std::size_t n = 1 + rng.below(N - 1);
    std::vector<double> p(N);
    for (auto& v : p) v = 0.05 + 0.9 * rng.uniform();
    for (int it = 0; it < 200; ++it) {
      double s = 0.0;
      for (double v : p) s += v;
      for (auto& v : p) v = std::clamp(v * static_cast<double>(n) / s, 1e-3, 1.0 - 1e-3);
    }
    double s = 0.0;
    for (double v : p) s += v;
    p.back() += static_cast<double>(n) - s;
    if (!(p.back() > 0.0 && p.back() < 1.0)) continue;
    const Design design = validate_design(p, static_cast<std::int64_t>(n));
    const ExactOracle oracle(design);
    const auto en = enumerate_rejective(design);
    const SequentialSampler seq(design);

    double total = 0.0;
    for (UnitIndex i = 0; i < N; ++i) {
      const UnitIndex one[] = {i};
      total += oracle.inclusion(one);
    }
    total_ok = total_ok && near(total, static_cast<double>(n), 1e-9);

    for (std::size_t t = 0; t < 5; ++t) {
      std::vector<UnitIndex> units(N);
      for (UnitIndex i = 0; i < N; ++i) units[i] = i;
      std::shuffle(units.begin(), units.end(), rng);
      units.resize(std::min<std::size_t>(2 + t % 3, N));
      oracle_ok = oracle_ok && near(oracle.inclusion(units), en.inclusion(units), 1e-10);
      const auto table = inclusion_table(oracle, units, units.size());
      const std::vector<int> ones(units.size(), 1);
      lemma_ok = lemma_ok && near(lemma4_decompose(table, units),
                                  central_moment_exact(oracle, {units, ones}), 1e-12);
    }
    for (std::size_t s_idx = 0; s_idx < en.samples.size(); ++s_idx) {
      std::vector<UnitIndex> sample;
      for (UnitIndex i = 0; i < N; ++i) {
        if ((en.samples[s_idx] >> i) & 1U) sample.push_back(i);
      }
      path_ok = path_ok && near(seq.path_probability(sample), en.probs[s_idx], 1e-12);
    }
  }
  checks.push_back({"oracle-vs-enumeration", oracle_ok});
  checks.push_back({"lemma4-identity", lemma_ok});
  checks.push_back({"sequential-paths", path_ok});
  checks.push_back({"first-order-total", total_ok});

  {
    std::vector<double> src(37), dst_a(38), dst_b(38), y(37);
    for (auto& v : src) v = rng.uniform();
    for (auto& v : y) v = rng.uniform();
    const auto& scalar = kernels::scalar_kernels();
    const auto& active = kernels::active_kernels();
    kernels::bernoulli_step(src, 0.37, 0, dst_a, scalar);
    kernels::bernoulli_step(src, 0.37, 0, dst_b, active);
    const bool same = dst_a == dst_b && kernels::dot_reversed(src, y, scalar) ==
                                            kernels::dot_reversed(src, y, active);
    checks.push_back({std::string("kernels-") + std::string(kernels::to_string(active.isa)), same});
  }

  bool all = true;
  emit(cfg, out, [&](std::ostream& o) {
    for (const auto& c : checks) {
      o << (c.ok ? "PASS " : "FAIL ") << c.name << '\n';
      all = all && c.ok;
    }
  });
  return all ? kExitOk : kExitFailure;
}

void add_common(CLI::App* sub, Config& cfg) {
  sub->add_option("--seed", cfg.seed, "RNG seed (default 0)");
  sub->add_option("--workers", cfg.workers, "worker threads (default $ENTROPY_SAMPLER_WORKERS or 1)")
      ->check(CLI::Range(1u, 4096u));
  sub->add_option("--out", cfg.out, "output file (default standard output)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Rejective sampling: exact and approximate inclusion probabilities", "entropy-sampler"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  auto* exact = app.add_subcommand("exact-pi", "exact joint inclusion probabilities");
  exact->add_option("--design", cfg.design, "design JSON file")->required();
  exact->add_option("--units", cfg.units, "1-based units, e.g. 1,2 (repeatable)")->required();
  add_common(exact, cfg);

  auto* approx = app.add_subcommand("approx-pi", "asymptotic approximations next to the exact value");
  approx->add_option("--design", cfg.design, "design JSON file")->required();
  approx->add_option("--units", cfg.units, "1-based units (repeatable)")->required();
  approx->add_option("--formula", cfg.formula, "theorem1-p, theorem1-pi or hajek2");
  add_common(approx, cfg);

  auto* edge = app.add_subcommand("edgeworth-pmf", "P(K = l) against its Edgeworth expansions");
  edge->add_option("--design", cfg.design, "design JSON file")->required();
  add_common(edge, cfg);

  auto* sample = app.add_subcommand("sample", "draw samples, one per line");
  sample->add_option("--design", cfg.design, "design JSON file")->required();
  sample->add_option("--method", cfg.method, "sequential, rejection or poisson");
  sample->add_option("--reps", cfg.reps, "number of samples")->check(CLI::Range(1ull, 100000000ull));
  add_common(sample, cfg);

  auto* study = app.add_subcommand("study", "error or moment scaling over a design family");
  study->add_option("--family", cfg.family, "family JSON file")->required();
  study->add_option("--order", cfg.order, "tuple order k (default 2)");
  study->add_option("--formula", cfg.formula, "theorem1-p, theorem1-pi or hajek2");
  study->add_option("--powers", cfg.powers, "central-moment powers a,b,c (moment study)");
  study->add_option("--budget", cfg.budget, "sampled tuples when not exhaustive");
  add_common(study, cfg);

  auto* check = app.add_subcommand("check-conditions", "correlation condition quantities");
  check->add_option("--design", cfg.design, "design JSON file");
  check->add_option("--family", cfg.family, "family JSON file");
  check->add_option("--budget", cfg.budget, "sampled tuples when not exhaustive");
  add_common(check, cfg);

  auto* arratia = app.add_subcommand("arratia", "two-block example against the window condition");
  arratia->add_option("--gamma", cfg.gamma, "gamma (default 0.3)");
  arratia->add_option("--delta", cfg.delta, "delta (default 0.5)");
  arratia->add_option("--alpha", cfg.alpha, "alpha (default 0.4)");
  arratia->add_option("--sizes", cfg.sizes, "population sizes (default 1000,10000)");
  add_common(arratia, cfg);

  auto* selftest = app.add_subcommand("selftest", "invariant checks on built-in tiny designs");
  add_common(selftest, cfg);

  try {
    cfg.workers = default_workers();
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (exact->parsed()) return cmd_exact_pi(cfg, out);
    if (approx->parsed()) return cmd_approx_pi(cfg, out);
    if (edge->parsed()) return cmd_edgeworth_pmf(cfg, out);
    if (sample->parsed()) return cmd_sample(cfg, out);
    if (study->parsed()) return cmd_study(cfg, out, *study);
    if (check->parsed()) return cmd_check_conditions(cfg, out);
    if (arratia->parsed()) return cmd_arratia(cfg, out);
    if (selftest->parsed()) return cmd_selftest(cfg, out);
  } catch (const IoError& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "entropy-sampler: invalid JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "entropy-sampler: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("entropy-sampler");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cli
