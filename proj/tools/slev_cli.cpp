// slev: leverage-score estimation, KRR / Nystrom fitting and benchmarking
// for stationary kernels, with reproducible file outputs.
//
// Exit codes: 0 success, 2 configuration error, 3 capacity error,
// 4 numeric failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slev/slev.hpp"

namespace {

constexpr const char* kVersion = "slev 0.1.0";

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Minimal JSON emitter with fixed 17-significant-digit numbers, so
// identical configs and seeds produce byte-identical files.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(const std::string& name) {
    comma();
    emit_string(name);
    out_ << ':';
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    comma();
    if (!std::isfinite(v)) throw slev::Error("refusing to serialize a non-finite number");
    out_ << slev::fmt17(v);
    return *this;
  }
  JsonWriter& value(std::int64_t v) {
    comma();
    out_ << v;
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(std::uint64_t v) {
    comma();
    out_ << v;
    return *this;
  }
  JsonWriter& value(bool v) {
    comma();
    out_ << (v ? "true" : "false");
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    comma();
    emit_string(v);
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }

  template <class T>
  JsonWriter& array(const std::vector<T>& values) {
    begin_array();
    for (const T& v : values) value(v);
    return end_array();
  }

  std::string str() const { return out_.str(); }

 private:
  JsonWriter& open(char c) {
    comma();
    out_ << c;
    empty_stack_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    out_ << c;
    empty_stack_.pop_back();
    return *this;
  }
  void comma() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!empty_stack_.empty()) {
      if (!empty_stack_.back()) out_ << ',';
      empty_stack_.back() = false;
    }
  }
  void emit_string(const std::string& s) {
    out_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\r': out_ << "\\r"; break;
        case '\t': out_ << "\\t"; break;
        default: out_ << c;
      }
    }
    out_ << '"';
  }

  std::ostringstream out_;
  std::vector<bool> empty_stack_;
  bool pending_value_ = false;
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw slev::ConfigError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw slev::ConfigError("failed while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Option bundles

// A (c, e) pair evaluated at the runtime sample size as c * n^(-e).
struct Schedule {
  std::vector<double> ce;
  bool given() const { return ce.size() == 2; }
  double at(Eigen::Index n) const { return ce[0] * std::pow(double(n), -ce[1]); }
};

struct KernelOpts {
  std::string family = "matern";
  double nu = 1.5;
  double sigma = 1.0;
  std::string convention = "simplified";

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", family, "Kernel family: matern or gaussian")
        ->check(CLI::IsMember({"matern", "gaussian"}))
        ->capture_default_str();
    cmd->add_option("--nu", nu, "Matern smoothness (0.5, 1.5 or 2.5)")->capture_default_str();
    cmd->add_option("--sigma", sigma, "Gaussian bandwidth")->capture_default_str();
    cmd->add_option("--convention", convention, "Spectral convention: simplified or full")
        ->check(CLI::IsMember({"simplified", "full"}))
        ->capture_default_str();
  }

  slev::KernelSpec spec(int dim) const {
    const auto conv = convention == "full" ? slev::SpectralConvention::FullConstants
                                           : slev::SpectralConvention::Simplified;
    return family == "gaussian" ? slev::KernelSpec::gaussian(sigma, dim, conv)
                                : slev::KernelSpec::matern(nu, dim, conv);
  }

  void echo(JsonWriter& j) const {
    j.key("kernel").value(family);
    if (family == "matern")
      j.key("nu").value(nu);
    else
      j.key("sigma").value(sigma);
    j.key("convention").value(convention);
  }
};

struct LambdaOpts {
  double fixed = 0.0;
  Schedule schedule;

  void attach(CLI::App* cmd) {
    auto* fix = cmd->add_option("--lambda", fixed, "Regularization parameter");
    auto* sch = cmd->add_option("--lambda-schedule", schedule.ce,
                                "Schedule c e: lambda = c * n^-e")
                    ->expected(2);
    fix->excludes(sch);
    sch->excludes(fix);
  }

  double at(Eigen::Index n) const {
    if (schedule.given()) return schedule.at(n);
    if (fixed > 0.0) return fixed;
    throw slev::ConfigError("exactly one of --lambda or --lambda-schedule is required");
  }

  void echo(JsonWriter& j, Eigen::Index n) const {
    j.key("lambda").value(at(n));
    if (schedule.given()) {
      j.key("lambda_schedule").begin_array().value(schedule.ce[0]).value(schedule.ce[1]).end_array();
    }
  }
};

struct KdeOpts {
  double bandwidth = 0.0;
  Schedule bandwidth_schedule;
  double floor_value = 0.0;
  Schedule floor_schedule;
  int subsample = 0;
  std::uint64_t subsample_seed = 0;
  std::string density_source = "kde";

  void attach(CLI::App* cmd) {
    auto* bw = cmd->add_option("--kde-bandwidth", bandwidth, "KDE bandwidth");
    auto* bws = cmd->add_option("--kde-bandwidth-schedule", bandwidth_schedule.ce,
                                "Schedule c e: bandwidth = c * n^-e")
                    ->expected(2);
    bw->excludes(bws);
    bws->excludes(bw);
    auto* fl = cmd->add_option("--kde-floor", floor_value, "Density floor threshold (0 = off)");
    auto* fls = cmd->add_option("--kde-floor-schedule", floor_schedule.ce,
                                "Schedule c e: floor = c * n^-e")
                     ->expected(2);
    fl->excludes(fls);
    fls->excludes(fl);
    cmd->add_option("--kde-subsample", subsample,
                    "Reference subsample size for the KDE (0 = all points)");
    cmd->add_option("--kde-seed", subsample_seed, "Seed for the KDE reference subsample");
    cmd->add_option("--density-source", density_source,
                    "Densities from 'kde' or the dataset's 'true' column")
        ->check(CLI::IsMember({"kde", "true"}))
        ->capture_default_str();
  }

  double bandwidth_at(Eigen::Index n) const {
    if (bandwidth_schedule.given()) return bandwidth_schedule.at(n);
    if (bandwidth > 0.0) return bandwidth;
    throw slev::ConfigError("KDE requested but no --kde-bandwidth or schedule given");
  }

  double floor_at(Eigen::Index n) const {
    if (floor_schedule.given()) return floor_schedule.at(n);
    return floor_value;
  }

  // Returns densities and fills kde_ms / used_bandwidth when the KDE ran.
  std::vector<double> densities(const slev::DesignSet& X, double* kde_ms,
                                double* used_bandwidth) const {
    const Eigen::Index n = X.size();
    if (density_source == "true") {
      if (!X.has_densities())
        throw slev::ConfigError("--density-source true requires a 'density' column");
      std::vector<double> p(X.densities.data(), X.densities.data() + n);
      const double floor = floor_at(n);
      if (floor > 0.0)
        for (double& v : p) v = slev::floor_adjust(v, floor);
      return p;
    }
    slev::KdeConfig cfg;
    cfg.bandwidth = bandwidth_at(n);
    cfg.floor_threshold = floor_at(n);
    cfg.reference_subsample = subsample;
    cfg.subsample_seed = subsample_seed;
    const auto start = Clock::now();
    auto p = slev::kde_at_samples(X, cfg);
    if (kde_ms) *kde_ms = elapsed_ms(start);
    if (used_bandwidth) *used_bandwidth = cfg.bandwidth;
    return p;
  }
};

struct GenOpts {
  std::string kind = "uniform";
  int n = 1000;
  int dim = 1;
  double gamma = 0.6;
  std::uint64_t seed = 0;
  double noise_sigma = 0.5;

  // On subcommands that have their own --seed the generator options carry a
  // gen- prefix.
  void attach(CLI::App* cmd, bool with_n, bool prefixed = false) {
    const std::string p = prefixed ? "--gen-" : "--";
    cmd->add_option(p + "kind", kind, "Generator: uniform, beta, bimodal1d, bimodal3d")
        ->check(CLI::IsMember({"uniform", "beta", "bimodal1d", "bimodal3d"}))
        ->capture_default_str();
    if (with_n) cmd->add_option("--n", n, "Sample size")->required();
    cmd->add_option(p + "dim", dim, "Dimension (uniform generator only)")->capture_default_str();
    cmd->add_option(p + "gamma", gamma, "Bimodal mixing exponent in (0,1)")
        ->capture_default_str();
    cmd->add_option(p + "seed", seed, "Generator seed")->capture_default_str();
    cmd->add_option(p + "noise-sigma", noise_sigma, "Response noise standard deviation")
        ->capture_default_str();
  }

  slev::GeneratorKind generator_kind() const {
    if (kind == "uniform") return slev::GeneratorKind::Uniform01d;
    if (kind == "beta") return slev::GeneratorKind::Beta15_2;
    if (kind == "bimodal1d") return slev::GeneratorKind::Bimodal1d;
    return slev::GeneratorKind::Bimodal3d;
  }

  slev::DesignSet make(int n_override, std::uint64_t seed_override) const {
    slev::GeneratorSpec g;
    g.kind = generator_kind();
    g.n = n_override;
    g.dim = dim;
    g.gamma = gamma;
    g.seed = seed_override;
    auto X = slev::generate(g);
    X.true_values = slev::target_f_star_all(X.points);
    X.responses = slev::add_noise(X.true_values, noise_sigma, seed_override + 0x9e3779b97f4a7c15ULL);
    return X;
  }
};

int threads_flag = 0;

void attach_threads(CLI::App* cmd) {
  cmd->add_option("--threads", threads_flag, "Cap on worker threads (0 = hardware)");
}

void apply_threads() { slev::set_thread_cap(threads_flag); }

slev::SamplingDistribution uniform_distribution(Eigen::Index n) {
  slev::SamplingDistribution q;
  q.q.assign(static_cast<std::size_t>(n), 1.0 / double(n));
  return q;
}

// ---------------------------------------------------------------------------
// Subcommand state

struct GenCmd {
  GenOpts gen;
  std::string output;
};

struct LeverageCmd {
  std::string input, output;
  std::string method = "sa";
  std::string path = "closed";
  bool proportional_only = false;
  KernelOpts kernel;
  LambdaOpts lambda;
  KdeOpts kde;
};

struct ExactLeverageCmd {
  std::string input, output;
  KernelOpts kernel;
  LambdaOpts lambda;
  Eigen::Index exact_cap = slev::kDefaultDenseCap;
};

struct KrrCmd {
  std::string input, output;
  std::string method = "exact";
  KernelOpts kernel;
  LambdaOpts lambda;
  KdeOpts kde;
  int d_sub = 0;
  Schedule d_sub_schedule;
  std::uint64_t seed = 0;
  Eigen::Index exact_cap = slev::kDefaultDenseCap;

  int d_sub_at(Eigen::Index n) const {
    if (d_sub_schedule.given())
      return static_cast<int>(std::ceil(d_sub_schedule.at(n)));
    if (d_sub > 0) return d_sub;
    throw slev::ConfigError("--d-sub or --d-sub-schedule is required for Nystrom fits");
  }
};

struct BenchCmd {
  std::string input, output;
  GenOpts gen;
  std::vector<int> n_grid;
  std::vector<std::string> methods{"sa", "uniform", "exact"};
  std::string path = "closed";
  bool proportional_only = false;
  KernelOpts kernel;
  LambdaOpts lambda;
  KdeOpts kde;
  int d_sub = 0;
  Schedule d_sub_schedule;
  std::uint64_t seed = 0;
  Eigen::Index exact_cap = slev::kDefaultDenseCap;
  int reps = 3;

  int d_sub_at(Eigen::Index n) const {
    if (d_sub_schedule.given()) return static_cast<int>(std::ceil(d_sub_schedule.at(n)));
    if (d_sub > 0) return d_sub;
    throw slev::ConfigError("--d-sub or --d-sub-schedule is required for Nystrom fits");
  }
};

struct EkCurveCmd {
  std::string input, output;
  GenOpts gen;
  bool use_generator = false;
  int n = 200;
  double t = 0.5;
  std::vector<double> grid;  // lo hi count
  KernelOpts kernel;
  LambdaOpts lambda;
  KdeOpts kde;
  Eigen::Index exact_cap = slev::kDefaultDenseCap;
};

// ---------------------------------------------------------------------------
// Command implementations

int run_gen(const GenCmd& c) {
  auto X = c.gen.make(c.gen.n, c.gen.seed);
  slev::write_design_csv(c.output, X);
  std::cout << "wrote " << X.size() << " points (d=" << X.dim() << ") to " << c.output << "\n";
  return 0;
}

int run_leverage(const LeverageCmd& c) {
  apply_threads();
  const auto X = slev::read_design_csv(c.input);
  const Eigen::Index n = X.size();
  const auto spec = c.kernel.spec(X.dim());
  const double lambda = c.lambda.at(n);

  double kde_ms = 0.0, used_bw = 0.0;
  slev::LeverageVector lev;
  double integration_ms = 0.0;
  if (c.method == "uniform") {
    lev = slev::uniform_leverages(static_cast<std::size_t>(n));
  } else {
    const auto p = c.kde.densities(X, &kde_ms, &used_bw);
    const auto path = c.path == "quadrature" ? slev::LeveragePath::Quadrature
                                             : slev::LeveragePath::ClosedForm;
    const auto start = Clock::now();
    lev = slev::approximate_leverages(p, spec, lambda, path, c.proportional_only);
    integration_ms = elapsed_ms(start);
  }
  const auto q = slev::to_sampling_distribution(lev);

  JsonWriter j;
  j.begin_object();
  j.key("meta").begin_object();
  j.key("command").value("leverage");
  j.key("version").value(kVersion);
  j.key("input").value(c.input);
  j.key("method").value(c.method == "uniform" ? "uniform" : "sa");
  j.key("path").value(c.path);
  c.kernel.echo(j);
  c.lambda.echo(j, n);
  if (c.method != "uniform") {
    j.key("density_source").value(c.kde.density_source);
    if (c.kde.density_source == "kde") j.key("kde_bandwidth").value(used_bw);
  }
  j.key("timing_ms")
      .begin_object()
      .key("kde")
      .value(kde_ms)
      .key("integration")
      .value(integration_ms)
      .end_object();
  j.end_object();
  j.key("results").begin_object();
  j.key("n").value(static_cast<std::int64_t>(n));
  j.key("leverage_method").value(slev::to_string(lev.method));
  j.key("values").array(lev.values);
  j.key("q").array(q.q);
  j.end_object();
  j.end_object();
  write_text_file(c.output, j.str() + "\n");
  std::cout << "leverage (" << slev::to_string(lev.method) << ") for n=" << n << " -> " << c.output
            << "\n";
  return 0;
}

int run_exact_leverage(const ExactLeverageCmd& c) {
  apply_threads();
  const auto X = slev::read_design_csv(c.input);
  const Eigen::Index n = X.size();
  if (n > c.exact_cap)
    throw slev::CapacityError("exact leverage oracle refuses n = " + std::to_string(n) +
                              " above the dense cap " + std::to_string(c.exact_cap) +
                              "; use 'leverage' (analytic path) instead");
  const auto spec = c.kernel.spec(X.dim());
  const double lambda = c.lambda.at(n);

  const auto start = Clock::now();
  const auto K = slev::kernel_matrix(spec, X, c.exact_cap);
  const auto lev = slev::exact_rescaled_leverage(K, lambda);
  const double total_ms = elapsed_ms(start);
  const double dstat = slev::statistical_dimension(K, lambda);
  const auto q = slev::to_sampling_distribution(lev);

  JsonWriter j;
  j.begin_object();
  j.key("meta").begin_object();
  j.key("command").value("exact-leverage");
  j.key("version").value(kVersion);
  j.key("input").value(c.input);
  c.kernel.echo(j);
  c.lambda.echo(j, n);
  j.key("timing_ms").begin_object().key("total").value(total_ms).end_object();
  j.end_object();
  j.key("results").begin_object();
  j.key("n").value(static_cast<std::int64_t>(n));
  j.key("leverage_method").value(slev::to_string(lev.method));
  j.key("statistical_dimension").value(dstat);
  j.key("values").array(lev.values);
  j.key("q").array(q.q);
  j.end_object();
  j.end_object();
  write_text_file(c.output, j.str() + "\n");
  std::cout << "exact leverage for n=" << n << " -> " << c.output << "\n";
  return 0;
}

int run_krr(const KrrCmd& c) {
  apply_threads();
  const auto X = slev::read_design_csv(c.input);
  const Eigen::Index n = X.size();
  if (!X.has_responses()) throw slev::ConfigError("krr requires a 'y' column");
  const auto spec = c.kernel.spec(X.dim());
  const double lambda = c.lambda.at(n);

  double leverage_ms = 0.0, fit_ms = 0.0;
  int d_sub_used = 0;
  Eigen::VectorXd predictions;
  if (c.method == "exact") {
    const auto start = Clock::now();
    const auto model = slev::krr_fit(X, spec, lambda, c.exact_cap);
    predictions = slev::krr_predict_all(model, X.points);
    fit_ms = elapsed_ms(start);
  } else {
    slev::SamplingDistribution q;
    if (c.method == "uniform") {
      q = uniform_distribution(n);
    } else {
      const auto t0 = Clock::now();
      const auto p = c.kde.densities(X, nullptr, nullptr);
      const auto lev =
          slev::approximate_leverages(p, spec, lambda, slev::LeveragePath::ClosedForm);
      q = slev::to_sampling_distribution(lev);
      leverage_ms = elapsed_ms(t0);
    }
    d_sub_used = c.d_sub_at(n);
    const auto t1 = Clock::now();
    const auto landmarks = slev::nystrom_sample(q, d_sub_used, c.seed);
    const auto model = slev::nystrom_fit(X, spec, lambda, landmarks);
    predictions = slev::nystrom_predict_all(model, X.points);
    fit_ms = elapsed_ms(t1);
  }

  JsonWriter j;
  j.begin_object();
  j.key("meta").begin_object();
  j.key("command").value("krr");
  j.key("version").value(kVersion);
  j.key("input").value(c.input);
  j.key("method").value(c.method);
  c.kernel.echo(j);
  c.lambda.echo(j, n);
  j.key("seed").value(c.seed);
  j.key("timing_ms")
      .begin_object()
      .key("leverage")
      .value(leverage_ms)
      .key("fit")
      .value(fit_ms)
      .end_object();
  j.end_object();
  j.key("results").begin_object();
  j.key("n").value(static_cast<std::int64_t>(n));
  if (c.method != "exact") j.key("d_sub").value(d_sub_used);
  if (X.has_true_values())
    j.key("in_sample_risk").value(slev::in_sample_risk(predictions, X.true_values));
  j.end_object();
  j.end_object();
  write_text_file(c.output, j.str() + "\n");
  std::cout << "krr (" << c.method << ") for n=" << n << " -> " << c.output << "\n";
  return 0;
}

int run_bench(const BenchCmd& c) {
  apply_threads();
  const bool from_file = !c.input.empty();
  std::vector<int> grid = c.n_grid;
  std::optional<slev::DesignSet> loaded;
  if (from_file) {
    loaded = slev::read_design_csv(c.input);
    grid = {static_cast<int>(loaded->size())};
  } else if (grid.empty()) {
    throw slev::ConfigError("bench requires --n-grid (or --input)");
  }

  std::ostringstream csv;
  csv << "n,method,leverage_time_ms,fit_time_ms,risk,r_acc_mean,r_acc_q05,r_acc_q95\n";

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const int n_req = grid[gi];
    const slev::DesignSet X =
        from_file ? *loaded : c.gen.make(n_req, c.gen.seed + gi);
    const Eigen::Index n = X.size();
    const auto spec = c.kernel.spec(X.dim());
    const double lambda = c.lambda.at(n);
    if (!X.has_responses()) throw slev::ConfigError("bench requires responses (y column)");

    // Exact oracle once per n, reused for every method's R-ACC column.
    std::optional<slev::SamplingDistribution> q_exact;
    double exact_leverage_ms = 0.0;
    if (n <= c.exact_cap) {
      const auto t0 = Clock::now();
      const auto K = slev::kernel_matrix(spec, X, c.exact_cap);
      q_exact = slev::to_sampling_distribution(slev::exact_rescaled_leverage(K, lambda));
      exact_leverage_ms = elapsed_ms(t0);
    }

    for (const std::string& method : c.methods) {
      double leverage_ms = 0.0;
      double fit_ms = 0.0;
      double risk = std::numeric_limits<double>::quiet_NaN();
      std::optional<slev::RaccSummary> racc;
      slev::SamplingDistribution q;

      if (method == "sa") {
        const auto path = c.path == "quadrature" ? slev::LeveragePath::Quadrature
                                                 : slev::LeveragePath::ClosedForm;
        double kde_ms = 0.0;
        const auto p = c.kde.densities(X, &kde_ms, nullptr);
        std::vector<double> times;
        slev::LeverageVector lev;
        for (int rep = 0; rep < std::max(1, c.reps); ++rep) {
          const auto t0 = Clock::now();
          lev = slev::approximate_leverages(p, spec, lambda, path, c.proportional_only);
          times.push_back(elapsed_ms(t0));
        }
        std::sort(times.begin(), times.end());
        leverage_ms = times[times.size() / 2];
        q = slev::to_sampling_distribution(lev);
      } else if (method == "uniform") {
        q = uniform_distribution(n);
        leverage_ms = 0.0;
      } else if (method == "exact") {
        if (!q_exact)
          throw slev::CapacityError("bench method 'exact' needs n <= " +
                                    std::to_string(c.exact_cap));
        q = *q_exact;
        leverage_ms = exact_leverage_ms;
      } else {
        throw slev::ConfigError("unknown bench method '" + method + "'");
      }

      if (method == "exact") {
        const auto t0 = Clock::now();
        const auto model = slev::krr_fit(X, spec, lambda, c.exact_cap);
        const auto pred = slev::krr_predict_all(model, X.points);
        fit_ms = elapsed_ms(t0);
        if (X.has_true_values()) risk = slev::in_sample_risk(pred, X.true_values);
      } else {
        const int d_sub = c.d_sub_at(n);
        const auto t0 = Clock::now();
        const auto landmarks = slev::nystrom_sample(q, d_sub, c.seed + gi);
        const auto model = slev::nystrom_fit(X, spec, lambda, landmarks);
        const auto pred = slev::nystrom_predict_all(model, X.points);
        fit_ms = elapsed_ms(t0);
        if (X.has_true_values()) risk = slev::in_sample_risk(pred, X.true_values);
      }
      if (q_exact) racc = slev::r_acc(q, *q_exact);

      csv << n << ',' << method << ',' << slev::fmt17(leverage_ms) << ','
          << slev::fmt17(fit_ms) << ',';
      if (std::isfinite(risk)) csv << slev::fmt17(risk);
      csv << ',';
      if (racc) csv << slev::fmt17(racc->mean);
      csv << ',';
      if (racc) csv << slev::fmt17(racc->q05);
      csv << ',';
      if (racc) csv << slev::fmt17(racc->q95);
      csv << '\n';
    }
  }
  write_text_file(c.output, csv.str());
  std::cout << "bench grid of " << grid.size() << " sizes -> " << c.output << "\n";
  return 0;
}

int run_ek_curve(const EkCurveCmd& c) {
  apply_threads();
  slev::DesignSet X;
  if (!c.input.empty()) {
    X = slev::read_design_csv(c.input);
  } else {
    X = c.gen.make(c.n, c.gen.seed);
  }
  if (X.dim() != 1) throw slev::ConfigError("ek-curve requires one-dimensional data");
  const Eigen::Index n = X.size();
  const auto spec = c.kernel.spec(1);
  const double lambda = c.lambda.at(n);
  if (c.grid.size() != 3) throw slev::ConfigError("--grid expects: lo hi count");
  const double lo = c.grid[0], hi = c.grid[1];
  const int count = static_cast<int>(c.grid[2]);
  if (count < 2 || !(hi > lo)) throw slev::ConfigError("--grid expects lo < hi and count >= 2");

  // Snap the center to the nearest design point so the exact weight-function
  // column G_lambda(x, x_i) is defined.
  Eigen::Index ti = 0;
  (X.points.col(0).array() - c.t).abs().minCoeff(&ti);
  const double t = X.points(ti, 0);

  const auto p = c.kde.densities(X, nullptr, nullptr);
  const double p_t = p[static_cast<std::size_t>(ti)];

  const bool with_exact = n <= c.exact_cap;
  Eigen::VectorXd w;
  if (with_exact) {
    const auto K = slev::kernel_matrix(spec, X, c.exact_cap);
    Eigen::MatrixXd A = K;
    A.diagonal().array() += double(n) * lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw slev::LinalgError("ek-curve: factorization failed");
    w = llt.solve(Eigen::VectorXd::Unit(n, ti));
  }

  std::ostringstream csv;
  csv << (with_exact ? "x,ek,g_exact\n" : "x,ek\n");
  for (int gi = 0; gi < count; ++gi) {
    const double x = lo + (hi - lo) * double(gi) / double(count - 1);
    const double ek = slev::equivalent_kernel_1d(x, t, p_t, lambda, spec);
    csv << slev::fmt17(x) << ',' << slev::fmt17(ek);
    if (with_exact) {
      double g = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        g += slev::kernel_eval(spec, std::abs(x - X.points(j, 0))) * w(j);
      csv << ',' << slev::fmt17(double(n) * g);
    }
    csv << '\n';
  }
  write_text_file(c.output, csv.str());
  std::cout << "ek-curve at t=" << slev::fmt17(t) << " (snapped from " << slev::fmt17(c.t)
            << "), " << count << " grid points -> " << c.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic leverage-score estimation and Nystrom KRR for stationary kernels"};
  app.require_subcommand(1);

  GenCmd gen_cmd;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset CSV");
  gen_cmd.gen.attach(gen, /*with_n=*/true);
  gen->add_option("-o,--output", gen_cmd.output, "Output CSV path")->required();

  LeverageCmd lev_cmd;
  auto* lev = app.add_subcommand("leverage", "Analytic leverage scores and sampling weights");
  lev->add_option("--input", lev_cmd.input, "Dataset CSV")->required();
  lev->add_option("-o,--output", lev_cmd.output, "Output JSON path")->required();
  lev->add_option("--method", lev_cmd.method, "sa or uniform")
      ->check(CLI::IsMember({"sa", "uniform"}))
      ->capture_default_str();
  lev->add_option("--path", lev_cmd.path, "Evaluation path: closed or quadrature")
      ->check(CLI::IsMember({"closed", "quadrature"}))
      ->capture_default_str();
  lev->add_flag("--proportional-only", lev_cmd.proportional_only,
                "Drop constant factors (Matern closed form)");
  lev_cmd.kernel.attach(lev);
  lev_cmd.lambda.attach(lev);
  lev_cmd.kde.attach(lev);
  attach_threads(lev);

  ExactLeverageCmd ex_cmd;
  auto* ex = app.add_subcommand("exact-leverage", "Dense exact leverage oracle (small n)");
  ex->add_option("--input", ex_cmd.input, "Dataset CSV")->required();
  ex->add_option("-o,--output", ex_cmd.output, "Output JSON path")->required();
  ex->add_option("--exact-cap", ex_cmd.exact_cap, "Dense-path size cap")->capture_default_str();
  ex_cmd.kernel.attach(ex);
  ex_cmd.lambda.attach(ex);
  attach_threads(ex);

  KrrCmd krr_cmd;
  auto* krr = app.add_subcommand("krr", "Exact or Nystrom kernel ridge regression");
  krr->add_option("--input", krr_cmd.input, "Dataset CSV")->required();
  krr->add_option("-o,--output", krr_cmd.output, "Output JSON path")->required();
  krr->add_option("--method", krr_cmd.method, "exact, sa or uniform")
      ->check(CLI::IsMember({"exact", "sa", "uniform"}))
      ->capture_default_str();
  krr->add_option("--d-sub", krr_cmd.d_sub, "Number of Nystrom landmarks");
  krr->add_option("--d-sub-schedule", krr_cmd.d_sub_schedule.ce,
                  "Schedule c e: d_sub = ceil(c * n^-e)")
      ->expected(2);
  krr->add_option("--seed", krr_cmd.seed, "Landmark sampling seed")->capture_default_str();
  krr->add_option("--exact-cap", krr_cmd.exact_cap, "Dense-path size cap")->capture_default_str();
  krr_cmd.kernel.attach(krr);
  krr_cmd.lambda.attach(krr);
  krr_cmd.kde.attach(krr);
  attach_threads(krr);

  BenchCmd bench_cmd;
  auto* bench = app.add_subcommand("bench", "Benchmark leverage accuracy and Nystrom risk");
  bench->add_option("--input", bench_cmd.input, "Dataset CSV (alternative to a generator)");
  bench->add_option("-o,--output", bench_cmd.output, "Output CSV path")->required();
  bench->add_option("--n-grid", bench_cmd.n_grid, "Sample sizes to sweep");
  bench->add_option("--methods", bench_cmd.methods, "Methods: sa uniform exact")
      ->capture_default_str();
  bench->add_option("--path", bench_cmd.path, "SA path: closed or quadrature")
      ->check(CLI::IsMember({"closed", "quadrature"}))
      ->capture_default_str();
  bench->add_flag("--proportional-only", bench_cmd.proportional_only,
                  "Drop constant factors (Matern closed form)");
  bench->add_option("--d-sub", bench_cmd.d_sub, "Number of Nystrom landmarks");
  bench->add_option("--d-sub-schedule", bench_cmd.d_sub_schedule.ce,
                    "Schedule c e: d_sub = ceil(c * n^-e)")
      ->expected(2);
  bench->add_option("--seed", bench_cmd.seed, "Landmark sampling seed")->capture_default_str();
  bench->add_option("--exact-cap", bench_cmd.exact_cap,
                    "Dense cap; R-ACC columns are filled only when n <= cap")
      ->capture_default_str();
  bench->add_option("--reps", bench_cmd.reps, "Timing repetitions (median is reported)")
      ->capture_default_str();
  bench_cmd.gen.attach(bench, /*with_n=*/false, /*prefixed=*/true);
  bench_cmd.kernel.attach(bench);
  bench_cmd.lambda.attach(bench);
  bench_cmd.kde.attach(bench);
  attach_threads(bench);

  EkCurveCmd ek_cmd;
  auto* ek = app.add_subcommand("ek-curve", "1-d equivalent-kernel curve with exact column");
  ek->add_option("--input", ek_cmd.input, "Dataset CSV (alternative to a generator)");
  ek->add_option("-o,--output", ek_cmd.output, "Output CSV path")->required();
  ek->add_option("--n", ek_cmd.n, "Sample size when generating")->capture_default_str();
  ek->add_option("--t", ek_cmd.t, "Curve center (snapped to the nearest design point)")
      ->required();
  ek->add_option("--grid", ek_cmd.grid, "Curve grid: lo hi count")->expected(3)->required();
  ek->add_option("--exact-cap", ek_cmd.exact_cap, "Dense-path size cap")->capture_default_str();
  ek_cmd.gen.attach(ek, /*with_n=*/false, /*prefixed=*/true);
  ek_cmd.kernel.attach(ek);
  ek_cmd.lambda.attach(ek);
  ek_cmd.kde.attach(ek);
  attach_threads(ek);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_cmd);
    if (lev->parsed()) return run_leverage(lev_cmd);
    if (ex->parsed()) return run_exact_leverage(ex_cmd);
    if (krr->parsed()) return run_krr(krr_cmd);
    if (bench->parsed()) return run_bench(bench_cmd);
    if (ek->parsed()) return run_ek_curve(ek_cmd);
  } catch (const slev::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const slev::QuadratureError& e) {
    std::cerr << "numeric failure: " << e.what() << " (best estimate " << e.best_estimate()
              << ", error bound " << e.error_bound() << ")\n";
    return 4;
  } catch (const slev::DivergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const slev::LinalgError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const slev::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const slev::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
