#include "gafs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gafs/charfn.hpp"
#include "gafs/dynamics.hpp"
#include "gafs/gaf.hpp"
#include "gafs/io.hpp"

namespace gafs {

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kNames = {
    {ExperimentKind::Moments, "moments"},
    {ExperimentKind::Coefficients, "coefficients"},
    {ExperimentKind::Tightness, "tightness"},
    {ExperimentKind::OracleEquivalence, "oracle-equivalence"},
    {ExperimentKind::GafCompare, "gaf-compare"},
    {ExperimentKind::Trajectories, "trajectories"},
    {ExperimentKind::SeparationSweep, "separation-sweep"},
    {ExperimentKind::CriticalTime, "critical-time"},
    {ExperimentKind::SupnormCheck, "supnorm-check"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw UsageError("config field '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::logic_error&) {
    bad(key, "'" + v + "' is not a number");
  }
  if (used != v.size() || !std::isfinite(x)) bad(key, "'" + v + "' is not a finite number");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) bad(key, "'" + v + "' is not an integer");
  return static_cast<long long>(x);
}

Complex to_complex(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() == 1) return {to_double(key, parts[0]), 0.0};
  if (parts.size() == 2) return {to_double(key, parts[0]), to_double(key, parts[1])};
  bad(key, "complex values are written re,im");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  const auto dots = v.find("..");
  if (dots != std::string::npos) {
    const long long lo = to_int(key, trim(v.substr(0, dots)));
    const long long hi = to_int(key, trim(v.substr(dots + 2)));
    if (hi < lo || hi - lo > 10000) bad(key, "bad range " + v);
    for (long long k = lo; k <= hi; ++k) out.push_back(static_cast<int>(k));
    return out;
  }
  for (const auto& s : split(v, ',')) out.push_back(static_cast<int>(to_int(key, s)));
  return out;
}

std::vector<double> to_grid(const std::string& key, const std::string& v) {
  const auto parts = split(v, ':');
  if (parts.size() == 3) {
    const double lo = to_double(key, parts[0]);
    const double hi = to_double(key, parts[1]);
    const long long m = to_int(key, parts[2]);
    if (m < 2 || m > 100000) bad(key, "grid point count must lie in [2, 100000]");
    std::vector<double> out;
    for (long long i = 0; i < m; ++i)
      out.push_back(i + 1 == m ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1));
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

std::string fmt_g(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (const auto& [kind, n] : kNames)
    if (name == n) return kind;
  throw UsageError("unknown experiment '" + name + "'");
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> v = [] {
    std::vector<ExperimentKind> out;
    for (const auto& kv : kNames) out.push_back(kv.first);
    return out;
  }();
  return v;
}

ModelSpec ExperimentConfig::model_spec() const {
  if (model == BaseKind::Haar) return ModelSpec::haar();
  return ModelSpec::vdv(law.at(n));
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  c.workers = default_workers();
  bool have_experiment = false;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (v.empty()) bad(key, "empty value");
    if (seen[key]++) bad(key, "given twice");
    c.echo.emplace_back(key, v);

    if (key == "experiment") {
      c.experiment = parse_experiment(v);
      have_experiment = true;
    } else if (key == "model") {
      if (v == "haar") c.model = BaseKind::Haar;
      else if (v == "vdv") c.model = BaseKind::VDVStar;
      else bad(key, "expected haar or vdv");
    } else if (key == "law") {
      if (v == "uniform") c.law.kind = CircularLaw::Kind::UniformCircle;
      else if (v == "wrapped-normal") c.law.kind = CircularLaw::Kind::WrappedNormal;
      else if (v == "wrapped-cauchy") c.law.kind = CircularLaw::Kind::WrappedCauchy;
      else bad(key, "expected uniform, wrapped-normal or wrapped-cauchy");
    } else if (key == "law_location") {
      c.law.location = to_double(key, v);
    } else if (key == "law_spread") {
      c.law.value = to_double(key, v);
    } else if (key == "law_growth") {
      if (v == "const") c.law.growth = LawSchedule::Growth::Constant;
      else if (v == "log") c.law.growth = LawSchedule::Growth::Log;
      else if (v == "power") c.law.growth = LawSchedule::Growth::Power;
      else bad(key, "expected const, log or power");
    } else if (key == "n") {
      c.n = to_int(key, v);
    } else if (key == "a") {
      c.a = to_complex(key, v);
    } else if (key == "q") {
      c.q = to_double(key, v);
    } else if (key == "alpha") {
      c.alpha = to_double(key, v);
    } else if (key == "epsilon") {
      c.epsilon = to_double(key, v);
    } else if (key == "samples") {
      c.samples = to_int(key, v);
    } else if (key == "seed") {
      const long long s = to_int(key, v);
      if (s < 0) bad(key, "must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "workers") {
      c.workers = static_cast<int>(to_int(key, v));
    } else if (key == "out") {
      c.out_dir = v;
    } else if (key == "statistic") {
      if (v != "trace" && v != "weights") bad(key, "expected trace or weights");
      c.statistic = v;
    } else if (key == "l") {
      c.l_values = to_int_list(key, v);
    } else if (key == "k_max") {
      c.k_max = static_cast<int>(to_int(key, v));
    } else if (key == "moments") {
      for (const auto& s : split(v, '|')) {
        try {
          c.moments.push_back(MomentSpec::parse(s));
        } catch (const UsageError& e) {
          bad(key, e.what());
        }
      }
    } else if (key == "z_grid") {
      for (const auto& s : split(v, ';')) c.z_grid.push_back(to_complex(key, s));
    } else if (key == "t_grid") {
      c.t_grid = to_grid(key, v);
    } else if (key == "radius") {
      c.radius = to_double(key, v);
    } else if (key == "gaf_order") {
      c.gaf_order = to_int(key, v);
    } else if (key == "delta") {
      c.delta = to_double(key, v);
    } else if (key == "p") {
      c.p = static_cast<int>(to_int(key, v));
    } else if (key == "degree") {
      c.degree = static_cast<int>(to_int(key, v));
    } else if (key == "k_radius") {
      c.k_radius = to_double(key, v);
    } else if (key == "rho_in") {
      c.rho_in = to_double(key, v);
    } else if (key == "rho_out") {
      c.rho_out = to_double(key, v);
    } else if (key == "event_samples") {
      c.event_samples = to_int(key, v);
    } else {
      bad(key, "unknown key");
    }
  }
  if (!have_experiment) throw UsageError("config has no 'experiment' field");
  if (c.l_values.empty()) c.l_values = to_int_list("l", "1..12");
  if (c.z_grid.empty()) c.z_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  if (c.t_grid.empty()) c.t_grid = to_grid("t_grid", "-1:1:201");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
  if (samples < 1) bad("samples", "must be positive");
  if (workers < 1) bad("workers", "must be positive");
  if (n < 1) bad("n", "must be positive");
  if (model == BaseKind::VDVStar) {
    try {
      check_decay_gate(law);
      (void)law.at(n);
    } catch (const UsageError& e) {
      bad("law", e.what());
    }
  }
  const bool dense = experiment == ExperimentKind::Moments || experiment == ExperimentKind::OracleEquivalence ||
                     experiment == ExperimentKind::Trajectories;
  if (dense && n > 1024) bad("n", "dense experiments are limited to n <= 1024");

  switch (experiment) {
    case ExperimentKind::Moments:
      if (statistic == "trace")
        for (int l : l_values)
          if (l < 1) bad("l", "orders must be >= 1");
      if (model != BaseKind::Haar) bad("model", "moments experiment uses Haar samples");
      break;
    case ExperimentKind::Coefficients:
      if (k_max < 1 || k_max > kMaxCoefficientOrder) bad("k_max", "must lie in [1, 32]");
      for (const auto& m : moments)
        if (m.max_index() > k_max) bad("moments", "index exceeds k_max");
      break;
    case ExperimentKind::Tightness:
      for (Complex z : z_grid)
        if (!(std::abs(z) <= 0.95)) bad("z_grid", "points need |z| <= 0.95");
      break;
    case ExperimentKind::OracleEquivalence:
      if (a == Complex{0.0, 0.0}) bad("a", "must be nonzero");
      if (!(radius > 0.0 && radius <= 0.95)) bad("radius", "must lie in (0, 0.95]");
      break;
    case ExperimentKind::GafCompare:
      if (a == Complex{0.0, 0.0}) bad("a", "must be nonzero");
      if (!(q > 0.0 && q < 1.0)) bad("q", "must lie in (0, 1)");
      if (gaf_order < 1 || gaf_order > kGafMaxOrder) bad("gaf_order", "must lie in [1, 4096]");
      break;
    case ExperimentKind::Trajectories:
      for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(std::abs(t_grid[i]) <= 1.0)) bad("t_grid", "values must lie in [-1, 1]");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) bad("t_grid", "must be strictly increasing");
      }
      break;
    case ExperimentKind::SeparationSweep: {
      if (n < 16) bad("n", "separation sweep needs n >= 16");
      if (!(alpha > 0.0)) bad("alpha", "must be positive");
      if (!(epsilon > 0.0 && epsilon < alpha)) bad("epsilon", "must lie in (0, alpha)");
      if (std::pow(static_cast<double>(n), -0.5 + alpha) > 1.0) bad("alpha", "n^{-1/2+alpha} exceeds 1");
      const SeparationProbe d = default_probe(n, alpha);
      const double ri = rho_in.value_or(d.rho_in), ro = rho_out.value_or(d.rho_out);
      if (!(ri > 0.0 && ri < ro && ro < 1.0)) bad("rho_in", "probe radii need 0 < rho_in < rho_out < 1");
      break;
    }
    case ExperimentKind::CriticalTime: {
      if (!(q > 0.0 && q < 1.0)) bad("q", "must lie in (0, 1)");
      const Complex ap = a * model_spec().limit_factor();
      try {
        (void)lemma_event_probabilities(ap, q, 2.0 * std::abs(ap));
      } catch (const DomainError& e) {
        bad("q", e.what());
      }
      if (event_samples < 0) bad("event_samples", "must be nonnegative");
      break;
    }
    case ExperimentKind::SupnormCheck:
      if (!(delta > 0.0)) bad("delta", "must be positive");
      if (p < 1) bad("p", "must be a positive integer");
      if (degree < 0 || degree > 200) bad("degree", "must lie in [0, 200]");
      if (!(k_radius >= 0.0)) bad("k_radius", "must be nonnegative");
      break;
  }
}

// ---------------------------------------------------------------------------

bool RunSummary::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

const CheckRow* RunSummary::find(const std::string& quantity) const {
  for (const auto& r : rows)
    if (r.quantity == quantity) return &r;
  return nullptr;
}

namespace {

nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

std::string RunSummary::json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment_id;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    checks.push_back({{"name", r.quantity},
                      {"value", num(r.value.real())},
                      {"value_im", num(r.value.imag())},
                      {"reference", num(r.reference)},
                      {"stderr", num(r.std_err)},
                      {"samples", r.samples},
                      {"pass", r.pass}});
  j["checks"] = checks;
  j["pass"] = all_pass();
  j["wall_seconds"] = wall_seconds;
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

struct Context {
  const ExperimentConfig& cfg;
  RunSummary& summary;
  std::vector<std::pair<std::string, CsvTable>> tables;

  Seed seed(std::uint64_t tag) const { return Seed{cfg.seed, 0}.child(tag); }

  void row(std::string quantity, Complex value, double se, Index samples, double reference, bool pass) {
    summary.rows.push_back({std::move(quantity), value, se, samples, reference, pass});
  }
  // |estimate - reference| within the band.
  void band(std::string quantity, const MCEstimate& e, double reference, double k = kStdErrBand) {
    row(std::move(quantity), e.value, e.std_err, e.samples, reference,
        std::abs(e.value - Complex{reference, 0.0}) <= k * e.std_err);
  }
  void info(std::string quantity, double value, Index samples = 0) {
    row(std::move(quantity), value, 0.0, samples, value, true);
  }
  void confinement(const Confinement& c) {
    row("confinement_violations", static_cast<double>(c.violations), 0.0, c.matrices, 0.0, c.violations == 0);
    row("max_eigenvalue_modulus", c.max_modulus, 0.0, c.matrices, 1.0, c.max_modulus < 1.0);
  }
};

void run_moments(Context& ctx) {
  const auto& c = ctx.cfg;
  Confinement conf;
  if (c.statistic == "trace") {
    const auto est = trace_moments(c.n, c.l_values, c.samples, ctx.seed(1), c.workers, &conf);
    for (std::size_t j = 0; j < est.size(); ++j)
      ctx.band("trace_moment_l" + std::to_string(c.l_values[j]), est[j],
               static_cast<double>(std::min<Index>(c.l_values[j], c.n)));
  } else {
    const auto est = weight_pair_moments(c.n, c.samples, ctx.seed(2), c.workers, &conf);
    const double nn = static_cast<double>(c.n);
    for (std::size_t i = 0; i < est.size(); ++i)
      for (std::size_t k = 0; k < est.size(); ++k)
        ctx.band("weight_pair_" + std::to_string(i) + "_" + std::to_string(k), est[i][k],
                 (i == k ? 2.0 : 1.0) / (nn * (nn + 1.0)));
  }
  ctx.confinement(conf);
}

void run_coefficients(Context& ctx) {
  const auto& c = ctx.cfg;
  const MatrixXc s = coefficient_samples(c.model_spec(), c.n, c.k_max, c.samples, ctx.seed(3), c.workers);
  for (int k = 1; k <= c.k_max; ++k) {
    MCAccumulator abs2, sq;
    for (Index i = 0; i < c.samples; ++i) {
      abs2.add(std::norm(s(i, k - 1)));
      sq.add(s(i, k - 1) * s(i, k - 1));
    }
    ctx.band("abs2_coeff_" + std::to_string(k), abs2.estimate(), 1.0);
    ctx.band("square_coeff_" + std::to_string(k), sq.estimate(), 0.0);
  }
  MCAccumulator abs4;
  for (Index i = 0; i < c.samples; ++i) abs4.add(std::norm(s(i, 0)) * std::norm(s(i, 0)));
  ctx.band("abs4_coeff_1", abs4.estimate(), 2.0);
  for (const auto& m : c.moments) {
    MCAccumulator acc;
    for (Index i = 0; i < c.samples; ++i) acc.add(m.evaluate(s.row(i).transpose()));
    ctx.band("moment_" + m.label(), acc.estimate(), m.limit());
  }
}

void run_tightness(Context& ctx) {
  const auto& c = ctx.cfg;
  const TightnessProfile prof = tightness_profile(c.model_spec(), c.n, c.z_grid, c.samples, ctx.seed(4), c.workers);
  const bool haar = c.model == BaseKind::Haar;
  for (const auto& p : prof.points) {
    const double v = p.second_moment.value.real();
    const bool pass = haar ? v <= p.bound + kStdErrBand * p.second_moment.std_err : std::isfinite(v);
    ctx.row("tightness_re" + fmt_g(p.z.real()) + "_im" + fmt_g(p.z.imag()), p.second_moment.value,
            p.second_moment.std_err, p.second_moment.samples, p.bound, pass);
  }
  ctx.row("fitted_C", prof.fitted_c, 0.0, c.samples, prof.fitted_c, std::isfinite(prof.fitted_c));
}

void run_oracle(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelSpec spec = c.model_spec();
  const Disk disk{{0.0, 0.0}, c.radius};
  struct Sample {
    Index eig = 0, zeros = 0;
    double hausdorff = 0.0;
    Confinement conf;
  };
  std::vector<Sample> out(static_cast<std::size_t>(c.samples));
  parallel_for(c.samples, c.workers, [&](Index i) {
    const Seed s = sample_seed(ctx.seed(5), i);
    const BaseModel base = sample_base_model(spec, c.n, s.child(1));
    const VectorXc v = sample_unit_vector(c.n, s.child(2));
    const MatrixXc a = build_perturbation(PerturbationParams::from_strength(c.a, v));
    SpectrumOptions opts;
    opts.diagnostic = "seed " + std::to_string(c.seed) + ", sample " + std::to_string(i);
    const PointSet eig = spectrum(base.matrix * a, opts);
    const PointSet zeros = find_zeros_robust(model_charfn(spec, c.a, spectral_data(base, v)), disk);
    const PointSet inside = eig.restricted_to(disk);
    Sample& r = out[static_cast<std::size_t>(i)];
    r.conf.add(eig);
    r.eig = static_cast<Index>(inside.size());
    r.zeros = static_cast<Index>(zeros.size());
    r.hausdorff = hausdorff_distance(inside, zeros);
  });
  CsvTable t({"sample_id", "eigen_count", "zero_count", "hausdorff", "match"});
  Index matches = 0;
  double worst = 0.0;
  Confinement conf;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& r = out[i];
    const bool ok = r.eig == r.zeros && r.hausdorff <= kOracleTolerance;
    matches += ok;
    worst = std::max(worst, r.hausdorff);
    conf.merge(r.conf);
    t.add_row({std::to_string(i), std::to_string(r.eig), std::to_string(r.zeros), format_double(r.hausdorff),
               ok ? "1" : "0"});
  }
  ctx.tables.emplace_back("oracle.csv", std::move(t));
  ctx.row("matches", static_cast<double>(matches), 0.0, c.samples, static_cast<double>(c.samples),
          matches == c.samples);
  ctx.row("max_hausdorff", worst, 0.0, c.samples, kOracleTolerance, worst <= kOracleTolerance);
  ctx.confinement(conf);
}

void run_gaf_compare(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelSpec spec = c.model_spec();
  const Complex ap = c.a * spec.limit_factor();
  const Disk disk{{0.0, 0.0}, c.q};
  std::vector<Index> mat(static_cast<std::size_t>(c.samples)), gaf(static_cast<std::size_t>(c.samples));
  std::vector<Index> orders(static_cast<std::size_t>(c.samples));
  parallel_for(c.samples, c.workers, [&](Index i) {
    const CharFn f = model_charfn(spec, c.a, sample_spectral_data(spec, c.n, sample_seed(ctx.seed(6), i)));
    mat[static_cast<std::size_t>(i)] = count_zeros_robust(f, disk);
    TruncatedGAF phi = sample_gaf(ap, c.gaf_order, sample_seed(ctx.seed(7), i));
    gaf[static_cast<std::size_t>(i)] = gaf_zero_count(phi, c.q);
    orders[static_cast<std::size_t>(i)] = phi.order();
  });
  const Histogram hm = make_histogram(mat), hg = make_histogram(gaf);
  const CountComparison cmp = compare_counts(hm, hg);
  CsvTable t({"count", "matrix_samples", "gaf_samples"});
  for (std::size_t k = 0; k < std::max(hm.size(), hg.size()); ++k)
    t.add_row({std::to_string(k), std::to_string(k < hm.size() ? hm[k] : 0), std::to_string(k < hg.size() ? hg[k] : 0)});
  ctx.tables.emplace_back("counts.csv", std::move(t));
  ctx.row("tv_distance", cmp.tv_distance, 0.0, c.samples, kTotalVariationThreshold, cmp.pass);
  MCAccumulator em, eg;
  for (std::size_t i = 0; i < mat.size(); ++i) {
    em.add(static_cast<double>(mat[i]));
    eg.add(static_cast<double>(gaf[i]));
  }
  ctx.row("mean_count_matrix", em.estimate().value, em.estimate().std_err, c.samples, eg.estimate().value.real(), true);
  ctx.row("mean_count_gaf", eg.estimate().value, eg.estimate().std_err, c.samples, em.estimate().value.real(), true);
  ctx.info("max_gaf_order", static_cast<double>(*std::max_element(orders.begin(), orders.end())), c.samples);
}

void run_trajectories(Context& ctx) {
  const auto& c = ctx.cfg;
  const ModelSpec spec = c.model_spec();
  std::vector<TrajectoryBundle> bundles(static_cast<std::size_t>(c.samples));
  parallel_for(c.samples, c.workers, [&](Index i) {
    const Seed s = sample_seed(ctx.seed(8), i);
    const BaseModel base = sample_base_model(spec, c.n, s.child(1));
    const VectorXc v = sample_unit_vector(c.n, s.child(2));
    bundles[static_cast<std::size_t>(i)] = trajectories(base.matrix, v, c.t_grid);
  });
  CsvTable t = trajectories_table();
  double interior_max = 0.0, unit_dev = 0.0, closed_max = 0.0;
  bool has_interior = false, has_unit = false, has_zero = false;
  Index zero_ok = 0;
  for (std::size_t s = 0; s < bundles.size(); ++s) {
    const auto& b = bundles[s];
    append_trajectories(t, static_cast<Index>(s), b);
    bool zero_slice_ok = true;
    for (std::size_t i = 0; i < b.t_grid.size(); ++i) {
      const double tt = b.t_grid[i];
      const Eigen::VectorXd mod = b.paths.col(static_cast<Index>(i)).cwiseAbs();
      closed_max = std::max(closed_max, mod.maxCoeff());
      if (std::abs(tt) < 1.0) {
        has_interior = true;
        interior_max = std::max(interior_max, mod.maxCoeff());
      }
      if (tt == 1.0) {
        has_unit = true;
        unit_dev = std::max(unit_dev, (mod.array() - 1.0).abs().maxCoeff());
      }
      if (tt == 0.0) {
        has_zero = true;
        zero_slice_ok = zero_slice_ok && (mod.array() <= 1e-10).count() == 1;
      }
    }
    zero_ok += zero_slice_ok;
  }
  ctx.tables.emplace_back("trajectories.csv", std::move(t));
  ctx.row("max_modulus_closed", closed_max, 0.0, c.samples, 1.0, closed_max <= 1.0 + 1e-10);
  if (has_interior) ctx.row("max_modulus_interior", interior_max, 0.0, c.samples, 1.0, interior_max < 1.0);
  if (has_unit) ctx.row("unit_slice_deviation", unit_dev, 0.0, c.samples, 1e-10, unit_dev <= 1e-10);
  if (has_zero)
    ctx.row("single_zero_at_t0", static_cast<double>(zero_ok), 0.0, c.samples, static_cast<double>(c.samples),
            zero_ok == c.samples);
}

void run_separation(Context& ctx) {
  const auto& c = ctx.cfg;
  SeparationProbe probe = default_probe(c.n, c.alpha);
  if (c.rho_in) probe.rho_in = *c.rho_in;
  if (c.rho_out) probe.rho_out = *c.rho_out;
  const SeparationResult r =
      separation_sweep(c.model_spec(), c.n, c.alpha, c.epsilon, c.samples, ctx.seed(9), c.workers, probe);
  ctx.tables.emplace_back("separation.csv", separation_csv(r));
  ctx.row("separated_fraction", r.separated_fraction, 0.0, c.samples, kSeparationGate,
          r.separated_fraction >= kSeparationGate);
  ctx.row("near_circle_fraction", r.near_circle_fraction, 0.0, c.samples, kSeparationGate,
          r.near_circle_fraction >= kSeparationGate);
  ctx.info("rho_in", probe.rho_in);
  ctx.info("rho_out", probe.rho_out);
  ctx.info("circle_radius", r.circle_radius);
}

void run_critical(Context& ctx) {
  const auto& c = ctx.cfg;
  const CriticalTimeResult r = critical_time_test(c.model_spec(), c.n, c.a, c.q, c.samples, ctx.seed(10), c.workers);
  const Histogram h = make_histogram(r.counts);
  CsvTable t({"count", "samples"});
  for (std::size_t k = 0; k < h.size(); ++k) t.add_row({std::to_string(k), std::to_string(h[k])});
  ctx.tables.emplace_back("counts.csv", std::move(t));
  ctx.row("p0_hat", r.p0_hat, r.p0_std_err, c.samples, 0.5 * r.bounds.p_e, r.pass_zero);
  ctx.row("log_p2_hat", r.p2_hat > 0.0 ? std::log(r.p2_hat) : -INFINITY, 0.0, c.samples,
          std::log(0.5) + r.bounds.log_p_b, r.pass_two);
  ctx.info("p2_hat", r.p2_hat, c.samples);
  ctx.info("pE", r.bounds.p_e);
  ctx.info("log_pB", r.bounds.log_p_b);
  if (c.event_samples > 0) {
    const EventCounts ev = simulate_lemma_events(r.a_prime, c.q, r.s, c.event_samples, ctx.seed(11));
    const double m = static_cast<double>(ev.samples);
    auto check = [&](const char* name, Index hits, double p) {
      const double freq = static_cast<double>(hits) / m;
      const double se = std::sqrt(p * (1.0 - p) / m);
      ctx.row(name, freq, se, ev.samples, p, std::abs(freq - p) <= kEventStdErrBand * se);
    };
    check("event_E_frequency", ev.hits_e, r.bounds.p_e);
    check("event_B_frequency", ev.hits_b, r.bounds.p_b);
  }
}

void run_supnorm(Context& ctx) {
  const auto& c = ctx.cfg;
  std::vector<SupnormCheck> out(static_cast<std::size_t>(c.samples));
  parallel_for(c.samples, c.workers, [&](Index i) {
    RandomStream rng(sample_seed(ctx.seed(12), i));
    VectorXc coeffs(c.degree + 1);
    for (Index k = 0; k <= c.degree; ++k) coeffs[k] = rng.complex_normal();
    out[static_cast<std::size_t>(i)] =
        supnorm_integral_check(CharFn::series(coeffs), Disk{{0.0, 0.0}, c.k_radius}, c.delta, c.p);
  });
  CsvTable t({"sample_id", "lhs", "rhs", "holds"});
  Index holds = 0;
  double min_ratio = INFINITY;
  for (std::size_t i = 0; i < out.size(); ++i) {
    holds += out[i].holds;
    min_ratio = std::min(min_ratio, out[i].rhs / out[i].lhs);
    t.add_row({std::to_string(i), format_double(out[i].lhs), format_double(out[i].rhs), out[i].holds ? "1" : "0"});
  }
  ctx.tables.emplace_back("supnorm.csv", std::move(t));
  ctx.row("inequality_holds", static_cast<double>(holds), 0.0, c.samples, static_cast<double>(c.samples),
          holds == c.samples);
  ctx.info("min_rhs_over_lhs", min_ratio, c.samples);
}

CsvTable results_table(const RunSummary& s) {
  CsvTable t({"experiment_id", "quantity", "value_re", "value_im", "stderr", "samples", "reference_value", "pass"});
  for (const auto& r : s.rows)
    t.add_row({s.experiment_id, r.quantity, format_double(r.value.real()), format_double(r.value.imag()),
               format_double(r.std_err), std::to_string(r.samples), format_double(r.reference), r.pass ? "1" : "0"});
  return t;
}

}  // namespace

RunSummary run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.experiment_id = to_string(config.experiment);
  summary.config = config.echo;
  Context ctx{config, summary, {}};
  switch (config.experiment) {
    case ExperimentKind::Moments:
      run_moments(ctx);
      break;
    case ExperimentKind::Coefficients:
      run_coefficients(ctx);
      break;
    case ExperimentKind::Tightness:
      run_tightness(ctx);
      break;
    case ExperimentKind::OracleEquivalence:
      run_oracle(ctx);
      break;
    case ExperimentKind::GafCompare:
      run_gaf_compare(ctx);
      break;
    case ExperimentKind::Trajectories:
      run_trajectories(ctx);
      break;
    case ExperimentKind::SeparationSweep:
      run_separation(ctx);
      break;
    case ExperimentKind::CriticalTime:
      run_critical(ctx);
      break;
    case ExperimentKind::SupnormCheck:
      run_supnorm(ctx);
      break;
  }
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& dir = config.out_dir;
  write_atomic(dir / "results.csv", results_table(summary).str());
  summary.artifacts.push_back("results.csv");
  for (const auto& [name, table] : ctx.tables) {
    write_atomic(dir / name, table.str());
    summary.artifacts.push_back(name);
  }
  summary.artifacts.push_back("summary.json");
  write_atomic(dir / "summary.json", summary.json());
  return summary;
}

std::string schema(ExperimentKind k) {
  std::string s = "results.csv: experiment_id,quantity,value_re,value_im,stderr,samples,reference_value,pass\n";
  switch (k) {
    case ExperimentKind::OracleEquivalence:
      s += "oracle.csv: sample_id,eigen_count,zero_count,hausdorff,match\n";
      break;
    case ExperimentKind::GafCompare:
      s += "counts.csv: count,matrix_samples,gaf_samples\n";
      break;
    case ExperimentKind::Trajectories:
      s += "trajectories.csv: sample_id,t,path_id,re,im\n";
      break;
    case ExperimentKind::SeparationSweep:
      s += "separation.csv: n,t,alpha,inner_count,annulus_count,outer_count,pass\n";
      break;
    case ExperimentKind::CriticalTime:
      s += "counts.csv: count,samples\n";
      break;
    case ExperimentKind::SupnormCheck:
      s += "supnorm.csv: sample_id,lhs,rhs,holds\n";
      break;
    default:
      break;
  }
  s += "summary.json: experiment, config, checks[name,value,value_im,reference,stderr,samples,pass], pass, "
       "wall_seconds, artifacts\n";
  return s;
}

}  // namespace gafs
