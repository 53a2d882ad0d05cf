#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netent/bounds.hpp"
#include "netent/errors.hpp"
#include "netent/oracle.hpp"
#include "netent/pwl.hpp"
#include "netent/quantization.hpp"
#include "netent/regression.hpp"

using namespace netent;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Subcommand, effective flags, seed, version and timestamps of one run.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> flags;
  std::uint64_t seed = 0;
  std::string started;

  json to_json() const {
    json f = json::object();
    for (const auto& [k, v] : flags) f[k] = v;
    return {{"subcommand", subcommand}, {"flags", f},       {"seed", seed},
            {"version", kVersion},      {"started", started}, {"finished", utc_now()}};
  }

  void write_csv_header(std::ostream& os) const {
    os << "# subcommand: " << subcommand << "\n";
    for (const auto& [k, v] : flags) os << "# flag " << k << ": " << v << "\n";
    os << "# seed: " << seed << "\n# version: " << kVersion << "\n# started: " << started << "\n";
  }
};

RunManifest make_manifest(const CLI::App& root, const CLI::App& sub, std::uint64_t seed) {
  RunManifest m;
  m.subcommand = sub.get_name();
  m.seed = seed;
  m.started = utc_now();
  for (const CLI::App* app : {&root, &sub})
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help" ||
          opt->get_lnames()[0] == "version")
        continue;
      std::string value;
      if (opt->count() > 0) {
        for (const std::string& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      } else {
        value = opt->get_default_str();
      }
      m.flags.emplace_back(opt->get_lnames()[0], value);
    }
  return m;
}

/// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open output file '" + path + "'");
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(const std::string& out, const RunManifest& m, const json& result) {
  Sink s(out);
  s.os() << json{{"manifest", m.to_json()}, {"result", result}}.dump(2) << "\n";
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

ConstantsLedger make_ledger(const std::string& kind, const std::vector<std::string>& overrides) {
  ConstantsLedger l;
  if (kind == "traced")
    l = ConstantsLedger::traced();
  else if (kind == "unit")
    l = ConstantsLedger::unit();
  else
    throw UsageError("--ledger must be 'traced' or 'unit'");
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects name=value, got '" + o + "'");
    double v = 0.0;
    try {
      v = std::stod(o.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--set value is not a number in '" + o + "'");
    }
    l.set(o.substr(0, eq), v);
  }
  return l;
}

double parse_p(const std::string& p) {
  if (p == "inf") return std::numeric_limits<double>::infinity();
  try {
    const double v = std::stod(p);
    if (v >= 1.0) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--p must be a number >= 1 or 'inf'");
}

Optimizer parse_optimizer(const std::string& s) {
  if (s == "gd") return Optimizer::GradientDescent;
  if (s == "adam") return Optimizer::Adam;
  throw UsageError("--optimizer must be 'gd' or 'adam'");
}

std::size_t resolve_threads(int flag) {
  if (flag > 0) return static_cast<std::size_t>(flag);
  if (const char* env = std::getenv("THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void add_ledger_flags(CLI::App* app, std::string& kind, std::vector<std::string>& overrides) {
  app->add_option("--ledger", kind, "constants: traced or unit")->capture_default_str();
  app->add_option("--set", overrides, "override a constant, name=value (repeatable)");
}

// Usage message for unexpected arguments, naming the nearest known flag.
std::string unknown_flag_message(const CLI::App& root, const std::string& what) {
  std::vector<std::string> known;
  std::vector<const CLI::App*> apps{&root};
  const auto parsed = root.get_subcommands();
  if (parsed.empty()) {
    for (const CLI::App* sub : root.get_subcommands([](const CLI::App*) { return true; })) apps.push_back(sub);
  } else {
    apps.push_back(parsed.front());
  }
  for (const CLI::App* app : apps)
    for (const CLI::Option* opt : app->get_options())
      for (const std::string& n : opt->get_lnames()) known.push_back("--" + n);

  std::istringstream words(what.substr(what.find(':') + 1));
  std::string word;
  std::string msg = what;
  while (words >> word) {
    if (word.rfind("--", 0) != 0) continue;
    const std::string key = word.substr(0, word.find('='));
    std::string best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (const std::string& k : known) {
      const std::size_t d = edit_distance(key, k);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (!best.empty() && best_d <= std::max<std::size_t>(2, key.size() / 3))
      msg += "; did you mean '" + best + "' instead of '" + key + "'?";
  }
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric entropy toolkit for ReLU network families"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  std::string out;
  int threads_flag = 0;
  app.add_option("--out", out, "write the report to this file instead of stdout");
  app.add_option("--threads", threads_flag, "worker cap (default: THREADS or all cores)");

  std::string ledger_kind = "traced";
  std::vector<std::string> ledger_set;
  std::uint64_t seed = 0;

  // bounds
  auto* bounds = app.add_subcommand("bounds", "evaluate a covering-number bound");
  std::string family = "fc", side = "both";
  std::size_t W = 0, L = 0, s_conn = 0, d = 1;
  double B = 1.0;
  int qa = 0, qb = 0;
  std::vector<double> eps_list;
  bounds->add_option("--family", family, "fc, sparse, quantized or truncated")->capture_default_str();
  bounds->add_option("--W", W, "width")->required();
  bounds->add_option("--L", L, "depth")->required();
  bounds->add_option("--B", B, "weight magnitude bound")->capture_default_str();
  bounds->add_option("--s", s_conn, "connectivity (sparse)");
  bounds->add_option("--d", d, "input dimension (sparse)")->capture_default_str();
  bounds->add_option("--a", qa, "integer bits (quantized)");
  bounds->add_option("--b", qb, "fractional bits (quantized)");
  bounds->add_option("--eps", eps_list, "radii, comma separated")->required()->delimiter(',');
  bounds->add_option("--side", side, "upper, lower or both")->capture_default_str();
  add_ledger_flags(bounds, ledger_kind, ledger_set);

  // quantize-verify
  auto* qverify = app.add_subcommand("quantize-verify", "check the quantization covering guarantee");
  std::size_t trials = 100, grid_m = 0;
  double eps = 0.0;
  qverify->add_option("--d", d, "input dimension")->capture_default_str();
  qverify->add_option("--W", W, "width")->required();
  qverify->add_option("--L", L, "depth")->required();
  qverify->add_option("--B", B, "weight magnitude bound")->capture_default_str();
  qverify->add_option("--eps", eps, "covering radius")->required();
  qverify->add_option("--trials", trials, "random networks")->capture_default_str();
  qverify->add_option("--grid-m", grid_m, "grid points per axis (0 = default)")->capture_default_str();
  qverify->add_option("--seed", seed, "random seed")->capture_default_str();

  // pack-pwl
  auto* pack = app.add_subcommand("pack-pwl", "emit the piecewise linear packing");
  std::size_t N = 1, cap = 1000000;
  double E = 1.0;
  pack->add_option("--N", N, "number of segments")->required();
  pack->add_option("--E", E, "sup-norm scale")->capture_default_str();
  pack->add_option("--eps", eps, "packing radius")->required();
  pack->add_option("--cap", cap, "maximum number of functions")->capture_default_str();

  // cover-oracle
  auto* cover = app.add_subcommand("cover-oracle", "brute-force covering numbers of a finite family");
  std::vector<double> domain_values{-1.0, 1.0};
  std::string p_str = "inf";
  std::uint64_t s_limit = 0;
  cover->add_option("--d", d, "input dimension")->capture_default_str();
  cover->add_option("--W", W, "width")->required();
  cover->add_option("--L", L, "depth")->required();
  cover->add_option("--weights", domain_values, "weight alphabet, comma separated")->delimiter(',')->capture_default_str();
  cover->add_option("--s", s_limit, "connectivity limit (0 = unbounded)");
  cover->add_option("--eps", eps_list, "radii, comma separated")->required()->delimiter(',');
  cover->add_option("--p", p_str, "norm order (number >= 1 or inf)")->capture_default_str();
  cover->add_option("--grid-m", grid_m, "grid points per axis (0 = default)")->capture_default_str();
  cover->add_option("--cap", cap, "enumeration cap")->capture_default_str();
  add_ledger_flags(cover, ledger_kind, ledger_set);

  // transform-check
  auto* transform = app.add_subcommand("transform-check", "necessary condition for approximating one class by another");
  std::vector<double> src, dst;
  transform->add_option("--src", src, "W,L,B of the source class")->required()->delimiter(',')->expected(3);
  transform->add_option("--dst", dst, "W,L,B of the target class")->required()->delimiter(',')->expected(3);
  transform->add_option("--eps", eps, "approximation accuracy")->required();
  add_ledger_flags(transform, ledger_kind, ledger_set);

  // bit-budget
  auto* bits = app.add_subcommand("bit-budget", "bits per weight needed to reach accuracy kappa");
  double kappa_v = 0.0;
  bits->add_option("--W", W, "width")->required();
  bits->add_option("--L", L, "depth")->required();
  bits->add_option("--B", B, "weight magnitude bound")->capture_default_str();
  bits->add_option("--kappa", kappa_v, "target accuracy")->required();
  add_ledger_flags(bits, ledger_kind, ledger_set);

  // regress
  auto* regress = app.add_subcommand("regress", "nonparametric regression rate experiment");
  RateExperimentOptions ro;
  std::string target = "abs", optimizer = "gd", summary;
  regress->add_option("--target", target, "abs, hat, sine-clamped or zero")->capture_default_str();
  regress->add_option("--sigma", ro.sigma, "noise level")->capture_default_str();
  regress->add_option("--n-list", ro.n_list, "sample sizes, comma separated")->delimiter(',')->capture_default_str();
  regress->add_option("--reps", ro.reps, "repetitions per sample size")->capture_default_str();
  regress->add_option("--width", ro.width, "hidden width")->capture_default_str();
  regress->add_option("--depth-width-const", ro.depth_width_const, "width constant of the depth schedule")
      ->capture_default_str();
  regress->add_option("--depth-rate-const", ro.depth_rate_const, "rate constant of the depth schedule")
      ->capture_default_str();
  regress->add_option("--restarts", ro.restarts, "random restarts per fit")->capture_default_str();
  regress->add_option("--steps", ro.steps, "gradient steps per restart")->capture_default_str();
  regress->add_option("--lr", ro.lr, "step size")->capture_default_str();
  regress->add_option("--optimizer", optimizer, "gd or adam")->capture_default_str();
  regress->add_option("--mc-points", ro.mc_points, "Monte-Carlo points per error estimate")->capture_default_str();
  regress->add_option("--seed", seed, "random seed")->capture_default_str();
  regress->add_option("--summary", summary, "write the JSON summary here instead of after the CSV");
  add_ledger_flags(regress, ledger_kind, ledger_set);

  // kappa
  auto* kappa = app.add_subcommand("kappa", "solve kappa^2 = log2 M(kappa) / n");
  std::string model = "lip";
  double model_c = 1.0, alpha = 1.0, n_samples = 0.0;
  kappa->add_option("--model", model, "lip (c/kappa) or power (c/kappa^alpha)")->capture_default_str();
  kappa->add_option("--c", model_c, "model constant")->capture_default_str();
  kappa->add_option("--alpha", alpha, "exponent of the power model")->capture_default_str();
  kappa->add_option("--n", n_samples, "sample size")->required();

  // constants
  auto* constants = app.add_subcommand("constants", "print the constants ledger");
  add_ledger_flags(constants, ledger_kind, ledger_set);


  try {
    app.parse(argc, argv);
  } catch (const CLI::ExtrasError& e) {
    std::cerr << "usage error: " << unknown_flag_message(app, e.what()) << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::size_t threads = resolve_threads(threads_flag);
    const RunManifest manifest = make_manifest(app, *sub, seed);

    if (sub == bounds) {
      const ConstantsLedger ledger = make_ledger(ledger_kind, ledger_set);
      std::vector<Side> sides;
      if (side == "both")
        sides = {Side::Upper, Side::Lower};
      else
        sides = {side_from_string(side)};
      json rows = json::array();
      for (double e : eps_list)
        for (Side sd : sides) {
          BoundReport r;
          if (family == "fc")
            r = fc_bound(W, L, B, e, sd, ledger);
          else if (family == "sparse")
            r = sparse_bound(W, L, B, s_conn, d, e, sd, ledger);
          else if (family == "quantized")
            r = quantized_bound(W, L, qa, qb, e, sd, ledger);
          else if (family == "truncated")
            r = truncated_bound(W, L, e, ledger);
          else
            throw UsageError("--family must be fc, sparse, quantized or truncated");
          json row = {{"eps", e}, {"side", family == "truncated" ? "lower" : to_string(sd)}};
          const json report = to_json(r);
          for (const auto& [k, v] : report.items()) row[k] = v;
          rows.push_back(row);
          if (family == "truncated") break;
        }
      emit_json(out, manifest, rows);
      return kExitOk;
    }

    if (sub == qverify) {
      FamilySpec spec;
      spec.d = d;
      spec.W = W;
      spec.L = L;
      spec.B = B;
      spec.domain = WeightDomain::interval(B);
      const CoveringReport r = verify_covering_property(spec, eps, trials, seed, grid_m, threads);
      emit_json(out, manifest, to_json(r));
      return r.pass ? kExitOk : kExitFailed;
    }

    if (sub == pack) {
      const PwlPacking p = build_packing(N, E, eps, cap);
      Sink s(out);
      manifest.write_csv_header(s.os());
      s.os() << "# M: " << p.M << "\n# separation: " << fmt17(p.trivial ? 0.0 : p.separation())
             << "\n# certificate_log2: " << fmt17(p.certificate_log2()) << "\n";
      write_packing_csv(s.os(), p);
      return kExitOk;
    }

    if (sub == cover) {
      const ConstantsLedger ledger = make_ledger(ledger_kind, ledger_set);
      FamilySpec spec;
      spec.d = d;
      spec.W = W;
      spec.L = L;
      spec.domain = WeightDomain::finite_set(domain_values);
      spec.B = spec.domain.bound();
      if (s_limit > 0) spec.s = s_limit;
      const double p = parse_p(p_str);
      const FunctionCloud cloud = dedup_realizations(grid_cloud(enumerate_configs(spec, cap), grid_m));
      const double card = cardinality_bound(W, L, static_cast<double>(spec.domain.cardinality()));
      Sink s(out);
      manifest.write_csv_header(s.os());
      s.os() << "# configurations: " << count_configs(spec).str() << "\n# distinct realizations: " << cloud.size()
             << "\neps,lowerN,upperN,cardinality_bound,fc_bound_upper\n";
      for (double e : eps_list) {
        const Sandwich sw = entropy_sandwich(cloud, e, p);
        double fc = std::numeric_limits<double>::quiet_NaN();
        try {
          fc = fc_bound(W, L, std::max(1.0, spec.B), e, Side::Upper, ledger).value;
        } catch (const Error&) {
        }
        s.os() << fmt17(e) << "," << sw.lowerN << "," << sw.upperN << "," << fmt17(card) << "," << fmt17(fc) << "\n";
      }
      return kExitOk;
    }

    if (sub == transform) {
      const ConstantsLedger ledger = make_ledger(ledger_kind, ledger_set);
      const ArchitectureBound a{static_cast<std::size_t>(src[0]), static_cast<std::size_t>(src[1]), src[2]};
      const ArchitectureBound b{static_cast<std::size_t>(dst[0]), static_cast<std::size_t>(dst[1]), dst[2]};
      const FeasibilityVerdict v = transform_feasibility(a, b, eps, ledger);
      emit_json(out, manifest,
                {{"verdict", v.verdict()}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"validity", v.validity}});
      return kExitOk;
    }

    if (sub == bits) {
      const ConstantsLedger ledger = make_ledger(ledger_kind, ledger_set);
      const BitBudget r = quantization_bit_budget(W, L, B, kappa_v, ledger);
      emit_json(out, manifest,
                {{"min_bits", r.min_bits},
                 {"achievable_bits", r.achievable_bits},
                 {"achievable_b", r.achievable_b},
                 {"achievable_cap", r.achievable_cap},
                 {"in_regime", r.in_regime},
                 {"validity", r.validity}});
      return kExitOk;
    }

    if (sub == regress) {
      const ConstantsLedger ledger = make_ledger(ledger_kind, ledger_set);
      ro.target = target_from_name(target);
      ro.optimizer = parse_optimizer(optimizer);
      ro.seed = seed;
      ro.threads = threads;
      const RateExperiment e = run_rate_experiment(ro);
      json rows = json::array();
      json decomposition = json::array();
      for (const RateRow& r : e.rows) {
        rows.push_back({{"n", r.n}, {"depth", r.depth}, {"median_err", r.median_err}, {"errors", r.errors}});
        // Three-factor split of the ratio between the class entropy at
        // eps_n^2 and the packing entropy of the Lipschitz ball at kappa_n.
        const double n = static_cast<double>(r.n);
        const double eps_n = 0.25 * std::cbrt(1.0 / n);
        const double kap =
            yang_barron_kappa([&](double k) { return ledger.c_lip_entropy / k; }, n);
        const BoundReport up = fc_bound(ro.width, r.depth, 1.0, eps_n * eps_n, Side::Upper, ledger);
        const BoundReport lo = fc_bound(ro.width, r.depth, 1.0, eps_n, Side::Lower, ledger);
        const double lip_cover = lip_entropy_bounds(std::min(0.5, 4.0 * eps_n), ledger).second;
        const double lip_pack = lip_entropy_bounds(kap, ledger).first;
        const double f1 = (up.value + 1.0) / lo.value;
        const double f2 = lo.value / lip_cover;
        const double f3 = lip_cover / lip_pack;
        decomposition.push_back({{"n", r.n},
                                 {"eps_n", eps_n},
                                 {"kappa_n", kap},
                                 {"factor_class_ratio", f1},
                                 {"factor_class_vs_lipschitz", f2},
                                 {"factor_lipschitz_ratio", f3},
                                 {"K", f1 * f2 * f3},
                                 {"validity", up.validity && lo.validity}});
      }
      Sink s(out);
      manifest.write_csv_header(s.os());
      s.os() << "n,median_err,slope_so_far\n";
      for (const RateRow& r : e.rows)
        s.os() << r.n << "," << fmt17(r.median_err) << "," << fmt17(r.slope_so_far) << "\n";
      const json doc = {{"manifest", manifest.to_json()},
                        {"fit", to_json(e.fit)},
                        {"rows", rows},
                        {"K_decomposition", decomposition}};
      if (summary.empty()) {
        s.os() << doc.dump(2) << "\n";
      } else {
        Sink js(summary);
        js.os() << doc.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (sub == kappa) {
      double k = 0.0;
      if (model == "lip")
        k = yang_barron_kappa([&](double x) { return model_c / x; }, n_samples);
      else if (model == "power")
        k = yang_barron_kappa([&](double x) { return model_c * std::pow(x, -alpha); }, n_samples);
      else
        throw UsageError("--model must be 'lip' or 'power'");
      emit_json(out, manifest, {{"kappa", k}, {"kappa_squared", k * k}});
      return kExitOk;
    }

    if (sub == constants) {
      const ConstantsLedger ledger = make_ledger(ledger_kind, ledger_set);
      Sink s(out);
      for (const LedgerEntry& e : ledger.entries())
        s.os() << e.name << "=" << fmt17(e.value) << "  # " << e.provenance << (e.shape_only ? " [shape-only]" : "")
               << "\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "; exact count " << e.count() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
