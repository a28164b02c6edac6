// otlab: build transports, tabulate bound functions, and run the verification
// battery from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "otlab/concentration.hpp"
#include "otlab/config.hpp"
#include "otlab/envelope.hpp"
#include "otlab/measures.hpp"
#include "otlab/rng.hpp"
#include "otlab/suite.hpp"
#include "otlab/transport1d.hpp"
#include "otlab/transport_nd.hpp"
#include "otlab/verify.hpp"

namespace fs = std::filesystem;
using namespace otlab;
using cli::ExperimentConfig;
using verify::VerificationReport;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNoConvergence = 3;

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_reports(const ExperimentConfig& cfg, const fs::path& dir,
                   const std::string& name,
                   const std::vector<VerificationReport>& reports) {
  cli::atomic_write(dir / (name + ".json"), verify::to_json(reports));
  cli::atomic_write(dir / (name + ".txt"), verify::summary_table(reports));
  std::cout << verify::summary_table(reports);
  (void)cfg;
}

int finish(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (r.inconclusive) return kExitNoConvergence;
  return verify::all_passed(reports) ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------ envelope

int run_envelope(const ExperimentConfig& cfg) {
  const double p = cfg.num("envelope.p", 0.25);
  const double a = cfg.num("envelope.a", 1.0);
  const int nodes = static_cast<int>(cfg.num("envelope.nodes", 512));
  const fs::path dir = cfg.out_dir();
  const std::string digest = cfg.digest();

  const envelope::EnvelopeFunction env(p, a);
  const auto tab = envelope::envelope_ode_oracle(p, a, nodes);
  double max_diff = 0;
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    if (tab.t[i] <= 0.99 * a)
      max_diff = std::max(max_diff, std::abs(env.value(tab.t[i]) - tab.f[i]));

  cli::atomic_write(dir / "envelope.csv",
                    cli::artifact_header(digest, cfg.seed()) +
                        envelope::envelope_csv(env, nodes));
  if (cfg.data.value("plot", false)) {
    std::vector<double> xs, f, df;
    for (int i = 0; i < nodes; ++i) {
      const double t = -a + 2 * a * i / (nodes - 1.0);
      xs.push_back(t);
      f.push_back(env.value(t));
      df.push_back(-env.derivative(t));
    }
    cli::atomic_write(dir / "envelope.svg",
                      cli::svg_lineplot(xs, {f}, "envelope f_{p,a}"));
  }

  VerificationReport r;
  r.check_id = "envelope-closed-form-vs-bvp";
  r.anchor = "envelope-closed-form-vs-bvp";
  r.theoretical = 0.0;
  r.empirical = max_diff;
  r.slack = 1.0;
  r.abs_tol = 1e-6;
  r.seed = cfg.seed();
  r.config_digest = digest;
  char note[96];
  std::snprintf(note, sizeof note, "f(0)=%0.12g (shooting %0.12g)", env.f0(),
                tab.f0);
  r.notes = note;
  verify::finalize(r);
  std::vector<VerificationReport> reports{r};
  write_reports(cfg, dir, "envelope_reports", reports);
  std::printf("f0 = %.12g; wrote %s\n", env.f0(),
              (dir / "envelope.csv").string().c_str());
  return finish(reports);
}

// ---------------------------------------------------------------- transport1d

int run_transport1d(const ExperimentConfig& cfg) {
  const int dim = 1;
  const auto source = cli::parse_measure(cfg.str("measure.family", "gaussian"), dim);
  const std::string target_spec = cfg.str("target.family", "uniform:-1:1");
  const auto target = cli::parse_measure(target_spec, dim);
  const fs::path dir = cfg.out_dir();
  const std::string digest = cfg.digest();
  const auto T = transport1d::build_map_1d(source, target);

  cli::atomic_write(dir / "map.csv", cli::artifact_header(digest, cfg.seed()) +
                                         transport1d::map_csv(T, 1024));

  std::vector<VerificationReport> reports;
  cli::SuiteOptions opt{cfg.seed(), cfg.jobs(), digest};
  if (target.family() == measures::Family::UniformBody) {
    // peak second derivative and pointwise envelope domination
    const auto [lo, hi] = target.density1d().lo() < target.density1d().hi()
                              ? std::pair{target.density1d().lo(),
                                          target.density1d().hi()}
                              : std::pair{-1.0, 1.0};
    const double a = 0.5 * (hi - lo);
    const envelope::EnvelopeFunction env(0.0, a);
    double max_dd = -1, arg_tmap = 0, max_excess = -1e300;
    for (int i = 0; i < 2049; ++i) {
      const double u = 1e-6 + (1.0 - 2e-6) * i / 2048.0;
      const double x = source.quantile1(u);
      const double dd = T.derivative(x);
      const double tm = T.map(x) - 0.5 * (hi + lo);
      if (dd > max_dd) {
        max_dd = dd;
        arg_tmap = tm;
      }
      max_excess = std::max(max_excess, dd - env.value(tm));
    }
    VerificationReport r1;
    r1.check_id = "uniform-target-peak-second-derivative";
    r1.anchor = r1.check_id;
    r1.theoretical = a * std::sqrt(2.0 / kPi);
    r1.empirical = max_dd;
    r1.slack = 1.0;
    r1.abs_tol = 1e-4;
    r1.seed = cfg.seed();
    r1.config_digest = digest;
    r1.witness.t = arg_tmap;
    verify::finalize(r1);
    // two-sided: also require max_dd >= bound - tol
    r1.passed = std::abs(max_dd - r1.theoretical) <= 1e-4;
    reports.push_back(r1);

    VerificationReport r2 = r1;
    r2.check_id = "pointwise-envelope-domination";
    r2.anchor = r2.check_id;
    r2.theoretical = 0.0;
    r2.empirical = max_excess;
    verify::finalize(r2);
    reports.push_back(r2);
  } else {
    const double p = cfg.num("check.p", 1.0);
    const double q = cfg.num("check.q", 3.0);
    const double C_p = measures::holder_cp_sup(source.as_c1_1d(), p, -8, 8);
    const double C_q = measures::monotone_cq_inf(target.as_c1_1d(), q, -8, 8);
    const auto th = transport1d::theorem1_constant(p, q, C_p, C_q);
    transport1d::PairSpec ps;
    const auto sup = transport1d::empirical_holder_1d(T, th.alpha, ps, cfg.seed());
    VerificationReport r;
    r.check_id = "derivative-holder-bound";
    r.anchor = r.check_id;
    r.theoretical = th.constant;
    r.empirical = sup.value;
    r.slack = 1.0;
    r.abs_tol = 1e-3;
    r.seed = cfg.seed();
    r.config_digest = digest;
    r.witness.x = {sup.x};
    r.witness.y = {sup.y};
    char note[128];
    std::snprintf(note, sizeof note, "C_p=%.9g C_q=%.9g alpha=%.4g", C_p, C_q,
                  th.alpha);
    r.notes = note;
    verify::finalize(r);
    reports.push_back(r);

    // second-difference form with searched A_p / A_q
    const Vec tg{0.25, 0.5, 1.0, 2.0};
    auto sspec = measures::default_search(1);
    const double A_p = measures::second_diff_upper_constant(
        source.as_convex_function(), p, measures::Norm::L2, sspec, tg);
    const double A_q = measures::second_diff_lower_constant(
        target.as_convex_function(), q, measures::Norm::L2, sspec, tg);
    verify::QuotientSupSpec qss;
    qss.x_udim = 1;
    qss.x_from_uniform = [source](std::span<const double> u) {
      return Vec{source.quantile1(std::clamp(u[0], 1e-9, 1.0 - 1e-9))};
    };
    qss.h_dim = 1;
    qss.t_min = 1e-2;
    qss.t_max = 4.0;
    auto quotient = [&T](std::span<const double> x, std::span<const double>,
                         double t) {
      return T.potential_second_quotient(x[0], t);
    };
    reports.push_back(verify::check_theorem_hoelder(
        A_p, p, A_q, q, quotient, qss, cfg.seed(), 1.0, 1e-3,
        "second-difference-bound", digest));
  }
  write_reports(cfg, dir, "transport1d_reports", reports);
  return finish(reports);
}

// ---------------------------------------------------------------- transportnd

int run_transportnd(const ExperimentConfig& cfg) {
  const auto body = cli::parse_body(cfg.str("body.spec", "box:-1:1:-1:1"));
  const int dim = body.dimension();
  const auto source = cli::parse_measure(cfg.str("measure.family", "gaussian"), dim);
  const fs::path dir = cfg.out_dir();
  const std::string digest = cfg.digest();

  transportnd::SolveParams prm;
  prm.n = static_cast<int>(cfg.num("solver.n", 2000));
  prm.m = static_cast<int>(cfg.num("solver.m", 2000));
  prm.epsilon = cfg.num("solver.epsilon", 0.0);
  prm.tol = cfg.num("solver.tol", 1e-6);
  prm.dual_tol = cfg.num("solver.dual_tol", 1e-8);
  prm.max_iter = static_cast<int>(cfg.num("solver.max_iter", 10000));
  prm.seed = cfg.seed();
  prm.jobs = cfg.jobs();
  const auto tp = transportnd::solve_entropic(source, body, prm);
  std::printf("entropic solve: eps=%.4g iters=%d marginal=%.3g dual=%.3g%s\n",
              tp.epsilon(), tp.iterations_run(), tp.marginal_error(),
              tp.dual_update_norm(), tp.converged() ? "" : "  [NOT CONVERGED]");

  cli::atomic_write(dir / "potentials.csv",
                    cli::artifact_header(digest, cfg.seed()) + tp.potentials_csv());
  const double plan_threshold = cfg.num("solver.plan_threshold", -1.0);
  if (plan_threshold >= 0) {
    std::string plan = cli::artifact_header(digest, cfg.seed()) + "i,j,weight\n";
    char buf[96];
    for (const auto& [i, j, w] : tp.plan_entries(plan_threshold)) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i, j, w);
      plan += buf;
    }
    cli::atomic_write(dir / "plan.csv", plan);
  }
  const std::string eval_file = cfg.str("eval", "");
  if (!eval_file.empty()) {
    std::ifstream in(eval_file);
    if (!in) throw std::invalid_argument("transportnd: cannot open " + eval_file);
    std::string line, out = cli::artifact_header(digest, cfg.seed());
    out += "x1,x2,x3,T1,T2,T3\n";
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || std::isalpha(line[0])) continue;
      Vec x;
      std::stringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, ',') && static_cast<int>(x.size()) < dim)
        x.push_back(std::stod(tok));
      if (static_cast<int>(x.size()) != dim) continue;
      const Vec y = tp.map(x);
      char buf[192];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    x[0], dim > 1 ? x[1] : 0.0, dim > 2 ? x[2] : 0.0, y[0],
                    dim > 1 ? y[1] : 0.0, dim > 2 ? y[2] : 0.0);
      out += buf;
    }
    cli::atomic_write(dir / "map_eval.csv", out);
  }

  std::vector<VerificationReport> reports;
  const double slack = cfg.num("check.slack", 1.15);
  {
    const double bound = envelope::measure_set_bound(dim, body.diameter());
    const auto est = transportnd::empirical_lipschitz_nd(
        tp, 8000, Rng(cfg.seed()).stream("cli-lip").root(), source);
    VerificationReport r;
    r.check_id = "gaussian-to-body-lipschitz";
    r.anchor = r.check_id;
    r.theoretical = bound;
    r.empirical = est.value;
    r.slack = slack;
    r.abs_tol = 1e-9;
    r.seed = cfg.seed();
    r.config_digest = digest;
    r.witness.x = est.x;
    r.witness.y = est.y;
    r.inconclusive = !tp.converged();
    verify::finalize(r);
    reports.push_back(r);
  }
  {
    Rng rng = Rng(cfg.seed()).stream("cli-env-pts");
    std::vector<Vec> pts;
    Vec u(source.uniform_dim());
    for (int i = 0; i < 256; ++i) {
      for (auto& uk : u) uk = rng.uniform(0.005, 0.995);
      pts.push_back(source.from_uniform(u));
    }
    Vec h(dim, 0.0);
    h[0] = 1.0;
    const double t_fd = std::max(2.2 * std::sqrt(tp.epsilon()), 0.45);
    const bool huber = source.family() == measures::Family::Huber1DProduct;
    auto r = verify::second_order_envelope_check(
        tp, body, h, 1.0,
        huber ? std::optional<double>(1.0) : std::nullopt,
        huber ? -0.5 : (dim - 1) / 4.0, pts, t_fd, 1.2, 1e-9,
        "second-derivative-envelope", digest);
    r.seed = cfg.seed();
    reports.push_back(r);
  }
  write_reports(cfg, dir, "transportnd_reports", reports);
  return finish(reports);
}

// ---------------------------------------------------------------- concentrate

int run_concentrate(const ExperimentConfig& cfg) {
  const int dim = static_cast<int>(cfg.num("measure.dim", 2));
  const auto nu = cli::parse_measure(cfg.str("measure.family", "powerlaw:4"), dim);
  const fs::path dir = cfg.out_dir();
  const std::string digest = cfg.digest();
  const std::size_t samples =
      static_cast<std::size_t>(cfg.num("concentrate.samples", 1000000));

  Vec rs;
  if (cfg.data.contains("concentrate") &&
      cfg.data["concentrate"].contains("r") &&
      cfg.data["concentrate"]["r"].is_array()) {
    for (const auto& v : cfg.data["concentrate"]["r"]) rs.push_back(v.get<double>());
  } else {
    rs = {0.5, 1.0, 2.0, 4.0};
  }

  Vec normal(dim, 0.0);
  normal[0] = 1.0;
  const auto A = concentration::BaseSet::half_space(normal, 0.0);

  auto spec = measures::default_search(dim);
  if (dim >= 2) {
    spec.grid_per_axis = 33;
    spec.directions = 32;
  }
  const auto delta = measures::tabulate_modulus(
      measures::ModulusKind::Delta, nu.as_convex_function(), measures::Norm::L2,
      spec, measures::default_modulus_grid(4.0, 48));
  cli::atomic_write(dir / "modulus_delta.csv",
                    cli::artifact_header(digest, cfg.seed()) +
                        measures::modulus_csv(delta));

  std::vector<concentration::ProfilePoint> pts;
  std::vector<VerificationReport> reports;
  double worst_profile = -1e300, worst_exp = -1e300;
  for (double r : rs) {
    concentration::EnlargementQuery q;
    q.set = A;
    q.r = r;
    q.norm = measures::Norm::L2;
    q.sample_count = samples;
    q.seed = Rng(cfg.seed()).stream("concentrate").root();
    const auto est = concentration::enlargement_probability(nu, q, cfg.jobs());
    const double pb = concentration::ms_profile_bound(0.5, r, delta);
    const double eb = concentration::ms_exp_bound(true, r, delta);
    pts.push_back({r, est.value, pb, eb, est.ci_halfwidth});
    worst_profile = std::max(worst_profile, pb - est.value - est.ci_halfwidth);
    worst_exp = std::max(worst_exp, eb - est.value - est.ci_halfwidth);
  }
  cli::atomic_write(dir / "profile.csv", cli::artifact_header(digest, cfg.seed()) +
                                             concentration::profile_csv(pts));
  if (cfg.data.value("plot", false)) {
    std::vector<double> xs;
    std::vector<std::vector<double>> ys(3);
    for (const auto& p : pts) {
      xs.push_back(p.r);
      ys[0].push_back(p.empirical);
      ys[1].push_back(p.profile_bound);
      ys[2].push_back(p.exp_bound);
    }
    cli::atomic_write(dir / "profile.svg",
                      cli::svg_lineplot(xs, ys, "enlargement profile"));
  }

  VerificationReport r1;
  r1.check_id = "concentration-profile-bound";
  r1.anchor = r1.check_id;
  r1.theoretical = 0.0;
  r1.empirical = worst_profile;
  r1.slack = 1.0;
  r1.abs_tol = 1e-12;
  r1.seed = cfg.seed();
  r1.config_digest = digest;
  verify::finalize(r1);
  reports.push_back(r1);
  VerificationReport r2 = r1;
  r2.check_id = "concentration-exp-bound";
  r2.anchor = r2.check_id;
  r2.empirical = worst_exp;
  verify::finalize(r2);
  reports.push_back(r2);

  // Marton enlargement bound via the convexified Bregman modulus
  const auto breg = measures::tabulate_modulus(
      measures::ModulusKind::Bregman, nu.as_convex_function(), measures::Norm::L2,
      spec, measures::default_modulus_grid(4.0, 48));
  const auto btilde = measures::convexify_modulus(breg);
  for (double r : rs) {
    if (r <= 0 || r / 2.0 > btilde.grid.back()) continue;
    auto res = concentration::marton_check(
        nu, A, r, measures::Norm::L2, concentration::as_fn(btilde), samples,
        Rng(cfg.seed()).stream("concentrate-marton").root(), cfg.jobs(),
        "marton-r" + std::to_string(r), digest);
    reports.push_back(res.chain);
    reports.push_back(res.displayed);
  }
  write_reports(cfg, dir, "concentrate_reports", reports);
  return finish(reports);
}

// ---------------------------------------------------------------------- suite

int run_suite_cmd(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.out_dir();
  cli::SuiteOptions opt{cfg.seed(), cfg.jobs(), cfg.digest()};
  const auto reports = cli::run_suite(opt);
  cli::atomic_write(dir / "reports.json", verify::to_json(reports));
  cli::atomic_write(dir / "summary.txt", verify::summary_table(reports));
  std::cout << verify::summary_table(reports);
  return finish(reports);
}

// --------------------------------------------------------------------- report

int run_report(const ExperimentConfig& cfg, const std::vector<std::string>& inputs) {
  std::vector<VerificationReport> all;
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw std::invalid_argument("report: no input files given");
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::invalid_argument("report: cannot open " + f.string());
    nlohmann::json j;
    in >> j;
    auto parse_one = [&](const nlohmann::json& o) {
      VerificationReport r;
      r.check_id = o.value("check_id", "?");
      r.anchor = o.value("paper_anchor", "");
      r.theoretical = o.value("theoretical", 0.0);
      r.empirical = o.value("empirical", 0.0);
      r.slack = o.value("slack", 1.0);
      r.abs_tol = o.value("abs_tol", 0.0);
      r.passed = o.value("passed", false);
      r.vacuous = o.value("vacuous", false);
      r.inconclusive = o.value("inconclusive", false);
      r.seed = o.value("seed", 0ull);
      r.config_digest = o.value("config_digest", "");
      all.push_back(r);
    };
    if (j.is_array())
      for (const auto& o : j) parse_one(o);
    else
      parse_one(j);
  }
  const fs::path dir = cfg.out_dir();
  cli::atomic_write(dir / "combined_summary.txt", verify::summary_table(all));
  std::cout << verify::summary_table(all);
  return verify::all_passed(all) ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for transport regularity bounds"};
  app.require_subcommand(1);

  std::string config_file, out_dir, source_spec, target_spec, body_spec, eval_file;
  std::vector<std::string> report_inputs;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->allow_extras();  // --section.key=value overrides
    return sub;
  };
  auto* c_env = add_common(app.add_subcommand("envelope", "tabulate the bound function f_{p,a}"));
  auto* c_t1 = add_common(app.add_subcommand("transport1d", "exact 1D transport and its bounds"));
  auto* c_tnd = add_common(app.add_subcommand("transportnd", "entropic transport to a convex body"));
  auto* c_con = add_common(app.add_subcommand("concentrate", "concentration profiles and appendix bounds"));
  auto* c_suite = add_common(app.add_subcommand("suite", "run the full verification battery"));
  auto* c_rep = add_common(app.add_subcommand("report", "aggregate report JSON files"));
  c_env->add_option("--p", "envelope exponent p");
  c_env->add_option("--a", "slab half-width a");
  c_env->add_option("--nodes", "table nodes");
  c_t1->add_option("--source", source_spec, "source measure spec");
  c_t1->add_option("--target", target_spec, "target measure spec");
  c_tnd->add_option("--source", source_spec, "source measure spec");
  c_tnd->add_option("--body", body_spec, "target body spec");
  c_tnd->add_option("--eval", eval_file, "CSV of points to push through the map");
  c_con->add_option("--measure", source_spec, "measure spec");
  c_rep->add_option("--in", report_inputs, "report files or directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  try {
    ExperimentConfig cfg =
        config_file.empty()
            ? ExperimentConfig::defaults(command)
            : ExperimentConfig::from_file(config_file, command);
    // named conveniences map onto config paths
    if (!out_dir.empty()) cfg.data["out"] = out_dir;
    if (!source_spec.empty()) cfg.data["measure"]["family"] = source_spec;
    if (!target_spec.empty()) cfg.data["target"]["family"] = target_spec;
    if (!body_spec.empty()) cfg.data["body"]["spec"] = body_spec;
    if (!eval_file.empty()) cfg.data["eval"] = eval_file;
    if (command == "envelope") {
      for (const auto* name : {"p", "a", "nodes"}) {
        auto* o = sub->get_option(std::string("--") + name);
        if (o->count() > 0)
          cfg.override_path(std::string("envelope.") + name, o->as<std::string>());
      }
    }
    // generic --section.key=value overrides from the extras
    for (const auto& extra : sub->remaining()) {
      if (extra.rfind("--", 0) != 0)
        throw std::invalid_argument("unrecognized argument '" + extra + "'");
      const auto eq = extra.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("override '" + extra + "' needs =value");
      cfg.override_path(extra.substr(2, eq - 2), extra.substr(eq + 1));
    }

    if (command == "envelope") return run_envelope(cfg);
    if (command == "transport1d") return run_transport1d(cfg);
    if (command == "transportnd") return run_transportnd(cfg);
    if (command == "concentrate") return run_concentrate(cfg);
    if (command == "suite") return run_suite_cmd(cfg);
    if (command == "report") return run_report(cfg, report_inputs);
    std::cerr << "unknown command " << command << "\n";
    return kExitConfigError;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
}
