#include "specshift/runner.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "specshift/config.hpp"
#include "specshift/counting.hpp"
#include "specshift/csv.hpp"
#include "specshift/limits.hpp"
#include "specshift/phase.hpp"
#include "specshift/potential.hpp"
#include "specshift/spectral_shift.hpp"
#include "specshift/trace_check.hpp"

namespace specshift::cli {

namespace fs = std::filesystem;
using potentials::Potential;
using potentials::Segment;

namespace {

struct Numerics {
  double ode_tol;
  double quad_tol;
  double phase_tol;
  double eigen_tol;
  double levinson_tol;
  double resonance_tol;
  double cesaro_step;
};

Numerics read_numerics(const io::Config& cfg) {
  Numerics n;
  n.ode_tol = cfg.get_positive("numerics", "ode_tol", 1e-10);
  n.quad_tol = cfg.get_positive("numerics", "quad_tol", 1e-10);
  n.phase_tol = cfg.get_positive("numerics", "phase_tol", 1e-8);
  n.eigen_tol = cfg.get_positive("numerics", "eigen_tol", 1e-8);
  n.levinson_tol = cfg.get_positive("numerics", "levinson_tol", 1e-3);
  n.resonance_tol = cfg.get_positive("numerics", "resonance_tol", 1e-6);
  n.cesaro_step = cfg.get_double("numerics", "cesaro_step", 0.0);
  return n;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

Segment parse_segment(const std::string& key, const std::string& text, int line) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  auto next = [&](const char* what) {
    std::string tok;
    if (!(in >> tok))
      throw io::ConfigError(line, std::string("segment '") + key + "' missing " + what);
    if (tok == "inf") return kInf;
    try {
      return std::stod(tok);
    } catch (const std::exception&) {
      throw io::ConfigError(line, std::string("segment '") + key +
                                      "': bad number '" + tok + "'");
    }
  };
  if (kind == "constant") {
    const double lo = next("lo"), hi = next("hi"), value = next("value");
    return Segment::constant(value, lo, hi);
  }
  if (kind == "exponential") {
    const double lo = next("lo"), hi = next("hi");
    const double amp = next("amplitude"), rate = next("rate");
    return Segment::exponential(amp, rate, lo, hi);
  }
  if (kind == "sech2") {
    const double lo = next("lo"), hi = next("hi");
    const double amp = next("amplitude"), scale = next("scale");
    return Segment::sech_squared(amp, scale, lo, hi);
  }
  if (kind == "power_law") {
    const double lo = next("lo"), hi = next("hi");
    const double amp = next("amplitude"), alpha = next("alpha");
    return Segment::power_law(amp, alpha, lo, hi);
  }
  throw io::ConfigError(line, "unknown segment kind '" + kind + "'");
}

Potential read_potential(const io::Config& cfg) {
  const std::string kind = cfg.get_string("potential", "kind");
  const int kind_line = cfg.line_of("potential", "kind");
  try {
    if (kind == "zero") return Potential::zero();
    if (kind == "square_well")
      return Potential::square_well(cfg.get_double("potential", "depth"),
                                    cfg.get_double("potential", "width"));
    if (kind == "exponential")
      return Potential::exponential(cfg.get_double("potential", "amplitude"),
                                    cfg.get_double("potential", "rate"));
    if (kind == "sech2")
      return Potential::sech_squared(cfg.get_double("potential", "amplitude"),
                                     cfg.get_double("potential", "scale"));
    if (kind == "power_law")
      return Potential::power_law(cfg.get_double("potential", "amplitude"),
                                  cfg.get_double("potential", "alpha"),
                                  cfg.get_double("potential", "lo", 0.0),
                                  cfg.get_double("potential", "hi"));
    if (kind == "table") {
      const auto xs = cfg.get_double_list("potential", "xs");
      const auto vs = cfg.get_double_list("potential", "vs");
      Eigen::ArrayXd x(xs.size()), v(vs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) x[i] = xs[i];
      for (std::size_t i = 0; i < vs.size(); ++i) v[i] = vs[i];
      return Potential::tabulated(std::move(x), std::move(v));
    }
    if (kind == "segments") {
      std::vector<Segment> segs;
      for (const auto& key : cfg.keys("potential")) {
        if (key.rfind("segment", 0) != 0) continue;
        segs.push_back(parse_segment(key, cfg.get_string("potential", key),
                                     cfg.line_of("potential", key)));
      }
      if (segs.empty())
        throw io::ConfigError(kind_line, "kind=segments needs segmentN keys");
      return Potential(std::move(segs));
    }
  } catch (const InadmissiblePotential& e) {
    throw io::ConfigError(kind_line, std::string("inadmissible potential: ") + e.what());
  }
  throw io::ConfigError(kind_line, "unknown potential kind '" + kind + "'");
}

limits::TestFunction read_test_function(const io::Config& cfg,
                                        const std::string& prefix) {
  const std::string kind = cfg.get_string("experiment", prefix + "_kind", "hat");
  if (kind == "hat")
    return limits::TestFunction::hat(cfg.get_double("experiment", prefix + "_a"),
                                     cfg.get_double("experiment", prefix + "_b"),
                                     cfg.get_double("experiment", prefix + "_peak"));
  if (kind == "bump")
    return limits::TestFunction::bump(
        cfg.get_double("experiment", prefix + "_center"),
        cfg.get_double("experiment", prefix + "_width"));
  if (kind == "spline") {
    const auto ks = cfg.get_double_list("experiment", prefix + "_knots");
    const auto vs = cfg.get_double_list("experiment", prefix + "_values");
    Eigen::ArrayXd k(ks.size()), v(vs.size());
    for (std::size_t i = 0; i < ks.size(); ++i) k[i] = ks[i];
    for (std::size_t i = 0; i < vs.size(); ++i) v[i] = vs[i];
    return limits::TestFunction::spline(std::move(k), std::move(v));
  }
  throw io::ConfigError(cfg.line_of("experiment", prefix + "_kind"),
                        "unknown test function kind '" + kind + "'");
}

// Collects output files, then writes a manifest with their content hashes.
struct OutputDir {
  fs::path dir;
  std::vector<std::pair<std::string, std::uint64_t>> artifacts;

  explicit OutputDir(const std::string& path) : dir(path) {
    fs::create_directories(dir);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    artifacts.emplace_back(name, fnv1a(content));
  }

  void manifest(const std::string& subcommand, const io::Config& cfg) {
    std::ostringstream os;
    os << "subcommand = " << subcommand << "\n\n";
    os << "[config]\n" << cfg.canonical_text() << "\n[artifacts]\n";
    for (const auto& [name, hash] : artifacts)
      os << name << " = " << hex64(hash) << "\n";
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    out << os.str();
  }
};

struct RunContext {
  io::Config cfg;
  Potential V;
  Numerics num;
  int threads;
  OutputDir out;
};

void run_phase(RunContext& ctx) {
  const double k_min = ctx.cfg.get_positive("experiment", "k_min", 0.05);
  const double k_max = ctx.cfg.get_positive("experiment", "k_max", 10.0);
  const int k_count = ctx.cfg.get_int("experiment", "k_count", 200);
  const std::string radius = ctx.cfg.get_string("experiment", "radius", "full");
  phase::PhaseCurve curve =
      radius == "full"
          ? phase::sample_phase_curve_full(ctx.V, k_min, k_max, k_count,
                                           ctx.num.phase_tol, ctx.threads)
          : phase::sample_phase_curve(ctx.V, k_min, k_max, k_count,
                                      std::stod(radius), ctx.num.ode_tol,
                                      ctx.threads);
  std::ostringstream os;
  io::write_comment(os, "potential = " + ctx.V.describe());
  io::write_comment(os, "potential_hash = " + hex64(ctx.V.hash()));
  curve.write_csv(os);
  ctx.out.write("phase.csv", os.str());
}

void run_spectrum(RunContext& ctx) {
  const auto evs = counting::negative_eigenvalues_halfline(ctx.V, ctx.num.eigen_tol);
  const auto resonance = phase::detect_resonance(ctx.V, ctx.num.resonance_tol);
  std::ostringstream os;
  io::write_comment(os, "potential = " + ctx.V.describe());
  io::write_comment(os, "potential_hash = " + hex64(ctx.V.hash()));
  io::write_comment(os, "bargmann_bound = " +
                            io::format_double(ctx.V.negative_part_moment()));
  io::write_comment(os, std::string("resonance = ") +
                            (resonance.resonant ? "resonant" : "non-resonant"));
  io::write_comment(os, "jost_zero_witness = " + io::format_double(resonance.witness));
  if (!resonance.resonant) {
    const auto lev = phase::levinson_count(ctx.V, ctx.num.levinson_tol);
    io::write_comment(os, "levinson_count = " + io::format_int(lev.count));
  }
  os << "index,lambda\n";
  for (std::size_t i = 0; i < evs.size(); ++i)
    os << io::format_int(static_cast<long long>(i + 1)) << ','
       << io::format_double(evs[i]) << '\n';
  ctx.out.write("spectrum.csv", os.str());

  const auto r_list = ctx.cfg.get_double_list("experiment", "r_list", {});
  const int lambda_count = ctx.cfg.get_int("experiment", "lambda_count", 0);
  if (!r_list.empty() && lambda_count > 0) {
    const double lo = ctx.cfg.get_double("experiment", "lambda_min",
                                         -(ctx.V.depth_bound().value_or(1.0) + 1.0));
    const double hi = ctx.cfg.get_double("experiment", "lambda_max", 0.0);
    std::vector<std::array<double, 3>> rows;
    for (double r : r_list)
      for (int i = 0; i < lambda_count; ++i) {
        const double lam = lo + (hi - lo) * i / std::max(1, lambda_count - 1);
        rows.push_back({lam, r,
                        static_cast<double>(counting::oscillation_count(
                                                ctx.V, r, lam, ctx.num.ode_tol)
                                                .count)});
      }
    std::ostringstream cs;
    counting::write_counts_csv(cs, rows);
    ctx.out.write("counts.csv", cs.str());
  }
}

void run_ssf(RunContext& ctx) {
  const double lambda_max = ctx.cfg.get_positive("experiment", "lambda_max", 4.0);
  const int lambda_count = ctx.cfg.get_int("experiment", "lambda_count", 2000);
  const auto r_list = ctx.cfg.get_double_list("experiment", "r_list", {10.0});
  const auto grid = ssf::default_profile_grid(ctx.V, lambda_max, lambda_count);
  {
    const auto profile = ssf::ssf_halfline_profile(ctx.V, grid, ctx.num.phase_tol);
    std::ostringstream os;
    profile.write_csv(os, ctx.V, ctx.num.phase_tol);
    ctx.out.write("ssf_halfline.csv", os.str());
  }
  for (double r : r_list) {
    const auto profile = ssf::ssf_box_profile(ctx.V, r, grid, ctx.num.ode_tol);
    std::ostringstream os;
    profile.write_csv(os, ctx.V, ctx.num.ode_tol);
    std::ostringstream name;
    name << "ssf_box_r" << r << ".csv";
    ctx.out.write(name.str(), os.str());
  }
}

void run_weak(RunContext& ctx) {
  const auto g = read_test_function(ctx.cfg, "g");
  const auto r_list =
      ctx.cfg.get_double_list("experiment", "r_list", {10, 20, 40, 80});
  const auto report =
      limits::weak_convergence_study(ctx.V, g, r_list, ctx.num.quad_tol);
  std::ostringstream os;
  report.write_csv(os);
  ctx.out.write("weak.csv", os.str());
}

void run_cesaro(RunContext& ctx) {
  const auto lambdas = ctx.cfg.get_double_list("experiment", "lambda_list", {1.0});
  const auto Rs = ctx.cfg.get_double_list("experiment", "r_grid", {50, 100, 200, 400});
  const ssf::HalflineSsf xi(ctx.V, ctx.num.eigen_tol);
  std::ostringstream os;
  io::write_comment(os, "potential = " + ctx.V.describe());
  io::write_comment(os, "potential_hash = " + hex64(ctx.V.hash()));
  io::write_comment(os, std::string("resonance = ") +
                            (xi.resonant() ? "resonant" : "non-resonant"));
  os << "lambda,R,observed,target,abs_error\n";
  for (double lam : lambdas) {
    const double target = xi(lam);
    std::vector<double> observed(Rs.size());
    parallel_for(Rs.size(), ctx.threads, [&](std::size_t i) {
      observed[i] = limits::cesaro_mean(ctx.V, lam, Rs[i], ctx.num.cesaro_step);
    });
    for (std::size_t i = 0; i < Rs.size(); ++i)
      os << io::format_double(lam) << ',' << io::format_double(Rs[i]) << ','
         << io::format_double(observed[i]) << ',' << io::format_double(target)
         << ',' << io::format_double(std::abs(observed[i] - target)) << '\n';
  }
  ctx.out.write("cesaro.csv", os.str());
}

void run_floor_lemma(RunContext& ctx) {
  const std::string kind = ctx.cfg.get_string("experiment", "h_kind", "exp_decay");
  limits::ProbeFunction h = limits::ProbeFunction::constant(0.0);
  if (kind == "constant") {
    h = limits::ProbeFunction::constant(ctx.cfg.get_double("experiment", "h_limit"));
  } else if (kind == "exp_decay") {
    h = limits::ProbeFunction::exp_decay(
        ctx.cfg.get_double("experiment", "h_limit", 0.3),
        ctx.cfg.get_double("experiment", "h_coeff", 1.0));
  } else if (kind == "damped_sine") {
    h = limits::ProbeFunction::damped_sine(
        ctx.cfg.get_double("experiment", "h_limit", 0.3),
        ctx.cfg.get_double("experiment", "h_coeff", 1.0));
  } else if (kind == "step") {
    h = limits::ProbeFunction::step(
        ctx.cfg.get_double_list("experiment", "h_breaks"),
        ctx.cfg.get_double_list("experiment", "h_values"));
  } else {
    throw io::ConfigError(ctx.cfg.line_of("experiment", "h_kind"),
                          "unknown probe kind '" + kind + "'");
  }
  const auto Rs =
      ctx.cfg.get_double_list("experiment", "r_grid", {50, 100, 200, 500, 1000});
  {
    std::ostringstream os;
    io::write_comment(os, "h = " + h.describe());
    io::write_comment(os, "target = " + io::format_double(h.limit_at_infinity()));
    os << "R,observed,target,abs_error\n";
    for (double R : Rs) {
      const double v = limits::floor_average(h, R);
      os << io::format_double(R) << ',' << io::format_double(v) << ','
         << io::format_double(h.limit_at_infinity()) << ','
         << io::format_double(std::abs(v - h.limit_at_infinity())) << '\n';
    }
    ctx.out.write("floor_average.csv", os.str());
  }
  const auto r_list = ctx.cfg.get_double_list("experiment", "lemma_r_list",
                                              {10, 20, 40, 80, 160, 320, 640});
  const auto g = limits::TestFunction::hat(0.1, 0.9, 0.5);
  const auto families = limits::builtin_lemma_families();
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto report =
        limits::lemma_sequence_check(families[i], g, r_list, ctx.num.quad_tol);
    std::ostringstream os, name;
    report.write_csv(os);
    name << "lemma_family" << i + 1 << ".csv";
    ctx.out.write(name.str(), os.str());
  }
}

void run_trace_check(RunContext& ctx) {
  const double r = ctx.cfg.get_positive("experiment", "r", 10.0);
  const auto n_list = ctx.cfg.get_double_list("experiment", "n_list", {1000, 2000, 4000});
  const std::string f_kind = ctx.cfg.get_string("experiment", "f_kind", "heat");
  trace::TraceFunction f = trace::TraceFunction::heat(1.0);
  if (f_kind == "heat") {
    f = trace::TraceFunction::heat(ctx.cfg.get_positive("experiment", "f_t", 1.0));
  } else if (f_kind == "resolvent") {
    f = trace::TraceFunction::resolvent(
        {ctx.cfg.get_double("experiment", "f_re", 0.0),
         ctx.cfg.get_double("experiment", "f_im", 1.0)});
  } else if (f_kind == "spline") {
    f = trace::TraceFunction::spline(read_test_function(ctx.cfg, "f"));
  } else {
    throw io::ConfigError(ctx.cfg.line_of("experiment", "f_kind"),
                          "unknown trace function kind '" + f_kind + "'");
  }
  std::vector<int> ns;
  std::vector<trace::Residual> rows(n_list.size());
  for (double n : n_list) ns.push_back(static_cast<int>(n));
  parallel_for(ns.size(), ctx.threads, [&](std::size_t i) {
    rows[i] = trace::trace_formula_residual(ctx.V, r, ns[i], f, ctx.num.quad_tol);
  });
  std::ostringstream os;
  io::write_comment(os, "potential = " + ctx.V.describe());
  io::write_comment(os, "r = " + io::format_double(r));
  io::write_comment(os, "f = " + f.describe());
  trace::write_residual_csv(os, ns, rows);
  ctx.out.write("trace.csv", os.str());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectral shift function toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir_flag;
  std::vector<std::string> overrides;
  int threads = 1;
  app.add_option("--config", config_path, "run configuration")->required();
  app.add_option("--out", out_dir_flag, "output directory (overrides [output] dir)");
  app.add_option("--set", overrides, "override section.key=value");
  app.add_option("--threads", threads, "worker threads for grid sweeps");

  static const std::vector<std::string> names = {
      "phase", "spectrum", "ssf", "weak", "cesaro", "floor-lemma", "trace-check"};
  for (const auto& name : names) app.add_subcommand(name);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    io::Config cfg = io::Config::parse_file(config_path);
    for (const auto& ov : overrides) {
      const auto eq = ov.find('=');
      const auto dot = ov.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw io::ConfigError(0, "--set expects section.key=value, got '" + ov + "'");
      cfg.set_override(ov.substr(0, dot), ov.substr(dot + 1, eq - dot - 1),
                       ov.substr(eq + 1));
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();
    const std::string out_dir = !out_dir_flag.empty()
                                    ? out_dir_flag
                                    : cfg.get_string("output", "dir", "out");
    RunContext ctx{std::move(cfg), Potential::zero(), Numerics{}, threads,
                   OutputDir(out_dir)};
    ctx.V = read_potential(ctx.cfg);
    ctx.num = read_numerics(ctx.cfg);
    if (subcommand == "phase")
      run_phase(ctx);
    else if (subcommand == "spectrum")
      run_spectrum(ctx);
    else if (subcommand == "ssf")
      run_ssf(ctx);
    else if (subcommand == "weak")
      run_weak(ctx);
    else if (subcommand == "cesaro")
      run_cesaro(ctx);
    else if (subcommand == "floor-lemma")
      run_floor_lemma(ctx);
    else if (subcommand == "trace-check")
      run_trace_check(ctx);
    ctx.cfg.require_all_consumed();
    ctx.out.manifest(subcommand, ctx.cfg);
    out << "wrote " << ctx.out.artifacts.size() << " artifact(s) to "
        << ctx.out.dir.string() << "\n";
    return 0;
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace specshift::cli
