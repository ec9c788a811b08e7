#include "ratetol/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ratetol/errors.hpp"
#include "ratetol/gps_model.hpp"
#include "ratetol/problem_file.hpp"
#include "ratetol/rate_distortion.hpp"
#include "ratetol/rate_tolerance.hpp"
#include "ratetol/reproduction.hpp"
#include "report.hpp"

namespace ratetol {

namespace {

using cli::Report;
using cli::format_number;
using cli::number;

struct SharedFlags {
  double tol = 1e-10;
  std::size_t max_iter = 1'000'000;
  std::string format = "text";
  std::string output;

  SolverOptions solver() const {
    SolverOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return o;
  }
  cli::Format parsed_format() const {
    if (format == "csv") return cli::Format::kCsv;
    if (format == "json" || format == "json-like-tree") return cli::Format::kJson;
    return cli::Format::kText;
  }
};

std::size_t label_index(const Alphabet& a, const std::string& label, const char* what) {
  const auto& labels = a.labels();
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw ValidationError(std::string(what) + ": no symbol labelled \"" + label + "\"");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

Report distribution_table(const Alphabet& a, const Distribution& q, const char* column) {
  Report rows = Report::array();
  for (std::size_t j = 0; j < q.size(); ++j) {
    rows.push_back({{"symbol", a.labels()[j]}, {column, number(q[j])}});
  }
  return rows;
}

// ---- info -----------------------------------------------------------------

struct InfoArgs {
  std::string problem;
  std::string channel;
  std::string column;
};

Report cmd_info(const InfoArgs& args) {
  const ProblemFile pf = load_problem(args.problem);
  const Distribution& p = pf.source();
  Report r;
  r["entropy_bits"] = number(entropy(p));

  std::optional<Channel> ch;
  if (!args.channel.empty()) {
    ch = load_channel(args.channel);
    if (ch->inputs() != p.size() || ch->outputs() != pf.alphabet_y().size()) {
      throw ValidationError("channel: shape " + std::to_string(ch->inputs()) + "x" +
                            std::to_string(ch->outputs()) + " does not match alphabets " +
                            std::to_string(p.size()) + "x" +
                            std::to_string(pf.alphabet_y().size()));
    }
    r["shannon_mi_bits"] = number(shannon_mutual_information(p, *ch));
  }

  if (!pf.similarity_spec()) {
    if (!args.column.empty()) throw ValidationError("--column needs a similarity field");
    return r;
  }
  const SimilarityCover& cover = pf.similarity();
  if (ch) r["generalized_mi_bits"] = cli::bits(generalized_mutual_information(p, *ch, cover));

  std::vector<std::size_t> columns;
  if (!args.column.empty()) {
    columns.push_back(label_index(pf.alphabet_y(), args.column, "--column"));
  } else {
    for (std::size_t j = 0; j < cover.cols(); ++j) columns.push_back(j);
  }

  Report sets = Report::array();
  Report predictive = Report::array();
  for (std::size_t j : columns) {
    const Membership m = cover.column(j);
    const double q = logical_probability(p, m);
    const std::string& yl = pf.alphabet_y().labels()[j];
    Report row{{"y", yl}, {"logical_probability", number(q)}};
    row["kullback_bits"] = q > 0.0 ? number(kullback_information(p, m)) : Report("undefined");
    sets.push_back(std::move(row));
    for (std::size_t i = 0; i < m.size(); ++i) {
      Report cell{{"x", pf.alphabet_x().labels()[i]}, {"y", yl}, {"membership", number(m[i])}};
      cell["predictive_bits"] =
          q > 0.0 ? cli::bits(predictive_information(m[i], q)) : Report("undefined");
      predictive.push_back(std::move(cell));
    }
  }
  r["sets"] = std::move(sets);
  r["predictive"] = std::move(predictive);
  return r;
}

// ---- gps ------------------------------------------------------------------

struct GpsArgs {
  std::optional<double> drms, drms2, cep;
  std::optional<double> center;
  std::optional<double> fact;
  std::string prior;
  bool optimize = false;
  std::vector<double> centers, sigmas, evidence;
};

Report cmd_gps(const GpsArgs& args) {
  const int given = args.drms.has_value() + args.drms2.has_value() + args.cep.has_value();
  if (given != 1) throw ValidationError("exactly one of --drms, --2drms, --cep is required");
  const AccuracySpec spec = args.drms    ? AccuracySpec(AccuracyKind::kDrms, *args.drms)
                            : args.drms2 ? AccuracySpec(AccuracyKind::k2Drms, *args.drms2)
                                         : AccuracySpec(AccuracyKind::kCep, *args.cep);
  const double sigma = accuracy_to_sigma(spec);
  Report r;
  r["accuracy"] = args.drms ? "DRMS" : args.drms2 ? "2DRMS" : "CEP";
  r["radius"] = number(spec.radius);
  r["sigma"] = number(sigma);

  const bool needs_coords = args.center || args.fact || args.optimize;
  if (!needs_coords) return r;
  if (args.prior.empty()) {
    throw ValidationError("--prior is required for coordinates (--center, --fact, --optimize)");
  }
  const ProblemFile pf = load_problem(args.prior);
  const Alphabet& a = pf.alphabet_x();
  const Distribution& p = pf.source();

  if (args.center) {
    const GaussianConfusion model(*args.center, sigma);
    const Membership col = confusion_column(a, model);
    const double q = logical_probability(p, col);
    r["center"] = number(*args.center);
    Report rows = Report::array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      rows.push_back({{"x", a.labels()[i]}, {"value", number(a.value(i))}, {"confusion", number(col[i])}});
    }
    r["confusion"] = std::move(rows);
    r["logical_probability"] = number(q);
    if (args.fact) {
      if (!(q > 0.0)) throw ZeroLogicalProbabilityError("gps: Q(A_j) underflows to zero");
      const double m = confusion(*args.fact, model);
      r["fact"] = number(*args.fact);
      r["membership_at_fact"] = number(m);
      r["predictive_bits"] = cli::bits(predictive_information(m, q));
    }
  } else if (args.fact) {
    throw ValidationError("--fact needs --center");
  }

  if (args.optimize) {
    if (args.evidence.empty()) throw ValidationError("--optimize needs --evidence");
    if (args.evidence.size() != a.size()) {
      throw ValidationError("--evidence has " + std::to_string(args.evidence.size()) +
                            " entries but the prior has " + std::to_string(a.size()));
    }
    const Distribution evidence(args.evidence);
    const std::vector<double> centers = args.centers.empty() ? a.values() : args.centers;
    const std::vector<double> sigmas = args.sigmas.empty() ? std::vector<double>{sigma} : args.sigmas;
    const ForecastChoice best = optimize_forecast(evidence, p, centers, sigmas, a);
    r["optimum"] = {{"center", number(best.center)},
                    {"sigma", number(best.sigma)},
                    {"score_bits", cli::bits(best.value)}};
  }
  return r;
}

// ---- rd -------------------------------------------------------------------

struct RdArgs {
  std::string problem;
  double s_min = -10.0;
  double s_max = 0.0;
  std::size_t s_steps = 51;
  std::string grid = "linear";
};

std::vector<double> slope_grid(const RdArgs& a) {
  if (!(a.s_min <= a.s_max) || !(a.s_max <= 0.0) || !std::isfinite(a.s_min)) {
    throw ValidationError("slope range must satisfy s-min <= s-max <= 0");
  }
  if (a.s_steps == 0) throw ValidationError("--s-steps must be positive");
  if (a.s_steps == 1) {
    if (a.s_min != a.s_max) throw ValidationError("--s-steps 1 needs s-min = s-max");
    return {a.s_min};
  }
  std::vector<double> s(a.s_steps);
  const double last = static_cast<double>(a.s_steps - 1);
  if (a.grid == "geometric") {
    if (!(a.s_max < 0.0)) throw ValidationError("geometric grid needs s-max < 0");
    const double ratio = std::log(a.s_max / a.s_min) / last;
    for (std::size_t k = 0; k < a.s_steps; ++k) {
      s[k] = a.s_min * std::exp(ratio * static_cast<double>(k));
    }
  } else {
    for (std::size_t k = 0; k < a.s_steps; ++k) {
      s[k] = a.s_min + (a.s_max - a.s_min) * static_cast<double>(k) / last;
    }
  }
  s.front() = a.s_min;
  s.back() = a.s_max;
  return s;
}

// Outputs leaving the support decay geometrically and can sit just above
// the solver's floor when it stops; they are not counted.
constexpr double kSupportThreshold = 1e-6;

std::size_t support_size(const Distribution& q) {
  return static_cast<std::size_t>(
      std::count_if(q.begin(), q.end(), [](double v) { return v > kSupportThreshold; }));
}

std::string cmd_rd(const RdArgs& args, const SharedFlags& flags) {
  const ProblemFile pf = load_problem(args.problem);
  const DistortionMatrix& d = pf.distortion();
  const std::vector<double> grid = slope_grid(args);
  const std::vector<RDPoint> curve = rd_curve(pf.source(), d, grid, flags.solver());

  if (flags.parsed_format() == cli::Format::kJson) {
    Report rows = Report::array();
    for (const auto& pt : curve) {
      rows.push_back({{"s", number(pt.s)},
                      {"D", number(pt.distortion)},
                      {"R_bits", number(pt.rate_bits)},
                      {"support", support_size(pt.q)}});
    }
    return cli::render_json(Report{{"curve", std::move(rows)}});
  }
  std::string out = "s,D,R_bits,support\n";
  for (const auto& pt : curve) {
    out += format_number(pt.s) + "," + format_number(pt.distortion) + "," +
           format_number(pt.rate_bits) + "," + std::to_string(support_size(pt.q)) + "\n";
  }
  return out;
}

// ---- rt -------------------------------------------------------------------

Report cmd_rt(const std::string& problem, const SharedFlags& flags) {
  const ProblemFile pf = load_problem(problem);
  const ToleranceCover cover = pf.tolerance_cover();
  const ToleranceSolution sol = rate_tolerance(pf.source(), cover, flags.solver());
  Report r;
  r["cover"] = cover.clear() ? "clear" : "fuzzy";
  r["rate_tolerance_bits"] = number(sol.rate_bits);
  r["h_star_bits"] = number(sol.h_star_bits);
  r["iterations"] = sol.iterations;
  r["q"] = distribution_table(pf.alphabet_y(), sol.q, "q");
  if (!cover.clear()) return r;

  if (const auto radius = cover.ball_radius()) {
    const double dc = *radius * *radius;
    r["dc"] = number(dc);
    r["complexity_distortion_bits"] = number(
        complexity_distortion(pf.source(), pf.alphabet_x(), pf.alphabet_y(), dc, flags.solver())
            .rate_bits);
  }
  try {
    r["structure_function_bits"] = number(structure_function(cover));
  } catch (const UnequalBallError& e) {
    r["structure_function"] = std::string("not defined: ") + e.what();
  }
  return r;
}

// ---- reproduce ------------------------------------------------------------

Report cell_rows(const std::vector<TableCell>& cells) {
  Report rows = Report::array();
  for (const auto& c : cells) {
    Report row{{"row", c.row}, {"quantity", c.column}};
    row["reference"] = c.reference ? number(*c.reference) : Report("-");
    row["recomputed"] = number(c.recomputed);
    row["status"] = c.agrees() ? "agree" : c.gated ? "DISAGREE" : "disagree (reported)";
    rows.push_back(std::move(row));
  }
  return rows;
}

Report cmd_reproduce(const SharedFlags& flags, bool& passed) {
  const ReproductionReport rep = reproduce_example(flags.solver());
  Report r;
  r["tolerance_code"] = cell_rows(rep.tolerance_code);
  r["distortion_code"] = cell_rows(rep.distortion_code);
  const EquivalenceReport& eq = rep.equivalence;
  Report chain;
  chain["rate_tolerance_bits"] = number(eq.rate_tolerance_bits);
  chain["rate_distortion_at_zero_bits"] = number(eq.rate_distortion_at_zero_bits);
  chain["zero_limit_slope"] = number(eq.zero_limit_slope);
  if (eq.complexity_distortion_bits) {
    chain["complexity_distortion_bits"] = number(*eq.complexity_distortion_bits);
  }
  Report checks = Report::array();
  for (const auto& c : eq.checks) {
    checks.push_back({{"check", c.name},
                      {"delta", number(c.delta)},
                      {"threshold", number(c.threshold)},
                      {"result", c.passed ? "pass" : "FAIL"}});
  }
  chain["checks"] = std::move(checks);
  r["equivalence"] = std::move(chain);
  r["rate_distortion_at_one"] = {
      {"interpolated_bits", number(rep.rd_one_interpolated_bits)},
      {"bracket_low_D", number(rep.rd_one_bracket_low)},
      {"bracket_high_D", number(rep.rd_one_bracket_high)},
      {"bisected_bits", number(rep.rd_one_bisected_bits)},
      {"reference_bits", number(0.369)},
      {"complexity_distortion_bits", number(rep.complexity_distortion_one_bits)},
      {"gap_bits", number(rep.complexity_distortion_one_bits - rep.rd_one_interpolated_bits)}};
  Report gates = Report::array();
  for (const auto& g : rep.gates) {
    gates.push_back({{"gate", g.name}, {"result", g.passed ? "PASS" : "FAIL"}, {"detail", g.detail}});
  }
  r["gates"] = std::move(gates);
  passed = rep.passed();
  r["result"] = passed ? "PASS" : "FAIL";
  return r;
}

void emit(const std::string& text, const SharedFlags& flags, std::ostream& out) {
  if (flags.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(flags.output, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cannot write " + flags.output);
  file << text;
  if (!file) throw ValidationError("write failed for " + flags.output);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate distortion, rate tolerance and semantic information measures", "ratetol"};
  app.require_subcommand(1);
  app.fallthrough();

  SharedFlags flags;
  app.add_option("--tol", flags.tol, "Solver convergence tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iter", flags.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--format", flags.format, "Report format")
      ->check(CLI::IsMember({"text", "csv", "json", "json-like-tree"}));
  app.add_option("--output", flags.output, "Write the report to this file");

  InfoArgs info;
  auto* info_cmd = app.add_subcommand("info", "Entropy, mutual information and predictive tables");
  info_cmd->add_option("problem", info.problem, "Problem file")->required();
  info_cmd->add_option("--channel", info.channel, "Channel file");
  info_cmd->add_option("--column", info.column, "Restrict to one destination label");

  GpsArgs gps;
  auto* gps_cmd = app.add_subcommand("gps", "Gaussian confusion model from an accuracy spec");
  gps_cmd->add_option("--drms", gps.drms, "DRMS radius");
  gps_cmd->add_option("--2drms", gps.drms2, "2DRMS radius");
  gps_cmd->add_option("--cep", gps.cep, "CEP radius");
  gps_cmd->add_option("--center", gps.center, "Predicted coordinate");
  gps_cmd->add_option("--fact", gps.fact, "Observed coordinate to score");
  gps_cmd->add_option("--prior", gps.prior, "Problem file giving coordinates and prior");
  gps_cmd->add_flag("--optimize", gps.optimize, "Search a grid of centers and sigmas");
  gps_cmd->add_option("--centers", gps.centers, "Candidate centers")->delimiter(',');
  gps_cmd->add_option("--sigmas", gps.sigmas, "Candidate sigmas")->delimiter(',');
  gps_cmd->add_option("--evidence", gps.evidence, "Evidence distribution")->delimiter(',');

  RdArgs rd;
  auto* rd_cmd = app.add_subcommand("rd", "Rate distortion curve as CSV");
  rd_cmd->add_option("problem", rd.problem, "Problem file")->required();
  rd_cmd->add_option("--s-min", rd.s_min, "Most negative slope");
  rd_cmd->add_option("--s-max", rd.s_max, "Least negative slope");
  rd_cmd->add_option("--s-steps", rd.s_steps, "Number of grid points");
  rd_cmd->add_option("--grid", rd.grid, "Grid spacing")
      ->check(CLI::IsMember({"linear", "geometric"}));

  std::string rt_problem;
  auto* rt_cmd = app.add_subcommand("rt", "Rate tolerance of a cover");
  rt_cmd->add_option("problem", rt_problem, "Problem file")->required();

  auto* repro_cmd = app.add_subcommand("reproduce", "Rebuild the 4-symbol coding example");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    int code = kExitOk;
    std::string text;
    const cli::Format format = flags.parsed_format();
    if (*info_cmd) {
      text = cli::render(cmd_info(info), format);
    } else if (*gps_cmd) {
      text = cli::render(cmd_gps(gps), format);
    } else if (*rd_cmd) {
      text = cmd_rd(rd, flags);
    } else if (*rt_cmd) {
      text = cli::render(cmd_rt(rt_problem, flags), format);
    } else if (*repro_cmd) {
      bool passed = false;
      text = cli::render(cmd_reproduce(flags, passed), format);
      if (!passed) code = kExitReproductionFailed;
    }
    emit(text, flags, out);
    if (code == kExitReproductionFailed) err << "error: reproduction check failed\n";
    return code;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << " at s = " << format_number(e.slope()) << " after "
        << e.iterations() << " iterations\n";
    return kExitNonConvergence;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace ratetol
