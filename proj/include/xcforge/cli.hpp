#pragma once

#include "xcforge/core/factorization.hpp"
#include "xcforge/core/io.hpp"
#include "xcforge/core/parallel.hpp"
#include "xcforge/core/slack.hpp"
#include "xcforge/core/types.hpp"
#include "xcforge/cyclic_polygon.hpp"
#include "xcforge/random_pipeline.hpp"
#include "xcforge/separation.hpp"

#include <CLI11.hpp>
#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace xcforge::cli {

inline constexpr const char* version = "0.1.0";

enum ExitCode { kPass = 0, kUsage = 1, kFailed = 2 };

// dense CSV dumps above this many entries are skipped
inline constexpr double csv_entry_limit = 2.5e7;

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  bool ok = true;
};

inline std::string fmt(double v, int prec = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

// standalone scatter plot; failed runs drawn as red crosses, optional bound curve dashed
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotPoint>& pts, const std::function<double(double)>& bound = {},
                            const std::string& bound_label = "") {
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 55;
  double xmax = 1.0, ymax = 0.0, ymin = 0.0;
  for (const auto& p : pts) {
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
    ymin = std::min(ymin, p.y);
  }
  xmax *= 1.05;
  if (bound) ymax = std::max(ymax, bound(xmax));
  ymax *= 1.1;
  ymin *= 1.1;
  if (ymax - ymin <= 0.0) ymax = 1.0;
  auto X = [&](double x) { return ml + (W - ml - mr) * x / xmax; };
  auto Y = [&](double y) { return H - mb - (H - mt - mb) * (y - ymin) / (ymax - ymin); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmax * i / 5, yv = ymin + (ymax - ymin) * i / 5;
    s << "<text x=\"" << fmt(X(xv)) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">" << fmt(xv, 1) << "</text>\n";
    s << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(Y(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv, 1) << "</text>\n";
  }
  s << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  s << "<text x=\"16\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";
  if (bound) {
    s << "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"6,4\" points=\"";
    for (int i = 0; i <= 100; ++i) {
      const double xv = xmax * i / 100;
      s << fmt(X(xv)) << ',' << fmt(Y(bound(xv))) << ' ';
    }
    s << "\"/>\n";
    s << "<text x=\"" << W - mr - 4 << "\" y=\"" << fmt(Y(bound(xmax)) - 6) << "\" text-anchor=\"end\" fill=\"gray\">"
      << bound_label << "</text>\n";
  }
  for (const auto& p : pts) {
    if (p.ok) {
      s << "<circle cx=\"" << fmt(X(p.x)) << "\" cy=\"" << fmt(Y(p.y)) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    } else {
      const double cx = X(p.x), cy = Y(p.y);
      s << "<path d=\"M" << fmt(cx - 4) << ',' << fmt(cy - 4) << " L" << fmt(cx + 4) << ',' << fmt(cy + 4) << " M"
        << fmt(cx - 4) << ',' << fmt(cy + 4) << " L" << fmt(cx + 4) << ',' << fmt(cy - 4) << "\" stroke=\"crimson\" stroke-width=\"2\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline json versions() {
  std::ostringstream eigen, boost;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  return json{{"xcforge", version},
              {"eigen", eigen.str()},
              {"boost", boost.str()},
              {"cli11", CLI11_VERSION},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                    "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", __VERSION__}};
}

// Files of one invocation. Everything goes through atomic_write; the manifest comes last.
class Output {
 public:
  Output(std::filesystem::path dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {}

  void write(const std::string& suffix, const std::string& content) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / (stem_ + suffix);
    atomic_write(path, content);
    written_.push_back(path.string());
  }
  void write_json(const std::string& suffix, const json& j) { write(suffix, j.dump(2) + "\n"); }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::string stem_;
  std::vector<std::string> written_;
};

struct Common {
  std::string out_dir = "xcforge_out";
  bool csv = false;
};

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  sub->add_flag("--csv", c.csv, "also dump M, T, U (or the table) as CSV");
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool csv_fits(const Matrix& M) { return static_cast<double>(M.size()) <= csv_entry_limit; }

// ---- random ----

struct RandomArgs {
  Common common;
  int dim = 2;
  std::vector<long long> n;
  std::string mode = "sphere";
  std::vector<std::uint64_t> seeds{1};
  std::optional<double> eps;
  double tol = 1e-8;
  double near_factor = 5.0;
};

inline int cmd_random(const RandomArgs& a, json& report, Output& out, std::ostream& log) {
  report["config"] = {{"dim", a.dim}, {"n", a.n}, {"mode", a.mode}, {"seeds", a.seeds}, {"tol", a.tol}, {"near_factor", a.near_factor}};
  if (a.eps) report["config"]["eps"] = *a.eps;
  report["runs"] = json::array();
  std::vector<PlotPoint> pts;
  bool all_ok = true;
  for (long long n : a.n)
    for (std::uint64_t seed : a.seeds) {
      PipelineConfig cfg;
      cfg.d = a.dim;
      cfg.n = n;
      cfg.mode = a.mode == "ball" ? SampleMode::Ball : SampleMode::Sphere;
      cfg.seed = seed;
      cfg.epsilon = a.eps;
      cfg.tol = a.tol;
      cfg.near_factor = a.near_factor;
      cfg.keep_factors = a.common.csv;
      try {
        cfg.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      json j;
      const std::string tag = "_n" + std::to_string(n) + "_s" + std::to_string(seed);
      try {
        auto run = xc_factorize_random(cfg);
        j = report_to_json(run.report);
        if (a.common.csv && run.factors) {
          const Matrix M = slack_matrix(run.polytope).entries;
          if (csv_fits(M)) {
            const auto F = run.factors->to_dense();
            out.write(tag + "_M.csv", matrix_to_csv(M));
            out.write(tag + "_T.csv", matrix_to_csv(F.T));
            out.write(tag + "_U.csv", matrix_to_csv(F.U));
          } else {
            j["csv_skipped"] = "slack matrix exceeds the CSV size limit";
          }
        }
      } catch (const PipelineFailure& e) {
        j = report_to_json(e.report());
      } catch (const Error& e) {
        j = {{"samples", n}, {"seed", seed}, {"ok", false}, {"failure", {{"code", to_string(e.code())}, {"message", e.what()}}}};
      }
      const bool ok = j.value("ok", false);
      all_ok = all_ok && ok;
      log << "random n=" << n << " seed=" << seed << ": " << (ok ? "ok" : "FAILED") << " r_total=" << j.value("r_total", 0LL)
          << "\n";
      pts.push_back({std::sqrt(cfg.nominal_n()), static_cast<double>(j.value("r_total", 0LL)), ok});
      report["runs"].push_back(std::move(j));
    }
  report["ok"] = all_ok;
  out.write(".svg", svg_plot("random " + a.mode + " d=" + std::to_string(a.dim), "sqrt(n)", "r_total", pts));
  return all_ok ? kPass : kFailed;
}

// ---- cyclic ----

struct CyclicArgs {
  Common common;
  std::string angles_file;
  std::vector<std::size_t> uniform, clustered;
  std::vector<std::uint64_t> seeds{1};
  double tol = 1e-6;
};

inline std::vector<double> parse_angles(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<double> a;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      a.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad angle '" + tok + "'");
    }
  }
  return a;
}

inline int cmd_cyclic(const CyclicArgs& a, json& report, Output& out, std::ostream& log) {
  const int sources = !a.angles_file.empty() + !a.uniform.empty() + !a.clustered.empty();
  if (sources != 1) throw UsageError("give exactly one of --angles, --uniform, --clustered");
  report["config"] = {{"seeds", a.seeds}, {"tol", a.tol}};
  struct Job {
    std::string model;
    std::size_t n;
    std::uint64_t seed;
    std::vector<double> angles;
  };
  std::vector<Job> jobs;
  if (!a.angles_file.empty()) {
    report["config"]["angles"] = a.angles_file;
    std::string text;
    try {
      text = read_file(a.angles_file);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    auto ang = parse_angles(text);
    jobs.push_back({"file", ang.size(), 0, std::move(ang)});
  }
  for (std::size_t n : a.uniform)
    for (auto s : a.seeds) jobs.push_back({"uniform", n, s, {}});
  for (std::size_t n : a.clustered)
    for (auto s : a.seeds) jobs.push_back({"clustered", n, s, {}});
  if (!a.uniform.empty()) report["config"]["uniform"] = a.uniform;
  if (!a.clustered.empty()) report["config"]["clustered"] = a.clustered;

  report["runs"] = json::array();
  std::vector<PlotPoint> pts;
  bool all_ok = true;
  for (auto& job : jobs) {
    if (job.model != "file") {
      if (job.n < 3) throw UsageError("a polygon needs at least 3 vertices");
      job.angles = random_angles(job.n, job.model == "uniform" ? AngleModel::Uniform : AngleModel::Clustered, job.seed);
    }
    Polytope P;
    try {
      P = make_cyclic_polygon(job.angles);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    CyclicOptions opt;
    opt.tol = a.tol;
    opt.keep_factors = a.common.csv;
    json j;
    try {
      auto run = xc_factorize_cyclic(P, opt);
      j = cyclic_report_to_json(run.report);
      if (a.common.csv && run.factors) {
        const std::string tag = "_" + job.model + "_n" + std::to_string(job.n) + "_s" + std::to_string(job.seed);
        const Matrix M = slack_matrix(P).entries;
        if (csv_fits(M)) {
          const auto F = run.factors->to_dense();
          out.write(tag + "_M.csv", matrix_to_csv(M));
          out.write(tag + "_T.csv", matrix_to_csv(F.T));
          out.write(tag + "_U.csv", matrix_to_csv(F.U));
        } else {
          j["csv_skipped"] = "slack matrix exceeds the CSV size limit";
        }
      }
    } catch (const CyclicFailure& e) {
      j = cyclic_report_to_json(e.report());
    } catch (const Error& e) {
      j = {{"n", job.n}, {"ok", false}, {"failure", {{"code", to_string(e.code())}, {"message", e.what()}}}};
    }
    j["model"] = job.model;
    j["seed"] = job.seed;
    const bool ok = j.value("ok", false);
    all_ok = all_ok && ok;
    log << "cyclic " << job.model << " n=" << job.n << " seed=" << job.seed << ": " << (ok ? "ok" : "FAILED")
        << " r_total=" << j.value("r_total", 0LL) << "\n";
    pts.push_back({std::sqrt(static_cast<double>(job.n)), static_cast<double>(j.value("r_total", 0LL)), ok});
    report["runs"].push_back(std::move(j));
  }
  report["ok"] = all_ok;
  out.write(".svg", svg_plot("cyclic polygons", "sqrt(n)", "r_total", pts, [](double x) { return 24.0 * x; }, "24 sqrt(n)"));
  return all_ok ? kPass : kFailed;
}

// ---- separation ----

struct SeparationArgs {
  Common common;
  std::vector<int> r_list;
  int max_elim = 8;
};

inline int cmd_separation(const SeparationArgs& a, json& report, Output& out, std::ostream& log) {
  for (int r : a.r_list)
    if (r < 4) throw UsageError("r = " + std::to_string(r) + " is below 4");
  report["config"] = {{"r_list", a.r_list}, {"max_elim", a.max_elim}};
  RatioReport rep;
  try {
    rep = ratio_report(a.r_list, a.max_elim);
  } catch (const Error& e) {
    report["ok"] = false;
    report["failure"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    log << "separation FAILED: " << e.what() << "\n";
    return kFailed;
  }
  report["rows"] = json::array();
  std::ostringstream csv;
  csv << "r,s,support,rank_exact,rank_upper,nnr_lower,rectangle_log2,ratio_log2\n";
  csv << std::setprecision(17);
  log << std::left << std::setw(6) << "r" << std::setw(24) << "support" << std::setw(24) << "rank" << std::setw(16)
      << "nnr_lower" << "ratio_log2\n";
  std::vector<PlotPoint> pts;
  for (const auto& b : rep.rows) {
    report["rows"].push_back(bound_chain_to_json(b));
    csv << b.r << ',' << b.s << ',' << b.support_count << ',' << b.rank_exact << ',' << b.rank_upper << ',' << b.nnr_lower
        << ',' << b.rectangle_log2.convert_to<double>() << ',' << b.ratio_log2 << '\n';
    log << std::left << std::setw(6) << b.r << std::setw(24) << b.support_count.str() << std::setw(24) << b.rank_exact.str()
        << std::setw(16) << b.nnr_lower.str() << b.ratio_log2 << "\n";
    pts.push_back({static_cast<double>(b.r), b.ratio_log2 / b.r, true});
  }
  report["increasing"] = rep.increasing;
  report["ok"] = true;
  if (a.common.csv) out.write(".csv", csv.str());
  out.write(".svg", svg_plot("separation ratio", "r", "ratio_log2 / r", pts));
  return kPass;
}

// ---- verify ----

struct VerifyArgs {
  Common common;
  std::string matrix, t, u;
  double tol = 1e-8;
};

inline int cmd_verify(const VerifyArgs& a, json& report, Output&, std::ostream& log) {
  report["config"] = {{"matrix", a.matrix}, {"t", a.t}, {"u", a.u}, {"tol", a.tol}};
  Matrix M;
  NonnegFactorization F;
  try {
    M = matrix_from_csv(read_file(a.matrix));
    F.T = matrix_from_csv(read_file(a.t));
    F.U = matrix_from_csv(read_file(a.u));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  FactorReport r;
  try {
    r = verify_factorization(M, F, a.tol);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  report["shape"] = {M.rows(), M.cols()};
  report["r"] = r.r;
  report["max_abs_err"] = r.max_abs_err;
  report["rel_err"] = r.rel_err;
  report["nonnegative"] = r.nonnegative;
  report["ok"] = r.pass;
  log << "verify: r=" << r.r << " max_abs_err=" << r.max_abs_err << " nonnegative=" << r.nonnegative << " -> "
      << (r.pass ? "pass" : "FAIL") << "\n";
  return r.pass ? kPass : kFailed;
}

// ---- hexagon-demo ----

struct HexagonArgs {
  Common common;
  double tol = 1e-8;
  int restarts = 32;
  std::uint64_t seed = 1;
};

inline json matrix_to_json(const Matrix& M) {
  json j = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    j.push_back(std::move(row));
  }
  return j;
}

inline int cmd_hexagon(const HexagonArgs& a, json& report, Output& out, std::ostream& log) {
  if (!(a.tol > 0.0) || a.restarts < 1) throw UsageError("tol and restarts must be positive");
  report["config"] = {{"tol", a.tol}, {"restarts", a.restarts}, {"seed", a.seed}};
  AnlsOptions opt;
  opt.restarts = a.restarts;
  opt.seed = a.seed;
  const auto d = hexagon_demo(a.tol, opt);
  const bool ok = d.pass && d.r == 5;
  report["M"] = matrix_to_json(d.M);
  report["rank_M"] = d.rank_M;
  report["r"] = d.r;
  report["max_abs_err"] = d.max_abs_err;
  report["best_err_by_rank"] = d.best_err_by_rank;
  report["T"] = matrix_to_json(d.F.T);
  report["U"] = matrix_to_json(d.F.U);
  report["ok"] = ok;
  if (a.common.csv) {
    out.write("_M.csv", matrix_to_csv(d.M));
    out.write("_T.csv", matrix_to_csv(d.F.T));
    out.write("_U.csv", matrix_to_csv(d.F.U));
  }
  log << "hexagon: rank(M)=" << d.rank_M << " nonnegative factorization at r=" << d.r << " max_abs_err=" << d.max_abs_err
      << (ok ? "" : " FAILED") << "\n";
  return ok ? kPass : kFailed;
}

// ---- entry ----

inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"extension complexity factorizations and the rank separation matrix", "xcforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version);

  RandomArgs ra;
  auto* s_random = app.add_subcommand("random", "random sphere/ball polytope pipeline");
  s_random->add_option("--dim", ra.dim, "2 or 3")->required()->check(CLI::IsMember({2, 3}));
  s_random->add_option("--n", ra.n, "sample size(s), comma separated")->required()->delimiter(',')->check(CLI::PositiveNumber);
  s_random->add_option("--mode", ra.mode)->check(CLI::IsMember({"sphere", "ball"}))->capture_default_str();
  s_random->add_option("--seed", ra.seeds, "seed(s), comma separated")->delimiter(',');
  s_random->add_option("--eps", ra.eps, "cap radius");
  s_random->add_option("--tol", ra.tol)->capture_default_str();
  s_random->add_option("--near-factor", ra.near_factor)->capture_default_str();
  add_common(s_random, ra.common);

  CyclicArgs ca;
  auto* s_cyclic = app.add_subcommand("cyclic", "cyclic polygon pipeline");
  s_cyclic->add_option("--angles", ca.angles_file, "file of sorted angles in [0, 2pi)");
  s_cyclic->add_option("--uniform", ca.uniform, "n, comma separated")->delimiter(',');
  s_cyclic->add_option("--clustered", ca.clustered, "n, comma separated")->delimiter(',');
  s_cyclic->add_option("--seed", ca.seeds, "seed(s), comma separated")->delimiter(',');
  s_cyclic->add_option("--tol", ca.tol)->capture_default_str();
  add_common(s_cyclic, ca.common);

  SeparationArgs sa;
  auto* s_sep = app.add_subcommand("separation", "rank vs nonnegative rank separation table");
  s_sep->add_option("--r-list", sa.r_list, "r values, comma separated")->required()->delimiter(',');
  s_sep->add_option("--max-elim", sa.max_elim, "largest r cross-checked by exact elimination")->capture_default_str();
  add_common(s_sep, sa.common);

  VerifyArgs va;
  auto* s_verify = app.add_subcommand("verify", "check M = T U with T, U >= 0");
  s_verify->add_option("--matrix", va.matrix)->required();
  s_verify->add_option("--t", va.t)->required();
  s_verify->add_option("--u", va.u)->required();
  s_verify->add_option("--tol", va.tol)->capture_default_str();
  add_common(s_verify, va.common);

  HexagonArgs ha;
  auto* s_hex = app.add_subcommand("hexagon-demo", "rank-5 nonnegative factorization of the regular hexagon");
  s_hex->add_option("--tol", ha.tol)->capture_default_str();
  s_hex->add_option("--restarts", ha.restarts)->capture_default_str();
  s_hex->add_option("--seed", ha.seed)->capture_default_str();
  add_common(s_hex, ha.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, log, err) == 0 ? kPass : kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const Common& common = *s_random ? ra.common : *s_cyclic ? ca.common : *s_sep ? sa.common : *s_verify ? va.common : ha.common;
  Output out(common.out_dir, name);
  json report{{"subcommand", name}};
  int code = kPass;
  try {
    if (*s_random) code = cmd_random(ra, report, out, log);
    else if (*s_cyclic) code = cmd_cyclic(ca, report, out, log);
    else if (*s_sep) code = cmd_separation(sa, report, out, log);
    else if (*s_verify) code = cmd_verify(va, report, out, log);
    else code = cmd_hexagon(ha, report, out, log);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    out.write_json(".json", report);
    json manifest{{"subcommand", name},
                  {"config", report.value("config", json::object())},
                  {"versions", versions()},
                  {"threads", thread_count()},
                  {"outputs", out.written()},
                  {"started_at", started},
                  {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                  {"exit_code", code}};
    if (*s_random || *s_cyclic) manifest["seed"] = *s_random ? ra.seeds : ca.seeds;
    if (*s_hex) manifest["seed"] = ha.seed;
    out.write_json(".manifest.json", manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}

}  // namespace xcforge::cli
