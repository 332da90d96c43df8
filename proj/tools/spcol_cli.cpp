#include "CLI11.hpp"

#include "spcol/adaptive.hpp"
#include "spcol/analysis.hpp"
#include "spcol/transform1d.hpp"
#include "spcol/uq.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace spcol;

namespace {

// flat key=value config; command-line flags override (they come later and
// every option takes the last value)
std::vector<std::string> config_tokens(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    tokens.push_back("--" + key);
    tokens.push_back(val);
  }
  return tokens;
}

double max_grid_diff(const Grid1D& a, const Grid1D& b)
{
  double worst = 0;
  for (int n = a.min_level(); n <= a.N(); ++n) {
    const auto& la = a.level(n);
    const auto& lb = b.level(n);
    for (std::size_t i = 0; i < la.size(); ++i)
      worst = std::max(worst, std::abs(la[i] - lb[i]));
  }
  return worst;
}

std::pair<int, int> parse_range(const std::string& s)
{
  auto colon = s.find(':');
  if (colon == std::string::npos) {
    int n = std::stoi(s);
    return {n, n};
  }
  return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

CritNorm parse_norm(const std::string& s)
{
  if (s == "l1") return CritNorm::L1;
  if (s == "l2") return CritNorm::L2;
  if (s == "linf") return CritNorm::Linf;
  throw CLI::ValidationError("--criterion", "expected l1, l2 or linf");
}

struct Out {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Out(const std::string& path)
  {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw CLI::ValidationError("--out", "cannot open " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

int cmd_families(bool verify, const std::string& dump)
{
  if (!dump.empty()) {
    make_family(dump)->dump(std::cout);
    return 0;
  }
  if (verify) {
    // construction re-derives and checks the rational duality tables; a
    // round trip exercises the pyramid transform
    int failures = 0;
    for (const auto& id : catalogue_ids()) {
      auto fam = make_family(id);
      Sampler1D f = [](const SidedPoint& x, int deriv) {
        double t = x.value();
        return std::pow(1.3, deriv) * std::exp(1.3 * t);
      };
      auto v = sample_grid(f, fam, 4, false);
      auto back = surplus_to_values(values_to_surplus(v));
      bool ok = max_grid_diff(v, back) <= 1e-12;
      std::cout << id << "," << (ok ? "ok" : "FAIL") << "\n";
      failures += !ok;
    }
    return failures ? 1 : 0;
  }
  std::cout << "id,P,M,K,anchors\n";
  for (const auto& id : catalogue_ids()) {
    auto fam = make_family(id);
    std::cout << id << "," << fam->P() << "," << fam->M() << "," << fam->K() << ",";
    const auto& a = fam->anchors0();
    for (std::size_t i = 0; i < a.size(); ++i)
      std::cout << (i ? " " : "") << to_string(a[i]);
    std::cout << "\n";
  }
  return 0;
}

int cmd_transform1d(const std::string& family, int levels, bool corrected,
                    bool check_roundtrip, std::uint64_t seed)
{
  auto fam = make_family(family);
  CounterRng rng(seed);
  double a = rng.uniform(-1, 1), w = rng.uniform(-3, 3), p = rng.uniform(-1, 1);
  double b = rng.uniform(-1, 1), c = rng.uniform(-1.5, 1.5);
  Sampler1D f = [=](const SidedPoint& x, int deriv) {
    double t = x.value();
    return a * std::pow(w, deriv) * std::sin(w * t + p + 1.5707963267948966 * deriv) +
           b * std::pow(c, deriv) * std::exp(c * t);
  };
  auto v = sample_grid(f, fam, levels, corrected);
  auto s = corrected ? values_to_surplus_corrected(v) : values_to_surplus(v);
  auto back = corrected ? surplus_to_values_corrected(s) : surplus_to_values(s);
  double worst = max_grid_diff(v, back);
  std::cout << "family,levels,mode,roundtrip_error\n";
  std::cout << family << "," << levels << ","
            << (corrected ? "corrected" : "standard") << "," << worst << "\n";
  if (check_roundtrip && worst > 1e-12) {
    std::cerr << "FAIL roundtrip_error=" << worst << " tol=1e-12\n";
    return 1;
  }
  return 0;
}

int cmd_converge(const std::string& fn, const std::string& family, int dim,
                 const std::string& levels, const std::string& mode, int samples,
                 std::uint64_t seed, const std::string& out)
{
  auto tf = test_function(fn, dim);
  auto [lo, hi] = parse_range(levels);
  std::vector<int> range;
  for (int n = lo; n <= hi; ++n) range.push_back(n);
  auto rows =
      convergence_table(tf.sided, tf.plain, make_family(family), dim, range,
                        mode == "corrected" ? Mode::corrected : Mode::standard,
                        samples, seed);
  Out o(out);
  emit_convergence_csv(rows, o.stream());
  return 0;
}

int cmd_adapt(const std::string& fn, const std::string& family, int dim, int n_max,
              const std::string& eps_list, double eta, const std::string& criterion,
              bool no_coarsen, int samples, std::uint64_t seed,
              const std::string& out, const std::string& grid_out)
{
  auto tf = test_function(fn, dim);
  auto fam = make_family(family);
  std::vector<double> sweep;
  std::stringstream ss(eps_list);
  std::string item;
  while (std::getline(ss, item, ',')) sweep.push_back(std::stod(item));

  Out o(out);
  o.stream() << "eps,dof,L1,L2,Linf,H1\n";
  char buf[256];
  for (double eps : sweep) {
    Criterion c{parse_norm(criterion), eps, eta};
    auto t = adaptive_interpolate(tf.sided, fam, dim, n_max, c, !no_coarsen);
    auto err = sampled_errors(tf.plain, t.surpluses(), samples, seed);
    std::snprintf(buf, sizeof buf, "%.3e,%lld,%.6e,%.6e,%.6e,%.6e\n", eps, t.dof(),
                  err.l1, err.l2, err.linf, err.h1);
    o.stream() << buf;
    if (eps == sweep.back() && !grid_out.empty()) {
      std::ofstream g(grid_out);
      dump_table(t, c, g);
    }
  }
  return 0;
}

int cmd_quad(const std::string& fn, const std::string& family, int dim,
             const std::string& levels, double eps, const std::string& criterion,
             int n_max, const std::string& out)
{
  auto tf = test_function(fn, dim);
  auto fam = make_family(family);
  Out o(out);
  char buf[128];
  if (eps > 0) {
    Criterion c{parse_norm(criterion), eps, 0};
    auto t = adaptive_interpolate(tf.sided, fam, dim, n_max, c);
    o.stream() << "eps,dof,integral\n";
    std::snprintf(buf, sizeof buf, "%.3e,%lld,%.12e\n", eps, t.dof(),
                  integrate_nd(t.surpluses()));
    o.stream() << buf;
    return 0;
  }
  auto [lo, hi] = parse_range(levels);
  o.stream() << "N,dof,integral\n";
  for (int n = lo; n <= hi; ++n) {
    SparseIndexSet space{dim, n, Mode::standard};
    auto s = fast_values_to_surplus(collocate(tf.sided, space, fam));
    std::snprintf(buf, sizeof buf, "%d,%zu,%.12e\n", n, s.dof(), integrate_nd(s));
    o.stream() << buf;
  }
  return 0;
}

int cmd_elliptic(const std::string& family, int dim, double sigma, int ncheb,
                 int levels, const std::string& out)
{
  EllipticConfig cfg{dim, sigma, ncheb};
  auto mom = elliptic_moments(cfg, make_family(family), levels);
  Out o(out);
  o.stream() << "x,mean,variance\n";
  char buf[128];
  for (int j = 0; j < ncheb; ++j) {
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e\n", mom.x[j], mom.mean[j],
                  mom.variance[j]);
    o.stream() << buf;
  }
  return 0;
}

int cmd_ko(const std::string& family, int dim, double eps, const std::string& criterion,
           int n_max, double dt, double t_end, int stride, const std::string& out)
{
  KOConfig cfg;
  cfg.random_dims = dim;
  cfg.norm = parse_norm(criterion);
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.eps = eps;
  cfg.n_max = n_max;
  cfg.family = make_family(family);
  cfg.output_stride = stride;
  auto series = ko_run(cfg);
  Out o(out);
  o.stream() << "t,var_y1,var_y2,var_y3,dof\n";
  char buf[192];
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.4f,%.8e,%.8e,%.8e,%lld\n", series.t[k],
                  series.var[0][k], series.var[1][k], series.var[2][k], series.dof[k]);
    o.stream() << buf;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"sparse collocation benchmarks"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "reserved; all commands run serially")
      ->check(CLI::PositiveNumber);

  std::string family = "p2m0", fn = "f0", criterion = "l2", mode = "standard";
  std::string levels = "5", out, grid_out, dump;
  int dim = 2, samples = 100000, ncheb = 31, stride = 10, n_max = 11;
  double eps = 1e-4, eta = 0, sigma = 4.0, dt = 0.01, t_end = 30.0;
  std::uint64_t seed = 42;
  bool verify = false, corrected = false, check_roundtrip = false, no_coarsen = false;
  std::string eps_list = "1e-4", quad_levels = "1:5";
  double quad_eps = 0;

  auto take_last = [](CLI::Option* opt) {
    return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };

  auto* fams = app.add_subcommand("families", "catalogue listing and verification");
  fams->add_flag("--verify", verify, "check duality and a transform round trip");
  take_last(fams->add_option("--dump", dump, "emit the rational tables of one family"));

  auto* tr = app.add_subcommand("transform1d", "1D pyramid transform diagnostic");
  take_last(tr->add_option("--family", family));
  take_last(tr->add_option("--levels", levels, "max level"));
  tr->add_flag("--corrected", corrected, "use the corrected hierarchy");
  tr->add_flag("--check-roundtrip", check_roundtrip, "fail unless error <= 1e-12");
  take_last(tr->add_option("--seed", seed));

  auto* cv = app.add_subcommand("converge", "interpolation error table");
  take_last(cv->add_option("--fn", fn, "f0..f4"));
  take_last(cv->add_option("--family", family));
  take_last(cv->add_option("--dim", dim));
  take_last(cv->add_option("--levels", levels, "level budget or lo:hi range"));
  take_last(cv->add_option("--mode", mode, "standard or corrected"));
  take_last(cv->add_option("--samples", samples));
  take_last(cv->add_option("--seed", seed));
  take_last(cv->add_option("--out", out));

  auto* ad = app.add_subcommand("adapt", "adaptive interpolation sweep");
  take_last(ad->add_option("--fn", fn));
  take_last(ad->add_option("--family", family));
  take_last(ad->add_option("--dim", dim));
  take_last(ad->add_option("--levels", n_max, "per-dimension level cap"));
  take_last(ad->add_option("--eps", eps_list, "tolerance or comma-separated sweep"));
  take_last(ad->add_option("--eta", eta, "coarsening threshold, 0 = eps/10"));
  take_last(ad->add_option("--criterion", criterion, "l1, l2 or linf"));
  ad->add_flag("--no-coarsen", no_coarsen, "skip the coarsening pass");
  take_last(ad->add_option("--samples", samples));
  take_last(ad->add_option("--seed", seed));
  take_last(ad->add_option("--out", out));
  take_last(ad->add_option("--grid-out", grid_out, "dump the final grid here"));

  auto* qd = app.add_subcommand("quad", "sparse quadrature");
  take_last(qd->add_option("--fn", fn));
  take_last(qd->add_option("--family", family));
  take_last(qd->add_option("--dim", dim));
  take_last(qd->add_option("--levels", quad_levels, "level budget or lo:hi range"));
  take_last(qd->add_option("--eps", quad_eps, "adaptive tolerance; 0 = level sweep"));
  take_last(qd->add_option("--criterion", criterion));
  take_last(qd->add_option("--nmax", n_max, "level cap for the adaptive run"));
  take_last(qd->add_option("--out", out));

  auto* el = app.add_subcommand("elliptic", "stochastic two-point diffusion moments");
  take_last(el->add_option("--family", family));
  take_last(el->add_option("--dim", dim, "random dimensions"));
  take_last(el->add_option("--sigma", sigma));
  take_last(el->add_option("--ncheb", ncheb, "spatial Chebyshev nodes"));
  take_last(el->add_option("--levels", n_max, "level budget of the random space"));
  take_last(el->add_option("--out", out));

  auto* ko = app.add_subcommand("ko", "three-mode stochastic ODE evolution");
  take_last(ko->add_option("--family", family));
  take_last(ko->add_option("--dim", dim, "random dimensions (1, 2 or 3)"));
  take_last(ko->add_option("--eps", eps));
  take_last(ko->add_option("--criterion", criterion));
  take_last(ko->add_option("--levels", n_max, "per-dimension level cap"));
  take_last(ko->add_option("--dt", dt));
  take_last(ko->add_option("--t-end", t_end));
  take_last(ko->add_option("--stride", stride, "record every this many steps"));
  take_last(ko->add_option("--out", out));

  // pull in key=value config first so explicit flags win
  std::vector<std::string> args;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      config_path = argv[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
      continue;
    }
    args.push_back(a);
  }
  if (!config_path.empty() && !args.empty()) {
    auto extra = config_tokens(config_path);
    args.insert(args.begin() + 1, extra.begin(), extra.end());
  }
  // CLI11 parses right to left
  std::vector<std::string> rev(args.rbegin(), args.rend());

  try {
    app.parse(rev);
    if (*fams) return cmd_families(verify, dump);
    if (*tr)
      return cmd_transform1d(family, parse_range(levels).second, corrected,
                             check_roundtrip, seed);
    if (*cv) return cmd_converge(fn, family, dim, levels, mode, samples, seed, out);
    if (*ad)
      return cmd_adapt(fn, family, dim, n_max, eps_list, eta, criterion, no_coarsen,
                       samples, seed, out, grid_out);
    if (*qd)
      return cmd_quad(fn, family, dim, quad_levels, quad_eps, criterion, n_max, out);
    if (*el) return cmd_elliptic(family, dim, sigma, ncheb, n_max, out);
    if (*ko)
      return cmd_ko(family, dim, eps, criterion, n_max, dt, t_end, stride, out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
