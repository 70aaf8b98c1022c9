// liouville_lab: sweeps, audits and the acceptance run from the command line.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "lab_config.hpp"
#include "liouville/acceptance.hpp"

namespace fs = std::filesystem;
using namespace liouville;
using lab::RunConfig;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Check {
  std::string name;
  bool pass;
};

struct Run {
  const RunConfig& cfg;
  fs::path out;
  unsigned jobs;
  std::vector<fs::path> outputs;
  std::vector<Check> checks;

  std::string file(const std::string& name) {
    outputs.push_back(out / name);
    return (out / name).string();
  }
  void check(const std::string& name, bool pass) { checks.push_back({name, pass}); }
};

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + p.string() + " for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char h[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

std::FILE* open_csv(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  return f;
}

void close_csv(std::FILE* f, const std::string& path) {
  if (std::fclose(f) != 0) throw Error(ErrorKind::io, "failed to close " + path);
}

BubbleParams family_params(const RunConfig& c, double n) {
  BubbleParams p{c.num("alpha", 0.0), c.num("a", 1.0), c.num("b", 1.0), n};
  p.validate();
  return p;
}

void family_sweep(Run& run) {
  auto ns = run.cfg.ladder("n", "10..1e6", 6);
  std::vector<SupInfCombination> rows(ns.size());
  std::vector<BubbleParams> ps;
  for (double n : ns) ps.push_back(family_params(run.cfg, n));
  parallel_for(ns.size(), run.jobs, [&](std::size_t i) { rows[i] = supinf_combination(ps[i]); });
  const auto& p0 = ps.front();
  const double bound = supinf_bound(p0.alpha, p0.a, p0.b);
  auto path = run.file("family_sweep.csv");
  std::FILE* f = open_csv(path);
  std::fprintf(f, "n,u_center,u_boundary,combination,combination_family,bound\n");
  bool monotone = true, bounded = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ns[i], family_u(ps[i], 0.0), family_u(ps[i], 1.0),
                 rows[i].closed_form, rows[i].from_family, bound);
    if (i > 0) monotone = monotone && rows[i].closed_form >= rows[i - 1].closed_form;
    bounded = bounded && rows[i].closed_form <= bound;
  }
  close_csv(f, path);
  run.check("combination monotone in n", monotone);
  run.check("combination below bound", bounded);
  std::printf("last combination %.12g, bound %.12g\n", rows.back().closed_form, bound);
}

void solve_radial_cmd(Run& run) {
  const auto& c = run.cfg;
  RadialIVP ivp;
  ivp.alpha = c.num("alpha", 0.0);
  const double b = c.num("b", 1.0);
  ivp.K = PotentialSpec::constant_value(b);
  ivp.M = c.num("M", 3.0);
  ivp.r_max = c.num("r_max", 10.0);
  ivp.tol = c.num("tol", 1e-10);
  ivp.per_decade = c.integer("per_decade", 200);
  auto prof = solve_radial(ivp);
  const double mu = bubble_mu(ivp.alpha, b, ivp.M);
  auto path = run.file("radial.csv");
  std::FILE* f = open_csv(path);
  std::fprintf(f, "r,u,du_dr,bubble,error\n");
  double worst = 0;
  for (std::size_t i = 0; i < prof.nodes.size(); ++i) {
    double r = prof.nodes[i], ub = centered_bubble(ivp.alpha, b, mu, r);
    double slope = prof.slopes.empty() ? std::numeric_limits<double>::quiet_NaN() : prof.slopes[i];
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r, prof.values[i], slope, ub, prof.values[i] - ub);
    worst = std::max(worst, std::abs(prof.values[i] - ub));
  }
  close_csv(f, path);
  run.check("matches centered bubble to 1e-6", worst <= 1e-6);
  std::printf("sup error against the centered bubble %.3e\n", worst);
}

GridField bubble_trace_solve(const RunConfig& c, double alpha, int default_grid) {
  const double b = c.num("b", 1.0), mu = c.num("mu", 2.0);
  Dirichlet2D pb;
  pb.n = c.integer("grid", default_grid);
  pb.alpha = alpha;
  pb.K = PotentialSpec::constant_value(b);
  pb.boundary = [=](Point p) { return centered_bubble(alpha, b, mu, norm(p)); };
  return solve_dirichlet(pb);
}

void solve_2d_cmd(Run& run) {
  const auto& c = run.cfg;
  // Small mu keeps the bubble on the branch Newton converges to from zero.
  const double alpha = c.num("alpha", 0.0), b = c.num("b", 1.0), mu = c.num("mu", 0.5);
  const std::string trace = c.str("trace", "bubble");
  if (trace != "bubble" && trace != "zero") throw Error(ErrorKind::usage, "trace must be bubble or zero");
  Dirichlet2D pb;
  pb.n = c.integer("grid", 129);
  pb.extent = c.num("extent", 1.0);
  pb.alpha = alpha;
  pb.newton_tol = c.num("newton_tol", 1e-8);
  if (trace == "bubble") {
    pb.K = PotentialSpec::constant_value(b);
    pb.boundary = [=](Point p) { return centered_bubble(alpha, b, mu, norm(p)); };
  } else {
    pb.K = PotentialSpec::constant_value(c.num("lambda", 0.3));
  }
  auto res = solve_dirichlet_full(pb);
  write_field(res.field, run.file("field.txt"));
  double err = std::numeric_limits<double>::quiet_NaN();
  if (trace == "bubble") {
    err = 0;
    const auto& u = res.field;
    for (int j = 0; j < u.n(); ++j)
      for (int i = 0; i < u.n(); ++i)
        if (u.in_domain(i, j)) err = std::max(err, std::abs(u.at(i, j) - centered_bubble(alpha, b, mu, norm(u.node(i, j)))));
  }
  auto path = run.file("solve_2d.csv");
  std::FILE* f = open_csv(path);
  std::fprintf(f, "grid,iterations,residual,max,min,bubble_error\n");
  std::fprintf(f, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", pb.n, res.iterations, res.residual, res.field.max_value(),
               res.field.min_value(), err);
  close_csv(f, path);
  std::printf("%d Newton steps, residual %.3e\n", res.iterations, res.residual);
}

void rearrange_cmd(Run& run) {
  const auto& c = run.cfg;
  const std::string source = c.str("source", "family");
  const int grid = c.integer("grid", 257);
  double alpha = c.num("alpha", 0.0), a = c.num("a", 1.0), b = c.num("b", 1.0);
  GridField u;
  PotentialSpec K;
  if (source == "family") {
    auto p = family_params(c, c.num("n", 3.0));
    u = GridField::sample(1.0, grid, DomainShape::disk, alpha, [&](Point x) { return family_u(p, std::min(norm(x), 1.0)); });
    K = family_potential(p);
  } else if (source == "bubble") {
    const double mu = c.num("mu", 3.0);
    u = GridField::sample(1.0, grid, DomainShape::disk, alpha, [&](Point x) { return centered_bubble(alpha, b, mu, norm(x)); });
    K = PotentialSpec::constant_value(b);
    a = b;
  } else if (source == "field") {
    if (!c.has("field")) throw Error(ErrorKind::usage, "source=field needs field=PATH");
    u = read_field(c.str("field", ""));
    alpha = u.alpha();
    K = PotentialSpec::constant_value(b);
    a = b;
  } else {
    throw Error(ErrorKind::usage, "source must be family, bubble or field");
  }
  auto prof = rearrange(u, ConicalWeight(alpha), K, {}, c.num("clip", 0.95) * valid_disk_radius(u), c.integer("levels", 512),
                        run.jobs);
  write_profile_csv(prof, run.file("profile.csv"));
  auto kh = audit_khat_bounds(prof, a, b);
  auto di = audit_differential_inequality(prof);
  run.check("K-hat within [a-0.05, b+0.05]", kh.margin <= 0.05);
  run.check("differential inequality", di.ok());
  std::printf("K-hat in [%.6f, %.6f]; %zu inequality violations, max gap %.3e\n", kh.min, kh.max, di.violations.size(),
              di.max_relative_gap);
}

std::vector<Polyline> read_boundary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read boundary file " + path);
  std::vector<Polyline> rings(1);
  std::string line;
  while (std::getline(in, line)) {
    line = lab::trim(line.substr(0, line.find('#')));
    if (line.empty()) {
      if (!rings.back().empty()) rings.emplace_back();
      continue;
    }
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    Point p;
    if (!(ls >> p.x >> p.y)) throw Error(ErrorKind::io, "bad vertex line in " + path + ": " + line);
    rings.back().push_back(p);
  }
  if (rings.back().empty()) rings.pop_back();
  for (auto& r : rings)
    if (!r.empty() && !(r.front() == r.back())) r.push_back(r.front());
  return rings;
}

void audit_huber_cmd(Run& run) {
  const auto& c = run.cfg;
  if (!c.has("boundary")) throw Error(ErrorKind::usage, "audit-huber needs boundary=PATH");
  auto rings = read_boundary(c.str("boundary", ""));
  auto h = huber_check(rings, {}, c.num("h", 0.0), c.num("alpha", 0.0), {c.num("sx", 0.0), c.num("sy", 0.0)});
  auto path = run.file("huber.csv");
  std::FILE* f = open_csv(path);
  std::fprintf(f, "rings,weighted_length,weighted_mass,beta,ratio,singular_inside,indeterminate,subharmonic_warning\n");
  std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n", h.rings, h.boundary_weighted_length, h.interior_weighted_mass,
               h.beta, h.ratio, h.singular_inside, h.indeterminate, h.subharmonic_warning);
  close_csv(f, path);
  run.check("isoperimetric ratio >= 0.98", h.pass());
  std::printf("ratio %.9f (beta %.6f)\n", h.ratio, h.beta);
}

void audit_suzuki_cmd(Run& run) {
  const auto& c = run.cfg;
  GridField w;
  if (c.has("field")) {
    w = read_field(c.str("field", ""));
  } else {
    w = bubble_trace_solve(c, c.num("alpha", 0.0), 129);
  }
  auto batch = suzuki_random_audit(w, ConicalWeight(w.alpha()), c.num("lambda", c.num("b", 1.0)), c.integer("count", 50),
                                   static_cast<unsigned>(c.integer("seed", 1)), run.jobs);
  write_suzuki_csv(batch.audits, run.file("suzuki.csv"));
  run.check("margins above -1e-3 osc", batch.ok());
  std::printf("worst margin %.3e (oscillation %.3e)\n", batch.worst_margin, batch.oscillation);
}

void blowup_cmd(Run& run) {
  const auto& c = run.cfg;
  const std::string source = c.str("source", "family");
  const double rho = c.num("rho", 0.5), thr = c.num("threshold", 10.0);
  BlowupReport r;
  if (source == "family") {
    auto p = family_params(c, c.num("n", 1e4));
    r = analyze_radial_blowup([&](double s) { return family_u(p, std::min(s, 1.0)); },
                              [&](double s) { return family_K(p, std::min(s, 1.0)); }, p.alpha, p.b / p.a, rho, 1.0,
                              {1.0 / p.n}, thr);
  } else if (source == "field") {
    if (!c.has("field")) throw Error(ErrorKind::usage, "source=field needs field=PATH");
    auto u = read_field(c.str("field", ""));
    double b = c.num("b", 1.0);
    r = analyze_blowup(u, Disk{{}, valid_disk_radius(u)}, PotentialSpec::constant_value(b), rho, thr, c.num("eps0", 0.1));
  } else {
    throw Error(ErrorKind::usage, "source must be family or field");
  }
  write_report_csv(r, run.file("blowup.csv"));
  std::printf("case %s, delta %.6g, l_n %.6g, neck mass %.6g of threshold %.6g\n", to_string(r.case_tag), r.delta, r.l_n,
              r.neck_mass, r.threshold);
}

void supinf_sweep_cmd(Run& run) {
  const auto& c = run.cfg;
  auto ns = c.ladder("n", "10..1e3", 3);
  const int grid = c.integer("grid", 257);
  std::vector<SupInfReport> rows(ns.size());
  std::vector<BubbleParams> ps;
  for (double n : ns) ps.push_back(family_params(c, n));
  const double sigma = ps.front().b / ps.front().a;
  parallel_for(ns.size(), run.jobs, [&](std::size_t i) {
    auto u = GridField::sample(1.0, grid, DomainShape::disk, ps[i].alpha,
                               [&](Point x) { return family_u(ps[i], std::min(norm(x), 1.0)); });
    rows[i] = supinf_eval(u, Disk{{}, 1.0}, sigma, false);
  });
  auto path = run.file("supinf_sweep.csv");
  std::FILE* f = open_csv(path);
  std::fprintf(f, "n,sup,inf,combination,closed_form_scaled,product_form\n");
  bool ok = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double want = std::sqrt(sigma) * supinf_combination(ps[i]).value();
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ns[i], rows[i].sup_A, rows[i].inf_Omega,
                 rows[i].combination, want, rows[i].product_form);
    ok = ok && std::abs(rows[i].combination - want) <= 1e-2 * std::max(1.0, std::abs(want));
  }
  close_csv(f, path);
  run.check("grid combination matches closed form", ok);
}

void reproduce_all(Run& run) {
  auto path = run.file("acceptance.csv");
  std::FILE* f = open_csv(path);
  std::fprintf(f, "criterion,title,pass,detail\n");
  for (const auto& crit : acceptance::all(run.jobs)) {
    auto r = acceptance::timed(crit);
    std::printf("%s [%d] %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    std::fprintf(f, "%d,\"%s\",%d,\"%s\"\n", r.id, r.title.c_str(), r.pass ? 1 : 0, r.detail.c_str());
    run.check("criterion " + std::to_string(r.id), r.pass);
  }
  close_csv(f, path);
}

void write_manifest(const Run& run, double seconds) {
  nlohmann::ordered_json m;
  m["toolkit"] = "liouville_lab";
  m["version"] = kVersion;
  m["command"] = run.cfg.command;
  m["config"] = run.cfg.params;
  m["jobs"] = run.jobs;
  m["wall_seconds"] = seconds;
  bool all = true;
  for (const auto& c : run.checks) {
    m["checks"].push_back({{"name", c.name}, {"pass", c.pass}});
    all = all && c.pass;
  }
  if (run.checks.empty()) m["checks"] = nlohmann::json::array();
  m["pass"] = all;
  m["outputs"] = nlohmann::json::array();
  for (const auto& p : run.outputs)
    m["outputs"].push_back({{"path", p.filename().string()}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
  const fs::path final = run.out / "manifest.json", tmp = run.out / "manifest.json.tmp";
  {
    std::ofstream o(tmp);
    o << m.dump(2) << "\n";
    if (!o) throw Error(ErrorKind::io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, final);
}

int exit_code(ErrorKind k) { return is_numerical(k) ? 3 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the singular Liouville equation"};
  std::string config_path, out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (default $LIOUVILLE_LAB_OUT or .)");
  app.allow_extras();
  app.footer(
      "Commands: family-sweep solve-radial solve-2d rearrange audit-huber audit-suzuki blowup supinf-sweep "
      "reproduce-all\nParameters are given as key=value or --key=value.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    auto file = config_path.empty() ? std::map<std::string, std::string>{} : lab::read_config_file(config_path);
    cfg = lab::parse_config(file, app.remaining());
  } catch (const Error& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (out_dir.empty()) {
    const char* env = std::getenv("LIOUVILLE_LAB_OUT");
    out_dir = env && *env ? env : ".";
  }

  Run run{cfg, fs::path(out_dir), jobs, {}, {}};
  auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(run.out);
    const std::map<std::string, void (*)(Run&)> dispatch{
        {"family-sweep", family_sweep},   {"solve-radial", solve_radial_cmd}, {"solve-2d", solve_2d_cmd},
        {"rearrange", rearrange_cmd},     {"audit-huber", audit_huber_cmd},   {"audit-suzuki", audit_suzuki_cmd},
        {"blowup", blowup_cmd},           {"supinf-sweep", supinf_sweep_cmd}, {"reproduce-all", reproduce_all},
    };
    dispatch.at(cfg.command)(run);
    write_manifest(run, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  } catch (const Error& e) {
    const char* label = e.kind() == ErrorKind::invalid_domain ? "invalid domain" : "error";
    std::cerr << cfg.command << ": " << label << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << cfg.command << ": " << e.what() << "\n";
    return 2;
  }
  for (const auto& c : run.checks)
    if (!c.pass) {
      std::cerr << "audit failed: " << c.name << "\n";
      return 1;
    }
  return 0;
}
