// Command-line front end: runs the named verifications against the flat model
// structures and emits machine-readable reports plus plot-ready CSV.

#include <CLI11.hpp>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>

#include "g2forms/coflow.hpp"
#include "g2forms/form_io.hpp"
#include "g2forms/perturbations.hpp"
#include "g2forms/report.hpp"
#include "g2forms/rng.hpp"
#include "g2forms/standard_forms.hpp"

namespace {

using namespace g2f;

struct CommonOpts {
  std::string out;
  std::string csv;
  QuadratureSpec quad;
  double bump_a = 0.3;
  double bump_b = 0.8;
};

/// TOML-style key = value configuration ([sections] and # comments allowed;
/// keys may be written either bare or section-qualified).  CLI flags override.
void load_config(const std::string& path, CommonOpts& c) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::string line, section;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    if (key == "quadrature.method") c.quad.method = quad_method_from_string(val);
    else if (key == "quadrature.samples") c.quad.samples = std::stol(val);
    else if (key == "quadrature.seed") c.quad.seed = std::stoull(val);
    else if (key == "quadrature.nodes") c.quad.nodes = std::stoi(val);
    else if (key == "quadrature.sphere_degree") c.quad.sphere_degree = std::stoi(val);
    else if (key == "quadrature.tolerance") c.quad.tolerance = std::stod(val);
    else if (key == "bump.a") c.bump_a = std::stod(val);
    else if (key == "bump.b") c.bump_b = std::stod(val);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::string g_config_sink;  // the path is pre-scanned before parsing

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--config", g_config_sink, "TOML-style key=value configuration file");
  cmd->add_option("--out", c.out, "write the JSON report to this path");
  cmd->add_option("--csv", c.csv, "write the CSV series to this path");
  cmd->add_option("--seed", c.quad.seed, "monte-carlo seed");
  cmd->add_option("--samples", c.quad.samples, "monte-carlo samples");
  cmd->add_option("--nodes", c.quad.nodes, "radial nodes (radial-1d)");
  cmd->add_option("--sphere-degree", c.quad.sphere_degree, "sphere cubature exactness degree");
  cmd->add_option("--tolerance", c.quad.tolerance, "relative quadrature tolerance");
  cmd->add_option("--bump-a", c.bump_a, "bump plateau fraction a");
  cmd->add_option("--bump-b", c.bump_b, "bump plateau fraction b");
  cmd->add_option_function<std::string>(
         "--method", [&c](const std::string& m) { c.quad.method = quad_method_from_string(m); },
         "quadrature method: moment-reduction | monte-carlo | radial-1d")
      ->default_str("moment-reduction");
}

int finish(Report& rep, const CommonOpts& c,
           const std::chrono::steady_clock::time_point& t0) {
  const auto t1 = std::chrono::steady_clock::now();
  rep.set_wall_time_ms(std::chrono::duration<double, std::milli>(t1 - t0).count());
  if (c.out.empty()) {
    std::cout << rep.json().dump(2) << "\n";
  } else {
    rep.write(c.out);
    std::cout << (rep.all_pass() ? "PASS" : "FAIL") << "  report: " << c.out << "\n";
  }
  return rep.all_pass() ? 0 : 1;
}

/// Analytic/finite-difference Hessian pair plus pointwise identity residuals
/// for one family; shared by `hessian` and `verify-lemma`.
void family_verdicts(Report& rep, FamilyName name, double eta, const CommonOpts& c) {
  PerturbationFamily pf;
  pf.name = name;
  pf.eta = eta;
  pf.plateau_a = c.bump_a;
  pf.plateau_b = c.bump_b;
  const FamilyVariation fam = family_variation(pf);
  const std::string tag = family_str(name);

  const FormField da = fam.dalpha();
  const double d2 = second_variation(fam.kind, fam.base, da, da, fam.domain(), c.quad);
  const double fd = fd_second_variation(fam, 1e-4);
  const int sign = family_sign(name);
  rep.add_value(tag + " D2H analytic", d2);
  rep.add_value(tag + " D2H finite-difference", fd);
  rep.add_verdict(tag + " Hessian sign", sign * d2 > 0, 0, d2);
  rep.add_verdict(tag + " analytic vs FD", std::abs(d2 - fd) <= 1e-4 * std::abs(d2), 1e-4,
                  std::abs(d2 - fd) / std::abs(d2));

  // pointwise integrand identity at random points of the transition annulus
  const G2Structure S = recover_structure(fam.base);
  {
    nlohmann::json js;
    to_json(js, *S.metric);
    js["orbit"] = orbit_name(S.orbit);
    rep.set_parameter(tag + " base structure", js);
  }
  TypeProjections P(S);
  Philox rng(c.quad.seed);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    EVec7 x;
    for (int b = 0; b < 4; ++b) {
      const auto z = rng.normal2(static_cast<uint64_t>(i), static_cast<uint32_t>(b));
      if (2 * b < 7) x[2 * b] = z[0];
      if (2 * b + 1 < 7) x[2 * b + 1] = z[1];
    }
    const double r = eta * (0.05 + 0.9 * rng.uniform(static_cast<uint64_t>(i), 9));
    x *= r / x.norm();
    const EVec7 xc = fam.center + x;
    const double measured = hessian_integrand(fam.kind, P, da(xc));
    const double expected =
        family_integrand_reference(name, x, fam.bump.fp(r) / r);
    const double scale = std::max({1e-30, std::abs(expected), std::abs(measured)});
    if (std::abs(expected) > 1e-14 || std::abs(measured) > 1e-14)
      worst = std::max(worst, std::abs(measured - expected) / scale);
  }
  rep.add_verdict(tag + " pointwise integrand identity", worst <= 1e-10, 1e-10, worst);
}

int cmd_decompose(const std::string& literal, const std::string& flavor, const CommonOpts& c,
                  const std::chrono::steady_clock::time_point& t0) {
  Report rep("decompose", c.quad);
  rep.set_parameter("form", literal);
  rep.set_parameter("flavor", flavor);
  const FormQ fq = parse_form(literal);
  const FormD f = to_double(fq);
  const bool split = flavor == "split";
  const G2Structure S =
      split ? classify_and_metric_3(phi0_tilde()) : classify_and_metric_3(phi0());
  TypeProjections P(S);
  std::cout << "input (grade " << f.grade() << "): " << form_str(fq) << "\n";
  if (!valid_type_pair(f.grade(), type_labels(f.grade()).empty() ? -1 : type_labels(f.grade())[0])) {
    std::cerr << "grade " << f.grade() << " has no type decomposition (need 2..5)\n";
    return 2;
  }
  FormD sum(f.grade());
  for (int label : type_labels(f.grade())) {
    const TypeComponent comp = P.project(label, f);
    const Certificate cert = characterize(S, comp, 1e-10);
    sum += comp.form;
    std::cout << "  pi_" << label << ": " << form_str(comp.form, 1e-13) << "\n";
    std::cout << "    certificate [" << cert.detail << "]: " << (cert.pass ? "ok" : "FAILED");
    for (const auto& [cond, res] : cert.residuals) std::cout << "  {" << cond << ": " << res << "}";
    std::cout << "\n";
    nlohmann::json Jc;
    to_json(Jc, comp.form);
    rep.set_parameter("pi_" + std::to_string(label), Jc);
    rep.add_verdict("pi_" + std::to_string(label) + " certificate", cert.pass, 1e-10, 0.0);
  }
  double completeness = 0;
  for (int i = 0; i < f.size(); ++i) completeness = std::max(completeness, std::abs(sum[i] - f[i]));
  rep.add_verdict("completeness sum pi_d = id", completeness <= 1e-12, 1e-12, completeness);
  return finish(rep, c, t0);
}

int cmd_hessian(const std::string& family, double eta, const CommonOpts& c,
                const std::chrono::steady_clock::time_point& t0) {
  Report rep("hessian", c.quad);
  rep.set_parameter("family", family);
  rep.set_parameter("eta", eta);
  family_verdicts(rep, family_from_str(family), eta, c);
  return finish(rep, c, t0);
}

int cmd_verify_lemma(const std::string& which, double eta, const CommonOpts& c,
                     const std::chrono::steady_clock::time_point& t0) {
  Report rep("verify-lemma " + which, c.quad);
  rep.set_parameter("lemma", which);
  rep.set_parameter("eta", eta);
  std::vector<FamilyName> fams;
  if (which == "p0") fams = {FamilyName::P0p, FamilyName::P0m};
  else if (which == "sg3") fams = {FamilyName::SG3p, FamilyName::SG3m};
  else if (which == "sg4") fams = {FamilyName::SG4p, FamilyName::SG4m};
  else if (which == "ch") fams = {FamilyName::CHm};
  else throw CLI::ValidationError("verify-lemma", "expected one of p0|sg3|sg4|ch");
  for (FamilyName n : fams) {
    family_verdicts(rep, n, eta, c);
    // finite perturbation with the lemma's sign
    PerturbationFamily pf;
    pf.name = n;
    pf.eta = eta;
    pf.plateau_a = c.bump_a;
    pf.plateau_b = c.bump_b;
    const FamilyVariation fam = family_variation(pf);
    const AmplitudeResult opt =
        optimize_amplitude(fam, family_sign(n), log_grid(1e-3, 1e-1, 13), c.quad.sphere_degree);
    rep.add_value(family_str(n) + " best amplitude", opt.t_best);
    rep.add_value(family_str(n) + " eps_hat", opt.eps_hat);
    rep.add_verdict(family_str(n) + " finite perturbation sign", opt.sign_achieved, 0,
                    opt.H_best - opt.H0);
  }
  return finish(rep, c, t0);
}

int cmd_unbounded(int sign, int rounds, double nu, const std::string& packing_name,
                  const CommonOpts& c, const std::chrono::steady_clock::time_point& t0) {
  Report rep("unbounded", c.quad);
  rep.set_parameter("sign", sign);
  rep.set_parameter("rounds", rounds);
  rep.set_parameter("nu", nu);
  rep.set_parameter("packing", packing_name);
  const Domain7 box = Domain7::box(EVec7::Zero(), EVec7::Ones());
  const Packing packing = packing_preset(packing_name, box);
  const UnboundedResult R =
      unbounded_iterate(box, packing, sign, rounds, nu, c.bump_a, c.bump_b, c.quad.sphere_degree);
  rep.add_value("covered fraction", R.covered_fraction);
  rep.add_value("eps_hat", R.eps_hat);
  for (size_t i = 0; i < R.H.size(); ++i) rep.add_value("H_" + std::to_string(i), R.H[i]);
  for (size_t i = 0; i < R.ratios.size(); ++i)
    rep.add_value("ratio_" + std::to_string(i + 1), R.ratios[i]);
  rep.add_verdict("strictly monotone", R.monotone, 0, R.H.back() - R.H.front());
  rep.add_verdict("per-round ratio beats 1 +- eps_hat/2", R.ratio_ok, 0, R.ratio_bound);
  if (!c.csv.empty()) {
    CsvWriter w;
    w.header = {"round", "H", "ratio"};
    for (size_t i = 0; i < R.H.size(); ++i)
      w.rows.push_back({static_cast<double>(i), R.H[i], i ? R.ratios[i - 1] : 1.0});
    w.write(c.csv);
  }
  return finish(rep, c, t0);
}

int cmd_saddle(int k, int sign, double eta, const CommonOpts& c,
               const std::chrono::steady_clock::time_point& t0) {
  Report rep("saddle", c.quad);
  rep.set_parameter("k", k);
  rep.set_parameter("sign", sign);
  rep.set_parameter("eta", eta);
  std::vector<PerturbationFamily> bumps;
  for (int i = 0; i < k; ++i) {
    PerturbationFamily b;
    b.name = sign > 0 ? FamilyName::P0p : FamilyName::P0m;
    b.eta = eta;
    b.plateau_a = c.bump_a;
    b.plateau_b = c.bump_b;
    b.center = EVec7::Zero();
    b.center[0] = 2.5 * eta * i;
    bumps.push_back(b);
  }
  const SaddleResult R = saddle_gram(bumps, c.quad);
  rep.add_value("min eigenvalue", R.min_eig);
  rep.add_value("max eigenvalue", R.max_eig);
  rep.add_value("max |offdiagonal|", R.max_offdiag);
  rep.add_verdict("Gram definite with the family sign", R.definite_sign == sign, 0,
                  sign > 0 ? R.min_eig : R.max_eig);
  rep.add_verdict("offdiagonals vanish (disjoint supports)", R.max_offdiag <= 1e-12, 1e-12,
                  R.max_offdiag);
  return finish(rep, c, t0);
}

int cmd_coflow(int grid, double s, double dt, int steps, const CommonOpts& c,
               const std::chrono::steady_clock::time_point& t0) {
  Report rep("coflow", c.quad);
  rep.set_parameter("grid", grid);
  rep.set_parameter("s", s);
  rep.set_parameter("dt", dt);
  rep.set_parameter("steps", steps);
  CoflowState state = coflow_initial(grid, 2.0 * M_PI, s);
  const CoflowState initial = state;
  rep.add_value("cfl bound", cfl_bound(state));
  CsvWriter w;
  w.header = {"t", "H4", "min_vol_rate", "sup_dpsi", "sup_dstar_psi"};
  double minrate_worst = std::numeric_limits<double>::infinity();
  bool H_nondecreasing = true;
  double H_prev = coflow_H4(state);
  const double H_first = H_prev;
  for (int step = 0; step < steps; ++step) {
    const MonotonicityReport mono = volume_monotonicity_check(state, dt);
    state = coflow_step(state, dt);
    const TorsionReport tor = torsion(state);
    const double H = coflow_H4(state);
    minrate_worst = std::min(minrate_worst, mono.min_rate);
    if (H < H_prev - 1e-12 * std::abs(H_prev)) H_nondecreasing = false;
    H_prev = H;
    w.rows.push_back({state.time, H, mono.min_rate, tor.sup_dpsi, tor.sup_dstar_psi});
  }
  rep.add_value("H4 initial", H_first);
  rep.add_value("H4 final", H_prev);
  rep.add_value("min pointwise volume rate", minrate_worst);
  rep.add_value("exactness residual", exactness_residual(state, initial));
  rep.add_verdict("pointwise volume rate >= -1e-9", minrate_worst >= -1e-9, 1e-9, minrate_worst);
  rep.add_verdict("H4 nondecreasing", H_nondecreasing, 0, H_prev - H_first);
  rep.add_verdict("psi(t) - psi(0) stays exact", exactness_residual(state, initial) <= 1e-10,
                  1e-10, exactness_residual(state, initial));
  if (!c.csv.empty()) w.write(c.csv);
  return finish(rep, c, t0);
}

int cmd_hk(double eta, const CommonOpts& c, const std::chrono::steady_clock::time_point& t0) {
  Report rep("hk-bound", c.quad);
  rep.set_parameter("eta", eta);
  const HKReport R = hk_bound_check(eta);
  rep.add_value("Vol(B_eta)", R.vol_ball);
  rep.add_value("Area(S6_eta)", R.area_sphere);
  rep.add_value("(eta/7) Area", R.eta_over_7_area);
  rep.add_value("integral with exponent 6", R.rhs_exp6);
  rep.add_value("integral with exponent 7", R.rhs_exp7);
  rep.add_verdict("saturation Vol = (eta/7) Area (exponent 6)", R.saturated_exp6, 1e-12,
                  std::abs(R.vol_ball - R.eta_over_7_area) / R.vol_ball);
  rep.add_verdict("exponent-7 integrand gives eta/8, not eta/7",
                  std::abs(R.rhs_exp7 - (eta / 8.0) * R.area_sphere) <= 1e-12 * R.vol_ball,
                  1e-12, R.discrepancy_exp7);
  rep.add_note("the two exponents disagree; flat-ball saturation selects exponent 6");
  return finish(rep, c, t0);
}

int cmd_glue(double delta, double perturbation, const CommonOpts& c,
             const std::chrono::steady_clock::time_point& t0) {
  Report rep("glue", c.quad);
  rep.set_parameter("delta", delta);
  rep.set_parameter("perturbation", perturbation);
  // closed linear-coefficient perturbation vanishing at 0
  std::vector<StructTerm> terms;
  {
    StructTerm t1, t2;
    t1.prof = RadialProfile::constant();
    t1.mono[0] = 1;
    t1.form = FormD(4);
    t1.form.set(MultiIndex({2, 3, 4, 5}), perturbation);
    t2.prof = RadialProfile::constant();
    t2.mono[1] = 1;
    t2.form = FormD(4);
    t2.form.set(MultiIndex({1, 3, 4, 5}), perturbation);
    terms = {t1, t2};
  }
  FormField psi_prime = FormField::constant(psi0()) + FormField::structured(4, terms);
  const GlueResult R = glue_to_standard(psi_prime, delta);
  rep.add_value("eta", R.eta);
  rep.add_value("sup ||d(f w)||", R.sup_change);
  rep.add_value("match residual on B_eta", R.match_residual);
  rep.add_verdict("psi'' = psi0 on B_eta", R.match_residual <= 1e-10, 1e-10, R.match_residual);
  rep.add_verdict("||psi'' - psi'||_C0 < delta", R.ok && R.sup_change < delta, delta, R.sup_change);
  return finish(rep, c, t0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exterior calculus and variational checks for flat G2 and split-G2 structures"};
  app.require_subcommand(1);

  CommonOpts c;
  const auto t0 = std::chrono::steady_clock::now();

  // configuration file: --config beats G2FORMS_CONFIG beats ./g2forms.toml;
  // explicit flags override file values (the file loads before parsing)
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--config") == 0) config_path = argv[i + 1];
  if (config_path.empty()) {
    if (const char* env_cfg = std::getenv("G2FORMS_CONFIG")) config_path = env_cfg;
    else if (std::ifstream("g2forms.toml").good()) config_path = "g2forms.toml";
  }
  try {
    if (!config_path.empty()) load_config(config_path, c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }


  std::string literal, flavor = "compact", family = "P0+", lemma = "p0", packing = "grid128";
  double eta = 1.0, nu = 0.97, dt = 1e-4, s = 1e-2, delta = 1e-2, perturbation = 1e-2;
  int sign = +1, rounds = 3, k = 5, grid = 256, steps = 10;

  auto* cd = app.add_subcommand("decompose", "type components and certificates of a form literal");
  cd->add_option("form", literal, "form literal, e.g. 'dx[1,2,3] - 2/3 dx[4,5,6]'")->required();
  cd->add_option("--flavor", flavor, "compact | split")->check(CLI::IsMember({"compact", "split"}));
  add_common(cd, c);

  auto* ch = app.add_subcommand("hessian", "second variation along one named family");
  ch->add_option("--family", family, "P0+ P0- SG3+ SG3- SG4+ SG4- CH-")->required();
  ch->add_option("--eta", eta, "ball radius");
  add_common(ch, c);

  auto* cv = app.add_subcommand("verify-lemma", "sign-definite Hessians and finite perturbations");
  cv->add_option("lemma", lemma, "p0 | sg3 | sg4 | ch")->required();
  cv->add_option("--eta", eta, "ball radius");
  add_common(cv, c);

  auto* cu = app.add_subcommand("unbounded", "geometric growth/decay rounds on a packed box");
  cu->add_option("--sign", sign, "+1 or -1")->check(CLI::IsMember({1, -1}));
  cu->add_option("--rounds", rounds, "number of rounds");
  cu->add_option("--nu", nu, "allowed uncovered fraction");
  cu->add_option("--packing", packing, "grid64 | grid128 | grid2187 | d7-4 | d7-6 | d7-8");
  add_common(cu, c);

  auto* cs = app.add_subcommand("saddle", "Gram matrix of k disjoint one-sign bumps");
  cs->add_option("--k", k, "number of bumps");
  cs->add_option("--sign", sign, "+1 or -1")->check(CLI::IsMember({1, -1}));
  cs->add_option("--eta", eta, "bump radius");
  add_common(cs, c);

  auto* cc = app.add_subcommand("coflow", "reduced Laplacian coflow on a flat torus");
  cc->add_option("--grid", grid, "nodes along the active coordinate");
  cc->add_option("--s", s, "perturbation amplitude");
  cc->add_option("--dt", dt, "Euler step");
  cc->add_option("--steps", steps, "number of steps");
  add_common(cc, c);

  auto* ck = app.add_subcommand("hk-bound", "ball/sphere volume bound saturation");
  ck->add_option("--eta", eta, "ball radius");
  add_common(ck, c);

  auto* cg = app.add_subcommand("glue", "make a perturbed closed 4-form standard near 0");
  cg->add_option("--delta", delta, "C0 budget for the correction");
  cg->add_option("--perturbation", perturbation, "linear-coefficient perturbation size");
  add_common(cg, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
  }

  try {
    if (cd->parsed()) return cmd_decompose(literal, flavor, c, t0);
    if (ch->parsed()) return cmd_hessian(family, eta, c, t0);
    if (cv->parsed()) return cmd_verify_lemma(lemma, eta, c, t0);
    if (cu->parsed()) return cmd_unbounded(sign, rounds, nu, packing, c, t0);
    if (cs->parsed()) return cmd_saddle(k, sign, eta, c, t0);
    if (cc->parsed()) return cmd_coflow(grid, s, dt, steps, c, t0);
    if (ck->parsed()) return cmd_hk(eta, c, t0);
    if (cg->parsed()) return cmd_glue(delta, perturbation, c, t0);
  } catch (const g2f::Error& e) {
    std::cerr << "verification error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
