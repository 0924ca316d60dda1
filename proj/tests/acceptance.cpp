// Acceptance run: one PASS/FAIL line per criterion, with timings and details.

#include "oracles.hpp"

#include "qes/cli.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

using namespace qes;
using nlohmann::json;

namespace {

const MultiPoly X = MultiPoly::var(Var::x);
const MultiPoly Y = MultiPoly::var(Var::y);

struct Check {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
};

std::filesystem::path config_dir;

json config(const std::string& name) { return cli::load_config((config_dir / name).string()); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Check hex_determinant() {
  Check out;
  const MultiPoly expected = X * Y * (MultiPoly(1) + X + Y);
  int checked = 0;
  for (const Rational c : {Rational(-1), Rational(0), ratio(1, 2), Rational(2)})
    for (const Rational j : {ratio(1, 2), Rational(1), Rational(2)}) {
      const MultiPoly det = det_metric(extract_metric(build_hex(c, j, j + 1)));
      out.require(det == expected, "det for c = " + to_string(c) + " is " + to_string(det));
      ++checked;
    }
  out.summary = "det g = x*y*(1 + x + y) exactly for " + std::to_string(checked) + " (c, j, jt) choices";
  return out;
}

Check generator_invariance() {
  Check out;
  int ops = 0, boundary = 0;
  for (unsigned n = 1; n <= 8; ++n) {
    const auto j = make_sl2(n);
    const auto space = MonomialSpace::one_d(n);
    for (const auto* op : {&j.minus, &j.zero, &j.plus}) {
      out.require(is_invariant(*op, space).invariant, "sl2 generator on F_" + std::to_string(n));
      ++ops;
    }
  }
  for (unsigned m = 1; m <= 3; ++m)
    for (unsigned n = 1; n <= 5; ++n) {
      const Gen2D g = make_gen2d(m, n);
      const MonomialSpace space = basis(m, n);
      for (const auto& op : g.all()) {
        out.require(is_invariant(op, space).invariant, "gen2d operator on F_{" + std::to_string(m) + "," +
                                                           std::to_string(n) + "}: " + to_string(op));
        ++ops;
      }
      for (const auto& e : space.basis())
        if (m * e[0] + e[1] == m * n) {
          out.require(apply(g.Lmn, MultiPoly::monomial(e)).is_zero(), "L_mn on boundary monomial");
          ++boundary;
        }
    }
  out.summary = std::to_string(ops) + " generator/module pairs invariant, L_{m,n} kills " + std::to_string(boundary) +
                " boundary monomials";
  return out;
}

bool gauge_matches(const FamilyInstance& inst, const Prefactor& pre) {
  const DiffOp h = hamiltonian(inst);
  return gauge_factor_check(gauge_field(h, extract_metric(h)), log_grad(pre));
}

std::vector<Prefactor> perturbations(const Prefactor& pre, const Rational& delta) {
  std::vector<Prefactor> out;
  for (std::size_t i = 0; i < pre.powers.size(); ++i) {
    out.push_back(pre);
    out.back().powers[i].exponent += delta;
  }
  if (pre.arctan) {
    out.push_back(pre);
    out.back().arctan->gamma += delta;
  }
  for (std::size_t i = 0; i < pre.exps.size(); ++i) {
    out.push_back(pre);
    out.back().exps[i].coeff += delta;
  }
  return out;
}

Check family_identities() {
  Check out;
  std::mt19937_64 rng(20240611);
  std::vector<FamilyInstance> insts;
  for (Variant v : h2_variants())
    for (unsigned i = 0; i < 20; ++i) insts.push_back(sample_instance(v, 1 + i % 3, rng));
  const auto reports = sweep_identities(insts, 4);
  for (std::size_t i = 0; i < insts.size(); ++i)
    out.require(reports[i].all_pass() && reports[i].n_max == 4,
                to_string(insts[i].variant) + " " + to_json(insts[i]).dump());

  int perturbed = 0, caught = 0;
  for (Variant v : h2_variants())
    for (int draw = 0; draw < 4; ++draw) {
      const FamilyInstance inst = sample_instance(v, 1 + draw % 2, rng);
      const Prefactor pre = prefactor_of(inst);
      for (const Prefactor& p : perturbations(pre, ratio(1, 1000))) {
        ++perturbed;
        caught += gauge_matches(inst, p) ? 0 : 1;
      }
    }
  out.require(perturbed == caught, "exponent perturbations caught " + std::to_string(caught) + "/" +
                                       std::to_string(perturbed));

  int broken = 0, closure_failed = 0;
  for (int draw = 0; draw < 10; ++draw) {
    FamilyInstance inst = sample_instance(Variant::P1y_SolC, 1 + draw % 3, rng);
    inst.qm = inst.qm + MultiPoly(1) + Y;
    inst.Q1 += oracle::nonzero_rational(rng);
    const DiffOp h = -build_H2_unchecked(inst);
    ++broken;
    closure_failed += closure_check(gauge_field(h, extract_metric(h))) ? 0 : 1;
  }
  out.require(broken == closure_failed, "SolC constraint breaks caught " + std::to_string(closure_failed) + "/" +
                                            std::to_string(broken));
  out.summary = std::to_string(insts.size()) + " instances (20 per variant, n <= 4) pass all identities; " +
                std::to_string(caught) + "/" + std::to_string(perturbed) + " exponent perturbations and " +
                std::to_string(closure_failed) + "/" + std::to_string(broken) + " SolC constraint breaks detected";
  return out;
}

Check spectral_pattern() {
  Check out;
  std::mt19937_64 rng(77);
  std::vector<Variant> variants = h2_variants();
  variants.push_back(Variant::HexExample);
  int instances = 0, rational = 0, pairs = 0;
  for (int i = 0; i < 50; ++i) {
    const Variant v = variants[i % variants.size()];
    const FamilyInstance inst = sample_instance(v, 1 + (i / 7) % 2, rng);
    const unsigned n = 1 + (i / 14) % 2;
    const DiffOp h = hamiltonian(inst);
    const MonomialSpace space = space_of(inst, n);
    const RatMatrix mat = matrix_of(h, space);
    const std::string tag = to_string(v) + " n=" + std::to_string(n) + " " + to_json(inst).dump();
    SpectralPattern s;
    try {
      s = eigenvalues(mat, 1e-9);
    } catch (const RootFindingFailure& e) {
      out.require(false, tag + ": " + e.what());
      continue;
    }
    out.require(s.is_real_or_paired() && s.count() == space.dim(), "pattern of " + tag);
    for (double r : s.residuals) out.require(r <= 1e-9, "residual of " + tag);
    pairs += static_cast<int>(s.pair_eigs.size());
    std::set<Rational> seen;
    for (const auto& eig : s.rational_eigs) {
      if (!seen.insert(eig).second) continue;
      const auto polys = eigenpolynomials(mat, space, eig);
      out.require(!polys.empty(), "eigenpolynomial for " + to_string(eig));
      for (const auto& p : polys) {
        MultiPoly ep = p;
        ep.scale(eig);
        out.require(apply(h, p) == ep, "H'p = Ep for " + to_string(eig) + " in " + tag);
        ++rational;
      }
    }
    ++instances;
  }
  out.summary = std::to_string(instances) + " instances real or conjugate-paired (" + std::to_string(pairs) +
                " pairs), " + std::to_string(rational) + " exact eigenpolynomials with H'p - Ep = 0";
  return out;
}

Check dimension_oracle() {
  Check out;
  int checked = 0;
  for (unsigned m = 1; m <= 8; ++m)
    for (unsigned n = 1; n <= 8; ++n) {
      const std::size_t brute = oracle::enumerate_dim(m, n);
      out.require(basis(m, n).dim() == brute && dim_formula(m, n) == brute,
                  "dim F_{" + std::to_string(m) + "," + std::to_string(n) + "}");
      ++checked;
    }
  out.summary = "dim F_{m,n} = (n+1) + m n (n+1)/2 matches enumeration for " + std::to_string(checked) + " (m, n)";
  return out;
}

json classify_report(const json& cfg) {
  const auto r = cli::run_classify(cfg, {});
  if (r.exit_code == cli::ConfigFailure) throw std::runtime_error(r.report.dump());
  return json::parse(r.report.dump());
}

Check demo_verdicts() {
  Check out;
  std::vector<std::string> reds;
  auto sub = [&](const std::string& id, bool ok, const std::string& text) {
    out.details.push_back(id + (ok ? " PASS " : " FAIL ") + text);
    if (!ok) {
      out.pass = false;
      reds.push_back(id);
    }
  };

  {
    const json cfg = config("hex_pseudo_hermitian.json");
    const json v = classify_report(cfg)["verdict"];
    const bool ok = v["outcome"] == "PseudoHermitianCandidate" && v["hermitian"] == false &&
                    v["quadrature"]["trend"] == "converging" && v["spectrum"]["real_or_paired"] == true;
    sub("6a", ok,
        "Hex, first quadrant, operator c = " + cfg["instance"]["c"].get<std::string>() +
            " (wavefunction e^{alpha (xy + x + y)} with alpha = " + v["exponents"]["alpha"].get<std::string>() +
            " < 0): " + v["outcome"].get<std::string>() + ", hermiticity fails, quadrature " +
            v["quadrature"]["trend"].get<std::string>());
  }
  {
    bool ok = true;
    std::string seen;
    for (const std::string region : {"I_R", "I_L", "II_R", "II_L"}) {
      json cfg = config(region[1] == 'I' ? "sol1_region_II_R.json" : "sol1_region_I_R.json");
      if (region.back() == 'L') {
        cfg["domain"].erase("y_min");
        cfg["domain"]["y_max"] = "0";
        cfg["domain"]["label"] = region;
      }
      const json v = classify_report(cfg)["verdict"];
      const json& w = v["normalizability"]["witness"];
      const bool region_ok = v["outcome"] == "NotQES" && !w.is_null() &&
                             w["first"]["requirement"] == "needs beta > -1/2" &&
                             w["second"]["requirement"] == "needs beta < -1/2 - d" &&
                             v["quadrature"]["trend"] == "diverging";
      ok = ok && region_ok;
      seen += (seen.empty() ? "" : ", ") + region + (region_ok ? " ok" : " WRONG");
    }
    sub("6b", ok,
        "P1y_Sol1 regions " + seen + ": NotQES, witness boundary needs beta > -1/2, x -> inf needs beta < -1/2 - d "
        "(d = Pol degree; -1/2 for the ground state)");
  }
  {
    const json v = classify_report(config("sol3_half_plane.json"))["verdict"];
    const bool ok = v["outcome"] == "HermitianQES" && v["normalizability"]["max_pol_degree"].is_number();
    std::string text = "P1y_Sol3 on y >= 0 (alpha = " + v["exponents"]["alpha"].get<std::string>() +
                       ", beta = " + v["exponents"]["beta"].get<std::string>() + "): expected HermitianQES, got " +
                       v["outcome"].get<std::string>();
    sub("6c", ok, text);
    if (!ok && !v["normalizability"]["witness"].is_null()) {
      const json& w = v["normalizability"]["witness"];
      out.details.push_back("   analysis: " + w["second"]["where"].get<std::string>() + " " +
                            w["second"]["requirement"].get<std::string>() + " (value " +
                            w["second"]["value"].get<std::string>() + ")");
      out.details.push_back("   analysis: " + w["first"]["where"].get<std::string>() + " " +
                            w["first"]["requirement"].get<std::string>() + " (value " +
                            w["first"]["value"].get<std::string>() + ")");
      out.details.push_back(
          "   analysis: the corner is where the complex roots xi1 +- i xi2 y^k meet the line y = 0; |psi|^2 sqrt(g) "
          "behaves like r^(2 alpha + 4 beta + 1) there, which needs 2 alpha + 4 beta + 2 > 0, the opposite of "
          "the condition at infinity. No alpha, beta (in particular none with beta <= -5) satisfy both, and the "
          "quadrature trend is " + v["quadrature"]["trend"].get<std::string>() + ".");
    }
  }
  {
    const json v = classify_report(config("bounded_region.json"))["verdict"];
    const bool ok = v["outcome"] == "ExactlySolvableBoundedRegion" && v["quadrature"]["trend"] == "converging";
    sub("6d", ok, "bounded region 0 <= x <= -y^2 + 3y - 2: " + v["outcome"].get<std::string>() + ", quadrature " +
                      v["quadrature"]["trend"].get<std::string>());
  }
  std::string red_list;
  for (const auto& r : reds) red_list += " " + r;
  out.summary = reds.empty() ? "all four demo verdicts reproduced" : "not reproduced:" + red_list;
  return out;
}

Check analytic_numeric_agreement() {
  Check out;
  std::vector<std::pair<std::string, json>> cases;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir)) {
    const json cfg = cli::load_config(entry.path().string());
    if (cfg.contains("domain")) cases.emplace_back(entry.path().filename().string(), cfg);
  }
  std::sort(cases.begin(), cases.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const std::string c : {"1/2", "1", "3", "-1", "-1/4"}) {
    json cfg = config("hex_pseudo_hermitian.json");
    cfg["instance"]["c"] = c;
    cfg.erase("expect");
    cases.emplace_back("hex c = " + c, cfg);
  }
  for (const std::string q1 : {"1/4", "3/4", "2"}) {
    json cfg = config("bounded_region.json");
    cfg["instance"]["Q1"] = q1;
    cfg.erase("expect");
    cases.emplace_back("bounded Q1 = " + q1, cfg);
  }
  for (const std::string q0 : {"7/2", "-3", "5"}) {
    json cfg = config("sol1_region_I_R.json");
    cfg["instance"]["q0"] = q0;
    cfg.erase("expect");
    cases.emplace_back("sol1 I_R q0 = " + q0, cfg);
  }

  int decided = 0, agreeing = 0, undecided = 0;
  for (const auto& [name, cfg] : cases) {
    json v;
    try {
      v = classify_report(cfg)["verdict"];
    } catch (const std::exception& e) {
      out.require(false, name + " did not run: " + e.what());
      continue;
    }
    const std::string norm = v["normalizability"]["verdict"];
    if (norm == "Inconclusive") {
      ++undecided;
      continue;
    }
    ++decided;
    const std::string trend = v["quadrature"].is_null() ? "none" : v["quadrature"]["trend"].get<std::string>();
    const bool agree = (norm == "Normalizable" && trend == "converging") || (norm == "Divergent" && trend == "diverging");
    agreeing += agree ? 1 : 0;
    out.details.push_back(name + ": " + norm + " / " + trend + (agree ? "" : "  <-- disagree"));
    if (!agree) out.pass = false;
  }
  out.require(decided >= 10, "too few decided cases");
  out.summary = std::to_string(agreeing) + "/" + std::to_string(decided) + " decided cases agree (" +
                std::to_string(undecided) + " undecided, excluded)";
  return out;
}

cli::CommandResult dispatch(const json& cfg) {
  if (cfg.contains("domain")) return cli::run_classify(cfg, {});
  if (cfg.contains("y_range")) return cli::run_boundary_plot(cfg, {});
  if (cfg.contains("n_max") || cfg.contains("sweep")) return cli::run_verify(cfg, {});
  return cli::run_spectrum(cfg, {});
}

std::string fingerprint(const cli::CommandResult& r) {
  std::string s = std::to_string(r.exit_code) + "\n" + r.report.dump(2);
  for (const auto& f : r.files) s += "\n--- " + f.name + "\n" + f.content;
  return s;
}

Check determinism() {
  Check out;
  const int threads = std::max(4, omp_get_max_threads());
  int configs = 0;
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir)) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    const json cfg = cli::load_config(path.string());
    omp_set_num_threads(threads);
    const std::string first = fingerprint(dispatch(cfg));
    const std::string second = fingerprint(dispatch(cfg));
    omp_set_num_threads(1);
    const std::string serial = fingerprint(dispatch(cfg));
    omp_set_num_threads(threads);
    out.require(first == second && first == serial, path.filename().string() + " differs between runs");
    ++configs;
  }
  out.summary = std::to_string(configs) + " demo configs byte-identical over two runs with " + std::to_string(threads) +
                " threads and one run with 1 thread";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-8"};
  std::string dir = QES_CONFIG_DIR;
  std::vector<std::string> expect_red;
  app.add_option("--configs", dir, "directory of demo configs");
  app.add_option("--expect-red", expect_red, "criteria known to fail; exit 0 only if exactly these fail");
  CLI11_PARSE(app, argc, argv);
  config_dir = dir;

  struct Criterion {
    std::string id;
    std::string name;
    double limit;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {"1", "hex determinant", 1, hex_determinant},
      {"2", "generator invariance", 5, generator_invariance},
      {"3", "family identity suite", 60, family_identities},
      {"4", "spectral pattern", 30, spectral_pattern},
      {"5", "dimension oracle", 1, dimension_oracle},
      {"6", "demo verdicts", 120, demo_verdicts},
      {"7", "analytic/numeric agreement", 0, analytic_numeric_agreement},
      {"8", "determinism", 0, determinism},
  };

  std::set<std::string> red;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs > c.limit) {
      o.pass = false;
      o.details.push_back("over the time limit");
    }
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.summary
              << "  [" << fmt(secs) << " s" << (c.limit > 0 ? " / " + fmt(c.limit) + " s" : std::string()) << "]\n";
    for (const auto& d : o.details) std::cout << "    " << d << "\n";
    if (!o.pass) red.insert(c.id);
  }

  const std::set<std::string> expected(expect_red.begin(), expect_red.end());
  if (!expected.empty()) {
    std::cout << "known red criteria:";
    for (const auto& e : expected) std::cout << " " << e;
    std::cout << (red == expected ? " (exactly these failed)" : " (MISMATCH with this run)") << "\n";
  }
  return red == expected ? 0 : 1;
}
