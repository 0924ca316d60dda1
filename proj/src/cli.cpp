#include "qes/cli.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <system_error>

#include <unistd.h>

namespace qes::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& config, const std::set<std::string>& allowed, const std::string& command) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : config.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' for " + command);
}

unsigned read_unsigned(const json& config, const std::string& key, unsigned fallback, unsigned min = 0) {
  if (!config.contains(key)) return fallback;
  const json& v = config.at(key);
  if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > 1000)
    throw ConfigError("'" + key + "' must be an integer in [" + std::to_string(min) + ", 1000]");
  return v.get<unsigned>();
}

double read_positive(const json& config, const std::string& key, double fallback) {
  if (!config.contains(key)) return fallback;
  const json& v = config.at(key);
  if (!v.is_number() || !(v.get<double>() > 0)) throw ConfigError("'" + key + "' must be a positive number");
  return v.get<double>();
}

FamilyInstance read_instance(const json& config) {
  if (!config.contains("instance")) throw ConfigError("config needs an 'instance'");
  FamilyInstance inst = instance_from_json(config.at("instance"));
  validate(inst);
  return inst;
}

double tolerance(const json& config, const CommandOptions& opts) {
  if (opts.tol) {
    if (!(*opts.tol > 0)) throw ConfigError("--tol must be positive");
    return *opts.tol;
  }
  return read_positive(config, "tol", 1e-9);
}

QuadratureOptions read_quadrature(const json& q, bool& enabled) {
  QuadratureOptions opts;
  enabled = true;
  if (q.is_boolean()) {
    enabled = q.get<bool>();
    return opts;
  }
  check_keys(q, {"size", "offset", "levels", "refine_depth"}, "quadrature");
  opts.size = read_positive(q, "size", opts.size);
  opts.offset = read_positive(q, "offset", opts.offset);
  opts.levels = read_unsigned(q, "levels", opts.levels, 3);
  opts.refine_depth = read_unsigned(q, "refine_depth", opts.refine_depth);
  return opts;
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Fn>
CommandResult guarded(const std::string& command, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return {ConfigFailure, ordered_json{{"command", command}, {"error", std::string("config: ") + e.what()}}, {}};
  } catch (const InvalidParams& e) {
    return {ConfigFailure, ordered_json{{"command", command}, {"error", std::string("invalid parameters: ") + e.what()}}, {}};
  } catch (const DegenerateParams& e) {
    return {ConfigFailure, ordered_json{{"command", command}, {"error", std::string("degenerate parameters: ") + e.what()}}, {}};
  } catch (const InvalidDomain& e) {
    return {ConfigFailure, ordered_json{{"command", command}, {"error", std::string("invalid domain: ") + e.what()}}, {}};
  } catch (const UnmatchedBoundary& e) {
    return {ConfigFailure, ordered_json{{"command", command}, {"error", std::string("unmatched boundary: ") + e.what()}}, {}};
  }
}

/// Real boundary curves x = xi(y) of the determinant, per variant.
std::vector<std::pair<std::string, MultiPoly>> curves_of(const FamilyInstance& inst) {
  const MultiPoly y = MultiPoly::var(Var::y);
  switch (inst.variant) {
    case Variant::HexExample:
      return {{"x0", MultiPoly{}}, {"x1", -(MultiPoly(1) + y)}};
    case Variant::P1y_Sol2: {
      const auto k = static_cast<unsigned>(Rational(1 / inst.P2).get_num().get_ui());
      MultiPoly xi2 = inst.xi1 + y.pow(k) * MultiPoly(inst.xi2_scalar);
      return {{"xi1", inst.xi1}, {"xi2", xi2}};
    }
    case Variant::P1y_Sol3:
      return {};
    default:
      return {{"xi1", inst.xi1}, {"xi2", inst.xi2}};
  }
}

int sign_of(const Rational& r) { return sgn(r); }

}  // namespace

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

CommandResult run_verify(const json& config, const CommandOptions& opts) {
  return guarded("verify", [&]() -> CommandResult {
    check_keys(config, {"description", "instance", "n_max", "sweep"}, "verify");
    const unsigned n_max = read_unsigned(config, "n_max", 2, 1);
    ordered_json report{{"command", "verify"}, {"n_max", n_max}};

    if (config.contains("sweep")) {
      if (config.contains("instance")) throw ConfigError("give either 'instance' or 'sweep', not both");
      const json& sw = config.at("sweep");
      check_keys(sw, {"variants", "m", "count"}, "sweep");
      const unsigned m = read_unsigned(sw, "m", 1, 1);
      const unsigned count = read_unsigned(sw, "count", 10, 1);
      std::vector<Variant> variants;
      if (sw.contains("variants")) {
        if (!sw["variants"].is_array() || sw["variants"].empty()) throw ConfigError("'variants' must be a non-empty array");
        for (const auto& tag : sw["variants"]) {
          if (!tag.is_string()) throw ConfigError("'variants' entries must be strings");
          try {
            variants.push_back(variant_from_string(tag.get<std::string>()));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
          }
          if (variants.back() == Variant::HexExample) throw ConfigError("HexExample has no random sampler");
        }
      } else {
        variants = h2_variants();
      }
      std::mt19937_64 rng(opts.seed);
      std::vector<FamilyInstance> insts;
      for (Variant v : variants)
        for (unsigned i = 0; i < count; ++i) insts.push_back(sample_instance(v, m, rng));
      const auto results = sweep_identities(insts, n_max);
      ordered_json rows = ordered_json::array();
      std::size_t failures = 0;
      for (std::size_t i = 0; i < insts.size(); ++i) {
        if (!results[i].all_pass()) ++failures;
        rows.push_back(ordered_json{{"instance", to_json(insts[i])}, {"report", to_json(results[i])}});
      }
      report["seed"] = opts.seed;
      report["instances"] = insts.size();
      report["failures"] = failures;
      report["results"] = rows;
      return {failures == 0 ? Pass : CheckFailure, report, {}};
    }

    const FamilyInstance inst = read_instance(config);
    report["instance"] = to_json(inst);
    report["exponents"] = to_json(exponents_of(inst));
    const IdentityReport r = check_identities(inst, n_max);
    report["report"] = to_json(r);
    return {r.all_pass() ? Pass : CheckFailure, report, {}};
  });
}

CommandResult run_spectrum(const json& config, const CommandOptions& opts) {
  return guarded("spectrum", [&]() -> CommandResult {
    check_keys(config, {"description", "instance", "n", "tol"}, "spectrum");
    const FamilyInstance inst = read_instance(config);
    const unsigned n = read_unsigned(config, "n", 1, 1);
    const double tol = tolerance(config, opts);
    const DiffOp h = hamiltonian(inst);
    const MonomialSpace space = space_of(inst, n);

    ordered_json report{{"command", "spectrum"}, {"instance", to_json(inst)}, {"n", n}, {"space", space.describe()},
                        {"dim", space.dim()}};
    ordered_json basis = ordered_json::array();
    for (const auto& e : space.basis()) basis.push_back(monomial_text(e));
    report["basis"] = basis;

    const InvarianceResult inv = is_invariant(h, space);
    if (!inv.invariant) {
      report["invariant"] = false;
      report["witness"] = describe(*inv.witness);
      return {CheckFailure, report, {}};
    }
    report["invariant"] = true;

    const RatMatrix mat = matrix_of(h, space);
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < mat.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (std::size_t j = 0; j < mat.cols(); ++j) row.push_back(to_string(mat(i, j)));
      rows.push_back(row);
    }
    report["matrix"] = rows;
    report["char_poly"] = to_string(char_poly(mat), "lambda");
    const SpectralPattern pattern = eigenvalues(mat, tol);
    report["spectrum"] = to_json(pattern);

    ordered_json eigpolys = ordered_json::array();
    bool exact_ok = true;
    std::set<Rational> seen;
    for (const auto& eig : pattern.rational_eigs) {
      if (!seen.insert(eig).second) continue;
      ordered_json polys = ordered_json::array();
      for (const auto& p : eigenpolynomials(mat, space, eig)) {
        MultiPoly scaled_p = p;
        scaled_p.scale(eig);
        const bool holds = apply(h, p) == scaled_p;
        exact_ok = exact_ok && holds;
        polys.push_back(ordered_json{{"poly", to_string(p)}, {"exact", holds}});
      }
      eigpolys.push_back(ordered_json{{"eigenvalue", to_string(eig)}, {"eigenpolynomials", polys}});
    }
    report["rational_eigenpairs"] = eigpolys;
    const bool pass = exact_ok && pattern.is_real_or_paired();
    return {pass ? Pass : CheckFailure, report, {}};
  });
}

CommandResult run_classify(const json& config, const CommandOptions& opts) {
  return guarded("classify", [&]() -> CommandResult {
    check_keys(config, {"description", "instance", "domain", "n", "tol", "quadrature", "expect"}, "classify");
    const FamilyInstance inst = read_instance(config);
    if (!config.contains("domain")) throw ConfigError("config needs a 'domain'");
    const DomainSpec domain = domain_from_json(config.at("domain"));
    const unsigned n = read_unsigned(config, "n", 1, 1);
    ClassifyOptions copts;
    copts.tol = tolerance(config, opts);
    if (config.contains("quadrature")) copts.quad = read_quadrature(config.at("quadrature"), copts.quadrature);
    std::optional<std::string> expect;
    if (config.contains("expect")) {
      if (!config["expect"].is_string()) throw ConfigError("'expect' must be an outcome name");
      expect = config["expect"].get<std::string>();
      static const std::set<std::string> names{"HermitianQES", "PseudoHermitianCandidate", "NotQES",
                                               "ExactlySolvableBoundedRegion", "Inconclusive"};
      if (!names.contains(*expect)) throw ConfigError("unknown outcome '" + *expect + "' in 'expect'");
    }

    const Verdict v = classify(inst, domain, n, copts);
    ordered_json report{{"command", "classify"}, {"instance", to_json(inst)}, {"domain", to_json(domain)}, {"n", n}};
    report["verdict"] = to_json(v);

    std::vector<std::string> problems;
    if (v.quadrature) {
      const Trend t = v.quadrature->trend;
      if (v.norm.verdict == NormVerdict::Normalizable && t == Trend::Diverging)
        problems.push_back("quadrature diverges although the exponents say normalizable");
      if (v.norm.verdict == NormVerdict::Divergent && t == Trend::Converging)
        problems.push_back("quadrature converges although the exponents say divergent");
    }
    if (expect && *expect != to_string(v.outcome))
      problems.push_back("expected " + *expect + ", got " + to_string(v.outcome));
    report["problems"] = problems;

    int code = Pass;
    if (!problems.empty())
      code = CheckFailure;
    else if (v.outcome == Outcome::Inconclusive)
      code = Undecided;
    return {code, report, {}};
  });
}

CommandResult run_boundary_plot(const json& config, const CommandOptions&) {
  return guarded("boundary-plot", [&]() -> CommandResult {
    check_keys(config, {"description", "instance", "y_range", "samples"}, "boundary-plot");
    const FamilyInstance inst = read_instance(config);
    if (!config.contains("y_range") || !config["y_range"].is_array() || config["y_range"].size() != 2)
      throw ConfigError("'y_range' must be [y_min, y_max]");
    const Rational lo = rational_from_json(config["y_range"][0], "y_range[0]");
    const Rational hi = rational_from_json(config["y_range"][1], "y_range[1]");
    if (!(lo < hi)) throw ConfigError("empty y_range: need y_min < y_max");
    const unsigned samples = read_unsigned(config, "samples", 41, 2);

    const auto curves = curves_of(inst);
    const MultiPoly det = expected_det(inst);
    ordered_json report{{"command", "boundary-plot"}, {"instance", to_json(inst)},
                        {"y_range", {to_string(lo), to_string(hi)}}, {"samples", samples}};

    std::vector<OutputFile> files;
    ordered_json curve_list = ordered_json::array();
    for (const auto& [name, xi] : curves) {
      std::string csv = "y,xi\n";
      for (unsigned i = 0; i < samples; ++i) {
        const Rational y = lo + (hi - lo) * ratio(i, samples - 1);
        csv += csv_double(to_double(y)) + "," + csv_double(to_double(eval(xi, {{Var::y, y}}))) + "\n";
      }
      files.push_back({"curve_" + name + ".csv", csv});
      curve_list.push_back(ordered_json{{"name", name}, {"xi", to_string(xi)}, {"file", "curve_" + name + ".csv"}});
    }
    report["curves"] = curve_list;
    report["lines"] = lo < 0 && hi > 0 ? ordered_json::array({"y = 0"}) : ordered_json::array();

    // Sample one point per region at a representative y on each side of y = 0.
    std::vector<std::pair<std::string, Rational>> sides;
    if (lo < 0) sides.emplace_back("L", (lo + (hi < 0 ? hi : Rational(0))) / 2);
    if (hi > 0) sides.emplace_back("R", ((lo > 0 ? lo : Rational(0)) + hi) / 2);
    ordered_json regions = ordered_json::array();
    for (const auto& [side, y] : sides) {
      std::vector<Rational> roots;
      for (const auto& c : curves) roots.push_back(eval(c.second, {{Var::y, y}}));
      std::vector<Rational> xs;
      if (roots.empty()) {
        xs.push_back(0);
      } else {
        const Rational a = *std::min_element(roots.begin(), roots.end());
        const Rational b = *std::max_element(roots.begin(), roots.end());
        xs.push_back(b + 1);
        xs.push_back(a - 1);
        if (a < b) xs.push_back((a + b) / 2);
      }
      for (const auto& x : xs) {
        int above = 0;
        ordered_json signs = ordered_json::array();
        for (const auto& r : roots) {
          const int s = sign_of(x - r);
          signs.push_back(s);
          if (s > 0) ++above;
        }
        std::string label;
        if (roots.empty())
          label = side;
        else if (above == static_cast<int>(roots.size()))
          label = "I_" + side;
        else if (above == 0)
          label = "II_" + side;
        else
          label = "III_" + side;
        regions.push_back(ordered_json{{"label", label},
                                       {"x", to_string(x)},
                                       {"y", to_string(y)},
                                       {"sign_x_minus_curves", signs},
                                       {"det_sign", sign_of(eval(det, {{Var::x, x}, {Var::y, y}}))}});
      }
    }
    report["regions"] = regions;
    return {Pass, report, files};
  });
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path + "': " + ec.message());
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"QES Hamiltonian toolkit: exact checks, spectra and classification"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  struct Sub {
    const char* name;
    const char* help;
    CommandResult (*run)(const json&, const CommandOptions&);
  };
  const Sub subs[] = {
      {"verify", "exact invariance, closure, determinant and gauge-factor checks", run_verify},
      {"spectrum", "matrix on F_{m,n}, characteristic polynomial, eigenvalues", run_spectrum},
      {"classify", "hermiticity, normalizability and the resulting class", run_classify},
      {"boundary-plot", "boundary curves as CSV plus region labels", run_boundary_plot},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_path, s.run == run_boundary_plot ? "output directory" : "report file (default stdout)");
    sub->add_option("--tol", tol, "floating-point tolerance for eigenvalue classification");
    sub->add_option("--seed", seed, "seed for random-instance sweeps");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Pass : ConfigFailure;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;

  CommandResult result;
  try {
    result = chosen->run(load_config(config_path), CommandOptions{tol, seed});
  } catch (const ConfigError& e) {
    result = {ConfigFailure, ordered_json{{"command", chosen->name}, {"error", std::string("config: ") + e.what()}}, {}};
  }
  if (result.report.contains("error")) std::cerr << "error: " << result.report["error"].get<std::string>() << "\n";

  const std::string text = result.report.dump(2) + "\n";
  try {
    if (chosen->run == run_boundary_plot && result.exit_code == Pass) {
      if (out_path.empty()) {
        std::cerr << "error: boundary-plot needs --out <directory>\n";
        return ConfigFailure;
      }
      std::filesystem::create_directories(out_path);
      for (const auto& f : result.files) write_atomic((std::filesystem::path(out_path) / f.name).string(), f.content);
      write_atomic((std::filesystem::path(out_path) / "regions.json").string(), text);
      std::cout << text;
    } else if (!out_path.empty() && chosen->run != run_boundary_plot) {
      write_atomic(out_path, text);
    } else {
      std::cout << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ConfigFailure;
  }
  return result.exit_code;
}

}  // namespace qes::cli
