#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cstrata/error.hpp"
#include "cstrata/oracles.hpp"
#include "json_io.hpp"
#include "svg.hpp"

using namespace cstrata;
using namespace cstrata::cli;

namespace {

struct Outputs {
  std::string report;
  std::string svg;
};

struct Result {
  json report;
  std::ostringstream summary;
  std::vector<std::pair<std::string, NewtonPolygon>> polygons;
  int code = 0;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("", "cannot write " + path);
  out << text;
}

// The JSON report goes to --report when given, otherwise to stdout with the
// summary moved to stderr.
void emit(const Result& r, const Outputs& out) {
  const std::string text = r.report.dump(2) + "\n";
  if (out.report.empty()) {
    std::cerr << r.summary.str();
    std::cout << text;
  } else {
    write_file(out.report, text);
    std::cout << r.summary.str();
  }
  if (!out.svg.empty()) write_file(out.svg, polygons_svg(r.polygons));
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

json ints(const std::vector<int>& v) {
  json out = json::array();
  for (int x : v) out.push_back(x);
  return out;
}

json dimension_json(const std::optional<DimensionEstimate>& d) {
  if (!d) return nullptr;
  return json{{"value", d->value}, {"confident", d->confident}, {"m1", d->m1}, {"m2", d->m2}};
}

Crystal load_crystal(const std::string& path) { return parse_crystal(load_json(path)); }

CrystalFamily load_family(const std::string& path, const std::string& shipped) {
  if (!shipped.empty()) {
    try {
      return shipped_family(shipped);
    } catch (const Error& e) {
      throw InputError("", e.what());
    }
  }
  if (path.empty()) throw InputError("", "one of --family or --shipped is required");
  return parse_family(load_json(path));
}

json crystal_header(const Crystal& c) {
  return json{{"p", c.p()}, {"n", c.n()}, {"s", c.s()}, {"rank", c.rank()}, {"field", field_json(*c.ring().field())}};
}

Result run_slopes(const Crystal& c) {
  Result r;
  const NewtonData nd = newton_data(c);
  r.report = json{{"command", "slopes"},
                  {"crystal", crystal_header(c)},
                  {"newton", polygon_json(nd.polygon)},
                  {"p_rank", nd.polygon.multiplicity(Rational(0))},
                  {"det_valuation", nd.det_valuation},
                  {"linearization_exponent", nd.e},
                  {"certified_precision", nd.precision}};
  r.summary << "Newton polygon " << nd.polygon.str() << ", p-rank " << nd.polygon.multiplicity(Rational(0))
            << ", v(det) = " << nd.det_valuation << "\n";
  r.polygons.emplace_back("Newton polygon " + nd.polygon.str(), nd.polygon);
  return r;
}

Result run_prank(const Crystal& c, bool stabilize) {
  Result r;
  const int slope = newton_slopes(c).multiplicity(Rational(0));
  const int stable = p_rank_stable(c);
  GeometricOptions opts;
  opts.confirm = stabilize;
  const int e1 = p_rank_via_E1(c, opts);
  const bool agree = slope == stable && stable == e1;
  r.report = json{{"command", "prank"},
                  {"crystal", crystal_header(c)},
                  {"p_rank", slope},
                  {"methods", json{{"newton_slope_zero", slope}, {"stable_rank", stable}, {"e1_count", e1}}},
                  {"agree", agree}};
  r.summary << "p-rank " << slope << " (slope 0 multiplicity), " << stable << " (stable rank), " << e1 << " (E1 count)"
            << (agree ? "" : ": DISAGREE") << "\n";
  r.code = agree ? 0 : 1;
  return r;
}

Result run_hodge(const Crystal& c) {
  Result r;
  const NewtonPolygon nu = newton_slopes(c);
  const HodgePolygon h = hodge_polygon(c.exact_lift() ? c.at_precision(std::max(c.s(), static_cast<int>(nu.height()) + 1)) : c);
  const bool mazur = lies_above(nu, h.as_polygon());
  r.report = json{{"command", "hodge"},
                  {"crystal", crystal_header(c)},
                  {"hodge_slopes", ints(h.slopes)},
                  {"newton", polygon_json(nu)},
                  {"newton_above_hodge", mazur},
                  {"divisible_by", h.slopes.empty() ? 0 : h.slopes.front()}};
  r.summary << "Hodge slopes {" << join(h.slopes) << "}, Newton " << nu.str() << (mazur ? " lies above" : " does NOT lie above")
            << " Hodge\n";
  r.polygons.emplace_back("Newton " + nu.str(), nu);
  r.polygons.emplace_back("Hodge {" + join(h.slopes) + "}", h.as_polygon());
  r.code = mazur ? 0 : 1;
  return r;
}

Result run_hom(const Crystal& c, int b) {
  Result r;
  const HomGroup g = hom_group(c, b);
  r.report = json{{"command", "hom"}, {"crystal", crystal_header(c)}, {"b", b}, {"invariant_factor_exponents", ints(g.exponents)},
                  {"log_order", g.log_order()}};
  r.summary << "Hom(E_" << b << ", C) over W_" << c.s() << ": invariant factors p^{" << join(g.exponents) << "}, order p^"
            << g.log_order() << "\n";
  return r;
}

Result run_exterior(const Crystal& c, int a) {
  Result r;
  const NewtonPolygon nu = newton_slopes(c);
  const Crystal w = exterior_power_crystal(c, a);
  const NewtonPolygon direct = newton_slopes(w);
  const NewtonPolygon formula = exterior_power(nu, a);
  r.report = json{{"command", "exterior"}, {"crystal", crystal_header(c)}, {"a", a}, {"newton", polygon_json(nu)},
                  {"exterior_newton", polygon_json(direct)}, {"from_slopes", polygon_json(formula)}, {"agree", direct == formula}};
  r.summary << "Newton polygon of the exterior power " << a << ": " << direct.str() << (direct == formula ? "" : " (subset sums give " + formula.str() + ")")
            << "\n";
  r.polygons.emplace_back("exterior power " + std::to_string(a) + " " + direct.str(), direct);
  r.code = direct == formula ? 0 : 1;
  return r;
}

Result run_iterate(const Crystal& c, int q) {
  Result r;
  const NewtonPolygon nu = newton_slopes(c);
  const NewtonPolygon direct = newton_slopes(iterate_crystal(c, q));
  const NewtonPolygon formula = scale_iterate(nu, q);
  r.report = json{{"command", "iterate"}, {"crystal", crystal_header(c)}, {"q", q}, {"newton", polygon_json(nu)},
                  {"iterate_newton", polygon_json(direct)}, {"scaled", polygon_json(formula)}, {"agree", direct == formula}};
  r.summary << "Newton polygon of the iterate q = " << q << ": " << direct.str() << "\n";
  r.polygons.emplace_back("iterate " + std::to_string(q) + " " + direct.str(), direct);
  r.code = direct == formula ? 0 : 1;
  return r;
}

Result run_split(const Crystal& c, int b) {
  Result r;
  // Derived summands live at the working precision; give exact input room.
  const Crystal work = c.exact_lift() ? c.at_precision(std::max(c.s(), c.linearization_exponent() * det_valuation(c) + 2)) : c;
  const SlopeSplitting sp = slope_splitting(work, b);
  json parts = json::object();
  auto part = [&](const char* name, const Crystal& x) {
    json j = crystal_json(x);
    if (x.rank() > 0) {
      const NewtonPolygon nu = newton_slopes(x);
      j["newton"] = polygon_json(nu);
      r.polygons.emplace_back(std::string(name) + " " + nu.str(), nu);
    }
    parts[name] = j;
  };
  part("slope_b", sp.slope_b);
  part("higher", sp.higher);
  r.report = json{{"command", "split"}, {"crystal", crystal_header(work)}, {"b", b}, {"summands", parts}, {"basis", matrix_json(sp.basis)}};
  r.summary << "slope-" << b << " summand of rank " << sp.slope_b.rank() << ", complement of rank " << sp.higher.rank() << " at precision "
            << work.s() << "\n";
  return r;
}

json count_json(const FiberCount& fc, u64 p) {
  json j{{"solvable", fc.solvable}, {"log_p", fc.log_p}, {"count", std::to_string(fc.count(p))}};
  if (fc.field_degree) j["field_degree"] = fc.field_degree;
  if (fc.confirmed_degree) j["confirmed_degree"] = fc.confirmed_degree;
  return j;
}

Result run_as_count(const ASSystem& sys, const std::string& point_text, int point_degree, int levels, bool stabilize) {
  Result r;
  const FieldPtr K = make_field(sys.p(), sys.base->deg() * point_degree);
  std::vector<FFElem> point;
  if (sys.params > 0) {
    if (point_text.empty()) throw InputError("", "the system has parameters; --point is required");
    point = parse_point(point_text, sys.params, K);
  }
  GeometricOptions opts;
  opts.confirm = stabilize;
  const FiberCount geo = geometric_count(sys, point, opts);
  json lv = json::array();
  for (int j = 1; j <= levels; ++j) lv.push_back(count_json(count_solutions(sys, point, point_degree * j), sys.p()));
  const ASSystem red = reduce_degree(sys);
  r.report = json{{"command", "as-count"},
                  {"system", json{{"field", field_json(*sys.base)}, {"params", sys.params}, {"vars", sys.vars()}, {"degree", degree(sys)},
                                  {"reduced_vars", red.vars()}, {"jacobian_is_identity", jacobian_is_identity(sys)}}},
                  {"point", point_text},
                  {"point_degree", point_degree},
                  {"geometric", count_json(geo, sys.p())},
                  {"levels", lv}};
  r.summary << "geometric fiber: p^" << geo.log_p << " = " << geo.count(sys.p()) << " points";
  if (geo.confirmed_degree) r.summary << " (reached over F_{p^" << geo.confirmed_degree << "})";
  r.summary << "\n";
  return r;
}

std::vector<std::string> split_keys(const std::string& text) {
  std::vector<std::string> raw, out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) raw.push_back(item);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].rfind("break:", 0) == 0 && raw[i].find(',') == std::string::npos && i + 1 < raw.size()) {
      out.push_back(raw[i] + "," + raw[i + 1]);
      ++i;
    } else if (!raw[i].empty()) {
      out.push_back(raw[i]);
    }
  }
  return out;
}

SweepOptions strata_options(const std::string& keys, int max_m) {
  SweepOptions opts;
  opts.max_m = max_m;
  opts.newton = opts.prank = false;
  for (const auto& k : split_keys(keys)) {
    if (k == "newton") opts.newton = true;
    else if (k == "prank") opts.prank = true;
    else if (k == "as") opts.as_counts = true;
    else if (k.rfind("break:", 0) == 0) {
      const std::string body = k.substr(6);
      const auto comma = body.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument(body);
        opts.breaks.push_back({std::stoi(body.substr(0, comma)), std::stoll(body.substr(comma + 1))});
      } catch (const std::exception&) {
        throw InputError("", "break stratum '" + k + "' is not of the form break:a,b");
      }
    } else {
      throw InputError("", "unknown stratum kind '" + k + "' (expected newton, prank, as or break:a,b)");
    }
  }
  return opts;
}

Result run_stratify(const CrystalFamily& f, const std::string& keys, int max_m) {
  Result r;
  const SweepOptions opts = strata_options(keys, max_m);
  const StrataReport sr = sweep(f, opts);
  json strata = json::array();
  for (const auto& st : sr.strata) {
    std::optional<DimensionEstimate> dim;
    try {
      dim = estimate_dimension(sr, st.key);
    } catch (const Error&) {
    }
    strata.push_back(json{{"key", st.key}, {"counts", counts_json(st.counts)}, {"dimension", dimension_json(dim)}});
    r.summary << st.key << ": " << (dim ? "dimension ~ " + std::to_string(dim->value).substr(0, 5) : std::string("dimension n/a"))
              << "\n";
    if (st.key.rfind("newton:", 0) == 0) r.polygons.emplace_back(st.key, parse_polygon(st.key.substr(7)));
  }
  json checks = json::object();
  if (opts.newton) {
    const CheckReport pc = partition_check(sr, opts.breaks);
    checks["partition"] = json{{"pass", pc.pass}, {"message", pc.message}};
    if (!pc.pass) r.code = 1;
  }
  r.report = json{{"command", "stratify"}, {"family", f.name()}, {"q", std::to_string(sr.q)}, {"params", sr.params},
                  {"max_m", sr.max_m},     {"strata", strata},  {"checks", checks}};
  return r;
}

Result run_purity(const CrystalFamily& f, const std::string& target, int max_m) {
  Result r;
  const PurityReport pr = purity_report(f, target, max_m);
  r.report = json{{"command", "purity"},
                  {"family", f.name()},
                  {"target", pr.target},
                  {"max_m", max_m},
                  {"pass", pr.pass},
                  {"boundary_empty", pr.boundary_empty},
                  {"target_dimension", dimension_json(pr.target_dim)},
                  {"closure_dimension", dimension_json(pr.closure_dim)},
                  {"boundary_dimension", dimension_json(pr.boundary_dim)},
                  {"codimension", pr.boundary_empty ? json(nullptr) : json(pr.codimension)},
                  {"closure_counts", counts_json(pr.closure_counts)},
                  {"boundary_counts", counts_json(pr.boundary_counts)},
                  {"message", pr.message}};
  r.summary << (pr.pass ? "PASS " : "FAIL ") << target << ": " << pr.message << "\n";
  r.code = pr.pass ? 0 : 1;
  return r;
}

Result run_verify(const std::string& suites, u64 seed) {
  Result r;
  std::vector<std::string> names;
  if (suites == "all") names = suite_names();
  else names = split_keys(suites);
  json reports = json::array();
  bool all = true;
  for (const auto& name : names) {
    OracleReport rep;
    try {
      rep = run_suite(name, seed);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidInput) throw InputError("", e.what());
      throw;
    }
    all = all && rep.pass();
    json failures = json::array(), notes = json::array();
    for (const auto& f : rep.failures) failures.push_back(f);
    for (const auto& n : rep.notes) notes.push_back(n);
    reports.push_back(json{{"name", rep.name}, {"pass", rep.pass()}, {"cases", std::to_string(rep.cases)},
                           {"failure_count", std::to_string(rep.failure_count)}, {"failures", failures}, {"notes", notes}});
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", rep.seconds);
    r.summary << (rep.pass() ? "PASS " : "FAIL ") << rep.name << ": " << rep.cases << " cases, " << rep.failure_count << " failures, "
              << secs << " s\n";
    for (const auto& f : rep.failures) r.summary << "  witness: " << f << "\n";
  }
  r.report = json{{"command", "verify"}, {"seed", std::to_string(seed)}, {"pass", all}, {"suites", reports}};
  r.code = all ? 0 : 1;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newton polygons, p-ranks and strata of F-crystals over finite fields"};
  app.require_subcommand(1);
  Outputs out;
  int threads = 0;
  app.add_option("--threads", threads, "worker threads for point sweeps (overrides CRYSTAL_STRATA_THREADS)")->check(CLI::PositiveNumber);

  auto add_outputs = [&](CLI::App* sub) {
    sub->add_option("-o,--report", out.report, "write the JSON report here instead of stdout");
    sub->add_option("--svg", out.svg, "write polygon figures as SVG");
  };

  std::string input;
  int b = 0, a = 1, q = 2;
  bool stabilize = false;
  std::function<Result()> job;

  auto crystal_cmd = [&](const std::string& name, const std::string& help, auto&& fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-i,--input", input, "crystal JSON")->required();
    add_outputs(sub);
    sub->callback([&, fn] { job = [&, fn] { return fn(load_crystal(input)); }; });
    return sub;
  };
  crystal_cmd("slopes", "Newton polygon and p-rank of a crystal", [](const Crystal& c) { return run_slopes(c); });
  crystal_cmd("prank", "p-rank by three methods", [&](const Crystal& c) { return run_prank(c, stabilize); })
      ->add_flag("--stabilize", stabilize, "confirm the E1 count over finite extensions");
  crystal_cmd("hodge", "Hodge polygon and the Newton-above-Hodge check", [](const Crystal& c) { return run_hodge(c); });
  crystal_cmd("hom", "Hom(E_b, C) at the working precision", [&](const Crystal& c) { return run_hom(c, b); })
      ->add_option("-b,--b", b, "slope of E_b")
      ->check(CLI::NonNegativeNumber);
  crystal_cmd("exterior", "Newton polygon of an exterior power", [&](const Crystal& c) { return run_exterior(c, a); })
      ->add_option("-a,--a", a, "exterior power")
      ->required();
  crystal_cmd("iterate", "Newton polygon of an iterate", [&](const Crystal& c) { return run_iterate(c, q); })
      ->add_option("-q,--q", q, "iterate")
      ->required();
  crystal_cmd("split", "splitting off the slope-b part", [&](const Crystal& c) { return run_split(c, b); })
      ->add_option("-b,--b", b, "bottom slope")
      ->required();

  std::string system_path, crystal_path, point;
  int point_degree = 1, levels = 1;
  CLI::App* as = app.add_subcommand("as-count", "solution counts of a generalized Artin-Schreier system");
  auto* sys_opt = as->add_option("--system", system_path, "system JSON");
  as->add_option("--crystal", crystal_path, "use the E1 system of this crystal")->excludes(sys_opt);
  as->add_option("--point", point, "parameter values as enumeration indices, e.g. \"t=0\" or \"t1=1,t2=3\"");
  as->add_option("--point-degree", point_degree, "coordinates lie in F_{q^m}")->check(CLI::PositiveNumber);
  as->add_option("--levels", levels, "also count over F_{q^{m j}} for j = 1..levels")->check(CLI::Range(1, 32));
  as->add_flag("--stabilize", stabilize, "confirm the geometric count over finite extensions");
  add_outputs(as);
  as->callback([&] {
    job = [&] {
      if (system_path.empty() == crystal_path.empty()) throw InputError("", "exactly one of --system or --crystal is required");
      const ASSystem sys = system_path.empty() ? from_crystal_E1(load_crystal(crystal_path)) : parse_system(load_json(system_path));
      return run_as_count(sys, point, point_degree, levels, stabilize);
    };
  });

  std::string family_path, shipped, strata = "newton,prank", target;
  int max_m = 0;
  auto family_opts = [&](CLI::App* sub) {
    auto* fam = sub->add_option("--family", family_path, "family JSON");
    sub->add_option("--shipped", shipped, "a built-in family (legendre-2, legendre-3, legendre-4-n2, ordinary-constant, "
                                          "supersingular-constant, triangular-2param)")
        ->excludes(fam);
    sub->add_option("--max-m", max_m, "largest extension degree swept (default: sized to the family)")->check(CLI::Range(1, 64));
    add_outputs(sub);
  };
  CLI::App* strat = app.add_subcommand("stratify", "sweep a family and count points per stratum");
  family_opts(strat);
  strat->add_option("--strata", strata, "comma-separated: newton, prank, as, break:a,b");
  strat->callback([&] {
    job = [&] {
      const CrystalFamily f = load_family(family_path, shipped);
      return run_stratify(f, strata, max_m > 0 ? max_m : default_max_m(f));
    };
  });
  CLI::App* pur = app.add_subcommand("purity", "boundary codimension of a stratum in its closure");
  family_opts(pur);
  pur->add_option("--target", target, "stratum key, e.g. prank:1 or newton:{0,1}")->required();
  pur->callback([&] {
    job = [&] {
      const CrystalFamily f = load_family(family_path, shipped);
      return run_purity(f, target, max_m > 0 ? max_m : default_max_m(f));
    };
  });

  std::string suites = "all";
  u64 seed = 0;
  CLI::App* ver = app.add_subcommand("verify", "run the brute-force oracle suites");
  ver->add_option("--suite", suites, "comma-separated suite names or 'all'");
  ver->add_option("--seed", seed, "random seed");
  ver->add_option("--json,-o,--report", out.report, "write the JSON report here instead of stdout");
  ver->callback([&] { job = [&] { return run_verify(suites, seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (threads > 0) setenv("CRYSTAL_STRATA_THREADS", std::to_string(threads).c_str(), 1);

  try {
    const Result r = job();
    emit(r, out);
    return r.code;
  } catch (const InputError& e) {
    std::cerr << "error: " << (e.pointer().empty() ? "" : e.pointer() + ": ") << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::BackendMismatch ? 1 : 2;
  }
}
