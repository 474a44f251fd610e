#include "satspec/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "satspec/proof_trace.hpp"
#include "satspec/rational.hpp"
#include "satspec/saturation.hpp"

namespace satspec {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void dump_into(const json& j, std::string& s) {
  switch (j.type()) {
    case json::value_t::number_float:
      s += format_double(j.get<double>());
      break;
    case json::value_t::array: {
      s += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) s += ',';
        first = false;
        dump_into(v, s);
      }
      s += ']';
      break;
    }
    case json::value_t::object: {
      s += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) s += ',';
        first = false;
        s += json(k).dump();
        s += ':';
        dump_into(v, s);
      }
      s += '}';
      break;
    }
    default:
      s += j.dump();
  }
}

/// Arrays of records are written one record per line.
std::string dump_records(const json& arr) {
  std::string s = "[\n";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    dump_into(arr[i], s);
    s += (i + 1 < arr.size()) ? ",\n" : "\n";
  }
  s += "]\n";
  return s;
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }
json freq_json(const Frequency& k) { return json::array({k[0], k[1], k[2]}); }

Frequency parse_frequency(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const int x = std::stoi(item, &pos);
      if (pos != item.size() || x < 0) throw std::invalid_argument("");
      v.push_back(x);
    } catch (const std::exception&) {
      throw UsageError("frequency must be three nonnegative integers, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw UsageError("frequency must have three components, got '" + text + "'");
  return Frequency(v[0], v[1], v[2]);
}

Vec3 parse_vec(const std::string& text) {
  Vec3 v{};
  std::stringstream ss(text);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) throw UsageError("vector must have three components, got '" + text + "'");
    try {
      std::size_t pos = 0;
      v[n] = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
    ++n;
  }
  if (n != 3) throw UsageError("vector must have three components, got '" + text + "'");
  return v;
}

RationalDomain parse_domain(const std::string& text) {
  try {
    return RationalDomain::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--domain: ") + e.what());
  }
}

ModeIndex checked_mode(const Frequency& k, int j) {
  if (branch_count(k) == 0) throw UsageError("frequency " + k.str() + " carries no eigenmode");
  if (j < 1 || j > branch_count(k)) {
    throw UsageError(fmt::format("branch j={} invalid for {} ({} branch(es))", j, k.str(), branch_count(k)));
  }
  return ModeIndex{j, k};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

State read_state(const GalerkinSystem& sys, const std::string& path) {
  try {
    return sys.state_from(expansion_from_json(read_json_file(path)));
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string column_name(const ModeIndex& idx) {
  return fmt::format("Y{}_{}_{}_{}", idx.j, idx.k[0], idx.k[1], idx.k[2]);
}

// ---- subcommands ----------------------------------------------------------------------------

struct Common {
  std::string domain = "1,1,1";
  double nu = 0.1;
};

void add_domain(CLI::App* sc, Common& c) {
  sc->add_option("--domain", c.domain,
                 "Box lengths L1,L2,L3 as decimals or fractions (e.g. 1,1.5,7/3). Exact paths read them as "
                 "exact rationals; numeric paths use the nearest doubles.")
      ->capture_default_str();
}

int run_basis(int max, const Common& c, std::ostream& out) {
  if (max < 1) throw UsageError("--max must be >= 1");
  const DomainSpec dom = parse_domain(c.domain).to_domain(c.nu);
  json arr = json::array();
  for (const auto& m : enumerate_modes(max, dom)) {
    arr.push_back({{"k", freq_json(m.k())},
                   {"j", m.j()},
                   {"w", vec_json(m.w())},
                   {"eigenvalue", eigenvalue(m.k(), dom)},
                   {"norm_sq", m.norm_sq()}});
  }
  out << dump_records(arr);
  return 0;
}

int run_interact(const std::string& k, int j, const std::string& m, int jm, const Common& c, std::ostream& out) {
  const DomainSpec dom = parse_domain(c.domain).to_domain(c.nu);
  const ModeIndex a = checked_mode(parse_frequency(k), j);
  const ModeIndex b = checked_mode(parse_frequency(m), jm);
  const EigenMode ma = EigenMode::canonical(a.k, a.j, dom);
  const EigenMode mb = EigenMode::canonical(b.k, b.j, dom);
  const InteractionTerm term = advection_sym(ma, mb, dom);
  json terms = json::array();
  for (const auto& [n, z] : term.terms) terms.push_back({{"n", freq_json(n)}, {"z", vec_json(z)}});
  json j_out = {{"a", to_json(a)},
                {"b", to_json(b)},
                {"terms", terms},
                {"projection", expansion_to_json(project(term, dom))}};
  out << dump_json(j_out) << '\n';
  return 0;
}

int run_project(const std::string& n, const std::string& z, const Common& c, std::ostream& out) {
  const DomainSpec dom = parse_domain(c.domain).to_domain(c.nu);
  const TrigVectorField f{parse_frequency(n), parse_vec(z)};
  out << dump_records(expansion_to_json(project(f, dom)));
  return 0;
}

int run_saturate(int cutoff, int max_gen, const std::string& pairing, const std::string& path, const Common& c,
                 std::ostream& out) {
  if (cutoff < 3) throw UsageError("--cutoff must be >= 3");
  if (max_gen < 1) throw UsageError("--max-gen must be >= 1");
  const RationalDomain dom = parse_domain(c.domain);
  const Pairing p = pairing == "all" ? Pairing::AllPairs : Pairing::SeedOnly;
  const SaturationReport rep = saturate(cutoff, max_gen, dom, p);
  for (const auto& g : rep.generations) out << "generation " << g.generation() << ": " << g.size() << " modes\n";
  for (const auto& [q, j] : rep.first_generation) out << "C^" << q << " first in G^" << j << '\n';
  out << "certificates: " << rep.certificates.size() << ", exact rejections: " << rep.exact_rejections << '\n';
  for (const auto& f : rep.failures) out << "FAIL " << f << '\n';
  if (!path.empty()) {
    json arr = json::array();
    for (const auto& cert : rep.certificates) arr.push_back(to_json(cert));
    write_text(path, dump_records(arr), out);
  }
  return rep.ok() ? 0 : 1;
}

int run_trace(int q, const std::string& path, const Common& c, std::ostream& out) {
  if (q < 3) throw UsageError("--q must be >= 3");
  const TraceReport rep = paper_trace(q, parse_domain(c.domain));
  std::size_t bad = 0;
  for (const auto& ch : rep.checks) {
    if (ch.matches_printed) {
      out << "ok       " << ch.display << " [" << ch.params << "] " << ch.computed << '\n';
      continue;
    }
    ++bad;
    out << "MISMATCH " << ch.display << " [" << ch.params << "] computed " << ch.computed << ", printed "
        << ch.printed;
    if (ch.matches_corrected) {
      out << (*ch.matches_corrected ? ", corrected form " : ", corrected form FAILS ") << ch.corrected;
    }
    out << '\n';
  }
  out << fmt::format("q={}: {} checks, {} mismatches, {} certificates\n", q, rep.checks.size(), bad,
                     rep.certificates.size());
  if (!path.empty()) {
    json arr = json::array();
    for (const auto& cert : rep.certificates) arr.push_back(to_json(cert));
    write_text(path, dump_records(arr), out);
  }
  return bad == 0 ? 0 : 1;
}

struct SimArgs {
  int cutoff = 4;
  double T = 5.0;
  double dt = 1e-3;
  std::string u0, schedule, h, out;
  std::size_t sample_every = 1;
};

GalerkinSystem build_system(const SimArgs& a, const Common& c) {
  if (a.cutoff < 3) throw UsageError("--cutoff must be >= 3");
  if (!(c.nu > 0.0)) throw UsageError("--nu must be positive");
  if (!(a.T > 0.0)) throw UsageError("--T must be positive");
  if (!(a.dt > 0.0)) throw UsageError("--dt must be positive");
  const DomainSpec dom = parse_domain(c.domain).to_domain(c.nu);
  GalerkinSystem sys = GalerkinSystem::assemble(dom, a.cutoff);
  if (!a.h.empty()) sys = sys.with_h(read_state(sys, a.h));
  if (a.dt > max_step(sys)) {
    throw UsageError(fmt::format("--dt {} exceeds 0.1/lambda_max = {}", a.dt, format_double(max_step(sys))));
  }
  return sys;
}

int run_simulate(const SimArgs& a, const Common& c, std::ostream& out) {
  const GalerkinSystem sys = build_system(a, c);
  const State u0 = a.u0.empty() ? State(sys.size(), 0.0) : read_state(sys, a.u0);
  ControlSchedule sched = ControlSchedule::zeros(a.T, 1, sys.control_modes().size());
  if (!a.schedule.empty()) {
    try {
      sched = schedule_from_json(sys, read_json_file(a.schedule));
    } catch (const std::invalid_argument& e) {
      throw UsageError(a.schedule + ": " + e.what());
    }
  }
  const Trajectory tr = integrate(sys, u0, sched, a.dt, a.sample_every);
  std::string csv = "t";
  for (const auto& m : sys.modes()) csv += "," + column_name(m.index());
  csv += '\n';
  for (std::size_t n = 0; n < tr.times.size(); ++n) {
    csv += format_double(tr.times[n]);
    for (double x : tr.states[n]) {
      csv += ',';
      csv += format_double(x);
    }
    csv += '\n';
  }
  write_text(a.out, csv, out);
  return 0;
}

struct SteerArgs {
  std::string target;
  int segments = 8;
  int iters = 500;
  std::string controls = "g1";
  double init_scale = 0.0;
  std::uint64_t seed = 0;
};

int run_steer(const SimArgs& a, const SteerArgs& s, const Common& c, std::ostream& out) {
  if (s.segments < 1) throw UsageError("--segments must be >= 1");
  if (s.iters < 0) throw UsageError("--iters must be >= 0");
  GalerkinSystem sys = build_system(a, c);
  if (s.controls != "g1") {
    std::vector<std::size_t> ctl;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const Frequency& k = sys.modes()[i].k();
      const bool in_c = k.max_component() <= 3;
      if ((s.controls == "c" && in_c) || (s.controls == "c2d" && in_c && k.num_zero() == 1)) ctl.push_back(i);
    }
    sys = sys.with_controls(ctl);
  }
  if (a.T / s.segments < a.dt) throw UsageError("--dt exceeds the segment duration");
  const State u0 = a.u0.empty() ? State(sys.size(), 0.0) : read_state(sys, a.u0);
  const State target = read_state(sys, s.target);
  SteerOptions opt;
  opt.dt = a.dt;
  if (s.init_scale > 0.0) {
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> g(0.0, s.init_scale);
    ControlSchedule x = ControlSchedule::zeros(a.T, s.segments, sys.control_modes().size());
    for (auto& seg : x.values)
      for (auto& v : seg) v = g(rng);
    opt.initial = x;
  }
  opt.log = [&out](int it, double J, double step) {
    out << it << ' ' << format_double(J) << ' ' << format_double(step) << '\n';
  };
  out << "iter J step\n";
  const SteerResult r = steer(sys, u0, target, a.T, s.segments, s.iters, opt);
  out << fmt::format("controls {} initial_distance {} final_distance {} iterations {} stagnated {}\n",
                     sys.control_modes().size(), format_double(r.initial_distance),
                     format_double(r.final_distance), r.iterations, r.stagnated ? 1 : 0);
  if (!a.out.empty()) write_text(a.out, dump_json(schedule_to_json(sys, r.schedule)) + "\n", out);
  return 0;
}

}  // namespace

// ---- public helpers -------------------------------------------------------------------------

std::string format_double(double x) {
  std::string s = fmt::format("{:.17g}", x);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const json& j) {
  std::string s;
  dump_into(j, s);
  return s;
}

json expansion_to_json(const FieldExpansion& e) {
  json arr = json::array();
  for (const auto& [idx, v] : e.coeffs()) arr.push_back({{"j", idx.j}, {"k", freq_json(idx.k)}, {"value", v}});
  return arr;
}

FieldExpansion expansion_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("state must be a JSON array of {j, k, value}");
  FieldExpansion e;
  std::set<ModeIndex> seen;
  for (const auto& r : j) {
    if (!r.is_object() || !r.contains("j") || !r.contains("k") || !r.contains("value") ||
        !r["j"].is_number_integer() || !r["k"].is_array() || r["k"].size() != 3 || !r["value"].is_number()) {
      throw std::invalid_argument("malformed state record " + r.dump());
    }
    for (const auto& x : r["k"]) {
      if (!x.is_number_integer() || x.get<int>() < 0) throw std::invalid_argument("malformed k in " + r.dump());
    }
    const Frequency k(r["k"][0].get<int>(), r["k"][1].get<int>(), r["k"][2].get<int>());
    const int jj = r["j"].get<int>();
    if (jj < 1 || jj > branch_count(k)) throw std::invalid_argument("no eigenmode " + r.dump());
    const ModeIndex idx{jj, k};
    if (!seen.insert(idx).second) throw std::invalid_argument("duplicate mode " + idx.str());
    e.add(idx, r["value"].get<double>());
  }
  return e;
}

json schedule_to_json(const GalerkinSystem& sys, const ControlSchedule& s) {
  json segs = json::array();
  const auto& ctl = sys.control_modes();
  for (std::size_t n = 0; n < s.durations.size(); ++n) {
    json vals = json::array();
    for (std::size_t i = 0; i < ctl.size(); ++i) {
      const ModeIndex idx = sys.modes()[ctl[i]].index();
      vals.push_back({{"j", idx.j}, {"k", freq_json(idx.k)}, {"value", s.values[n][i]}});
    }
    segs.push_back({{"duration", s.durations[n]}, {"values", vals}});
  }
  return json{{"segments", segs}};
}

ControlSchedule schedule_from_json(const GalerkinSystem& sys, const json& j) {
  if (!j.is_object() || !j.contains("segments") || !j["segments"].is_array() || j["segments"].empty()) {
    throw std::invalid_argument("schedule must be {\"segments\": [...]} with at least one segment");
  }
  const auto& ctl = sys.control_modes();
  ControlSchedule s;
  for (const auto& seg : j["segments"]) {
    if (!seg.contains("duration") || !seg["duration"].is_number() || !(seg["duration"].get<double>() > 0.0)) {
      throw std::invalid_argument("segment needs a positive duration");
    }
    s.durations.push_back(seg["duration"].get<double>());
    const FieldExpansion e = expansion_from_json(seg.value("values", json::array()));
    std::vector<double> v(ctl.size(), 0.0);
    for (const auto& [idx, val] : e.coeffs()) {
      const auto pos = sys.index_of(idx);
      if (!pos) throw std::invalid_argument("mode " + idx.str() + " outside the truncation");
      const auto it = std::lower_bound(ctl.begin(), ctl.end(), *pos);
      if (it == ctl.end() || *it != *pos) throw std::invalid_argument("mode " + idx.str() + " is not a control mode");
      v[static_cast<std::size_t>(it - ctl.begin())] = val;
    }
    s.values.push_back(std::move(v));
  }
  return s;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stokes eigenbasis, mode interactions, saturation certificates and Galerkin steering"};
  app.require_subcommand(1);
  Common c;

  int max = 0;
  auto* basis = app.add_subcommand("basis", "Dump canonical eigenmodes as JSON records");
  basis->add_option("--max", max, "Largest frequency component")->required();
  add_domain(basis, c);
  basis->add_option("--nu", c.nu, "Viscosity")->capture_default_str();

  std::string k, m;
  int j = 1, jm = 1;
  auto* interact = app.add_subcommand("interact", "Symmetrized advection of two modes and its projection");
  interact->add_option("--k", k, "First frequency k1,k2,k3")->required();
  interact->add_option("--j", j, "Branch of the first mode")->capture_default_str();
  interact->add_option("--m", m, "Second frequency")->required();
  interact->add_option("--jm", jm, "Branch of the second mode")->capture_default_str();
  add_domain(interact, c);

  std::string n, z;
  auto* proj = app.add_subcommand("project", "Leray projection of a trigonometric field");
  proj->add_option("--n", n, "Frequency n1,n2,n3")->required();
  proj->add_option("--z", z, "Amplitude z1,z2,z3")->required();
  add_domain(proj, c);

  int cutoff = 6, max_gen = 10;
  std::string pairing = "seed", cert_out;
  auto* sat = app.add_subcommand("saturate", "Certify the generations G^j up to a frequency cutoff");
  sat->add_option("--cutoff", cutoff, "Frequency cutoff (>= 3)")->capture_default_str();
  sat->add_option("--max-gen", max_gen, "Generation limit")->capture_default_str();
  sat->add_option("--pairing", pairing, "seed: pairs (C, G^j); all: pairs (G^j, G^j)")
      ->check(CLI::IsMember({"seed", "all"}))
      ->capture_default_str();
  sat->add_option("--out", cert_out, "Certificate log (JSON)");
  add_domain(sat, c);

  int q = 3;
  std::string trace_out;
  auto* trace = app.add_subcommand("trace-proof", "Replay the explicit induction witnesses exactly");
  trace->add_option("--q", q, "Induction level (>= 3)")->required();
  trace->add_option("--out", trace_out, "Certificates of the traced witnesses (JSON)");
  add_domain(trace, c);

  SimArgs sim;
  auto add_sim = [&](CLI::App* sc) {
    sc->add_option("--cutoff", sim.cutoff, "Galerkin cutoff (>= 3)")->capture_default_str();
    add_domain(sc, c);
    sc->add_option("--nu", c.nu, "Viscosity")->capture_default_str();
    sc->add_option("--T", sim.T, "Horizon")->capture_default_str();
    sc->add_option("--dt", sim.dt, "RK4 step (<= 0.1/lambda_max)")->capture_default_str();
    sc->add_option("--u0", sim.u0, "Initial state JSON [{j, k, value}]");
    sc->add_option("--forcing", sim.h, "Constant forcing JSON [{j, k, value}]");
  };
  auto* simulate = app.add_subcommand("simulate", "Integrate the controlled Galerkin system");
  add_sim(simulate);
  simulate->add_option("--schedule", sim.schedule, "Control schedule JSON (default: zero control over T)");
  simulate->add_option("--out", sim.out, "Trajectory CSV (default: stdout)");
  simulate->add_option("--sample-every", sim.sample_every, "Write every n-th step")->capture_default_str();

  SteerArgs st;
  auto* steer_cmd = app.add_subcommand("steer", "Optimize a piecewise-constant control toward a target");
  add_sim(steer_cmd);
  steer_cmd->add_option("--target", st.target, "Target state JSON")->required();
  steer_cmd->add_option("--segments", st.segments, "Number of control segments")->capture_default_str();
  steer_cmd->add_option("--iters", st.iters, "Iteration budget")->capture_default_str();
  steer_cmd->add_option("--controls", st.controls, "g1: span(C u B(C,C)); c: C only; c2d: two-dimensional modes of C")
      ->check(CLI::IsMember({"g1", "c", "c2d"}))
      ->capture_default_str();
  steer_cmd->add_option("--init-scale", st.init_scale, "Std. dev. of a random initial schedule (0: zeros)")
      ->capture_default_str();
  steer_cmd->add_option("--seed", st.seed, "Seed for the random initial schedule")->capture_default_str();
  steer_cmd->add_option("--out", sim.out, "Best schedule JSON");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*basis) return run_basis(max, c, out);
    if (*interact) return run_interact(k, j, m, jm, c, out);
    if (*proj) return run_project(n, z, c, out);
    if (*sat) return run_saturate(cutoff, max_gen, pairing, cert_out, c, out);
    if (*trace) return run_trace(q, trace_out, c, out);
    if (*simulate) return run_simulate(sim, c, out);
    if (*steer_cmd) return run_steer(sim, st, c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return parse_and_dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace satspec
