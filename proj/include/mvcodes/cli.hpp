#pragma once

// Command-line front end. Exit codes: 0 ok, 2 usage, 3 golden mismatch,
// 4 capacity, 5 recovery failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvcodes/codec.hpp"
#include "mvcodes/constructions.hpp"
#include "mvcodes/exponents.hpp"
#include "mvcodes/finite_field.hpp"
#include "mvcodes/simulator.hpp"
#include "mvcodes/tables.hpp"

namespace mvcodes {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitGolden = 3, kExitCapacity = 4, kExitRecovery = 5 };

namespace cli {

using json = nlohmann::ordered_json;

struct GlobalArgs {
  bool json = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> limit;
  std::string out;
};

struct ConstructionArgs {
  std::string kind;
  std::string field;
  std::uint64_t q = 0;
  std::size_t l = 0;
  std::string m, n, d;
  std::optional<std::uint64_t> F, FA, FB;
  std::size_t mprime = 0, nprime = 0;
  bool best_d = false;
  bool stats = false;
};

inline void add_construction_options(CLI::App* sub, ConstructionArgs& a) {
  sub->add_option("--q", a.q, "field order (prime power)");
  sub->add_option("--field", a.field, "field as p^e/modulus, overrides --q");
  sub->add_option("--l", a.l, "number of variables");
  sub->add_option("--m", a.m, "block counts per coordinate, e.g. 2,2 (a scalar is repeated l times)");
  sub->add_option("--n", a.n, "second block counts per coordinate");
  sub->add_option("--F", a.F, "footprint target");
  sub->add_option("--FA", a.FA, "footprint target for D_A");
  sub->add_option("--FB", a.FB, "footprint target for D_B");
  sub->add_option("--mprime", a.mprime, "variables carrying D_A");
  sub->add_option("--nprime", a.nprime, "variables carrying D_B");
  sub->add_option("--d", a.d, "matdot target exponent, e.g. 3,3,3");
  sub->add_flag("--best-d", a.best_d, "search the target exponent maximising m");
}

inline std::uint32_t field_order(const ConstructionArgs& a) {
  if (!a.field.empty())
    return FieldSpec::parse(a.field).q();
  if (a.q == 0)
    throw ParameterError("--q or --field is required");
  if (a.q > kMaxFieldOrder)
    throw CapacityError("q exceeds 2^16");
  // validates that q is a prime power
  return FieldSpec::of_order(a.q).q();
}

inline std::string expand_vector(const std::string& v, std::size_t l) {
  if (v.empty() || v.find(',') != std::string::npos || l <= 1)
    return v;
  std::string out = v;
  for (std::size_t i = 1; i < l; ++i)
    out += "," + v;
  return out;
}

inline ConstructionDescriptor to_descriptor(const ConstructionArgs& a) {
  ConstructionDescriptor d;
  d.kind = a.kind;
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty())
      d.args[k] = v;
  };
  put("m", expand_vector(a.m, a.l));
  put("n", expand_vector(a.n, a.l));
  if (a.F)
    put("F", std::to_string(*a.F));
  if (a.FA)
    put("FA", std::to_string(*a.FA));
  if (a.FB)
    put("FB", std::to_string(*a.FB));
  if (a.mprime)
    put("mprime", std::to_string(a.mprime));
  if (a.nprime)
    put("nprime", std::to_string(a.nprime));
  if (a.l)
    put("l", std::to_string(a.l));
  if (a.best_d)
    put("d", "best");
  else
    put("d", a.d);
  return d;
}

inline json to_json(const ExponentVector& v) { return json(v.coords()); }

inline json describe(const Solution& s) {
  json j;
  std::visit(
      [&](const auto& v) {
        j["construction"] = v.construction;
        j["q"] = v.q;
        j["l"] = v.l;
        j["m"] = v.m();
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PolySolution>) {
          j["n"] = v.n();
          j["FB"] = v.fb.value;
          j["FB_witness"] = to_json(v.fb.witness);
          j["k+1"] = v.recovery_threshold();
          j["xi"] = v.xi ? json(*v.xi) : json(nullptr);
        } else {
          j["d"] = to_json(v.d);
          j["FB"] = v.fb.value;
          j["FB_witness"] = to_json(v.fb.witness);
          j["k+1"] = v.recovery_threshold();
          j["designed_F"] = v.design_footprint;
          j["designed_k+1"] = v.designed_threshold();
          j["removable"] = v.removable;
        }
        j["N"] = v.points();
      },
      s);
  return j;
}

inline void print_block(std::ostream& out, const json& j) {
  for (const auto& [k, v] : j.items())
    out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

inline std::ostream& sink(std::ostream& out, std::ofstream& file, const GlobalArgs& g) {
  if (g.out.empty())
    return out;
  file.open(g.out, std::ios::binary);
  if (!file)
    throw ParameterError("cannot open output file '" + g.out + "'");
  return file;
}

inline int cmd_params(const GlobalArgs& g, const ConstructionArgs& a, std::ostream& out) {
  const auto q = field_order(a);
  const auto desc = to_descriptor(a);
  const auto sol = resolve(desc, q);
  json j = describe(sol);
  j["construction"] = desc.to_string();
  std::ofstream f;
  auto& os = sink(out, f, g);
  if (g.json)
    os << j.dump(2) << "\n";
  else
    print_block(os, j);
  return kExitOk;
}

inline void write_stats(std::ostream& os, const char* label, const ExponentSet& S) {
  os << label << " size: " << S.size() << "\n";
  if (S.empty())
    return;
  const auto f = fb(S);
  os << label << " fb: " << f.value << " at " << f.witness << "\n";
  os << label << " support:";
  for (auto i : support(S))
    os << ' ' << i;
  os << "\n";
}

inline int cmd_enum(const GlobalArgs& g, const ConstructionArgs& a, std::ostream& out) {
  const auto q = field_order(a);
  const std::uint64_t limit = g.limit.value_or(kDefaultSetLimit);
  std::ofstream f;
  auto& os = sink(out, f, g);
  if (a.kind == "hyp") {
    if (a.l == 0)
      throw ParameterError("enum hyp needs --l");
    const auto S = hyp_set({q, a.l, a.F.value_or(0)}, limit);
    if (g.json) {
      json j;
      j["q"] = q;
      j["l"] = a.l;
      j["F"] = a.F.value_or(0);
      j["size"] = S.size();
      if (a.stats && !S.empty()) {
        const auto v = fb(S);
        j["fb"] = v.value;
        j["support"] = support(S);
      }
      if (!a.stats) {
        j["set"] = json::array();
        for (const auto& v : S)
          j["set"].push_back(to_json(v));
      }
      os << j.dump(2) << "\n";
    } else if (a.stats) {
      write_stats(os, "set", S);
    } else {
      write_exponent_set(os, S);
    }
    return kExitOk;
  }
  const auto sol = resolve(to_descriptor(a), q);
  if (g.json) {
    json j = describe(sol);
    if (!a.stats)
      std::visit(
          [&](const auto& v) {
            j["DA"] = json::array();
            j["DB"] = json::array();
            for (const auto& x : v.da)
              j["DA"].push_back(to_json(x));
            for (const auto& x : v.db)
              j["DB"].push_back(to_json(x));
          },
          sol);
    os << j.dump(2) << "\n";
  } else if (a.stats) {
    std::visit(
        [&](const auto& v) {
          write_stats(os, "D_A", v.da);
          write_stats(os, "D_B", v.db);
          os << "sum fb: " << v.fb.value << " at " << v.fb.witness << "\n";
        },
        sol);
  } else {
    write_solution(os, sol);
  }
  return kExitOk;
}

inline int cmd_table(const GlobalArgs& g, const std::string& id, std::ostream& out, std::ostream& err) {
  std::vector<const TableSpec*> specs;
  if (id == "all")
    for (const auto& s : table_specs())
      specs.push_back(&s);
  else
    specs.push_back(&table_spec(id));
  std::ofstream f;
  auto& os = sink(out, f, g);
  bool all_match = true;
  json arr = json::array();
  for (const auto* s : specs) {
    const auto rows = compute_table(*s);
    const auto diffs = diff_tables(parse_tsv(golden_table(s->id)), rows);
    if (g.json) {
      json j;
      j["id"] = s->id;
      j["title"] = s->title;
      j["columns"] = rows.front();
      j["rows"] = json::array();
      for (std::size_t i = 1; i < rows.size(); ++i) {
        json r = json::array();
        for (const auto& c : rows[i])
          r.push_back(std::stoull(c));
        j["rows"].push_back(r);
      }
      j["matches_golden"] = diffs.empty();
      j["diff"] = diffs;
      arr.push_back(j);
    } else {
      if (specs.size() > 1)
        os << "# " << s->id << ": " << s->title << "\n";
      os << detail::tsv(rows);
    }
    if (!diffs.empty()) {
      all_match = false;
      err << s->id << ": " << diffs.size() << " cell(s) differ from the reference\n";
      for (const auto& d : diffs)
        err << "  " << d << "\n";
    }
  }
  if (g.json)
    os << (specs.size() == 1 ? arr[0] : arr).dump(2) << "\n";
  return all_match ? kExitOk : kExitGolden;
}

inline int cmd_simulate(const GlobalArgs& g, const std::string& path, const std::vector<std::string>& sets,
                        std::ostream& out) {
  std::ifstream in(path);
  if (!in)
    throw ParameterError("cannot read config '" + path + "'");
  auto cfg = SimConfig::parse(in);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ParseError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed)
    cfg.seed = *g.seed;
  const auto rep = run(cfg);
  if (!g.out.empty()) {
    std::ofstream f(g.out, std::ios::binary);
    if (!f)
      throw ParameterError("cannot open output file '" + g.out + "'");
    f << rep.transcript;
  }
  if (g.json) {
    json j;
    j["success"] = rep.success;
    j["failure"] = rep.failure;
    j["kappa"] = rep.kappa;
    j["k+1"] = rep.threshold;
    j["designed_k+1"] = rep.designed_threshold;
    j["workers"] = rep.workers.size();
    j["responders"] = rep.responders;
    j["responses_used"] = rep.responses_used;
    j["deficit"] = rep.deficit;
    j["decoded_equals_oracle"] = rep.decoded_equals_oracle;
    j["min_success_responses"] = rep.min_success_responses ? json(*rep.min_success_responses) : json(nullptr);
    j["decoder_system_ops"] = rep.stats.system_ops();
    j["decoder_ops_per_entry"] = rep.stats.ops_per_entry();
    j["transmitted_elements"] = rep.transmitted_elements;
    j["warnings"] = rep.warnings;
    j["timings_ms"] = {{"plan", rep.timings.plan_ms},
                       {"compute", rep.timings.compute_ms},
                       {"decode", rep.timings.decode_ms},
                       {"verify", rep.timings.verify_ms}};
    out << j.dump(2) << "\n";
  } else {
    write_summary(out, rep);
  }
  return rep.success ? kExitOk : kExitRecovery;
}

/// Fast oracle-equivalence checks; the full suites live in the test binaries.
inline int cmd_selftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    failures += ok ? 0 : 1;
  };
  {
    bool ok = true;
    for (std::uint32_t q : {2u, 3u, 4u, 5u})
      for (std::size_t l = 1; l <= 3; ++l)
        for (std::uint64_t F = 0; F <= checked_power(q, l) + 1; ++F)
          ok = ok && hyp_size({q, l, F}) == hyp_set({q, l, F}).size();
    check("hyperbolic recurrence matches enumeration", ok);
  }
  {
    bool ok = true;
    for (std::uint32_t q : {4u, 5u, 7u})
      for (exp_t m = 1; m <= 3; ++m)
        for (std::uint64_t F = 1; F <= q * q; F += 3)
          try {
            ok = ok && better_box(q, {m, m}, F).n() == db_size(q, {m, m}, F);
          } catch (const Infeasible&) {
            ok = ok && db_size(q, {m, m}, F) == 0;
          }
    check("better-box recurrence matches enumeration", ok);
  }
  {
    bool ok = true;
    for (std::uint32_t q : {5u, 7u, 8u})
      for (std::uint64_t F = 1; F <= q * q; F += 4)
        try {
          ok = ok && half_hyperbolic(q, F, half_box_corner(q, 2)).m() == d_size(q, F, F, half_box_corner(q, 2));
        } catch (const Infeasible&) {
          ok = ok && d_size(q, F, F, half_box_corner(q, 2)) == 0;
        }
    check("half-hyperbolic recurrence matches enumeration", ok);
  }
  {
    bool ok = true;
    for (const auto& s : table_specs())
      if (s.id != "T4")
        ok = ok && diff_tables(parse_tsv(golden_table(s.id)), compute_table(s)).empty();
    check("tables T1-T3, T5-T8 match reference", ok);
  }
  {
    bool ok = true;
    for (const char* c : {"poly-box m=2 n=2", "matdot-box m=3"}) {
      SimConfig cfg;
      cfg.field = "7";
      cfg.construction = c;
      cfg.r = 4;
      cfg.s = 6;
      cfg.t = 4;
      cfg.straggler = StragglerKind::adversarial;
      cfg.seed = 11;
      const auto p = plan(cfg);
      cfg.straggler_param = "count:" + std::to_string(p.N - p.threshold);
      ok = ok && run(cfg).success;
    }
    check("end-to-end recovery over GF(7)", ok);
  }
  out << (failures ? "selftest failed\n" : "selftest passed\n");
  return failures ? kExitGolden : kExitOk;
}

} // namespace cli

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate polynomial and matdot codes for distributed matrix multiplication", "mvcodes"};
  app.require_subcommand(1);
  app.fallthrough();
  cli::GlobalArgs g;
  app.add_flag("--json", g.json, "machine-readable output");
  app.add_option("--seed", g.seed, "override the simulation seed");
  app.add_option("--limit", g.limit, "capacity limit for enumerations");
  app.add_option("--out", g.out, "write the main output (or simulation transcript) to this file");

  cli::ConstructionArgs pa;
  auto* params = app.add_subcommand("params", "parameters of a construction");
  params->add_option("kind", pa.kind, "poly-box, better-box, sep-vars, matdot-box, matdot-half")->required();
  cli::add_construction_options(params, pa);

  std::string table_id;
  auto* table = app.add_subcommand("table", "reproduce a parameter table and diff it against the reference");
  table->add_option("id", table_id, "T1..T8 or all")->required();

  cli::ConstructionArgs ea;
  auto* en = app.add_subcommand("enum", "list a hyperbolic set or a construction's degree sets");
  en->add_option("kind", ea.kind, "hyp or a construction kind")->required();
  cli::add_construction_options(en, ea);
  en->add_flag("--stats", ea.stats, "print size, fb and support instead of the listing");

  std::string config;
  std::vector<std::string> sets;
  auto* sim = app.add_subcommand("simulate", "run a straggler simulation from a config file");
  sim->add_option("config", config, "key = value config file")->required();
  sim->add_option("--set", sets, "override a config key (key=value), repeatable");

  auto* self = app.add_subcommand("selftest", "run the fast oracle-equivalence checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*params)
      return cli::cmd_params(g, pa, out);
    if (*table)
      return cli::cmd_table(g, table_id, out, err);
    if (*en)
      return cli::cmd_enum(g, ea, out);
    if (*sim)
      return cli::cmd_simulate(g, config, sets, out);
    if (*self)
      return cli::cmd_selftest(out);
  } catch (const CapacityError& e) {
    err << "capacity exceeded: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const InternalConsistency& e) {
    err << "internal consistency failure: " << e.what() << "\n";
    return kExitRecovery;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace mvcodes
