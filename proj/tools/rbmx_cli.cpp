// rbmx command-line front end. Links only the C API; JSON on stdout,
// diagnostics on stderr. Exit codes: 0 ok, 1 negative verdict, 2 usage or
// input error, 3 inconsistency.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "rbmx/rbmx.h"

namespace {

using nlohmann::json;

struct Failure {
  int code;
};

int exit_code(rbmx_status s) {
  if (s == RBMX_OK) return 0;
  if (s == RBMX_ERR_INCONSISTENT_SYSTEM) return 3;
  return 2;
}

void check(rbmx_status s) {
  if (s == RBMX_OK) return;
  std::cerr << "rbmx: " << rbmx_last_error() << "\n";
  throw Failure{exit_code(s)};
}

struct ModelDeleter {
  void operator()(rbmx_model* m) const { rbmx_model_free(m); }
};
using Model = std::unique_ptr<rbmx_model, ModelDeleter>;

// Owns a string returned by the C API.
std::string take(char* s) {
  std::string out = s ? s : "";
  rbmx_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "rbmx: cannot read " << path << "\n";
    throw Failure{2};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_program(const std::string& path, const std::string& text) {
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".rb.mx") == 0) return true;
  auto at = text.find_first_not_of(" \t\r\n");
  return at == std::string::npos || text[at] != '{';
}

Model load(const std::string& path) {
  std::string text = read_file(path);
  rbmx_model* m = nullptr;
  check(is_program(path, text) ? rbmx_program_parse(text.c_str(), &m) : rbmx_model_from_json(text.c_str(), &m));
  return Model(m);
}

std::string to_json(const Model& m) {
  char* s = nullptr;
  check(rbmx_model_to_json(m.get(), &s));
  return take(s);
}

std::string to_dot(const Model& m) {
  char* s = nullptr;
  check(rbmx_model_to_dot(m.get(), &s));
  return take(s);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::uint64_t default_seed() {
  const char* env = std::getenv("RBMX_SEED");
  if (!env || !*env) return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    std::cerr << "rbmx: RBMX_SEED must be a nonnegative integer\n";
    throw Failure{2};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rbmx: mixed systems, Bayesian networks, mixed automata and ReactiveBayes programs"};
  app.require_subcommand(1);

  std::string file, file_b, mode, obs, query, resolver = "lex", root, algebra = "equality", sigma, which;
  std::size_t steps = 1, cap = 0;
  std::uint64_t seed = 0;
  bool dot = false, bisim = false;

  auto* parse = app.add_subcommand("parse", "Parse and check a program; print its canonical form");
  parse->add_option("FILE", file, "Program (.rb.mx) or - for stdin")->required();

  auto* elab = app.add_subcommand("elaborate", "Elaborate a program to a system, network or automaton");
  elab->add_option("FILE", file)->required();
  elab->add_option("--mode", mode, "static | graph | dynamic")->check(CLI::IsMember({"static", "graph", "dynamic"}));
  elab->add_option("--obs", obs, "JSON object of observed values (static mode)");
  elab->add_option("--cap", cap, "Size cap (0: default)");

  auto* sample = app.add_subcommand("sample", "Sample a system, network, automaton or program");
  sample->add_option("FILE", file)->required();
  sample->add_option("--steps", steps, "Draws, or instants of a program run")->required();
  auto* seed_opt = sample->add_option("--seed", seed, "Seed (default: RBMX_SEED or 0)");
  sample->add_option("--obs", obs, "Observation trace (JSON lines), network init, or automaton actions");
  sample->add_option("--resolver", resolver)->check(CLI::IsMember({"lex", "uniform"}));

  auto* eval = app.add_subcommand("eval", "Score a state property on a system");
  eval->add_option("FILE", file)->required();
  eval->add_option("--query", query, "e.g. \"x=b & y!=1 | z=true\"")->required();
  eval->add_option("--mode", mode)->required()->check(CLI::IsMember({"outer", "inner", "likelihood", "polarized"}));
  eval->add_option("--obs", obs, "JSON object of observed values (programs)");

  auto* fg = app.add_subcommand("fg", "Factor graph of a program or system list");
  fg->add_option("FILE", file)->required();
  fg->add_flag("--dot", dot);

  auto* fg2bn = app.add_subcommand("fg2bn", "Message passing from a tree factor graph to a Bayesian network");
  fg2bn->add_option("FILE", file)->required();
  fg2bn->add_option("--root", root, "Root system name");
  fg2bn->add_flag("--dot", dot);

  auto* comp = app.add_subcommand("compose", "Parallel composition of two models of one kind");
  comp->add_option("A", file)->required();
  comp->add_option("B", file_b)->required();
  comp->add_option("--algebra", algebra, "Automata: equality | conjunction")
      ->check(CLI::IsMember({"equality", "conjunction"}));
  comp->add_option("--sigma", sigma, "PA scheduler bias, e.g. 1/2");

  auto* sim = app.add_subcommand("simcheck", "Does B simulate A?");
  sim->add_option("A", file)->required();
  sim->add_option("B", file_b)->required();
  sim->add_flag("--bisim", bisim, "Check bisimulation instead");

  auto* embed = app.add_subcommand("embed", "Translate between SPA, PA and mixed automata");
  embed->add_option("WHICH", which)->required()->check(CLI::IsMember({"spa2ma", "pa2ma", "ma2spa", "spa2pa"}));
  embed->add_option("FILE", file)->required();
  embed->add_option("--cap", cap, "Outcome/selection cap (0: default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::string out;
    int rc = 0;
    if (*parse) {
      out = to_json(load(file));
    } else if (*elab) {
      Model p = load(file);
      std::string o = obs.empty() ? "" : read_file(obs);
      rbmx_model* m = nullptr;
      check(rbmx_elaborate(p.get(), mode.empty() ? "static" : mode.c_str(), opt(o), cap, &m));
      out = to_json(Model(m));
    } else if (*sample) {
      Model m = load(file);
      if (seed_opt->count() == 0) seed = default_seed();
      std::string o = obs.empty() ? "" : read_file(obs);
      char* s = nullptr;
      rbmx_status st = rbmx_sample(m.get(), steps, seed, opt(o), resolver.c_str(), &s);
      out = take(s);
      if (st != RBMX_OK) {
        std::cerr << "rbmx: " << rbmx_last_error() << "\n";
        rc = exit_code(st);
      }
    } else if (*eval) {
      Model m = load(file);
      rbmx_kind kind;
      check(rbmx_model_kind(m.get(), &kind));
      if (kind == RBMX_KIND_PROGRAM) {
        std::string o = obs.empty() ? "" : read_file(obs);
        rbmx_model* s = nullptr;
        check(rbmx_elaborate(m.get(), "static", opt(o), 0, &s));
        m = Model(s);
      }
      char* v = nullptr;
      check(rbmx_eval(m.get(), query.c_str(), mode.c_str(), &v));
      out = json{{"mode", mode}, {"query", query}, {"value", take(v)}}.dump(2);
    } else if (*fg) {
      Model m = load(file);
      rbmx_model* g = nullptr;
      check(rbmx_factor_graph(m.get(), &g));
      Model graph(g);
      out = dot ? to_dot(graph) : to_json(graph);
    } else if (*fg2bn) {
      Model m = load(file);
      rbmx_model* n = nullptr;
      check(rbmx_fg_to_bn(m.get(), opt(root), &n));
      Model net(n);
      out = dot ? to_dot(net) : to_json(net);
    } else if (*comp) {
      Model a = load(file), b = load(file_b);
      rbmx_model* m = nullptr;
      check(rbmx_compose(a.get(), b.get(), algebra.c_str(), opt(sigma), &m));
      out = to_json(Model(m));
    } else if (*sim) {
      Model a = load(file), b = load(file_b);
      int holds = 0;
      char* s = nullptr;
      check(rbmx_simcheck(a.get(), b.get(), bisim ? 1 : 0, &holds, &s));
      out = take(s);
      rc = holds ? 0 : 1;
    } else if (*embed) {
      Model m = load(file);
      rbmx_model* e = nullptr;
      char* note = nullptr;
      check(rbmx_embed(m.get(), which.c_str(), cap, &e, &note));
      json j = json::parse(to_json(Model(e)));
      j["note"] = take(note);
      out = j.dump(2);
    }
    std::cout << out;
    if (!out.empty() && out.back() != '\n') std::cout << "\n";
    return rc;
  } catch (const Failure& f) {
    return f.code;
  }
}
