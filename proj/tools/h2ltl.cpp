#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "h2ltl/arith.hpp"
#include "h2ltl/eval.hpp"
#include "h2ltl/formula.hpp"
#include "h2ltl/lfp.hpp"
#include "h2ltl/library.hpp"
#include "h2ltl/reductions.hpp"
#include "h2ltl/trace.hpp"

using namespace h2ltl;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A formula argument is a file, a library name or inline text. Files may start
// with an `aps:` line; otherwise the fallback alphabet is used.
struct FormulaInput {
  Formula phi;
  Alphabet ap;
};

FormulaInput load_formula(const std::string& arg, const std::optional<Alphabet>& fallback) {
  std::string text;
  if (std::filesystem::is_regular_file(arg)) {
    text = read_file(arg);
  } else {
    auto names = library_names();
    if (std::find(names.begin(), names.end(), arg) != names.end()) {
      LibraryArtifact a = library(arg, {});
      if (!a.formula) throw UsageError("'" + arg + "' is not a formula");
      return {*a.formula, a.ap};
    }
    text = arg;
  }
  std::optional<Alphabet> ap = fallback;
  std::istringstream in(text);
  std::string first;
  std::getline(in, first);
  auto b = first.find_first_not_of(" \t");
  if (b != std::string::npos && first.compare(b, 4, "aps:") == 0) {
    std::istringstream ws(first.substr(b + 4));
    std::vector<std::string> ps;
    for (std::string w; ws >> w;) ps.push_back(w);
    ap = Alphabet(ps);
    text = text.substr(std::min(text.size(), first.size() + 1));
  }
  if (!ap) throw UsageError("no alphabet: add an 'aps:' line or a model");
  return {parse_formula(text, *ap), *ap};
}

TraceSet load_traces(const std::string& arg) {
  auto names = library_names();
  if (!std::filesystem::is_regular_file(arg) &&
      std::find(names.begin(), names.end(), arg) != names.end()) {
    LibraryArtifact a = library(arg, {});
    if (!a.traces) throw UsageError("'" + arg + "' is not a trace set");
    return *a.traces;
  }
  return parse_traceset(read_file(arg));
}

TransitionSystem load_ts(const std::string& arg) {
  auto names = library_names();
  if (!std::filesystem::is_regular_file(arg) &&
      std::find(names.begin(), names.end(), arg) != names.end()) {
    LibraryArtifact a = library(arg, {});
    if (!a.ts) throw UsageError("'" + arg + "' is not a transition system");
    return *a.ts;
  }
  return parse_ts(read_file(arg));
}

std::vector<Formula> flatten_and(const Formula& f) {
  if (f->op != Op::And) return {f};
  auto l = flatten_and(f->a), r = flatten_and(f->b);
  l.insert(l.end(), r.begin(), r.end());
  return l;
}

// Why a false verdict is false: failing conjuncts and counterexamples for
// universal trace quantifiers, a few levels deep.
std::string explain(const TraceSet& T, const Formula& phi, const EvalOptions& opt,
                    Assignment pi, int depth) {
  if (depth > 4) return "";
  auto parts = flatten_and(phi);
  if (parts.size() > 1) {
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (!evaluate(T, parts[i], opt, pi)) {
        std::string sub = explain(T, parts[i], opt, pi, depth + 1);
        return "conjunct " + std::to_string(i + 1) + " fails" + (sub.empty() ? "" : ": " + sub);
      }
    return "";
  }
  if (phi->op == Op::ForallTrace || phi->op == Op::ExistsTrace) {
    const TraceSet* range = nullptr;
    if (phi->range == kDom) range = &T;
    else if (phi->range == kAll && opt.ambient) range = &*opt.ambient;
    else if (pi.sets.count(phi->range)) range = &pi.sets.at(phi->range);
    if (!range) return "";
    if (phi->op == Op::ExistsTrace) return "no " + phi->var + " in " + phi->range + " is a witness";
    for (auto& t : range->members()) {
      Assignment p2 = pi;
      p2.traces[phi->var] = t;
      if (!evaluate(T, phi->a, opt, p2)) {
        std::string sub = explain(T, phi->a, opt, p2, depth + 1);
        return "counterexample " + phi->var + " = " + format_trace(t, range->alphabet()) +
               (sub.empty() ? "" : "; " + sub);
      }
    }
  }
  return "";
}

struct Report {
  std::string command;
  std::optional<bool> verdict;
  json bounds = json::object();
  std::vector<std::string> caveats;
  std::string output;
  std::string explanation;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyper2LTL toolkit"};
  app.require_subcommand(1);
  bool as_json = false;
  std::size_t cap_traces = EvalOptions::default_cap_traces();
  std::size_t cap_assignments = std::size_t{1} << 20;
  app.add_flag("--json", as_json, "machine-readable record");
  app.add_option("--cap-traces", cap_traces, "max traces for set-quantifier enumeration");
  app.add_option("--cap-assignments", cap_assignments, "max assignments per quantifier block");

  std::string emit = "text";
  auto add_emit = [&](CLI::App* c) {
    c->add_option("--emit", emit, "ast or text")->check(CLI::IsMember({"ast", "text"}));
  };

  auto* parse = app.add_subcommand("parse", "print the AST of a formula");
  std::string parse_in;
  parse->add_option("formula", parse_in)->required();

  auto* ev = app.add_subcommand("eval", "evaluate a sentence on a trace set");
  std::string semantics = "cw", model, ambient, ev_in;
  ev->add_option("--semantics", semantics)->check(CLI::IsMember({"std", "cw", "mm"}));
  ev->add_option("--model", model)->required();
  ev->add_option("--ambient", ambient);
  ev->add_option("formula", ev_in)->required();

  auto* mc = app.add_subcommand("mc", "bounded model checking");
  std::string ts_in, mc_in;
  std::size_t stem = 2, loop = 2;
  mc->add_option("--ts", ts_in)->required();
  mc->add_option("--stem", stem);
  mc->add_option("--loop", loop);
  mc->add_option("--semantics", semantics)->check(CLI::IsMember({"std", "cw", "mm"}));
  mc->add_option("--ambient", ambient);
  mc->add_option("formula", mc_in)->required();

  auto* lfp = app.add_subcommand("lfp", "evaluate an lfp sentence");
  std::string lfp_in;
  bool stages = false;
  std::vector<std::string> witness;
  lfp->add_option("--model", model)->required();
  lfp->add_option("--ambient", ambient);
  lfp->add_flag("--stages", stages);
  lfp->add_option("--witness", witness, "<trace> <j>")->expected(2);
  lfp->add_option("formula", lfp_in)->required();

  auto* tr = app.add_subcommand("translate", "run a translation pass");
  std::string pass, tr_in, tr_ts, tr_ap;
  bool prenex = false;
  tr->add_option("--pass", pass)->required();
  tr->add_option("--ts", tr_ts, "system for mc / lfp-mc");
  tr->add_option("--aps", tr_ap, "alphabet a,b,... when the input has none");
  tr->add_flag("--prenex", prenex);
  add_emit(tr);
  tr->add_option("input", tr_in)->required();

  auto* lib = app.add_subcommand("lib", "print a library artifact");
  std::string lib_name;
  std::vector<std::string> lib_params;
  lib->add_option("name", lib_name)->required();
  lib->add_option("params", lib_params, "key=value");
  add_emit(lib);

  auto* ae = app.add_subcommand("arith-eval", "bounded arithmetic evaluation");
  Nat first_bound = 0;
  bool powerset = false;
  std::string ae_in, second_in;
  ae->add_option("--first-bound", first_bound)->required();
  ae->add_flag("--powerset-of-first-bound", powerset);
  ae->add_option("--second", second_in, "file with one set per line, e.g. 0 2 5");
  ae->add_option("formula", ae_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  Report rep;
  int code = 0;
  try {
    EvalOptions opt;
    opt.cap_traces = cap_traces;
    opt.cap_assignments = cap_assignments;
    auto format_formula = [&](const Formula& f) {
      return emit == "ast" ? dump_ast(f) : print_formula(f) + "\n";
    };
    auto format_arith = [&](const ArithFormula& f) {
      return emit == "ast" ? dump_arith(f) : print_arith(f) + "\n";
    };
    auto use_ambient = [&]() {
      if (!ambient.empty()) {
        opt.ambient = load_traces(ambient);
        rep.caveats.push_back("ALL is replaced by a finite ambient of " +
                              std::to_string(opt.ambient->size()) + " traces");
        rep.bounds["ambient_traces"] = opt.ambient->size();
      }
    };

    if (*parse) {
      rep.command = "parse";
      rep.output = dump_ast(load_formula(parse_in, std::nullopt).phi);
    } else if (*ev) {
      rep.command = "eval";
      TraceSet T = load_traces(model);
      FormulaInput in = load_formula(ev_in, T.alphabet());
      if (!(in.ap == T.alphabet())) T = project(T, in.ap);
      use_ambient();
      if (semantics == "std") {
        if (!opt.ambient) throw UsageError("--semantics std needs --ambient");
        opt.semantics = Semantics::Standard;
      } else if (semantics == "mm" && opt.ambient) {
        opt.semantics = Semantics::Standard;
      }
      rep.verdict = evaluate(T, in.phi, opt);
      rep.bounds["model_traces"] = T.size();
      if (!*rep.verdict) rep.explanation = explain(T, in.phi, opt, {}, 0);
    } else if (*mc) {
      rep.command = "mc";
      TransitionSystem ts = load_ts(ts_in);
      FormulaInput in = load_formula(mc_in, ts.ap);
      use_ambient();
      if (semantics == "std") {
        if (!opt.ambient) throw UsageError("--semantics std needs --ambient");
        opt.semantics = Semantics::Standard;
      }
      Verdict v = model_check_bounded(ts, in.phi, stem, loop, opt);
      rep.verdict = v.value;
      rep.bounds["stem"] = v.stem_bound;
      rep.bounds["loop"] = v.loop_bound;
      rep.bounds["traces"] = v.traces;
      if (!v.caveat.empty()) rep.caveats.push_back(v.caveat);
    } else if (*lfp) {
      rep.command = "lfp";
      TraceSet T = load_traces(model);
      FormulaInput in = load_formula(lfp_in, T.alphabet());
      use_ambient();
      LfpSentence s = validate_lfp_shape(in.phi, in.ap);
      rep.verdict = eval_lfp_sentence(T, s, opt.ambient);
      rep.bounds["model_traces"] = T.size();
      LfpContext ctx{&s, {}};
      ctx.pi.sets[kDom] = T;
      if (opt.ambient) ctx.pi.sets[kAll] = *opt.ambient;
      std::size_t ready = 0;  // fixpoints computable without binding trace variables
      while (ready < s.k() && s.blocks[ready].empty()) {
        FixpointTrace ft = compute_lfp(ctx, ready + 1);
        ctx.pi.sets[s.fixpoints[ready].Y] = ft.result;
        if (stages) {
          for (std::size_t l = 0; l < ft.stages.size(); ++l) {
            rep.output += "# " + s.fixpoints[ready].Y + " stage " + std::to_string(l + 1) + "\n";
            rep.output += format_traceset(ft.stages[l]);
          }
        }
        ++ready;
      }
      if (stages && ready < s.k())
        rep.caveats.push_back("stages shown only for fixpoints not depending on trace variables");
      if (!witness.empty()) {
        std::size_t j = std::stoul(witness[1]);
        if (j == 0 || j > ready) throw UsageError("--witness: fixpoint index not computable here");
        LassoTrace t = parse_trace(witness[0], in.ap);
        auto w = build_witness_tree(ctx, t, j);
        if (w) rep.output += format_witness_tree(*w, in.ap);
        else rep.output += "no witness tree: trace is not in the fixpoint\n";
      }
    } else if (*tr) {
      rep.command = "translate";
      std::optional<Alphabet> ap;
      if (!tr_ap.empty()) {
        std::vector<std::string> ps;
        std::stringstream ss(tr_ap);
        for (std::string w; std::getline(ss, w, ',');) ps.push_back(w);
        ap = Alphabet(ps);
      }
      std::optional<TransitionSystem> ts;
      if (!tr_ts.empty()) {
        ts = load_ts(tr_ts);
        if (!ap) ap = ts->ap;
      }
      if (pass.rfind("sigma12:", 0) == 0) {
        Nat n = std::stoull(pass.substr(8));
        std::string text = std::filesystem::is_regular_file(tr_in) ? read_file(tr_in) : tr_in;
        Sigma12Encoding enc = sigma12_encode(parse_arith(text), n);
        rep.output = "# aps:";
        for (auto& p : enc.ap.props()) rep.output += " " + p;
        rep.output += "\n" + format_formula(enc.phi);
      } else {
        FormulaInput in = load_formula(tr_in, ap);
        if (pass == "cw2std") {
          rep.output = format_formula(cw_to_standard(in.phi, in.ap, prenex));
        } else if (pass == "mm-desugar") {
          rep.output = format_formula(mm_desugar(in.phi, in.ap, prenex));
        } else if (pass == "minmax:min" || pass == "minmax:max") {
          MinMaxEncoding enc =
              minmax_encode(in.phi, in.ap, pass == "minmax:min" ? Polarity::Min : Polarity::Max);
          rep.output = "# aps:";
          for (auto& p : enc.ap.props()) rep.output += " " + p;
          rep.output += "\n# phi\n" + format_formula(enc.phi) + "# phi_ext\n" +
                        format_formula(enc.phi_ext);
        } else if (pass == "ar") {
          rep.output = format_arith(ar_translate(in.phi, in.ap));
        } else if (pass == "fssat") {
          rep.output = format_arith(fssat_arith_encode(in.phi, in.ap));
        } else if (pass == "mc") {
          if (!ts) throw UsageError("--pass mc needs --ts");
          rep.output = format_arith(mc_arith_encode(*ts, in.phi));
        } else if (pass == "lfp-mc") {
          if (!ts) throw UsageError("--pass lfp-mc needs --ts");
          rep.output = format_arith(lfp_mc_arith_encode(*ts, validate_lfp_shape(in.phi, in.ap)));
        } else if (pass == "fssat2mc") {
          FssatToMc enc = fssat_to_mc(in.phi, in.ap);
          rep.output = "# system\n" + format_ts(enc.ts) + "# phi\n" + format_formula(enc.phi);
        } else {
          throw UsageError("unknown pass '" + pass + "'");
        }
      }
    } else if (*lib) {
      rep.command = "lib";
      std::map<std::string, std::string> ps;
      for (auto& kv : lib_params) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("parameter '" + kv + "' is not key=value");
        ps[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      LibraryArtifact a = library(lib_name, ps);
      if (a.formula) {
        rep.output = "aps:";
        for (auto& p : a.ap.props()) rep.output += " " + p;
        rep.output += "\n" + format_formula(*a.formula);
      } else if (a.ts) {
        rep.output = format_ts(*a.ts);
      } else if (a.traces) {
        rep.output = format_traceset(*a.traces);
      }
    } else if (*ae) {
      rep.command = "arith-eval";
      std::string text = std::filesystem::is_regular_file(ae_in) ? read_file(ae_in) : ae_in;
      ArithFormula f = parse_arith(text);
      ScopeBounds b;
      b.first_bound = first_bound;
      if (powerset) b.second_universe = powerset_family(first_bound);
      if (!second_in.empty()) {
        NatFamily fam;
        std::istringstream in(read_file(second_in));
        for (std::string line; std::getline(in, line);) {
          if (line.empty() || line[0] == '#') continue;
          std::istringstream ls(line);
          NatSet s;
          for (Nat n; ls >> n;) s.push_back(n);
          std::sort(s.begin(), s.end());
          s.erase(std::unique(s.begin(), s.end()), s.end());
          fam.push_back(s);
        }
        b.second_universe = normalize_family(fam);
      }
      ArithResult r = eval_arith_bounded(f, b);
      rep.verdict = r.value;
      rep.bounds["first_bound"] = first_bound;
      if (b.second_universe) rep.bounds["second_universe"] = b.second_universe->size();
      if (!r.caveat.empty()) rep.caveats.push_back(r.caveat);
    }
    if (rep.verdict) code = *rep.verdict ? 0 : 1;
  } catch (const CapExceeded& e) {
    std::cerr << "resource cap exceeded: " << e.what() << "\n";
    code = 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line << ":" << e.column << ": " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 2;
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (code >= 2) {
    if (as_json) {
      json j;
      j["command"] = rep.command;
      j["verdict"] = nullptr;
      j["exit_code"] = code;
      std::cout << j.dump(2) << "\n";
    }
    return code;
  }
  if (as_json) {
    json j;
    j["command"] = rep.command;
    j["verdict"] = rep.verdict ? json(*rep.verdict) : json(nullptr);
    j["bounds"] = rep.bounds;
    if (!rep.caveats.empty()) j["caveat"] = rep.caveats;
    if (!rep.explanation.empty()) j["explanation"] = rep.explanation;
    if (!rep.output.empty()) j["output"] = rep.output;
    j["timing_ms"] = ms;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << rep.output;
    if (rep.verdict) {
      std::cout << (*rep.verdict ? "true" : "false");
      if (!rep.explanation.empty()) std::cout << ": " << rep.explanation;
      std::cout << "\n";
      for (auto& c : rep.caveats) std::cout << "caveat: " << c << "\n";
    }
  }
  return code;
}
