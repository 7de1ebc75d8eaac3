#include "h2ltl/lfp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace h2ltl {

bool LfpSentence::uses_all() const {
  for (auto& b : blocks)
    for (auto& q : b)
      if (q.range == kAll) return true;
  for (auto& f : fixpoints)
    for (auto& q : f.steps)
      if (q.range == kAll) return true;
  return false;
}

int LfpSentence::fixpoint_index(const std::string& Y) const {
  for (std::size_t i = 0; i < fixpoints.size(); ++i)
    if (fixpoints[i].Y == Y) return static_cast<int>(i + 1);
  return 0;
}

namespace {

void flatten_and(const Formula& f, std::vector<Formula>& out) {
  if (f->op == Op::And) {
    flatten_and(f->a, out);
    flatten_and(f->b, out);
  } else {
    out.push_back(f);
  }
}

// Matches `exists fresh in Y. G AND_p (p[v] <-> p[fresh])`, returning v.
std::optional<std::string> match_in(const Formula& f, const std::string& Y, const Alphabet& ap,
                                    std::string& fresh) {
  if (f->op != Op::ExistsTrace || f->range != Y) return std::nullopt;
  const Formula& g = f->a;
  if (g->op != Op::Globally) return std::nullopt;
  const Node* c = g->a.get();
  while (c->op == Op::And) c = c->a.get();
  if (c->op != Op::Iff || c->a->op != Op::Atom) return std::nullopt;
  std::string v = c->a->var;
  if (!structurally_equal(g, trace_equal(v, f->var, ap.props()))) return std::nullopt;
  fresh = f->var;
  return v;
}

}  // namespace

LfpSentence validate_lfp_shape(const Formula& phi, const Alphabet& ap) {
  LfpSentence s;
  s.ap = ap;
  std::set<std::string> quantified;
  std::set<std::string> ys;
  std::vector<TraceQuant> cur;
  Formula f = phi;
  auto range_ok = [&](const std::string& Z, const std::set<std::string>& allowed_ys) {
    return Z == kAll || Z == kDom || allowed_ys.count(Z);
  };
  while (is_quantifier(f->op)) {
    std::size_t j = s.fixpoints.size() + 1;  // current block index
    if (is_trace_quantifier(f->op)) {
      if (!quantified.insert(f->var).second)
        throw ShapeError("trace variable '" + f->var + "' is quantified more than once");
      if (!range_ok(f->range, ys))
        throw ShapeError("block " + std::to_string(j) + ": range '" + f->range +
                         "' of '" + f->var + "' is not ALL, D, or an earlier fixpoint variable");
      cur.push_back({f->op == Op::ExistsTrace, f->var, f->range});
      f = f->a;
      continue;
    }
    if (f->op == Op::ExistsSet || f->op == Op::ForallSet)
      throw ShapeError("plain set quantifier over '" + f->var + "' (only min-guarded allowed)");
    if (f->pol == Polarity::Max)
      throw ShapeError("guard of '" + f->var + "' has max polarity (only min allowed)");
    if (f->var == kAll || f->var == kDom || ys.count(f->var) || quantified.count(f->var))
      throw ShapeError("set variable '" + f->var + "' is reused");
    s.blocks.push_back(cur);
    cur.clear();
    FixpointSpec fp;
    fp.Y = f->var;
    fp.existential = f->op == Op::ExistsMM;
    std::vector<Formula> cs;
    flatten_and(f->guard, cs);
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      std::string fresh;
      auto v = match_in(cs[i], fp.Y, ap, fresh);
      if (!v) throw ShapeError("guard of '" + fp.Y + "': conjunct " + std::to_string(i + 1) +
                               " is not a seed 'pi |> " + fp.Y + "'");
      if (!quantified.count(*v))
        throw ShapeError("guard of '" + fp.Y + "': seed '" + *v +
                         "' is not quantified in blocks 1.." + std::to_string(j));
      fp.seeds.push_back(*v);
      fp.seed_fresh.push_back(fresh);
    }
    Formula st = cs.back();
    std::set<std::string> ys_here = ys;
    ys_here.insert(fp.Y);
    std::set<std::string> step_names;
    while (st->op == Op::ForallTrace) {
      if (!range_ok(st->range, ys_here))
        throw ShapeError("guard of '" + fp.Y + "': step range '" + st->range +
                         "' is not in {ALL, D, Y_1..Y_" + std::to_string(j) + "}");
      if (quantified.count(st->var) || !step_names.insert(st->var).second)
        throw ShapeError("step variable '" + st->var + "' clashes with another variable");
      fp.steps.push_back({false, st->var, st->range});
      st = st->a;
    }
    if (fp.steps.empty())
      throw ShapeError("guard of '" + fp.Y + "' has no universally quantified step");
    if (st->op != Op::Implies)
      throw ShapeError("guard of '" + fp.Y + "': step is not an implication 'psi -> pi |> " +
                       fp.Y + "'");
    if (contains_quantifier(st->a))
      throw ShapeError("guard of '" + fp.Y + "': step body contains a quantifier");
    std::string fresh;
    auto tv = match_in(st->b, fp.Y, ap, fresh);
    if (!tv) throw ShapeError("guard of '" + fp.Y + "': step target is not 'pi |> " + fp.Y + "'");
    auto it = std::find_if(fp.steps.begin(), fp.steps.end(),
                           [&](const TraceQuant& q) { return q.var == *tv; });
    if (it == fp.steps.end())
      throw ShapeError("guard of '" + fp.Y + "': step target '" + *tv +
                       "' is not a step variable");
    fp.m = static_cast<std::size_t>(it - fp.steps.begin()) + 1;
    fp.target_fresh = fresh;
    fp.step_body = st->a;
    for (auto& v : free_trace_vars(fp.step_body))
      if (!step_names.count(v) && !quantified.count(v))
        throw ShapeError("guard of '" + fp.Y + "': step body uses unbound '" + v + "'");
    ys.insert(fp.Y);
    s.fixpoints.push_back(std::move(fp));
    f = f->a;
  }
  s.blocks.push_back(cur);
  if (contains_quantifier(f)) throw ShapeError("matrix is not quantifier-free");
  for (auto& v : free_trace_vars(f))
    if (!quantified.count(v)) throw ShapeError("matrix uses unbound trace variable '" + v + "'");
  s.matrix = f;
  return s;
}

Formula guard_formula(const FixpointSpec& fp, const Alphabet& ap) {
  Formula step = implies(fp.step_body, in_set(fp.steps[fp.m - 1].var, fp.Y, ap.props(),
                                              fp.target_fresh));
  for (auto it = fp.steps.rbegin(); it != fp.steps.rend(); ++it)
    step = forall_trace(it->var, it->range, step);
  std::vector<Formula> cs;
  for (std::size_t i = 0; i < fp.seeds.size(); ++i)
    cs.push_back(in_set(fp.seeds[i], fp.Y, ap.props(), fp.seed_fresh[i]));
  cs.push_back(step);
  return conj(cs);
}

Formula recompose(const LfpSentence& s) {
  auto wrap_block = [](Formula f, const std::vector<TraceQuant>& b) {
    for (auto it = b.rbegin(); it != b.rend(); ++it)
      f = it->existential ? exists_trace(it->var, it->range, f)
                          : forall_trace(it->var, it->range, f);
    return f;
  };
  Formula f = wrap_block(s.matrix, s.blocks.back());
  for (std::size_t j = s.k(); j-- > 0;) {
    const auto& fp = s.fixpoints[j];
    Formula g = guard_formula(fp, s.ap);
    f = fp.existential ? exists_mm(fp.Y, Polarity::Min, g, f)
                       : forall_mm(fp.Y, Polarity::Min, g, f);
    f = wrap_block(f, s.blocks[j]);
  }
  return f;
}

bool same_decomposition(const LfpSentence& a, const LfpSentence& b) {
  if (!(a.ap == b.ap) || a.blocks != b.blocks || a.k() != b.k()) return false;
  if (!structurally_equal(a.matrix, b.matrix)) return false;
  for (std::size_t i = 0; i < a.k(); ++i) {
    auto& x = a.fixpoints[i];
    auto& y = b.fixpoints[i];
    if (x.Y != y.Y || x.existential != y.existential || x.seeds != y.seeds ||
        x.seed_fresh != y.seed_fresh || x.steps != y.steps || x.m != y.m ||
        x.target_fresh != y.target_fresh || !structurally_equal(x.step_body, y.step_body))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- fixpoints

namespace {

const TraceSet& set_value(const LfpContext& ctx, const std::string& X) {
  auto it = ctx.pi.sets.find(X);
  if (it == ctx.pi.sets.end())
    throw Error("insufficient assignment: set variable '" + X + "' is unbound");
  return it->second;
}

void require_sufficient(const LfpContext& ctx, std::size_t j) {
  const LfpSentence& s = *ctx.phi;
  if (j < 1 || j > s.k()) throw Error("fixpoint index out of range");
  set_value(ctx, kDom);
  if (s.uses_all()) set_value(ctx, kAll);
  for (std::size_t i = 0; i + 1 < j; ++i) set_value(ctx, s.fixpoints[i].Y);
  for (std::size_t b = 0; b < j; ++b)
    for (auto& q : s.blocks[b])
      if (!ctx.pi.traces.count(q.var))
        throw Error("insufficient assignment: trace variable '" + q.var + "' is unbound");
}

// Calls visit(tuple) for every assignment of the step variables; stops when it returns true.
bool for_each_tuple(const LfpContext& ctx, const FixpointSpec& fp, const TraceSet& S,
                    const std::function<bool(const std::vector<const LassoTrace*>&)>& visit) {
  std::vector<const std::vector<LassoTrace>*> ranges;
  double combos = 1;
  for (auto& q : fp.steps) {
    const TraceSet& r = q.range == fp.Y ? S : set_value(ctx, q.range);
    ranges.push_back(&r.members());
    combos *= static_cast<double>(r.size());
  }
  if (combos > static_cast<double>(std::size_t{1} << 20))
    throw CapExceeded("step candidate enumeration exceeds 2^20 tuples");
  for (auto* r : ranges)
    if (r->empty()) return false;
  std::vector<std::size_t> idx(ranges.size(), 0);
  std::vector<const LassoTrace*> tuple(ranges.size());
  while (true) {
    for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = &(*ranges[i])[idx[i]];
    if (visit(tuple)) return true;
    std::size_t i = idx.size();
    while (i > 0) {
      --i;
      if (++idx[i] < ranges[i]->size()) break;
      idx[i] = 0;
      if (i == 0) return false;
    }
  }
}

bool step_holds(const LfpContext& ctx, const FixpointSpec& fp,
                const std::vector<const LassoTrace*>& tuple) {
  Assignment a;
  for (auto& v : free_trace_vars(fp.step_body)) {
    auto it = ctx.pi.traces.find(v);
    if (it != ctx.pi.traces.end()) a.traces[v] = it->second;
  }
  for (std::size_t i = 0; i < tuple.size(); ++i) a.traces[fp.steps[i].var] = *tuple[i];
  return eval_body(a, fp.step_body, ctx.phi->ap);
}

std::vector<LassoTrace> seed_values(const LfpContext& ctx, const FixpointSpec& fp) {
  std::vector<LassoTrace> v;
  for (auto& s : fp.seeds) v.push_back(ctx.pi.traces.at(s));
  return v;
}

}  // namespace

TraceSet lfp_step(const LfpContext& ctx, std::size_t j, const TraceSet& S) {
  require_sufficient(ctx, j);
  const FixpointSpec& fp = ctx.phi->fixpoints[j - 1];
  TraceSet out = S;
  for (auto& t : seed_values(ctx, fp)) out.insert(t);
  for_each_tuple(ctx, fp, S, [&](const std::vector<const LassoTrace*>& tuple) {
    if (step_holds(ctx, fp, tuple)) out.insert(*tuple[fp.m - 1]);
    return false;
  });
  return out;
}

std::size_t FixpointTrace::stage_of(const LassoTrace& t) const {
  for (std::size_t l = 0; l < stages.size(); ++l)
    if (stages[l].contains(t)) return l + 1;
  return 0;
}

FixpointTrace compute_lfp(const LfpContext& ctx, std::size_t j) {
  require_sufficient(ctx, j);
  FixpointTrace r;
  TraceSet S(ctx.phi->ap);
  while (true) {
    TraceSet next = lfp_step(ctx, j, S);
    if (!r.stages.empty() && next == S) break;
    r.stages.push_back(next);
    if (next == S) break;
    S = std::move(next);
  }
  r.result = r.stages.back();
  return r;
}

bool eval_lfp_sentence(const TraceSet& T, const LfpSentence& phi,
                       const std::optional<TraceSet>& ambient) {
  if (!(T.alphabet() == phi.ap)) throw Error("model alphabet differs from the formula alphabet");
  if (phi.uses_all() && !ambient) throw Error("sentence uses ALL but no ambient was supplied");
  LfpContext ctx{&phi, {}};
  ctx.pi.sets[kDom] = T;
  if (ambient) ctx.pi.sets[kAll] = *ambient;
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t b, std::size_t i) -> bool {
    const auto& block = phi.blocks[b];
    if (i < block.size()) {
      const TraceQuant& q = block[i];
      const TraceSet& r = set_value(ctx, q.range);
      std::vector<LassoTrace> members = r.members();  // ctx changes below
      for (auto& t : members) {
        ctx.pi.traces[q.var] = t;
        bool v = rec(b, i + 1);
        ctx.pi.traces.erase(q.var);
        if (v == q.existential) return v;
      }
      return !q.existential;
    }
    if (b < phi.k()) {
      const std::string& Y = phi.fixpoints[b].Y;
      ctx.pi.sets[Y] = compute_lfp(ctx, b + 1).result;
      bool v = rec(b + 1, 0);
      ctx.pi.sets.erase(Y);
      return v;
    }
    return eval_body(ctx.pi, phi.matrix, phi.ap);
  };
  return rec(0, 0);
}

// ---------------------------------------------------------------- witness trees

std::size_t WitnessTree::height() const {
  std::size_t h = 0;
  for (auto& c : children) h = std::max(h, c.height());
  return h + 1;
}

std::vector<LassoTrace> WitnessTree::traces() const {
  std::vector<LassoTrace> v{trace};
  for (auto& c : children) {
    auto w = c.traces();
    v.insert(v.end(), w.begin(), w.end());
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

static int tag_for(const LfpSentence& s, const std::string& Z) {
  if (Z == kDom) return kTagDom;
  if (Z == kAll) return kTagAll;
  return s.fixpoint_index(Z);
}

std::optional<WitnessTree> build_witness_tree(const LfpContext& ctx, const LassoTrace& t,
                                              std::size_t j) {
  require_sufficient(ctx, j);
  const LfpSentence& s = *ctx.phi;
  std::map<std::size_t, FixpointTrace> fps;
  auto fixpoint = [&](std::size_t i) -> const FixpointTrace& {
    auto it = fps.find(i);
    if (it == fps.end()) it = fps.emplace(i, compute_lfp(ctx, i)).first;
    return it->second;
  };
  std::function<WitnessTree(const LassoTrace&, std::size_t)> build =
      [&](const LassoTrace& u, std::size_t i) -> WitnessTree {
    const FixpointSpec& fp = s.fixpoints[i - 1];
    WitnessTree node{u, static_cast<int>(i), {}};
    auto seeds = seed_values(ctx, fp);
    if (std::find(seeds.begin(), seeds.end(), u) != seeds.end()) return node;
    const FixpointTrace& F = fixpoint(i);
    std::size_t l = F.stage_of(u);
    TraceSet prev = l >= 2 ? F.stages[l - 2] : TraceSet(s.ap);
    std::vector<LassoTrace> found;
    for_each_tuple(ctx, fp, prev, [&](const std::vector<const LassoTrace*>& tuple) {
      if (*tuple[fp.m - 1] != u || !step_holds(ctx, fp, tuple)) return false;
      for (auto* p : tuple) found.push_back(*p);
      return true;
    });
    if (found.empty()) throw Error("internal: no step derivation for a fixpoint member");
    for (std::size_t c = 0; c < found.size(); ++c) {
      int tag = tag_for(s, fp.steps[c].range);
      if (tag < 0)
        node.children.push_back({found[c], tag, {}});
      else
        node.children.push_back(build(found[c], static_cast<std::size_t>(tag)));
    }
    return node;
  };
  if (!fixpoint(j).result.contains(t)) return std::nullopt;
  return build(t, j);
}

bool check_witness_tree(const LfpContext& ctx, const WitnessTree& b, const LassoTrace& t,
                        std::size_t j) {
  const LfpSentence& s = *ctx.phi;
  if (b.trace != t || b.tag != static_cast<int>(j)) return false;
  std::function<bool(const WitnessTree&)> ok = [&](const WitnessTree& v) -> bool {
    if (v.tag == kTagDom || v.tag == kTagAll) {
      if (!v.children.empty()) return false;
      auto it = ctx.pi.sets.find(v.tag == kTagDom ? kDom : kAll);
      return it != ctx.pi.sets.end() && it->second.contains(v.trace);
    }
    if (v.tag < 1 || v.tag > static_cast<int>(s.k())) return false;
    const FixpointSpec& fp = s.fixpoints[v.tag - 1];
    for (std::size_t bl = 0; bl < static_cast<std::size_t>(v.tag); ++bl)
      for (auto& q : s.blocks[bl])
        if (!ctx.pi.traces.count(q.var)) return false;
    if (v.children.empty()) {
      auto seeds = seed_values(ctx, fp);
      return std::find(seeds.begin(), seeds.end(), v.trace) != seeds.end();
    }
    if (v.children.size() != fp.steps.size()) return false;
    std::vector<const LassoTrace*> tuple;
    for (std::size_t c = 0; c < v.children.size(); ++c) {
      if (v.children[c].tag != tag_for(s, fp.steps[c].range)) return false;
      tuple.push_back(&v.children[c].trace);
    }
    if (v.trace != *tuple[fp.m - 1] || !step_holds(ctx, fp, tuple)) return false;
    for (auto& c : v.children)
      if (!ok(c)) return false;
    return true;
  };
  return ok(b);
}

std::string format_witness_tree(const WitnessTree& b, const Alphabet& ap) {
  std::string out;
  std::function<void(const WitnessTree&, int)> go = [&](const WitnessTree& v, int ind) {
    std::string tag = v.tag == kTagDom ? "d" : v.tag == kTagAll ? "a" : std::to_string(v.tag);
    out += std::string(ind, ' ') + "(" + format_trace(v.trace, ap) + ", " + tag + ")\n";
    for (auto& c : v.children) go(c, ind + 2);
  };
  go(b, 0);
  return out;
}

}  // namespace h2ltl
