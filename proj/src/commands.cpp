#include "algclosure/commands.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "algclosure/algsets.hpp"
#include "algclosure/supernormal.hpp"

namespace algclosure {

using nlohmann::ordered_json;

namespace {

struct Budgeted : BudgetExceeded {
  using BudgetExceeded::BudgetExceeded;
};

ordered_json header(const Scenario* s, std::string_view command) {
  ordered_json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["command"] = std::string(command);
  r["scenario_digest"] = s ? ordered_json(s->digest()) : ordered_json(nullptr);
  r["outcome"] = "success";
  r["budget_exhausted"] = false;
  return r;
}

ordered_json element_list(const Group& g, std::span<const Element> es) {
  auto out = ordered_json::array();
  for (const auto& e : es) out.push_back(g.format(e));
  return out;
}

ordered_json rational_json(const Rational& r) { return to_string(r); }

ordered_json seminorm_json(const Seminorm& n, const SeminormValue& v) {
  ordered_json out;
  out["kind"] = to_string(v.kind);
  out["value"] = v.kind == SeminormValue::Kind::infinite ? ordered_json(nullptr) : rational_json(v.value);
  if (v.kind == SeminormValue::Kind::exact) out["factorization"] = n.format_factorization(v);
  return out;
}

ordered_json composite_json(const SeminormFamily& f, const CompositeValue& v) {
  const auto& g = f.construction().group();
  ordered_json out;
  out["kind"] = to_string(v.kind);
  out["total"] = v.kind == SeminormValue::Kind::infinite ? ordered_json(nullptr) : rational_json(v.total);
  auto terms = ordered_json::array();
  for (const auto& t : v.terms) {
    ordered_json j;
    j["p"] = t.p;
    j["q"] = t.q;
    j["conjugated"] = g.format(t.conjugated);
    j["value"] = seminorm_json(f.base(t.q), t.value);
    terms.push_back(std::move(j));
  }
  out["terms"] = std::move(terms);
  return out;
}

ordered_json check_json(const CheckReport& c) {
  ordered_json out;
  out["ok"] = c.ok;
  out["checked"] = c.checked;
  if (!c.ok) out["failure"] = c.failure;
  return out;
}

std::vector<Element> first_elements(ElementStream s, std::size_t limit) {
  std::vector<Element> out;
  while (out.size() < limit)
    if (auto e = s.next()) out.push_back(std::move(*e));
    else break;
  return out;
}

// A finite group as a table, with the source element of every table index.
struct Tabulated {
  std::shared_ptr<const FiniteGroup> table;
  std::vector<Element> source;
  std::unordered_map<Element, std::uint32_t, ElementHash> index;
  bool renamed = false;
};

Tabulated tabulated(const GroupHandle& g) {
  if (!g->is_finite()) throw ScenarioError(g->describe() + " is infinite; this command needs a finite group");
  Tabulated t;
  if (auto f = std::dynamic_pointer_cast<const FiniteGroup>(g)) {
    t.table = f;
  } else {
    t.table = tabulate(*g);
    t.renamed = true;
  }
  auto s = g->enumerate();
  std::uint32_t i = 0;
  while (auto e = s.next()) {
    if (!t.renamed) i = FiniteGroup::index_of(*e);
    t.index.emplace(*e, i);
    t.source.push_back(*e);
    ++i;
  }
  if (!t.renamed) {
    t.source.assign(t.table->size(), Element{});
    for (const auto& [e, k] : t.index) t.source[k] = e;
  }
  return t;
}

std::uint32_t index_in(const Tabulated& t, const Group& g, const Element& e) {
  auto it = t.index.find(e);
  if (it == t.index.end()) throw ScenarioError(g.format(e) + " is not an element of " + g.describe());
  return it->second;
}

ordered_json index_list(const Tabulated& t, const Group& g, std::span<const std::uint32_t> xs) {
  auto out = ordered_json::array();
  for (auto x : xs) out.push_back(g.format(t.source[x]));
  return out;
}

std::string construct_subgroup_name(const Scenario& s, const ConstructParams& p) {
  const auto set_group = s.set_group(p.set);
  if (!p.subgroup) return "whole:" + set_group;
  if (s.subgroup_group(*p.subgroup) != set_group)
    throw ScenarioError("subgroup '" + *p.subgroup + "' and set '" + p.set + "' live in different groups");
  return *p.subgroup;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

ordered_json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

ordered_json refutation_json(const Group& g, const ClosureRefutation& r) {
  ordered_json out;
  out["stage"] = r.stage;
  out["a"] = element_list(g, r.a);
  out["x"] = element_list(g, r.x);
  auto fs = ordered_json::array();
  for (const auto& f : r.functions) fs.push_back(format_mf(f));
  out["functions"] = std::move(fs);
  auto cover = ordered_json::array();
  for (const auto& [e, k] : r.cover) cover.push_back(ordered_json::array({g.format(e), k}));
  out["cover"] = std::move(cover);
  return out;
}

ordered_json stage_json(const Group& g, const StageRecord& r) {
  ordered_json out;
  out["stage"] = r.stage;
  out["x"] = g.format(r.x);
  out["alpha"] = r.alpha;
  out["placement"] = std::string(to_string(r.placement));
  out["relocated_from"] = r.relocated_from ? ordered_json(*r.relocated_from) : ordered_json(nullptr);
  out["free_index_taken"] = r.free_index_taken ? ordered_json(*r.free_index_taken) : ordered_json(nullptr);
  out["scanned"] = r.scanned;
  return out;
}

std::vector<Element> fixed_for(const Construction& c, std::uint32_t j) {
  std::vector<Element> out;
  for (std::uint32_t i = 1; i <= j; ++i) out.push_back(c.a(i));
  for (std::uint32_t i = 1; i < j; ++i) out.push_back(c.x(i));
  return out;
}

// Stage facts re-derived with evaluation and the generic paired search only.
ordered_json recheck_stages(const Construction& c, std::size_t state_cap, bool& ok) {
  const auto& g = c.group();
  auto out = ordered_json::array();
  for (const auto& r : c.records()) {
    const auto j = r.stage;
    auto fixed = fixed_for(c, j);
    const std::size_t max_len = 3 * static_cast<std::size_t>(j) + 2;
    ordered_json s;
    s["stage"] = j;
    s["x_in_A"] = c.set().contains(r.x);
    bool distinct = true;
    for (std::uint32_t i = 0; i <= j; ++i) distinct = distinct && !(c.a(i) == r.x);
    s["x_unnumbered_before"] = distinct;
    s["identity_outside_B"] = !paired_search(g, fixed, g.identity(), max_len, state_cap).member;
    s["x_outside_B"] = !paired_search(g, fixed, r.x, max_len, state_cap).member;
    bool stage_ok = distinct && s["x_in_A"].get<bool>() && s["identity_outside_B"].get<bool>() &&
                    s["x_outside_B"].get<bool>();
    for (std::uint64_t p = 1; p <= static_cast<std::uint64_t>(j) + 1; ++p) stage_ok = stage_ok && c.numbered(p);
    s["ok"] = stage_ok;
    ok = ok && stage_ok;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CommandResult run_closure(const Scenario& s, const CommandOptions& o) {
  if (!s.closure()) throw ScenarioError("scenario has no [closure] section");
  const auto& p = *s.closure();
  if (s.set_group(p.set) != p.group)
    throw ScenarioError("set '" + p.set + "' is not a subset of group '" + p.group + "'");
  auto g = s.group(p.group);
  auto set = s.set(p.set);
  auto t = tabulated(g);
  const auto cap = o.budget.value_or(s.engine().closure_cap);

  std::vector<std::uint32_t> input;
  for (const auto& e : set.elements(t.source.size() + 1)) input.push_back(index_in(t, *g, e));
  std::sort(input.begin(), input.end());
  input.erase(std::unique(input.begin(), input.end()), input.end());

  ElementaryFamily family(t.table, cap);
  auto result = algebraic_closure_finite(family, make_subset(*t.table, input));
  auto closure = subset_members(result.closure);

  CommandResult out;
  auto& r = out.report = header(&s, "closure");
  ordered_json body;
  body["group"] = g->describe();
  body["order"] = t.table->size();
  body["set"] = set.description();
  body["input"] = index_list(t, *g, input);
  body["closure"] = index_list(t, *g, closure);
  body["closed"] = result.closure == result.input;
  body["word_functions"] = family.monoid_size();
  body["elementary_sets"] = family.sets().size();
  auto certs = ordered_json::array();
  for (const auto& c : result.certificates) {
    ordered_json j;
    j["excluded"] = g->format(t.source[c.excluded]);
    auto cover = ordered_json::array();
    for (const auto& [a, w] : c.cover) cover.push_back(ordered_json::array({g->format(t.source[a]), format_word(w, *t.table)}));
    j["cover"] = std::move(cover);
    certs.push_back(std::move(j));
  }
  body["certificates"] = std::move(certs);
  if (t.renamed) {
    ordered_json names;
    for (std::uint32_t i = 0; i < t.table->size(); ++i) names[t.table->name(i)] = g->format(t.source[i]);
    body["constant_names"] = std::move(names);
  }
  r["result"] = std::move(body);
  if (o.recheck) {
    const bool ok = verify_closure_result(*t.table, result);
    r["recheck"] = {{"ok", ok}, {"certificates", result.certificates.size()}};
    if (!ok) {
      r["outcome"] = "invariant-violation";
      out.exit_code = exit_invariant;
    }
  }
  return out;
}

CommandResult run_construct(const Scenario& s, const CommandOptions& o, bool refute) {
  const char* name = refute ? "refute" : "construct";
  if (!s.construct()) throw ScenarioError("scenario has no [construct] section");
  const auto& p = *s.construct();
  const auto sub_name = construct_subgroup_name(s, p);
  auto h = s.subgroup(sub_name);
  auto a = s.set(p.set);
  if (refute && !a.is_finite()) throw ScenarioError("refute needs a finite set; declare finite = true or list its elements");
  auto policy = s.engine().policy;
  if (o.budget) policy.state_cap = *o.budget;
  const auto stages = o.stages.value_or(p.stages.value_or(s.engine().stages));

  std::optional<Construction> c;
  std::optional<std::uint32_t> resumed_from;
  if (o.resume) {
    c.emplace(Construction::resume(h, a, policy, read_json(*o.resume)));
    resumed_from = c->stage();
  } else {
    c.emplace(h, a, policy);
  }
  const auto& g = c->group();

  CommandResult out;
  auto& r = out.report = header(&s, name);
  ordered_json body;
  body["group"] = g.describe();
  body["subgroup"] = h.description();
  body["set"] = a.description();
  body["a1"] = g.format(c->a1());
  body["stages_requested"] = stages;

  std::optional<ClosureRefutation> refutation;
  std::optional<Inconclusive> inconclusive;
  while (c->stage() < stages) {
    auto step = c->advance();
    if (auto* ref = std::get_if<ClosureRefutation>(&step)) {
      refutation = std::move(*ref);
      break;
    }
    if (auto* inc = std::get_if<Inconclusive>(&step)) {
      inconclusive = std::move(*inc);
      break;
    }
  }

  body["stages_completed"] = c->stage();
  auto recs = ordered_json::array();
  for (const auto& rec : c->records()) recs.push_back(stage_json(g, rec));
  body["stages"] = std::move(recs);

  bool transfer_ok = true;
  auto transfer = ordered_json::array();
  for (std::uint32_t j = 2; j <= c->stage() + 1; ++j) {
    auto t = c->transfer_check(j);
    ordered_json tj;
    tj["j"] = j;
    tj["holds"] = t.holds;
    tj["states"] = t.states;
    if (t.violation) tj["violation"] = format_mf(*t.violation);
    transfer_ok = transfer_ok && t.holds;
    transfer.push_back(std::move(tj));
  }
  body["transfer"] = std::move(transfer);

  auto numbering = ordered_json::array();
  for (const auto& [pos, e] : c->materialize(s.engine().materialize)) numbering.push_back(ordered_json::array({pos, g.format(e)}));
  body["numbering"] = std::move(numbering);

  if (refutation) {
    body["verdict"] = "identity-outside-closure";
    body["refutation"] = refutation_json(g, *refutation);
  } else if (inconclusive) {
    body["verdict"] = "inconclusive";
    body["inconclusive"] = {{"stage", inconclusive->stage}, {"scanned", inconclusive->scanned}, {"reason", inconclusive->reason}};
    r["outcome"] = "inconclusive";
    r["budget_exhausted"] = inconclusive->reason.find("budget") != std::string::npos;
    out.exit_code = exit_inconclusive;
  } else if (refute) {
    body["verdict"] = "no-refutation-within-stages";
    r["outcome"] = "inconclusive";
    out.exit_code = exit_inconclusive;
  } else {
    body["verdict"] = "stages-completed";
  }
  if (!transfer_ok) {
    r["outcome"] = "invariant-violation";
    out.exit_code = exit_invariant;
  }
  r["result"] = std::move(body);

  if (o.recheck) {
    ordered_json rc;
    bool ok = true;
    if (refutation) {
      std::string why;
      const bool valid = verify_refutation(g, *refutation, a, &why);
      rc["refutation"] = {{"ok", valid}};
      if (!valid) rc["refutation"]["failure"] = why;
      ok = ok && valid;
    }
    rc["stages"] = recheck_stages(*c, policy.state_cap, ok);
    const auto snap = c->snapshot();
    const bool round_trip = Construction::resume(h, a, policy, snap).snapshot() == snap;
    rc["snapshot_round_trip"] = round_trip;
    ok = ok && round_trip;
    rc["ok"] = ok;
    r["recheck"] = std::move(rc);
    if (!ok) {
      r["outcome"] = "invariant-violation";
      out.exit_code = exit_invariant;
    }
  }
  if (resumed_from) r["result"]["resumed_from_stage"] = *resumed_from;
  if (o.snapshot_out) write_file(*o.snapshot_out, c->snapshot().dump(2) + "\n");
  return out;
}

CommandResult run_verify(const Scenario& s, const CommandOptions& o) {
  if (!s.construct()) throw ScenarioError("verify needs a [construct] section naming the instance");
  const auto vp = s.verify().value_or(VerifyParams{});
  const auto& cp = *s.construct();
  auto h = s.subgroup(construct_subgroup_name(s, cp));
  auto a = s.set(cp.set);
  auto policy = s.engine().policy;
  auto sn = s.engine().seminorm;
  if (o.budget) sn.node_cap = *o.budget;
  if (o.ceiling) {
    try {
      sn.ceiling = parse_rational(*o.ceiling);
    } catch (const std::exception&) {
      throw ScenarioError("--ceiling must be a rational such as 1 or 3/2");
    }
    if (*sn.ceiling <= Rational(0)) throw ScenarioError("--ceiling must be positive");
  }

  SeminormSpec spec{o.p.value_or(vp.p), o.q.value_or(vp.q), o.trunc.value_or(vp.truncation.value_or(s.engine().truncation))};
  spec.validate();
  for (auto q : spec.q)
    if (q > spec.truncation)
      throw ScenarioError("q = " + std::to_string(q) + " exceeds the truncation T = " + std::to_string(spec.truncation));
  SeminormSpec second{vp.second_p, vp.second_q, spec.truncation};
  second.validate();
  std::uint64_t m = spec.n();
  for (auto v : spec.p) m = std::max(m, v);
  for (auto v : spec.q) m = std::max<std::uint64_t>(m, v);
  const auto need = static_cast<std::uint32_t>(std::max<std::uint64_t>(spec.truncation, m + 1));

  std::optional<Construction> c;
  if (o.resume) {
    c.emplace(Construction::resume(h, a, policy, read_json(*o.resume)));
    if (c->stage() < need)
      throw ScenarioError("snapshot has " + std::to_string(c->stage()) + " stages; the witness needs s = " +
                          std::to_string(m + 1) + " and truncation " + std::to_string(need));
  } else {
    c.emplace(h, a, policy);
    const auto target = std::max(need, o.stages.value_or(cp.stages.value_or(s.engine().stages)));
    while (c->stage() < target) {
      auto step = c->advance();
      if (auto* inc = std::get_if<Inconclusive>(&step)) throw Budgeted("stage " + std::to_string(inc->stage) + ": " + inc->reason);
      if (std::holds_alternative<ClosureRefutation>(step))
        throw ScenarioError("the identity is outside the closure of A (refuted at stage " + std::to_string(c->stage() + 1) +
                            "), so there is no closure witness");
    }
  }
  const auto& g = c->group();

  CommandResult out;
  auto& r = out.report = header(&s, "verify");
  ordered_json body;
  body["group"] = g.describe();
  body["set"] = a.description();
  body["stages"] = c->stage();
  body["spec"] = spec.describe();
  bool ok = true;

  auto w = closure_witness(*c, spec, sn);
  {
    ordered_json wj;
    wj["s"] = w.s;
    wj["x"] = g.format(w.x);
    wj["bound"] = rational_json(w.bound);
    auto proof = ordered_json::array();
    for (const auto& [label, weight] : w.single_generator_proof) proof.push_back(ordered_json::array({label, rational_json(weight)}));
    wj["single_generator_proof"] = std::move(proof);
    SeminormFamily wf(*c, std::max<std::uint32_t>(spec.truncation, w.s), sn);
    wj["computed"] = composite_json(wf, w.computed);
    wj["in_A"] = w.in_A;
    wj["certified"] = w.certified;
    ok = ok && w.certified;
    body["closure_witness"] = std::move(wj);
  }

  std::vector<Element> sample;
  for (const auto& [pos, e] : c->materialize(s.engine().samples)) sample.push_back(e);
  SeminormFamily fam(*c, spec.truncation, sn);
  auto axioms = ordered_json::array();
  for (std::uint32_t q = 1; q <= spec.truncation; ++q) {
    auto rep = check_seminorm_axioms(fam.base(q), sample);
    auto j = check_json(rep);
    j["q"] = q;
    ok = ok && rep.ok;
    axioms.push_back(std::move(j));
  }
  body["axioms"] = std::move(axioms);

  if (spec.truncation >= 2) {
    SeminormFamily lower(*c, spec.truncation - 1, sn);
    CheckReport mono;
    for (std::uint32_t q = 1; q < spec.truncation && mono.ok; ++q) {
      for (const auto& x : sample) {
        ++mono.checked;
        auto hi = fam.base(q).value(x);
        auto lo = lower.base(q).value(x);
        // more generators can only lower the value
        bool fine = !hi.finite() ? !lo.finite() : (!lo.finite() || hi.value <= lo.value);
        if (!fine) {
          mono.ok = false;
          mono.failure = "N_" + std::to_string(q) + "(" + g.format(x) + ") grows from T=" +
                         std::to_string(spec.truncation - 1) + " to T=" + std::to_string(spec.truncation);
          break;
        }
      }
    }
    auto j = check_json(mono);
    j["from"] = spec.truncation - 1;
    j["to"] = spec.truncation;
    ok = ok && mono.ok;
    body["truncation_monotonicity"] = std::move(j);
  }

  {
    std::vector<Element> fb(sample.begin(), sample.begin() + std::min<std::size_t>(sample.size(), 100));
    auto rep = filterbase_check(fam, spec, second, fb);
    auto j = check_json(rep);
    j["second"] = second.describe();
    ok = ok && rep.ok;
    body["filterbase"] = std::move(j);
  }
  {
    auto id = in_UN(fam, spec, g.identity());
    body["identity_in_U"] = id.certified;
    ok = ok && id.certified;
  }
  body["unverified"] = ordered_json::array(
      {"Hausdorff property of the topology generated by the neighborhoods U_N",
       "closedness of the complement of A* in that topology"});
  r["result"] = std::move(body);
  if (o.recheck) {
    const bool rc = fam.base(1).verify(g.identity(), fam.base(1).value(g.identity())) && w.certified;
    r["recheck"] = {{"ok", rc}};
    ok = ok && rc;
  }
  if (!ok) {
    const bool capped = sn.ceiling.has_value();
    r["outcome"] = capped ? "inconclusive" : "invariant-violation";
    out.exit_code = capped ? exit_inconclusive : exit_invariant;
  }
  return out;
}

CommandResult run_supernormal(const Scenario& s, const CommandOptions& o) {
  if (!s.supernormal()) throw ScenarioError("scenario has no [supernormal] section");
  const auto& p = *s.supernormal();
  auto g = s.group(p.group);
  CommandResult out;
  auto& r = out.report = header(&s, "supernormal");
  ordered_json body;
  body["group"] = g->describe();
  body["mode"] = p.mode;

  if (p.mode == "finite") {
    auto t = tabulated(g);
    std::vector<std::pair<std::string, std::vector<std::uint32_t>>> subs;
    if (!p.elements.empty()) {
      std::vector<std::uint32_t> members;
      for (const auto& tok : p.elements) members.push_back(index_in(t, *g, g->parse(tok)));
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      subs.emplace_back("elements", members);
    } else if (p.subgroup == "all") {
      std::size_t k = 0;
      for (auto& sub : all_subgroups(*t.table)) subs.emplace_back("#" + std::to_string(k++), std::move(sub));
    } else {
      if (s.subgroup_group(p.subgroup) != p.group)
        throw ScenarioError("subgroup '" + p.subgroup + "' is not a subgroup of '" + p.group + "'");
      auto h = s.subgroup(p.subgroup);
      std::vector<std::uint32_t> members;
      for (std::uint32_t i = 0; i < t.table->size(); ++i)
        if (h.contains(t.source[i])) members.push_back(i);
      subs.emplace_back(p.subgroup, members);
    }
    body["abelian"] = t.table->is_abelian();
    bool agree_all = true;
    std::size_t supernormal_count = 0;
    auto list = ordered_json::array();
    for (const auto& [label, members] : subs) {
      auto rep = is_supernormal_finite(*t.table, members);
      const bool oracle = supernormal_center_oracle(*t.table, members);
      const bool valid = verify_supernormality(*t.table, members, rep);
      ordered_json j;
      j["subgroup"] = label;
      j["members"] = index_list(t, *g, members);
      j["supernormal"] = rep.supernormal;
      j["center_oracle"] = oracle;
      j["agree"] = oracle == rep.supernormal;
      if (o.recheck) j["recheck"] = valid;
      if (!rep.mismatches.empty()) {
        const auto& m = rep.mismatches.front();
        ordered_json mm;
        mm["x"] = g->format(t.source[m.x]);
        auto refs = ordered_json::array();
        for (const auto& [y, hh] : m.refutations)
          refs.push_back(ordered_json::array({g->format(t.source[y]), g->format(t.source[hh])}));
        mm["refutations"] = std::move(refs);
        j["first_mismatch"] = std::move(mm);
        j["mismatches"] = rep.mismatches.size();
      }
      supernormal_count += rep.supernormal;
      agree_all = agree_all && oracle == rep.supernormal && (!o.recheck || valid);
      list.push_back(std::move(j));
    }
    body["subgroups"] = std::move(list);
    body["supernormal_count"] = supernormal_count;
    body["all_agree"] = agree_all;
    if (!agree_all) {
      r["outcome"] = "invariant-violation";
      out.exit_code = exit_invariant;
    }
  } else {
    const auto n = s.engine().samples;
    std::vector<Element> hs = first_elements(g->enumerate(), n);
    std::vector<Element> candidates;
    if (p.subgroup == "all") throw ScenarioError("sampled mode needs a named subgroup");
    auto h = s.subgroup(p.subgroup);
    if (s.subgroup_group(p.subgroup) != p.group)
      throw ScenarioError("subgroup '" + p.subgroup + "' is not a subgroup of '" + p.group + "'");
    candidates = sample_members(h, n);
    std::vector<Element> xs;
    for (const auto& tok : p.elements) xs.push_back(g->parse(tok));
    if (xs.empty()) xs = first_elements(g->enumerate(), std::min<std::size_t>(n, 20));
    auto rep = is_supernormal_sampled(*g, xs, candidates, hs);
    body["subgroup"] = h.description();
    body["proof"] = false;
    body["xs_tested"] = rep.xs_tested;
    body["consistent"] = rep.consistent;
    auto matches = ordered_json::array();
    for (const auto& [x, y] : rep.matches) matches.push_back(ordered_json::array({g->format(x), g->format(y)}));
    body["matches"] = std::move(matches);
    if (rep.unmatched_x) body["unmatched_x"] = g->format(*rep.unmatched_x);
    if (!p.keep.empty()) {
      SubgroupSpec whole(g);
      auto proj = ordered_json::array();
      for (const auto& x : xs) {
        auto w = conjugation_witness(whole, x, p.keep, hs);
        ordered_json j;
        j["x"] = g->format(x);
        j["y"] = g->format(w.y);
        j["y_in_subgroup"] = h.contains(w.y);
        j["ok"] = w.ok;
        j["checked"] = w.checked;
        if (w.violating_h) j["violating_h"] = g->format(*w.violating_h);
        proj.push_back(std::move(j));
      }
      body["projection_witnesses"] = std::move(proj);
    }
    if (!rep.consistent) body["verdict"] = "no-match-among-samples";
    else body["verdict"] = "consistent-on-samples";
  }
  r["result"] = std::move(body);
  return out;
}

CommandResult run_command(std::string_view command, const CommandOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<Scenario> s;
  CommandResult out;
  auto fail = [&](const char* outcome, int code, const std::string& msg, bool budget = false) {
    out = CommandResult{};
    out.report = header(s ? &*s : nullptr, command);
    out.report["outcome"] = outcome;
    out.report["budget_exhausted"] = budget;
    out.report["error"] = msg;
    out.exit_code = code;
  };
  try {
    s = Scenario::load(o.scenario);
    if (command == "closure") out = run_closure(*s, o);
    else if (command == "construct") out = run_construct(*s, o, false);
    else if (command == "refute") out = run_construct(*s, o, true);
    else if (command == "verify") out = run_verify(*s, o);
    else if (command == "supernormal") out = run_supernormal(*s, o);
    else throw ScenarioError("unknown command '" + std::string(command) + "'");
  } catch (const InvariantViolation& e) {
    fail("invariant-violation", exit_invariant, e.what());
  } catch (const BudgetExceeded& e) {
    fail("inconclusive", exit_inconclusive, e.what(), true);
  } catch (const std::invalid_argument& e) {
    fail("input-error", exit_input, e.what());
  } catch (const std::logic_error& e) {
    fail("invariant-violation", exit_invariant, e.what());
  } catch (const std::exception& e) {
    fail("input-error", exit_input, e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string render_report(const CommandResult& r, bool with_timing) {
  auto j = r.report;
  if (with_timing) {
    std::ostringstream secs;
    secs.precision(6);
    secs << std::fixed << r.seconds;
    j["timing"] = {{"seconds", std::stod(secs.str())}};
  }
  return j.dump(2) + "\n";
}

}  // namespace algclosure
