#include "algclosure/scenario.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_set>

#include <openssl/evp.h>
#include <toml.hpp>

namespace algclosure {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return out.str();
}

std::vector<Element> sample_members(const SubgroupSpec& h, std::size_t limit, std::size_t max_steps) {
  std::vector<Element> out;
  auto s = h.ambient().enumerate();
  for (std::size_t step = 0; step < max_steps && out.size() < limit; ++step) {
    auto e = s.next();
    if (!e) break;
    if (h.contains(*e)) out.push_back(std::move(*e));
  }
  return out;
}

std::int64_t coordinate_value(const Group& g, const Element& e, Index k) {
  switch (g.kind()) {
    case GroupKind::integers:
    case GroupKind::finite_table:
      if (k != 1) throw ScenarioError(g.describe() + " has only coordinate 1");
      return e[0];
    case GroupKind::fg_abelian:
      if (k == 0 || k > g.width()) throw ScenarioError("coordinate " + std::to_string(k) + " out of range in " + g.describe());
      return e[k - 1];
    case GroupKind::restricted_product: {
      const auto& p = static_cast<const RestrictedProduct&>(g);
      if (p.component(k).width() != 1)
        throw ScenarioError("coordinate predicates need one-word components, " + p.component(k).describe() + " is wider");
      return p.coordinate(e, k)[0];
    }
  }
  throw ScenarioError("unknown group kind");
}

namespace {

using Predicate = std::function<bool(const Element&)>;

[[noreturn]] void bad(const std::string& where, const std::string& msg) { throw ScenarioError(where + ": " + msg); }

template <typename T>
T required(const toml::table& t, const std::string& key, const std::string& where) {
  auto v = t[key].value<T>();
  if (!v) bad(where, "missing or mistyped key '" + key + "'");
  return *v;
}

template <typename T>
std::vector<T> int_list(const toml::node_view<const toml::node>& n, const std::string& where) {
  std::vector<T> out;
  if (!n) return out;
  auto arr = n.as_array();
  if (!arr) bad(where, "expected an array of integers");
  for (const auto& el : *arr) {
    auto v = el.template value<std::int64_t>();
    if (!v || *v < 0) bad(where, "expected non-negative integers");
    out.push_back(static_cast<T>(*v));
  }
  return out;
}

std::string element_token(const toml::node& n, const std::string& where) {
  if (auto s = n.value<std::string>()) return *s;
  if (auto i = n.value<std::int64_t>()) return std::to_string(*i);
  bad(where, "elements must be strings or integers");
}

Element parse_element(const Group& g, const toml::node& n, const std::string& where) {
  auto tok = element_token(n, where);
  try {
    return g.parse(tok);
  } catch (const std::exception& e) {
    bad(where, "cannot parse element '" + tok + "' in " + g.describe() + ": " + e.what());
  }
}

std::vector<Index> sorted_indices(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

struct Scenario::Impl {
  toml::table root;
  std::string source;
  mutable std::mutex mu;
  mutable std::map<std::string, GroupHandle> groups;
  mutable std::set<std::string> resolving;

  const toml::table* section(const std::string& kind, const std::string& name) const {
    auto t = root[kind][name].as_table();
    return t;
  }

  GroupHandle group(const std::string& name) const {
    std::lock_guard lock(mu);
    return group_locked(name);
  }

  GroupHandle group_locked(const std::string& name) const {
    if (auto it = groups.find(name); it != groups.end()) return it->second;
    if (resolving.count(name)) bad("groups." + name, "definition refers to itself");
    resolving.insert(name);
    GroupHandle g;
    if (auto t = section("groups", name)) {
      g = build_group(*t, "groups." + name);
    } else if (name == "Z") {
      g = std::make_shared<IntegerGroup>();
    } else {
      try {
        g = catalog_group(name);
      } catch (const GroupError&) {
        resolving.erase(name);
        throw ScenarioError("unknown group '" + name + "'");
      }
    }
    resolving.erase(name);
    groups.emplace(name, g);
    return g;
  }

  GroupHandle build_group(const toml::table& t, const std::string& where) const {
    const auto kind = required<std::string>(t, "kind", where);
    try {
      if (kind == "integers") return std::make_shared<IntegerGroup>();
      if (kind == "cyclic") return cyclic_group(static_cast<std::uint32_t>(required<std::int64_t>(t, "order", where)));
      if (kind == "catalog") return catalog_group(required<std::string>(t, "name", where));
      if (kind == "dihedral") return dihedral_group(static_cast<std::uint32_t>(required<std::int64_t>(t, "n", where)));
      if (kind == "dicyclic") return dicyclic_group(static_cast<std::uint32_t>(required<std::int64_t>(t, "n", where)));
      if (kind == "permutations") {
        std::vector<std::vector<std::uint32_t>> gens;
        auto arr = t["generators"].as_array();
        if (!arr) bad(where, "permutations need a 'generators' array");
        for (const auto& gnode : *arr) {
          auto perm = gnode.as_array();
          if (!perm) bad(where, "each generator is an array of images");
          std::vector<std::uint32_t> images;
          for (const auto& x : *perm) images.push_back(static_cast<std::uint32_t>(x.value<std::int64_t>().value_or(-1)));
          gens.push_back(std::move(images));
        }
        return permutation_group(t["label"].value_or(std::string("permutations")),
                                 static_cast<std::uint32_t>(required<std::int64_t>(t, "degree", where)), gens);
      }
      if (kind == "table") {
        std::vector<std::string> names;
        auto narr = t["names"].as_array();
        auto tarr = t["table"].as_array();
        if (!narr || !tarr) bad(where, "table groups need 'names' and 'table'");
        for (const auto& n : *narr) names.push_back(n.value<std::string>().value_or(""));
        std::vector<std::vector<std::uint32_t>> table;
        for (const auto& row : *tarr) {
          auto r = row.as_array();
          if (!r) bad(where, "table rows must be arrays");
          std::vector<std::uint32_t> out;
          for (const auto& c : *r) {
            if (auto s = c.value<std::string>()) {
              auto it = std::find(names.begin(), names.end(), *s);
              if (it == names.end()) bad(where, "unknown table entry '" + *s + "'");
              out.push_back(static_cast<std::uint32_t>(it - names.begin()));
            } else {
              out.push_back(static_cast<std::uint32_t>(c.value<std::int64_t>().value_or(-1)));
            }
          }
          table.push_back(std::move(out));
        }
        return std::make_shared<FiniteGroup>(t["label"].value_or(std::string("table")), names, table);
      }
      if (kind == "fg-abelian") {
        std::vector<std::int64_t> torsion;
        for (auto v : int_list<std::int64_t>(t["torsion"], where)) torsion.push_back(v);
        return std::make_shared<FgAbelianGroup>(static_cast<std::uint32_t>(t["rank"].value_or(std::int64_t{0})), torsion);
      }
      if (kind == "product") {
        auto arr = t["components"].as_array();
        if (!arr || arr->empty()) bad(where, "products need a non-empty 'components' array");
        std::vector<GroupHandle> comps;
        for (const auto& c : *arr) comps.push_back(group_locked(c.value<std::string>().value_or("")));
        return std::make_shared<RestrictedProduct>(std::move(comps));
      }
      if (kind == "countable-copies") return RestrictedProduct::countable_copies(group_locked(required<std::string>(t, "component", where)));
      if (kind == "table-product") {
        auto arr = t["factors"].as_array();
        if (!arr || arr->size() != 2) bad(where, "table products need two 'factors'");
        auto a = tabulate(*group_locked(arr->get(0)->value<std::string>().value_or("")));
        auto b = tabulate(*group_locked(arr->get(1)->value<std::string>().value_or("")));
        return direct_product_table(*a, *b);
      }
    } catch (const GroupError& e) {
      bad(where, e.what());
    }
    bad(where, "unknown group kind '" + kind + "'");
  }

  Predicate condition(const GroupHandle& g, const toml::table& c, const std::string& where) const {
    std::vector<Predicate> parts;
    if (auto not_list = c["not"].as_array()) {
      auto inner = conditions(g, *not_list, where + ".not");
      parts.push_back([inner](const Element& e) { return !inner(e); });
    }
    if (auto k = c["coordinate"].value<std::int64_t>()) {
      if (*k < 1) bad(where, "coordinates are 1-based");
      const auto idx = static_cast<Index>(*k);
      coordinate_value(*g, g->identity(), idx);  // range check
      auto coord = [g, idx](const Element& e) { return coordinate_value(*g, e, idx); };
      if (auto s = c["sign"].value<std::string>()) {
        const auto sign = *s;
        if (sign != "positive" && sign != "negative" && sign != "zero" && sign != "nonzero")
          bad(where, "sign must be positive, negative, zero or nonzero");
        parts.push_back([coord, sign](const Element& e) {
          auto v = coord(e);
          return sign == "positive" ? v > 0 : sign == "negative" ? v < 0 : sign == "zero" ? v == 0 : v != 0;
        });
      }
      if (auto lo = c["min"].value<std::int64_t>()) parts.push_back([coord, lo = *lo](const Element& e) { return coord(e) >= lo; });
      if (auto hi = c["max"].value<std::int64_t>()) parts.push_back([coord, hi = *hi](const Element& e) { return coord(e) <= hi; });
      if (c["odd"].value_or(false)) parts.push_back([coord](const Element& e) { return coord(e) % 2 != 0; });
      if (c["even"].value_or(false)) parts.push_back([coord](const Element& e) { return coord(e) % 2 == 0; });
    } else if (c["sign"] || c["min"] || c["max"] || c["odd"] || c["even"]) {
      bad(where, "sign, min, max, odd and even need a 'coordinate'");
    }
    if (auto lo = c["support_min"].value<std::int64_t>())
      parts.push_back([g, lo = *lo](const Element& e) { return static_cast<std::int64_t>(g->support(e).size()) >= lo; });
    if (auto hi = c["support_max"].value<std::int64_t>())
      parts.push_back([g, hi = *hi](const Element& e) { return static_cast<std::int64_t>(g->support(e).size()) <= hi; });
    if (c["support_within"]) {
      auto within = sorted_indices(int_list<Index>(c["support_within"], where));
      parts.push_back([g, within](const Element& e) {
        auto s = g->support(e);
        return std::includes(within.begin(), within.end(), s.begin(), s.end());
      });
    }
    if (c["support_contains"]) {
      auto need = sorted_indices(int_list<Index>(c["support_contains"], where));
      parts.push_back([g, need](const Element& e) {
        auto s = g->support(e);
        return std::includes(s.begin(), s.end(), need.begin(), need.end());
      });
    }
    for (auto&& [key, v] : c) {
      static const std::set<std::string, std::less<>> known = {"not", "coordinate", "sign", "min", "max", "odd", "even",
                                                                "support_min", "support_max", "support_within",
                                                                "support_contains"};
      if (!known.count(key.str())) bad(where, "unknown condition key '" + std::string(key.str()) + "'");
    }
    if (parts.empty()) bad(where, "empty condition");
    return [parts](const Element& e) {
      for (const auto& p : parts)
        if (!p(e)) return false;
      return true;
    };
  }

  Predicate conditions(const GroupHandle& g, const toml::array& arr, const std::string& where) const {
    std::vector<Predicate> parts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto t = arr.get(i)->as_table();
      if (!t) bad(where, "conditions must be tables");
      parts.push_back(condition(g, *t, where + "[" + std::to_string(i) + "]"));
    }
    return [parts](const Element& e) {
      for (const auto& p : parts)
        if (!p(e)) return false;
      return true;
    };
  }

  Predicate builtin(const GroupHandle& g, const std::string& name, const std::string& where) const {
    if (name == "all") return [](const Element&) { return true; };
    if (name == "nonidentity") return [g](const Element& e) { return !g->is_identity(e); };
    if (name == "positives") {
      if (g->kind() != GroupKind::integers) bad(where, "'positives' needs the integers");
      return [](const Element& e) { return e[0] >= 1; };
    }
    if (name == "basis-vectors") {
      if (g->kind() == GroupKind::restricted_product) {
        auto p = std::static_pointer_cast<const RestrictedProduct>(g);
        return [p](const Element& e) {
          auto entries = p->entries(e);
          if (entries.size() != 1) return false;
          auto s = p->component(entries[0].first).enumerate();
          s.next();
          auto first = s.next();
          return first && *first == entries[0].second;
        };
      }
      if (g->kind() == GroupKind::fg_abelian || g->kind() == GroupKind::integers) {
        return [g](const Element& e) {
          std::size_t ones = 0;
          for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 1) ++ones;
            else if (e[i] != 0) return false;
          }
          return ones == 1;
        };
      }
      bad(where, "'basis-vectors' needs a product or an abelian coordinate group");
    }
    bad(where, "unknown builtin '" + name + "'");
  }

  SetSpec set(const std::string& name, std::size_t miss_budget) const {
    auto t = section("sets", name);
    const auto where = "sets." + name;
    if (!t) throw ScenarioError("unknown set '" + name + "'");
    auto g = group(required<std::string>(*t, "group", where));
    for (auto&& [key, v] : *t) {
      static const std::set<std::string, std::less<>> known = {"group", "elements", "builtin", "where", "finite", "description"};
      if (!known.count(key.str())) bad(where, "unknown key '" + std::string(key.str()) + "'");
    }
    const auto desc = t->at_path("description").value_or(name);
    if (auto arr = (*t)["elements"].as_array()) {
      if ((*t)["builtin"] || (*t)["where"]) bad(where, "'elements' excludes 'builtin' and 'where'");
      std::vector<Element> elems;
      for (const auto& n : *arr) {
        auto e = parse_element(*g, n, where);
        if (std::find(elems.begin(), elems.end(), e) == elems.end()) elems.push_back(std::move(e));
      }
      return SetSpec::from_elements(g, std::move(elems), desc);
    }
    std::vector<Predicate> parts;
    if (auto b = (*t)["builtin"].value<std::string>()) parts.push_back(builtin(g, *b, where));
    if (auto w = (*t)["where"].as_array()) parts.push_back(conditions(g, *w, where + ".where"));
    if (parts.empty()) bad(where, "a set needs 'elements', 'builtin' or 'where'");
    Predicate member = [g, parts](const Element& e) {
      if (!g->is_valid(e)) return false;
      for (const auto& p : parts)
        if (!p(e)) return false;
      return true;
    };
    const bool finite = (*t)["finite"].value_or(g->is_finite());
    SetSpec::StreamFactory stream = [g, member, miss_budget, name]() {
      auto src = std::make_shared<ElementStream>(g->enumerate());
      return ElementStream([src, member, miss_budget, name]() -> std::optional<Element> {
        std::size_t misses = 0;
        while (auto e = src->next()) {
          if (member(*e)) return e;
          if (++misses > miss_budget)
            throw BudgetExceeded("no further member of set '" + name + "' within " + std::to_string(miss_budget) +
                                 " enumeration steps");
        }
        return std::nullopt;
      });
    };
    return SetSpec(g, member, stream, finite, desc);
  }

  SubgroupSpec subgroup(const std::string& name) const {
    if (name.rfind("whole:", 0) == 0) return SubgroupSpec(group(name.substr(6)));
    auto t = section("subgroups", name);
    const auto where = "subgroups." + name;
    if (!t) throw ScenarioError("unknown subgroup '" + name + "'");
    auto g = group(required<std::string>(*t, "group", where));
    const auto desc = (*t)["description"].value_or(name);
    if (auto gens = (*t)["generators"].as_array()) {
      if (!g->is_finite()) bad(where, "generated subgroups need a finite ambient group");
      std::vector<Element> gs;
      for (const auto& n : *gens) gs.push_back(parse_element(*g, n, where));
      auto members = std::make_shared<std::unordered_set<Element, ElementHash>>();
      std::vector<Element> frontier{g->identity()};
      members->insert(g->identity());
      while (!frontier.empty()) {
        auto e = frontier.back();
        frontier.pop_back();
        for (const auto& s : gs) {
          auto p = g->multiply(e, s);
          if (members->insert(p).second) frontier.push_back(p);
        }
      }
      return SubgroupSpec(g, [members](const Element& e) { return members->count(e) > 0; }, desc, gs);
    }
    if (auto w = (*t)["where"].as_array()) {
      auto pred = conditions(g, *w, where + ".where");
      SubgroupSpec h(g, [g, pred](const Element& e) { return g->is_valid(e) && pred(e); }, desc);
      auto sample = sample_members(h, g->is_finite() ? std::size_t(4096) : std::size_t(40));
      if (auto failure = h.check_closure(sample)) bad(where, "not a subgroup: " + *failure);
      return h;
    }
    return SubgroupSpec(g);
  }
};

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

Scenario Scenario::parse(const std::string& text, const std::string& source) {
  auto impl = std::make_shared<Impl>();
  impl->source = source;
  try {
    impl->root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ": " << e.description() << " (line " << e.source().begin.line << ", column "
        << e.source().begin.column << ")";
    throw ScenarioError(msg.str());
  }
  Scenario s;
  s.digest_ = sha256_hex(text);
  const auto& root = impl->root;
  auto version = root["version"].value<std::int64_t>();
  if (!version) throw ScenarioError(source + ": missing 'version'");
  if (*version != 1) throw ScenarioError(source + ": unsupported version " + std::to_string(*version));
  s.version_ = *version;

  auto positive = [&](const toml::table& t, const char* key, auto& field) {
    if (auto v = t[key].value<std::int64_t>()) {
      if (*v <= 0) throw ScenarioError(std::string("engine.") + key + " must be positive");
      field = static_cast<std::remove_reference_t<decltype(field)>>(*v);
    } else if (t[key]) {
      throw ScenarioError(std::string("engine.") + key + " must be an integer");
    }
  };
  if (auto e = root["engine"].as_table()) {
    auto& cfg = s.engine_;
    positive(*e, "state_cap", cfg.policy.state_cap);
    positive(*e, "scan_budget", cfg.policy.scan_budget);
    positive(*e, "enumeration_budget", cfg.policy.enumeration_budget);
    positive(*e, "node_cap", cfg.seminorm.node_cap);
    positive(*e, "closure_cap", cfg.closure_cap);
    positive(*e, "stages", cfg.stages);
    positive(*e, "truncation", cfg.truncation);
    positive(*e, "materialize", cfg.materialize);
    positive(*e, "samples", cfg.samples);
    if (auto st = (*e)["strategy"].value<std::string>()) {
      if (*st == "automatic") cfg.policy.strategy = SearchStrategy::automatic;
      else if (*st == "paired-bfs") cfg.policy.strategy = SearchStrategy::paired_bfs;
      else if (*st == "abelian") cfg.policy.strategy = SearchStrategy::abelian;
      else throw ScenarioError("engine.strategy must be automatic, paired-bfs or abelian");
    }
    if (auto c = (*e)["ceiling"]) {
      std::string text = c.value<std::string>().value_or(c.value<std::int64_t>() ? std::to_string(*c.value<std::int64_t>()) : "");
      try {
        cfg.seminorm.ceiling = parse_rational(text);
      } catch (const std::exception&) {
        throw ScenarioError("engine.ceiling must be a rational such as \"1\" or \"3/2\"");
      }
      if (*cfg.seminorm.ceiling <= Rational(0)) throw ScenarioError("engine.ceiling must be positive");
    }
  }
  if (auto c = root["closure"].as_table())
    s.closure_ = ClosureParams{required<std::string>(*c, "group", "closure"), required<std::string>(*c, "set", "closure")};
  if (auto c = root["construct"].as_table()) {
    ConstructParams p{required<std::string>(*c, "set", "construct"), (*c)["subgroup"].value<std::string>(), {}};
    if (auto j = (*c)["stages"].value<std::int64_t>()) {
      if (*j <= 0) throw ScenarioError("construct.stages must be positive");
      p.stages = static_cast<std::uint32_t>(*j);
    }
    s.construct_ = p;
  }
  if (auto c = root["verify"].as_table()) {
    VerifyParams p;
    if ((*c)["p"]) p.p = int_list<std::uint64_t>((*c)["p"], "verify.p");
    if ((*c)["q"]) p.q = int_list<std::uint32_t>((*c)["q"], "verify.q");
    if ((*c)["second_p"]) p.second_p = int_list<std::uint64_t>((*c)["second_p"], "verify.second_p");
    if ((*c)["second_q"]) p.second_q = int_list<std::uint32_t>((*c)["second_q"], "verify.second_q");
    if (auto t = (*c)["truncation"].value<std::int64_t>()) {
      if (*t <= 0) throw ScenarioError("verify.truncation must be positive");
      p.truncation = static_cast<std::uint32_t>(*t);
    }
    s.verify_ = p;
  }
  if (auto c = root["supernormal"].as_table()) {
    SupernormalParams p;
    p.group = required<std::string>(*c, "group", "supernormal");
    p.subgroup = (*c)["subgroup"].value_or(std::string("all"));
    p.mode = (*c)["mode"].value_or(std::string("finite"));
    if (p.mode != "finite" && p.mode != "sampled") throw ScenarioError("supernormal.mode must be finite or sampled");
    p.keep = int_list<Index>((*c)["keep"], "supernormal.keep");
    if (auto arr = (*c)["elements"].as_array())
      for (const auto& n : *arr) p.elements.push_back(element_token(n, "supernormal.elements"));
    s.supernormal_ = p;
  }
  s.impl_ = impl;
  return s;
}

GroupHandle Scenario::group(const std::string& name) const { return impl_->group(name); }
SetSpec Scenario::set(const std::string& name) const { return impl_->set(name, engine_.policy.enumeration_budget); }
SubgroupSpec Scenario::subgroup(const std::string& name) const { return impl_->subgroup(name); }

std::string Scenario::set_group(const std::string& set_name) const {
  auto t = impl_->section("sets", set_name);
  if (!t) throw ScenarioError("unknown set '" + set_name + "'");
  return required<std::string>(*t, "group", "sets." + set_name);
}

std::string Scenario::subgroup_group(const std::string& name) const {
  if (name.rfind("whole:", 0) == 0) return name.substr(6);
  auto t = impl_->section("subgroups", name);
  if (!t) throw ScenarioError("unknown subgroup '" + name + "'");
  return required<std::string>(*t, "group", "subgroups." + name);
}

}  // namespace algclosure
