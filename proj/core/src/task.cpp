#include "ltlzinc/task.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "hashing.hpp"
#include "ltlzinc/error.hpp"

namespace ltlzinc {

void TaskSpec::validate() const {
  if (length.min < 1) throw DomainError("minimum sequence length must be >= 1");
  if (length.max < length.min) {
    throw DomainError("maximum sequence length is below the minimum");
  }
  if (!(positive_ratio >= 0.0 && positive_ratio <= 1.0)) {
    throw DomainError("positive_ratio must lie in [0, 1]");
  }
  if (constraints.empty()) throw DomainError("a task needs at least one constraint");
  Formula f = parse_ltlf(formula);
  for (const auto& a : atoms_of(f)) {
    bool declared = false;
    for (const auto& [atom, body] : constraints) declared |= atom == a;
    if (!declared) {
      throw DomainError("formula atom '" + a + "' has no constraint");
    }
  }
  (void)constraint_system();
}

ConstraintSystem TaskSpec::constraint_system() const {
  std::vector<Constraint> parsed;
  for (const auto& [atom, body] : constraints) {
    (void)Formula::atom(atom);  // validates the identifier
    parsed.push_back(parse_constraint(atom, body));
  }
  return ConstraintSystem(domains, variables, std::move(parsed));
}

// ---------------------------------------------------------------------------
// YAML

namespace {

[[noreturn]] void yaml_fail(const YAML::Node& node, const std::string& msg) {
  const auto mark = node.Mark();
  throw ParseError("task spec: " + msg, mark.line + 1, mark.column + 1);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    yaml_fail(node, "invalid value for " + what);
  }
}

SymbolicDomain parse_domain(const std::string& name, const YAML::Node& node,
                            const std::vector<SymbolicDomain>& known) {
  if (node.IsSequence()) {
    return SymbolicDomain::from_labels(
        name, scalar<std::vector<std::string>>(node, "domain labels"));
  }
  if (!node.IsMap()) yaml_fail(node, "domain '" + name + "' must be a map");
  if (node["range"]) {
    auto r = scalar<std::vector<int>>(node["range"], "domain range");
    if (r.size() != 2) yaml_fail(node["range"], "range needs [lo, hi]");
    return SymbolicDomain::from_range(name, r[0], r[1]);
  }
  if (!node["labels"]) yaml_fail(node, "domain '" + name + "' needs labels or range");
  auto labels = scalar<std::vector<std::string>>(node["labels"], "domain labels");
  if (node["parent"]) {
    auto parent = scalar<std::string>(node["parent"], "domain parent");
    for (const auto& d : known) {
      if (d.name() == parent) return d.restrict_to(name, labels);
    }
    yaml_fail(node["parent"], "unknown parent domain '" + parent + "'");
  }
  return SymbolicDomain::from_labels(name, std::move(labels));
}

TaskSpec spec_from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) yaml_fail(root, "top level must be a map");
  TaskSpec spec;
  if (root["name"]) spec.name = scalar<std::string>(root["name"], "name");

  const YAML::Node domains = root["domains"];
  if (!domains || !domains.IsMap()) yaml_fail(root, "missing 'domains' map");
  for (const auto& kv : domains) {
    auto name = scalar<std::string>(kv.first, "domain name");
    try {
      spec.domains.push_back(parse_domain(name, kv.second, spec.domains));
    } catch (const DomainError& e) {
      yaml_fail(kv.second, e.what());
    }
  }

  const YAML::Node variables = root["variables"];
  if (!variables || !variables.IsMap()) yaml_fail(root, "missing 'variables' map");
  for (const auto& kv : variables) {
    VariableSpec v;
    v.name = scalar<std::string>(kv.first, "variable name");
    if (kv.second.IsScalar()) {
      v.domain = scalar<std::string>(kv.second, "variable domain");
    } else if (kv.second.IsMap() && kv.second["domain"]) {
      v.domain = scalar<std::string>(kv.second["domain"], "variable domain");
      if (kv.second["source"]) {
        v.source = scalar<std::string>(kv.second["source"], "variable source");
      }
    } else {
      yaml_fail(kv.second, "variable '" + v.name + "' needs a domain");
    }
    if (v.source.empty()) v.source = v.domain;
    spec.variables.push_back(std::move(v));
  }

  const YAML::Node constraints = root["constraints"];
  if (!constraints || !constraints.IsMap()) {
    yaml_fail(root, "missing 'constraints' map");
  }
  for (const auto& kv : constraints) {
    auto atom = scalar<std::string>(kv.first, "constraint name");
    auto body = scalar<std::string>(kv.second, "constraint body");
    try {
      (void)parse_constraint(atom, body);
    } catch (const ParseError& e) {
      yaml_fail(kv.second, e.what());
    }
    spec.constraints.emplace_back(std::move(atom), std::move(body));
  }

  if (!root["formula"]) yaml_fail(root, "missing 'formula'");
  spec.formula = scalar<std::string>(root["formula"], "formula");
  try {
    (void)parse_ltlf(spec.formula);
  } catch (const SyntaxError& e) {
    yaml_fail(root["formula"], std::string("formula ") + e.what());
  }

  if (const YAML::Node len = root["length"]) {
    if (len["min"]) spec.length.min = scalar<std::size_t>(len["min"], "length.min");
    if (len["max"]) spec.length.max = scalar<std::size_t>(len["max"], "length.max");
  }
  if (const YAML::Node splits = root["splits"]) {
    if (splits["train"]) spec.splits.train = scalar<std::size_t>(splits["train"], "splits.train");
    if (splits["val"]) spec.splits.val = scalar<std::size_t>(splits["val"], "splits.val");
    if (splits["test"]) spec.splits.test = scalar<std::size_t>(splits["test"], "splits.test");
  }
  if (root["positive_ratio"]) {
    spec.positive_ratio = scalar<double>(root["positive_ratio"], "positive_ratio");
  }
  if (root["seed"]) spec.seed = scalar<std::uint64_t>(root["seed"], "seed");

  try {
    spec.validate();
  } catch (const DomainError& e) {
    yaml_fail(root, e.what());
  }
  return spec;
}

}  // namespace

TaskSpec parse_task_yaml(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError("task spec: " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  return spec_from_yaml(root);
}

TaskSpec load_task_yaml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open task spec '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_task_yaml(buf.str());
}

// ---------------------------------------------------------------------------
// JSON

std::string task_spec_to_json(const TaskSpec& spec, int indent) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  auto domains = nlohmann::ordered_json::array();
  for (const auto& d : spec.domains) {
    nlohmann::ordered_json dj;
    dj["name"] = d.name();
    dj["labels"] = d.labels();
    dj["values"] = d.values();
    dj["range"] = d.is_range();
    domains.push_back(std::move(dj));
  }
  j["domains"] = std::move(domains);
  auto variables = nlohmann::ordered_json::array();
  for (const auto& v : spec.variables) {
    variables.push_back(nlohmann::ordered_json{
        {"name", v.name}, {"domain", v.domain}, {"source", v.source}});
  }
  j["variables"] = std::move(variables);
  auto constraints = nlohmann::ordered_json::array();
  for (const auto& [atom, body] : spec.constraints) {
    constraints.push_back(nlohmann::ordered_json{{"atom", atom}, {"body", body}});
  }
  j["constraints"] = std::move(constraints);
  j["formula"] = spec.formula;
  j["length"] = nlohmann::ordered_json{{"min", spec.length.min}, {"max", spec.length.max}};
  j["splits"] = nlohmann::ordered_json{
      {"train", spec.splits.train}, {"val", spec.splits.val}, {"test", spec.splits.test}};
  j["positive_ratio"] = spec.positive_ratio;
  j["seed"] = spec.seed;
  return j.dump(indent);
}

TaskSpec task_spec_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    TaskSpec spec;
    spec.name = j.at("name").get<std::string>();
    for (const auto& d : j.at("domains")) {
      spec.domains.push_back(SymbolicDomain::from_parts(
          d.at("name").get<std::string>(),
          d.at("labels").get<std::vector<std::string>>(),
          d.at("values").get<std::vector<int>>(), d.at("range").get<bool>()));
    }
    for (const auto& v : j.at("variables")) {
      spec.variables.push_back({v.at("name").get<std::string>(),
                                v.at("domain").get<std::string>(),
                                v.at("source").get<std::string>()});
    }
    for (const auto& c : j.at("constraints")) {
      spec.constraints.emplace_back(c.at("atom").get<std::string>(),
                                    c.at("body").get<std::string>());
    }
    spec.formula = j.at("formula").get<std::string>();
    spec.length.min = j.at("length").at("min").get<std::size_t>();
    spec.length.max = j.at("length").at("max").get<std::size_t>();
    spec.splits.train = j.at("splits").at("train").get<std::size_t>();
    spec.splits.val = j.at("splits").at("val").get<std::size_t>();
    spec.splits.test = j.at("splits").at("test").get<std::size_t>();
    spec.positive_ratio = j.at("positive_ratio").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("task spec JSON: ") + e.what(), 0, 0);
  } catch (const DomainError& e) {
    throw ParseError(std::string("task spec JSON: ") + e.what(), 0, 0);
  }
}

std::string spec_hash(const TaskSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a(task_spec_to_json(spec))));
  return buf;
}

// ---------------------------------------------------------------------------
// Built-in tasks

namespace {

SymbolicDomain mnist() {
  return SymbolicDomain::from_labels(
      "mnist", {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"});
}

SymbolicDomain fmnist() {
  return SymbolicDomain::from_labels(
      "fmnist", {"bag", "boot", "coat", "dress", "pullover", "sandal", "shirt",
                 "sneaker", "top", "trouser"});
}

TaskSpec fmnist_tasks(std::string name, std::string formula) {
  TaskSpec t;
  t.name = std::move(name);
  auto full = fmnist();
  // V, W, X range over the last five of the ten classes.
  auto upper = full.restrict_to("fmnist_upper",
                                {"sandal", "shirt", "sneaker", "top", "trouser"});
  t.domains = {full, upper};
  t.variables = {{"V", "fmnist_upper", "fmnist"},
                 {"W", "fmnist_upper", "fmnist"},
                 {"X", "fmnist_upper", "fmnist"},
                 {"Y", "fmnist", "fmnist"},
                 {"Z", "fmnist", "fmnist"}};
  t.constraints = {{"p", "Y < Z"}, {"q", "all_equal(V,W,X)"}};
  t.formula = std::move(formula);
  return t;
}

}  // namespace

std::vector<std::string> builtin_task_names() {
  return {"task1", "task2", "task3", "task4", "task5", "task6", "example"};
}

std::optional<TaskSpec> builtin_task(std::string_view name) {
  if (name == "task1") return fmnist_tasks("task1", "G (p <-> X X q)");
  if (name == "task2") {
    return fmnist_tasks("task2", "G ((p & X p & X X p) -> X X X q)");
  }
  if (name == "task3" || name == "task4") {
    TaskSpec t;
    t.name = std::string(name);
    if (name == "task3") {
      t.domains = {mnist()};
      t.variables = {{"X", "mnist", "mnist"}, {"Y", "mnist", "mnist"}, {"Z", "mnist", "mnist"}};
    } else {
      t.domains = {mnist(), fmnist()};
      t.variables = {{"X", "mnist", "mnist"}, {"Y", "fmnist", "fmnist"}, {"Z", "fmnist", "fmnist"}};
    }
    t.constraints = {{"p", "all_different(X,Y,Z)"}, {"q", "X < Y + Z"}};
    t.formula = "F p & (q U X p)";
    return t;
  }
  if (name == "task5") {
    TaskSpec t;
    t.name = "task5";
    t.domains = {mnist()};
    t.variables = {{"W", "mnist", "mnist"}, {"X", "mnist", "mnist"},
                   {"Y", "mnist", "mnist"}, {"Z", "mnist", "mnist"}};
    t.constraints = {{"p", "W + X = Y + Z"}};
    t.formula = "G (p <-> WX !p)";
    return t;
  }
  if (name == "task6") {
    TaskSpec t;
    t.name = "task6";
    t.domains = {mnist()};
    t.variables = {{"X", "mnist", "mnist"}, {"Y", "mnist", "mnist"}, {"Z", "mnist", "mnist"}};
    t.constraints = {{"p", "X + Y = Z"}, {"q", "X + Y = 2*Z"}};
    t.formula = "G (p <-> X q)";
    return t;
  }
  if (name == "example") {
    TaskSpec t;
    t.name = "example";
    t.domains = {SymbolicDomain::from_range("digits", 0, 9),
                 SymbolicDomain::from_range("svhn_2_8", 2, 8)};
    t.variables = {{"A", "digits", "mnist"}, {"B", "digits", "mnist"},
                   {"C", "svhn_2_8", "svhn"}};
    t.constraints = {{"p", "A + B = C"}, {"q", "all_different(A,B,C)"}};
    t.formula = "p & G (p <-> X q)";
    return t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Compilation

bool CompiledTask::reachable(StateId s, std::size_t remaining, bool accept) const {
  if (remaining >= reach_.size() || s >= dfa_.num_states()) return false;
  return (reach_[remaining][s] >> (accept ? 1 : 0)) & 1U;
}

CompiledTask compile_task(const TaskSpec& spec, const CompileOptions& options) {
  spec.validate();
  ConstraintSystem system = spec.constraint_system();
  const auto atoms = system.atom_names();

  std::optional<Dfa> dfa = options.precompiled;
  if (dfa && dfa->atoms() != atoms) {
    throw CompileError("precompiled automaton has a different alphabet");
  }
  if (!dfa) {
    dfa = ltlf_to_dfa(parse_ltlf(spec.formula), atoms,
                      TranslationOptions{options.max_states});
  }
  SolutionCache solutions(system);

  CompiledTask task(spec, std::move(system), std::move(*dfa), std::move(solutions));
  const Dfa& d = task.dfa_;
  task.reach_.assign(spec.length.max + 1, std::vector<std::uint8_t>(d.num_states(), 0));
  for (StateId s = 0; s < d.num_states(); ++s) {
    task.reach_[0][s] = d.is_accepting(s) ? 2 : 1;
  }
  for (std::size_t n = 1; n <= spec.length.max; ++n) {
    for (StateId s = 0; s < d.num_states(); ++s) {
      std::uint8_t bits = 0;
      for (Letter l = 0; l < d.num_letters(); ++l) {
        if (task.solutions_.usable(l)) bits |= task.reach_[n - 1][d.next(s, l)];
      }
      task.reach_[n][s] = bits;
    }
  }

  const std::size_t total = spec.splits.train + spec.splits.val + spec.splits.test;
  for (int label : {1, 0}) {
    const bool wanted = total > 0 && (label == 1 ? spec.positive_ratio > 0.0
                                                 : spec.positive_ratio < 1.0);
    if (!wanted) continue;
    bool any = false;
    std::size_t first_bad = 0;
    for (std::size_t len = spec.length.min; len <= spec.length.max; ++len) {
      if (task.reachable(d.initial(), len, label == 1)) {
        any = true;
      } else if (first_bad == 0) {
        first_bad = len;
      }
    }
    if (first_bad != 0) {
      throw CompileError(
          "task '" + spec.name + "': no " + (label == 1 ? "positive" : "negative") +
          " sequence of length " + std::to_string(first_bad) + " exists" +
          (any ? "" : " (nor of any allowed length)"));
    }
  }
  return task;
}

}  // namespace ltlzinc
