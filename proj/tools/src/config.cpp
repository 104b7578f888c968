#include "config.hpp"

#include "fkq/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

namespace fkq::cli {

namespace {

using nlohmann::json;

class Reader;

struct Node {
  const json* j;
  std::vector<std::string> path;  // object keys; array positions as "[k]"
  const Reader* r;

  [[noreturn]] void fail(const std::string& msg) const;

  void keys(std::initializer_list<const char*> allowed) const;
  bool has(const char* key) const { return j->is_object() && j->contains(key); }
  Node at(const char* key) const;
  Node at(std::size_t k) const;

  double number() const;
  double positive() const;
  long long integer() const;
  std::string str() const;
  IVec ints() const;
  Vec reals() const;
  Mat matrix() const;
  Region region() const;
};

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  std::size_t line_of(const std::vector<std::string>& path) const {
    std::size_t offset = 0;
    for (const auto& key : path) {
      if (!key.empty() && key.front() == '[') continue;
      const auto at = text_.find('"' + key + '"', offset);
      if (at == std::string::npos) break;
      offset = at;
    }
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<long>(offset), '\n'));
  }

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string p;
    for (const auto& k : path) p += (k.front() == '[' ? "" : "/") + k;
    if (p.empty()) p = "/";
    throw ConfigError(source_ + ":" + std::to_string(line_of(path)) + ": " + p + ": " + msg);
  }

 private:
  const std::string& text_;
  std::string source_;
};

void Node::fail(const std::string& msg) const { r->fail(path, msg); }

void Node::keys(std::initializer_list<const char*> allowed) const {
  if (!j->is_object()) fail("expected an object");
  for (const auto& [k, v] : j->items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      auto p = path;
      p.push_back(k);
      r->fail(p, "unknown key '" + k + "'");
    }
  }
}

Node Node::at(const char* key) const {
  if (!j->is_object()) fail("expected an object");
  if (!j->contains(key)) fail(std::string("missing required key '") + key + "'");
  auto p = path;
  p.push_back(key);
  return Node{&(*j)[key], std::move(p), r};
}

Node Node::at(std::size_t k) const {
  auto p = path;
  p.push_back("[" + std::to_string(k) + "]");
  return Node{&(*j)[k], std::move(p), r};
}

double Node::number() const {
  if (!j->is_number()) fail("expected a number");
  return j->get<double>();
}

double Node::positive() const {
  const double v = number();
  if (!(v > 0.0)) fail("must be > 0");
  return v;
}

long long Node::integer() const {
  if (!j->is_number_integer()) fail("expected an integer");
  return j->get<long long>();
}

std::string Node::str() const {
  if (!j->is_string()) fail("expected a string");
  return j->get<std::string>();
}

IVec Node::ints() const {
  if (!j->is_array() || j->empty() || j->size() > static_cast<std::size_t>(kMaxDim))
    fail("expected an array of 1 to 4 integers");
  IVec v(static_cast<Eigen::Index>(j->size()));
  for (std::size_t k = 0; k < j->size(); ++k) v[static_cast<Eigen::Index>(k)] = at(k).integer();
  return v;
}

Vec Node::reals() const {
  if (!j->is_array() || j->empty() || j->size() > static_cast<std::size_t>(kMaxDim))
    fail("expected an array of 1 to 4 numbers");
  Vec v(static_cast<Eigen::Index>(j->size()));
  for (std::size_t k = 0; k < j->size(); ++k) v[static_cast<Eigen::Index>(k)] = at(k).number();
  return v;
}

Mat Node::matrix() const {
  if (!j->is_array() || j->empty() || j->size() > static_cast<std::size_t>(kMaxDim))
    fail("expected an array of rows");
  std::vector<Vec> rows;
  for (std::size_t k = 0; k < j->size(); ++k) rows.push_back(at(k).reals());
  for (const auto& row : rows)
    if (row.size() != rows.front().size()) fail("rows have different lengths");
  Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t k = 0; k < rows.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
  return m;
}

Region Node::region() const {
  if (has("center")) {
    keys({"center", "radius"});
    return Region::ball(at("center").reals(), at("radius").positive());
  }
  keys({"lo", "hi"});
  const Vec lo = at("lo").reals(), hi = at("hi").reals();
  if (lo.size() != hi.size()) fail("lo and hi differ in dimension");
  if ((hi.array() <= lo.array()).any()) fail("need lo < hi in every coordinate");
  return Region::box(lo, hi);
}

PointsetSpec parse_pointset(const Node& n) {
  n.keys({"kind", "dim", "spacing", "path", "extent", "margin"});
  PointsetSpec s;
  s.kind = n.at("kind").str();
  if (s.kind == "periodic") {
    s.dim = static_cast<int>(n.at("dim").integer());
    if (s.dim < 1 || s.dim > kMaxDim) n.at("dim").fail("must be in [1, 4]");
    s.spacing = n.at("spacing").positive();
  } else if (s.kind == "csv") {
    s.path = n.at("path").str();
  } else if (s.kind != "fibonacci" && s.kind != "ammann-beenker") {
    n.at("kind").fail("unknown pointset kind '" + s.kind + "'");
  }
  if (n.has("extent")) {
    const Node e = n.at("extent");
    if (e.j->is_string()) {
      if (e.str() != "auto") e.fail("expected \"auto\" or a region");
    } else {
      s.extent.region = e.region();
    }
  }
  if (n.has("margin")) s.extent.margin = n.at("margin").positive();
  return s;
}

PotentialSpec parse_potential(const Node& n) {
  n.keys({"kind", "dim", "amplitude", "support", "sign", "scale_matrix"});
  PotentialSpec s;
  s.kind = n.at("kind").str();
  if (s.kind == "one_minus_cos") {
    s.dim = static_cast<int>(n.at("dim").integer());
    if (s.dim < 1 || s.dim > kMaxDim) n.at("dim").fail("must be in [1, 4]");
  } else if (s.kind == "bump") {
    if (n.has("amplitude")) s.amplitude = n.at("amplitude").number();
    if (s.amplitude == 0.0) n.at("amplitude").fail("must be non-zero");
    if (n.has("support")) s.support = n.at("support").positive();
    if (n.has("sign")) {
      s.sign = static_cast<int>(n.at("sign").integer());
      if (s.sign != 1 && s.sign != -1) n.at("sign").fail("must be +1 or -1");
    }
  } else {
    n.at("kind").fail("unknown potential kind '" + s.kind + "'");
  }
  if (n.has("scale_matrix")) s.scale_matrix = n.at("scale_matrix").matrix();
  return s;
}

InteractionSpec parse_interaction(const Node& n) {
  n.keys({"family", "window", "p", "tau"});
  InteractionSpec s;
  s.family = n.at("family").str();
  static const char* families[] = {"potential_only", "nn_quadratic_1d", "laplacian_quadratic", "p_power_1d",
                                   "address_neighborhood"};
  if (std::none_of(std::begin(families), std::end(families), [&](const char* f) { return s.family == f; }))
    n.at("family").fail("unknown interaction family '" + s.family + "'");
  const Node w = n.at("window");
  if (s.family == "address_neighborhood") {
    s.physical_window = w.region();
    s.tau = n.at("tau").positive();
  } else {
    w.keys({"lo", "hi"});
    s.lo = w.at("lo").ints();
    s.hi = w.at("hi").ints();
    if (s.lo.size() != s.hi.size()) w.fail("lo and hi differ in rank");
    if ((s.hi.array() < s.lo.array()).any()) w.fail("empty window");
    if ((s.family == "nn_quadratic_1d" || s.family == "p_power_1d") && s.lo.size() != 1)
      w.fail("this family has rank 1");
  }
  if (s.family == "p_power_1d") {
    s.p = n.at("p").number();
    if (!(s.p >= 2.0)) n.at("p").fail("must be >= 2");
  } else if (n.has("p")) {
    n.at("p").fail("only valid for p_power_1d");
  }
  return s;
}

TypeConfig parse_type(const Node& n) {
  n.keys({"sigma", "radius"});
  TypeConfig t;
  const Node s = n.at("sigma");
  if (s.j->is_string()) {
    if (s.str() != "psi") s.fail("expected a matrix or \"psi\"");
  } else {
    t.sigma = s.matrix();
  }
  if (n.has("radius")) {
    const Node r = n.at("radius");
    if (r.j->is_string()) {
      if (r.str() != "auto") r.fail("expected a number or \"auto\"");
    } else {
      t.radius = r.number();
      if (!(*t.radius >= 0.0)) r.fail("must be >= 0");
    }
  }
  return t;
}

ModeSpec parse_mode(const Node& n) {
  n.keys({"kind", "lambda", "n", "multiplier"});
  ModeSpec m;
  const std::string kind = n.at("kind").str();
  if (kind == "magnified") {
    m.kind = ModeSpec::Kind::magnified;
    m.lambda = n.at("lambda").positive();
  } else if (kind == "scaled") {
    m.kind = ModeSpec::Kind::scaled;
    if (n.has("n")) {
      const Node v = n.at("n");
      if (v.j->is_string()) {
        if (v.str() != "auto") v.fail("expected an integer or \"auto\"");
      } else {
        m.n = static_cast<int>(v.integer());
        if (*m.n < 0) v.fail("must be >= 0");
      }
    }
  } else if (kind == "auto") {
    m.kind = ModeSpec::Kind::automatic;
    if (n.has("multiplier")) m.multiplier = n.at("multiplier").positive();
  } else {
    n.at("kind").fail("unknown mode '" + kind + "'");
  }
  return m;
}

AtlasSpec parse_atlas(const Node& n) {
  n.keys({"grid_step", "select", "probe_count", "margin", "region"});
  AtlasSpec a;
  if (n.has("grid_step")) a.grid_step = n.at("grid_step").positive();
  if (n.has("select")) {
    a.select = n.at("select").str();
    if (a.select != "all" && a.select != "minima" && a.select != "maxima")
      n.at("select").fail("expected all, minima or maxima");
  }
  if (n.has("probe_count")) {
    a.probe_count = static_cast<int>(n.at("probe_count").integer());
    if (a.probe_count < 1) n.at("probe_count").fail("must be >= 1");
  }
  if (n.has("margin")) a.margin = n.at("margin").positive();
  if (n.has("region")) a.region = n.at("region").region();
  return a;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  const Reader reader(text, source);
  const Node top{&root, {}, &reader};
  top.keys({"name", "description", "seed", "threads", "pointset", "potential", "interaction", "type", "mode",
            "atlas", "tolerances", "verify", "output"});

  PipelineConfig c;
  c.source = source;
  if (top.has("name")) c.name = top.at("name").str();
  if (top.has("description")) top.at("description").str();
  if (top.has("seed")) {
    const auto s = top.at("seed").integer();
    if (s < 0) top.at("seed").fail("must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (top.has("threads")) {
    c.threads = static_cast<int>(top.at("threads").integer());
    if (c.threads < 1) top.at("threads").fail("must be >= 1");
  }
  if (top.has("pointset")) c.pointset = parse_pointset(top.at("pointset"));
  c.potential = parse_potential(top.at("potential"));
  if (c.potential.kind == "bump" && !c.pointset) top.fail("a bump potential needs a 'pointset' section");
  c.interaction = parse_interaction(top.at("interaction"));
  c.type = parse_type(top.at("type"));
  c.mode = parse_mode(top.at("mode"));
  if (top.has("atlas")) c.atlas = parse_atlas(top.at("atlas"));

  if (top.has("tolerances")) {
    const Node t = top.at("tolerances");
    t.keys({"tol", "max_iter", "residual_tol", "atlas_tol"});
    if (t.has("tol")) c.tolerances.tol = t.at("tol").positive();
    if (t.has("max_iter")) {
      c.tolerances.max_iter = static_cast<int>(t.at("max_iter").integer());
      if (c.tolerances.max_iter < 1) t.at("max_iter").fail("must be >= 1");
    }
    if (t.has("residual_tol")) c.tolerances.residual_tol = t.at("residual_tol").positive();
    if (t.has("atlas_tol")) {
      c.tolerances.atlas_tol = t.at("atlas_tol").positive();
      if (c.tolerances.atlas_tol > 1e-10) t.at("atlas_tol").fail("must be <= 1e-10");
    }
  }
  if (top.has("verify")) {
    const Node v = top.at("verify");
    v.keys({"probes", "amplitude"});
    if (v.has("probes")) {
      c.verify.probes = static_cast<int>(v.at("probes").integer());
      if (c.verify.probes < 0) v.at("probes").fail("must be >= 0");
    }
    if (v.has("amplitude")) c.verify.amplitude = v.at("amplitude").positive();
  }
  if (top.has("output")) {
    const Node o = top.at("output");
    o.keys({"dir", "report", "summary", "constants", "points", "atlas"});
    if (o.has("dir")) c.output.dir = o.at("dir").str();
    if (o.has("report")) c.output.report = o.at("report").str();
    if (o.has("summary")) c.output.summary = o.at("summary").str();
    if (o.has("constants")) c.output.constants = o.at("constants").str();
    if (o.has("points")) c.output.points = o.at("points").str();
    if (o.has("atlas")) c.output.atlas = o.at("atlas").str();
  }
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace fkq::cli
