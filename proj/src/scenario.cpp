#include "gravcheck/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gravcheck {

double halton(std::size_t index, int base) {
  double f = 1.0, r = 0.0;
  for (std::size_t i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

namespace {

struct RawManifest {
  // section -> ordered (key, value, line) triples
  struct Entry {
    std::string key, value;
    int line;
  };
  std::map<std::string, std::vector<Entry>> sections;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

RawManifest parse_raw(const std::string& text,
                      std::vector<std::string>& issues) {
  RawManifest raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        issues.push_back("line " + std::to_string(lineno) +
                         ": unterminated section header");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      raw.sections[section];
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) +
                       ", col " + std::to_string(line.find(t[0]) + 1) +
                       ": expected key = value");
      continue;
    }
    if (section.empty()) {
      issues.push_back("line " + std::to_string(lineno) +
                       ": entry before any [section]");
      continue;
    }
    raw.sections[section].push_back(
        {trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno});
  }
  return raw;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

Scenario load_manifest_text(const std::string& text, const std::string& name) {
  std::vector<std::string> issues;
  RawManifest raw = parse_raw(text, issues);

  Scenario s;
  s.name = name;
  std::array<std::string, 4> coords;
  bool have_coords = false;

  auto chart_it = raw.sections.find("chart");
  if (chart_it == raw.sections.end()) {
    issues.push_back("missing [chart] section");
  }

  // params first; expressions may reference them
  if (auto it = raw.sections.find("params"); it != raw.sections.end())
    for (const auto& e : it->second) {
      try {
        std::size_t used = 0;
        double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing");
        s.params[e.key] = v;
      } catch (const std::exception&) {
        issues.push_back("line " + std::to_string(e.line) +
                         ": parameter '" + e.key + "' is not a number");
      }
    }

  std::vector<std::string> coord_list, param_list;
  for (const auto& [k, _] : s.params) param_list.push_back(k);

  std::array<bool, 4> have_domain{};
  std::array<bool, 4> have_sample{};
  std::vector<std::pair<std::string, int>> excludes;

  if (chart_it != raw.sections.end()) {
    for (const auto& e : chart_it->second) {
      if (e.key == "coords") {
        auto list = split_list(e.value);
        if (list.size() != 4) {
          issues.push_back("line " + std::to_string(e.line) +
                           ": coords needs exactly 4 names");
        } else {
          for (int i = 0; i < 4; ++i) coords[i] = list[i];
          have_coords = true;
          coord_list.assign(list.begin(), list.end());
        }
      } else if (e.key == "kind") {
        if (e.value == "spherical")
          s.kind = ChartKind::Spherical;
        else if (e.value == "cartesian")
          s.kind = ChartKind::Cartesian;
        else
          issues.push_back("line " + std::to_string(e.line) +
                           ": kind must be spherical or cartesian");
      } else if (e.key == "exclude") {
        excludes.emplace_back(unquote(e.value), e.line);
      } else if (e.key.rfind("domain.", 0) == 0 ||
                 e.key.rfind("sample.", 0) == 0) {
        // resolved after coords are known
      } else {
        issues.push_back("line " + std::to_string(e.line) +
                         ": unknown chart key '" + e.key + "'");
      }
    }
    if (have_coords) {
      for (const auto& e : chart_it->second) {
        bool is_dom = e.key.rfind("domain.", 0) == 0;
        bool is_smp = e.key.rfind("sample.", 0) == 0;
        if (!is_dom && !is_smp) continue;
        std::string cname = e.key.substr(7);
        int ci = -1;
        for (int i = 0; i < 4; ++i)
          if (coords[i] == cname) ci = i;
        if (ci < 0) {
          issues.push_back("line " + std::to_string(e.line) +
                           ": unknown coordinate '" + cname + "'");
          continue;
        }
        auto list = split_list(e.value);
        double lo = 0, hi = 0;
        bool ok = list.size() == 2;
        if (ok) {
          try {
            lo = std::stod(list[0]);
            hi = std::stod(list[1]);
          } catch (const std::exception&) {
            ok = false;
          }
        }
        if (!ok || hi <= lo) {
          issues.push_back("line " + std::to_string(e.line) + ": " + e.key +
                           " needs 'min, max' with min < max");
          continue;
        }
        if (is_dom) {
          s.domain_min[ci] = lo;
          s.domain_max[ci] = hi;
          have_domain[ci] = true;
        } else {
          s.sample_min[ci] = lo;
          s.sample_max[ci] = hi;
          have_sample[ci] = true;
        }
      }
    }
  }
  if (have_coords) {
    for (int i = 0; i < 4; ++i)
      if (!have_domain[i])
        issues.push_back("missing domain." + coords[i]);
    for (int i = 0; i < 4; ++i) {
      if (!have_sample[i]) {
        s.sample_min[i] = s.domain_min[i];
        s.sample_max[i] = s.domain_max[i];
      }
    }
    s.chart = make_chart(coords);
  }

  // exclusions
  if (have_coords) {
    for (auto& [txt, line] : excludes) {
      std::size_t lt = txt.find('<');
      std::size_t gt = txt.find('>');
      bool less = lt != std::string::npos;
      std::size_t pos = less ? lt : gt;
      if (pos == std::string::npos) {
        issues.push_back("line " + std::to_string(line) +
                         ": exclude needs '<' or '>'");
        continue;
      }
      try {
        Scenario::Exclusion ex;
        ex.lhs = parse_expression(txt.substr(0, pos), coord_list, param_list);
        ex.rhs = parse_expression(txt.substr(pos + 1), coord_list, param_list);
        ex.less = less;
        ex.text = txt;
        s.exclusions.push_back(std::move(ex));
      } catch (const ParseError& pe) {
        issues.push_back("line " + std::to_string(line) + ": exclude: " +
                         pe.what());
      }
    }
  }

  // tetrad table
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) s.frame[a][mu] = ScalarField::number(0.0);
  if (auto it = raw.sections.find("tetrad"); it == raw.sections.end()) {
    issues.push_back("missing [tetrad] section");
  } else if (have_coords) {
    bool any = false;
    for (const auto& e : it->second) {
      // keys: g<a>.d<coord>
      if (e.key.size() < 4 || e.key[0] != 'g' || !isdigit((unsigned char)e.key[1]) ||
          e.key[2] != '.' || e.key[3] != 'd') {
        issues.push_back("line " + std::to_string(e.line) +
                         ": tetrad keys look like g0.dt");
        continue;
      }
      int a = e.key[1] - '0';
      std::string cname = e.key.substr(4);
      int mu = -1;
      for (int i = 0; i < 4; ++i)
        if (coords[i] == cname) mu = i;
      if (a > 3 || mu < 0) {
        issues.push_back("line " + std::to_string(e.line) +
                         ": unknown tetrad slot '" + e.key + "'");
        continue;
      }
      try {
        s.frame[a][mu] =
            parse_expression(unquote(e.value), coord_list, param_list);
        any = true;
      } catch (const ParseError& pe) {
        issues.push_back("line " + std::to_string(e.line) + ": " + e.key +
                         ": " + pe.what());
      }
    }
    if (!any) issues.push_back("[tetrad] defines no components");
  }

  if (auto it = raw.sections.find("foliation"); it != raw.sections.end())
    for (const auto& e : it->second) {
      if (e.key != "lapse") {
        issues.push_back("line " + std::to_string(e.line) +
                         ": unknown foliation key '" + e.key + "'");
        continue;
      }
      try {
        s.lapse = parse_expression(unquote(e.value), coord_list, param_list);
      } catch (const ParseError& pe) {
        issues.push_back("line " + std::to_string(e.line) + ": lapse: " +
                         pe.what());
      }
    }

  if (auto it = raw.sections.find("flags"); it != raw.sections.end())
    for (const auto& e : it->second) {
      if (e.key == "asymptotically_cartesian")
        s.asymptotically_cartesian = e.value == "true" || e.value == "1";
      else
        issues.push_back("line " + std::to_string(e.line) +
                         ": unknown flag '" + e.key + "'");
    }

  if (!issues.empty())
    throw ManifestError("manifest '" + name + "' invalid (" +
                            std::to_string(issues.size()) + " issues)",
                        issues);

  // nondegeneracy spot check over 100 sampled points
  try {
    SamplePointSet pts = sample_points(s, 100);
    if (pts.points.size() < 100)
      issues.push_back("could not place 100 nondegenerate sample points");
  } catch (const std::exception& ex) {
    issues.push_back(std::string("sampling failed: ") + ex.what());
  }
  if (!issues.empty())
    throw ManifestError("manifest '" + name + "' invalid (" +
                            std::to_string(issues.size()) + " issues)",
                        issues);
  return s;
}

Scenario load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ManifestError("cannot open manifest '" + path + "'",
                        {"cannot open '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return load_manifest_text(ss.str(), path);
}

namespace {

const char* kMinkowski = R"ini(
[chart]
coords = t, x, y, z
kind = cartesian
domain.t = -1, 1
domain.x = -1, 1
domain.y = -1, 1
domain.z = -1, 1

[params]

[tetrad]
g0.dt = 1
g1.dx = 1
g2.dy = 1
g3.dz = 1

[flags]
asymptotically_cartesian = true
)ini";

const char* kRindler = R"ini(
[chart]
coords = t, x, y, z
kind = cartesian
domain.t = -0.5, 0.5
domain.x = -0.4, 1.0
domain.y = -1, 1
domain.z = -1, 1
exclude = 1 + a*x < 0.05

[params]
a = 1

[tetrad]
g0.dt = 1 + a*x
g1.dx = 1
g2.dy = 1
g3.dz = 1
)ini";

const char* kSchwarzschild = R"ini(
[chart]
coords = t, r, theta, phi
kind = spherical
domain.t = 0, 1
domain.r = 2.6, 1200
domain.theta = 0.2, 2.9415926535897932
domain.phi = 0, 6.283185307179586
sample.r = 2.6, 20
exclude = r < 2.5*M

[params]
M = 1

[tetrad]
g0.dt = "sqrt(1 - 2*M/r)"
g1.dr = "1/sqrt(1 - 2*M/r)"
g2.dtheta = "r"
g3.dphi = "r*sin(theta)"

[foliation]
lapse = "sqrt(1 - 2*M/r)"
)ini";

const char* kSchwarzschildIsotropic = R"ini(
[chart]
coords = t, x, y, z
kind = cartesian
domain.t = 0, 1
domain.x = -700, 700
domain.y = -700, 700
domain.z = -700, 700
sample.x = -10, 10
sample.y = -10, 10
sample.z = -10, 10
exclude = sqrt(x^2 + y^2 + z^2) < 2.5*M

[params]
M = 1

[tetrad]
g0.dt = "(1 - M/(2*sqrt(x^2+y^2+z^2)))/(1 + M/(2*sqrt(x^2+y^2+z^2)))"
g1.dx = "(1 + M/(2*sqrt(x^2+y^2+z^2)))^2"
g2.dy = "(1 + M/(2*sqrt(x^2+y^2+z^2)))^2"
g3.dz = "(1 + M/(2*sqrt(x^2+y^2+z^2)))^2"

[flags]
asymptotically_cartesian = true
)ini";

const char* kFlrw = R"ini(
[chart]
coords = t, x, y, z
kind = cartesian
domain.t = 0.6, 2
domain.x = -1, 1
domain.y = -1, 1
domain.z = -1, 1
exclude = t < 0.55

[tetrad]
g0.dt = 1
g1.dx = "t^(2/3)"
g2.dy = "t^(2/3)"
g3.dz = "t^(2/3)"
)ini";

}  // namespace

std::vector<std::string> preset_names() {
  return {"minkowski", "rindler", "schwarzschild", "schwarzschild_isotropic",
          "flrw"};
}

Scenario load_preset(const std::string& name,
                     const std::map<std::string, double>& overrides) {
  const char* text = nullptr;
  std::vector<double> radii;
  if (name == "minkowski") {
    text = kMinkowski;
    radii = {0.5};
  } else if (name == "rindler") {
    text = kRindler;
    radii = {0.5};
  } else if (name == "schwarzschild") {
    text = kSchwarzschild;
    radii = {40, 80, 160, 320, 640, 1000};
  } else if (name == "schwarzschild_isotropic") {
    text = kSchwarzschildIsotropic;
    radii = {40, 80, 160, 320, 640};
  } else if (name == "flrw") {
    text = kFlrw;
    radii = {0.5};
  } else {
    throw ManifestError("unknown preset '" + name + "'",
                        {"unknown preset '" + name + "'"});
  }
  Scenario s = load_manifest_text(text, name);
  s.preset = name;
  s.default_radii = radii;
  for (const auto& [k, v] : overrides) {
    if (!s.params.count(k))
      throw ManifestError("preset '" + name + "' has no parameter '" + k + "'",
                          {"no parameter '" + k + "'"});
    s.params[k] = v;
  }
  return s;
}

Cotetrad scenario_cotetrad(const Scenario& s) {
  return make_cotetrad(s.chart, s.frame);
}

ChartFrame scenario_chart_frame(const Scenario& s) {
  ChartFrame f;
  f.chart = s.chart;
  f.kind = s.kind;
  f.time_value = 0.5 * (s.sample_min[0] + s.sample_max[0]);
  f.params = s.params;
  return f;
}

Bindings point_bindings(const Scenario& s, const std::array<double, 4>& x) {
  Bindings b;
  for (int i = 0; i < 4; ++i) b.values[s.chart->coords[i]] = x[i];
  for (const auto& [k, v] : s.params) b.values[k] = v;
  return b;
}

SamplePointSet sample_points(const Scenario& s, int n) {
  static const int bases[4] = {2, 3, 5, 7};
  SamplePointSet out;
  Cotetrad c = scenario_cotetrad(s);
  std::size_t index = 1;
  while (static_cast<int>(out.points.size()) < n && index < 100000) {
    std::array<double, 4> x;
    for (int d = 0; d < 4; ++d)
      x[d] = s.sample_min[d] +
             halton(index, bases[d]) * (s.sample_max[d] - s.sample_min[d]);
    ++index;
    Bindings env = point_bindings(s, x);
    bool excluded = false;
    for (const auto& ex : s.exclusions) {
      try {
        double l = evaluate(ex.lhs, env), r = evaluate(ex.rhs, env);
        if (ex.less ? (l < r) : (l > r)) excluded = true;
      } catch (const EvalError&) {
        excluded = true;
      }
      if (excluded) break;
    }
    if (!excluded) {
      try {
        double det = evaluate(c.det_frame, env);
        if (std::fabs(det) < 1e-6) excluded = true;  // |det g| = det^2 < 1e-12
      } catch (const EvalError&) {
        excluded = true;
      }
    }
    if (excluded) {
      ++out.rejected;
      continue;
    }
    out.points.push_back(x);
  }
  return out;
}

}  // namespace gravcheck
