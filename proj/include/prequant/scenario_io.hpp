#pragma once

#include <json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "prequant/action.hpp"
#include "prequant/errors.hpp"
#include "prequant/scenario.hpp"

namespace prequant {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// CSV path samples: "t,x0,x1,..." with one row per sample. The parameter
// column is written for plotting convenience and ignored on input (samples
// are taken as uniformly spaced in declaration order).

inline void write_path_csv(std::ostream& os, const PathSample& p) {
  const size_t d = p.space()->dim();
  os << "t";
  for (size_t i = 0; i < d; ++i) os << ",x" << i;
  os << "\n";
  os << std::setprecision(17);
  const size_t n = p.segments();
  for (size_t k = 0; k <= n; ++k) {
    os << (static_cast<double>(k) / static_cast<double>(n));
    for (size_t i = 0; i < d; ++i) os << "," << p.points()[k][i];
    os << "\n";
  }
}

inline std::vector<Vec> read_points_csv(std::istream& is,
                                        const std::string& origin) {
  std::vector<Vec> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> fields;
    std::stringstream row(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(row, cell, ',')) {
      try {
        size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        while (used < cell.size() &&
               std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      // A non-numeric first row is a header; anywhere else it is an error.
      if (out.empty() && lineno == 1) continue;
      raise(errc::parse_error, origin + ":" + std::to_string(lineno) +
                                   ": non-numeric field '" + cell + "'");
    }
    require(fields.size() >= 2, errc::parse_error,
            origin + ":" + std::to_string(lineno) +
                ": a sample row needs the parameter and coordinates");
    require(fields.size() - 1 <= Vec::capacity, errc::parse_error,
            origin + ":" + std::to_string(lineno) + ": too many coordinates");
    out.push_back(
        Vec(std::vector<double>(fields.begin() + 1, fields.end())));
  }
  require(out.size() >= 2, errc::parse_error,
          origin + ": fewer than two samples");
  return out;
}

inline PathSample read_path_csv(std::istream& is, const std::string& origin,
                                ModelSpacePtr space) {
  std::vector<Vec> pts = read_points_csv(is, origin);
  const bool closed =
      quotient_distance(*space, pts.front(), pts.back()) <= 1e-9;
  return PathSample::make(std::move(space), std::move(pts), closed);
}

// ---------------------------------------------------------------------------
// JSON helpers with field-naming diagnostics.

namespace detail {

inline const Json& need_field(const Json& j, const char* key,
                              const std::string& ctx) {
  auto it = j.find(key);
  require(it != j.end(), errc::schema_error,
          ctx + ": missing required field '" + key + "'");
  return *it;
}

inline std::string need_string(const Json& j, const char* key,
                               const std::string& ctx) {
  const Json& v = need_field(j, key, ctx);
  require(v.is_string(), errc::schema_error,
          ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline double need_number(const Json& v, const std::string& ctx) {
  require(v.is_number(), errc::schema_error, ctx + ": expected a number");
  return v.get<double>();
}

inline Vec point_from_json(const Json& v, const std::string& ctx) {
  require(v.is_array() && v.size() <= Vec::capacity, errc::schema_error,
          ctx + ": expected a coordinate array of dimension at most " +
              std::to_string(Vec::capacity));
  std::vector<double> xs;
  for (const auto& x : v) xs.push_back(need_number(x, ctx));
  return Vec(xs);
}

inline std::vector<Vec> points_from_json(const Json& v,
                                         const std::string& ctx) {
  require(v.is_array(), errc::schema_error, ctx + ": expected a point list");
  std::vector<Vec> out;
  for (const auto& p : v) out.push_back(point_from_json(p, ctx));
  return out;
}

/// A point list may be inline ("points": [[...], ...]) or an external CSV
/// ({"csv": "relative/path.csv"}).
inline std::vector<Vec> resolve_points(const Json& v, const std::string& ctx,
                                       const std::filesystem::path& base_dir) {
  if (v.is_object()) {
    const std::string rel = need_string(v, "csv", ctx);
    const std::filesystem::path path = base_dir / rel;
    std::ifstream f(path);
    require(f.good(), errc::io_error,
            ctx + ": cannot open '" + path.string() + "'");
    return read_points_csv(f, path.string());
  }
  return points_from_json(v, ctx);
}

inline FormKind form_kind_from_json(const Json& j, const std::string& ctx) {
  const std::string f = need_string(j, "form", ctx);
  if (f == "Magnetic") return FormKind::magnetic;
  if (f == "Zero") return FormKind::zero;
  if (f == "Uniform") return FormKind::uniform;
  raise(errc::schema_error,
        ctx + ": unknown form '" + f + "' (Magnetic, Zero, Uniform)");
}

}  // namespace detail

inline ModelSpacePtr space_from_json(const Json& j) {
  const std::string ctx = "space";
  require(j.is_object(), errc::schema_error, ctx + ": expected an object");
  const std::string kind = detail::need_string(j, "kind", ctx);
  if (kind == "FlatTorus") {
    FlatTorus t;
    t.basis = {{{mpq_class(1), mpq_class(0)}, {mpq_class(0), mpq_class(1)}}};
    if (auto it = j.find("basis"); it != j.end()) {
      require(it->is_array() && it->size() == 2, errc::schema_error,
              ctx + ": torus basis must be two vectors");
      for (int k = 0; k < 2; ++k) {
        const Json& row = (*it)[k];
        require(row.is_array() && row.size() == 2, errc::schema_error,
                ctx + ": torus basis vectors are rational pairs");
        for (int i = 0; i < 2; ++i) {
          require(row[i].is_string(), errc::schema_error,
                  ctx + ": torus basis entries are rational strings");
          t.basis[k][i] = parse_rational(row[i].get<std::string>());
        }
      }
    }
    return ModelSpace::make(t);
  }
  if (kind == "PuncturedPlane") {
    PuncturedPlane p;
    p.kind = detail::form_kind_from_json(j, ctx);
    if (auto it = j.find("b"); it != j.end())
      p.uniform_b = detail::need_number(*it, ctx + ".b");
    return ModelSpace::make(p);
  }
  if (kind == "TwoSphere") {
    TwoSphere s;
    if (auto it = j.find("scale"); it != j.end())
      s.scale = detail::need_number(*it, ctx + ".scale");
    return ModelSpace::make(s);
  }
  if (kind == "TwoHolesPlane") {
    TwoHolesPlane h;
    auto read_hole = [&](const char* key, std::array<double, 2>& out) {
      if (auto it = j.find(key); it != j.end()) {
        Vec p = detail::point_from_json(*it, ctx + "." + key);
        require(p.size() == 2, errc::schema_error,
                ctx + ": removed points are planar");
        out = {p[0], p[1]};
      }
    };
    read_hole("p1", h.p1);
    read_hole("p2", h.p2);
    h.kind = detail::form_kind_from_json(j, ctx);
    if (auto it = j.find("b"); it != j.end())
      h.uniform_b = detail::need_number(*it, ctx + ".b");
    return ModelSpace::make(h);
  }
  if (kind == "AbstractSurface") {
    AbstractSurface a;
    a.genus = detail::need_field(j, "genus", ctx).get<size_t>();
    return ModelSpace::make(a);
  }
  if (kind == "Product") {
    ProductSpace p;
    p.left = space_from_json(detail::need_field(j, "left", ctx));
    p.right = space_from_json(detail::need_field(j, "right", ctx));
    return ModelSpace::make(p);
  }
  raise(errc::schema_error, ctx + ": unknown model kind '" + kind + "'");
}

inline Json space_to_json(const ModelSpace& m) {
  Json j;
  if (const auto* t = m.as<FlatTorus>()) {
    j["kind"] = "FlatTorus";
    Json basis = Json::array();
    for (int k = 0; k < 2; ++k)
      basis.push_back({t->basis[k][0].get_str(), t->basis[k][1].get_str()});
    j["basis"] = basis;
  } else if (const auto* p = m.as<PuncturedPlane>()) {
    j["kind"] = "PuncturedPlane";
    j["form"] = form_kind_name(p->kind);
    if (p->kind == FormKind::uniform) j["b"] = p->uniform_b;
  } else if (const auto* s = m.as<TwoSphere>()) {
    j["kind"] = "TwoSphere";
    j["scale"] = s->scale;
  } else if (const auto* h = m.as<TwoHolesPlane>()) {
    j["kind"] = "TwoHolesPlane";
    j["p1"] = {h->p1[0], h->p1[1]};
    j["p2"] = {h->p2[0], h->p2[1]};
    j["form"] = form_kind_name(h->kind);
    if (h->kind == FormKind::uniform) j["b"] = h->uniform_b;
  } else if (const auto* a = m.as<AbstractSurface>()) {
    j["kind"] = "AbstractSurface";
    j["genus"] = a->genus;
  } else {
    const auto* pr = m.as<ProductSpace>();
    j["kind"] = "Product";
    j["left"] = space_to_json(*pr->left);
    j["right"] = space_to_json(*pr->right);
  }
  return j;
}

inline std::shared_ptr<const Presentation> presentation_from_json(
    const Json& j) {
  const std::string ctx = "group";
  require(j.is_object(), errc::schema_error, ctx + ": expected an object");
  const std::string kind = detail::need_string(j, "kind", ctx);
  auto generators = [&]() {
    const Json& g = detail::need_field(j, "generators", ctx);
    require(g.is_array() && !g.empty(), errc::schema_error,
            ctx + ": 'generators' must be a nonempty name list");
    std::vector<std::string> names;
    for (const auto& n : g) {
      require(n.is_string(), errc::schema_error,
              ctx + ": generator names are strings");
      names.push_back(n.get<std::string>());
    }
    return names;
  };
  if (kind == "Trivial")
    return std::make_shared<Presentation>(Presentation::trivial());
  if (kind == "FreeAbelian")
    return std::make_shared<Presentation>(
        Presentation::free_abelian(generators()));
  if (kind == "Free")
    return std::make_shared<Presentation>(Presentation::free_group(generators()));
  if (kind == "Surface") {
    const size_t genus = detail::need_field(j, "genus", ctx).get<size_t>();
    std::vector<std::string> names;
    if (j.contains("generators")) names = generators();
    return std::make_shared<Presentation>(Presentation::surface(genus, names));
  }
  raise(errc::schema_error, ctx + ": unknown group kind '" + kind +
                                "' (Trivial, FreeAbelian, Free, Surface)");
}

/// Parses a full scenario document into the plain configuration. External
/// CSV references are resolved relative to base_dir.
inline ScenarioConfig scenario_config_from_json(
    const Json& j, const std::filesystem::path& base_dir = ".") {
  require(j.is_object(), errc::schema_error,
          "scenario: expected a JSON object");
  ScenarioConfig cfg;
  cfg.name = detail::need_string(j, "name", "scenario");
  if (auto it = j.find("description"); it != j.end())
    cfg.description = it->get<std::string>();
  cfg.space = space_from_json(detail::need_field(j, "space", "scenario"));
  cfg.presentation =
      presentation_from_json(detail::need_field(j, "group", "scenario"));
  cfg.x0 = detail::point_from_json(
      detail::need_field(j, "basepoint", "scenario"), "basepoint");

  if (auto it = j.find("constants"); it != j.end()) {
    require(it->is_array(), errc::schema_error, "constants: expected a list");
    for (const auto& c : *it)
      cfg.constants.push_back(
          {detail::need_string(c, "name", "constants"),
           detail::need_number(detail::need_field(c, "value", "constants"),
                               "constants.value")});
  }

  if (auto it = j.find("snapping"); it != j.end()) {
    const Json& sn = *it;
    if (auto t = sn.find("targets"); t != sn.end())
      for (const auto& expr : *t)
        cfg.snap_targets.push_back(expr.get<std::string>());
    if (auto t = sn.find("tolerance"); t != sn.end())
      cfg.snap_tolerance = detail::need_number(*t, "snapping.tolerance");
    if (auto t = sn.find("multiple_limit"); t != sn.end())
      cfg.snap_multiple_limit = t->get<int>();
    if (auto t = sn.find("denominator_limit"); t != sn.end())
      cfg.snap_denominator_limit = t->get<unsigned>();
  }

  if (auto it = j.find("toric_periods"); it != j.end())
    for (const auto& expr : *it)
      cfg.toric_generators.push_back(expr.get<std::string>());

  if (auto it = j.find("extra_relations"); it != j.end())
    for (const auto& w : *it)
      cfg.extra_relations.push_back(
          cfg.presentation->parse_word(w.get<std::string>()));

  if (auto it = j.find("declared_cocycle"); it != j.end()) {
    std::vector<ScenarioConfig::DeclaredCocycleEntry> entries;
    for (const auto& e : *it)
      entries.push_back({detail::need_string(e, "i", "declared_cocycle"),
                         detail::need_string(e, "j", "declared_cocycle"),
                         detail::need_string(e, "value", "declared_cocycle")});
    cfg.declared_cocycle = std::move(entries);
  }

  if (auto it = j.find("basis_loops"); it != j.end()) {
    for (const auto& e : *it) {
      ScenarioConfig::BasisLoopOverride bl;
      bl.cls = detail::need_string(e, "class", "basis_loops");
      if (e.contains("points"))
        bl.points = detail::points_from_json(e["points"], "basis_loops");
      else
        bl.points = detail::resolve_points(e, "basis_loops", base_dir);
      cfg.basis_loops.push_back(std::move(bl));
    }
  }

  if (auto it = j.find("marked_points"); it != j.end()) {
    for (const auto& e : *it) {
      ScenarioConfig::MarkedConfig mc;
      mc.id = detail::need_string(e, "id", "marked_points");
      mc.position = detail::point_from_json(
          detail::need_field(e, "position", "marked_points"),
          "marked_points.position");
      if (e.contains("reference"))
        mc.reference = detail::resolve_points(
            e["reference"], "marked_points.reference", base_dir);
      cfg.marked.push_back(std::move(mc));
    }
  }

  if (auto it = j.find("twist"); it != j.end()) {
    std::vector<std::pair<std::string, std::string>> tw;
    for (const auto& e : *it)
      tw.push_back({detail::need_string(e, "generator", "twist"),
                    detail::need_string(e, "value", "twist")});
    cfg.twist = std::move(tw);
  }

  if (auto it = j.find("expected"); it != j.end()) {
    if (auto t = it->find("total_periods"); t != it->end()) {
      std::vector<std::string> gens;
      for (const auto& expr : *t) gens.push_back(expr.get<std::string>());
      cfg.expected_total_periods = std::move(gens);
    }
    if (auto t = it->find("discrete"); t != it->end())
      cfg.expected_discrete = t->get<bool>();
  }

  if (auto it = j.find("grid"); it != j.end()) {
    cfg.grid_s = detail::need_field(*it, "s", "grid").get<size_t>();
    cfg.grid_n = detail::need_field(*it, "n", "grid").get<size_t>();
  }
  if (auto it = j.find("tolerance"); it != j.end())
    cfg.tolerance = detail::need_number(*it, "tolerance");
  if (auto it = j.find("quadrature_tolerance"); it != j.end())
    cfg.quad_tolerance = detail::need_number(*it, "quadrature_tolerance");

  return cfg;
}

inline Scenario load_scenario_json(const Json& j,
                                   const std::filesystem::path& base_dir =
                                       ".") {
  return build_scenario(scenario_config_from_json(j, base_dir));
}

inline Json parse_scenario_text(const std::string& text,
                                const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(errc::parse_error, origin + ": " + e.what());
  }
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), errc::io_error,
          "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << f.rdbuf();
  Json j = parse_scenario_text(buffer.str(), path.string());
  return load_scenario_json(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Built-in scenario corpus.

namespace builtin {

inline Json torus_unit() {
  Json j;
  j["name"] = "torus-unit";
  j["description"] =
      "Unit square torus with the standard area form; the commutator "
      "accumulates the fundamental-domain area and the total periods are "
      "the integers.";
  j["space"] = {{"kind", "FlatTorus"},
                {"basis", Json::array({Json::array({"1", "0"}),
                                       Json::array({"0", "1"})})}};
  j["group"] = {{"kind", "FreeAbelian"},
                {"generators", Json::array({"A", "B"})}};
  j["basepoint"] = {0.0, 0.0};
  j["snapping"] = {{"targets", Json::array({"1"})},
                   {"tolerance", 1e-5},
                   {"multiple_limit", 8},
                   {"denominator_limit", 48}};
  j["toric_periods"] = {"1"};
  j["marked_points"] = Json::array(
      {Json{{"id", "base"}, {"position", {0.0, 0.0}}},
       Json{{"id", "mid"}, {"position", {0.5, 0.5}}}});
  j["expected"] = {{"total_periods", Json::array({"1"})}, {"discrete", true}};
  j["grid"] = {{"s", 256}, {"n", 256}};
  j["tolerance"] = 1e-6;
  return j;
}

inline Json punctured_plane_magnetic() {
  Json j;
  j["name"] = "punctured-plane-magnetic";
  j["description"] =
      "Plane minus the origin with the magnetic form dx dy / r^2; the form "
      "is exact away from the puncture, the total periods vanish, and loop "
      "phases grow as 2 pi log r.";
  j["space"] = {{"kind", "PuncturedPlane"}, {"form", "Magnetic"}};
  j["group"] = {{"kind", "FreeAbelian"}, {"generators", Json::array({"c"})}};
  j["basepoint"] = {1.0, 0.0};
  j["constants"] = Json::array(
      {Json{{"name", "two_pi_log2"}, {"value", 4.3551721806072043}}});
  j["snapping"] = {{"targets", Json::array({"two_pi_log2"})},
                   {"tolerance", 1e-4},
                   {"multiple_limit", 8},
                   {"denominator_limit", 48}};
  j["toric_periods"] = Json::array();
  j["marked_points"] = Json::array(
      {Json{{"id", "r1"}, {"position", {1.0, 0.0}}},
       Json{{"id", "r2"}, {"position", {2.0, 0.0}}}});
  j["expected"] = {{"total_periods", Json::array()}, {"discrete", true}};
  j["grid"] = {{"s", 256}, {"n", 256}};
  j["tolerance"] = 1e-5;
  return j;
}

inline Json two_holes_flat() {
  Json j;
  j["name"] = "two-holes-flat";
  j["description"] =
      "Plane minus two points with the zero form and a flat twist: phases "
      "come from a character of the free group on the two hole classes.";
  j["space"] = {{"kind", "TwoHolesPlane"},
                {"p1", {-1.0, 0.0}},
                {"p2", {1.0, 0.0}},
                {"form", "Zero"}};
  j["group"] = {{"kind", "Free"}, {"generators", Json::array({"a", "b"})}};
  j["basepoint"] = {0.0, -2.0};
  j["toric_periods"] = Json::array();
  j["marked_points"] =
      Json::array({Json{{"id", "base"}, {"position", {0.0, -2.0}}}});
  j["twist"] = Json::array(
      {Json{{"generator", "a"}, {"value", "1/3"}},
       Json{{"generator", "b"}, {"value", "1/5"}}});
  j["expected"] = {{"total_periods", Json::array()}, {"discrete", true}};
  j["grid"] = {{"s", 64}, {"n", 256}};
  j["tolerance"] = 1e-6;
  return j;
}

inline Json genus2_declared() {
  Json j;
  j["name"] = "genus-2-declared";
  j["description"] =
      "Genus-2 surface of total area 3 handled algebraically: the cocycle "
      "is declared through the intersection pairing and the single relator "
      "accumulates the full area.";
  j["space"] = {{"kind", "AbstractSurface"}, {"genus", 2}};
  j["group"] = {{"kind", "Surface"}, {"genus", 2}};
  j["basepoint"] = Json::array();
  j["toric_periods"] = Json::array();

  // tau(i, j) = (area/4) * <i, j> with <,> the symplectic intersection
  // pairing on abelianized classes and area = 3. This is a genuine group
  // 2-cocycle (a bilinear form pulled back through abelianization), and the
  // relator fold telescopes to the full area. The table covers every pair
  // reachable from the relator fold and from products of up to three
  // signed generators.
  const std::array<const char*, 4> gen = {"a1", "b1", "a2", "b2"};
  auto pairing = [](const std::array<long, 4>& x,
                    const std::array<long, 4>& y) {
    return x[0] * y[1] - x[1] * y[0] + x[2] * y[3] - x[3] * y[2];
  };
  struct Piece {
    std::string word;
    std::array<long, 4> ab;
  };
  std::vector<Piece> singles, doubles, prefixes;
  for (size_t g = 0; g < 4; ++g) {
    std::array<long, 4> e{};
    e[g] = 1;
    singles.push_back({gen[g], e});
    e[g] = -1;
    singles.push_back({std::string(gen[g]) + "^-1", e});
  }
  for (const auto& x : singles)
    for (const auto& y : singles) {
      std::array<long, 4> e{};
      bool cancel = true;
      for (int i = 0; i < 4; ++i) {
        e[i] = x.ab[i] + y.ab[i];
        if (e[i] != 0) cancel = false;
      }
      // Skip inverse pairs; a same-letter pair with nonzero sum never
      // cancels, so the abelianization test is exact here.
      if (cancel && x.word != y.word) continue;
      doubles.push_back({x.word + " " + y.word, e});
    }
  prefixes.push_back({"a1 b1", {1, 1, 0, 0}});
  prefixes.push_back({"a1 b1 a1^-1", {0, 1, 0, 0}});
  prefixes.push_back({"a1 b1 a1^-1 b1^-1", {0, 0, 0, 0}});
  prefixes.push_back({"a1 b1 a1^-1 b1^-1 a2", {0, 0, 1, 0}});
  prefixes.push_back({"a1 b1 a1^-1 b1^-1 a2 b2", {0, 0, 1, 1}});
  prefixes.push_back({"a1 b1 a1^-1 b1^-1 a2 b2 a2^-1", {0, 0, 0, 1}});

  Json table = Json::array();
  auto emit = [&](const Piece& x, const Piece& y) {
    mpq_class v(3 * pairing(x.ab, y.ab), 4);
    v.canonicalize();
    table.push_back(
        Json{{"i", x.word}, {"j", y.word}, {"value", v.get_str()}});
  };
  for (const auto& x : singles) {
    for (const auto& y : singles) emit(x, y);
    for (const auto& y : doubles) emit(x, y);
  }
  for (const auto& x : doubles)
    for (const auto& y : singles) emit(x, y);
  for (const auto& x : prefixes)
    for (const auto& y : singles) emit(x, y);
  j["declared_cocycle"] = table;

  j["expected"] = {{"total_periods", Json::array({"3"})}, {"discrete", true}};
  j["grid"] = {{"s", 8}, {"n", 8}};
  j["tolerance"] = 1e-6;
  return j;
}

inline Json s2xs2_rational() {
  Json j;
  j["name"] = "s2xs2-rational";
  j["description"] =
      "Product of two spheres with commensurate couplings 1 and 2/3; the "
      "toric periods combine into the discrete group (1/3)Z.";
  j["space"] = {{"kind", "Product"},
                {"left", Json{{"kind", "TwoSphere"}, {"scale", 1.0}}},
                {"right",
                 Json{{"kind", "TwoSphere"}, {"scale", 0.66666666666666663}}}};
  j["group"] = {{"kind", "Trivial"}};
  j["basepoint"] = {0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
  j["snapping"] = {{"targets", Json::array({"1", "2/3"})},
                   {"tolerance", 1e-4},
                   {"multiple_limit", 8},
                   {"denominator_limit", 48}};
  j["toric_periods"] = {"1", "2/3"};
  j["marked_points"] = Json::array(
      {Json{{"id", "nn"}, {"position", {0.0, 0.0, 1.0, 0.0, 0.0, 1.0}}}});
  j["expected"] = {{"total_periods", Json::array({"1/3"})},
                   {"discrete", true}};
  j["grid"] = {{"s", 256}, {"n", 256}};
  j["tolerance"] = 1e-5;
  return j;
}

inline Json s2xs2_irrational() {
  Json j;
  j["name"] = "s2xs2-irrational";
  j["description"] =
      "Product of two spheres with incommensurate couplings 1 and "
      "sqrt(1/2); the group of periods is dense and the period torus is "
      "not Hausdorff.";
  j["space"] = {{"kind", "Product"},
                {"left", Json{{"kind", "TwoSphere"}, {"scale", 1.0}}},
                {"right", Json{{"kind", "TwoSphere"},
                               {"scale", 0.70710678118654757}}}};
  j["group"] = {{"kind", "Trivial"}};
  j["basepoint"] = {0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
  j["constants"] = Json::array(
      {Json{{"name", "alpha"}, {"value", 0.70710678118654757}}});
  j["snapping"] = {{"targets", Json::array({"1", "alpha"})},
                   {"tolerance", 1e-4},
                   {"multiple_limit", 8},
                   {"denominator_limit", 0}};
  j["toric_periods"] = {"1", "alpha"};
  j["marked_points"] = Json::array(
      {Json{{"id", "nn"}, {"position", {0.0, 0.0, 1.0, 0.0, 0.0, 1.0}}}});
  j["expected"] = {{"discrete", false}};
  j["grid"] = {{"s", 256}, {"n", 256}};
  j["tolerance"] = 1e-5;
  return j;
}

inline Json aharonov_bohm() {
  Json j;
  j["name"] = "aharonov-bohm";
  j["description"] =
      "Punctured plane with the zero form and a flat twist of flux 1/2: "
      "all phases are multiples of the flux, detected by winding number, "
      "while the canonical phase function vanishes identically.";
  j["space"] = {{"kind", "PuncturedPlane"}, {"form", "Zero"}};
  j["group"] = {{"kind", "FreeAbelian"}, {"generators", Json::array({"c"})}};
  j["basepoint"] = {1.0, 0.0};
  j["toric_periods"] = Json::array();
  j["marked_points"] =
      Json::array({Json{{"id", "base"}, {"position", {1.0, 0.0}}}});
  j["twist"] =
      Json::array({Json{{"generator", "c"}, {"value", "1/2"}}});
  j["expected"] = {{"total_periods", Json::array()}, {"discrete", true}};
  j["grid"] = {{"s", 64}, {"n", 256}};
  j["tolerance"] = 1e-6;
  return j;
}

}  // namespace builtin

inline const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {
      "torus-unit",
      "punctured-plane-magnetic",
      "two-holes-flat",
      "genus-2-declared",
      "s2xs2-rational",
      "s2xs2-irrational",
      "aharonov-bohm",
  };
  return names;
}

inline Json builtin_scenario_json(const std::string& name) {
  if (name == "torus-unit") return builtin::torus_unit();
  if (name == "punctured-plane-magnetic")
    return builtin::punctured_plane_magnetic();
  if (name == "two-holes-flat") return builtin::two_holes_flat();
  if (name == "genus-2-declared") return builtin::genus2_declared();
  if (name == "s2xs2-rational") return builtin::s2xs2_rational();
  if (name == "s2xs2-irrational") return builtin::s2xs2_irrational();
  if (name == "aharonov-bohm") return builtin::aharonov_bohm();
  std::string known;
  for (const auto& n : builtin_scenario_names()) known += " " + n;
  raise(errc::invalid_argument,
        "unknown built-in scenario '" + name + "'; available:" + known);
}

inline bool is_builtin_scenario(const std::string& name) {
  for (const auto& n : builtin_scenario_names())
    if (n == name) return true;
  return false;
}

inline Scenario load_builtin_scenario(const std::string& name) {
  return load_scenario_json(builtin_scenario_json(name));
}

/// Resolves a CLI scenario argument: a built-in name or a path to a JSON
/// document.
inline Scenario load_scenario(const std::string& name_or_path) {
  if (is_builtin_scenario(name_or_path))
    return load_builtin_scenario(name_or_path);
  return load_scenario_file(name_or_path);
}

}  // namespace prequant
