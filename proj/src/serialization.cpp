#include "polysmooth/serialization.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "polysmooth/errors.hpp"

namespace polysmooth {

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) parse_error(where + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) parse_error(where + " is missing \"" + key + "\"");
  return *it;
}

std::size_t index_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) parse_error(where + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

int int_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) parse_error(where + " must be an integer");
  return j.get<int>();
}

Json ids_to_json(const Simplex& s) {
  Json a = Json::array();
  for (VertexId v : s.ids()) a.push_back(v);
  return a;
}

Simplex ids_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_error(where + " must be a nonempty array of vertex ids");
  std::vector<VertexId> ids;
  for (const auto& v : j) ids.push_back(index_from_json(v, where));
  return Simplex(std::move(ids));
}

}  // namespace

Json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<unsigned long long>())));
    return Rational(mpz_class(std::to_string(j.get<long long>())));
  }
  if (j.is_number_float())
    parse_error(where + ": floating point numbers are not accepted, write \"" + j.dump() + "\" as a string");
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      parse_error(where + ": " + e.what());
    }
  }
  if (j.is_array() && j.size() == 2) {
    Rational num = rational_from_json(j[0], where), den = rational_from_json(j[1], where);
    if (num.get_den() != 1 || den.get_den() != 1) parse_error(where + ": fraction parts must be integers");
    if (sgn(den) == 0) parse_error(where + ": zero denominator");
    return num / den;
  }
  parse_error(where + " must be an integer, a string or a [num, den] pair");
}

Json point_to_json(const Point& p) {
  Json a = Json::array();
  for (const auto& c : p) a.push_back(rational_to_json(c));
  return a;
}

Point point_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array of coordinates");
  Point p;
  for (std::size_t i = 0; i < j.size(); ++i) p.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return p;
}

Json complex_to_json(const SimplicialComplex& k) {
  Json out;
  out["format"] = "polysmooth.complex";
  out["version"] = 1;
  out["ambient_dim"] = k.ambient_dim();
  Json verts = Json::array();
  for (const auto& v : k.vertices()) verts.push_back(point_to_json(v));
  out["vertices"] = std::move(verts);
  Json simplices = Json::array();
  for (std::size_t m : k.maximal_simplices()) simplices.push_back(ids_to_json(k.simplex(m)));
  out["simplices"] = std::move(simplices);
  return out;
}

SimplicialComplex complex_from_json(const Json& j) {
  const Json& verts = field(j, "vertices", "complex");
  const Json& simps = field(j, "simplices", "complex");
  if (!verts.is_array() || !simps.is_array()) parse_error("complex vertices and simplices must be arrays");
  std::vector<Point> points;
  for (std::size_t i = 0; i < verts.size(); ++i)
    points.push_back(point_from_json(verts[i], "vertices[" + std::to_string(i) + "]"));
  std::vector<std::vector<VertexId>> tops;
  for (std::size_t i = 0; i < simps.size(); ++i) {
    const std::string where = "simplices[" + std::to_string(i) + "]";
    if (!simps[i].is_array()) parse_error(where + " must be an array");
    std::vector<VertexId> ids;
    for (const auto& v : simps[i]) ids.push_back(index_from_json(v, where));
    tops.push_back(std::move(ids));
  }
  if (j.contains("ambient_dim")) {
    std::size_t p = index_from_json(j["ambient_dim"], "ambient_dim");
    for (const auto& v : points)
      if (v.size() != p) throw Error(ErrorCode::DimensionMismatch, "vertex dimension differs from ambient_dim");
  }
  return build_complex(std::move(points), tops);
}

namespace {

Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms()) {
    Json term;
    term["exponents"] = t.exponents;
    term["coefficient"] = rational_to_json(t.coefficient);
    terms.push_back(std::move(term));
  }
  return terms;
}

Polynomial polynomial_from_json(const Json& j, std::size_t variables, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array of terms");
  std::vector<Polynomial::Term> terms;
  for (const auto& t : j) {
    const Json& e = field(t, "exponents", where);
    if (!e.is_array()) parse_error(where + ": exponents must be an array");
    Polynomial::Term term;
    for (const auto& x : e) term.exponents.push_back(int_from_json(x, where + " exponent"));
    term.coefficient = rational_from_json(field(t, "coefficient", where), where + " coefficient");
    terms.push_back(std::move(term));
  }
  return Polynomial(variables, std::move(terms));
}

}  // namespace

Json map_to_json(const PiecewiseMap& g, const SimplicialComplex* target) {
  Json out;
  out["format"] = "polysmooth.map";
  out["version"] = 1;
  out["target_dim"] = g.target_dim();
  switch (g.kind()) {
    case PiecewiseMap::Kind::PL: {
      out["kind"] = "pl";
      Json images = Json::array();
      for (const auto& im : g.as_pl()->images()) images.push_back(point_to_json(im));
      out["images"] = std::move(images);
      break;
    }
    case PiecewiseMap::Kind::Polynomial: {
      out["kind"] = "polynomial";
      out["class"] = g.declared_class();
      Json pieces = Json::array();
      for (const auto& piece : g.pieces()) {
        Json comps = Json::array();
        for (const auto& p : piece) comps.push_back(polynomial_to_json(p));
        pieces.push_back(std::move(comps));
      }
      out["pieces"] = std::move(pieces);
      break;
    }
    case PiecewiseMap::Kind::Opaque:
      throw Error(ErrorCode::RangeError, "opaque maps cannot be serialized");
  }
  if (target) out["target"] = complex_to_json(*target);
  return out;
}

EvaluableMap MapFile::evaluable() const {
  if (table) return EvaluableMap(*table);
  if (const PLMap* pl = map->as_pl()) return EvaluableMap(*pl);
  auto g = map;
  auto lip = g->lipschitz_bound();
  if (!lip) throw Error(ErrorCode::ModulusUnavailable, "map has no Lipschitz bound");
  return EvaluableMap(OpaqueMap{[g](const Point& x) -> std::optional<Point> { return (*g)(x); }, *lip, g->target_dim()});
}

MapFile map_from_json(const Json& j, const ComplexPtr& source, const ComplexPtr& target) {
  const Json& kind = field(j, "kind", "map");
  if (!kind.is_string()) parse_error("map kind must be a string");
  MapFile out;
  if (j.contains("target")) out.target = std::make_shared<SimplicialComplex>(complex_from_json(j["target"]));
  const std::string k = kind.get<std::string>();
  if (k == "pl" && j.contains("vertex_map")) {
    ComplexPtr tgt = out.target ? out.target : target;
    if (!tgt) parse_error("a vertex_map needs a target complex");
    const Json& vm = j["vertex_map"];
    if (!vm.is_array()) parse_error("vertex_map must be an array of target vertex ids");
    SimplicialMap sm{source, tgt, {}};
    for (const auto& v : vm) {
      std::size_t w = index_from_json(v, "vertex_map entry");
      if (w >= tgt->num_vertices()) throw Error(ErrorCode::UnknownVertex, "vertex_map names an unknown target vertex");
      sm.vertex_map.push_back(w);
    }
    auto check = is_simplicial(sm.vertex_map, *source, *tgt);
    if (!check.ok) throw Error(ErrorCode::BadGluing, "vertex_map is not simplicial");
    out.target = tgt;
    out.map = std::make_shared<PiecewiseMap>(PiecewiseMap::from_pl(PLMap::from_simplicial(sm)));
  } else if (k == "pl") {
    const Json& images = field(j, "images", "map");
    if (!images.is_array()) parse_error("map images must be an array");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < images.size(); ++i)
      pts.push_back(point_from_json(images[i], "images[" + std::to_string(i) + "]"));
    if (pts.empty()) parse_error("map has no images");
    out.map = std::make_shared<PiecewiseMap>(PiecewiseMap::from_pl(PLMap(source, std::move(pts))));
  } else if (k == "opaque-table") {
    const Json& points = field(j, "points", "map");
    const Json& values = field(j, "values", "map");
    if (!points.is_array() || !values.is_array() || points.size() != values.size() || points.empty())
      parse_error("opaque-table needs equally long nonempty points and values arrays");
    auto table = std::make_shared<std::map<Point, Point>>();
    std::size_t q = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      Point x = point_from_json(points[i], "points[" + std::to_string(i) + "]");
      Point y = point_from_json(values[i], "values[" + std::to_string(i) + "]");
      if (x.size() != source->ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "table point dimension");
      if (i == 0) q = y.size();
      if (y.size() != q) throw Error(ErrorCode::DimensionMismatch, "table values of mixed dimension");
      (*table)[std::move(x)] = std::move(y);
    }
    Rational lip = rational_from_json(field(j, "lipschitz", "map"), "lipschitz");
    if (sgn(lip) < 0) throw Error(ErrorCode::RangeError, "lipschitz must be nonnegative");
    out.table = OpaqueMap{[table](const Point& x) -> std::optional<Point> {
                            auto it = table->find(x);
                            if (it == table->end()) return std::nullopt;
                            return it->second;
                          },
                          lip, q};
    if (out.target && out.target->ambient_dim() != q)
      throw Error(ErrorCode::DimensionMismatch, "map values and embedded target differ in dimension");
    return out;
  } else if (k == "polynomial") {
    const Json& pieces = field(j, "pieces", "map");
    if (!pieces.is_array()) parse_error("map pieces must be an array");
    std::vector<std::vector<Polynomial>> ps;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!pieces[i].is_array()) parse_error("each piece must be an array of components");
      std::vector<Polynomial> comps;
      for (std::size_t c = 0; c < pieces[i].size(); ++c)
        comps.push_back(polynomial_from_json(pieces[i][c], source->ambient_dim(),
                                             "pieces[" + std::to_string(i) + "][" + std::to_string(c) + "]"));
      ps.push_back(std::move(comps));
    }
    int cls = j.contains("class") ? int_from_json(j["class"], "class") : -1;
    out.map = std::make_shared<PiecewiseMap>(PiecewiseMap::polynomial(source, std::move(ps), cls));
  } else {
    parse_error("unknown map kind \"" + k + "\" (expected \"pl\", \"polynomial\" or \"opaque-table\")");
  }
  if (out.target && out.target->ambient_dim() != out.map->target_dim())
    throw Error(ErrorCode::DimensionMismatch, "map images and embedded target differ in dimension");
  return out;
}

namespace {

// P = E (E^T E)^{-1} E^T, projection onto the direction space of the hull.
Json projection_matrix(const CoverElement& e) {
  const auto& v = e.frame().vertices();
  const std::size_t p = v.front().size(), d = v.size() - 1;
  RationalMatrix proj(p, p);
  if (d > 0) {
    RationalMatrix edges(p, d);
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t r = 0; r < p; ++r) edges(r, c) = v[c + 1][r] - v[0][r];
    auto gi = inverse(edges.transpose() * edges);
    if (gi) proj = edges * (*gi * edges.transpose());
  }
  Json rows = Json::array();
  for (std::size_t r = 0; r < p; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < p; ++c) row.push_back(rational_to_json(proj(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json cover_to_json(const SkeletonCover& cover) {
  Json out;
  out["format"] = "polysmooth.cover";
  out["version"] = 1;
  out["delta"] = rational_to_json(cover.delta);
  out["complex"] = complex_to_json(*cover.complex);
  Json levels = Json::array();
  for (const auto& l : cover.levels) {
    Json lj;
    lj["dim"] = l.dim;
    lj["epsilon"] = rational_to_json(l.epsilon);
    lj["delta"] = rational_to_json(l.delta);
    levels.push_back(std::move(lj));
  }
  out["levels"] = std::move(levels);
  Json elements = Json::array();
  for (const auto& e : cover.elements) {
    Json ej;
    ej["simplex"] = ids_to_json(e.simplex());
    if (e.kind() == CoverElement::Kind::Ball) {
      ej["kind"] = "ball";
      ej["radius"] = rational_to_json(e.radius());
    } else {
      ej["kind"] = "tube";
      ej["epsilon"] = rational_to_json(e.epsilon());
      ej["delta"] = rational_to_json(e.radius());
      ej["projection"] = projection_matrix(e);
    }
    elements.push_back(std::move(ej));
  }
  out["elements"] = std::move(elements);
  return out;
}

SkeletonCover cover_from_json(const Json& j) {
  SkeletonCover cover;
  cover.complex = std::make_shared<SimplicialComplex>(complex_from_json(field(j, "complex", "cover")));
  cover.delta = rational_from_json(field(j, "delta", "cover"), "delta");
  if (sgn(cover.delta) <= 0) throw Error(ErrorCode::RangeError, "cover delta must be positive");
  if (j.contains("levels")) {
    for (const auto& l : j["levels"])
      cover.levels.push_back({int_from_json(field(l, "dim", "level"), "level dim"),
                              rational_from_json(field(l, "epsilon", "level"), "level epsilon"),
                              rational_from_json(field(l, "delta", "level"), "level delta")});
  }
  const Json& elements = field(j, "elements", "cover");
  if (!elements.is_array()) parse_error("cover elements must be an array");
  const SimplicialComplex& k = *cover.complex;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string where = "elements[" + std::to_string(i) + "]";
    const Json& ej = elements[i];
    Simplex s = ids_from_json(field(ej, "simplex", where), where + ".simplex");
    auto idx = k.index_of(s);
    if (!idx) throw Error(ErrorCode::UnknownVertex, where + " names a simplex that is not in the complex");
    const Json& kind = field(ej, "kind", where);
    if (kind == "ball") {
      if (s.dim() != 0) parse_error(where + ": balls belong to vertices");
      cover.elements.push_back(CoverElement::ball(*idx, s, k.vertex(s.ids().front()),
                                                  rational_from_json(field(ej, "radius", where), where + ".radius")));
    } else if (kind == "tube") {
      if (s.dim() == 0) parse_error(where + ": vertices use balls");
      Rational eps = rational_from_json(field(ej, "epsilon", where), where + ".epsilon");
      Rational delta = rational_from_json(field(ej, "delta", where), where + ".delta");
      cover.elements.push_back(CoverElement::tube(*idx, s, k.points_of(s), eps, delta));
    } else {
      parse_error(where + ": kind must be \"ball\" or \"tube\"");
    }
  }
  return cover;
}

Json cover_report_to_json(const CoverReport& report) {
  Json out;
  out["ok"] = report.ok();
  out["pieces_checked"] = report.pieces_checked;
  out["max_retraction_radius"] = rational_to_json(report.max_retraction_radius);
  Json v = Json::array();
  for (const auto& viol : report.violations) {
    Json vj;
    vj["property"] = viol.property;
    vj["element"] = viol.element ? Json(*viol.element) : Json(nullptr);
    vj["simplex"] = viol.simplex ? Json(*viol.simplex) : Json(nullptr);
    vj["detail"] = viol.detail;
    v.push_back(std::move(vj));
  }
  out["violations"] = std::move(v);
  return out;
}

Json divisor_to_json(const DivisorFile& d) {
  Json out;
  out["dim"] = d.divisor.dim;
  Json comps = Json::array();
  for (std::size_t j : d.divisor.components) comps.push_back(j + 1);
  out["components"] = std::move(comps);
  out["eta"] = rational_to_json(d.eta);
  out["nu"] = d.nu;
  if (d.divisor.box) out["box"] = Json::array({point_to_json(d.divisor.box->first), point_to_json(d.divisor.box->second)});
  return out;
}

DivisorFile divisor_from_json(const Json& j) {
  std::size_t dim = index_from_json(field(j, "dim", "divisor"), "dim");
  const Json& comps = field(j, "components", "divisor");
  if (!comps.is_array()) parse_error("divisor components must be an array");
  std::vector<std::size_t> js;
  for (const auto& c : comps) {
    std::size_t v = index_from_json(c, "component");
    if (v == 0) throw Error(ErrorCode::RangeError, "components are 1-based");
    js.push_back(v - 1);
  }
  std::optional<std::pair<Point, Point>> box;
  if (j.contains("box")) {
    const Json& b = j["box"];
    if (!b.is_array() || b.size() != 2) parse_error("box must be [[lo...], [hi...]]");
    box = std::make_pair(point_from_json(b[0], "box lo"), point_from_json(b[1], "box hi"));
  }
  DivisorFile out{CoordinateDivisor::make(dim, std::move(js), std::move(box)),
                  j.contains("eta") ? rational_from_json(j["eta"], "eta") : Rational(1, 10),
                  j.contains("nu") ? int_from_json(j["nu"], "nu") : 1};
  if (sgn(out.eta) <= 0) throw Error(ErrorCode::RangeError, "eta must be positive");
  if (out.nu < 1) throw Error(ErrorCode::RangeError, "nu must be at least 1");
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace polysmooth
