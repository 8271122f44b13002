#include "polysmooth/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "polysmooth/errors.hpp"
#include "polysmooth/parallel.hpp"
#include "polysmooth/sampling.hpp"
#include "polysmooth/serialization.hpp"
#include "polysmooth/smoother.hpp"

namespace polysmooth::cli {

namespace {

using Clock = std::chrono::steady_clock;

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::RangeError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::AffineDependence:
    case ErrorCode::BadGluing:
    case ErrorCode::DuplicateVertex:
    case ErrorCode::UnknownVertex:
    case ErrorCode::EmptyComplex:
    case ErrorCode::EpsilonOutOfRange:
      return true;
    default:
      return false;
  }
}

[[noreturn]] void input_error(const std::string& msg) { throw Error(ErrorCode::RangeError, msg); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Job {
 public:
  explicit Job(const JobSpec& spec) : spec_(spec) {
    report_["command"] = spec.command;
    report_["job"] = echo();
  }

  Json& certificates() { return report_["certificates"]; }

  void violation(const std::string& kind, const std::string& detail) {
    Json v;
    v["kind"] = kind;
    v["detail"] = detail;
    violations_.push_back(std::move(v));
  }

  void check(bool ok, const std::string& kind, const std::string& detail) {
    if (!ok) violation(kind, detail);
  }

  void phase(const std::string& name) {
    auto now = Clock::now();
    if (spec_.timing) timing_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

  const std::string& require(const std::string& value, const char* flag) const {
    if (value.empty()) input_error(spec_.command + " requires " + flag);
    return value;
  }

  Rational rational(const std::optional<std::string>& v, const char* flag) const {
    if (!v) input_error(spec_.command + " requires " + flag);
    Rational q = parse_rational(*v);
    if (sgn(q) <= 0) input_error(std::string(flag) + " must be positive");
    return q;
  }

  int nu() const {
    int v = spec_.nu.value_or(1);
    if (v < 1 || v > 12) input_error("--nu must lie in 1..12");
    return v;
  }

  ComplexPtr complex(const std::string& path, const char* flag) const {
    return std::make_shared<SimplicialComplex>(complex_from_json(read_json_file(require(path, flag))));
  }

  std::vector<Point> sample_points(const SimplicialComplex& k) const {
    return samples(k, spec_.samples, spec_.seed);
  }

  int finish(std::ostream& out) {
    report_["violations"] = violations_;
    report_["ok"] = violations_.empty();
    if (spec_.timing) report_["timing"] = timing_;
    std::string text = dump(report_);
    if (!spec_.report_path.empty())
      write_text_file(spec_.report_path, text);
    else
      out << text;
    return violations_.empty() ? 0 : 1;
  }

  void fail(const Error& e) {
    Json v;
    v["kind"] = "error";
    v["code"] = std::string(to_string(e.code()));
    v["detail"] = e.what();
    violations_.push_back(std::move(v));
  }

 private:
  Json echo() const {
    Json j;
    auto put = [&](const char* key, const std::string& v) {
      if (!v.empty()) j[key] = v;
    };
    put("complex", spec_.complex_path);
    put("target", spec_.target_path);
    put("map", spec_.map_path);
    put("cover", spec_.cover_path);
    put("divisor", spec_.divisor_path);
    put("out", spec_.out_path);
    put("csv", spec_.csv_path);
    if (spec_.eps) j["eps"] = *spec_.eps;
    if (spec_.eta) j["eta"] = *spec_.eta;
    if (spec_.delta) j["delta"] = *spec_.delta;
    if (spec_.share) j["share"] = *spec_.share;
    if (spec_.nu) j["nu"] = *spec_.nu;
    if (spec_.n) j["n"] = *spec_.n;
    if (spec_.k) j["k"] = *spec_.k;
    if (spec_.seed) j["seed"] = *spec_.seed;
    j["samples"] = spec_.samples;
    return j;
  }

  const JobSpec& spec_;
  Json report_;
  Json violations_ = Json::array();
  Json timing_ = Json::object();
  Clock::time_point last_ = Clock::now();
};

Json certificate_json(const MapCertificate& c) {
  Json j;
  j["samples"] = c.samples;
  j["max_error"] = c.max_error;
  j["error_bound"] = c.error_bound;
  j["error_ok"] = c.error_ok;
  j["min_carrier_weight"] = c.min_carrier_weight;
  j["max_carrier_normal"] = c.max_carrier_normal;
  j["carrier_soft_failures"] = c.carrier_soft_failures;
  j["max_partition_defect"] = c.max_partition_defect;
  j["convexity_ok"] = c.convexity_ok;
  j["failures"] = c.failures;
  return j;
}

void record_certificate(Job& job, const MapCertificate& c) {
  job.certificates()["map"] = certificate_json(c);
  job.check(c.error_ok, "error", "sup error " + fmt(c.max_error) + " is not below " + fmt(c.error_bound));
  job.check(c.carrier_soft_failures == 0, "carrier",
            std::to_string(c.carrier_soft_failures) + " samples leave their carrier beyond 1e-9");
  job.check(c.convexity_ok, "convexity", c.failures.empty() ? "convexity witness failed" : c.failures.front());
  job.check(c.max_partition_defect <= 1e-12, "partition", "partition of unity defect " + fmt(c.max_partition_defect));
}

void record_seams(Job& job, const SmoothedMap& h, int nu) {
  double step = feature_size(h.cover()).get_d();
  auto f = [&](std::span<const double> x) { return h.extended(x); };
  SeamReport rep = seam_smoothness(f, h.source(), step, nu);
  Json s;
  s["seams"] = rep.seams;
  s["min_order"] = rep.min_order;
  s["step"] = step;
  job.certificates()["smoothness"] = s;
  job.check(rep.seams == 0 || rep.min_order >= nu, "smoothness",
            "measured order " + std::to_string(rep.min_order) + " below " + std::to_string(nu));
}

void write_csv(const std::string& path, const SmoothedMap& h, std::span<const Point> pts) {
  if (path.empty()) return;
  const SimplicialComplex& k = h.source();
  if (k.ambient_dim() > 3) throw Error(ErrorCode::RangeError, "CSV export is limited to ambient dimension 3");
  std::ostringstream os;
  for (std::size_t i = 0; i < k.ambient_dim(); ++i) os << "x" << i << ",";
  for (std::size_t i = 0; i < h.target_dim(); ++i) os << "h" << i << ",";
  os << "carrier,min_barycentric\n";
  const auto& carriers = h.carriers();
  for (const auto& x : pts) {
    auto xf = to_doubles(x);
    auto v = h.terms(x).value;
    for (double c : xf) os << fmt(c) << ",";
    for (double c : v) os << fmt(c) << ",";
    if (carriers.target) {
      std::size_t t = *k.index_of(locate(k, x).simplex);
      std::size_t xi = carriers.carrier[t];
      AffineFrame fr(carriers.target->points_of(carriers.target->simplex(xi)));
      AffineFrame::ProjectionF pf;
      fr.project(v, pf);
      os << xi << "," << fmt(*std::min_element(pf.weights.begin(), pf.weights.end())) << "\n";
    } else {
      os << ",\n";
    }
  }
  write_text_file(path, os.str());
}

Json smoothed_map_json(const SmoothedMap& h, const Json& certificates) {
  Json j;
  j["format"] = "polysmooth.smoothed_map";
  j["version"] = 1;
  j["nu"] = h.order();
  j["eta"] = h.eta();
  j["source"] = complex_to_json(h.source());
  if (h.carriers().target) j["target"] = complex_to_json(*h.carriers().target);
  j["map"] = map_to_json(h.source_map());
  if (h.carriers().target) j["carriers"] = h.carriers().carrier;
  j["cover"] = cover_to_json(h.cover());
  j["certificates"] = certificates;
  return j;
}

void run_subdivide(Job& job, const JobSpec& spec) {
  auto k = job.complex(spec.complex_path, "--complex");
  int rounds = spec.k.value_or(1);
  if (rounds < 0 || rounds > 12) input_error("--k must lie in 0..12");
  Json levels = Json::array();
  Rational base = mesh_size_squared(*k);
  SimplicialComplex cur = *k;
  const int d = std::max(k->dim(), 0);
  for (int r = 0; r <= rounds; ++r) {
    if (r > 0) cur = barycentric_subdivide(cur, 1);
    Rational m2 = mesh_size_squared(cur);
    // mesh(K^(r)) <= (d/(d+1))^r mesh(K), compared on squares
    Rational ratio(d, d + 1);
    Rational bound = base;
    for (int i = 0; i < r; ++i) bound *= ratio * ratio;
    Json l;
    l["level"] = r;
    l["simplices"] = cur.simplices().size();
    l["mesh_squared"] = rational_to_json(m2);
    l["mesh"] = std::sqrt(m2.get_d());
    l["bound_ok"] = m2 <= bound;
    job.check(m2 <= bound, "mesh", "level " + std::to_string(r) + " exceeds the contraction bound");
    levels.push_back(std::move(l));
  }
  job.phase("subdivide");
  job.certificates()["levels"] = levels;
  if (!spec.out_path.empty()) write_text_file(spec.out_path, dump(complex_to_json(cur)));
}

void run_smooth(Job& job, const JobSpec& spec) {
  auto k = job.complex(spec.complex_path, "--complex");
  ComplexPtr target = spec.target_path.empty() ? nullptr : job.complex(spec.target_path, "--target");
  MapFile mf = map_from_json(read_json_file(job.require(spec.map_path, "--map")), k, target);
  if (!target) target = mf.target;
  if (!mf.map) input_error("smooth needs a pl or polynomial map");
  double eta = job.rational(spec.eta, "--eta").get_d();
  int nu = job.nu();
  CarrierAssignment carriers{k, nullptr, {}};
  if (target) carriers = compute_carriers(*mf.map, target);
  job.phase("load");
  SmoothedMap h = smooth_map(mf.map, std::move(carriers), eta, nu);
  job.phase("smooth");
  auto pts = job.sample_points(*k);
  MapCertificate cert = certify_map(h, pts, eta);
  record_certificate(job, cert);
  record_seams(job, h, nu);
  job.phase("certify");
  if (!spec.out_path.empty()) write_text_file(spec.out_path, dump(smoothed_map_json(h, job.certificates())));
  write_csv(spec.csv_path, h, pts);
}

void run_approximate(Job& job, const JobSpec& spec) {
  auto k = job.complex(spec.complex_path, "--complex");
  ComplexPtr target = spec.target_path.empty() ? nullptr : job.complex(spec.target_path, "--target");
  MapFile mf = map_from_json(read_json_file(job.require(spec.map_path, "--map")), k, target);
  if (!target) target = mf.target;
  if (!target) input_error("approximate requires --target or a target embedded in the map");
  Rational eps = job.rational(spec.eps, "--eps");
  int nu = job.nu();
  ApproximateOptions opts;
  if (spec.share) {
    opts.simplicial_share = parse_rational(*spec.share);
    if (!(sgn(opts.simplicial_share) > 0 && opts.simplicial_share < 1)) input_error("--share must lie in (0,1)");
  }
  std::optional<EvaluableMap> f;
  f.emplace(mf.evaluable());
  job.phase("load");
  ApproximationResult res = approximate_map(k, target, *f, eps, nu, opts);
  job.phase("approximate");
  Json simp;
  simp["source_level"] = res.simplicial.source_level;
  simp["target_level"] = res.simplicial.target_level;
  simp["target_mesh"] = std::sqrt(res.simplicial.target_mesh_squared.get_d());
  simp["budget"] = rational_to_json(res.simplicial_budget);
  simp["smoothing_budget"] = res.smoothing_budget;
  job.certificates()["simplicial"] = simp;
  auto pts = job.sample_points(*k);
  auto reference = [&](const Point& x) { return to_doubles((*f)(x)); };
  MapCertificate cert = certify_map(*res.map, pts, eps.get_d(), reference);
  record_certificate(job, cert);
  // image containment in |L|: every value lies in its carrier, a simplex of L^(l)
  record_seams(job, *res.map, nu);
  job.phase("certify");
  if (!spec.out_path.empty()) {
    Json j = smoothed_map_json(*res.map, job.certificates());
    j["simplicial"] = simp;
    j["vertex_map"] = res.simplicial.map.vertex_map;
    write_text_file(spec.out_path, dump(j));
  }
  write_csv(spec.csv_path, *res.map, pts);
}

void run_iota(Job& job, const JobSpec& spec) {
  auto k = job.complex(spec.complex_path, "--complex");
  int n = spec.n.value_or(1);
  if (n < 0 || n > 30) input_error("--n must lie in 0..30");
  int nu = job.nu();
  job.phase("load");
  IotaMap io = iota(k, nu, n);
  job.phase("smooth");
  auto pts = job.sample_points(*k);
  auto reference = [](const Point& x) { return to_doubles(x); };
  MapCertificate cert = certify_map(*io.map, pts, io.bound(), reference);
  record_certificate(job, cert);
  double worst = 0.0;
  for (const auto& v : k->vertices()) {
    auto y = io.map->evaluate(v);
    worst = std::max(worst, std::sqrt(squared_distance(y, v).get_d()));
  }
  job.certificates()["vertex_fixpoint_error"] = worst;
  job.check(worst <= 1e-12, "fixpoint", "iota moves a vertex by " + fmt(worst));
  record_seams(job, *io.map, nu);
  job.phase("certify");
  if (!spec.out_path.empty()) {
    Json j = smoothed_map_json(*io.map, job.certificates());
    j["level"] = n;
    write_text_file(spec.out_path, dump(j));
  }
  write_csv(spec.csv_path, *io.map, pts);
}

void run_retraction(Job& job, const JobSpec& spec) {
  DivisorFile d = divisor_from_json(read_json_file(job.require(spec.divisor_path, "--divisor")));
  if (spec.eta) d.eta = job.rational(spec.eta, "--eta");
  if (spec.nu) d.nu = job.nu();
  WeakRetraction rho = weak_retraction(d.divisor, d.eta, d.nu);
  job.phase("load");
  const int per_axis = d.divisor.dim <= 2 ? 101 : 21;
  auto pts = domain_samples(rho, per_axis);
  ProductsReport prod = retraction_products(rho, pts);
  Json p;
  p["samples"] = prod.samples;
  p["all_exact_zero"] = prod.all_exact_zero;
  p["max_abs_product_float"] = prod.max_abs_product_float;
  job.certificates()["products"] = p;
  job.check(prod.all_exact_zero, "products", "a retracted sample has a nonzero product");
  job.check(prod.max_abs_product_float <= 1e-12, "products", "float product above 1e-12");

  DisplacementReport disp = displacement_on_divisor(rho, per_axis);
  Json dj;
  dj["samples"] = disp.samples;
  dj["max_displacement"] = disp.max_displacement;
  dj["bound"] = disp.bound;
  dj["histogram"] = disp.histogram;
  job.certificates()["displacement"] = dj;
  job.check(disp.ok(), "displacement", "displacement " + fmt(disp.max_displacement) + " above " + fmt(disp.bound));

  // Psi_j(X_k) inside X_k on the box grid
  bool preserved = true;
  for (const auto& x : pts)
    for (const auto& psi : rho.squashes()) {
      Point y = psi(x);
      for (std::size_t kk : d.divisor.components)
        if (sgn(x[kk]) == 0 && sgn(y[kk]) != 0) preserved = false;
    }
  job.certificates()["components_preserved"] = preserved;
  job.check(preserved, "components", "a squash moves a point off a component");

  Json seams = Json::array();
  int worst = d.nu;
  for (const auto& s : squash_seams(rho, d.nu + 1)) {
    Json sj;
    sj["coordinate"] = s.coordinate + 1;
    sj["position"] = rational_to_json(s.position);
    sj["measured_order"] = s.measured_order;
    sj["first_failing"] = s.first_failing ? Json(*s.first_failing) : Json(nullptr);
    seams.push_back(std::move(sj));
    worst = std::min(worst, s.measured_order);
  }
  job.certificates()["seams"] = seams;
  job.check(worst >= d.nu, "smoothness", "a squash seam measures below nu");
  job.phase("certify");
  if (!spec.out_path.empty()) {
    Json j = divisor_to_json(d);
    j["order"] = "increasing";
    write_text_file(spec.out_path, dump(j));
  }
  if (!spec.csv_path.empty()) {
    if (d.divisor.dim > 3) throw Error(ErrorCode::RangeError, "CSV export is limited to dimension 3");
    std::ostringstream os;
    for (std::size_t i = 0; i < d.divisor.dim; ++i) os << "x" << i << ",";
    for (std::size_t i = 0; i < d.divisor.dim; ++i) os << "rho" << i << (i + 1 < d.divisor.dim ? "," : "\n");
    for (const auto& x : pts) {
      Point y = rho(x);
      for (const auto& c : x) os << fmt(c.get_d()) << ",";
      for (std::size_t i = 0; i < y.size(); ++i) os << fmt(y[i].get_d()) << (i + 1 < y.size() ? "," : "\n");
    }
    write_text_file(spec.csv_path, os.str());
  }
}

void run_verify(Job& job, const JobSpec& spec) {
  SkeletonCover cover;
  if (!spec.cover_path.empty()) {
    cover = cover_from_json(read_json_file(spec.cover_path));
  } else {
    auto k = job.complex(spec.complex_path, "--cover or --complex");
    cover = build_cover(k, job.rational(spec.delta, "--delta"));
  }
  job.phase("load");
  CoverReport rep = verify_cover(cover);
  job.phase("verify");
  job.certificates()["cover"] = cover_report_to_json(rep);
  for (const auto& v : rep.violations) job.violation("property " + v.property, v.detail);
  if (!spec.out_path.empty()) write_text_file(spec.out_path, dump(cover_to_json(cover)));
}

}  // namespace

int run(const JobSpec& spec, std::ostream& out, std::ostream& err) {
  Job job(spec);
  try {
    if (spec.command == "subdivide")
      run_subdivide(job, spec);
    else if (spec.command == "smooth")
      run_smooth(job, spec);
    else if (spec.command == "approximate")
      run_approximate(job, spec);
    else if (spec.command == "iota")
      run_iota(job, spec);
    else if (spec.command == "retraction")
      run_retraction(job, spec);
    else if (spec.command == "verify")
      run_verify(job, spec);
    else
      input_error("unknown command \"" + spec.command + "\"");
  } catch (const Error& e) {
    if (is_input_error(e.code())) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
    job.fail(e);
  }
  try {
    return job.finish(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace polysmooth::cli
