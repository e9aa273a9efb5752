#include "propmap/job.hpp"

#include <fstream>
#include <set>

#include "propmap/classify.hpp"
#include "propmap/grammar.hpp"
#include "propmap/invariants.hpp"
#include "propmap/normalize.hpp"
#include "propmap/pontryagin.hpp"

namespace propmap {

using nlohmann::json;

namespace {

class SchemaError : public Error {
 public:
  using Error::Error;
};

void check_fields(const json& job, const std::set<std::string>& allowed) {
  for (auto it = job.begin(); it != job.end(); ++it)
    if (!allowed.count(it.key()))
      throw SchemaError("unknown field '" + it.key() + "' in job");
}

long get_int(const json& job, const std::string& key) {
  if (!job.contains(key)) throw SchemaError("missing field '" + key + "'");
  if (!job[key].is_number_integer()) throw SchemaError("field '" + key + "' must be an integer");
  return job[key].get<long>();
}

double get_number(const json& job, const std::string& key, double fallback) {
  if (!job.contains(key)) return fallback;
  if (!job[key].is_number()) throw SchemaError("field '" + key + "' must be a number");
  return job[key].get<double>();
}

std::string get_string(const json& job, const std::string& key) {
  if (!job.contains(key)) throw SchemaError("missing field '" + key + "'");
  if (!job[key].is_string()) throw SchemaError("field '" + key + "' must be a string");
  return job[key].get<std::string>();
}

std::uint64_t get_seed(const json& job) {
  if (!job.contains("seed")) return 0;
  if (!job["seed"].is_number_unsigned() && !job["seed"].is_number_integer())
    throw SchemaError("field 'seed' must be an integer");
  return job["seed"].get<std::uint64_t>();
}

Vec get_vector(const json& job, const std::string& key) {
  if (!job.contains(key) || !job[key].is_array())
    throw SchemaError("field '" + key + "' must be an array of numbers");
  Vec v(job[key].size());
  int i = 0;
  for (const auto& entry : job[key]) {
    if (!entry.is_number()) throw SchemaError("field '" + key + "' must contain numbers");
    v[i++] = entry.get<double>();
  }
  return v;
}

json vec_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json escape_json(const EscapeSearch& s) {
  json item;
  item["r"] = s.r;
  item["pass"] = s.pass;
  if (s.pass) item["escape_radius"] = s.escape_radius;
  return item;
}

json properness_json(const PropernessReport& rep) {
  json out;
  out["directions"] = rep.direction_count;
  out["window"] = rep.window;
  out["pass"] = rep.pass();
  json items = json::array();
  for (const auto& it : rep.items) items.push_back(escape_json(it));
  out["levels"] = items;
  return out;
}

json certificate_json(const StageCertificate& cert) {
  json out;
  out["stage"] = cert.stage;
  out["t_samples"] = cert.t_samples;
  out["pass"] = cert.pass();
  json items = json::array();
  for (const auto& it : cert.items) {
    json entry;
    entry["r"] = it.r;
    entry["pass"] = it.pass;
    if (it.pass) entry["escape_radius"] = it.escape_radius;
    items.push_back(entry);
  }
  out["levels"] = items;
  return out;
}

json framed_points_json(const FramedPoints& fp) {
  json out;
  out["dim"] = fp.dim;
  out["regular_value"] = vec_json(fp.regular_value);
  json pts = json::array();
  for (size_t i = 0; i < fp.points.size(); ++i) {
    json p;
    p["point"] = vec_json(fp.points[i]);
    p["frame"] = mat_json(fp.frames[i]);
    p["sign"] = fp.signs[i];
    pts.push_back(p);
  }
  out["points"] = pts;
  out["signed_count"] = signed_count(fp);
  return out;
}

json invariant_json(const InvariantReport& rep) {
  json out;
  out["case"] = rep.kind;
  if (rep.has_value) {
    if (rep.kind == "end_signs") {
      out["value"] = json::array({rep.ends.first, rep.ends.second});
    } else {
      out["value"] = rep.value;
    }
  }
  out["method"] = rep.method;
  out["class_set"] = rep.class_set;
  if (rep.samples_used > 0) out["samples_used"] = rep.samples_used;
  return out;
}

json group_json(const ClassSetDesc& desc) {
  json out;
  switch (desc.kind) {
    case ClassSetDesc::Kind::Group:
      out["kind"] = "group";
      out["group"] = desc.group.to_string();
      out["rank"] = desc.group.rank;
      out["torsion"] = desc.group.torsion;
      break;
    case ClassSetDesc::Kind::CountOnly:
      out["kind"] = "count_only";
      out["count"] = desc.count;
      break;
    case ClassSetDesc::Kind::Unknown:
      out["kind"] = "unknown";
      break;
  }
  out["source"] = desc.source;
  return out;
}

void write_polylines_csv(const FramedCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ComputationError("cannot open csv output path: " + path);
  out << "polyline,vertex";
  for (int c = 0; c < curve.dim; ++c) out << ",x" << (c + 1);
  out << "\n";
  for (size_t p = 0; p < curve.polylines.size(); ++p)
    for (size_t v = 0; v < curve.polylines[p].vertices.size(); ++v) {
      out << p << "," << v;
      char buf[40];
      for (int c = 0; c < curve.dim; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", curve.polylines[p].vertices[v][c]);
        out << "," << buf;
      }
      out << "\n";
    }
}

// --- commands ------------------------------------------------------------

json cmd_classify(const json& job) {
  check_fields(job, {"command", "seed", "out", "m", "n", "k"});
  const int m = static_cast<int>(get_int(job, "m"));
  const int n = static_cast<int>(get_int(job, "n"));
  const int k = static_cast<int>(get_int(job, "k"));

  json out;
  StabilityReport stab = stability_check(m, n, k);
  json stability;
  stability["m"] = stab.m;
  stability["n"] = stab.n;
  stability["k"] = stab.k;
  stability["cohomotopy_set_is_group"] = stab.cohomotopy_set_is_group;
  stability["diagram_bijective"] = stab.diagram_bijective;
  stability["freudenthal"] = stab.freudenthal;
  stability["stable_shift"] = stab.stable_shift;
  stability["stable_pair"] = json::array({stab.stable_n, stab.stable_k});
  out["stability"] = stability;
  out["group"] = group_json(group_lookup(n, k));
  CountResult count = proper_class_count(n, k);
  json cj;
  cj["known"] = count.known;
  if (count.known) {
    cj["infinite"] = count.infinite;
    if (!count.infinite) cj["count"] = count.count;
  }
  out["class_count"] = cj;
  return out;
}

json cmd_normalize(const json& job) {
  check_fields(job, {"command", "seed", "out", "map", "window", "radii"});
  MapSpec g = parse_map(get_string(job, "map"));
  const double window = get_number(job, "window", 64.0);
  std::vector<double> radii = {1.0, 2.0, 4.0};
  if (job.contains("radii")) {
    radii.clear();
    if (!job["radii"].is_array()) throw SchemaError("field 'radii' must be an array");
    for (const auto& r : job["radii"]) {
      if (!r.is_number()) throw SchemaError("field 'radii' must contain numbers");
      radii.push_back(r.get<double>());
    }
  }

  NormalizationResult res = normalize(g, window, radii);
  json out;
  out["R"] = res.escape_radius;
  out["r"] = res.sphere_bound;
  out["boundary_map"] = res.boundary_map.to_text();
  json certs = json::array();
  for (const auto& cert : res.track.certificates) certs.push_back(certificate_json(cert));
  out["certificates"] = certs;
  json stages = json::array();
  for (const auto& stage : res.track.stages) stages.push_back(stage.name);
  out["stages"] = stages;
  return out;
}

json cmd_invariant(const json& job) {
  check_fields(job, {"command", "seed", "out", "name", "map", "sphere_map", "samples", "window",
                     "value"});
  const std::string name = get_string(job, "name");
  const std::uint64_t seed = get_seed(job);

  json out;
  if (name == "winding") {
    SphereMapSpec g = parse_sphere_map(get_string(job, "sphere_map"));
    const long samples = job.contains("samples") ? get_int(job, "samples") : 4096;
    out["case"] = "winding";
    out["value"] = winding_number(g, static_cast<int>(samples));
    out["samples"] = samples;
    return out;
  }
  if (name == "degree2") {
    SphereMapSpec g = parse_sphere_map(get_string(job, "sphere_map"));
    Vec y = job.contains("value") ? get_vector(job, "value") : Vec(Vec::Unit(3, 2));
    out["case"] = "degree2";
    out["value"] = degree_s2(g, y);
    out["regular_value"] = vec_json(y);
    return out;
  }
  if (name == "hopf") {
    SphereMapSpec g = job.contains("sphere_map")
                          ? parse_sphere_map(get_string(job, "sphere_map"))
                          : SphereMapSpec::restriction(parse_map(get_string(job, "map")));
    HopfComputation hc = hopf_invariant_detailed(g, seed);
    out["case"] = "hopf";
    out["value"] = hc.value;
    out["fiber_components"] = json::array({hc.components[0], hc.components[1]});
    out["max_vertex_residual"] = hc.max_vertex_residual;
    out["max_midpoint_residual"] = hc.max_midpoint_residual;
    return out;
  }
  if (name == "end_signs") {
    MapSpec f = parse_map(get_string(job, "map"));
    auto ends = end_signs(f, get_number(job, "window", 64.0));
    out["case"] = "end_signs";
    out["value"] = json::array({ends.first, ends.second});
    return out;
  }
  if (name == "class") {
    MapSpec f = parse_map(get_string(job, "map"));
    out = invariant_json(proper_class(f, get_number(job, "window", 64.0), seed));
    return out;
  }
  throw SchemaError("unknown invariant name '" + name + "'");
}

json cmd_pontryagin_extract(const json& job) {
  check_fields(job, {"command", "seed", "out", "map", "value", "box", "seeds", "step", "csv_out"});
  MapSpec f = parse_map(get_string(job, "map"));
  const Vec y = get_vector(job, "value");
  const double box = get_number(job, "box", 8.0);

  json out;
  if (f.domain_dim() == f.codomain_dim()) {
    const Vec y_reg = find_regular_value(f, y, 0.05, box);
    auto pre = preimage_points(f, y_reg, box);
    if (!pre.unresolved_cells.empty())
      throw ComputationError("pontryagin extract: unresolved grid cells");
    FramedPoints fp =
        extract_framing(f, pre.points, Mat::Identity(f.domain_dim(), f.domain_dim()), y_reg);
    out = framed_points_json(fp);
    return out;
  }
  if (f.domain_dim() == f.codomain_dim() + 1) {
    if (!job.contains("seeds")) throw SchemaError("fiber extraction needs 'seeds'");
    std::vector<Vec> seeds;
    for (const auto& s : job["seeds"]) {
      Vec v(s.size());
      int i = 0;
      for (const auto& c : s) v[i++] = c.get<double>();
      seeds.push_back(v);
    }
    FramedCurve curve = trace_fiber(f, y, seeds, get_number(job, "step", tol::kTraceStep));
    json polys = json::array();
    for (const auto& poly : curve.polylines) {
      json p;
      p["vertices"] = static_cast<long>(poly.vertices.size());
      p["closed"] = poly.closed;
      p["max_vertex_residual"] = poly.max_vertex_residual;
      p["max_midpoint_residual"] = poly.max_midpoint_residual;
      polys.push_back(p);
    }
    out["polylines"] = polys;
    out["regular_value"] = vec_json(y);
    if (job.contains("csv_out")) write_polylines_csv(curve, get_string(job, "csv_out"));
    return out;
  }
  throw SchemaError("pontryagin extract: map must have n = k or n = k + 1");
}

json cmd_pontryagin_construct(const json& job) {
  check_fields(job, {"command", "seed", "out", "points", "frames", "signs", "value",
                     "tube_radius", "box"});
  if (!job.contains("points") || !job["points"].is_array() || job["points"].empty())
    throw SchemaError("field 'points' must be a non-empty array");

  FramedPoints fp;
  for (const auto& p : job["points"]) {
    Vec v(p.size());
    int i = 0;
    for (const auto& c : p) v[i++] = c.get<double>();
    fp.points.push_back(v);
  }
  fp.dim = static_cast<int>(fp.points[0].size());
  fp.regular_value = get_vector(job, "value");
  if (!job.contains("frames") || !job["frames"].is_array())
    throw SchemaError("field 'frames' must be an array of row-major matrices");
  for (const auto& fr : job["frames"]) {
    if (static_cast<int>(fr.size()) != fp.dim * fp.dim)
      throw SchemaError("each frame needs n*n entries");
    Mat m(fp.dim, fp.dim);
    int i = 0;
    for (const auto& c : fr) {
      m(i / fp.dim, i % fp.dim) = c.get<double>();
      ++i;
    }
    fp.frames.push_back(m);
  }
  if (!job.contains("signs") || !job["signs"].is_array())
    throw SchemaError("field 'signs' must be an array of +-1");
  for (const auto& s : job["signs"]) fp.signs.push_back(s.get<int>());
  try {
    fp.validate();
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }

  const double tube = get_number(job, "tube_radius", 0.25);
  MapSpec f = pt_construct(fp, tube);

  // round trip: extract at the same value and compare the signed count
  const double box = get_number(job, "box", 8.0);
  auto pre = preimage_points(f, fp.regular_value, box);
  FramedPoints back =
      extract_framing(f, pre.points, Mat::Identity(fp.dim, fp.dim), fp.regular_value);

  json out;
  out["map"] = f.to_text();
  out["input_signed_count"] = signed_count(fp);
  out["extracted"] = framed_points_json(back);
  out["round_trip_exact"] = signed_count(back) == signed_count(fp);
  out["properness"] = properness_json(properness_check(f, {1.0, 2.0, 4.0}, 64.0));
  return out;
}

json cmd_pontryagin_realizable(const json& job) {
  check_fields(job, {"command", "seed", "out", "signs"});
  std::vector<int> signs;
  if (job.contains("signs") && job["signs"].is_string()) {
    for (char c : job["signs"].get<std::string>()) {
      if (c == '+') signs.push_back(1);
      else if (c == '-') signs.push_back(-1);
      else throw SchemaError("field 'signs' string must consist of '+' and '-'");
    }
  } else if (job.contains("signs") && job["signs"].is_array()) {
    for (const auto& s : job["signs"]) signs.push_back(s.get<int>());
  } else {
    throw SchemaError("field 'signs' must be a string like \"+-+\" or an array of +-1");
  }

  RealizabilityResult res = realizable_1d(signs);
  json out;
  out["realizable"] = res.realizable;
  if (res.realizable) {
    out["witness_positions"] = res.witness_positions;
    // verify the witness: preimage points and crossing signs match
    auto pre = preimage_points(*res.witness, Vec::Zero(1), 8.0);
    json verified = json::array();
    bool match = pre.points.size() == signs.size();
    if (match) {
      FramedPoints fp =
          extract_framing(*res.witness, pre.points, Mat::Identity(1, 1), Vec::Zero(1));
      for (size_t i = 0; i < fp.signs.size(); ++i) {
        verified.push_back(fp.signs[i]);
        if (fp.signs[i] != signs[i]) match = false;
      }
    }
    out["witness_verified"] = match;
    out["witness_signs"] = verified;
  } else {
    out["blocking_index"] = res.blocking_index;
    out["certificate"] = res.certificate;
  }
  return out;
}

json cmd_counterexamples(const json& job) {
  check_fields(job, {"command", "seed", "out", "items", "trace_step"});
  const std::uint64_t seed = get_seed(job);
  const double trace_step = get_number(job, "trace_step", tol::kTraceStep);

  std::vector<std::string> items = {"interval-pair", "cancelling-quadruple", "parabola-pair",
                                    "hopf-pair"};
  if (job.contains("items")) {
    if (!job["items"].is_array()) throw SchemaError("field 'items' must be an array");
    items.clear();
    for (const auto& it : job["items"]) {
      if (!it.is_string()) throw SchemaError("field 'items' must contain strings");
      items.push_back(it.get<std::string>());
    }
    if (items.empty()) throw SchemaError("field 'items' must not be empty");
  }

  json results = json::array();
  bool all_pass = true;
  for (const std::string& item : items) {
    json entry;
    entry["item"] = item;
    bool pass = false;
    if (item == "interval-pair") {
      // two same-direction crossings cannot be a full preimage on the line
      auto res = realizable_1d({1, 1});
      pass = !res.realizable && res.blocking_index == 0;
      entry["realizable"] = res.realizable;
      entry["certificate"] = res.certificate;
    } else if (item == "cancelling-quadruple") {
      // cobordant to the empty set, still not realizable
      FramedPoints fp;
      fp.dim = 1;
      fp.regular_value = Vec::Zero(1);
      const double pos[] = {-2.0, -1.0, 1.0, 2.0};
      const int sgn[] = {1, -1, -1, 1};
      for (int i = 0; i < 4; ++i) {
        Vec p(1);
        p << pos[i];
        fp.points.push_back(p);
        fp.frames.push_back(Mat::Constant(1, 1, static_cast<double>(sgn[i])));
        fp.signs.push_back(sgn[i]);
      }
      auto res = realizable_1d({1, -1, -1, 1});
      pass = signed_count(fp) == 0 && !res.realizable;
      entry["signed_count"] = signed_count(fp);
      entry["realizable"] = res.realizable;
      entry["certificate"] = res.certificate;
    } else if (item == "parabola-pair") {
      MapSpec up = MapSpec::polynomial({0.0, 0.0, 1.0});
      MapSpec down = MapSpec::polynomial({0.0, 0.0, -1.0});
      Vec neg(1);
      neg << -1.0;
      const bool up_empty = preimage_points(up, neg, 8.0).points.empty();
      Vec pos(1);
      pos << 1.0;
      const bool down_empty = preimage_points(down, pos, 8.0).points.empty();
      auto up_class = proper_class(up);
      auto down_class = proper_class(down);
      pass = up_empty && down_empty && up_class.ends == std::make_pair(1, 1) &&
             down_class.ends == std::make_pair(-1, -1);
      entry["empty_preimages"] = up_empty && down_empty;
      entry["classes"] = json::array(
          {json::array({up_class.ends.first, up_class.ends.second}),
           json::array({down_class.ends.first, down_class.ends.second})});
    } else if (item == "hopf-pair") {
      HopfComputation plus = hopf_invariant_detailed(SphereMapSpec::hopf(), seed, trace_step);
      HopfComputation minus = hopf_invariant_detailed(
          SphereMapSpec::compose(SphereMapSpec::hopf(), SphereMapSpec::reflect_last(3)), seed,
          trace_step);
      const double residual = std::max(plus.max_midpoint_residual, minus.max_midpoint_residual);
      const bool residual_ok = residual <= 1e-3;
      pass = plus.value == 1 && minus.value == -1 && residual_ok;
      entry["values"] = json::array({plus.value, minus.value});
      entry["max_midpoint_residual"] = residual;
      entry["residual_ok"] = residual_ok;
      entry["note"] =
          "the two fiber pairs are framed cobordant; the linking number separates the classes";
    } else {
      throw SchemaError("unknown counterexample item '" + item + "'");
    }
    entry["pass"] = pass;
    all_pass = all_pass && pass;
    results.push_back(entry);
  }

  json out;
  out["items"] = results;
  out["pass"] = all_pass;
  return out;
}

}  // namespace

json tolerances_json() {
  json out;
  out["unit_norm"] = tol::kUnitNorm;
  out["fd_step"] = tol::kFdStep;
  out["polish_residual"] = tol::kPolishResidual;
  out["degenerate_norm"] = tol::kDegenerateNorm;
  out["condition_bound"] = tol::kCondBound;
  out["trace_step"] = tol::kTraceStep;
  out["fiber_residual"] = tol::kFiberResidual;
  out["merge_tol"] = tol::kMergeTol;
  out["safety_pad"] = tol::kSafetyPad;
  return out;
}

JobResult run_job(const json& job) {
  JobResult result;
  std::string command = "?";
  try {
    if (!job.is_object()) throw SchemaError("job must be a JSON object");
    if (!job.contains("command") || !job["command"].is_string())
      throw SchemaError("job needs a string 'command' field");
    command = job["command"].get<std::string>();

    json body;
    if (command == "classify") body = cmd_classify(job);
    else if (command == "normalize") body = cmd_normalize(job);
    else if (command == "invariant") body = cmd_invariant(job);
    else if (command == "pontryagin-extract") body = cmd_pontryagin_extract(job);
    else if (command == "pontryagin-construct") body = cmd_pontryagin_construct(job);
    else if (command == "pontryagin-realizable") body = cmd_pontryagin_realizable(job);
    else if (command == "counterexamples") body = cmd_counterexamples(job);
    else throw SchemaError("unknown command '" + command + "'");

    result.report = body;
    result.report["schema"] = "v1";
    result.report["command"] = command;
    result.report["seed"] = job.contains("seed") ? get_seed(job) : 0;
    result.report["tolerances"] = tolerances_json();
    // a failed suite is a computation failure with a full report
    result.exit_code = body.contains("pass") && !body["pass"].get<bool>() ? 1 : 0;
  } catch (const SchemaError& e) {
    result.exit_code = 2;
    result.report = {{"schema", "v1"},
                     {"command", command},
                     {"error", {{"kind", "schema"}, {"message", e.what()}}}};
  } catch (const DomainError& e) {
    result.exit_code = 2;
    result.report = {{"schema", "v1"},
                     {"command", command},
                     {"error", {{"kind", "schema"}, {"message", e.what()}}}};
  } catch (const Error& e) {
    result.exit_code = 1;
    result.report = {{"schema", "v1"},
                     {"command", command},
                     {"error", {{"kind", "computation"}, {"message", e.what()}}}};
  }
  return result;
}

}  // namespace propmap
