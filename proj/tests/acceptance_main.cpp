// Acceptance suite: runs every shipped guarantee end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "propmap/classify.hpp"
#include "propmap/grammar.hpp"
#include "propmap/invariants.hpp"
#include "propmap/normalize.hpp"
#include "propmap/pontryagin.hpp"
#include "propmap/rng.hpp"

using namespace propmap;

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

// ---------------------------------------------------------------- 1
void class_counts(Check& c) {
  auto line = proper_class_count(1, 1);
  c.expect(line.known && line.count == 4, "(1,1) must have 4 classes");
  auto halfline = proper_class_count(3, 1);
  c.expect(halfline.known && halfline.count == 2, "(3,1) must have 2 classes");
  auto winding = group_lookup(2, 2);
  c.expect(winding.describe() == "Z" && winding.count_is_infinite(), "(2,2) must be Z");
  auto hopf_case = group_lookup(4, 3);
  c.expect(hopf_case.describe() == "Z" && hopf_case.count_is_infinite(), "(4,3) must be Z");
  auto eta = group_lookup(5, 4);
  c.expect(eta.describe() == "Z/2" && eta.finite_count() == 2, "(5,4) must be Z/2");
}

// ---------------------------------------------------------------- 2
void bijection_round_trip(Check& c) {
  for (int d = -5; d <= 5; ++d) {
    InvariantReport rep = proper_class(radial_extend(SphereMapSpec::circle_power(d)));
    c.expect(rep.kind == "winding" && rep.has_value && rep.value == d,
             "winding round trip failed at d = " + std::to_string(d));
  }
  const SphereMapSpec s0_maps[] = {
      SphereMapSpec::identity(0),
      SphereMapSpec::antipodal(0),
      SphereMapSpec::constant(0, Vec::Unit(1, 0)),
      SphereMapSpec::constant(0, -Vec::Unit(1, 0)),
  };
  for (const auto& f : s0_maps) {
    const int left = f.eval(vec1(-1.0))[0] > 0 ? 1 : -1;
    const int right = f.eval(vec1(1.0))[0] > 0 ? 1 : -1;
    InvariantReport rep = proper_class(radial_extend(f));
    c.expect(rep.kind == "end_signs" && rep.ends == std::make_pair(left, right),
             "end-sign round trip failed for an S^0 map");
  }
  InvariantReport hopf_rep = proper_class(radial_extend(SphereMapSpec::hopf()));
  c.expect(hopf_rep.kind == "hopf" && hopf_rep.value == 1, "hopf round trip must give 1");
}

// ---------------------------------------------------------------- 3
void formula_contracts(Check& c) {
  // clamp: the three regimes, exactly
  Vec e1 = Vec::Unit(2, 0);
  c.expect((clamp(0.5 * e1, 2.0) - 0.5 * e1).norm() == 0.0, "clamp inside the unit ball");
  c.expect((clamp(1.5 * e1, 2.0) - e1).norm() == 0.0, "clamp middle regime");
  c.expect((clamp(4.0 * e1, 2.0) - 2.0 * e1).norm() == 0.0, "clamp outer regime");

  // norm preservation over 10^4 samples for a non-radial and a radial input
  Mat a(2, 2);
  a << 2.0, 0.5, 0.0, 1.0;
  const MapSpec candidates[] = {MapSpec::linear(a),
                                radial_extend(SphereMapSpec::circle_power(3))};
  for (const auto& g : candidates) {
    const double R = find_escape_radius(g, 1.0, 64.0);
    const double r = sphere_bound(g, R);
    MapSpec g1 = stage_g1(g, R, r);
    ProperHomotopy h = stage_G1(g1);
    Rng rng(2026);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double t = rng.uniform();
      Vec v = rng.unit_vector(2) * std::pow(10.0, rng.uniform(-1.0, 1.0));
      worst = std::max(worst, std::abs(h.eval(t, v).norm() - g1.eval(v).norm()));
    }
    c.expect(worst <= 1e-9, "norm identity violated: " + std::to_string(worst));
  }

  // every pipeline stage certified proper at r in {1, 2, 4}
  const MapSpec pipeline_inputs[] = {
      MapSpec::identity(2),
      MapSpec::polynomial({0.0, 0.0, 1.0}),
      radial_extend(SphereMapSpec::circle_power(3)),
      MapSpec::linear(a),
  };
  for (const auto& g : pipeline_inputs) {
    NormalizationResult res = normalize(g, 64.0, {1.0, 2.0, 4.0});
    for (const auto& cert : res.track.certificates)
      c.expect(cert.pass(), "stage '" + cert.stage + "' failed its certificate");
  }
}

// ---------------------------------------------------------------- 4
void hopf_separation(Check& c) {
  SphereMapSpec hopf = SphereMapSpec::hopf();
  SphereMapSpec reflected = SphereMapSpec::compose(hopf, SphereMapSpec::reflect_last(3));
  SphereMapSpec doubled = SphereMapSpec::compose(
      hopf, suspend_sphere(suspend_sphere(SphereMapSpec::circle_power(2))));
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    c.expect(hopf_invariant(hopf, seed) == 1, "hopf must be +1 (pair " + std::to_string(seed) + ")");
    c.expect(hopf_invariant(reflected, seed) == -1,
             "reflected hopf must be -1 (pair " + std::to_string(seed) + ")");
    c.expect(hopf_invariant(doubled, seed) == 2,
             "degree-2 composite must be 2 (pair " + std::to_string(seed) + ")");
  }
}

// ---------------------------------------------------------------- 5
void framed_incompleteness(Check& c) {
  MapSpec up = MapSpec::polynomial({0.0, 0.0, 1.0});
  MapSpec down = MapSpec::polynomial({0.0, 0.0, -1.0});

  // at the shared negative value: one preimage is empty, the other cancels
  // to the class of the empty set; at their unattained values both are empty
  auto up_at_neg = preimage_points(up, vec1(-1.0), 8.0);
  c.expect(up_at_neg.points.empty(), "x^2 must miss -1");
  auto down_at_neg = preimage_points(down, vec1(-1.0), 8.0);
  FramedPoints down_fp =
      extract_framing(down, down_at_neg.points, Mat::Identity(1, 1), vec1(-1.0));
  c.expect(signed_count(down_fp) == 0, "-x^2 at -1 must cancel to the empty class");
  c.expect(preimage_points(down, vec1(1.0), 8.0).points.empty(), "-x^2 must miss +1");

  InvariantReport up_class = proper_class(up);
  InvariantReport down_class = proper_class(down);
  c.expect(up_class.ends == std::make_pair(1, 1), "x^2 must classify as (+, +)");
  c.expect(down_class.ends == std::make_pair(-1, -1), "-x^2 must classify as (-, -)");
  c.expect(up_class.ends != down_class.ends, "classes must differ");
}

// ---------------------------------------------------------------- 6
bool pl_oracle(const std::vector<int>& signs) {
  const int len = static_cast<int>(signs.size());
  for (unsigned mask = 0; mask < (1u << (len + 1)); ++mask) {
    std::vector<int> knot(len + 1);
    for (int i = 0; i <= len; ++i) knot[i] = (mask >> i) & 1 ? 1 : -1;
    bool ok = true;
    for (int j = 1; j <= len && ok; ++j)
      if (knot[j] != -knot[j - 1] || knot[j] != signs[j - 1]) ok = false;
    if (ok) return true;
  }
  return len == 0;
}

void realizability(Check& c) {
  auto pp = realizable_1d({1, 1});
  c.expect(!pp.realizable && pp.blocking_index == 0 && !pp.certificate.empty(),
           "(+,+) must be rejected with a certificate");
  auto quad = realizable_1d({1, -1, -1, 1});
  c.expect(!quad.realizable && quad.blocking_index == 1,
           "(+,-,-,+) must be rejected with a certificate");

  long total = 0;
  for (int len = 0; len <= 6; ++len) {
    const unsigned limit = len == 0 ? 1u : (1u << len);
    for (unsigned mask = 0; mask < limit; ++mask) {
      std::vector<int> signs(len);
      for (int i = 0; i < len; ++i) signs[i] = (mask >> i) & 1 ? 1 : -1;
      auto res = realizable_1d(signs);
      c.expect(res.realizable == pl_oracle(signs), "oracle mismatch at a sequence of length " +
                                                       std::to_string(len));
      ++total;
      // alternating sequences must come with a verified witness
      if (res.realizable && len > 0) {
        auto pre = preimage_points(*res.witness, Vec::Zero(1), 8.0);
        bool witness_ok = pre.points.size() == signs.size();
        if (witness_ok) {
          FramedPoints fp =
              extract_framing(*res.witness, pre.points, Mat::Identity(1, 1), Vec::Zero(1));
          for (size_t i = 0; i < signs.size(); ++i)
            if (fp.signs[i] != signs[i]) witness_ok = false;
        }
        c.expect(witness_ok, "witness verification failed at length " + std::to_string(len));
      }
    }
  }
  c.expect(total == 2 * (64 - 1) + 1, "must enumerate all 127 sequences");
}

// ---------------------------------------------------------------- 7
void pt_round_trip(Check& c) {
  Rng rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const int m = 1 + static_cast<int>(rng.next_u64() % 5);

    FramedPoints fp;
    fp.dim = n;
    fp.regular_value = 0.5 * rng.normal_vector(n);

    // distinct points with comfortable separation
    while (static_cast<int>(fp.points.size()) < m) {
      Vec p = 2.5 * rng.normal_vector(n) / std::sqrt(static_cast<double>(n));
      bool far_enough = true;
      for (const auto& q : fp.points)
        if ((p - q).norm() < 1.4) far_enough = false;
      if (far_enough) fp.points.push_back(p);
    }
    if (n == 1)
      std::sort(fp.points.begin(), fp.points.end(),
                [](const Vec& a, const Vec& b) { return a[0] < b[0]; });

    for (int j = 0; j < m; ++j) {
      int sign = rng.uniform() < 0.5 ? -1 : 1;
      if (n == 1) sign = (j % 2 == 0) ? 1 : -1;  // crossings on a line alternate
      Mat frame(n, n);
      double det = 0.0;
      do {
        for (int r = 0; r < n; ++r)
          for (int cc = 0; cc < n; ++cc) frame(r, cc) = rng.normal();
        frame += 2.0 * Mat::Identity(n, n) * (rng.uniform() < 0.5 ? 1.0 : -1.0);
        det = frame.determinant();
      } while (std::abs(det) < 0.3 || frame.norm() > 6.0);
      if ((det > 0 ? 1 : -1) != sign) frame.row(0) = -frame.row(0);
      fp.frames.push_back(frame);
      fp.signs.push_back(sign);
    }
    fp.validate();

    MapSpec f = pt_construct(fp, 0.3);
    auto pre = preimage_points(f, fp.regular_value, 8.0);
    c.expect(pre.unresolved_cells.empty(),
             "unresolved cells in trial " + std::to_string(trial));
    FramedPoints back =
        extract_framing(f, pre.points, Mat::Identity(n, n), fp.regular_value);
    c.expect(signed_count(back) == signed_count(fp),
             "signed count changed in trial " + std::to_string(trial) + ": " +
                 std::to_string(signed_count(fp)) + " -> " + std::to_string(signed_count(back)));
  }
}

// ---------------------------------------------------------------- 8
void stability_arithmetic(Check& c) {
  c.expect(!stability_check(0, 4, 3).diagram_bijective, "(0,4,3) must be unstable");
  c.expect(stability_check(0, 1, 2).diagram_bijective, "(0,1,2) must be stable");
  auto square = stability_check(0, 4, 4);
  c.expect(square.diagram_bijective && square.stable_shift == 0, "(0,4,4) must be stable");
  for (int m = 0; m <= 4; ++m)
    for (int n = 1; n <= 10; ++n)
      for (int k = 2; k <= 10; ++k)
        if (stability_check(m, n, k).diagram_bijective)
          c.expect(stability_check(m, n + 1, k + 1).diagram_bijective,
                   "monotonicity failed at (" + std::to_string(m) + "," + std::to_string(n) +
                       "," + std::to_string(k) + ")");
}

// ---------------------------------------------------------------- 9
void suspension_coherence(Check& c) {
  for (int d = -5; d <= 5; ++d) {
    SphereMapSpec g = SphereMapSpec::circle_power(d);
    const int w = winding_number(g);
    const int deg = degree_s2(suspend_sphere(g), Vec::Unit(3, 2));
    c.expect(w == d && deg == d, "suspension coherence failed at d = " + std::to_string(d));
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"classifying counts for (1,1), (3,1), (2,2), (4,3), (5,4)", class_counts},
      {"bijection round trip: circle powers, S^0 maps, hopf", bijection_round_trip},
      {"pipeline formula contracts: clamp regimes, norm identity, properness", formula_contracts},
      {"hopf separation: +1 / -1 / 2, stable over 3 regular-value pairs", hopf_separation},
      {"framed invariant incompleteness: parabola pair separated", framed_incompleteness},
      {"1-d realizability certificates against the PL oracle (127 sequences)", realizability},
      {"collapse round trip: 20 seeded framed point sets, n <= 3", pt_round_trip},
      {"stability arithmetic and suspension monotonicity", stability_arithmetic},
      {"suspension coherence: winding equals suspended degree, |d| <= 5", suspension_coherence},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(check);
    } catch (const std::exception& e) {
      check.pass = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%zu/%zu] %-68s %s (%.2f s)\n", i + 1, criteria.size(), criteria[i].title,
                check.pass ? "PASS" : "FAIL", secs);
    if (!check.pass) {
      std::printf("        %s\n", check.detail.c_str());
      ++failures;
    }
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
