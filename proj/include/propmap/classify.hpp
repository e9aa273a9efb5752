#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "propmap/config.hpp"

namespace propmap {

struct AbelianGroupDesc {
  int rank = 0;
  std::vector<long> torsion;  // orders >= 2
  std::string source;

  bool is_infinite() const { return rank > 0; }
  long element_count() const;    // product of torsion orders; only when rank == 0
  std::string to_string() const; // "0", "Z", "Z/2", "Z x Z/12", ...
};

// The classifying answer for a pair (n, k): a group, a bare class count
// (k = 1, where no group structure is asserted), or out of table coverage.
struct ClassSetDesc {
  enum class Kind { Group, CountOnly, Unknown };
  Kind kind = Kind::Unknown;
  AbelianGroupDesc group;  // when kind == Group
  long count = 0;          // when kind == CountOnly
  std::string source;

  bool count_is_infinite() const;
  long finite_count() const;  // throws for infinite/unknown
  std::string describe() const;
};

// Line-oriented curated table `n k rank torsion... # source`. Rows without
// a source citation are rejected.
class GroupTable {
 public:
  static GroupTable load(const std::string& path);
  static GroupTable parse(const std::string& text);  // same format, in memory

  std::optional<AbelianGroupDesc> row(int n, int k) const;
  size_t size() const { return rows_.size(); }

 private:
  std::map<std::pair<int, int>, AbelianGroupDesc> rows_;
};

// Table shipped with the build (data/homotopy_groups.txt).
const GroupTable& default_table();

// Classifying set of proper-map classes R^n -> R^k: trivial for n < k, the
// integers for n = k, curated table values for k >= 2 below that, and bare
// counts for k = 1 (2 classes for n > 1, 4 for n = 1).
ClassSetDesc group_lookup(int n, int k, const GroupTable& table = default_table());

struct StabilityReport {
  int m = 0, n = 0, k = 0;
  bool cohomotopy_set_is_group = false;  // m + n <= 2k - 3
  bool diagram_bijective = false;        // 2k >= m + 3 + max(n, m + 1)
  bool freudenthal = false;              // m + n <= 2k - 2
  int stable_shift = 0;                  // minimal l making the diagram inequality hold
  int stable_n = 0, stable_k = 0;        // (n + l, k + l)
};

StabilityReport stability_check(int m, int n, int k);

struct CountResult {
  bool known = false;
  bool infinite = false;
  long count = 0;
};

CountResult proper_class_count(int n, int k, const GroupTable& table = default_table());

}  // namespace propmap
