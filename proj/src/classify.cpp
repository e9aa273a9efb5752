#include "propmap/classify.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace propmap {

long AbelianGroupDesc::element_count() const {
  if (rank > 0) throw DomainError("element_count: infinite group");
  long count = 1;
  for (long t : torsion) count *= t;
  return count;
}

std::string AbelianGroupDesc::to_string() const {
  std::string s;
  for (int i = 0; i < rank; ++i) s += (s.empty() ? "Z" : " x Z");
  for (long t : torsion) s += (s.empty() ? "" : " x ") + std::string("Z/") + std::to_string(t);
  return s.empty() ? "0" : s;
}

bool ClassSetDesc::count_is_infinite() const {
  if (kind == Kind::Unknown) throw DomainError("class set: unknown to this artifact");
  if (kind == Kind::CountOnly) return false;
  return group.is_infinite();
}

long ClassSetDesc::finite_count() const {
  if (kind == Kind::Unknown) throw DomainError("class set: unknown to this artifact");
  if (kind == Kind::CountOnly) return count;
  return group.element_count();
}

std::string ClassSetDesc::describe() const {
  switch (kind) {
    case Kind::Group: return group.to_string();
    case Kind::CountOnly: return std::to_string(count) + " classes (no group structure)";
    case Kind::Unknown: return "unknown to this artifact";
  }
  return "";
}

GroupTable GroupTable::parse(const std::string& text) {
  GroupTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string numbers = hash == std::string::npos ? line : line.substr(0, hash);
    std::string source = hash == std::string::npos ? "" : line.substr(hash + 1);
    // trim
    const auto sb = source.find_first_not_of(" \t");
    source = sb == std::string::npos ? "" : source.substr(sb);
    while (!source.empty() && (source.back() == ' ' || source.back() == '\r')) source.pop_back();

    std::istringstream nums(numbers);
    std::vector<long> values;
    long v;
    while (nums >> v) values.push_back(v);
    std::string leftover;
    if (nums.clear(), nums >> leftover)
      throw DomainError("group table line " + std::to_string(line_no) + ": junk in numeric part");
    if (values.empty()) continue;  // blank or comment-only line

    if (source.empty())
      throw DomainError("group table line " + std::to_string(line_no) +
                        ": entry has no source citation");
    if (values.size() < 3)
      throw DomainError("group table line " + std::to_string(line_no) + ": need n k rank");
    AbelianGroupDesc desc;
    const int n = static_cast<int>(values[0]);
    const int k = static_cast<int>(values[1]);
    desc.rank = static_cast<int>(values[2]);
    if (n < 1 || k < 1 || desc.rank < 0)
      throw DomainError("group table line " + std::to_string(line_no) + ": bad n/k/rank");
    for (size_t i = 3; i < values.size(); ++i) {
      if (values[i] < 2)
        throw DomainError("group table line " + std::to_string(line_no) +
                          ": torsion orders must be >= 2");
      desc.torsion.push_back(values[i]);
    }
    desc.source = source;
    if (!table.rows_.emplace(std::make_pair(n, k), desc).second)
      throw DomainError("group table line " + std::to_string(line_no) + ": duplicate entry");
  }
  return table;
}

GroupTable GroupTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("group table: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<AbelianGroupDesc> GroupTable::row(int n, int k) const {
  auto it = rows_.find(std::make_pair(n, k));
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

const GroupTable& default_table() {
  static const GroupTable table = GroupTable::load(std::string(PROPMAP_DATA_DIR) +
                                                   "/homotopy_groups.txt");
  return table;
}

ClassSetDesc group_lookup(int n, int k, const GroupTable& table) {
  if (n < 1 || k < 1) throw DomainError("group_lookup: dimensions must be positive");
  ClassSetDesc out;
  if (k == 1) {
    out.kind = ClassSetDesc::Kind::CountOnly;
    out.count = n > 1 ? 2 : 4;
    out.source = n > 1 ? "end sign of the single end of R^n, n > 1"
                       : "ordered end-sign pair of R^1";
    return out;
  }
  if (n < k) {
    out.kind = ClassSetDesc::Kind::Group;
    out.group.rank = 0;
    out.group.source = "connectivity: S^{n-1} into a (k-2)-connected sphere";
    out.source = out.group.source;
    return out;
  }
  if (n == k) {
    out.kind = ClassSetDesc::Kind::Group;
    out.group.rank = 1;
    out.group.source = "degree of self-maps of S^{n-1}";
    out.source = out.group.source;
    return out;
  }
  auto row = table.row(n, k);
  if (!row) {
    out.kind = ClassSetDesc::Kind::Unknown;
    out.source = "outside curated table coverage";
    return out;
  }
  out.kind = ClassSetDesc::Kind::Group;
  out.group = *row;
  out.source = row->source;
  return out;
}

StabilityReport stability_check(int m, int n, int k) {
  if (m < 0) throw DomainError("stability_check: m must be >= 0");
  if (n < 1) throw DomainError("stability_check: n must be >= 1");
  if (k < 2) throw DomainError("stability_check: k must be >= 2");
  StabilityReport rep;
  rep.m = m;
  rep.n = n;
  rep.k = k;
  rep.cohomotopy_set_is_group = m + n <= 2 * k - 3;
  rep.diagram_bijective = 2 * k >= m + 3 + std::max(n, m + 1);
  rep.freudenthal = m + n <= 2 * k - 2;
  int l = 0;
  while (!(2 * (k + l) >= m + 3 + std::max(n + l, m + 1))) {
    ++l;
    if (l > 4096) throw Error("stability_check: shift search did not terminate");
  }
  rep.stable_shift = l;
  rep.stable_n = n + l;
  rep.stable_k = k + l;
  return rep;
}

CountResult proper_class_count(int n, int k, const GroupTable& table) {
  ClassSetDesc desc = group_lookup(n, k, table);
  CountResult res;
  if (desc.kind == ClassSetDesc::Kind::Unknown) return res;
  res.known = true;
  res.infinite = desc.count_is_infinite();
  if (!res.infinite) res.count = desc.finite_count();
  return res;
}

}  // namespace propmap
