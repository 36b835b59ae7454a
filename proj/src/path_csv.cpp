#include "funcito/path_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "funcito/errors.hpp"

namespace funcito {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_row(std::ostream& out, double t, std::span<const double> x,
               std::span<const double> v, int flag) {
  out << fmt_double(t);
  for (double c : x) out << ',' << fmt_double(c);
  for (double c : v) out << ',' << fmt_double(c);
  out << ',' << flag << '\n';
}

struct Row {
  double t;
  std::vector<double> x;
  std::vector<double> v;
  int flag;
};

}  // namespace

void write_lifted_csv(std::ostream& out, const LiftedPath& p) {
  const int d = p.dim();
  out << 't';
  for (int i = 1; i <= d; ++i) out << ",x_" << i;
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) out << ",v_" << i << j;
  out << ",jump_flag\n";

  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.time(i);
    if (p.x().is_jump(i) || p.v().is_jump(i)) {
      const Vec xl = p.x().left_limit(i);
      const Vec vl = p.v().left_limit(i);
      write_row(out, t, xl, vl, 1);
    }
    write_row(out, t, p.x().value(i), p.v().value(i), 0);
  }
}

LiftedPath read_lifted_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty path CSV");
  // infer d from the column count: 2 + d + d^2 columns
  std::size_t cols = 1;
  for (char c : header)
    if (c == ',') ++cols;
  int d = 0;
  while (static_cast<std::size_t>(2 + (d + 1) + (d + 1) * (d + 1)) <= cols) ++d;
  if (d < 1 || static_cast<std::size_t>(2 + d + d * d) != cols)
    throw ConfigError("path CSV header has unexpected column count");

  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row r;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ls, cell, ',')) nums.push_back(std::stod(cell));
    if (nums.size() != cols) throw ConfigError("path CSV row has wrong column count");
    r.t = nums[0];
    r.x.assign(nums.begin() + 1, nums.begin() + 1 + d);
    r.v.assign(nums.begin() + 1 + d, nums.begin() + 1 + d + d * d);
    r.flag = static_cast<int>(nums.back());
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("path CSV has no data rows");

  GridPath x, v;
  x.dim = d;
  v.dim = d * d;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    if (r.flag == 1) {
      // left-limit row: must be followed by the value row at the same time
      if (k + 1 >= rows.size() || rows[k + 1].t != r.t || rows[k + 1].flag != 0)
        throw ConfigError("left-limit row without matching value row");
      continue;
    }
    const std::size_t idx = x.times.size();
    x.times.push_back(r.t);
    x.values.insert(x.values.end(), r.x.begin(), r.x.end());
    v.times.push_back(r.t);
    v.values.insert(v.values.end(), r.v.begin(), r.v.end());
    if (k > 0 && rows[k - 1].flag == 1 && rows[k - 1].t == r.t) {
      const Row& left = rows[k - 1];
      if (sup_diff(left.x, r.x) != 0.0) x.jump_left.emplace(idx, left.x);
      if (sup_diff(left.v, r.v) != 0.0) v.jump_left.emplace(idx, left.v);
    }
  }
  return LiftedPath(std::move(x), std::move(v));
}

void write_lifted_csv_file(const std::string& filename, const LiftedPath& p) {
  std::ofstream out(filename);
  if (!out) throw ConfigError("cannot open for writing: " + filename);
  write_lifted_csv(out, p);
}

LiftedPath read_lifted_csv_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError("cannot open for reading: " + filename);
  return read_lifted_csv(in);
}

}  // namespace funcito
