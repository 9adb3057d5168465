#include "bargeflow/mps.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "bargeflow/error.hpp"

namespace bargeflow {

namespace {

std::string row_name(std::size_t r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%07zu", r + 1);
  return buf;
}

std::string col_name(std::size_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07zu", c + 1);
  return buf;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Two-letter field, then names padded to the fixed-format columns.
void line(std::ostream& out, const char* code, const std::string& first,
          const std::string& second, const std::string& value) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " %-2s %-8s  %-8s  %s", code, first.c_str(),
                second.c_str(), value.c_str());
  out << buf << '\n';
}

}  // namespace

void write_mps(const MilpModel& model, std::ostream& out,
               const std::string& name) {
  const StandardFormLP lp = canonicalize(model.lp);
  const std::size_t n = lp.num_cols();
  if (model.is_integer.size() != n) {
    throw InvalidInput("integrality flags do not match the column count");
  }
  out << "NAME          " << name << '\n';
  out << "ROWS\n";
  out << " N  OBJ\n";
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const char* code = lp.sense[r] == RowSense::kLessEqual      ? "L"
                       : lp.sense[r] == RowSense::kGreaterEqual ? "G"
                                                                : "E";
    out << ' ' << code << "  " << row_name(r) << '\n';
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> by_col(n);
  for (const SparseEntry& e : lp.entries) by_col[e.col].push_back({e.row, e.value});

  out << "COLUMNS\n";
  bool in_integer = false;
  std::size_t marker = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const bool integer = model.is_integer[c] != 0;
    if (integer != in_integer) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "    MARKER%04zu  'MARKER'                 '%s'",
                    marker++, integer ? "INTORG" : "INTEND");
      out << buf << '\n';
      in_integer = integer;
    }
    line(out, "", col_name(c), "OBJ", number(lp.objective[c]));
    for (const auto& [row, value] : by_col[c]) {
      line(out, "", col_name(c), row_name(row), number(value));
    }
  }
  if (in_integer) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "    MARKER%04zu  'MARKER'                 'INTEND'",
                  marker);
    out << buf << '\n';
  }

  out << "RHS\n";
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    if (lp.rhs[r] != 0.0) line(out, "", "RHS", row_name(r), number(lp.rhs[r]));
  }

  out << "BOUNDS\n";
  for (std::size_t c = 0; c < n; ++c) {
    const double lo = lp.lower[c];
    const double hi = lp.upper[c];
    if (lo == hi) {
      line(out, "FX", "BND", col_name(c), number(lo));
      continue;
    }
    if (std::isinf(lo)) {
      line(out, "MI", "BND", col_name(c), "");
    } else if (lo != 0.0) {
      line(out, "LO", "BND", col_name(c), number(lo));
    }
    if (std::isinf(hi)) {
      if (model.is_integer[c]) line(out, "PL", "BND", col_name(c), "");
    } else {
      line(out, "UP", "BND", col_name(c), number(hi));
    }
  }
  out << "ENDATA\n";
  if (!out) throw IoError("failed to write MPS output");
}

void write_mps(const MilpModel& model, const std::string& path,
               const std::string& name) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write_mps(model, file, name);
  file.close();
  if (!file) throw IoError("failed to write " + path);
}

MilpModel read_mps(std::istream& in) {
  enum class Section { kNone, kRows, kColumns, kRhs, kBounds, kDone };
  Section section = Section::kNone;
  MilpModel model;
  StandardFormLP& lp = model.lp;
  std::map<std::string, std::size_t> rows;
  std::map<std::string, std::size_t> cols;
  std::string objective_row;
  bool integer = false;
  std::string text;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& what) {
    throw InvalidInput("MPS line " + std::to_string(line_no) + ": " + what);
  };
  auto parse_number = [&](const std::string& token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("bad number '" + token + "'");
    }
    if (used != token.size()) fail("bad number '" + token + "'");
    return v;
  };
  auto column = [&](const std::string& token) {
    auto it = cols.find(token);
    if (it == cols.end()) fail("unknown column " + token);
    return it->second;
  };
  auto row = [&](const std::string& token) -> std::ptrdiff_t {
    if (token == objective_row) return -1;
    auto it = rows.find(token);
    if (it == rows.end()) fail("unknown row " + token);
    return static_cast<std::ptrdiff_t>(it->second);
  };

  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty() || text[0] == '*') continue;
    std::istringstream tokens(text);
    std::vector<std::string> f;
    for (std::string t; tokens >> t;) f.push_back(t);
    if (f.empty()) continue;
    if (text[0] != ' ' && text[0] != '\t') {
      if (f[0] == "NAME") continue;
      if (f[0] == "ROWS") section = Section::kRows;
      else if (f[0] == "COLUMNS") section = Section::kColumns;
      else if (f[0] == "RHS") section = Section::kRhs;
      else if (f[0] == "BOUNDS") section = Section::kBounds;
      else if (f[0] == "ENDATA") section = Section::kDone;
      else fail("unsupported section " + f[0]);
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (f.size() != 2) fail("expected row type and name");
        if (f[0] == "N") {
          if (!objective_row.empty()) fail("second objective row");
          objective_row = f[1];
          break;
        }
        RowSense sense = RowSense::kEqual;
        if (f[0] == "L") sense = RowSense::kLessEqual;
        else if (f[0] == "G") sense = RowSense::kGreaterEqual;
        else if (f[0] != "E") fail("unknown row type " + f[0]);
        if (rows.count(f[1])) fail("duplicate row " + f[1]);
        rows[f[1]] = lp.add_row(sense, 0.0);
        break;
      }
      case Section::kColumns: {
        if (f.size() == 3 && f[1] == "'MARKER'") {
          if (f[2] == "'INTORG'") integer = true;
          else if (f[2] == "'INTEND'") integer = false;
          else fail("unknown marker " + f[2]);
          break;
        }
        if (f.size() != 3 && f.size() != 5) fail("expected column entries");
        auto it = cols.find(f[0]);
        std::size_t c = 0;
        if (it == cols.end()) {
          c = lp.add_col(0.0, 0.0, kInfinity);
          model.is_integer.push_back(integer ? 1 : 0);
          cols[f[0]] = c;
        } else {
          c = it->second;
        }
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          const std::ptrdiff_t r = row(f[k]);
          const double v = parse_number(f[k + 1]);
          if (r < 0) {
            lp.objective[c] = v;
          } else {
            lp.set(static_cast<std::size_t>(r), c, v);
          }
        }
        break;
      }
      case Section::kRhs: {
        if (f.size() != 3 && f.size() != 5) fail("expected RHS entries");
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          const std::ptrdiff_t r = row(f[k]);
          if (r >= 0) lp.rhs[static_cast<std::size_t>(r)] = parse_number(f[k + 1]);
        }
        break;
      }
      case Section::kBounds: {
        if (f.size() < 3) fail("expected bound entry");
        const std::size_t c = column(f[2]);
        const std::string& type = f[0];
        if (type == "MI") {
          lp.lower[c] = -kInfinity;
        } else if (type == "PL") {
          lp.upper[c] = kInfinity;
        } else if (type == "BV") {
          lp.lower[c] = 0.0;
          lp.upper[c] = 1.0;
        } else {
          if (f.size() != 4) fail("bound value missing");
          const double v = parse_number(f[3]);
          if (type == "UP") lp.upper[c] = v;
          else if (type == "LO") lp.lower[c] = v;
          else if (type == "FX") lp.lower[c] = lp.upper[c] = v;
          else fail("unknown bound type " + type);
        }
        break;
      }
      case Section::kNone:
      case Section::kDone:
        fail("data outside a section");
    }
  }
  if (section != Section::kDone) throw InvalidInput("MPS input lacks ENDATA");
  model.lp = canonicalize(lp);
  return model;
}

MilpModel read_mps(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open " + path);
  return read_mps(file);
}

}  // namespace bargeflow
