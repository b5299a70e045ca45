#pragma once

// Free-format MPS reader/writer. Fixed-format quirks, RANGES and SOS are
// rejected loudly. The optional OBJSENSE section (the common free-format
// extension) is honored so maximization instances survive a round trip.

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/common.hpp"
#include "forge/mip.hpp"

namespace forge {

namespace mps_detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool is_section_keyword(const std::string& t) {
  return t == "NAME" || t == "ROWS" || t == "COLUMNS" || t == "RHS" ||
         t == "RANGES" || t == "BOUNDS" || t == "ENDATA" || t == "OBJSENSE" ||
         t == "SOS";
}

inline double parse_value(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
  if (pos != tok.size())
    throw ParseError("expected a number, got '" + tok + "'", line);
  return v;
}

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace mps_detail

inline MipInstance parse_mps(std::istream& in) {
  using mps_detail::parse_value;
  using mps_detail::tokenize;

  enum Section { kStart, kName, kObjSense, kRows, kColumns, kRhs, kBounds, kDone };
  Section section = kStart;

  MipInstance inst;
  std::unordered_map<std::string, int> row_index;     // constraints only
  std::unordered_map<std::string, int> col_index;
  std::unordered_map<std::string, char> bound_touched;  // any BOUNDS entry seen
  std::vector<std::unordered_map<int, bool>> col_rows;  // duplicate detection
  std::vector<bool> obj_entry;                          // per column
  std::vector<bool> in_marker;                          // declared integral
  std::vector<bool> rhs_set;
  std::string objective_row;
  bool have_objective_row = false;
  bool marker_active = false;
  bool seen_endata = false;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (raw[0] == '*') continue;  // comment line
    const auto tokens = tokenize(raw);
    if (tokens.empty()) continue;

    const bool header_position = !std::isspace(static_cast<unsigned char>(raw[0]));
    if (seen_endata)
      throw ParseError("content after ENDATA", line_no);

    if (header_position && mps_detail::is_section_keyword(tokens[0])) {
      const std::string& kw = tokens[0];
      if (kw == "NAME") {
        if (section != kStart)
          throw ParseError("NAME section out of order", line_no);
        if (tokens.size() > 1) inst.name = tokens[1];
        section = kName;
        continue;
      }
      if (kw == "OBJSENSE") {
        if (section != kStart && section != kName)
          throw ParseError("OBJSENSE section out of order", line_no);
        // Sense may follow on the same line or on the next data line.
        if (tokens.size() > 1) {
          if (tokens[1] == "MAX" || tokens[1] == "MAXIMIZE")
            inst.objective_sense = ObjectiveSense::kMaximize;
          else if (tokens[1] == "MIN" || tokens[1] == "MINIMIZE")
            inst.objective_sense = ObjectiveSense::kMinimize;
          else
            throw ParseError("unknown objective sense '" + tokens[1] + "'", line_no);
        }
        section = kObjSense;
        continue;
      }
      if (kw == "ROWS") {
        if (section != kStart && section != kName && section != kObjSense)
          throw ParseError("ROWS section out of order", line_no);
        section = kRows;
        continue;
      }
      if (kw == "COLUMNS") {
        if (section != kRows)
          throw ParseError("COLUMNS section out of order", line_no);
        if (!have_objective_row)
          throw ParseError("no objective row (type N) declared in ROWS", line_no);
        section = kColumns;
        continue;
      }
      if (kw == "RHS") {
        if (section != kColumns)
          throw ParseError("RHS section out of order", line_no);
        section = kRhs;
        continue;
      }
      if (kw == "RANGES")
        throw ParseError("RANGES section is not supported", line_no);
      if (kw == "SOS")
        throw ParseError("SOS section is not supported", line_no);
      if (kw == "BOUNDS") {
        if (section != kRhs && section != kColumns)
          throw ParseError("BOUNDS section out of order", line_no);
        section = kBounds;
        continue;
      }
      if (kw == "ENDATA") {
        if (section < kColumns)
          throw ParseError("ENDATA before COLUMNS", line_no);
        seen_endata = true;
        section = kDone;
        continue;
      }
    }

    switch (section) {
      case kStart:
        throw ParseError("expected a section header, got '" + tokens[0] + "'",
                         line_no);
      case kName:
      case kObjSense: {
        if (section == kObjSense && tokens.size() == 1) {
          if (tokens[0] == "MAX" || tokens[0] == "MAXIMIZE")
            inst.objective_sense = ObjectiveSense::kMaximize;
          else if (tokens[0] == "MIN" || tokens[0] == "MINIMIZE")
            inst.objective_sense = ObjectiveSense::kMinimize;
          else
            throw ParseError("unknown objective sense '" + tokens[0] + "'", line_no);
          continue;
        }
        throw ParseError("unexpected data before ROWS", line_no);
      }
      case kRows: {
        if (tokens.size() != 2)
          throw ParseError("ROWS entries need a type and a name", line_no);
        const std::string& type = tokens[0];
        const std::string& name = tokens[1];
        if (row_index.count(name) || name == objective_row)
          throw ParseError("duplicate row '" + name + "'", line_no);
        if (type == "N") {
          if (have_objective_row)
            throw ParseError("second objective row '" + name + "'", line_no);
          objective_row = name;
          have_objective_row = true;
        } else if (type == "L" || type == "G" || type == "E") {
          ConstraintDef c;
          c.name = name;
          c.sense = type == "L" ? Sense::kLessEqual
                                : (type == "G" ? Sense::kGreaterEqual : Sense::kEqual);
          row_index[name] = inst.num_constraints();
          inst.constraints.push_back(c);
          rhs_set.push_back(false);
        } else {
          throw ParseError("unknown row type '" + type + "'", line_no);
        }
        break;
      }
      case kColumns: {
        // Marker lines toggle integrality for the following columns.
        bool is_marker = false;
        for (const auto& t : tokens)
          if (t == "'MARKER'") is_marker = true;
        if (is_marker) {
          bool org = false, end = false;
          for (const auto& t : tokens) {
            if (t == "'INTORG'") org = true;
            if (t == "'INTEND'") end = true;
          }
          if (org == end)
            throw ParseError("marker line needs exactly one of 'INTORG'/'INTEND'",
                             line_no);
          marker_active = org;
          break;
        }
        if (tokens.size() < 3 || tokens.size() % 2 == 0)
          throw ParseError("COLUMNS entries need a column name and (row, value) pairs",
                           line_no);
        const std::string& col_name = tokens[0];
        auto it = col_index.find(col_name);
        int col;
        if (it == col_index.end()) {
          col = inst.num_variables();
          col_index[col_name] = col;
          VariableDef v;
          v.name = col_name;
          inst.variables.push_back(v);
          col_rows.emplace_back();
          obj_entry.push_back(false);
          in_marker.push_back(marker_active);
        } else {
          col = it->second;
        }
        for (std::size_t i = 1; i + 1 < tokens.size(); i += 2) {
          const std::string& row_name = tokens[i];
          const double value = parse_value(tokens[i + 1], line_no);
          if (have_objective_row && row_name == objective_row) {
            if (obj_entry[col])
              throw ParseError("duplicate objective entry for column '" + col_name + "'",
                               line_no);
            obj_entry[col] = true;
            inst.variables[col].objective_coeff = value;
            continue;
          }
          auto rit = row_index.find(row_name);
          if (rit == row_index.end())
            throw ParseError("unknown row '" + row_name + "' in COLUMNS", line_no);
          if (col_rows[col].count(rit->second))
            throw ParseError("duplicate entry for (" + row_name + ", " + col_name + ")",
                             line_no);
          col_rows[col][rit->second] = true;
          if (value != 0.0)
            inst.coefficients.push_back({rit->second, col, value});
        }
        break;
      }
      case kRhs: {
        if (tokens.size() < 3 || tokens.size() % 2 == 0)
          throw ParseError("RHS entries need a set name and (row, value) pairs",
                           line_no);
        for (std::size_t i = 1; i + 1 < tokens.size(); i += 2) {
          const std::string& row_name = tokens[i];
          const double value = parse_value(tokens[i + 1], line_no);
          if (have_objective_row && row_name == objective_row)
            throw ParseError("objective constant via RHS is not supported", line_no);
          auto rit = row_index.find(row_name);
          if (rit == row_index.end())
            throw ParseError("unknown row '" + row_name + "' in RHS", line_no);
          if (rhs_set[rit->second])
            throw ParseError("duplicate RHS for row '" + row_name + "'", line_no);
          rhs_set[rit->second] = true;
          inst.constraints[rit->second].rhs = value;
        }
        break;
      }
      case kBounds: {
        if (tokens.size() < 3)
          throw ParseError("BOUNDS entries need a type, set name and column", line_no);
        const std::string& type = tokens[0];
        const std::string& col_name = tokens[2];
        auto it = col_index.find(col_name);
        if (it == col_index.end())
          throw ParseError("unknown column '" + col_name + "' in BOUNDS", line_no);
        const int col = it->second;
        VariableDef& v = inst.variables[col];
        const bool needs_value = type == "UP" || type == "LO" || type == "FX" ||
                                 type == "UI" || type == "LI";
        if (needs_value && tokens.size() < 4)
          throw ParseError("bound type " + type + " needs a value", line_no);
        const double value = needs_value ? parse_value(tokens[3], line_no) : 0.0;
        if (!bound_touched.count(col_name)) {
          bound_touched[col_name] = 1;
          // First explicit bound cancels the [0,1] integer default.
          if (in_marker[col]) {
            v.lower_bound = 0.0;
            v.upper_bound = kInfinity;
          }
        }
        if (type == "UP") {
          v.upper_bound = value;
        } else if (type == "LO") {
          v.lower_bound = value;
        } else if (type == "FX") {
          v.lower_bound = v.upper_bound = value;
        } else if (type == "FR") {
          v.lower_bound = -kInfinity;
          v.upper_bound = kInfinity;
        } else if (type == "MI") {
          v.lower_bound = -kInfinity;
        } else if (type == "PL") {
          v.upper_bound = kInfinity;
        } else if (type == "BV") {
          v.type = VarType::kBinary;
          v.lower_bound = 0.0;
          v.upper_bound = 1.0;
        } else if (type == "UI") {
          v.type = VarType::kInteger;
          v.upper_bound = value;
        } else if (type == "LI") {
          v.type = VarType::kInteger;
          v.lower_bound = value;
        } else {
          throw ParseError("unknown bound type '" + type + "'", line_no);
        }
        break;
      }
      case kDone:
        break;
    }
  }

  if (!seen_endata) throw ParseError("missing ENDATA", line_no == 0 ? 1 : line_no);

  // Finalize variable kinds: marker columns without any BOUNDS entry default
  // to binary [0,1]; marker columns with explicit bounds stay integer.
  for (int j = 0; j < inst.num_variables(); ++j) {
    VariableDef& v = inst.variables[j];
    if (v.type == VarType::kBinary) continue;  // BV
    if (in_marker[j]) {
      if (!bound_touched.count(v.name)) {
        v.type = VarType::kBinary;
        v.lower_bound = 0.0;
        v.upper_bound = 1.0;
      } else {
        v.type = VarType::kInteger;
      }
    }
  }

  try {
    inst.validate();
  } catch (const DataError& e) {
    throw ParseError(std::string("instance failed validation: ") + e.what(), line_no);
  }
  return inst;
}

inline MipInstance parse_mps_string(const std::string& text) {
  std::istringstream in(text);
  return parse_mps(in);
}

inline std::string write_mps(const MipInstance& instance) {
  using mps_detail::format_value;
  instance.validate();

  // Group coefficients by column for contiguous COLUMNS output.
  std::vector<std::vector<std::pair<int, double>>> by_col(instance.num_variables());
  for (const auto& c : instance.coefficients)
    by_col[c.variable].push_back({c.constraint, c.value});
  for (auto& rows : by_col)
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

  std::ostringstream out;
  out << "NAME " << (instance.name.empty() ? "FORGE" : instance.name) << "\n";
  if (instance.objective_sense == ObjectiveSense::kMaximize)
    out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N  OBJ\n";
  for (const auto& c : instance.constraints) {
    const char type = c.sense == Sense::kLessEqual
                          ? 'L'
                          : (c.sense == Sense::kGreaterEqual ? 'G' : 'E');
    out << " " << type << "  " << c.name << "\n";
  }

  out << "COLUMNS\n";
  bool marker_open = false;
  int marker_count = 0;
  for (int j = 0; j < instance.num_variables(); ++j) {
    const VariableDef& v = instance.variables[j];
    const bool integral = v.type != VarType::kContinuous;
    if (integral != marker_open) {
      out << "    M" << marker_count++ << " 'MARKER' "
          << (integral ? "'INTORG'" : "'INTEND'") << "\n";
      marker_open = integral;
    }
    // A zero objective entry anchors columns that appear nowhere else.
    if (v.objective_coeff != 0.0 || by_col[j].empty())
      out << "    " << v.name << " OBJ " << format_value(v.objective_coeff) << "\n";
    for (const auto& [row, value] : by_col[j])
      out << "    " << v.name << " " << instance.constraints[row].name << " "
          << format_value(value) << "\n";
  }
  if (marker_open) out << "    M" << marker_count++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (const auto& c : instance.constraints)
    if (c.rhs != 0.0) out << "    RHS " << c.name << " " << format_value(c.rhs) << "\n";

  std::ostringstream bounds;
  for (const auto& v : instance.variables) {
    switch (v.type) {
      case VarType::kBinary:
        break;  // marker default
      case VarType::kInteger:
        if (v.lower_bound != 0.0)
          bounds << " LI BND " << v.name << " " << format_value(v.lower_bound) << "\n";
        bounds << " UI BND " << v.name << " " << format_value(v.upper_bound) << "\n";
        break;
      case VarType::kContinuous: {
        const bool lo_inf = v.lower_bound == -kInfinity;
        const bool up_inf = v.upper_bound == kInfinity;
        if (lo_inf && up_inf) {
          bounds << " FR BND " << v.name << "\n";
        } else if (v.lower_bound == v.upper_bound) {
          bounds << " FX BND " << v.name << " " << format_value(v.lower_bound) << "\n";
        } else {
          if (lo_inf)
            bounds << " MI BND " << v.name << "\n";
          else if (v.lower_bound != 0.0)
            bounds << " LO BND " << v.name << " " << format_value(v.lower_bound) << "\n";
          if (!up_inf)
            bounds << " UP BND " << v.name << " " << format_value(v.upper_bound) << "\n";
        }
        break;
      }
    }
  }
  const std::string bounds_str = bounds.str();
  if (!bounds_str.empty()) out << "BOUNDS\n" << bounds_str;
  out << "ENDATA\n";
  return out.str();
}

}  // namespace forge
